use std::io::Read;

use serde::Deserialize;

use super::dtw::{dtw_align, DtwConfig, FeatureSeq, FrameDistance};
use crate::{Error, Result};

/// Uniformity tolerance for CSV frame times, in seconds.
pub const TIME_TOLERANCE_S: f64 = 1e-6;

/// Framewise f0 in Hz with voicing flags.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchContour {
    pub f0: Vec<f64>,
    pub voiced: Vec<bool>,
    pub frame_period_s: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct PitchRow {
    time_s: f64,
    f0_hz: Option<f64>,
}

impl PitchContour {
    pub fn new(f0: Vec<f64>, voiced: Vec<bool>) -> Result<Self> {
        if f0.len() != voiced.len() {
            return Err(Error::InvalidPitch(format!(
                "{} f0 values but {} voicing flags",
                f0.len(),
                voiced.len()
            )));
        }
        if let Some(i) = (0..f0.len()).find(|&i| voiced[i] && !(f0[i] > 0.0 && f0[i].is_finite())) {
            return Err(Error::InvalidPitch(format!("voiced frame {i} has f0 {}", f0[i])));
        }
        Ok(Self {
            f0,
            voiced,
            frame_period_s: None,
        })
    }

    /// Treats non-positive and non-finite values as unvoiced.
    pub fn from_hz(values: &[f64]) -> Self {
        let voiced: Vec<bool> = values.iter().map(|&v| v > 0.0 && v.is_finite()).collect();
        let f0 = values
            .iter()
            .zip(&voiced)
            .map(|(&v, &on)| if on { v } else { 0.0 })
            .collect();
        Self {
            f0,
            voiced,
            frame_period_s: None,
        }
    }

    /// Parses a `time_s,f0_hz` CSV. Empty or non-positive f0 means unvoiced.
    ///
    /// Frame times must lie within [`TIME_TOLERANCE_S`] of a uniform grid
    /// with step `frame_period_s` (or, when `None`, the least-squares step).
    pub fn read_csv<R: Read>(input: R, frame_period_s: Option<f64>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["time_s", "f0_hz"] {
            return Err(Error::InvalidPitch(format!(
                "expected header time_s,f0_hz, found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let rows: Vec<PitchRow> = reader.deserialize().collect::<std::result::Result<_, _>>()?;
        if rows.is_empty() {
            return Err(Error::EmptyInput("pitch contour"));
        }
        let n = rows.len() as f64;
        let mean_k = (n - 1.0) / 2.0;
        let mean_t = rows.iter().map(|r| r.time_s).sum::<f64>() / n;
        let period = match frame_period_s {
            Some(p) => Some(p),
            // least-squares slope, robust to times printed with few decimals
            None if rows.len() > 1 => {
                let (mut sxy, mut sxx) = (0.0, 0.0);
                for (k, r) in rows.iter().enumerate() {
                    let dk = k as f64 - mean_k;
                    sxy += dk * (r.time_s - mean_t);
                    sxx += dk * dk;
                }
                Some(sxy / sxx)
            }
            None => None,
        };
        if let Some(period) = period {
            if !(period > 0.0) {
                return Err(Error::InvalidPitch(format!("non-positive frame period {period}")));
            }
            // times must sit on a uniform grid; its offset is the mean residual
            let offset = mean_t - mean_k * period;
            for (k, r) in rows.iter().enumerate() {
                let off_grid = r.time_s - (offset + k as f64 * period);
                if off_grid.abs() > TIME_TOLERANCE_S {
                    return Err(Error::InvalidPitch(format!(
                        "row {}: time {} s is {off_grid:.3e} s off the {period} s frame grid",
                        k + 2,
                        r.time_s
                    )));
                }
            }
        }
        let values: Vec<f64> = rows.iter().map(|r| r.f0_hz.unwrap_or(0.0)).collect();
        let mut contour = Self::from_hz(&values);
        contour.frame_period_s = period;
        Ok(contour)
    }

    pub fn len(&self) -> usize {
        self.f0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f0.is_empty()
    }

    pub fn voiced_f0(&self) -> impl Iterator<Item = f64> + '_ {
        self.f0.iter().zip(&self.voiced).filter(|(_, &v)| v).map(|(&f, _)| f)
    }

    /// Mean and population standard deviation of voiced frames.
    pub fn voiced_stats(&self) -> Option<(f64, f64)> {
        let values: Vec<f64> = self.voiced_f0().collect();
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some((mean, var.sqrt()))
    }

    /// f0 with unvoiced frames set to zero, as used for alignment.
    fn alignment_track(&self) -> Vec<f64> {
        self.f0
            .iter()
            .zip(&self.voiced)
            .map(|(&f, &v)| if v { f } else { 0.0 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchMetrics {
    /// RMSE in Hz over pairs voiced on both sides; `None` if there are none.
    pub f0_rmse: Option<f64>,
    /// Pearson r over pairs voiced on both sides; `None` for fewer than two
    /// pairs or zero variance.
    pub pearson_r: Option<f64>,
    /// Share of aligned pairs whose voicing flags disagree.
    pub vuv_error: f64,
    pub voiced_pairs: usize,
    pub aligned_pairs: usize,
}

pub fn pitch_metrics(reference: &PitchContour, synthesis: &PitchContour, cfg: &DtwConfig) -> Result<PitchMetrics> {
    if reference.is_empty() || synthesis.is_empty() {
        return Err(Error::EmptyInput("pitch contour"));
    }
    let (ra, sa) = (reference.alignment_track(), synthesis.alignment_track());
    let alignment = dtw_align(
        FeatureSeq::new(&ra, 1)?,
        FeatureSeq::new(&sa, 1)?,
        FrameDistance::L2,
        cfg,
    )?;
    let pairs = alignment.path.pairs();
    let mismatched = pairs
        .iter()
        .filter(|&&(i, j)| reference.voiced[i] != synthesis.voiced[j])
        .count();
    let both: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|&&(i, j)| reference.voiced[i] && synthesis.voiced[j])
        .map(|&(i, j)| (reference.f0[i], synthesis.f0[j]))
        .collect();
    let f0_rmse =
        (!both.is_empty()).then(|| (both.iter().map(|(a, b)| (a - b).powi(2)).sum::<f64>() / both.len() as f64).sqrt());
    Ok(PitchMetrics {
        f0_rmse,
        pearson_r: pearson(&both),
        vuv_error: mismatched as f64 / pairs.len() as f64,
        voiced_pairs: both.len(),
        aligned_pairs: pairs.len(),
    })
}

fn pearson(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    let den = (sxx * syy).sqrt();
    (den > 0.0).then(|| (sxy / den).clamp(-1.0, 1.0))
}
