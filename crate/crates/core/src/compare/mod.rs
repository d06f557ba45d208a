//! Reference-versus-synthesis scoring: DTW-aligned mel distances, pitch
//! accuracy, metric-curve MAEs and utterance-level deltas.

pub mod dtw;
pub mod pitch;

use serde::{Deserialize, Serialize};

pub use dtw::{dtw_align, Alignment, DtwConfig, DtwPath, FeatureSeq, FrameDistance};
pub use pitch::{pitch_metrics, PitchContour, PitchMetrics};

use crate::osmetrics::{MetricSeries, MetricValues, UtteranceMetrics};
use crate::spectral::LogMelSpectrogram;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct MelDistances {
    /// Mean absolute difference over aligned cells.
    pub l1: f64,
    /// Mean squared difference over aligned cells.
    pub l2: f64,
    /// ‖ref − syn‖_F / ‖ref‖_F over the aligned frame sequence.
    pub sconv: f64,
    pub path: DtwPath,
}

/// Aligns `syn` to `reference` with cosine DTW, then measures L1, L2 and
/// spectral convergence over the aligned frame pairs.
pub fn mel_distances(
    reference: &LogMelSpectrogram,
    synthesis: &LogMelSpectrogram,
    cfg: &DtwConfig,
) -> Result<MelDistances> {
    if reference.n_mels != synthesis.n_mels {
        return Err(Error::DimensionMismatch {
            left: reference.n_mels,
            right: synthesis.n_mels,
        });
    }
    let a = FeatureSeq::new(&reference.values, reference.n_mels)?;
    let b = FeatureSeq::new(&synthesis.values, synthesis.n_mels)?;
    let alignment = dtw_align(a, b, FrameDistance::Cosine, cfg)?;
    let (mut abs, mut sq, mut ref_sq, mut cells) = (0.0, 0.0, 0.0, 0usize);
    for &(i, j) in alignment.path.pairs() {
        for (r, s) in a.frame(i).iter().zip(b.frame(j)) {
            let d = r - s;
            abs += d.abs();
            sq += d * d;
            ref_sq += r * r;
        }
        cells += reference.n_mels;
    }
    if cells == 0 {
        return Err(Error::EmptyInput("alignment"));
    }
    let sconv = if sq == 0.0 {
        0.0
    } else if ref_sq > 0.0 {
        (sq / ref_sq).sqrt()
    } else {
        return Err(Error::InvalidConfig("reference spectrogram has zero norm".into()));
    };
    Ok(MelDistances {
        l1: abs / cells as f64,
        l2: sq / cells as f64,
        sconv,
        path: alignment.path,
    })
}

/// Aligns the four-dimensional metric curves with L2 DTW and returns the
/// per-metric mean absolute error over aligned pairs.
pub fn metric_curve_mae(reference: &MetricSeries, synthesis: &MetricSeries, cfg: &DtwConfig) -> Result<MetricValues> {
    if reference.is_empty() || synthesis.is_empty() {
        return Err(Error::EmptyInput("metric series"));
    }
    let (ra, sa) = (reference.to_matrix(), synthesis.to_matrix());
    let alignment = dtw_align(
        FeatureSeq::new(&ra, 4)?,
        FeatureSeq::new(&sa, 4)?,
        FrameDistance::L2,
        cfg,
    )?;
    let pairs = alignment.path.pairs();
    let mut total = [0.0; 4];
    for &(i, j) in pairs {
        let (r, s) = (reference.get(i).as_array(), synthesis.get(j).as_array());
        for k in 0..4 {
            total[k] += (r[k] - s[k]).abs();
        }
    }
    Ok(MetricValues::from_array(total.map(|t| t / pairs.len() as f64)))
}

/// Utterance-level quantities that enter the syn-minus-ref deltas.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UtteranceBundle {
    pub duration_s: f64,
    pub token_count: Option<u32>,
    pub pitch: Option<PitchContour>,
    /// Utterance means of the oversmoothing metrics.
    pub metrics: Option<MetricValues>,
}

impl UtteranceBundle {
    /// Tokens per second.
    pub fn speaking_rate(&self) -> Option<f64> {
        match self.token_count {
            Some(t) if self.duration_s > 0.0 => Some(f64::from(t) / self.duration_s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UtteranceDeltas {
    pub delta_mu_f0: Option<f64>,
    pub delta_sigma_f0: Option<f64>,
    pub delta_spr: Option<f64>,
    pub delta_u: Option<MetricValues>,
}

/// Synthesis-minus-reference differences; anything missing on either side
/// stays `None` rather than becoming zero.
pub fn utterance_deltas(reference: &UtteranceBundle, synthesis: &UtteranceBundle) -> UtteranceDeltas {
    let ref_f0 = reference.pitch.as_ref().and_then(PitchContour::voiced_stats);
    let syn_f0 = synthesis.pitch.as_ref().and_then(PitchContour::voiced_stats);
    let f0 = ref_f0.zip(syn_f0);
    UtteranceDeltas {
        delta_mu_f0: f0.map(|(r, s)| s.0 - r.0),
        delta_sigma_f0: f0.map(|(r, s)| s.1 - r.1),
        delta_spr: synthesis
            .speaking_rate()
            .zip(reference.speaking_rate())
            .map(|(s, r)| s - r),
        delta_u: synthesis
            .metrics
            .zip(reference.metrics)
            .map(|(s, r)| s.map2(&r, |a, b| a - b)),
    }
}

/// Everything scored for one reference/synthesis pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub utterance_id: String,
    pub l1: f64,
    pub l2: f64,
    pub sconv: f64,
    pub f0_rmse: Option<f64>,
    pub pearson_r: Option<f64>,
    pub vuv_error: Option<f64>,
    pub mae_hqer: Option<f64>,
    pub mae_cslope: Option<f64>,
    pub mae_ccentroid: Option<f64>,
    pub mae_croll95: Option<f64>,
    pub delta_mu_f0: Option<f64>,
    pub delta_sigma_f0: Option<f64>,
    pub delta_spr: Option<f64>,
    pub delta_u_hqer: Option<f64>,
    pub delta_u_cslope: Option<f64>,
    pub delta_u_ccentroid: Option<f64>,
    pub delta_u_croll95: Option<f64>,
}

/// One side of a comparison after feature extraction.
#[derive(Debug, Clone)]
pub struct UtteranceAnalysis {
    pub log_mel: LogMelSpectrogram,
    /// `None` when every frame is degenerate.
    pub metrics: Option<UtteranceMetrics>,
    pub duration_s: f64,
    pub pitch: Option<PitchContour>,
    pub token_count: Option<u32>,
}

impl UtteranceAnalysis {
    pub fn bundle(&self) -> UtteranceBundle {
        UtteranceBundle {
            duration_s: self.duration_s,
            token_count: self.token_count,
            pitch: self.pitch.clone(),
            metrics: self.metrics.as_ref().map(|m| m.mean),
        }
    }
}

pub fn compare_utterances(
    utterance_id: &str,
    reference: &UtteranceAnalysis,
    synthesis: &UtteranceAnalysis,
    cfg: &DtwConfig,
) -> Result<ComparisonReport> {
    let dist = mel_distances(&reference.log_mel, &synthesis.log_mel, cfg)?;
    let pitch = match (&reference.pitch, &synthesis.pitch) {
        (Some(r), Some(s)) => Some(pitch_metrics(r, s, cfg)?),
        _ => None,
    };
    let mae = match (&reference.metrics, &synthesis.metrics) {
        (Some(r), Some(s)) => Some(metric_curve_mae(&r.series, &s.series, cfg)?),
        _ => None,
    };
    let deltas = utterance_deltas(&reference.bundle(), &synthesis.bundle());
    Ok(ComparisonReport {
        utterance_id: utterance_id.to_string(),
        l1: dist.l1,
        l2: dist.l2,
        sconv: dist.sconv,
        f0_rmse: pitch.and_then(|p| p.f0_rmse),
        pearson_r: pitch.and_then(|p| p.pearson_r),
        vuv_error: pitch.map(|p| p.vuv_error),
        mae_hqer: mae.map(|m| m.hqer),
        mae_cslope: mae.map(|m| m.cslope),
        mae_ccentroid: mae.map(|m| m.ccentroid),
        mae_croll95: mae.map(|m| m.croll95),
        delta_mu_f0: deltas.delta_mu_f0,
        delta_sigma_f0: deltas.delta_sigma_f0,
        delta_spr: deltas.delta_spr,
        delta_u_hqer: deltas.delta_u.map(|d| d.hqer),
        delta_u_cslope: deltas.delta_u.map(|d| d.cslope),
        delta_u_ccentroid: deltas.delta_u.map(|d| d.ccentroid),
        delta_u_croll95: deltas.delta_u.map(|d| d.croll95),
    })
}
