//! Cepstral oversmoothing metrics computed on one column of quefrency power.
//!
//! Every metric ignores the DC bin (q = 0) and works on q = 1..Q-1:
//!
//! * HQER: share of power at or above the cutoff quefrency.
//! * CSlope: least-squares slope of `10·log10(P + eps)` against q, in dB/bin.
//! * CCentroid: power-weighted mean quefrency.
//! * CRoll95: smallest q whose cumulative power share reaches the rolloff
//!   fraction; [`croll95_soft`] is a differentiable surrogate.
//!
//! Smoother spectra push power towards low quefrencies and lower all four.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cepstral::{mel_cepstrogram_with, quefrency_power, MelWindow, QuefrencyPower};
use crate::spectral::LogMelSpectrogram;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    /// HQER cutoff; `None` means `floor(0.25 * Q)`.
    pub cutoff_q: Option<usize>,
    /// Added inside the CSlope logarithm; totals at or below it are degenerate.
    pub eps: f64,
    pub rolloff_fraction: f64,
    pub soft_tau: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            cutoff_q: None,
            eps: 1e-10,
            rolloff_fraction: 0.95,
            soft_tau: 50.0,
        }
    }
}

impl MetricConfig {
    pub fn cutoff(&self, n_quefrency: usize) -> usize {
        self.cutoff_q.unwrap_or((0.25 * n_quefrency as f64).floor() as usize)
    }

    pub fn validate(&self, n_quefrency: usize) -> Result<()> {
        let qc = self.cutoff(n_quefrency);
        if qc < 1 || qc > n_quefrency {
            return Err(Error::InvalidConfig(format!("cutoff_q {qc} outside 1..={n_quefrency}")));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidConfig("eps must be positive".into()));
        }
        if !(self.rolloff_fraction > 0.0 && self.rolloff_fraction < 1.0) {
            return Err(Error::InvalidConfig("rolloff_fraction must lie in (0, 1)".into()));
        }
        if !(self.soft_tau >= 0.0) {
            return Err(Error::InvalidConfig("soft_tau must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OversmoothingFrame {
    /// Ratio in [0, 1]; multiply by 100 for percent.
    pub hqer: f64,
    pub cslope: f64,
    pub ccentroid: f64,
    pub croll95: usize,
}

/// One value per metric; used for means, deviations, MAEs and deltas.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricValues {
    pub hqer: f64,
    pub cslope: f64,
    pub ccentroid: f64,
    pub croll95: f64,
}

impl MetricValues {
    pub fn as_array(&self) -> [f64; 4] {
        [self.hqer, self.cslope, self.ccentroid, self.croll95]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            hqer: a[0],
            cslope: a[1],
            ccentroid: a[2],
            croll95: a[3],
        }
    }

    pub fn map2(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let (a, b) = (self.as_array(), other.as_array());
        Self::from_array(std::array::from_fn(|i| f(a[i], b[i])))
    }
}

impl From<OversmoothingFrame> for MetricValues {
    fn from(f: OversmoothingFrame) -> Self {
        Self {
            hqer: f.hqer,
            cslope: f.cslope,
            ccentroid: f.ccentroid,
            croll95: f.croll95 as f64,
        }
    }
}

/// Power above DC, or an error if there is none to speak of.
fn ac_total(p: &[f64], cfg: &MetricConfig) -> Result<f64> {
    if p.len() < 2 {
        return Err(Error::InvalidConfig("quefrency column needs Q >= 2".into()));
    }
    let total: f64 = p[1..].iter().sum();
    if total > cfg.eps && total.is_finite() {
        Ok(total)
    } else {
        Err(Error::DegenerateFrame)
    }
}

pub fn hqer(p: &[f64], cfg: &MetricConfig) -> Result<f64> {
    let total = ac_total(p, cfg)?;
    let qc = cfg.cutoff(p.len());
    if qc < 1 || qc > p.len() {
        return Err(Error::InvalidConfig(format!("cutoff_q {qc} outside 1..={}", p.len())));
    }
    Ok(p[qc..].iter().sum::<f64>() / total)
}

pub fn cslope(p: &[f64], cfg: &MetricConfig) -> Result<f64> {
    if p.len() < 3 {
        return Err(Error::InvalidConfig("CSlope needs Q >= 3".into()));
    }
    let n = (p.len() - 1) as f64;
    let x_mean = (1.0 + n) / 2.0;
    let ys: Vec<f64> = p[1..].iter().map(|&v| 10.0 * (v + cfg.eps).log10()).collect();
    let y_mean = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = (i + 1) as f64 - x_mean;
        sxy += dx * (y - y_mean);
        sxx += dx * dx;
    }
    Ok(sxy / sxx)
}

pub fn ccentroid(p: &[f64], cfg: &MetricConfig) -> Result<f64> {
    let total = ac_total(p, cfg)?;
    let weighted: f64 = p.iter().enumerate().skip(1).map(|(q, v)| q as f64 * v).sum();
    Ok(weighted / total)
}

pub fn croll95(p: &[f64], cfg: &MetricConfig) -> Result<usize> {
    let total = ac_total(p, cfg)?;
    let mut cumulative = 0.0;
    for (q, v) in p.iter().enumerate().skip(1) {
        cumulative += v;
        if cumulative / total >= cfg.rolloff_fraction {
            return Ok(q);
        }
    }
    Ok(p.len() - 1)
}

/// Softmax-weighted mean quefrency with weights `exp(-tau·|F(q) - fraction|)`,
/// where `F` is the cumulative power share.
pub fn croll95_soft(p: &[f64], cfg: &MetricConfig) -> Result<f64> {
    let total = ac_total(p, cfg)?;
    let mut cumulative = 0.0;
    let logits: Vec<f64> = p[1..]
        .iter()
        .map(|v| {
            cumulative += v;
            -cfg.soft_tau * (cumulative / total - cfg.rolloff_fraction).abs()
        })
        .collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for (i, z) in logits.iter().enumerate() {
        let w = (z - max).exp();
        num += (i + 1) as f64 * w;
        den += w;
    }
    Ok(num / den)
}

pub fn frame_metrics(p: &[f64], cfg: &MetricConfig) -> Result<OversmoothingFrame> {
    Ok(OversmoothingFrame {
        hqer: hqer(p, cfg)?,
        cslope: cslope(p, cfg)?,
        ccentroid: ccentroid(p, cfg)?,
        croll95: croll95(p, cfg)?,
    })
}

/// Framewise metric curves of the non-degenerate frames of one utterance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub frame_index: Vec<usize>,
    pub hqer: Vec<f64>,
    pub cslope: Vec<f64>,
    pub ccentroid: Vec<f64>,
    pub croll95: Vec<f64>,
}

impl MetricSeries {
    pub fn len(&self) -> usize {
        self.frame_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame_index.is_empty()
    }

    pub fn push(&mut self, index: usize, f: OversmoothingFrame) {
        self.frame_index.push(index);
        self.hqer.push(f.hqer);
        self.cslope.push(f.cslope);
        self.ccentroid.push(f.ccentroid);
        self.croll95.push(f.croll95 as f64);
    }

    pub fn get(&self, i: usize) -> MetricValues {
        MetricValues {
            hqer: self.hqer[i],
            cslope: self.cslope[i],
            ccentroid: self.ccentroid[i],
            croll95: self.croll95[i],
        }
    }

    /// Row-major `len × 4` matrix, the layout DTW alignment consumes.
    pub fn to_matrix(&self) -> Vec<f64> {
        (0..self.len()).flat_map(|i| self.get(i).as_array()).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        use crate::fmt::sig6;
        writeln!(out, "frame_index,hqer,cslope,ccentroid,croll95")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                self.frame_index[i],
                sig6(self.hqer[i]),
                sig6(self.cslope[i]),
                sig6(self.ccentroid[i]),
                sig6(self.croll95[i])
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceMetrics {
    pub series: MetricSeries,
    pub mean: MetricValues,
    /// Population standard deviation (divides by N).
    pub std: MetricValues,
    pub total_frames: usize,
}

impl UtteranceMetrics {
    pub fn degenerate_frames(&self) -> usize {
        self.total_frames - self.series.len()
    }
}

pub fn utterance_metrics(p: &QuefrencyPower, cfg: &MetricConfig) -> Result<UtteranceMetrics> {
    cfg.validate(p.n_quefrency)?;
    let mut series = MetricSeries::default();
    for (m, column) in p.columns().enumerate() {
        if p.degenerate[m] {
            continue;
        }
        match frame_metrics(column, cfg) {
            Ok(f) => series.push(m, f),
            Err(Error::DegenerateFrame) => {}
            Err(e) => return Err(e),
        }
    }
    if series.is_empty() {
        return Err(Error::AllFramesDegenerate(p.n_frames));
    }
    let n = series.len() as f64;
    let columns = [&series.hqer, &series.cslope, &series.ccentroid, &series.croll95];
    let mean: [f64; 4] = std::array::from_fn(|i| columns[i].iter().sum::<f64>() / n);
    let std: [f64; 4] =
        std::array::from_fn(|i| (columns[i].iter().map(|v| (v - mean[i]).powi(2)).sum::<f64>() / n).sqrt());
    Ok(UtteranceMetrics {
        series,
        mean: MetricValues::from_array(mean),
        std: MetricValues::from_array(std),
        total_frames: p.n_frames,
    })
}

/// Mel-cepstrogram plus metrics for a log-mel spectrogram.
pub fn analyze(s: &LogMelSpectrogram, cfg: &MetricConfig) -> Result<UtteranceMetrics> {
    let c = mel_cepstrogram_with(s, MelWindow::Symmetric)?;
    utterance_metrics(&quefrency_power(&c), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform() -> Vec<f64> {
        let mut p = vec![1.0; 41];
        p[0] = 123.0; // DC is ignored
        p
    }

    fn point_mass(q: usize) -> Vec<f64> {
        let mut p = vec![0.0; 41];
        p[q] = 2.5;
        p
    }

    #[test]
    fn default_cutoff_is_10_for_q41() {
        assert_eq!(MetricConfig::default().cutoff(41), 10);
    }

    #[test]
    fn uniform_values() {
        let cfg = MetricConfig::default();
        assert_eq!(hqer(&uniform(), &cfg).unwrap(), 0.775);
        assert_eq!(ccentroid(&uniform(), &cfg).unwrap(), 20.5);
        assert_eq!(croll95(&uniform(), &cfg).unwrap(), 38);
        assert!(cslope(&uniform(), &cfg).unwrap().abs() < 1e-12);
    }

    #[test]
    fn point_mass_values() {
        let cfg = MetricConfig::default();
        assert_eq!(hqer(&point_mass(3), &cfg).unwrap(), 0.0);
        assert_eq!(ccentroid(&point_mass(7), &cfg).unwrap(), 7.0);
        assert_eq!(croll95(&point_mass(1), &cfg).unwrap(), 1);
    }

    #[test]
    fn exponential_decay_slope() {
        let p: Vec<f64> = (0..41).map(|q| 10f64.powf(-(q as f64) / 10.0)).collect();
        // eps is negligible against the smallest value (1e-4)
        assert!((cslope(&p, &MetricConfig::default()).unwrap() + 1.0).abs() < 1e-5);
        let cfg = MetricConfig {
            eps: 1e-30,
            ..MetricConfig::default()
        };
        assert!((cslope(&p, &cfg).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cutoff_extremes() {
        let p: Vec<f64> = (0..41).map(|q| 1.0 + (q as f64 * 0.7).sin().abs()).collect();
        let at = |qc| {
            let cfg = MetricConfig {
                cutoff_q: Some(qc),
                ..MetricConfig::default()
            };
            hqer(&p, &cfg).unwrap()
        };
        assert_eq!(at(1), 1.0);
        assert_eq!(at(41), 0.0);
        let bad = MetricConfig {
            cutoff_q: Some(42),
            ..MetricConfig::default()
        };
        assert!(hqer(&p, &bad).is_err());
    }

    #[test]
    fn degenerate_frames_are_flagged() {
        let cfg = MetricConfig::default();
        let mut zero = vec![0.0; 41];
        zero[0] = 5.0;
        assert!(matches!(hqer(&zero, &cfg), Err(Error::DegenerateFrame)));
        assert!(matches!(croll95_soft(&zero, &cfg), Err(Error::DegenerateFrame)));
        assert!(matches!(frame_metrics(&zero, &cfg), Err(Error::DegenerateFrame)));
    }

    #[test]
    fn soft_rolloff_limits() {
        let uni = uniform();
        let sharp = MetricConfig {
            soft_tau: 200.0,
            ..MetricConfig::default()
        };
        assert!((croll95_soft(&uni, &sharp).unwrap() - 38.0).abs() < 0.5);
        let flat = MetricConfig {
            soft_tau: 0.0,
            ..MetricConfig::default()
        };
        assert!((croll95_soft(&uni, &flat).unwrap() - 20.5).abs() < 1e-12);
    }

    #[test]
    fn soft_rolloff_point_mass_spreads_over_tail() {
        // F(q) jumps from 0 to 1 at q = 5, so every q >= 5 sits at the same
        // distance from 0.95 and the surrogate lands on mean(5..=40).
        for tau in [50.0, 200.0] {
            let cfg = MetricConfig {
                soft_tau: tau,
                ..MetricConfig::default()
            };
            let v = croll95_soft(&point_mass(5), &cfg).unwrap();
            assert!((v - 22.5).abs() < 1e-9, "tau {tau}: {v}");
        }
    }

    #[test]
    fn utterance_of_one_frame() {
        let p = QuefrencyPower {
            n_quefrency: 41,
            n_frames: 2,
            power: [uniform(), vec![0.0; 41]].concat(),
            degenerate: vec![false, true],
        };
        let u = utterance_metrics(&p, &MetricConfig::default()).unwrap();
        assert_eq!(u.series.len(), 1);
        assert_eq!(u.degenerate_frames(), 1);
        assert_eq!(u.mean.hqer, 0.775);
        assert_eq!(u.std, MetricValues::default());
    }

    #[test]
    fn duplicated_frame_has_zero_std() {
        let col: Vec<f64> = (0..41).map(|q| 1.0 / (1.0 + q as f64)).collect();
        let p = QuefrencyPower {
            n_quefrency: 41,
            n_frames: 2,
            power: [col.clone(), col].concat(),
            degenerate: vec![false, false],
        };
        let u = utterance_metrics(&p, &MetricConfig::default()).unwrap();
        assert_eq!(u.std, MetricValues::default());
    }

    #[test]
    fn all_degenerate_is_error() {
        let p = QuefrencyPower {
            n_quefrency: 41,
            n_frames: 3,
            power: vec![0.0; 123],
            degenerate: vec![true; 3],
        };
        assert!(matches!(
            utterance_metrics(&p, &MetricConfig::default()),
            Err(Error::AllFramesDegenerate(3))
        ));
    }

    #[test]
    fn series_csv() {
        let mut s = MetricSeries::default();
        s.push(
            3,
            OversmoothingFrame {
                hqer: 0.125,
                cslope: -0.40625,
                ccentroid: 5.09,
                croll95: 24,
            },
        );
        let mut out = Vec::new();
        s.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "frame_index,hqer,cslope,ccentroid,croll95\n3,0.125,-0.40625,5.09,24\n"
        );
    }
}
