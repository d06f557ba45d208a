//! The mel-cepstrogram: a real-input FFT taken across the mel bands of each
//! log-mel frame after removing the frame mean and applying a Hann window.
//!
//! Low quefrency indices describe the broad spectral envelope, high indices
//! the fine detail between neighbouring mel channels. [`QuefrencyPower`]
//! keeps the squared magnitude and drops the phase.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::spectral::LogMelSpectrogram;
use crate::{Error, Result};

/// Frames whose windowed, mean-free energy falls below this are degenerate.
pub const DEGENERATE_ENERGY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MelWindow {
    /// Length-B Hann with zero endpoints.
    #[default]
    Symmetric,
    Periodic,
}

impl MelWindow {
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        let denom = match self {
            MelWindow::Symmetric => (n.max(2) - 1) as f64,
            MelWindow::Periodic => n as f64,
        };
        (0..n)
            .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / denom).cos())
            .collect()
    }
}

/// Complex Q×M coefficients, frame-major: `coeffs[m * n_quefrency + q]`.
#[derive(Debug, Clone)]
pub struct MelCepstrogram {
    pub n_quefrency: usize,
    pub n_frames: usize,
    pub coeffs: Vec<Complex64>,
    /// Frames with (near) zero energy after mean removal and windowing.
    pub degenerate: Vec<bool>,
}

impl MelCepstrogram {
    pub fn frame(&self, m: usize) -> &[Complex64] {
        &self.coeffs[m * self.n_quefrency..(m + 1) * self.n_quefrency]
    }
}

/// `P(q, m) = |C(q, m)|²`, frame-major like [`MelCepstrogram`].
#[derive(Debug, Clone)]
pub struct QuefrencyPower {
    pub n_quefrency: usize,
    pub n_frames: usize,
    pub power: Vec<f64>,
    pub degenerate: Vec<bool>,
}

impl QuefrencyPower {
    pub fn column(&self, m: usize) -> &[f64] {
        &self.power[m * self.n_quefrency..(m + 1) * self.n_quefrency]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.power.chunks_exact(self.n_quefrency)
    }
}

/// Reusable transform for frames of a fixed band count.
pub struct CepstrumPlan {
    n_bands: usize,
    window: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CepstrumPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CepstrumPlan").field("n_bands", &self.n_bands).finish()
    }
}

impl CepstrumPlan {
    pub fn new(n_bands: usize, window: MelWindow) -> Result<Self> {
        if n_bands < 2 {
            return Err(Error::InvalidConfig(format!(
                "mel-cepstrogram needs at least 2 bands, got {n_bands}"
            )));
        }
        Ok(Self {
            n_bands,
            window: window.coefficients(n_bands),
            fft: FftPlanner::new().plan_fft_forward(n_bands),
        })
    }

    pub fn n_quefrency(&self) -> usize {
        self.n_bands / 2 + 1
    }

    /// Mean-free, windowed copy of one log-mel frame.
    pub fn prepare(&self, frame: &[f64]) -> Vec<f64> {
        let mean = frame.iter().sum::<f64>() / frame.len() as f64;
        frame.iter().zip(&self.window).map(|(v, w)| (v - mean) * w).collect()
    }

    /// Transforms one frame into `out` (length Q); returns whether the frame
    /// is degenerate.
    pub fn transform(&self, frame: &[f64], out: &mut [Complex64]) -> bool {
        debug_assert_eq!(frame.len(), self.n_bands);
        let prepared = self.prepare(frame);
        let energy: f64 = prepared.iter().map(|v| v * v).sum();
        let mut buf: Vec<Complex64> = prepared.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.process(&mut buf);
        out.copy_from_slice(&buf[..self.n_quefrency()]);
        // the DC coefficient of a real sequence is real
        out[0].im = 0.0;
        energy < DEGENERATE_ENERGY
    }

    pub fn cepstrogram(&self, s: &LogMelSpectrogram) -> Result<MelCepstrogram> {
        if s.n_mels != self.n_bands {
            return Err(Error::DimensionMismatch {
                left: self.n_bands,
                right: s.n_mels,
            });
        }
        let q = self.n_quefrency();
        let mut coeffs = vec![Complex64::default(); q * s.n_frames];
        let degenerate = coeffs
            .chunks_exact_mut(q)
            .zip(s.frames())
            .map(|(out, frame)| self.transform(frame, out))
            .collect();
        Ok(MelCepstrogram {
            n_quefrency: q,
            n_frames: s.n_frames,
            coeffs,
            degenerate,
        })
    }
}

pub fn mel_cepstrogram(s: &LogMelSpectrogram) -> Result<MelCepstrogram> {
    mel_cepstrogram_with(s, MelWindow::Symmetric)
}

pub fn mel_cepstrogram_with(s: &LogMelSpectrogram, window: MelWindow) -> Result<MelCepstrogram> {
    CepstrumPlan::new(s.n_mels, window)?.cepstrogram(s)
}

pub fn quefrency_power(c: &MelCepstrogram) -> QuefrencyPower {
    QuefrencyPower {
        n_quefrency: c.n_quefrency,
        n_frames: c.n_frames,
        power: c.coeffs.iter().map(|z| z.norm_sqr()).collect(),
        degenerate: c.degenerate.clone(),
    }
}
