//! STFT and Slaney-mel log-amplitude spectrogram extraction.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::audio::Waveform;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StftConfig {
    pub n_fft: usize,
    pub win_length: usize,
    pub hop: usize,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self {
            n_fft: 1024,
            win_length: 1024,
            hop: 256,
        }
    }
}

impl StftConfig {
    /// Reflection padding applied at each end of the signal.
    pub fn padding(&self) -> usize {
        (self.n_fft - self.hop) / 2
    }

    pub fn n_bins(&self) -> usize {
        self.n_fft / 2 + 1
    }

    /// Number of frames produced for a signal of `len` samples.
    pub fn frame_count(&self, len: usize) -> usize {
        (len + 2 * self.padding() - self.n_fft) / self.hop + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_fft < 2 || self.win_length == 0 || self.hop == 0 {
            return Err(Error::InvalidConfig("STFT sizes must be positive".into()));
        }
        if self.win_length > self.n_fft {
            return Err(Error::InvalidConfig("win_length exceeds n_fft".into()));
        }
        if self.hop > self.win_length || self.hop > self.n_fft {
            return Err(Error::InvalidConfig("hop exceeds window length".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MelConfig {
    pub n_mels: usize,
    pub f_min: f64,
    pub f_max: f64,
    pub clamp_floor: f64,
}

impl Default for MelConfig {
    fn default() -> Self {
        Self {
            n_mels: 80,
            f_min: 0.0,
            f_max: 8000.0,
            clamp_floor: 1e-5,
        }
    }
}

/// Complex STFT, stored frame-major: `data[m * n_bins + k]`.
#[derive(Debug, Clone)]
pub struct Spectrogram {
    pub n_bins: usize,
    pub n_frames: usize,
    pub data: Vec<Complex64>,
}

impl Spectrogram {
    pub fn get(&self, k: usize, m: usize) -> Complex64 {
        self.data[m * self.n_bins + k]
    }

    pub fn frame(&self, m: usize) -> &[Complex64] {
        &self.data[m * self.n_bins..(m + 1) * self.n_bins]
    }
}

/// Hop and sample rate of a frame sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameTiming {
    pub hop: usize,
    pub sample_rate: u32,
}

impl FrameTiming {
    pub fn frame_period_s(&self) -> f64 {
        self.hop as f64 / f64::from(self.sample_rate)
    }
}

/// Natural-log mel amplitudes, stored frame-major: `values[m * n_mels + b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogMelSpectrogram {
    pub n_mels: usize,
    pub n_frames: usize,
    pub values: Vec<f64>,
    pub timing: Option<FrameTiming>,
}

impl LogMelSpectrogram {
    pub fn from_frames(frames: &[Vec<f64>], timing: Option<FrameTiming>) -> Result<Self> {
        let n_mels = frames.first().map_or(0, Vec::len);
        if let Some(bad) = frames.iter().find(|f| f.len() != n_mels) {
            return Err(Error::DimensionMismatch {
                left: n_mels,
                right: bad.len(),
            });
        }
        Ok(Self {
            n_mels,
            n_frames: frames.len(),
            values: frames.concat(),
            timing,
        })
    }

    pub fn get(&self, b: usize, m: usize) -> f64 {
        self.values[m * self.n_mels + b]
    }

    pub fn frame(&self, m: usize) -> &[f64] {
        &self.values[m * self.n_mels..(m + 1) * self.n_mels]
    }

    pub fn frames(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_mels.max(1))
    }

    /// Duration covered by the frames, when timing is known.
    pub fn duration_s(&self) -> Option<f64> {
        self.timing.map(|t| self.n_frames as f64 * t.frame_period_s())
    }
}

// ---------------------------------------------------------------------------
// STFT
// ---------------------------------------------------------------------------

/// Periodic Hann window of length `n`.
pub fn hann_periodic(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// Index into a signal of length `n` under repeated reflection without
/// duplicating the edge sample.
fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let r = i.rem_euclid(period);
    if r < n as isize {
        r as usize
    } else {
        (period - r) as usize
    }
}

/// Reusable STFT plan.
pub struct StftPlan {
    cfg: StftConfig,
    window: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for StftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StftPlan").field("cfg", &self.cfg).finish()
    }
}

impl StftPlan {
    pub fn new(cfg: &StftConfig) -> Result<Self> {
        cfg.validate()?;
        // window of win_length centred inside n_fft
        let mut window = vec![0.0; cfg.n_fft];
        let offset = (cfg.n_fft - cfg.win_length) / 2;
        window[offset..offset + cfg.win_length].copy_from_slice(&hann_periodic(cfg.win_length));
        let fft = FftPlanner::new().plan_fft_forward(cfg.n_fft);
        Ok(Self {
            cfg: cfg.clone(),
            window,
            fft,
        })
    }

    pub fn config(&self) -> &StftConfig {
        &self.cfg
    }

    /// Calls `f(m, spectrum)` for every frame; `spectrum` holds `n_bins` values.
    fn for_each_frame(&self, samples: &[f64], mut f: impl FnMut(usize, &[Complex64])) -> Result<usize> {
        let cfg = &self.cfg;
        let n = samples.len();
        if n < cfg.hop || n == 0 {
            return Err(Error::SignalTooShort { len: n, hop: cfg.hop });
        }
        let pad = cfg.padding() as isize;
        let n_frames = cfg.frame_count(n);
        let n_bins = cfg.n_bins();
        let mut buf = vec![Complex64::default(); cfg.n_fft];
        let mut scratch = vec![Complex64::default(); self.fft.get_inplace_scratch_len()];
        for m in 0..n_frames {
            let start = (m * cfg.hop) as isize - pad;
            for (i, slot) in buf.iter_mut().enumerate() {
                let idx = start + i as isize;
                let v = if idx >= 0 && (idx as usize) < n {
                    samples[idx as usize]
                } else {
                    samples[reflect_index(idx, n)]
                };
                *slot = Complex64::new(v * self.window[i], 0.0);
            }
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            f(m, &buf[..n_bins]);
        }
        Ok(n_frames)
    }

    pub fn stft(&self, samples: &[f64]) -> Result<Spectrogram> {
        let n_bins = self.cfg.n_bins();
        let mut data = Vec::new();
        let n_frames = self.for_each_frame(samples, |_, spec| data.extend_from_slice(spec))?;
        Ok(Spectrogram { n_bins, n_frames, data })
    }
}

/// Short-time Fourier transform with reflection padding and no centering.
pub fn stft(w: &Waveform, cfg: &StftConfig) -> Result<Spectrogram> {
    StftPlan::new(cfg)?.stft(&w.samples)
}

// ---------------------------------------------------------------------------
// Mel filterbank
// ---------------------------------------------------------------------------

const SLANEY_F_SP: f64 = 200.0 / 3.0;
const SLANEY_MIN_LOG_HZ: f64 = 1000.0;
const SLANEY_MIN_LOG_MEL: f64 = SLANEY_MIN_LOG_HZ / SLANEY_F_SP;

fn slaney_logstep() -> f64 {
    6.4f64.ln() / 27.0
}

/// Slaney mel scale: linear below 1 kHz, logarithmic above.
pub fn hz_to_mel(f: f64) -> f64 {
    if f < SLANEY_MIN_LOG_HZ {
        f / SLANEY_F_SP
    } else {
        SLANEY_MIN_LOG_MEL + (f / SLANEY_MIN_LOG_HZ).ln() / slaney_logstep()
    }
}

pub fn mel_to_hz(mel: f64) -> f64 {
    if mel < SLANEY_MIN_LOG_MEL {
        mel * SLANEY_F_SP
    } else {
        SLANEY_MIN_LOG_HZ * (slaney_logstep() * (mel - SLANEY_MIN_LOG_MEL)).exp()
    }
}

/// Area-normalized triangular filters, `weights[b * n_bins + k]`.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    pub n_mels: usize,
    pub n_bins: usize,
    pub weights: Vec<f64>,
    /// Centre frequency of every filter in Hz.
    pub centers_hz: Vec<f64>,
    /// Non-zero bin range `[lo, hi)` of each filter.
    support: Vec<(usize, usize)>,
}

impl MelFilterbank {
    pub fn row(&self, b: usize) -> &[f64] {
        &self.weights[b * self.n_bins..(b + 1) * self.n_bins]
    }

    /// Projects an `n_bins` magnitude spectrum onto the mel bands.
    pub fn apply(&self, magnitude: &[f64], out: &mut [f64]) {
        for (b, o) in out.iter_mut().enumerate() {
            let (lo, hi) = self.support[b];
            let row = &self.row(b)[lo..hi];
            *o = row.iter().zip(&magnitude[lo..hi]).map(|(w, m)| w * m).sum();
        }
    }

    /// Index of the filter whose centre is closest to `hz`.
    pub fn nearest_band(&self, hz: f64) -> usize {
        self.centers_hz
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - hz).abs().total_cmp(&(b.1 - hz).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

pub fn mel_filterbank(cfg: &MelConfig, sample_rate: u32, n_fft: usize) -> Result<MelFilterbank> {
    let nyquist = f64::from(sample_rate) / 2.0;
    if cfg.n_mels < 2 {
        return Err(Error::InvalidConfig("n_mels must be at least 2".into()));
    }
    if !(cfg.f_min >= 0.0 && cfg.f_min < cfg.f_max) {
        return Err(Error::InvalidConfig("f_min must be below f_max".into()));
    }
    if cfg.f_max > nyquist {
        return Err(Error::InvalidConfig(format!(
            "f_max {} exceeds Nyquist {nyquist}",
            cfg.f_max
        )));
    }
    if !(cfg.clamp_floor > 0.0) {
        return Err(Error::InvalidConfig("clamp_floor must be positive".into()));
    }
    let n_bins = n_fft / 2 + 1;
    let fft_hz: Vec<f64> = (0..n_bins)
        .map(|k| k as f64 * f64::from(sample_rate) / n_fft as f64)
        .collect();
    let (mel_lo, mel_hi) = (hz_to_mel(cfg.f_min), hz_to_mel(cfg.f_max));
    let edges: Vec<f64> = (0..cfg.n_mels + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (cfg.n_mels + 1) as f64))
        .collect();

    let mut weights = vec![0.0; cfg.n_mels * n_bins];
    let mut support = Vec::with_capacity(cfg.n_mels);
    for b in 0..cfg.n_mels {
        let (left, centre, right) = (edges[b], edges[b + 1], edges[b + 2]);
        let norm = 2.0 / (right - left);
        let row = &mut weights[b * n_bins..(b + 1) * n_bins];
        for (k, &f) in fft_hz.iter().enumerate() {
            let rising = (f - left) / (centre - left);
            let falling = (right - f) / (right - centre);
            row[k] = norm * rising.min(falling).max(0.0);
        }
        let lo = row.iter().position(|&w| w > 0.0);
        let hi = row.iter().rposition(|&w| w > 0.0);
        match (lo, hi) {
            (Some(lo), Some(hi)) => support.push((lo, hi + 1)),
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "mel band {b} ({left:.1}-{right:.1} Hz) covers no FFT bin"
                )))
            }
        }
    }
    Ok(MelFilterbank {
        n_mels: cfg.n_mels,
        n_bins,
        weights,
        centers_hz: edges[1..=cfg.n_mels].to_vec(),
        support,
    })
}

// ---------------------------------------------------------------------------
// Log-mel extraction
// ---------------------------------------------------------------------------

/// STFT plan plus filterbank; build once and share across utterances.
#[derive(Debug)]
pub struct MelExtractor {
    plan: StftPlan,
    filterbank: MelFilterbank,
    mel: MelConfig,
    sample_rate: u32,
}

impl MelExtractor {
    pub fn new(stft: &StftConfig, mel: &MelConfig, sample_rate: u32) -> Result<Self> {
        let plan = StftPlan::new(stft)?;
        let filterbank = mel_filterbank(mel, sample_rate, stft.n_fft)?;
        Ok(Self {
            plan,
            filterbank,
            mel: mel.clone(),
            sample_rate,
        })
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.filterbank
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn extract(&self, w: &Waveform) -> Result<LogMelSpectrogram> {
        if w.sample_rate != self.sample_rate {
            return Err(Error::InvalidConfig(format!(
                "waveform at {} Hz, extractor expects {} Hz",
                w.sample_rate, self.sample_rate
            )));
        }
        let n_mels = self.mel.n_mels;
        let floor = self.mel.clamp_floor;
        let mut values = Vec::new();
        let mut magnitude = vec![0.0; self.plan.cfg.n_bins()];
        let mut bands = vec![0.0; n_mels];
        let n_frames = self.plan.for_each_frame(&w.samples, |_, spec| {
            for (m, c) in magnitude.iter_mut().zip(spec) {
                *m = c.norm();
            }
            self.filterbank.apply(&magnitude, &mut bands);
            values.extend(bands.iter().map(|&v| v.max(floor).ln()));
        })?;
        Ok(LogMelSpectrogram {
            n_mels,
            n_frames,
            values,
            timing: Some(FrameTiming {
                hop: self.plan.cfg.hop,
                sample_rate: self.sample_rate,
            }),
        })
    }
}

/// `ln(max(Mel · |X|, floor))` for a waveform.
pub fn log_mel(w: &Waveform, stft_cfg: &StftConfig, mel_cfg: &MelConfig) -> Result<LogMelSpectrogram> {
    MelExtractor::new(stft_cfg, mel_cfg, w.sample_rate)?.extract(w)
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

pub const BLOB_MAGIC: [u8; 4] = *b"LMEL";

/// Writes a little-endian float32 blob: 16-byte header (magic, B, M,
/// reserved) followed by the B×M matrix in band-major order.
pub fn write_blob<W: Write>(s: &LogMelSpectrogram, mut out: W) -> std::io::Result<()> {
    let mut buf = Vec::with_capacity(16 + 4 * s.values.len());
    buf.extend_from_slice(&BLOB_MAGIC);
    buf.extend_from_slice(&(s.n_mels as u32).to_le_bytes());
    buf.extend_from_slice(&(s.n_frames as u32).to_le_bytes());
    buf.extend_from_slice(&0u32.to_le_bytes());
    for b in 0..s.n_mels {
        for m in 0..s.n_frames {
            buf.extend_from_slice(&(s.get(b, m) as f32).to_le_bytes());
        }
    }
    out.write_all(&buf)
}

pub fn read_blob<R: Read>(mut input: R) -> Result<LogMelSpectrogram> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| Error::InvalidBlob(e.to_string()))?;
    if bytes.len() < 16 || bytes[..4] != BLOB_MAGIC {
        return Err(Error::InvalidBlob("missing LMEL header".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes")) as usize;
    let (n_mels, n_frames) = (word(4), word(8));
    let expected = 16 + 4 * n_mels * n_frames;
    if bytes.len() != expected {
        return Err(Error::InvalidBlob(format!(
            "expected {expected} bytes for {n_mels}x{n_frames}, found {}",
            bytes.len()
        )));
    }
    let mut values = vec![0.0; n_mels * n_frames];
    for (i, chunk) in bytes[16..].chunks_exact(4).enumerate() {
        let (b, m) = (i / n_frames, i % n_frames);
        values[m * n_mels + b] = f64::from(f32::from_le_bytes(chunk.try_into().expect("4 bytes")));
    }
    Ok(LogMelSpectrogram {
        n_mels,
        n_frames,
        values,
        timing: None,
    })
}

/// One row per frame: `frame,mel_0,...,mel_{B-1}`.
pub fn write_csv<W: Write>(s: &LogMelSpectrogram, mut out: W) -> std::io::Result<()> {
    write!(out, "frame")?;
    for b in 0..s.n_mels {
        write!(out, ",mel_{b}")?;
    }
    writeln!(out)?;
    for (m, frame) in s.frames().enumerate() {
        write!(out, "{m}")?;
        for v in frame {
            write!(out, ",{}", crate::fmt::sig6(*v))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn naive_dft(x: &[f64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n / 2 + 1)
            .map(|k| {
                x.iter().enumerate().fold(Complex64::default(), |acc, (i, &v)| {
                    let ang = -2.0 * PI * (k * i) as f64 / n as f64;
                    acc + Complex64::new(v * ang.cos(), v * ang.sin())
                })
            })
            .collect()
    }

    #[test]
    fn one_second_gives_86_frames() {
        let cfg = StftConfig::default();
        assert_eq!(cfg.padding(), 384);
        assert_eq!(cfg.frame_count(22050), 86);
        let s = stft(&Waveform::new(vec![0.0; 22050], 22050), &cfg).unwrap();
        assert_eq!(s.n_frames, 86);
        assert_eq!(s.n_bins, 513);
        assert!(s.data.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn stft_rejects_short_signal() {
        let w = Waveform::new(vec![0.1; 255], 22050);
        assert!(matches!(
            stft(&w, &StftConfig::default()),
            Err(Error::SignalTooShort { len: 255, hop: 256 })
        ));
    }

    #[test]
    fn stft_matches_naive_dft() {
        // a frame fully inside the signal: frame m starts at m*256 - 384
        let k0 = 37;
        let x: Vec<f64> = (0..4096)
            .map(|n| (2.0 * PI * k0 as f64 * n as f64 / 1024.0).cos() + 0.3 * ((n * 7919) % 13) as f64 / 13.0)
            .collect();
        let s = stft(&Waveform::new(x.clone(), 22050), &StftConfig::default()).unwrap();
        let m = 4;
        let start = m * 256 - 384;
        let win = hann_periodic(1024);
        let frame: Vec<f64> = (0..1024).map(|i| x[start + i] * win[i]).collect();
        let reference = naive_dft(&frame);
        let err = reference
            .iter()
            .enumerate()
            .map(|(k, r)| (s.get(k, m) - r).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "max abs error {err}");
        let peak = (0..513)
            .max_by(|&a, &b| s.get(a, m).norm().total_cmp(&s.get(b, m).norm()))
            .unwrap();
        assert_eq!(peak, k0);
    }

    #[test]
    fn reflect_padding_mirrors_without_edge() {
        assert_eq!(reflect_index(-1, 5), 1);
        assert_eq!(reflect_index(-4, 5), 4);
        assert_eq!(reflect_index(-5, 5), 3);
        assert_eq!(reflect_index(5, 5), 3);
        assert_eq!(reflect_index(8, 5), 0);
        assert_eq!(reflect_index(9, 5), 1);
    }

    #[test]
    fn slaney_scale_closed_form() {
        assert!((hz_to_mel(600.0) - 9.0).abs() < 1e-12);
        assert!((hz_to_mel(1000.0) - 15.0).abs() < 1e-12);
        assert!((hz_to_mel(6400.0) - 42.0).abs() < 1e-12);
        for f in [0.0, 60.0, 440.0, 999.0, 1000.0, 4000.0, 8000.0] {
            assert!((mel_to_hz(hz_to_mel(f)) - f).abs() < 1e-9);
        }
    }

    #[test]
    fn filterbank_shape() {
        let fb = mel_filterbank(&MelConfig::default(), 22050, 1024).unwrap();
        assert_eq!((fb.n_mels, fb.n_bins), (80, 513));
        for b in 0..80 {
            assert!(fb.row(b).iter().all(|&w| w >= 0.0));
            assert!(fb.row(b).iter().sum::<f64>() > 0.0);
        }
        assert!(fb.centers_hz.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn filterbank_errors() {
        let cfg = MelConfig {
            f_max: 12000.0,
            ..MelConfig::default()
        };
        assert!(mel_filterbank(&cfg, 22050, 1024).is_err());
        // far too many bands for the FFT resolution leaves empty rows
        let cfg = MelConfig {
            n_mels: 400,
            ..MelConfig::default()
        };
        assert!(mel_filterbank(&cfg, 22050, 1024).is_err());
        let cfg = MelConfig {
            n_mels: 1,
            ..MelConfig::default()
        };
        assert!(mel_filterbank(&cfg, 22050, 1024).is_err());
    }

    #[test]
    fn silence_hits_clamp_floor() {
        let w = Waveform::new(vec![0.0; 22050], 22050);
        let s = log_mel(&w, &StftConfig::default(), &MelConfig::default()).unwrap();
        let floor = 1e-5f64.ln();
        assert!((floor + 11.512925).abs() < 1e-6);
        assert!(s.values.iter().all(|&v| v == floor));
    }

    #[test]
    fn doubling_amplitude_adds_ln2() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..8000).map(|_| rng.random_range(-0.1..0.1)).collect();
        let a = log_mel(
            &Waveform::new(x.clone(), 22050),
            &StftConfig::default(),
            &MelConfig::default(),
        )
        .unwrap();
        let b = log_mel(
            &Waveform::new(x.iter().map(|v| 2.0 * v).collect(), 22050),
            &StftConfig::default(),
            &MelConfig::default(),
        )
        .unwrap();
        let floor = 1e-5f64.ln();
        let mut checked = 0;
        for (va, vb) in a.values.iter().zip(&b.values) {
            if *va > floor + 1.0 {
                assert!((vb - va - 2f64.ln()).abs() < 1e-9);
                checked += 1;
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn blob_roundtrip_is_bit_exact() {
        let frames: Vec<Vec<f64>> = (0..7)
            .map(|m| (0..5).map(|b| (m * 5 + b) as f64 * -0.37 + 0.1).collect())
            .collect();
        let s = LogMelSpectrogram::from_frames(&frames, None).unwrap();
        let mut bytes = Vec::new();
        write_blob(&s, &mut bytes).unwrap();
        assert_eq!(&bytes[..4], b"LMEL");
        assert_eq!(bytes.len(), 16 + 4 * 35);
        let back = read_blob(bytes.as_slice()).unwrap();
        assert_eq!((back.n_mels, back.n_frames), (5, 7));
        let mut again = Vec::new();
        write_blob(&back, &mut again).unwrap();
        assert_eq!(bytes, again);
        for (a, b) in s.values.iter().zip(&back.values) {
            assert_eq!(*a as f32, *b as f32);
        }
        assert!(read_blob(&bytes[..20]).is_err());
        assert!(read_blob(&b"XXXX0000000000000000"[..]).is_err());
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let s = LogMelSpectrogram::from_frames(&[vec![0.5, -1.0], vec![2.0, 3.25]], None).unwrap();
        let mut out = Vec::new();
        write_csv(&s, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "frame,mel_0,mel_1\n0,0.5,-1\n1,2,3.25\n"
        );
    }
}
