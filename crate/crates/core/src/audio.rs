//! Waveform loading and the preprocessing chain applied before feature
//! extraction: resampling, low-frequency removal, silence trimming and level
//! normalization.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Mono audio with samples nominally in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Self {
        Self { samples, sample_rate }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    /// RMS level of the whole signal in dBFS (full-scale sine = -3 dBFS).
    pub fn rms_dbfs(&self) -> f64 {
        amplitude_to_db(rms(&self.samples))
    }
}

/// How silent stretches between speech are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SilenceMode {
    /// Shorten every silence longer than the limit to the limit.
    Cap,
    /// Like `Cap` at the edges, but internal silences over the limit are cut out.
    Remove,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub target_rate: u32,
    pub silence_trim_ms: f64,
    pub silence_threshold_db: f64,
    pub silence_mode: SilenceMode,
    /// Gate analysis frame length.
    pub gate_frame_ms: f64,
    /// Gate analysis hop; trimmed silences are multiples of this.
    pub gate_hop_ms: f64,
    pub highpass_hz: f64,
    /// Butterworth order of the single pass; forward-backward doubles the
    /// attenuation in dB.
    pub highpass_order: usize,
    pub target_level_dbfs: f64,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            target_rate: 22050,
            silence_trim_ms: 200.0,
            silence_threshold_db: -45.0,
            silence_mode: SilenceMode::Cap,
            gate_frame_ms: 20.0,
            gate_hop_ms: 10.0,
            highpass_hz: 60.0,
            highpass_order: 6,
            target_level_dbfs: -22.0,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.target_rate == 0 {
            return Err(Error::InvalidConfig("target_rate must be positive".into()));
        }
        if !(self.highpass_hz >= 0.0 && f64::from(self.target_rate) > 2.0 * self.highpass_hz) {
            return Err(Error::InvalidConfig(format!(
                "target_rate {} must exceed twice highpass_hz {}",
                self.target_rate, self.highpass_hz
            )));
        }
        if !(self.silence_trim_ms > 0.0) {
            return Err(Error::InvalidConfig("silence_trim_ms must be positive".into()));
        }
        if !(self.gate_frame_ms > 0.0 && self.gate_hop_ms > 0.0) {
            return Err(Error::InvalidConfig("gate frame and hop must be positive".into()));
        }
        if self.highpass_order == 0 {
            return Err(Error::InvalidConfig("highpass_order must be at least 1".into()));
        }
        if !self.target_level_dbfs.is_finite() || !self.silence_threshold_db.is_finite() {
            return Err(Error::InvalidConfig("levels must be finite".into()));
        }
        Ok(())
    }
}

/// Reads a RIFF/WAV file (PCM16 or IEEE float32), averaging channels to mono.
pub fn load_wav(path: impl AsRef<Path>) -> Result<Waveform> {
    let path = path.as_ref();
    let reader = hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => Error::Wav {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })?;
    let spec = reader.spec();
    let channels = usize::from(spec.channels.max(1));
    let wav_err = |e: hound::Error| Error::Wav {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| f64::from(v) / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err)?,
        (hound::SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err)?,
        (format, bits) => {
            return Err(Error::UnsupportedEncoding(format!(
                "{format:?} with {bits} bits per sample"
            )))
        }
    };
    if interleaved.len() < channels {
        return Err(Error::EmptyAudio);
    }
    let scale = 1.0 / channels as f64;
    let samples = interleaved
        .chunks_exact(channels)
        .map(|frame| frame.iter().sum::<f64>() * scale)
        .collect();
    Ok(Waveform::new(samples, spec.sample_rate))
}

/// Runs the full chain: resample, high-pass, trim silences, normalize.
pub fn preprocess(w: &Waveform, cfg: &PreprocessConfig) -> Result<Waveform> {
    cfg.validate()?;
    if w.is_empty() {
        return Err(Error::EmptyAudio);
    }
    let resampled = resample(w, cfg.target_rate)?;
    let rate = resampled.sample_rate;
    let filtered = highpass(&resampled.samples, rate, cfg.highpass_hz, cfg.highpass_order);
    let gate = SilenceGate::new(rate, cfg);
    let trimmed = gate.trim(&filtered, cfg.silence_trim_ms, cfg.silence_mode)?;
    let normalized = gate.normalize(&trimmed, cfg.target_level_dbfs)?;
    Ok(Waveform::new(normalized, rate))
}

// ---------------------------------------------------------------------------
// Resampling
// ---------------------------------------------------------------------------

const RESAMPLE_ZERO_CROSSINGS: usize = 16;
const RESAMPLE_ROLLOFF: f64 = 0.95;
const KAISER_BETA: f64 = 8.6;

/// Polyphase windowed-sinc (Kaiser) sample-rate conversion.
pub fn resample(w: &Waveform, target_rate: u32) -> Result<Waveform> {
    if w.sample_rate == 0 || target_rate == 0 {
        return Err(Error::InvalidConfig("sample rates must be positive".into()));
    }
    if w.sample_rate == target_rate {
        return Ok(w.clone());
    }
    let g = gcd(w.sample_rate as u64, target_rate as u64);
    let up = target_rate as u64 / g;
    let down = w.sample_rate as u64 / g;

    // Cutoff relative to the input Nyquist.
    let cutoff = RESAMPLE_ROLLOFF * (up as f64 / down as f64).min(1.0);
    let half_width = (RESAMPLE_ZERO_CROSSINGS as f64 / cutoff).ceil() as i64;
    let taps_per_phase = (2 * half_width + 1) as usize;

    // phase p corresponds to a fractional input offset p / up
    let phases: Vec<Vec<f64>> = (0..up)
        .map(|p| {
            let frac = p as f64 / up as f64;
            let mut taps: Vec<f64> = (-half_width..=half_width)
                .map(|k| {
                    let t = k as f64 - frac;
                    let x = t / (half_width as f64 + 1.0);
                    cutoff * sinc(cutoff * t) * kaiser(x, KAISER_BETA)
                })
                .collect();
            let sum: f64 = taps.iter().sum();
            taps.iter_mut().for_each(|v| *v /= sum);
            taps
        })
        .collect();

    let n_in = w.samples.len() as u64;
    let n_out = (n_in * up).div_ceil(down) as usize;
    let mut out = Vec::with_capacity(n_out);
    for n in 0..n_out as u64 {
        let pos = n * down;
        let base = (pos / up) as i64;
        let taps = &phases[(pos % up) as usize];
        let mut acc = 0.0;
        for (i, &h) in taps.iter().enumerate() {
            let idx = base + i as i64 - half_width;
            if idx >= 0 && (idx as u64) < n_in {
                acc += h * w.samples[idx as usize];
            }
        }
        out.push(acc);
    }
    debug_assert_eq!(taps_per_phase, phases[0].len());
    Ok(Waveform::new(out, target_rate))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Kaiser window evaluated at `x` in `[-1, 1]`.
fn kaiser(x: f64, beta: f64) -> f64 {
    if x.abs() > 1.0 {
        return 0.0;
    }
    bessel_i0(beta * (1.0 - x * x).sqrt()) / bessel_i0(beta)
}

fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let half = x / 2.0;
    for k in 1..64 {
        term *= (half / k as f64).powi(2);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

// ---------------------------------------------------------------------------
// High-pass filtering
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Biquad {
    b: [f64; 3],
    a: [f64; 2],
}

impl Biquad {
    fn run(&self, x: &mut [f64]) {
        // transposed direct form II
        let (mut z1, mut z2) = (0.0, 0.0);
        for v in x.iter_mut() {
            let input = *v;
            let out = self.b[0] * input + z1;
            z1 = self.b[1] * input - self.a[0] * out + z2;
            z2 = self.b[2] * input - self.a[1] * out;
            *v = out;
        }
    }
}

/// Second-order sections of a digital Butterworth high-pass (bilinear
/// transform, pre-warped at the cutoff).
fn butterworth_highpass(cutoff_hz: f64, sample_rate: u32, order: usize) -> Vec<Biquad> {
    let w0 = 2.0 * PI * cutoff_hz / f64::from(sample_rate);
    let cos_w0 = w0.cos();
    let mut sections = Vec::new();
    for k in 0..order / 2 {
        let q = 1.0 / (2.0 * (PI * (2 * k + 1) as f64 / (2 * order) as f64).sin());
        let alpha = w0.sin() / (2.0 * q);
        let a0 = 1.0 + alpha;
        let b0 = (1.0 + cos_w0) / 2.0 / a0;
        sections.push(Biquad {
            b: [b0, -2.0 * b0, b0],
            a: [-2.0 * cos_w0 / a0, (1.0 - alpha) / a0],
        });
    }
    if order % 2 == 1 {
        let k = (w0 / 2.0).tan();
        let b0 = 1.0 / (1.0 + k);
        sections.push(Biquad {
            b: [b0, -b0, 0.0],
            a: [(k - 1.0) / (k + 1.0), 0.0],
        });
    }
    sections
}

/// Zero-phase Butterworth high-pass: the filter is run forward and then
/// backward over an odd-extended copy of the signal.
pub fn highpass(samples: &[f64], sample_rate: u32, cutoff_hz: f64, order: usize) -> Vec<f64> {
    if cutoff_hz <= 0.0 || samples.len() < 2 {
        return samples.to_vec();
    }
    let sections = butterworth_highpass(cutoff_hz, sample_rate, order);
    let n = samples.len();
    let pad = ((3.0 * f64::from(sample_rate) / cutoff_hz).round() as usize).min(n - 1);

    let mut ext = Vec::with_capacity(n + 2 * pad);
    let first = samples[0];
    let last = samples[n - 1];
    ext.extend((1..=pad).rev().map(|i| 2.0 * first - samples[i]));
    ext.extend_from_slice(samples);
    ext.extend((1..=pad).map(|i| 2.0 * last - samples[n - 1 - i]));

    for s in &sections {
        s.run(&mut ext);
    }
    ext.reverse();
    for s in &sections {
        s.run(&mut ext);
    }
    ext.reverse();
    ext[pad..pad + n].to_vec()
}

// ---------------------------------------------------------------------------
// Silence gate, trimming and normalization
// ---------------------------------------------------------------------------

/// Frame-energy voice activity gate on a fixed hop grid.
///
/// Block `i` covers samples `[i*hop, (i+1)*hop)`; its state is decided by the
/// energy of a `frame`-long window centred on the block.
#[derive(Debug, Clone, Copy)]
pub struct SilenceGate {
    pub frame: usize,
    pub hop: usize,
    pub threshold_db: f64,
    pub sample_rate: u32,
}

impl SilenceGate {
    pub fn new(sample_rate: u32, cfg: &PreprocessConfig) -> Self {
        let ms = |v: f64| ((v / 1000.0 * f64::from(sample_rate)).round() as usize).max(1);
        Self {
            frame: ms(cfg.gate_frame_ms),
            hop: ms(cfg.gate_hop_ms),
            threshold_db: cfg.silence_threshold_db,
            sample_rate,
        }
    }

    /// `true` for every hop block that is above the threshold.
    pub fn activity(&self, samples: &[f64]) -> Vec<bool> {
        let n = samples.len();
        let blocks = n.div_ceil(self.hop);
        let half = self.frame / 2;
        (0..blocks)
            .map(|i| {
                let centre = i * self.hop + self.hop / 2;
                let lo = centre.saturating_sub(half);
                let hi = (centre + self.frame - half).min(n);
                let lo = lo.min(hi.saturating_sub(1));
                let window = &samples[lo..hi];
                let power = window.iter().map(|v| v * v).sum::<f64>() / window.len() as f64;
                power_to_db(power) >= self.threshold_db
            })
            .collect()
    }

    /// Limit for a silent run, in whole blocks.
    fn cap_blocks(&self, trim_ms: f64) -> usize {
        let hop_ms = self.hop as f64 * 1000.0 / f64::from(self.sample_rate);
        ((trim_ms / hop_ms).round() as usize).max(1)
    }

    /// Shortens silent runs that exceed `trim_ms`.
    pub fn trim(&self, samples: &[f64], trim_ms: f64, mode: SilenceMode) -> Result<Vec<f64>> {
        let active = self.activity(samples);
        if !active.iter().any(|&a| a) {
            return Err(Error::SilentSignal);
        }
        let cap = self.cap_blocks(trim_ms);
        let n = samples.len();
        let n_blocks = active.len();
        let block_start = |b: usize| (b * self.hop).min(n);

        let mut keep = Vec::with_capacity(n);
        let mut b = 0;
        while b < n_blocks {
            let run_end = active[b..]
                .iter()
                .position(|&a| a != active[b])
                .map_or(n_blocks, |p| b + p);
            let (start, end) = (block_start(b), block_start(run_end));
            let len_blocks = run_end - b;
            if active[b] || len_blocks <= cap {
                keep.extend_from_slice(&samples[start..end]);
            } else if b == 0 {
                keep.extend_from_slice(&samples[block_start(run_end - cap)..end]);
            } else if run_end == n_blocks {
                keep.extend_from_slice(&samples[start..block_start(b + cap)]);
            } else if mode == SilenceMode::Cap {
                let head = cap / 2;
                keep.extend_from_slice(&samples[start..block_start(b + head)]);
                keep.extend_from_slice(&samples[block_start(run_end - (cap - head))..end]);
            }
            b = run_end;
        }
        Ok(keep)
    }

    /// Applies a gain so the RMS over active blocks equals `target_dbfs`.
    pub fn normalize(&self, samples: &[f64], target_dbfs: f64) -> Result<Vec<f64>> {
        let rms_active = self.active_rms(samples).ok_or(Error::SilentSignal)?;
        let gain = db_to_amplitude(target_dbfs) / rms_active;
        Ok(samples.iter().map(|v| v * gain).collect())
    }

    /// RMS over the hop blocks whose own level reaches the threshold, `None`
    /// when there are none.
    ///
    /// Unlike [`activity`](Self::activity) this does not look at neighbouring
    /// samples, so silence next to speech does not dilute the level.
    pub fn active_rms(&self, samples: &[f64]) -> Option<f64> {
        let (mut energy, mut count) = (0.0, 0usize);
        for block in samples.chunks(self.hop) {
            let e = block.iter().map(|v| v * v).sum::<f64>();
            if power_to_db(e / block.len() as f64) >= self.threshold_db {
                energy += e;
                count += block.len();
            }
        }
        (count > 0 && energy > 0.0).then(|| (energy / count as f64).sqrt())
    }
}

pub fn rms(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    (samples.iter().map(|v| v * v).sum::<f64>() / samples.len() as f64).sqrt()
}

pub fn amplitude_to_db(a: f64) -> f64 {
    20.0 * a.max(1e-300).log10()
}

pub fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

fn power_to_db(p: f64) -> f64 {
    10.0 * p.max(1e-300).log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(freq: f64, amp: f64, secs: f64, rate: u32) -> Vec<f64> {
        let n = (secs * f64::from(rate)) as usize;
        (0..n)
            .map(|i| amp * (2.0 * PI * freq * i as f64 / f64::from(rate)).sin())
            .collect()
    }

    fn write_wav(path: &Path, spec: hound::WavSpec, data: &[f64]) {
        let mut w = hound::WavWriter::create(path, spec).unwrap();
        for &v in data {
            match spec.sample_format {
                hound::SampleFormat::Int => w.write_sample((v * 32767.0).round() as i16).unwrap(),
                hound::SampleFormat::Float => w.write_sample(v as f32).unwrap(),
            }
        }
        w.finalize().unwrap();
    }

    fn spec(channels: u16, rate: u32, float: bool) -> hound::WavSpec {
        hound::WavSpec {
            channels,
            sample_rate: rate,
            bits_per_sample: if float { 32 } else { 16 },
            sample_format: if float {
                hound::SampleFormat::Float
            } else {
                hound::SampleFormat::Int
            },
        }
    }

    #[test]
    fn load_pcm16_silence() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.wav");
        write_wav(&p, spec(1, 22050, false), &vec![0.0; 22050]);
        let w = load_wav(&p).unwrap();
        assert_eq!(w.sample_rate, 22050);
        assert_eq!(w.samples.len(), 22050);
        assert!(w.samples.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn load_stereo_averages_channels() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("st.wav");
        let data: Vec<f64> = (0..2000).map(|i| if i % 2 == 0 { 0.5 } else { -0.5 }).collect();
        write_wav(&p, spec(2, 22050, true), &data);
        let w = load_wav(&p).unwrap();
        assert_eq!(w.samples.len(), 1000);
        assert!(w.samples.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn load_keeps_native_rate() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.wav");
        write_wav(&p, spec(1, 16000, false), &tone(440.0, 0.3, 0.5, 16000));
        assert_eq!(load_wav(&p).unwrap().sample_rate, 16000);
    }

    #[test]
    fn load_rejects_bad_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pcm24.wav");
        let s24 = hound::WavSpec {
            channels: 1,
            sample_rate: 22050,
            bits_per_sample: 24,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&p, s24).unwrap();
        w.write_sample(0i32).unwrap();
        w.finalize().unwrap();
        assert!(matches!(load_wav(&p), Err(Error::UnsupportedEncoding(_))));

        let empty = dir.path().join("empty.wav");
        write_wav(&empty, spec(1, 22050, false), &[]);
        assert!(matches!(load_wav(&empty), Err(Error::EmptyAudio)));

        assert!(matches!(
            load_wav(dir.path().join("missing.wav")),
            Err(Error::Io { .. })
        ));
        let junk = dir.path().join("junk.wav");
        std::fs::write(&junk, b"not a wav file at all").unwrap();
        assert!(matches!(load_wav(&junk), Err(Error::Wav { .. })));
    }

    #[test]
    fn resample_preserves_tone() {
        let w = Waveform::new(tone(440.0, 0.5, 1.0, 16000), 16000);
        let r = resample(&w, 22050).unwrap();
        assert_eq!(r.samples.len(), 22050);
        let expected = tone(440.0, 0.5, 1.0, 22050);
        // skip filter edges
        let err = r.samples[200..21800]
            .iter()
            .zip(&expected[200..21800])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-3, "max error {err}");
    }

    #[test]
    fn resample_down_rejects_alias() {
        // 15 kHz is above the 11.025 kHz output Nyquist
        let w = Waveform::new(tone(15000.0, 0.5, 0.5, 44100), 44100);
        let r = resample(&w, 22050).unwrap();
        let level = rms(&r.samples[500..r.samples.len() - 500]);
        assert!(amplitude_to_db(level / rms(&w.samples)) < -60.0);
    }

    #[test]
    fn highpass_removes_30hz() {
        let x = tone(30.0, 0.5, 2.0, 22050);
        let y = highpass(&x, 22050, 60.0, 6);
        let rel = amplitude_to_db(rms(&y) / rms(&x));
        assert!(rel < -60.0, "30 Hz attenuated only {rel} dB");
        // one octave below the cutoff the stopband already exceeds 40 dB
        let rel4 = amplitude_to_db(rms(&highpass(&x, 22050, 60.0, 4)) / rms(&x));
        assert!(rel4 < -40.0, "{rel4}");
    }

    #[test]
    fn highpass_passes_speech_band() {
        let x = tone(440.0, 0.5, 1.0, 22050);
        let y = highpass(&x, 22050, 60.0, 6);
        let err = x[2000..20000]
            .iter()
            .zip(&y[2000..20000])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn preprocess_normalizes_tone() {
        let amp = db_to_amplitude(-10.0) * 2f64.sqrt();
        let w = Waveform::new(tone(440.0, amp, 1.0, 22050), 22050);
        assert!((w.rms_dbfs() + 10.0).abs() < 0.01);
        let out = preprocess(&w, &PreprocessConfig::default()).unwrap();
        assert_eq!(out.sample_rate, 22050);
        assert!((out.rms_dbfs() + 22.0).abs() < 0.1, "{}", out.rms_dbfs());
    }

    #[test]
    fn preprocess_low_tone_is_silent() {
        let w = Waveform::new(tone(30.0, 0.3, 1.0, 22050), 22050);
        assert!(matches!(
            preprocess(&w, &PreprocessConfig::default()),
            Err(Error::SilentSignal)
        ));
    }

    #[test]
    fn preprocess_all_zero_is_error() {
        let w = Waveform::new(vec![0.0; 8000], 22050);
        assert!(matches!(
            preprocess(&w, &PreprocessConfig::default()),
            Err(Error::SilentSignal)
        ));
        assert!(matches!(
            preprocess(&Waveform::new(vec![], 22050), &PreprocessConfig::default()),
            Err(Error::EmptyAudio)
        ));
    }

    #[test]
    fn config_validation() {
        let cfg = PreprocessConfig {
            highpass_hz: 12000.0,
            ..PreprocessConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = PreprocessConfig {
            silence_trim_ms: 0.0,
            ..PreprocessConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn remove_mode_cuts_internal_silence() {
        let rate = 22050;
        let mut x = tone(440.0, 0.1, 0.5, rate);
        x.extend(vec![0.0; rate as usize]);
        x.extend(tone(440.0, 0.1, 0.5, rate));
        let cfg = PreprocessConfig::default();
        let gate = SilenceGate::new(rate, &cfg);
        let capped = gate.trim(&x, 200.0, SilenceMode::Cap).unwrap();
        let removed = gate.trim(&x, 200.0, SilenceMode::Remove).unwrap();
        assert!(removed.len() < capped.len());
        assert!(capped.len() < x.len());
        // every remaining block of the removed version is active
        let act = gate.activity(&removed);
        let longest_silent = act.split(|&a| a).map(|run| run.len()).max().unwrap_or(0);
        assert!(longest_silent <= 2, "{longest_silent}");
    }
}
