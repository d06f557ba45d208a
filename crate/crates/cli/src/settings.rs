//! Run settings and the `key = value` config file that mirrors them.
//!
//! ```text
//! # comments and blank lines are ignored
//! preprocess.silence_trim_ms = 200
//! metrics.cutoff_q = 10
//! dtw.band = none
//! ```

use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use oversmooth::audio::{PreprocessConfig, SilenceMode};
use oversmooth::compare::DtwConfig;
use oversmooth::osmetrics::MetricConfig;
use oversmooth::spectral::{MelConfig, StftConfig};
use oversmooth::stats::StdDivisor;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub preprocess: PreprocessConfig,
    pub stft: StftConfig,
    pub mel: MelConfig,
    pub metrics: MetricConfig,
    pub dtw: DtwConfig,
    pub std_divisor: StdDivisor,
    /// Frame period of pitch CSVs; `stft.hop / preprocess.target_rate` if unset.
    pub pitch_frame_period_s: Option<f64>,
}

/// Every accepted key, in the order `dump` writes them.
pub const KEYS: &[&str] = &[
    "preprocess.target_rate",
    "preprocess.silence_trim_ms",
    "preprocess.silence_threshold_db",
    "preprocess.silence_mode",
    "preprocess.gate_frame_ms",
    "preprocess.gate_hop_ms",
    "preprocess.highpass_hz",
    "preprocess.highpass_order",
    "preprocess.target_level_dbfs",
    "stft.n_fft",
    "stft.win_length",
    "stft.hop",
    "mel.n_mels",
    "mel.f_min",
    "mel.f_max",
    "mel.clamp_floor",
    "metrics.cutoff_q",
    "metrics.eps",
    "metrics.rolloff_fraction",
    "metrics.soft_tau",
    "dtw.band",
    "stats.std_divisor",
    "pitch.frame_period_s",
];

fn parse<T: FromStr>(key: &str, value: &str) -> anyhow::Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("invalid value {value:?} for {key}: {e}"))
}

/// `none` (any case) or empty means unset.
fn parse_opt<T: FromStr>(key: &str, value: &str) -> anyhow::Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if value.is_empty() || value.eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> anyhow::Result<()> {
        let p = &mut self.preprocess;
        match key {
            "preprocess.target_rate" => p.target_rate = parse(key, value)?,
            "preprocess.silence_trim_ms" => p.silence_trim_ms = parse(key, value)?,
            "preprocess.silence_threshold_db" => p.silence_threshold_db = parse(key, value)?,
            "preprocess.silence_mode" => {
                p.silence_mode = match value {
                    "cap" => SilenceMode::Cap,
                    "remove" => SilenceMode::Remove,
                    _ => bail!("invalid value {value:?} for {key}: expected cap or remove"),
                }
            }
            "preprocess.gate_frame_ms" => p.gate_frame_ms = parse(key, value)?,
            "preprocess.gate_hop_ms" => p.gate_hop_ms = parse(key, value)?,
            "preprocess.highpass_hz" => p.highpass_hz = parse(key, value)?,
            "preprocess.highpass_order" => p.highpass_order = parse(key, value)?,
            "preprocess.target_level_dbfs" => p.target_level_dbfs = parse(key, value)?,
            "stft.n_fft" => self.stft.n_fft = parse(key, value)?,
            "stft.win_length" => self.stft.win_length = parse(key, value)?,
            "stft.hop" => self.stft.hop = parse(key, value)?,
            "mel.n_mels" => self.mel.n_mels = parse(key, value)?,
            "mel.f_min" => self.mel.f_min = parse(key, value)?,
            "mel.f_max" => self.mel.f_max = parse(key, value)?,
            "mel.clamp_floor" => self.mel.clamp_floor = parse(key, value)?,
            "metrics.cutoff_q" => self.metrics.cutoff_q = parse_opt(key, value)?,
            "metrics.eps" => self.metrics.eps = parse(key, value)?,
            "metrics.rolloff_fraction" => self.metrics.rolloff_fraction = parse(key, value)?,
            "metrics.soft_tau" => self.metrics.soft_tau = parse(key, value)?,
            "dtw.band" => self.dtw.band = parse_opt(key, value)?,
            "stats.std_divisor" => {
                self.std_divisor = match value {
                    "population" => StdDivisor::Population,
                    "sample" => StdDivisor::Sample,
                    _ => bail!("invalid value {value:?} for {key}: expected population or sample"),
                }
            }
            "pitch.frame_period_s" => self.pitch_frame_period_s = parse_opt(key, value)?,
            _ => bail!("unknown config key {key:?}"),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let p = &self.preprocess;
        let opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
        Some(match key {
            "preprocess.target_rate" => p.target_rate.to_string(),
            "preprocess.silence_trim_ms" => p.silence_trim_ms.to_string(),
            "preprocess.silence_threshold_db" => p.silence_threshold_db.to_string(),
            "preprocess.silence_mode" => match p.silence_mode {
                SilenceMode::Cap => "cap".into(),
                SilenceMode::Remove => "remove".into(),
            },
            "preprocess.gate_frame_ms" => p.gate_frame_ms.to_string(),
            "preprocess.gate_hop_ms" => p.gate_hop_ms.to_string(),
            "preprocess.highpass_hz" => p.highpass_hz.to_string(),
            "preprocess.highpass_order" => p.highpass_order.to_string(),
            "preprocess.target_level_dbfs" => p.target_level_dbfs.to_string(),
            "stft.n_fft" => self.stft.n_fft.to_string(),
            "stft.win_length" => self.stft.win_length.to_string(),
            "stft.hop" => self.stft.hop.to_string(),
            "mel.n_mels" => self.mel.n_mels.to_string(),
            "mel.f_min" => self.mel.f_min.to_string(),
            "mel.f_max" => self.mel.f_max.to_string(),
            "mel.clamp_floor" => self.mel.clamp_floor.to_string(),
            "metrics.cutoff_q" => opt(self.metrics.cutoff_q.map(|v| v.to_string())),
            "metrics.eps" => self.metrics.eps.to_string(),
            "metrics.rolloff_fraction" => self.metrics.rolloff_fraction.to_string(),
            "metrics.soft_tau" => self.metrics.soft_tau.to_string(),
            "dtw.band" => opt(self.dtw.band.map(|v| v.to_string())),
            "stats.std_divisor" => match self.std_divisor {
                StdDivisor::Population => "population".into(),
                StdDivisor::Sample => "sample".into(),
            },
            "pitch.frame_period_s" => opt(self.pitch_frame_period_s.map(|v| v.to_string())),
            _ => return None,
        })
    }

    /// Applies `key = value` lines; later lines win.
    pub fn apply_text(&mut self, text: &str) -> anyhow::Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", n + 1))?;
            self.set(key.trim(), value.trim())
                .with_context(|| format!("line {}", n + 1))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut s = Self::default();
        s.apply_text(&text)
            .with_context(|| format!("in config {}", path.display()))?;
        Ok(s)
    }

    /// The full settings as config text; `apply_text` reads it back unchanged.
    pub fn dump(&self) -> String {
        KEYS.iter()
            .map(|k| format!("{k} = {}\n", self.get(k).expect("listed key")))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trips() {
        let mut s = Settings::default();
        s.apply_text(
            "metrics.cutoff_q = 12\ndtw.band = 7\npreprocess.silence_mode = remove\nstats.std_divisor = sample",
        )
        .unwrap();
        let mut back = Settings::default();
        back.apply_text(&s.dump()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.metrics.cutoff_q, Some(12));
        assert_eq!(Settings::default().get("dtw.band").as_deref(), Some("none"));
    }

    #[test]
    fn every_key_is_settable() {
        let d = Settings::default();
        for key in KEYS {
            let mut s = Settings::default();
            s.set(key, &d.get(key).unwrap()).unwrap();
            assert_eq!(s, d, "{key}");
        }
    }

    #[test]
    fn rejects_bad_lines() {
        let mut s = Settings::default();
        assert!(s.apply_text("nonsense").is_err());
        assert!(s.apply_text("metrics.unknown = 1").is_err());
        assert!(s.apply_text("stft.hop = fast").is_err());
        assert!(s
            .apply_text("# only a comment\n\n  metrics.eps = 1e-9  # trailing")
            .is_ok());
        assert_eq!(s.metrics.eps, 1e-9);
    }
}
