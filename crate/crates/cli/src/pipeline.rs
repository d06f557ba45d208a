//! Per-utterance processing shared by the subcommands, and the batch runner.

use std::path::Path;

use anyhow::{bail, Context};
use oversmooth::audio::{load_wav, preprocess};
use oversmooth::compare::{PitchContour, UtteranceAnalysis};
use oversmooth::osmetrics::analyze;
use oversmooth::spectral::{read_blob, FrameTiming, LogMelSpectrogram, MelExtractor};
use oversmooth::Error;
use rayon::prelude::*;

use crate::settings::Settings;

pub struct Pipeline {
    pub settings: Settings,
    extractor: MelExtractor,
}

impl Pipeline {
    pub fn new(settings: Settings) -> anyhow::Result<Self> {
        settings.preprocess.validate()?;
        let extractor = MelExtractor::new(&settings.stft, &settings.mel, settings.preprocess.target_rate)?;
        settings.metrics.validate(settings.mel.n_mels / 2 + 1)?;
        Ok(Self { settings, extractor })
    }

    /// Log-mel features of a recording and its duration in seconds. A `.lmel`
    /// blob is taken as already extracted features, lasting its frame count
    /// times the hop; anything else is read as audio.
    pub fn log_mel(&self, path: &Path) -> anyhow::Result<(LogMelSpectrogram, f64)> {
        if path.extension().is_some_and(|e| e == "lmel") {
            let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let mut s =
                read_blob(std::io::BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
            if s.n_mels != self.settings.mel.n_mels {
                bail!(
                    "{} has {} mel bands, expected {}",
                    path.display(),
                    s.n_mels,
                    self.settings.mel.n_mels
                );
            }
            s.timing = Some(FrameTiming {
                hop: self.settings.stft.hop,
                sample_rate: self.settings.preprocess.target_rate,
            });
            let duration = s.duration_s().expect("timing set");
            return Ok((s, duration));
        }
        let raw = load_wav(path)?;
        let clean =
            preprocess(&raw, &self.settings.preprocess).with_context(|| format!("preprocessing {}", path.display()))?;
        Ok((self.extractor.extract(&clean)?, clean.duration_s()))
    }

    pub fn pitch_frame_period_s(&self) -> f64 {
        let s = &self.settings;
        s.pitch_frame_period_s
            .unwrap_or(s.stft.hop as f64 / f64::from(s.preprocess.target_rate))
    }

    /// Extract and score one recording. A recording whose frames are all
    /// degenerate still yields an analysis, with `metrics` left empty.
    pub fn analyze(
        &self,
        wav: &Path,
        f0: Option<&Path>,
        token_count: Option<u32>,
    ) -> anyhow::Result<UtteranceAnalysis> {
        let (log_mel, duration_s) = self.log_mel(wav)?;
        let metrics = match analyze(&log_mel, &self.settings.metrics) {
            Ok(m) => Some(m),
            Err(Error::AllFramesDegenerate(_)) => None,
            Err(e) => return Err(e.into()),
        };
        let pitch = f0
            .map(|path| -> anyhow::Result<PitchContour> {
                let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
                PitchContour::read_csv(file, Some(self.pitch_frame_period_s()))
                    .with_context(|| format!("reading pitch {}", path.display()))
            })
            .transpose()?;
        Ok(UtteranceAnalysis {
            log_mel,
            metrics,
            duration_s,
            pitch,
            token_count,
        })
    }
}

/// Runs `f` over `items` on a pool of `workers` threads. Results keep the
/// input order, so output never depends on scheduling.
pub fn run_batch<T, R, F>(items: &[T], workers: usize, f: F) -> anyhow::Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}

/// Error chain on one line, for error logs.
pub fn describe_error(e: &anyhow::Error) -> String {
    format!("{e:#}").replace(['\n', '\t'], " ")
}
