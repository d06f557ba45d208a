//! Command-line front end for the oversmoothing toolkit.

pub mod commands;
pub mod manifest;
pub mod pipeline;
pub mod settings;

use std::path::PathBuf;

use anyhow::bail;
use clap::{Args, Parser, Subcommand, ValueEnum};
use oversmooth::synthlab::SuiteConfig;

use crate::commands::Outcome;
use crate::manifest::read_manifest;
use crate::pipeline::Pipeline;
use crate::settings::Settings;

#[derive(Debug, Parser)]
#[command(name = "oversmooth", version, about = "Measure oversmoothing in speech spectrograms")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override one config key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// HQER quefrency cutoff.
    #[arg(long, global = true)]
    pub qc: Option<usize>,
    /// CSlope epsilon.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// DTW Sakoe-Chiba band half-width in frames.
    #[arg(long, global = true)]
    pub band: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract log-mel features and oversmoothing metrics per utterance.
    Features {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare synthesized utterances against their references.
    Compare {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare utterance-level statistics of two corpora.
    CorpusStats {
        /// Corpus A then corpus B.
        #[arg(long, num_args = 1, required = true)]
        manifest: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the metrics against controlled degradations of synthetic spectrograms.
    Synthlab {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = oversmooth::synthlab::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        spectrograms: usize,
        #[arg(long, value_enum, hide = true)]
        fake_metric: Option<FakeMetric>,
    },
    /// Print the effective configuration.
    PrintConfig,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FakeMetric {
    GrowingHqer,
}

impl GlobalArgs {
    pub fn settings(&self) -> anyhow::Result<Settings> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        for o in &self.overrides {
            let Some((key, value)) = o.split_once('=') else {
                bail!("--set expects KEY=VALUE, got {o:?}");
            };
            s.set(key.trim(), value.trim())?;
        }
        if let Some(q) = self.qc {
            s.metrics.cutoff_q = Some(q);
        }
        if let Some(e) = self.eps {
            s.metrics.eps = e;
        }
        if let Some(b) = self.band {
            s.dtw.band = Some(b);
        }
        Ok(s)
    }

    pub fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1)
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let settings = cli.global.settings()?;
    let workers = cli.global.workers();
    match &cli.command {
        Command::Features { manifest, out } => {
            commands::check_out_dir(out)?;
            let entries = read_manifest(manifest)?;
            commands::features(&entries, &Pipeline::new(settings)?, out, workers)
        }
        Command::Compare { manifest, out } => {
            commands::check_out_dir(out)?;
            let entries = read_manifest(manifest)?;
            commands::compare(&entries, &Pipeline::new(settings)?, out, workers)
        }
        Command::CorpusStats { manifest, out } => {
            if manifest.len() != 2 {
                bail!("corpus-stats needs exactly two --manifest arguments");
            }
            commands::check_out_dir(out)?;
            let a = read_manifest(&manifest[0])?;
            let b = read_manifest(&manifest[1])?;
            commands::corpus_stats(&a, &b, &Pipeline::new(settings)?, out, workers)
        }
        Command::Synthlab {
            out,
            seed,
            spectrograms,
            fake_metric,
        } => {
            commands::check_out_dir(out)?;
            settings.metrics.validate(SuiteConfig::default().n_mels / 2 + 1)?;
            let mut cfg = SuiteConfig {
                seed: *seed,
                n_spectrograms: *spectrograms,
                metrics: settings.metrics,
                ..SuiteConfig::default()
            };
            if let Some(FakeMetric::GrowingHqer) = fake_metric {
                cfg.metric_fn = commands::inverted_hqer;
            }
            commands::synthlab(&cfg, out)
        }
        Command::PrintConfig => {
            print!("{}", settings.dump());
            Ok(Outcome::Success)
        }
    }
}
