//! The four batch subcommands. Each writes its files under an output
//! directory and reports how the batch went; usage problems are errors.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context};
use oversmooth::compare::{compare_utterances, ComparisonReport};
use oversmooth::fmt::{sig6, sig6_opt};
use oversmooth::osmetrics::{frame_metrics, MetricConfig, OversmoothingFrame};
use oversmooth::spectral::write_blob;
use oversmooth::stats::{compare_corpora, describe, Measure, UtteranceRecord};
use oversmooth::synthlab::{run_suite, SuiteConfig};
use serde_json::Value;

use crate::manifest::ManifestEntry;
use crate::pipeline::{describe_error, run_batch, Pipeline};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Some entries failed; see `errors.log` in the output directory.
    PartialFailure,
    /// The synthlab suite found a violated property.
    PropertyFailure,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::PartialFailure => 2,
            Outcome::PropertyFailure => 3,
        }
    }
}

pub const ERROR_LOG: &str = "errors.log";

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_file(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Writes `errors.log` when there are failures and removes a stale one
/// otherwise, so the directory always reflects the last run.
fn finish(out: &Path, mut failures: Vec<(String, String)>) -> anyhow::Result<Outcome> {
    let log = out.join(ERROR_LOG);
    if failures.is_empty() {
        if log.exists() {
            fs::remove_file(&log).with_context(|| format!("removing {}", log.display()))?;
        }
        return Ok(Outcome::Success);
    }
    failures.sort();
    let mut text = String::new();
    for (id, message) in &failures {
        text.push_str(&format!("{id}\t{message}\n"));
    }
    write_file(&log, text.as_bytes())?;
    eprintln!("{} of the entries failed; see {}", failures.len(), log.display());
    Ok(Outcome::PartialFailure)
}

fn sorted_by_id(entries: &[ManifestEntry]) -> Vec<&ManifestEntry> {
    let mut v: Vec<&ManifestEntry> = entries.iter().collect();
    v.sort_by(|a, b| a.utterance_id.cmp(&b.utterance_id));
    v
}

// ---------------------------------------------------------------------------
// features
// ---------------------------------------------------------------------------

pub const FEATURE_SUMMARY_HEADER: &[&str] = &[
    "utterance_id",
    "duration_s",
    "n_frames",
    "degenerate_frames",
    "hqer_mean",
    "hqer_std",
    "cslope_mean",
    "cslope_std",
    "ccentroid_mean",
    "ccentroid_std",
    "croll95_mean",
    "croll95_std",
];

/// One log-mel blob and one metric CSV per utterance, plus `summary.csv`.
pub fn features(entries: &[ManifestEntry], pipeline: &Pipeline, out: &Path, workers: usize) -> anyhow::Result<Outcome> {
    let (feature_dir, metric_dir) = (out.join("features"), out.join("metrics"));
    create_dir(&feature_dir)?;
    create_dir(&metric_dir)?;
    let entries = sorted_by_id(entries);

    let results = run_batch(&entries, workers, |e| -> anyhow::Result<Vec<String>> {
        let a = pipeline.analyze(&e.ref_wav, None, e.token_count)?;
        let id = &e.utterance_id;
        let mut blob = Vec::new();
        write_blob(&a.log_mel, &mut blob)?;
        write_file(&feature_dir.join(format!("{id}.lmel")), &blob)?;
        let m = a
            .metrics
            .with_context(|| format!("all {} frames degenerate", a.log_mel.n_frames))?;
        let mut csv = Vec::new();
        m.series.write_csv(&mut csv)?;
        write_file(&metric_dir.join(format!("{id}.csv")), &csv)?;
        let mut row = vec![
            id.clone(),
            sig6(a.duration_s),
            m.total_frames.to_string(),
            m.degenerate_frames().to_string(),
        ];
        for (mean, std) in m.mean.as_array().into_iter().zip(m.std.as_array()) {
            row.push(sig6(mean));
            row.push(sig6(std));
        }
        Ok(row)
    })?;

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (e, r) in entries.iter().zip(results) {
        match r {
            Ok(row) => rows.push(row),
            Err(err) => failures.push((e.utterance_id.clone(), describe_error(&err))),
        }
    }
    write_file(&out.join("summary.csv"), &csv_bytes(FEATURE_SUMMARY_HEADER, &rows)?)?;
    finish(out, failures)
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

type Field = fn(&ComparisonReport) -> Option<f64>;

/// Aggregate rows: label, field, scale. HQER-based rows are reported in
/// percent as the labels say.
pub const AGGREGATE_ROWS: &[(&str, Field, f64)] = &[
    ("L1", |r| Some(r.l1), 1.0),
    ("L2", |r| Some(r.l2), 1.0),
    ("SConv", |r| Some(r.sconv), 1.0),
    ("Δf0,RMSE/Hz", |r| r.f0_rmse, 1.0),
    ("Pearson r", |r| r.pearson_r, 1.0),
    ("E_V/UV", |r| r.vuv_error, 1.0),
    ("MAE(HQER)/%", |r| r.mae_hqer, 100.0),
    ("MAE(CSlope)/dB/bin", |r| r.mae_cslope, 1.0),
    ("MAE(CCentroid)/bin", |r| r.mae_ccentroid, 1.0),
    ("MAE(CRoll95)/bin", |r| r.mae_croll95, 1.0),
    ("Δu μ(f0)/Hz", |r| r.delta_mu_f0, 1.0),
    ("Δu σ(f0)/Hz", |r| r.delta_sigma_f0, 1.0),
    ("Δu SPR/(tokens/s)", |r| r.delta_spr, 1.0),
    ("Δu HQER/%", |r| r.delta_u_hqer, 100.0),
    ("Δu CSlope/dB/bin", |r| r.delta_u_cslope, 1.0),
    ("Δu CCentroid/bin", |r| r.delta_u_ccentroid, 1.0),
    ("Δu CRoll95/bin", |r| r.delta_u_croll95, 1.0),
];

/// Rounds every number in a JSON value to six significant digits.
fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                let rounded: f64 = sig6(x).parse().expect("sig6 output parses");
                *v = Value::from(rounded);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_numbers(&mut v);
    Ok(serde_json::to_string(&v)?)
}

/// One JSON report per pair in `reports.jsonl` and the mean/std table in
/// `aggregate.csv`.
pub fn compare(entries: &[ManifestEntry], pipeline: &Pipeline, out: &Path, workers: usize) -> anyhow::Result<Outcome> {
    create_dir(out)?;
    let entries = sorted_by_id(entries);
    let results = run_batch(&entries, workers, |e| -> anyhow::Result<ComparisonReport> {
        let syn_wav = e.syn_wav.as_deref().context("no syn_wav in manifest")?;
        let reference = pipeline.analyze(&e.ref_wav, e.f0_ref.as_deref(), e.token_count)?;
        let synthesis = pipeline.analyze(syn_wav, e.f0_syn.as_deref(), e.token_count)?;
        Ok(compare_utterances(
            &e.utterance_id,
            &reference,
            &synthesis,
            &pipeline.settings.dtw,
        )?)
    })?;

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (e, r) in entries.iter().zip(results) {
        match r {
            Ok(report) => reports.push(report),
            Err(err) => failures.push((e.utterance_id.clone(), describe_error(&err))),
        }
    }

    let mut jsonl = String::new();
    for r in &reports {
        jsonl.push_str(&json_line(r)?);
        jsonl.push('\n');
    }
    write_file(&out.join("reports.jsonl"), jsonl.as_bytes())?;

    let rows: Vec<Vec<String>> = AGGREGATE_ROWS
        .iter()
        .map(|&(label, field, scale)| {
            let values: Vec<f64> = reports.iter().filter_map(field).map(|v| v * scale).collect();
            match describe(&values, pipeline.settings.std_divisor) {
                Ok(d) => vec![label.to_string(), sig6(d.mean), sig6(d.std), d.count.to_string()],
                Err(_) => vec![label.to_string(), String::new(), String::new(), "0".into()],
            }
        })
        .collect();
    write_file(
        &out.join("aggregate.csv"),
        &csv_bytes(&["measure", "mean", "std", "n"], &rows)?,
    )?;
    finish(out, failures)
}

// ---------------------------------------------------------------------------
// corpus-stats
// ---------------------------------------------------------------------------

fn corpus_records(
    entries: &[ManifestEntry],
    pipeline: &Pipeline,
    workers: usize,
    tag: &str,
    failures: &mut Vec<(String, String)>,
) -> anyhow::Result<Vec<UtteranceRecord>> {
    let entries = sorted_by_id(entries);
    let results = run_batch(&entries, workers, |e| -> anyhow::Result<UtteranceRecord> {
        let a = pipeline.analyze(&e.ref_wav, e.f0_ref.as_deref(), e.token_count)?;
        Ok(UtteranceRecord::from_bundle(e.utterance_id.clone(), &a.bundle()))
    })?;
    let mut records = Vec::new();
    for (e, r) in entries.iter().zip(results) {
        match r {
            Ok(rec) => records.push(rec),
            Err(err) => failures.push((format!("{tag}:{}", e.utterance_id), describe_error(&err))),
        }
    }
    Ok(records)
}

fn plot_data(records: &[UtteranceRecord]) -> anyhow::Result<Vec<u8>> {
    let mut header = vec!["utterance_id"];
    header.extend(Measure::ALL.iter().map(|m| m.key()));
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            std::iter::once(r.id.clone())
                .chain(Measure::ALL.iter().map(|&m| sig6_opt(r.get(m))))
                .collect()
        })
        .collect();
    csv_bytes(&header, &rows)
}

pub const CORPUS_HEADER: &[&str] = &[
    "measure", "label", "mean_a", "std_a", "median_a", "n_a", "mean_b", "std_b", "median_b", "n_b", "u", "p",
];

/// Table-1-style comparison of two corpora in `corpus_stats.csv` and
/// `corpus_stats.json`, plus per-utterance values for plotting.
pub fn corpus_stats(
    a: &[ManifestEntry],
    b: &[ManifestEntry],
    pipeline: &Pipeline,
    out: &Path,
    workers: usize,
) -> anyhow::Result<Outcome> {
    create_dir(out)?;
    let mut failures = Vec::new();
    let ra = corpus_records(a, pipeline, workers, "a", &mut failures)?;
    let rb = corpus_records(b, pipeline, workers, "b", &mut failures)?;
    write_file(&out.join("utterances_a.csv"), &plot_data(&ra)?)?;
    write_file(&out.join("utterances_b.csv"), &plot_data(&rb)?)?;
    if ra.is_empty() || rb.is_empty() {
        eprintln!("no usable utterances in one of the corpora; no table written");
        let outcome = finish(out, failures)?;
        return Ok(if outcome == Outcome::Success {
            Outcome::PartialFailure
        } else {
            outcome
        });
    }

    let (rows, omitted) = compare_corpora(&ra, &rb, pipeline.settings.std_divisor)?;
    for m in &omitted {
        eprintln!("warning: {} missing from all entries of a corpus; row omitted", m.key());
    }
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.measure.key().to_string(),
                r.measure.label().to_string(),
                sig6(r.a.mean),
                sig6(r.a.std),
                sig6(r.a.median),
                r.a.count.to_string(),
                sig6(r.b.mean),
                sig6(r.b.std),
                sig6(r.b.median),
                r.b.count.to_string(),
                sig6(r.test.u),
                sig6(r.test.p),
            ]
        })
        .collect();
    write_file(&out.join("corpus_stats.csv"), &csv_bytes(CORPUS_HEADER, &table)?)?;

    let json = serde_json::json!({
        "n_a": ra.len(),
        "n_b": rb.len(),
        "rows": rows,
        "omitted": omitted,
    });
    let mut text = json_line(&json)?;
    text.push('\n');
    write_file(&out.join("corpus_stats.json"), text.as_bytes())?;
    finish(out, failures)
}

// ---------------------------------------------------------------------------
// synthlab
// ---------------------------------------------------------------------------

/// Deliberately broken metric for exercising the failure path.
pub fn inverted_hqer(p: &[f64], cfg: &MetricConfig) -> oversmooth::Result<OversmoothingFrame> {
    let mut f = frame_metrics(p, cfg)?;
    f.hqer = 1.0 - f.hqer;
    Ok(f)
}

/// Runs the property suite, writing `synthlab_report.csv` and
/// `synthlab_sweep.csv`.
pub fn synthlab(cfg: &SuiteConfig, out: &Path) -> anyhow::Result<Outcome> {
    create_dir(out)?;
    let report = run_suite(cfg)?;
    let rows: Vec<Vec<String>> = report
        .properties
        .iter()
        .map(|p| {
            let status = match (p.passed(), p.gated) {
                (true, _) => "pass",
                (false, true) => "fail",
                (false, false) => "info",
            };
            vec![
                p.name.clone(),
                p.kind.map(|k| k.name().to_string()).unwrap_or_default(),
                p.checked.to_string(),
                p.violations.to_string(),
                p.gated.to_string(),
                status.to_string(),
            ]
        })
        .collect();
    write_file(
        &out.join("synthlab_report.csv"),
        &csv_bytes(&["property", "kind", "checked", "violations", "gated", "status"], &rows)?,
    )?;
    let sweep: Vec<Vec<String>> = report
        .sweep
        .iter()
        .map(|s| {
            let mut row = vec![
                s.kind.name().to_string(),
                sig6(s.strength),
                s.frames.to_string(),
                s.degenerate.to_string(),
            ];
            row.extend(s.mean.as_array().map(sig6));
            row
        })
        .collect();
    write_file(
        &out.join("synthlab_sweep.csv"),
        &csv_bytes(
            &[
                "kind",
                "strength",
                "frames",
                "degenerate",
                "hqer",
                "cslope",
                "ccentroid",
                "croll95",
            ],
            &sweep,
        )?,
    )?;

    let mut stderr = std::io::stderr().lock();
    for p in report.properties.iter().filter(|p| p.gated && !p.passed()) {
        let kind = p.kind.map(|k| k.name()).unwrap_or("-");
        writeln!(
            stderr,
            "FAIL {} [{kind}]: {} of {} checks violated",
            p.name, p.violations, p.checked
        )?;
    }
    if report.all_passed() {
        Ok(Outcome::Success)
    } else {
        Ok(Outcome::PropertyFailure)
    }
}

/// Rejects an output directory that is an existing file.
pub fn check_out_dir(out: &Path) -> anyhow::Result<()> {
    if out.is_file() {
        bail!("output path {} is a file", out.display());
    }
    Ok(())
}
