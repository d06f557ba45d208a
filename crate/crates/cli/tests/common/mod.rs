//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use oversmooth::spectral::{write_blob, LogMelSpectrogram};

pub const SR: u32 = 22050;

pub fn oversmooth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oversmooth"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// A vowel-like buzz: harmonics of a gliding f0 under a slow amplitude swell.
pub fn write_voice(path: &Path, secs: f64, f0: f64) {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: SR,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(path, spec).unwrap();
    let n = (secs * f64::from(SR)) as usize;
    let mut phase = 0.0;
    for i in 0..n {
        let t = i as f64 / f64::from(SR);
        phase += 2.0 * PI * f0 * (1.0 + 0.1 * (2.0 * PI * 1.5 * t).sin()) / f64::from(SR);
        let v: f64 = (1..=12).map(|h| (h as f64 * phase).sin() / h as f64).sum();
        let env = 0.5 - 0.3 * (2.0 * PI * t / secs).cos();
        w.write_sample((0.2 * env * v * 32767.0) as i16).unwrap();
    }
    w.finalize().unwrap();
}

pub fn write_silence(path: &Path, secs: f64) {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: SR,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(path, spec).unwrap();
    for _ in 0..(secs * f64::from(SR)) as usize {
        w.write_sample(0i16).unwrap();
    }
    w.finalize().unwrap();
}

pub fn write_lmel(path: &Path, frames: &[Vec<f64>]) {
    let s = LogMelSpectrogram::from_frames(frames, None).unwrap();
    let mut bytes = Vec::new();
    write_blob(&s, &mut bytes).unwrap();
    fs::write(path, bytes).unwrap();
}

pub fn write_manifest(dir: &Path, name: &str, header: &str, rows: &[String]) -> PathBuf {
    let path = dir.join(name);
    let mut text = format!("{header}\n");
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    fs::write(&path, text).unwrap();
    path
}

/// Three voices of different pitch and length under `dir`.
pub fn voice_manifest(dir: &Path) -> PathBuf {
    let mut rows = Vec::new();
    for (i, (secs, f0)) in [(1.2, 120.0), (0.9, 180.0), (1.5, 240.0)].into_iter().enumerate() {
        let name = format!("v{i}.wav");
        write_voice(&dir.join(&name), secs, f0);
        rows.push(format!("u{i},{name},{name}"));
    }
    write_manifest(dir, "voices.csv", "utterance_id,ref_wav,syn_wav", &rows)
}

pub fn read_table(path: &Path) -> Vec<BTreeMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            header
                .iter()
                .zip(rec.unwrap().iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

pub fn aggregate_row(out: &Path, measure: &str) -> BTreeMap<String, String> {
    read_table(&out.join("aggregate.csv"))
        .into_iter()
        .find(|r| r["measure"] == measure)
        .unwrap_or_else(|| panic!("no {measure} row"))
}

pub fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s:?}"))
}

/// All files under `dir` with their contents, keyed by relative path.
pub fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.insert(p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    files
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
