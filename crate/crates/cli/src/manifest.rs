//! Utterance manifests: CSV with a header row, one utterance per line.
//!
//! Columns: `utterance_id,ref_wav,syn_wav,f0_ref,f0_syn,token_count,speaker_id`.
//! Only the first two are required; empty cells mean absent. Relative paths
//! are resolved against the manifest's directory.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub utterance_id: String,
    pub ref_wav: PathBuf,
    pub syn_wav: Option<PathBuf>,
    pub f0_ref: Option<PathBuf>,
    pub f0_syn: Option<PathBuf>,
    pub token_count: Option<u32>,
    pub speaker_id: Option<String>,
}

#[derive(Debug, Deserialize)]
struct Row {
    utterance_id: String,
    ref_wav: String,
    #[serde(default)]
    syn_wav: Option<String>,
    #[serde(default)]
    f0_ref: Option<String>,
    #[serde(default)]
    f0_syn: Option<String>,
    #[serde(default)]
    token_count: Option<String>,
    #[serde(default)]
    speaker_id: Option<String>,
}

fn present(s: Option<String>) -> Option<String> {
    s.filter(|v| !v.is_empty())
}

pub fn read_manifest(path: &Path) -> anyhow::Result<Vec<ManifestEntry>> {
    let base = path.parent().unwrap_or(Path::new(""));
    let file = std::fs::File::open(path).with_context(|| format!("opening manifest {}", path.display()))?;
    parse_manifest(file, base).with_context(|| format!("in manifest {}", path.display()))
}

pub fn parse_manifest<R: std::io::Read>(input: R, base: &Path) -> anyhow::Result<Vec<ManifestEntry>> {
    let resolve = |p: String| base.join(p);
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let line = i + 2;
        let row = row.with_context(|| format!("line {line}"))?;
        if row.utterance_id.is_empty() || row.ref_wav.is_empty() {
            bail!("line {line}: utterance_id and ref_wav are required");
        }
        // ids name output files
        if row.utterance_id.contains(['/', '\\']) || row.utterance_id.starts_with('.') {
            bail!(
                "line {line}: utterance_id {:?} cannot be used as a file name",
                row.utterance_id
            );
        }
        if !seen.insert(row.utterance_id.clone()) {
            bail!("line {line}: duplicate utterance_id {:?}", row.utterance_id);
        }
        let syn_wav = present(row.syn_wav).map(resolve);
        let f0_syn = present(row.f0_syn).map(resolve);
        if f0_syn.is_some() && syn_wav.is_none() {
            bail!("line {line}: f0_syn given without syn_wav");
        }
        let f0_ref = present(row.f0_ref).map(resolve);
        if syn_wav.is_some() && f0_ref.is_some() && f0_syn.is_none() {
            bail!("line {line}: f0_ref and syn_wav given without f0_syn");
        }
        let token_count = present(row.token_count)
            .map(|t| {
                t.parse::<u32>()
                    .with_context(|| format!("line {line}: token_count {t:?}"))
            })
            .transpose()?;
        entries.push(ManifestEntry {
            utterance_id: row.utterance_id,
            ref_wav: resolve(row.ref_wav),
            syn_wav,
            f0_ref,
            f0_syn,
            token_count,
            speaker_id: present(row.speaker_id),
        });
    }
    if entries.is_empty() {
        bail!("empty manifest");
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> anyhow::Result<Vec<ManifestEntry>> {
        parse_manifest(text.as_bytes(), Path::new("/data"))
    }

    #[test]
    fn minimal_and_full_rows() {
        let m = parse(
            "utterance_id,ref_wav,syn_wav,f0_ref,f0_syn,token_count,speaker_id\n\
             a,a.wav,,,,,\n\
             b, /abs/b.wav ,syn/b.wav,f0/b.csv,f0/b_syn.csv,42,spk0\n",
        )
        .unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].ref_wav, PathBuf::from("/data/a.wav"));
        assert_eq!(m[0].syn_wav, None);
        assert_eq!(m[1].ref_wav, PathBuf::from("/abs/b.wav"));
        assert_eq!(m[1].f0_syn, Some(PathBuf::from("/data/f0/b_syn.csv")));
        assert_eq!(m[1].token_count, Some(42));
        assert_eq!(m[1].speaker_id.as_deref(), Some("spk0"));
    }

    #[test]
    fn optional_columns_may_be_missing() {
        let m = parse("utterance_id,ref_wav\nx,x.wav\n").unwrap();
        assert_eq!(m[0].token_count, None);
    }

    #[test]
    fn errors() {
        let empty = parse("utterance_id,ref_wav\n").unwrap_err();
        assert_eq!(empty.to_string(), "empty manifest");
        assert!(parse("").is_err());
        assert!(parse("utterance_id,ref_wav\na,a.wav\na,b.wav\n").is_err());
        assert!(parse("utterance_id,ref_wav,f0_syn\na,a.wav,f.csv\n").is_err());
        assert!(parse("utterance_id,ref_wav,token_count\na,a.wav,many\n").is_err());
        assert!(parse("utterance_id,syn_wav\na,a.wav\n").is_err());
        assert!(parse("utterance_id,ref_wav\n../x,a.wav\n").is_err());
        assert!(parse("utterance_id,ref_wav,syn_wav,f0_ref\na,a.wav,b.wav,f.csv\n").is_err());
    }
}
