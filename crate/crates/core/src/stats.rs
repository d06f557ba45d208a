//! Corpus-level descriptive statistics and the two-sided Mann-Whitney U test.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::compare::UtteranceBundle;
use crate::{Error, Result};

/// Largest pooled sample size for which `Auto` uses the exact distribution.
pub const EXACT_MAX_TOTAL: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StdDivisor {
    /// Divide by N.
    #[default]
    Population,
    /// Divide by N - 1.
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Descriptive {
    pub mean: f64,
    pub std: f64,
    pub median: f64,
    pub count: usize,
}

pub fn describe(values: &[f64], divisor: StdDivisor) -> Result<Descriptive> {
    if values.is_empty() {
        return Err(Error::EmptyInput("sample"));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    let std = match divisor {
        StdDivisor::Population => (ss / n as f64).sqrt(),
        StdDivisor::Sample if n > 1 => (ss / (n - 1) as f64).sqrt(),
        StdDivisor::Sample => 0.0,
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    Ok(Descriptive {
        mean,
        std,
        median,
        count: n,
    })
}

// ---------------------------------------------------------------------------
// Mann-Whitney U
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MwuMethod {
    /// Exact for small untied samples, normal approximation otherwise.
    #[default]
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// U statistic of the first sample: rank sum minus `n_x (n_x + 1) / 2`.
    pub u: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub method: MwuMethod,
}

/// Midranks (1-based) of the pooled sample and the tie groups' sizes.
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

/// Number of arrangements giving each value of U, for untied samples.
fn u_distribution(nx: usize, ny: usize) -> Vec<f64> {
    // counts[a][b] is the distribution for sample sizes a and b
    let max_u = nx * ny;
    let mut prev: Vec<Vec<f64>> = (0..=ny).map(|_| vec![1.0]).collect();
    for a in 1..=nx {
        let mut cur: Vec<Vec<f64>> = Vec::with_capacity(ny + 1);
        cur.push(vec![1.0]);
        for b in 1..=ny {
            let mut dist = vec![0.0; a * b + 1];
            // the largest pooled value belongs to x (adds b to U) or to y
            for (u, c) in prev[b].iter().enumerate() {
                dist[u + b] += c;
            }
            for (u, c) in cur[b - 1].iter().enumerate() {
                dist[u] += c;
            }
            cur.push(dist);
        }
        prev = cur;
    }
    let dist = prev.swap_remove(ny);
    debug_assert_eq!(dist.len(), max_u + 1);
    dist
}

pub fn mann_whitney_u(x: &[f64], y: &[f64]) -> Result<MannWhitney> {
    mann_whitney_u_with(x, y, MwuMethod::Auto)
}

pub fn mann_whitney_u_with(x: &[f64], y: &[f64], method: MwuMethod) -> Result<MannWhitney> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput("Mann-Whitney sample"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("Mann-Whitney samples must be finite".into()));
    }
    let (nx, ny) = (x.len(), y.len());
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let rank_sum: f64 = ranks[..nx].iter().sum();
    let u = rank_sum - (nx * (nx + 1)) as f64 / 2.0;

    if pooled.iter().all(|&v| v == pooled[0]) {
        return Ok(MannWhitney { u, p: 1.0, method });
    }

    let method = match method {
        MwuMethod::Auto if ties.is_empty() && nx + ny <= EXACT_MAX_TOTAL => MwuMethod::Exact,
        MwuMethod::Auto => MwuMethod::Normal,
        MwuMethod::Exact if !ties.is_empty() => {
            return Err(Error::InvalidConfig(
                "exact Mann-Whitney requires untied samples".into(),
            ))
        }
        m => m,
    };

    let p = match method {
        MwuMethod::Exact => {
            let dist = u_distribution(nx, ny);
            let total: f64 = dist.iter().sum();
            let k = u.round() as usize;
            let lower: f64 = dist[..=k].iter().sum::<f64>() / total;
            let upper: f64 = dist[k..].iter().sum::<f64>() / total;
            (2.0 * lower.min(upper)).min(1.0)
        }
        _ => {
            let (fx, fy) = (nx as f64, ny as f64);
            let n = fx + fy;
            let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
            let var = fx * fy / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
            if var <= 0.0 {
                1.0
            } else {
                let z = ((u - fx * fy / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
                erfc(z / std::f64::consts::SQRT_2).min(1.0)
            }
        }
    };
    Ok(MannWhitney { u, p, method })
}

// ---------------------------------------------------------------------------
// Corpus summaries
// ---------------------------------------------------------------------------

/// Utterance-level measures summarized per corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    DurationS,
    PhonemesPerUtterance,
    Spr,
    MuF0,
    SigmaF0,
    Hqer,
    Cslope,
    Ccentroid,
    Croll95,
}

impl Measure {
    pub const ALL: [Measure; 9] = [
        Measure::DurationS,
        Measure::PhonemesPerUtterance,
        Measure::Spr,
        Measure::MuF0,
        Measure::SigmaF0,
        Measure::Hqer,
        Measure::Cslope,
        Measure::Ccentroid,
        Measure::Croll95,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Measure::DurationS => "duration_s",
            Measure::PhonemesPerUtterance => "phonemes_per_utterance",
            Measure::Spr => "spr",
            Measure::MuF0 => "mu_f0",
            Measure::SigmaF0 => "sigma_f0",
            Measure::Hqer => "hqer",
            Measure::Cslope => "cslope",
            Measure::Ccentroid => "ccentroid",
            Measure::Croll95 => "croll95",
        }
    }

    /// Row label in corpus tables.
    pub fn label(self) -> &'static str {
        match self {
            Measure::DurationS => "Utterance duration [s]",
            Measure::PhonemesPerUtterance => "Phonemes per utterance",
            Measure::Spr => "Speaking rate (SPR) [tokens/s]",
            Measure::MuF0 => "Mean pitch mu(f0) [Hz]",
            Measure::SigmaF0 => "Pitch standard deviation sigma(f0) [Hz]",
            Measure::Hqer => "HQER [%]",
            Measure::Cslope => "CSlope [dB/bin]",
            Measure::Ccentroid => "CCentroid [bin]",
            Measure::Croll95 => "CRoll95 [bin]",
        }
    }

    fn index(self) -> usize {
        Measure::ALL.iter().position(|&m| m == self).expect("listed")
    }
}

/// One utterance's measures; HQER is stored in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceRecord {
    pub id: String,
    values: [Option<f64>; 9],
}

impl UtteranceRecord {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            values: [None; 9],
        }
    }

    pub fn from_bundle(id: impl Into<String>, bundle: &UtteranceBundle) -> Self {
        let mut r = Self::new(id);
        r.set(Measure::DurationS, Some(bundle.duration_s));
        r.set(Measure::PhonemesPerUtterance, bundle.token_count.map(f64::from));
        r.set(Measure::Spr, bundle.speaking_rate());
        let f0 = bundle.pitch.as_ref().and_then(|p| p.voiced_stats());
        r.set(Measure::MuF0, f0.map(|s| s.0));
        r.set(Measure::SigmaF0, f0.map(|s| s.1));
        if let Some(m) = bundle.metrics {
            r.set(Measure::Hqer, Some(100.0 * m.hqer));
            r.set(Measure::Cslope, Some(m.cslope));
            r.set(Measure::Ccentroid, Some(m.ccentroid));
            r.set(Measure::Croll95, Some(m.croll95));
        }
        r
    }

    pub fn get(&self, m: Measure) -> Option<f64> {
        self.values[m.index()]
    }

    pub fn set(&mut self, m: Measure, v: Option<f64>) {
        self.values[m.index()] = v.filter(|x| x.is_finite());
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub n_utterances: usize,
    /// Per measure; `None` when no utterance provides it.
    pub measures: Vec<(Measure, Option<Descriptive>)>,
}

impl CorpusSummary {
    pub fn get(&self, m: Measure) -> Option<&Descriptive> {
        self.measures
            .iter()
            .find(|(k, _)| *k == m)
            .and_then(|(_, d)| d.as_ref())
    }
}

pub fn measure_values(records: &[UtteranceRecord], m: Measure) -> Vec<f64> {
    records.iter().filter_map(|r| r.get(m)).collect()
}

pub fn summarize(records: &[UtteranceRecord], divisor: StdDivisor) -> Result<CorpusSummary> {
    if records.is_empty() {
        return Err(Error::EmptyInput("corpus"));
    }
    let measures = Measure::ALL
        .iter()
        .map(|&m| {
            let values = measure_values(records, m);
            (m, describe(&values, divisor).ok())
        })
        .collect();
    Ok(CorpusSummary {
        n_utterances: records.len(),
        measures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub measure: Measure,
    pub a: Descriptive,
    pub b: Descriptive,
    pub test: MannWhitney,
}

/// Table-style comparison of two corpora. Measures absent from either corpus
/// are returned separately instead of as rows.
pub fn compare_corpora(
    a: &[UtteranceRecord],
    b: &[UtteranceRecord],
    divisor: StdDivisor,
) -> Result<(Vec<ComparisonRow>, Vec<Measure>)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("corpus"));
    }
    let mut rows = Vec::new();
    let mut omitted = Vec::new();
    for m in Measure::ALL {
        let (va, vb) = (measure_values(a, m), measure_values(b, m));
        if va.is_empty() || vb.is_empty() {
            omitted.push(m);
            continue;
        }
        rows.push(ComparisonRow {
            measure: m,
            a: describe(&va, divisor)?,
            b: describe(&vb, divisor)?,
            test: mann_whitney_u(&va, &vb)?,
        });
    }
    Ok((rows, omitted))
}
