//! Dynamic time warping with steps (1,0), (0,1), (1,1) and an optional
//! Sakoe-Chiba style band around the (length-scaled) diagonal.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Row-major view of a sequence of equally sized feature vectors.
#[derive(Debug, Clone, Copy)]
pub struct FeatureSeq<'a> {
    data: &'a [f64],
    dim: usize,
}

impl<'a> FeatureSeq<'a> {
    pub fn new(data: &'a [f64], dim: usize) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidConfig(format!(
                "{} values do not form frames of dimension {dim}",
                data.len()
            )));
        }
        Ok(Self { data, dim })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frame(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameDistance {
    /// `1 - cos(a, b)`; two zero vectors are at distance 0, one zero vector at 1.
    Cosine,
    /// Euclidean distance.
    L2,
}

impl FrameDistance {
    pub fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            FrameDistance::L2 => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
            FrameDistance::Cosine => {
                let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
                for (x, y) in a.iter().zip(b) {
                    dot += x * y;
                    na += x * x;
                    nb += y * y;
                }
                match (na > 0.0, nb > 0.0) {
                    (false, false) => 0.0,
                    (true, true) => (1.0 - dot / (na.sqrt() * nb.sqrt())).max(0.0),
                    _ => 1.0,
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DtwConfig {
    /// Half-width of the admissible band around the diagonal, in frames.
    pub band: Option<usize>,
}

/// Monotone warping path from `(0, 0)` to `(n-1, m-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DtwPath(Vec<(usize, usize)>);

impl DtwPath {
    /// Checks the path invariants before wrapping the pairs.
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        let first = *pairs.first().ok_or(Error::EmptyInput("warping path"))?;
        if first != (0, 0) {
            return Err(Error::InvalidConfig("path must start at (0, 0)".into()));
        }
        for w in pairs.windows(2) {
            let step = (w[1].0.wrapping_sub(w[0].0), w[1].1.wrapping_sub(w[0].1));
            if !matches!(step, (1, 0) | (0, 1) | (1, 1)) {
                return Err(Error::InvalidConfig(format!("illegal step {:?} -> {:?}", w[0], w[1])));
            }
        }
        Ok(Self(pairs))
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_diagonal(&self) -> bool {
        self.0.iter().all(|&(i, j)| i == j)
    }
}

#[derive(Debug, Clone)]
pub struct Alignment {
    pub path: DtwPath,
    /// Sum of frame distances along the path.
    pub cost: f64,
}

/// Admissible column range `[lo, hi]` for every row.
fn band_limits(n: usize, m: usize, band: Option<usize>) -> Vec<(usize, usize)> {
    let Some(band) = band else {
        return vec![(0, m - 1); n];
    };
    if n == 1 {
        return vec![(0, m - 1)];
    }
    let slope = (m - 1) as f64 / (n - 1) as f64;
    let centre = |i: usize| i as f64 * slope;
    let r = band as f64;
    (0..n)
        .map(|i| {
            let lo = (centre(i) - r).floor().max(0.0) as usize;
            let hi = if i + 1 == n {
                m - 1
            } else {
                let own = (centre(i) + r).ceil();
                // a diagonal step must reach the start of the next row
                let next = (centre(i + 1) - r).floor() - 1.0;
                (own.max(next) as usize).min(m - 1)
            };
            (lo.min(hi), hi)
        })
        .collect()
}

pub fn dtw_align(a: FeatureSeq<'_>, b: FeatureSeq<'_>, distance: FrameDistance, cfg: &DtwConfig) -> Result<Alignment> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("DTW sequence"));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let (n, m) = (a.len(), b.len());
    let limits = band_limits(n, m, cfg.band);
    let mut acc = vec![f64::INFINITY; n * m];
    // 0 = diagonal, 1 = from (i-1, j), 2 = from (i, j-1)
    let mut step = vec![0u8; n * m];
    for (i, &(lo, hi)) in limits.iter().enumerate() {
        for j in lo..=hi {
            let d = distance.eval(a.frame(i), b.frame(j));
            let idx = i * m + j;
            if i == 0 && j == 0 {
                acc[idx] = d;
                continue;
            }
            let diag = if i > 0 && j > 0 {
                acc[idx - m - 1]
            } else {
                f64::INFINITY
            };
            let up = if i > 0 { acc[idx - m] } else { f64::INFINITY };
            let left = if j > 0 { acc[idx - 1] } else { f64::INFINITY };
            let (best, dir) = if diag <= up && diag <= left {
                (diag, 0)
            } else if up <= left {
                (up, 1)
            } else {
                (left, 2)
            };
            acc[idx] = best + d;
            step[idx] = dir;
        }
    }
    let cost = acc[n * m - 1];
    if !cost.is_finite() {
        return Err(Error::InvalidConfig("no admissible path within band".into()));
    }
    let mut pairs = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n - 1, m - 1);
    pairs.push((i, j));
    while (i, j) != (0, 0) {
        match step[i * m + j] {
            0 => {
                i -= 1;
                j -= 1;
            }
            1 => i -= 1,
            _ => j -= 1,
        }
        pairs.push((i, j));
    }
    pairs.reverse();
    Ok(Alignment {
        path: DtwPath(pairs),
        cost,
    })
}
