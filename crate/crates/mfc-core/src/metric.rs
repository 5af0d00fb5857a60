//! Point representations, the five supported metrics, and the counted
//! distance oracle used by every algorithm in this crate.
//!
//! A [`MetricSpace`] owns its points and is immutable after construction
//! except for an atomic query counter that records every distance
//! evaluation. All algorithmic cost accounting in this crate is expressed
//! in terms of that counter.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// A single data point. All points in one [`MetricSpace`] use the same
/// variant.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    /// Real vector; all vectors in a space share one dimension.
    DenseVector(Vec<f64>),
    /// Set of interned token ids, strictly increasing (canonical form).
    TokenSet(Vec<u32>),
    /// Arbitrary byte string, compared byte-wise.
    Text(Vec<u8>),
    /// Fixed-length symbol array; all sequences in a space share one length.
    Sequence(Vec<u8>),
}

impl Point {
    fn variant_name(&self) -> &'static str {
        match self {
            Point::DenseVector(_) => "DenseVector",
            Point::TokenSet(_) => "TokenSet",
            Point::Text(_) => "Text",
            Point::Sequence(_) => "Sequence",
        }
    }
}

/// The supported distance functions. Each is a true metric on its
/// compatible [`Point`] variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Euclidean,
    Hamming,
    Jaccard,
    Levenshtein,
    /// l-infinity norm on dense vectors.
    ChebyshevLinf,
}

impl MetricKind {
    /// The point variant this metric is defined on.
    pub fn compatible_variant(self) -> &'static str {
        match self {
            MetricKind::Euclidean | MetricKind::ChebyshevLinf => "DenseVector",
            MetricKind::Hamming => "Sequence",
            MetricKind::Jaccard => "TokenSet",
            MetricKind::Levenshtein => "Text",
        }
    }

    fn accepts(self, p: &Point) -> bool {
        matches!(
            (self, p),
            (MetricKind::Euclidean, Point::DenseVector(_))
                | (MetricKind::ChebyshevLinf, Point::DenseVector(_))
                | (MetricKind::Hamming, Point::Sequence(_))
                | (MetricKind::Jaccard, Point::TokenSet(_))
                | (MetricKind::Levenshtein, Point::Text(_))
        )
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::Hamming => "hamming",
            MetricKind::Jaccard => "jaccard",
            MetricKind::Levenshtein => "levenshtein",
            MetricKind::ChebyshevLinf => "chebyshev",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(MetricKind::Euclidean),
            "hamming" => Ok(MetricKind::Hamming),
            "jaccard" => Ok(MetricKind::Jaccard),
            "levenshtein" => Ok(MetricKind::Levenshtein),
            "chebyshev" | "linf" => Ok(MetricKind::ChebyshevLinf),
            other => Err(Error::Argument(format!("unknown metric '{other}'"))),
        }
    }
}

/// A finite metric space: points, a metric, and a monotone counter of
/// distance evaluations.
///
/// Distance evaluation is pure; the counter is an atomic aggregate, so
/// concurrent evaluations from worker threads are fine and the final
/// count always equals the number of evaluations.
#[derive(Debug)]
pub struct MetricSpace {
    points: Vec<Point>,
    metric: MetricKind,
    queries: AtomicU64,
}

impl MetricSpace {
    /// Validates point/metric compatibility and the per-variant structural
    /// invariants. Incompatibility is an error here, never at query time.
    pub fn new(points: Vec<Point>, metric: MetricKind) -> Result<Self> {
        let mut dense_dim: Option<usize> = None;
        let mut seq_len: Option<usize> = None;
        for (i, p) in points.iter().enumerate() {
            if !metric.accepts(p) {
                return Err(Error::Config(format!(
                    "point {i} is {} but metric {metric} requires {}",
                    p.variant_name(),
                    metric.compatible_variant()
                )));
            }
            match p {
                Point::DenseVector(v) => match dense_dim {
                    None => dense_dim = Some(v.len()),
                    Some(d) if d != v.len() => {
                        return Err(Error::Config(format!(
                            "point {i} has dimension {} but the space has dimension {d}",
                            v.len()
                        )));
                    }
                    _ => {}
                },
                Point::Sequence(s) => match seq_len {
                    None => seq_len = Some(s.len()),
                    Some(l) if l != s.len() => {
                        return Err(Error::Config(format!(
                            "sequence {i} has length {} but the space has length {l}",
                            s.len()
                        )));
                    }
                    _ => {}
                },
                Point::TokenSet(t) => {
                    if t.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(Error::Config(format!(
                            "token set {i} is not strictly increasing"
                        )));
                    }
                }
                Point::Text(_) => {}
            }
        }
        Ok(MetricSpace {
            points,
            metric,
            queries: AtomicU64::new(0),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Number of distance evaluations performed so far. Monotone
    /// non-decreasing; increments by exactly one per evaluation.
    pub fn distance_calls(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    /// Distance between points `i` and `j`. Counts one query.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.queries.fetch_add(1, Ordering::Relaxed);
        eval(self.metric, &self.points[i], &self.points[j])
    }

    /// Minimum distance between the disjoint index sets `a` and `b`
    /// (the bichromatic closest pair), with a witness pair attaining it.
    ///
    /// Evaluates all `|a| * |b|` pairs; ties are broken toward the
    /// lexicographically smallest `(a, b)` index pair.
    pub fn set_distance(&self, a: &[usize], b: &[usize]) -> Result<(f64, (usize, usize))> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::Argument("set_distance on an empty set".into()));
        }
        if a.iter().any(|x| b.contains(x)) {
            return Err(Error::Argument("set_distance sets must be disjoint".into()));
        }
        let mut best = f64::INFINITY;
        let mut witness = (usize::MAX, usize::MAX);
        for &i in a {
            for &j in b {
                let d = self.distance(i, j);
                if d < best || (d == best && (i, j) < witness) {
                    best = d;
                    witness = (i, j);
                }
            }
        }
        Ok((best, witness))
    }
}

fn eval(metric: MetricKind, x: &Point, y: &Point) -> f64 {
    match (metric, x, y) {
        (MetricKind::Euclidean, Point::DenseVector(a), Point::DenseVector(b)) => euclidean(a, b),
        (MetricKind::ChebyshevLinf, Point::DenseVector(a), Point::DenseVector(b)) => {
            chebyshev(a, b)
        }
        (MetricKind::Hamming, Point::Sequence(a), Point::Sequence(b)) => hamming(a, b),
        (MetricKind::Jaccard, Point::TokenSet(a), Point::TokenSet(b)) => jaccard(a, b),
        (MetricKind::Levenshtein, Point::Text(a), Point::Text(b)) => levenshtein(a, b) as f64,
        // Construction validated compatibility.
        _ => unreachable!("incompatible point variant reached query time"),
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn chebyshev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn hamming(a: &[u8], b: &[u8]) -> f64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as f64
}

/// Jaccard distance `1 - |A n B| / |A u B|` on sorted token lists.
/// Two empty sets are identical points, so their distance is 0.
fn jaccard(a: &[u32], b: &[u32]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let mut inter = 0usize;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    1.0 - inter as f64 / union as f64
}

/// Edit distance with two rolling rows. Integer-exact; returned as u64
/// and widened to f64 by the caller (exact below 2^53).
fn levenshtein(a: &[u8], b: &[u8]) -> u64 {
    if a.is_empty() {
        return b.len() as u64;
    }
    if b.is_empty() {
        return a.len() as u64;
    }
    let mut prev: Vec<u64> = (0..=b.len() as u64).collect();
    let mut cur = vec![0u64; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i as u64 + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + u64::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
