//! Plain-text dataset loading with seeded sampling, and the results
//! table read/written by the experiment harness.
//!
//! Input formats are line-oriented: `Vectors` holds whitespace-separated
//! reals, `Strings` one byte string per line, `Sets` whitespace-separated
//! tokens interned to integer ids in first-occurrence order, `Sequences`
//! one fixed-length symbol string per line.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric::{MetricKind, MetricSpace, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Vectors,
    Strings,
    Sets,
    Sequences,
}

impl DataFormat {
    pub fn compatible_with(self, metric: MetricKind) -> bool {
        matches!(
            (self, metric),
            (DataFormat::Vectors, MetricKind::Euclidean)
                | (DataFormat::Vectors, MetricKind::ChebyshevLinf)
                | (DataFormat::Strings, MetricKind::Levenshtein)
                | (DataFormat::Sets, MetricKind::Jaccard)
                | (DataFormat::Sequences, MetricKind::Hamming)
        )
    }
}

impl std::str::FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vectors" => Ok(DataFormat::Vectors),
            "strings" => Ok(DataFormat::Strings),
            "sets" => Ok(DataFormat::Sets),
            "sequences" => Ok(DataFormat::Sequences),
            other => Err(Error::Argument(format!("unknown format '{other}'"))),
        }
    }
}

/// Where and how to load a dataset, and how to sample it.
#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub format: DataFormat,
    pub metric: MetricKind,
    /// Uniform sample without replacement; all rows when absent.
    pub sample_size: Option<usize>,
    pub seed: u64,
}

/// Loads and samples a dataset. Rows are shuffled by a ChaCha8 stream
/// seeded from the spec, then truncated to the sample size, so identical
/// specs produce identical spaces. No distances are evaluated.
pub fn load_dataset(spec: &DatasetSpec) -> Result<MetricSpace> {
    if !spec.format.compatible_with(spec.metric) {
        return Err(Error::Config(format!(
            "format {:?} is incompatible with metric {}",
            spec.format, spec.metric
        )));
    }
    let file = std::fs::File::open(&spec.path)?;
    let reader = BufReader::new(file);
    let mut points = Vec::new();
    let mut interner: HashMap<String, u32> = HashMap::new();
    let mut seq_len: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let err = |msg: String| Error::Parse {
            path: spec.path.clone(),
            line: idx + 1,
            msg,
        };
        let point = match spec.format {
            DataFormat::Vectors => {
                let coords: Vec<f64> = line
                    .split_whitespace()
                    .map(|t| t.parse::<f64>().map_err(|e| err(format!("bad real '{t}': {e}"))))
                    .collect::<Result<_>>()?;
                if coords.is_empty() {
                    return Err(err("empty vector row".into()));
                }
                Point::DenseVector(coords)
            }
            DataFormat::Strings => Point::Text(line.into_bytes()),
            DataFormat::Sets => {
                let mut ids: Vec<u32> = line
                    .split_whitespace()
                    .map(|tok| {
                        let next = interner.len() as u32;
                        *interner.entry(tok.to_owned()).or_insert(next)
                    })
                    .collect();
                ids.sort_unstable();
                ids.dedup();
                Point::TokenSet(ids)
            }
            DataFormat::Sequences => {
                let bytes = line.into_bytes();
                match seq_len {
                    None => seq_len = Some(bytes.len()),
                    Some(l) if l != bytes.len() => {
                        return Err(err(format!(
                            "sequence length {} differs from {l}",
                            bytes.len()
                        )));
                    }
                    _ => {}
                }
                Point::Sequence(bytes)
            }
        };
        points.push(point);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    points.shuffle(&mut rng);
    if let Some(k) = spec.sample_size {
        if k > points.len() {
            return Err(Error::Argument(format!(
                "sample_size {k} exceeds {} rows in {}",
                points.len(),
                spec.path.display()
            )));
        }
        points.truncate(k);
    }
    MetricSpace::new(points, spec.metric)
}

/// Writes points back out in a loader-compatible format.
pub fn write_points(points: &[Point], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    for p in points {
        match p {
            Point::DenseVector(v) => {
                let row: Vec<String> = v.iter().map(f64::to_string).collect();
                writeln!(out, "{}", row.join(" "))?;
            }
            Point::TokenSet(t) => {
                let row: Vec<String> = t.iter().map(u32::to_string).collect();
                writeln!(out, "{}", row.join(" "))?;
            }
            Point::Text(b) | Point::Sequence(b) => {
                out.write_all(b)?;
                out.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

/// One line of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub algorithm: String,
    pub b: usize,
    pub tree_weight: f64,
    pub forest_weight: f64,
    pub opt_weight: Option<f64>,
    pub alpha: f64,
    pub cost_ratio: Option<f64>,
    pub completion_ratio: Option<f64>,
    pub distance_calls: u64,
    pub elapsed_ms: f64,
    pub seed: u64,
}

pub const RESULTS_HEADER: &str = "algorithm,b,tree_weight,forest_weight,opt_weight,alpha,\
cost_ratio,completion_ratio,distance_calls,elapsed_ms,seed";

/// Floats are written with 12 significant digits; reading them back
/// reproduces the written value at that precision.
fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

impl ResultRow {
    /// The row in its canonical CSV form (no trailing newline).
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.algorithm,
            self.b,
            fmt_float(self.tree_weight),
            fmt_float(self.forest_weight),
            fmt_opt(self.opt_weight),
            fmt_float(self.alpha),
            fmt_opt(self.cost_ratio),
            fmt_opt(self.completion_ratio),
            self.distance_calls,
            fmt_float(self.elapsed_ms),
            self.seed
        )
    }

    fn parse_line(line: &str, path: &Path, lineno: usize) -> Result<Self> {
        let err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno,
            msg,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(err(format!("expected 11 fields, got {}", fields.len())));
        }
        let req = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .map_err(|e| err(format!("bad float '{}': {e}", fields[i])))
        };
        let opt = |i: usize| -> Result<Option<f64>> {
            if fields[i].is_empty() {
                Ok(None)
            } else {
                req(i).map(Some)
            }
        };
        Ok(ResultRow {
            algorithm: fields[0].to_owned(),
            b: fields[1]
                .parse()
                .map_err(|e| err(format!("bad budget: {e}")))?,
            tree_weight: req(2)?,
            forest_weight: req(3)?,
            opt_weight: opt(4)?,
            alpha: req(5)?,
            cost_ratio: opt(6)?,
            completion_ratio: opt(7)?,
            distance_calls: fields[8]
                .parse()
                .map_err(|e| err(format!("bad count: {e}")))?,
            elapsed_ms: req(9)?,
            seed: fields[10]
                .parse()
                .map_err(|e| err(format!("bad seed: {e}")))?,
        })
    }
}

/// Writes the fixed header and one line per row, preserving order.
pub fn write_results(rows: &[ResultRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "{RESULTS_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.csv_line())?;
    }
    Ok(())
}

/// Appends rows, writing the header first if the file is new or empty.
pub fn append_results(rows: &[ResultRow], path: &Path) -> Result<()> {
    let need_header = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    let mut out = std::io::BufWriter::new(file);
    if need_header {
        writeln!(out, "{RESULTS_HEADER}")?;
    }
    for row in rows {
        writeln!(out, "{}", row.csv_line())?;
    }
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let file = std::fs::File::open(path)?;
    let mut rows = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if idx == 0 {
            if line != RESULTS_HEADER {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: 1,
                    msg: "unexpected header".into(),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        rows.push(ResultRow::parse_line(&line, path, idx + 1)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        use std::io::Write as _;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn spec(path: &Path, format: DataFormat, metric: MetricKind, seed: u64) -> DatasetSpec {
        DatasetSpec {
            path: path.to_path_buf(),
            format,
            metric,
            sample_size: None,
            seed,
        }
    }

    #[test]
    fn vectors_file_loads_and_measures() {
        let f = write_tmp("0 0\n3 4\n");
        let s = load_dataset(&spec(f.path(), DataFormat::Vectors, MetricKind::Euclidean, 1))
            .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.distance(0, 1), 5.0);
    }

    #[test]
    fn loading_counts_no_distance_queries() {
        let f = write_tmp("1 2\n3 4\n5 6\n");
        let s = load_dataset(&spec(f.path(), DataFormat::Vectors, MetricKind::Euclidean, 2))
            .unwrap();
        assert_eq!(s.distance_calls(), 0);
    }

    #[test]
    fn seeds_permute_the_same_multiset() {
        let names = "ada\nbob\ncleo\ndara\neli\nfrida\ngus\nhana\nian\njune\n";
        let f = write_tmp(names);
        let load = |seed| {
            let spec = DatasetSpec {
                sample_size: Some(10),
                ..spec(f.path(), DataFormat::Strings, MetricKind::Levenshtein, seed)
            };
            let space = load_dataset(&spec).unwrap();
            space.points().to_vec()
        };
        let a = load(1);
        let b = load(2);
        assert_ne!(a, b, "two seeds gave the same order");
        let mut sa = a.clone();
        let mut sb = b.clone();
        let key = |p: &Point| match p {
            Point::Text(t) => t.clone(),
            _ => unreachable!(),
        };
        sa.sort_by_key(key);
        sb.sort_by_key(key);
        assert_eq!(sa, sb, "multisets differ");
    }

    #[test]
    fn identical_specs_reproduce_identical_contents() {
        let f = write_tmp("a b c\nb c\nc d e f\n");
        let sp = spec(f.path(), DataFormat::Sets, MetricKind::Jaccard, 7);
        let one = load_dataset(&sp).unwrap();
        let two = load_dataset(&sp).unwrap();
        assert_eq!(one.points(), two.points());
    }

    #[test]
    fn sets_are_interned_and_canonical() {
        let f = write_tmp("a b\nb c\n");
        let sp = DatasetSpec {
            // Identity order so rows stay put.
            seed: 0,
            sample_size: None,
            ..spec(f.path(), DataFormat::Sets, MetricKind::Jaccard, 0)
        };
        let s = load_dataset(&sp).unwrap();
        // Hand-interned: a=0, b=1, c=2 -> {0,1} vs {1,2}, one shared of three.
        let mut rows: Vec<Vec<u32>> = s
            .points()
            .iter()
            .map(|p| match p {
                Point::TokenSet(t) => t.clone(),
                _ => unreachable!(),
            })
            .collect();
        rows.sort();
        assert_eq!(rows, vec![vec![0, 1], vec![1, 2]]);
        let d = s.distance(0, 1);
        assert!((d - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sample_size_larger_than_file_errors() {
        let f = write_tmp("1\n2\n");
        let sp = DatasetSpec {
            sample_size: Some(3),
            ..spec(f.path(), DataFormat::Vectors, MetricKind::Euclidean, 0)
        };
        assert!(load_dataset(&sp).is_err());
    }

    #[test]
    fn sequence_length_mismatch_names_the_line() {
        let f = write_tmp("abc\nabcd\n");
        let err = load_dataset(&spec(f.path(), DataFormat::Sequences, MetricKind::Hamming, 0));
        match err {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn incompatible_format_metric_pair_is_rejected() {
        let f = write_tmp("abc\n");
        let err = load_dataset(&spec(f.path(), DataFormat::Strings, MetricKind::Euclidean, 0));
        assert!(matches!(err, Err(Error::Config(_))));
    }

    fn sample_row() -> ResultRow {
        ResultRow {
            algorithm: "dp".into(),
            b: 12,
            tree_weight: 1.2345678901234,
            forest_weight: 0.5,
            opt_weight: Some(1.2),
            alpha: 1.01,
            cost_ratio: Some(1.004),
            completion_ratio: None,
            distance_calls: 98765,
            elapsed_ms: 12.5,
            seed: 3,
        }
    }

    #[test]
    fn empty_rows_give_header_only_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_results(&[], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, format!("{RESULTS_HEADER}\n"));
    }

    #[test]
    fn rows_round_trip_at_written_precision() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let rows = vec![sample_row()];
        write_results(&rows, &path).unwrap();
        let back = read_results(&path).unwrap();
        assert_eq!(back.len(), 1);
        // Re-serialize: the text form must be reproduced exactly.
        write_results(&back, &path).unwrap();
        let again = read_results(&path).unwrap();
        assert_eq!(back, again);
        assert!((back[0].tree_weight - rows[0].tree_weight).abs() < 1e-11);
        assert_eq!(back[0].completion_ratio, None);
    }

    #[test]
    fn rows_preserve_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let mut rows = Vec::new();
        for i in 0..3 {
            let mut r = sample_row();
            r.seed = i;
            rows.push(r);
        }
        write_results(&rows, &path).unwrap();
        let back = read_results(&path).unwrap();
        let seeds: Vec<u64> = back.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![0, 1, 2]);
    }

    #[test]
    fn append_adds_header_once() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        append_results(&[sample_row()], &path).unwrap();
        append_results(&[sample_row()], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.matches("algorithm").count(), 1);
        assert_eq!(read_results(&path).unwrap().len(), 2);
    }
}
