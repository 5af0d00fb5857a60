//! Command-line driver: build initial forests, complete them under a
//! representative budget, sweep budgets over seeds and variants, verify
//! the oracle suites, and emit reference instances.

mod pipeline;
mod verify;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use mfc_core::analysis::{brute_force_full_mst, tight_instance};
use mfc_core::dataset::{
    append_results, load_dataset, write_points, write_results, DataFormat, DatasetSpec, ResultRow,
    RESULTS_HEADER,
};
use mfc_core::forest::{build_initial_forest, truncated_kruskal_forest, InitialForest};
use mfc_core::metric::{MetricKind, MetricSpace};
use mfc_core::solver::{multirep_mfc, CompletionResult};
use mfc_core::synth;

use pipeline::{opt_row, row_from_run, run_opt, run_variant, Variant};

#[derive(Parser)]
#[command(
    name = "mfc",
    about = "Approximate metric minimum spanning trees by completing an initial forest",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an initial forest and write it to a file.
    Forest(ForestArgs),
    /// Complete a stored forest with one variant at one budget.
    Complete(CompleteArgs),
    /// Run the full experiment grid: seeds x variants x budgets.
    Sweep(SweepArgs),
    /// Run the oracle suites; exit code 0 means all passed.
    Verify,
    /// Emit the worst-case instance as a dataset (plus forest and reps).
    Tight(TightArgs),
    /// Brute-force MST of a dataset (quadratic; desk scale only).
    OracleMst(OracleArgs),
}

/// Dataset source shared by the subcommands: either a file with a
/// declared format and metric, or a built-in generator.
#[derive(Args, Clone)]
struct DataArgs {
    /// Line-oriented dataset file.
    #[arg(long)]
    data: Option<PathBuf>,
    /// File format: vectors | strings | sets | sequences.
    #[arg(long)]
    format: Option<String>,
    /// Metric: euclidean | hamming | jaccard | levenshtein | chebyshev.
    #[arg(long)]
    metric: Option<String>,
    /// Built-in generator instead of a file: vectors | strings | sets | sequences.
    #[arg(long)]
    synthetic: Option<String>,
    /// Number of generated points (required with --synthetic).
    #[arg(long)]
    n: Option<usize>,
    /// Vector dimension for the generator.
    #[arg(long, default_value_t = 8)]
    dim: usize,
    /// String/sequence length for the generators.
    #[arg(long, default_value_t = 12)]
    len: usize,
    /// Token universe size for the set generator.
    #[arg(long, default_value_t = 64)]
    universe: usize,
    /// Uniform sample size (file datasets).
    #[arg(long)]
    sample: Option<usize>,
    /// Sampling / generation seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl DataArgs {
    fn load(&self, seed: u64) -> Result<MetricSpace> {
        if let Some(kind) = &self.synthetic {
            let n = self
                .n
                .context("--synthetic needs --n, the number of points")?;
            let space = match kind.as_str() {
                "vectors" => {
                    let metric = match self.metric.as_deref() {
                        None | Some("euclidean") => MetricKind::Euclidean,
                        Some("chebyshev") | Some("linf") => MetricKind::ChebyshevLinf,
                        Some(other) => bail!("vectors cannot use metric '{other}'"),
                    };
                    MetricSpace::new(synth::uniform_vectors(n, self.dim, seed), metric)?
                }
                "strings" => MetricSpace::new(
                    synth::random_strings(n, 2, self.len, b"abcdefgh", seed),
                    MetricKind::Levenshtein,
                )?,
                "sets" => MetricSpace::new(
                    synth::random_token_sets(n, self.universe, 2, 10, seed),
                    MetricKind::Jaccard,
                )?,
                "sequences" => MetricSpace::new(
                    synth::random_sequences(n, self.len, b"acgt", seed),
                    MetricKind::Hamming,
                )?,
                other => bail!("unknown synthetic kind '{other}'"),
            };
            return Ok(space);
        }
        let path = self
            .data
            .clone()
            .context("either --data or --synthetic is required")?;
        let format = DataFormat::from_str(
            self.format
                .as_deref()
                .context("--data needs --format")?,
        )?;
        let metric = MetricKind::from_str(
            self.metric
                .as_deref()
                .context("--data needs --metric")?,
        )?;
        let spec = DatasetSpec {
            path,
            format,
            metric,
            sample_size: self.sample,
            seed,
        };
        Ok(load_dataset(&spec)?)
    }
}

#[derive(Args)]
struct ForestArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Number of components; defaults to floor(sqrt(n)).
    #[arg(long)]
    t: Option<usize>,
    /// kcenter (greedy partition + exact per-component MSTs) or kruskal
    /// (early-terminated over the full matrix; desk scale only).
    #[arg(long, default_value = "kcenter")]
    method: String,
    /// Also report the overlap quality against a full MST (quadratic;
    /// desk scale only).
    #[arg(long)]
    gamma: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompleteArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Forest file written by `mfc forest`.
    #[arg(long)]
    forest: PathBuf,
    /// dp | greedy | fixed.
    #[arg(long)]
    variant: String,
    /// Extra representatives beyond one per component.
    #[arg(long)]
    b: usize,
    /// Also run the optimal baseline and fill the ratio columns.
    #[arg(long)]
    run_opt: bool,
    /// Results file to append to.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the completed spanning tree (stats header plus one
    /// "u v w" line per edge).
    #[arg(long)]
    tree_out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    t: Option<usize>,
    /// Comma-separated budgets; defaults to 0,2t,4t,...,38t.
    #[arg(long)]
    budgets: Option<String>,
    /// Comma-separated subset of dp,greedy,fixed.
    #[arg(long)]
    variants: Option<String>,
    /// Comma-separated seeds; defaults to 1..=16.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    run_opt: bool,
    /// Worst-case-instance mode: "p,ell,eps" (ignores data and variants).
    #[arg(long)]
    tight: Option<String>,
    /// Optional key=value config file; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TightArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    ell: usize,
    #[arg(long)]
    eps: f64,
    /// Points file (vectors format; load with --metric chebyshev).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    forest_out: Option<PathBuf>,
    #[arg(long)]
    reps_out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Edge list output ("u v w" per line).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Forest(args) => cmd_forest(args),
        Command::Complete(args) => cmd_complete(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify => cmd_verify(),
        Command::Tight(args) => cmd_tight(args),
        Command::OracleMst(args) => cmd_oracle_mst(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn default_t(n: usize) -> usize {
    ((n as f64).sqrt().floor() as usize).max(1)
}

fn cmd_forest(args: ForestArgs) -> Result<()> {
    let space = args.data.load(args.data.seed)?;
    let n = space.len();
    if n == 0 {
        bail!("the dataset is empty");
    }
    let t = args.t.unwrap_or_else(|| default_t(n));
    let started = Instant::now();
    let forest = match args.method.as_str() {
        "kcenter" => build_initial_forest(&space, t, 0)?,
        "kruskal" => truncated_kruskal_forest(&space, t)?,
        other => bail!("unknown method '{other}' (expected kcenter or kruskal)"),
    };
    forest.save(&args.out)?;
    println!(
        "n={n} t={t} method={} forest_weight={} distance_calls={} elapsed_ms={:.3} out={}",
        args.method,
        forest.forest_weight,
        space.distance_calls(),
        started.elapsed().as_secs_f64() * 1e3,
        args.out.display()
    );
    if args.gamma {
        let overlap = mfc_core::forest::gamma_overlap(&space, &forest)?;
        if overlap.value.is_infinite() {
            eprintln!("warning: no MST edge stays inside a component; gamma is unbounded");
        }
        if overlap.weight_ties {
            eprintln!("warning: equal-weight edges encountered; the reference MST is not unique");
        }
        println!("gamma={}", overlap.value);
    }
    Ok(())
}

fn cmd_complete(args: CompleteArgs) -> Result<()> {
    let space = args.data.load(args.data.seed)?;
    let forest = InitialForest::load(&args.forest)?;
    if forest.n() != space.len() {
        bail!(
            "forest has {} points but the dataset has {} (same file and seed?)",
            forest.n(),
            space.len()
        );
    }
    let variant = Variant::from_str(&args.variant)?;
    let run = run_variant(&space, &forest, variant, args.b)?;
    if let Some(path) = &args.tree_out {
        let file = std::fs::File::create(path)?;
        run.completion.write_tree(&forest, std::io::BufWriter::new(file))?;
    }
    let opt = if args.run_opt {
        Some(run_opt(&space, &forest)?)
    } else {
        None
    };
    let row = row_from_run(variant.name(), args.b, args.data.seed, &run, opt.as_ref())?;
    let mut rows = vec![row];
    if let Some(opt) = &opt {
        rows.push(opt_row(args.data.seed, opt));
    }
    println!("{RESULTS_HEADER}");
    for row in &rows {
        println!("{}", row.csv_line());
    }
    if let Some(out) = &args.out {
        append_results(&rows, out)?;
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum CellKind {
    Variant(Variant, usize),
    Opt,
}

fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|e| anyhow::anyhow!("bad {what} entry '{s}': {e}"))
        })
        .collect()
}

/// key=value lines; '#' starts a comment. Flags win over the file.
fn read_config(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let mut map = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("config line {} is not key=value", idx + 1))?;
        map.insert(key.trim().to_owned(), value.trim().to_owned());
    }
    Ok(map)
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var("MFC_WORKERS") {
        let workers: usize = text
            .parse()
            .with_context(|| format!("MFC_WORKERS must be a positive integer, got '{text}'"))?;
        if workers == 0 {
            bail!("MFC_WORKERS must be positive");
        }
        builder = builder.num_threads(workers);
    }
    Ok(builder.build()?)
}

fn cmd_sweep(mut args: SweepArgs) -> Result<()> {
    if let Some(config) = args.config.clone() {
        let map = read_config(&config)?;
        if args.t.is_none() {
            if let Some(v) = map.get("t") {
                args.t = Some(v.parse().context("config t")?);
            }
        }
        if args.budgets.is_none() {
            args.budgets = map.get("budgets").cloned();
        }
        if args.variants.is_none() {
            args.variants = map.get("variants").cloned();
        }
        if args.seeds.is_none() {
            args.seeds = map.get("seeds").cloned();
        }
        if !args.run_opt {
            if let Some(v) = map.get("run_opt") {
                args.run_opt = v.parse().context("config run_opt")?;
            }
        }
    }

    if let Some(tight) = &args.tight {
        return sweep_tight(tight, &args.out);
    }

    let seeds: Vec<u64> = match &args.seeds {
        Some(text) => parse_list(text, "seed")?,
        None => (1..=16).collect(),
    };
    if seeds.is_empty() {
        bail!("no seeds given");
    }
    let variants: Vec<Variant> = match &args.variants {
        Some(text) => parse_list(text, "variant")?,
        None => Variant::ALL.to_vec(),
    };

    // Probe the dataset once to fix n and t for the whole sweep.
    let probe = args.data.load(seeds[0])?;
    let n = probe.len();
    if n == 0 {
        bail!("the dataset is empty");
    }
    let t = args.t.unwrap_or_else(|| default_t(n));
    if t == 0 || t > n {
        bail!("t = {t} out of range for n = {n}");
    }
    if args.run_opt && n > 3_000 {
        bail!("--run-opt is limited to n <= 3000 (the baseline is quadratic)");
    }
    drop(probe);

    let mut budgets: Vec<usize> = match &args.budgets {
        Some(text) => parse_list(text, "budget")?,
        None => (0..=19).map(|k| 2 * k * t).collect(),
    };
    let cap = n - t;
    if budgets.iter().any(|&b| b > cap) {
        eprintln!("notice: budgets above n - t = {cap} are clamped (all points become representatives)");
        for b in budgets.iter_mut() {
            *b = (*b).min(cap);
        }
    }
    budgets.dedup();

    // The optimal baseline is shared across every cell of a seed; run it
    // first so variant cells only read its weights.
    let pool = worker_pool()?;
    let opt_by_seed: HashMap<u64, CompletionResult> = if args.run_opt {
        let results: Vec<(u64, CompletionResult)> = pool.install(|| {
            seeds
                .par_iter()
                .map(|&seed| {
                    let space = args.data.load(seed)?;
                    let forest = build_initial_forest(&space, t, 0)?;
                    let opt = run_opt(&space, &forest)
                        .with_context(|| format!("cell seed={seed} algorithm=opt"))?;
                    Ok((seed, opt))
                })
                .collect::<Result<_>>()
        })?;
        results.into_iter().collect()
    } else {
        HashMap::new()
    };

    let mut jobs: Vec<(Variant, usize)> = Vec::new();
    for &variant in &variants {
        for &b in &budgets {
            if variant == Variant::Fixed && b % t != 0 {
                eprintln!(
                    "notice: fixed skips b = {b} (only budgets divisible by t = {t} apply)"
                );
                continue;
            }
            jobs.push((variant, b));
        }
    }
    let cells: Vec<(u64, CellKind)> = seeds
        .iter()
        .flat_map(|&seed| {
            jobs.iter()
                .map(move |&(variant, b)| (seed, CellKind::Variant(variant, b)))
        })
        .collect();

    let mut rows: Vec<(u64, CellKind, ResultRow)> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(seed, kind)| {
                let CellKind::Variant(variant, b) = kind else {
                    unreachable!()
                };
                // Each cell owns its space so query counters never mix.
                let space = args.data.load(seed)?;
                let forest = build_initial_forest(&space, t, 0)?;
                let run = run_variant(&space, &forest, variant, b).with_context(|| {
                    format!("cell seed={seed} variant={} b={b}", variant.name())
                })?;
                let row = row_from_run(variant.name(), b, seed, &run, opt_by_seed.get(&seed))?;
                Ok((seed, kind, row))
            })
            .collect::<Result<_>>()
    })?;
    for (&seed, opt) in &opt_by_seed {
        rows.push((seed, CellKind::Opt, opt_row(seed, opt)));
    }
    rows.sort_by(|a, b| (a.0, a.1, a.2.b).cmp(&(b.0, b.1, b.2.b)));
    let rows: Vec<ResultRow> = rows.into_iter().map(|(_, _, row)| row).collect();

    write_results(&rows, &args.out)?;
    let summary_path = summary_path(&args.out);
    write_summary(&rows, &summary_path)?;
    println!(
        "wrote {} rows to {} (summary: {})",
        rows.len(),
        args.out.display(),
        summary_path.display()
    );
    Ok(())
}

fn sweep_tight(spec: &str, out: &Path) -> Result<()> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 3 {
        bail!("--tight expects p,ell,eps");
    }
    let p: usize = parts[0].trim().parse().context("tight p")?;
    let ell: usize = parts[1].trim().parse().context("tight ell")?;
    let eps: f64 = parts[2].trim().parse().context("tight eps")?;
    let inst = tight_instance(p, ell, eps)?;

    let started = Instant::now();
    let before = inst.space.distance_calls();
    let completion = multirep_mfc(&inst.space, &inst.forest, &inst.reps)?;
    let alpha = mfc_core::analysis::alpha_bound(&inst.space, &inst.forest, &inst.reps)?.alpha;
    let run = pipeline::RunOutcome {
        completion,
        alpha,
        distance_calls: inst.space.distance_calls() - before,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    let opt = run_opt(&inst.space, &inst.forest)?;
    let row = row_from_run("tight", inst.reps.budget, 0, &run, Some(&opt))?;
    let ratio = row.cost_ratio.unwrap_or(f64::NAN);
    let rows = vec![row, opt_row(0, &opt)];
    write_results(&rows, out)?;
    write_summary(&rows, &summary_path(out))?;
    println!(
        "tight p={p} ell={ell} eps={eps}: ratio={ratio} predicted={} out={}",
        inst.predicted_ratio,
        out.display()
    );
    Ok(())
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".to_owned());
    out.with_file_name(format!("{stem}.summary.csv"))
}

/// Per-(algorithm, budget) means over seeds. Optional columns average
/// the present values and stay empty when none are present.
fn write_summary(rows: &[ResultRow], path: &Path) -> Result<()> {
    use std::io::Write as _;

    #[derive(Default)]
    struct Acc {
        runs: usize,
        tree: f64,
        alpha: f64,
        cost_ratio: (f64, usize),
        completion: (f64, usize),
        calls: f64,
        elapsed: f64,
    }

    let mut groups: Vec<(String, usize)> = Vec::new();
    let mut acc: HashMap<(String, usize), Acc> = HashMap::new();
    for row in rows {
        let key = (row.algorithm.clone(), row.b);
        if !acc.contains_key(&key) {
            groups.push(key.clone());
        }
        let entry = acc.entry(key).or_default();
        entry.runs += 1;
        entry.tree += row.tree_weight;
        entry.alpha += row.alpha;
        if let Some(cr) = row.cost_ratio {
            entry.cost_ratio.0 += cr;
            entry.cost_ratio.1 += 1;
        }
        if let Some(comp) = row.completion_ratio {
            entry.completion.0 += comp;
            entry.completion.1 += 1;
        }
        entry.calls += row.distance_calls as f64;
        entry.elapsed += row.elapsed_ms;
    }
    groups.sort();

    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(
        out,
        "algorithm,b,runs,mean_tree_weight,mean_alpha,mean_epsilon_alpha,mean_cost_ratio,\
mean_epsilon,mean_completion_ratio,mean_distance_calls,mean_elapsed_ms"
    )?;
    let fmt = |x: f64| format!("{x:.11e}");
    let fmt_opt = |(sum, count): (f64, usize), shift: f64| {
        if count == 0 {
            String::new()
        } else {
            fmt(sum / count as f64 - shift)
        }
    };
    for key in groups {
        let a = &acc[&key];
        let runs = a.runs as f64;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            key.0,
            key.1,
            a.runs,
            fmt(a.tree / runs),
            fmt(a.alpha / runs),
            fmt(a.alpha / runs - 1.0),
            fmt_opt(a.cost_ratio, 0.0),
            fmt_opt(a.cost_ratio, 1.0),
            fmt_opt(a.completion, 0.0),
            fmt(a.calls / runs),
            fmt(a.elapsed / runs)
        )?;
    }
    Ok(())
}

fn cmd_verify() -> Result<()> {
    let mut all_passed = true;
    for suite in verify::run_all() {
        if suite.passed() {
            println!("suite {}: {} checks passed", suite.name, suite.cases);
        } else {
            all_passed = false;
            println!(
                "suite {}: {} of {} checks FAILED",
                suite.name,
                suite.failures.len(),
                suite.cases
            );
            for failure in &suite.failures {
                println!("  {failure}");
            }
        }
    }
    if !all_passed {
        std::process::exit(1);
    }
    Ok(())
}

fn cmd_tight(args: TightArgs) -> Result<()> {
    let inst = tight_instance(args.p, args.ell, args.eps)?;
    write_points(inst.space.points(), &args.out)?;
    if let Some(path) = &args.forest_out {
        inst.forest.save(path)?;
    }
    if let Some(path) = &args.reps_out {
        let file = std::fs::File::create(path)?;
        inst.reps.write_to(file)?;
    }
    println!(
        "n={} dim={} forest_weight={} predicted_ratio={} out={}",
        inst.space.len(),
        args.p + args.ell.max(args.p),
        inst.forest.forest_weight,
        inst.predicted_ratio,
        args.out.display()
    );
    Ok(())
}

fn cmd_oracle_mst(args: OracleArgs) -> Result<()> {
    let space = args.data.load(args.data.seed)?;
    let started = Instant::now();
    let (weight, edges) = brute_force_full_mst(&space)?;
    println!(
        "n={} mst_weight={weight} distance_calls={} elapsed_ms={:.3}",
        space.len(),
        space.distance_calls(),
        started.elapsed().as_secs_f64() * 1e3
    );
    if let Some(out) = &args.out {
        use std::io::Write as _;
        let file = std::fs::File::create(out)?;
        let mut w = std::io::BufWriter::new(file);
        for e in &edges {
            writeln!(w, "{} {} {}", e.u, e.v, e.w)?;
        }
    }
    Ok(())
}
