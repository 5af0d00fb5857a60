//! The per-run pipeline shared by `complete` and `sweep`: build cost
//! curves, allocate the budget with the chosen strategy, materialize
//! representatives, complete the forest, and certify the run.

use std::time::Instant;

use anyhow::{bail, Context, Result};

use mfc_core::analysis::{alpha_from_parts, ratios};
use mfc_core::dataset::ResultRow;
use mfc_core::forest::InitialForest;
use mfc_core::metric::MetricSpace;
use mfc_core::reps::{
    build_cost_curves, dp_allocate, fixed_allocate, greedy_allocate, materialize,
};
use mfc_core::solver::{mfc_opt, multirep_mfc, CompletionResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Variant {
    Dp,
    Greedy,
    Fixed,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Dp, Variant::Greedy, Variant::Fixed];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Dp => "dp",
            Variant::Greedy => "greedy",
            Variant::Fixed => "fixed",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dp" => Ok(Variant::Dp),
            "greedy" => Ok(Variant::Greedy),
            "fixed" => Ok(Variant::Fixed),
            other => bail!("unknown variant '{other}' (expected dp, greedy or fixed)"),
        }
    }
}

/// Output of one variant run, before it is flattened into a CSV row.
pub struct RunOutcome {
    pub completion: CompletionResult,
    pub alpha: f64,
    pub distance_calls: u64,
    pub elapsed_ms: f64,
}

/// Runs one variant at budget `b` on a prepared forest. Distance calls
/// and elapsed time cover curve building, allocation and completion
/// (the forest is treated as given).
pub fn run_variant(
    space: &MetricSpace,
    forest: &InitialForest,
    variant: Variant,
    b: usize,
) -> Result<RunOutcome> {
    let started = Instant::now();
    let before = space.distance_calls();
    let t = forest.t();
    let curves = build_cost_curves(space, forest, b)?;
    let alloc = match variant {
        Variant::Dp => dp_allocate(&curves, b)?,
        Variant::Greedy => greedy_allocate(&curves, b)?,
        Variant::Fixed => {
            if b % t != 0 {
                bail!("fixed variant needs a budget divisible by t = {t}, got {b}");
            }
            fixed_allocate(&curves, b / t + 1)?
        }
    };
    let reps = materialize(&curves, &alloc.counts)?;
    let completion = multirep_mfc(space, forest, &reps)?;
    // The allocation objective equals the summed representative costs,
    // so the certificate costs no extra distance queries.
    let alpha = alpha_from_parts(alloc.objective, forest.forest_weight);
    Ok(RunOutcome {
        completion,
        alpha,
        distance_calls: space.distance_calls() - before,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Flattens a run into a results row, filling the ratio columns when the
/// optimal completion is available.
pub fn row_from_run(
    algorithm: &str,
    b: usize,
    seed: u64,
    run: &RunOutcome,
    opt: Option<&CompletionResult>,
) -> Result<ResultRow> {
    let (cost_ratio, completion_ratio, opt_weight) = match opt {
        Some(opt) => {
            let (cr, comp) = ratios(&run.completion, opt)?;
            (Some(cr), comp, Some(opt.tree_weight))
        }
        None => (None, None, None),
    };
    Ok(ResultRow {
        algorithm: algorithm.to_owned(),
        b,
        tree_weight: run.completion.tree_weight,
        forest_weight: run.completion.forest_weight,
        opt_weight,
        alpha: run.alpha,
        cost_ratio,
        completion_ratio,
        distance_calls: run.distance_calls,
        elapsed_ms: run.elapsed_ms,
        seed,
    })
}

/// The optimal baseline as its own row. Alpha is exactly 1 by
/// definition (the optimum is its own certificate).
pub fn opt_row(seed: u64, opt: &CompletionResult) -> ResultRow {
    ResultRow {
        algorithm: "opt".to_owned(),
        b: 0,
        tree_weight: opt.tree_weight,
        forest_weight: opt.forest_weight,
        opt_weight: Some(opt.tree_weight),
        alpha: 1.0,
        cost_ratio: Some(1.0),
        completion_ratio: if opt.added_weight == 0.0 { None } else { Some(1.0) },
        distance_calls: opt.distance_calls,
        elapsed_ms: opt.elapsed_ms,
        seed,
    }
}

/// Runs the optimal completion, guarded to desk scale.
pub fn run_opt(space: &MetricSpace, forest: &InitialForest) -> Result<CompletionResult> {
    if space.len() > 3_000 {
        bail!(
            "the optimal baseline is quadratic in distance queries; n = {} exceeds the \
             desk-scale limit of 3000 (drop --run-opt)",
            space.len()
        );
    }
    mfc_opt(space, forest).context("optimal completion failed")
}
