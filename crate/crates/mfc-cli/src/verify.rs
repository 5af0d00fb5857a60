//! The `verify` subcommand: self-contained oracle suites that exercise
//! the allocator, the k-center greedy, the two MST implementations
//! against each other, and the worst-case grid. Exit code 0 means every
//! suite passed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mfc_core::analysis::{brute_force_full_mst, ratios, tight_instance};
use mfc_core::forest::{
    brute_force_kcenter, build_initial_forest, exact_component_mst, gonzalez_kcenter, weight_sum,
};
use mfc_core::metric::{MetricKind, MetricSpace};
use mfc_core::reps::{dp_allocate, enumerate_allocations, Allocation, CostCurves};
use mfc_core::solver::{mfc_opt, multirep_mfc};
use mfc_core::synth;

pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult {
            name,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(describe());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn planar(n: usize, seed: u64) -> MetricSpace {
    MetricSpace::new(synth::uniform_vectors(n, 2, seed), MetricKind::Euclidean).unwrap()
}

fn synthetic_curves(raw: Vec<Vec<f64>>) -> CostCurves {
    let len = raw[0].len();
    let t = raw.len();
    CostCurves::from_parts(raw, vec![vec![0usize; len]; t], vec![len; t]).unwrap()
}

type AllocatorFn = dyn Fn(&CostCurves, usize) -> mfc_core::Result<Allocation>;

/// Checks an allocator against the composition-enumeration oracle on
/// random curves, plus frozen tie cases where the documented rule pins
/// the exact counts. Taking the allocator as a parameter lets the tests
/// run this suite against a deliberately corrupted implementation.
pub fn dp_suite(allocator: &AllocatorFn) -> SuiteResult {
    let mut suite = SuiteResult::new("dp-allocator");
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for trial in 0..60usize {
        let t = rng.gen_range(1..=4);
        let b = rng.gen_range(0..=6);
        let raw: Vec<Vec<f64>> = (0..t)
            .map(|_| {
                let mut c: Vec<f64> = (0..7).map(|_| rng.gen::<f64>() * 20.0).collect();
                c.sort_by(|x, y| y.total_cmp(x));
                c
            })
            .collect();
        let curves = synthetic_curves(raw);
        let got = allocator(&curves, b).unwrap();
        let oracle = enumerate_allocations(&curves, b).unwrap();
        suite.check(got.objective == oracle.objective, || {
            format!(
                "trial {trial}: objective {} but the enumeration oracle finds {}",
                got.objective, oracle.objective
            )
        });
        suite.check(got.counts.iter().sum::<usize>() == b, || {
            format!("trial {trial}: counts do not sum to the budget")
        });
    }

    // Tie cases, hand-derived from the smaller-prefix-budget rule: when
    // every split costs the same, the extras land on the last component.
    let flat2 = synthetic_curves(vec![vec![5.0, 5.0], vec![5.0, 5.0]]);
    let got = allocator(&flat2, 1).unwrap();
    suite.check(got.counts == vec![0, 1], || {
        format!("tie case t=2 b=1: counts {:?}, expected [0, 1]", got.counts)
    });
    let flat3 = synthetic_curves(vec![vec![4.0; 3], vec![4.0; 3], vec![4.0; 3]]);
    let got = allocator(&flat3, 2).unwrap();
    suite.check(got.counts == vec![0, 0, 2], || {
        format!("tie case t=3 b=2: counts {:?}, expected [0, 0, 2]", got.counts)
    });
    suite
}

pub fn kcenter_suite() -> SuiteResult {
    let mut suite = SuiteResult::new("k-center");
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for trial in 0..40usize {
        let n = rng.gen_range(3..=10);
        let k = rng.gen_range(1..=4usize).min(n);
        let space = planar(n, 600 + trial as u64);
        let members: Vec<usize> = (0..n).collect();
        let run = gonzalez_kcenter(&space, &members, k, 0).unwrap();
        let (_, opt) = brute_force_kcenter(&space, &members, k).unwrap();
        suite.check(run.radii[k - 1] <= 2.0 * opt + 1e-12, || {
            format!(
                "trial {trial}: greedy radius {} above twice the optimum {opt}",
                run.radii[k - 1]
            )
        });
    }
    suite
}

pub fn full_mst_suite() -> SuiteResult {
    let mut suite = SuiteResult::new("full-mst");
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for trial in 0..40usize {
        let n = rng.gen_range(2..=30);
        let space = planar(n, 700 + trial as u64);
        let members: Vec<usize> = (0..n).collect();
        let prim = exact_component_mst(&space, &members).unwrap();
        let (kruskal_weight, _) = brute_force_full_mst(&space).unwrap();
        suite.check(weight_sum(&prim) == kruskal_weight, || {
            format!(
                "trial {trial}: Prim weight {} differs from Kruskal weight {kruskal_weight}",
                weight_sum(&prim)
            )
        });
    }
    suite
}

pub fn tight_instance_suite() -> SuiteResult {
    let mut suite = SuiteResult::new("tight-instance");
    for &p in &[2usize, 5, 10] {
        for &ell in &[1usize, 3, 8] {
            for &eps in &[0.5f64, 0.125, 0.015625] {
                let inst = tight_instance(p, ell, eps).unwrap();
                let approx = multirep_mfc(&inst.space, &inst.forest, &inst.reps).unwrap();
                let opt = mfc_opt(&inst.space, &inst.forest).unwrap();
                let (ratio, _) = ratios(&approx, &opt).unwrap();
                suite.check((ratio - inst.predicted_ratio).abs() <= 1e-9, || {
                    format!(
                        "(p, l, eps) = ({p}, {ell}, {eps}): ratio {ratio} vs {}",
                        inst.predicted_ratio
                    )
                });
            }
        }
    }
    suite
}

/// End-to-end spot check: a small pipeline run stays within its
/// certificate and the worst-case factor.
pub fn pipeline_suite() -> SuiteResult {
    let mut suite = SuiteResult::new("pipeline");
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for trial in 0..10usize {
        let n = rng.gen_range(40..=90);
        let t = rng.gen_range(2..=8);
        let space = planar(n, 800 + trial as u64);
        let forest = build_initial_forest(&space, t, 0).unwrap();
        let opt = mfc_opt(&space, &forest).unwrap();
        for b in [0, t] {
            let run =
                crate::pipeline::run_variant(&space, &forest, crate::pipeline::Variant::Dp, b)
                    .unwrap();
            let (cost_ratio, _) = ratios(&run.completion, &opt).unwrap();
            suite.check(cost_ratio <= run.alpha + 1e-9, || {
                format!("trial {trial} b {b}: ratio {cost_ratio} above alpha {}", run.alpha)
            });
            suite.check(cost_ratio <= 2.0 + 1e-9, || {
                format!("trial {trial} b {b}: ratio {cost_ratio} above 2")
            });
        }
    }
    suite
}

pub fn run_all() -> Vec<SuiteResult> {
    vec![
        dp_suite(&|curves, b| dp_allocate(curves, b)),
        kcenter_suite(),
        full_mst_suite(),
        tight_instance_suite(),
        pipeline_suite(),
    ]
}
