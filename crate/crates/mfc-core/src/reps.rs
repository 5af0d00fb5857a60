//! Representative selection under a shared budget: per-component greedy
//! k-center cost curves, exact budget allocation by dynamic programming,
//! a faster greedy allocator, a fixed per-component baseline, and an
//! exhaustive oracle for tiny instances.

use std::collections::BinaryHeap;
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forest::{gonzalez_kcenter, InitialForest};
use crate::metric::MetricSpace;

/// Per-component cost curves from one greedy k-center run each.
///
/// `curve(i, j)` is the k-center radius of component `i` after `j + 1`
/// centers, zero once every member is a center. The underlying ordered
/// center lists are kept so allocations can be materialized without new
/// distance queries.
#[derive(Debug, Clone)]
pub struct CostCurves {
    curves: Vec<Vec<f64>>,
    centers: Vec<Vec<usize>>,
    sizes: Vec<usize>,
    budget: usize,
}

impl CostCurves {
    /// Assembles curves from raw parts, validating monotonicity and
    /// length consistency. Mostly useful for tests and the verification
    /// suite; production curves come from [`build_cost_curves`].
    pub fn from_parts(
        curves: Vec<Vec<f64>>,
        centers: Vec<Vec<usize>>,
        sizes: Vec<usize>,
    ) -> Result<Self> {
        if curves.is_empty() || curves.len() != centers.len() || curves.len() != sizes.len() {
            return Err(Error::Argument("mismatched curve component counts".into()));
        }
        let len = curves[0].len();
        if len == 0 {
            return Err(Error::Argument("empty cost curve".into()));
        }
        for (i, c) in curves.iter().enumerate() {
            if c.len() != len {
                return Err(Error::Argument(format!("curve {i} has inconsistent length")));
            }
            if c.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::Argument(format!("curve {i} is not non-increasing")));
            }
            if centers[i].is_empty() || centers[i].len() > len || centers[i].len() > sizes[i] {
                return Err(Error::Argument(format!("bad center list for component {i}")));
            }
        }
        Ok(CostCurves {
            budget: len - 1,
            curves,
            centers,
            sizes,
        })
    }

    pub fn t(&self) -> usize {
        self.curves.len()
    }

    /// Largest budget these curves cover.
    pub fn budget(&self) -> usize {
        self.budget
    }

    /// The radius of component `i` with `j + 1` centers (i.e. `j` extras).
    pub fn value(&self, i: usize, extras: usize) -> f64 {
        self.curves[i][extras]
    }

    pub fn centers(&self, i: usize) -> &[usize] {
        &self.centers[i]
    }

    pub fn size(&self, i: usize) -> usize {
        self.sizes[i]
    }

    /// Largest number of extra representatives component `i` can absorb.
    fn cap(&self, i: usize) -> usize {
        self.centers[i].len() - 1
    }

    fn capacity(&self) -> usize {
        (0..self.t()).map(|i| self.cap(i)).sum()
    }

    fn check_budget(&self, b: usize) -> Result<()> {
        if b > self.budget {
            return Err(Error::Argument(format!(
                "budget {b} exceeds the computed curves (cover {})",
                self.budget
            )));
        }
        if b > self.capacity() {
            return Err(Error::Argument(format!(
                "budget {b} exceeds total capacity {}",
                self.capacity()
            )));
        }
        Ok(())
    }
}

/// A budget split with its objective value `sum_i curve(i, counts[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub counts: Vec<usize>,
    pub objective: f64,
}

fn objective_of(curves: &CostCurves, counts: &[usize]) -> f64 {
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| curves.value(i, c))
        .sum()
}

/// Representative index lists per component, with budget accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct RepAssignment {
    /// `reps[i]` is nonempty and a subset of component `i`'s members.
    pub reps: Vec<Vec<usize>>,
    /// Total extra representatives, `sum_i (|R_i| - 1)`.
    pub budget: usize,
}

impl RepAssignment {
    pub fn from_reps(reps: Vec<Vec<usize>>) -> Result<Self> {
        if reps.iter().any(Vec::is_empty) {
            return Err(Error::Argument("empty representative list".into()));
        }
        let budget = reps.iter().map(|r| r.len() - 1).sum();
        Ok(RepAssignment { reps, budget })
    }

    pub fn t(&self) -> usize {
        self.reps.len()
    }

    /// Checks every representative lies in its component.
    pub fn validate_for(&self, forest: &InitialForest) -> Result<()> {
        if self.t() != forest.t() {
            return Err(Error::Argument(format!(
                "{} representative lists for {} components",
                self.t(),
                forest.t()
            )));
        }
        for (i, r) in self.reps.iter().enumerate() {
            for &p in r {
                if p >= forest.n() || forest.partition.component_of(p) != i {
                    return Err(Error::Argument(format!(
                        "representative {p} is outside component {i}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// One line per component listing its representative indices.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        for r in &self.reps {
            let line: Vec<String> = r.iter().map(usize::to_string).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(reader: R, path: &Path) -> Result<Self> {
        let mut reps = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut r = Vec::new();
            for tok in line.split_whitespace() {
                r.push(tok.parse().map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    msg: format!("bad index: {e}"),
                })?);
            }
            reps.push(r);
        }
        RepAssignment::from_reps(reps)
    }
}

/// Exact evaluation of the component cost: the largest distance from any
/// member to its nearest representative. At most `|members| * |reps|`
/// distance queries.
pub fn cost_of(space: &MetricSpace, members: &[usize], reps: &[usize]) -> Result<f64> {
    if reps.is_empty() {
        return Err(Error::Argument("cost_of with no representatives".into()));
    }
    if reps.iter().any(|r| !members.contains(r)) {
        return Err(Error::Argument("representative outside members".into()));
    }
    let mut worst = 0.0f64;
    for &x in members {
        let mut near = f64::INFINITY;
        for &r in reps {
            near = near.min(space.distance(x, r));
        }
        worst = worst.max(near);
    }
    Ok(worst)
}

/// Runs greedy k-center once per component with `k = min(b + 1, |P_i|)`
/// seeded at the component's smallest point index, and reads the cost
/// curves straight off the radii sequences (the farthest-point rule
/// realizes the max-min cost, so no re-evaluation is needed).
pub fn build_cost_curves(space: &MetricSpace, forest: &InitialForest, b: usize) -> Result<CostCurves> {
    let t = forest.t();
    let per: Vec<(Vec<f64>, Vec<usize>)> = (0..t)
        .into_par_iter()
        .map(|i| {
            let members = forest.partition.members(i);
            let k = (b + 1).min(members.len());
            let run = gonzalez_kcenter(space, members, k, members[0])?;
            let mut curve = run.radii;
            curve.resize(b + 1, 0.0);
            Ok((curve, run.centers))
        })
        .collect::<Result<_>>()?;
    let sizes = (0..t).map(|i| forest.partition.members(i).len()).collect();
    let (curves, centers) = per.into_iter().unzip();
    CostCurves::from_parts(curves, centers, sizes)
}

/// Exact minimizer of `sum_i curve(i, b_i)` subject to `sum_i b_i = b`,
/// by the layered recurrence with one rolling value row and a choice
/// table (O(t b^2) time, O(t b) memory). Ties take the smaller budget
/// for the earlier components, i.e. the later component absorbs more.
pub fn dp_allocate(curves: &CostCurves, b: usize) -> Result<Allocation> {
    curves.check_budget(b)?;
    let t = curves.t();
    // prev[k] = best objective giving k extras to components 0..=done.
    let mut prev: Vec<f64> = (0..=b)
        .map(|k| {
            if k <= curves.cap(0) {
                curves.value(0, k)
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let mut choice = vec![vec![0usize; b + 1]; t];
    for (k, c) in choice[0].iter_mut().enumerate() {
        *c = k;
    }
    for i in 1..t {
        let mut cur = vec![f64::INFINITY; b + 1];
        for budget in 0..=b {
            let low = budget.saturating_sub(curves.cap(i));
            for k in low..=budget {
                if prev[k].is_infinite() {
                    continue;
                }
                let cand = prev[k] + curves.value(i, budget - k);
                if cand < cur[budget] {
                    cur[budget] = cand;
                    choice[i][budget] = budget - k;
                }
            }
        }
        prev = cur;
    }
    let objective = prev[b];
    debug_assert!(objective.is_finite());
    let mut counts = vec![0usize; t];
    let mut remaining = b;
    for i in (0..t).rev() {
        counts[i] = choice[i][remaining];
        remaining -= counts[i];
    }
    debug_assert_eq!(remaining, 0);
    Ok(Allocation { counts, objective })
}

struct GreedyEntry {
    delta: f64,
    component: usize,
    at: usize,
}

impl PartialEq for GreedyEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for GreedyEntry {}
impl PartialOrd for GreedyEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for GreedyEntry {
    // Max-heap on (delta, then smaller component index).
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.delta
            .total_cmp(&other.delta)
            .then(other.component.cmp(&self.component))
    }
}

/// `b` rounds of "give one extra representative to the component whose
/// curve drops the most", with a lazy max-heap keyed by the drop.
pub fn greedy_allocate(curves: &CostCurves, b: usize) -> Result<Allocation> {
    curves.check_budget(b)?;
    let t = curves.t();
    let mut counts = vec![0usize; t];
    let mut heap = BinaryHeap::with_capacity(t);
    for i in 0..t {
        if curves.cap(i) > 0 {
            heap.push(GreedyEntry {
                delta: curves.value(i, 0) - curves.value(i, 1),
                component: i,
                at: 0,
            });
        }
    }
    for _ in 0..b {
        loop {
            let entry = heap.pop().expect("capacity was checked");
            let i = entry.component;
            if entry.at != counts[i] {
                continue; // stale
            }
            counts[i] += 1;
            if counts[i] < curves.cap(i) {
                heap.push(GreedyEntry {
                    delta: curves.value(i, counts[i]) - curves.value(i, counts[i] + 1),
                    component: i,
                    at: counts[i],
                });
            }
            break;
        }
    }
    let objective = objective_of(curves, &counts);
    Ok(Allocation { counts, objective })
}

/// The fixed baseline: `min(ell, |P_i|)` representatives for every
/// component (an implied budget of `(ell - 1) * t` before saturation).
pub fn fixed_allocate(curves: &CostCurves, ell: usize) -> Result<Allocation> {
    if ell == 0 {
        return Err(Error::Argument("ell must be at least 1".into()));
    }
    if ell - 1 > curves.budget {
        return Err(Error::Argument(format!(
            "ell = {ell} needs curves covering budget {}",
            ell - 1
        )));
    }
    let counts: Vec<usize> = (0..curves.t())
        .map(|i| ell.min(curves.size(i)) - 1)
        .collect();
    let objective = objective_of(curves, &counts);
    Ok(Allocation { counts, objective })
}

/// Turns an allocation into concrete representatives: the first
/// `counts[i] + 1` greedy centers of each component.
pub fn materialize(curves: &CostCurves, counts: &[usize]) -> Result<RepAssignment> {
    if counts.len() != curves.t() {
        return Err(Error::Argument("allocation/curve size mismatch".into()));
    }
    let mut reps = Vec::with_capacity(counts.len());
    for (i, &c) in counts.iter().enumerate() {
        let centers = curves.centers(i);
        if c + 1 > centers.len() {
            return Err(Error::Argument(format!(
                "component {i}: {} representatives requested, {} centers computed",
                c + 1,
                centers.len()
            )));
        }
        reps.push(centers[..c + 1].to_vec());
    }
    RepAssignment::from_reps(reps)
}

/// Exhaustive minimizer of `sum_i curve(i, b_i)` over all ways to split
/// the budget. Reference oracle for [`dp_allocate`]; exponential, so the
/// composition count is guarded.
pub fn enumerate_allocations(curves: &CostCurves, b: usize) -> Result<Allocation> {
    curves.check_budget(b)?;
    let t = curves.t();
    let mut compositions: u64 = 1;
    for i in 1..t as u64 {
        compositions = compositions.saturating_mul(b as u64 + i) / i;
    }
    if compositions > 2_000_000 {
        return Err(Error::SizeGuard(format!(
            "{compositions} compositions of {b} into {t} parts"
        )));
    }
    let mut best: Option<Allocation> = None;
    let mut counts = vec![0usize; t];
    fn recurse(
        curves: &CostCurves,
        counts: &mut Vec<usize>,
        i: usize,
        left: usize,
        best: &mut Option<Allocation>,
    ) {
        if i + 1 == counts.len() {
            if left > curves.cap(i) {
                return;
            }
            counts[i] = left;
            let objective = objective_of(curves, counts);
            if best.as_ref().map_or(true, |b| objective < b.objective) {
                *best = Some(Allocation {
                    counts: counts.clone(),
                    objective,
                });
            }
            return;
        }
        for c in 0..=left.min(curves.cap(i)) {
            counts[i] = c;
            recurse(curves, counts, i + 1, left - c, best);
        }
    }
    recurse(curves, &mut counts, 0, b, &mut best);
    best.ok_or_else(|| Error::Internal("no feasible allocation".into()))
}

/// Exhaustive search over all representative subsets meeting the budget.
/// Oracle for the two-approximation of the greedy-plus-allocation
/// pipeline; guarded to `sum |P_i| <= 14` and `b <= 4`.
pub fn brute_force_bestreps(
    space: &MetricSpace,
    forest: &InitialForest,
    b: usize,
) -> Result<(RepAssignment, f64)> {
    let n = forest.n();
    if n > 14 || b > 4 {
        return Err(Error::SizeGuard(format!(
            "brute_force_bestreps limited to 14 points / b <= 4, got {n} / {b}"
        )));
    }
    let t = forest.t();
    // Candidate subsets per component with their exact costs.
    let mut candidates: Vec<Vec<(usize, Vec<usize>, f64)>> = Vec::with_capacity(t);
    for i in 0..t {
        let members = forest.partition.members(i);
        let max_size = members.len().min(b + 1);
        let mut list = Vec::new();
        for mask in 1u32..(1 << members.len()) {
            let size = mask.count_ones() as usize;
            if size > max_size {
                continue;
            }
            let subset: Vec<usize> = members
                .iter()
                .enumerate()
                .filter(|(pos, _)| mask & (1 << pos) != 0)
                .map(|(_, &p)| p)
                .collect();
            let mut worst = 0.0f64;
            for &x in members {
                let mut near = f64::INFINITY;
                for &r in &subset {
                    near = near.min(space.distance(x, r));
                }
                worst = worst.max(near);
            }
            list.push((size, subset, worst));
        }
        candidates.push(list);
    }

    fn search(
        candidates: &[Vec<(usize, Vec<usize>, f64)>],
        i: usize,
        left: usize,
        acc: f64,
        chosen: &mut Vec<Vec<usize>>,
        best: &mut Option<(f64, Vec<Vec<usize>>)>,
    ) {
        if i == candidates.len() {
            if best.as_ref().map_or(true, |(c, _)| acc < *c) {
                *best = Some((acc, chosen.clone()));
            }
            return;
        }
        for (size, subset, cost) in &candidates[i] {
            if size - 1 > left {
                continue;
            }
            chosen.push(subset.clone());
            search(candidates, i + 1, left - (size - 1), acc + cost, chosen, best);
            chosen.pop();
        }
    }
    let mut best = None;
    search(&candidates, 0, b, 0.0, &mut Vec::new(), &mut best);
    let (cost, reps) = best.ok_or_else(|| Error::Internal("no feasible assignment".into()))?;
    Ok((RepAssignment::from_reps(reps)?, cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::build_initial_forest;
    use crate::metric::{MetricKind, Point};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn planar(n: usize, seed: u64) -> MetricSpace {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..n)
            .map(|_| Point::DenseVector(vec![rng.gen::<f64>(), rng.gen::<f64>()]))
            .collect();
        MetricSpace::new(pts, MetricKind::Euclidean).unwrap()
    }

    /// Synthetic curves with unconstrained caps, for allocator tests.
    fn synthetic(raw: &[&[f64]]) -> CostCurves {
        let len = raw[0].len();
        let curves: Vec<Vec<f64>> = raw.iter().map(|c| c.to_vec()).collect();
        let centers = vec![vec![0usize; len]; raw.len()];
        let sizes = vec![len; raw.len()];
        CostCurves::from_parts(curves, centers, sizes).unwrap()
    }

    #[test]
    fn cost_of_all_members_and_singleton_are_zero() {
        let s = planar(5, 1);
        let members: Vec<usize> = (0..5).collect();
        assert_eq!(cost_of(&s, &members, &members).unwrap(), 0.0);
        assert_eq!(cost_of(&s, &[2], &[2]).unwrap(), 0.0);
    }

    #[test]
    fn cost_of_matches_double_loop_oracle() {
        let s = planar(6, 2);
        let members: Vec<usize> = (0..6).collect();
        let reps = [1, 4];
        let got = cost_of(&s, &members, &reps).unwrap();
        let mut worst = 0.0f64;
        for x in 0..6 {
            let near = s.distance(x, 1).min(s.distance(x, 4));
            worst = worst.max(near);
        }
        assert_eq!(got, worst);
    }

    #[test]
    fn curves_at_zero_budget_are_single_entries() {
        let s = planar(16, 3);
        let forest = build_initial_forest(&s, 4, 0).unwrap();
        let curves = build_cost_curves(&s, &forest, 0).unwrap();
        assert_eq!(curves.budget(), 0);
        for i in 0..curves.t() {
            assert_eq!(curves.centers(i).len(), 1);
        }
    }

    #[test]
    fn singleton_component_curve_is_all_zeros() {
        let s = planar(5, 4);
        let forest = build_initial_forest(&s, 5, 0).unwrap();
        let curves = build_cost_curves(&s, &forest, 3).unwrap();
        for i in 0..5 {
            for j in 0..=3 {
                assert_eq!(curves.value(i, j), 0.0);
            }
        }
    }

    #[test]
    fn curve_within_twice_optimal_kcenter() {
        use crate::forest::brute_force_kcenter;
        let s = planar(7, 5);
        let forest = build_initial_forest(&s, 1, 0).unwrap();
        let curves = build_cost_curves(&s, &forest, 3).unwrap();
        let members: Vec<usize> = (0..7).collect();
        for j in 1..=4usize {
            let (_, opt) = brute_force_kcenter(&s, &members, j).unwrap();
            assert!(
                curves.value(0, j - 1) <= 2.0 * opt + 1e-12,
                "j = {j}: {} vs {opt}",
                curves.value(0, j - 1)
            );
        }
    }

    #[test]
    fn dp_zero_budget_sums_first_entries() {
        let c = synthetic(&[&[3.0, 1.0], &[2.0, 0.5]]);
        let alloc = dp_allocate(&c, 0).unwrap();
        assert_eq!(alloc.counts, vec![0, 0]);
        assert_eq!(alloc.objective, 5.0);
    }

    #[test]
    fn dp_single_component_takes_whole_budget() {
        let c = synthetic(&[&[9.0, 7.0, 4.0, 1.0]]);
        let alloc = dp_allocate(&c, 3).unwrap();
        assert_eq!(alloc.counts, vec![3]);
        assert_eq!(alloc.objective, 1.0);
    }

    #[test]
    fn dp_matches_composition_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..40 {
            let t = rng.gen_range(1..=3);
            let b = rng.gen_range(0..=4);
            let raw: Vec<Vec<f64>> = (0..t)
                .map(|_| {
                    let mut c: Vec<f64> = (0..=b).map(|_| rng.gen::<f64>() * 10.0).collect();
                    c.sort_by(|a, b| b.total_cmp(a));
                    c
                })
                .collect();
            let refs: Vec<&[f64]> = raw.iter().map(Vec::as_slice).collect();
            let c = synthetic(&refs);
            let dp = dp_allocate(&c, b).unwrap();
            let oracle = enumerate_allocations(&c, b).unwrap();
            assert_eq!(dp.objective, oracle.objective);
            assert_eq!(dp.counts.iter().sum::<usize>(), b);
        }
    }

    #[test]
    fn dp_tie_breaks_toward_later_components() {
        // Both splits of one extra cost 10; the documented rule keeps the
        // smaller prefix budget, so the extra lands on the last component.
        let c = synthetic(&[&[5.0, 5.0], &[5.0, 5.0]]);
        let alloc = dp_allocate(&c, 1).unwrap();
        assert_eq!(alloc.counts, vec![0, 1]);
    }

    #[test]
    fn dp_respects_component_capacity_on_plateaus() {
        // The first curve is flat, so several splits tie; the naive tie
        // rule would dump the whole budget on the 3-point component,
        // which can only absorb two extras. The allocation must stay
        // materializable without losing objective.
        let curves = CostCurves::from_parts(
            vec![vec![9.0; 5], vec![5.0, 0.0, 0.0, 0.0, 0.0]],
            vec![vec![0; 5], vec![0; 3]],
            vec![10, 3],
        )
        .unwrap();
        let alloc = dp_allocate(&curves, 4).unwrap();
        assert_eq!(alloc.objective, 9.0);
        assert!(alloc.counts[1] <= 2, "counts {:?}", alloc.counts);
        assert_eq!(alloc.counts.iter().sum::<usize>(), 4);
        assert_eq!(
            alloc.objective,
            enumerate_allocations(&curves, 4).unwrap().objective
        );
    }

    #[test]
    fn greedy_zero_budget() {
        let c = synthetic(&[&[3.0], &[2.0]]);
        let alloc = greedy_allocate(&c, 0).unwrap();
        assert_eq!(alloc.counts, vec![0, 0]);
    }

    #[test]
    fn greedy_single_step_argmax() {
        let c = synthetic(&[&[10.0, 1.0, 1.0], &[10.0, 9.0, 9.0]]);
        let alloc = greedy_allocate(&c, 1).unwrap();
        assert_eq!(alloc.counts, vec![1, 0]);
        assert_eq!(alloc.objective, 1.0 + 10.0);
    }

    #[test]
    fn greedy_is_myopic_where_dp_is_not() {
        // Component 0 improves only after two extras; greedy never sees it.
        let c = synthetic(&[&[10.0, 10.0, 0.0], &[10.0, 8.0, 7.0]]);
        let dp = dp_allocate(&c, 2).unwrap();
        let greedy = greedy_allocate(&c, 2).unwrap();
        let oracle = enumerate_allocations(&c, 2).unwrap();
        assert_eq!(dp.counts, vec![2, 0]);
        assert_eq!(dp.objective, 10.0);
        assert_eq!(oracle.objective, 10.0);
        assert_eq!(greedy.counts, vec![0, 2]);
        assert_eq!(greedy.objective, 17.0);
        assert!(greedy.objective > dp.objective);
    }

    #[test]
    fn fixed_allocation_shapes() {
        let s = planar(12, 7);
        let forest = build_initial_forest(&s, 3, 0).unwrap();
        let curves = build_cost_curves(&s, &forest, 2 * 3).unwrap();
        let one = fixed_allocate(&curves, 1).unwrap();
        assert!(one.counts.iter().all(|&c| c == 0));
        let two = fixed_allocate(&curves, 2).unwrap();
        let expect: f64 = (0..3).map(|i| curves.value(i, 1)).sum();
        assert_eq!(two.objective, expect);
        // ell beyond every component saturates to all-members, cost 0.
        let curves_big = build_cost_curves(&s, &forest, 11).unwrap();
        let big = fixed_allocate(&curves_big, 12).unwrap();
        assert_eq!(big.objective, 0.0);
        for i in 0..3 {
            assert_eq!(big.counts[i], curves_big.size(i) - 1);
        }
    }

    #[test]
    fn materialize_takes_center_prefixes() {
        let s = planar(20, 8);
        let forest = build_initial_forest(&s, 3, 0).unwrap();
        let curves = build_cost_curves(&s, &forest, 4).unwrap();

        let ones = materialize(&curves, &[0, 0, 0]).unwrap();
        for i in 0..3 {
            assert_eq!(ones.reps[i], vec![curves.centers(i)[0]]);
        }

        let alloc = dp_allocate(&curves, 4).unwrap();
        let reps = materialize(&curves, &alloc.counts).unwrap();
        assert_eq!(reps.budget, 4);
        reps.validate_for(&forest).unwrap();
    }

    #[test]
    fn materialize_full_component() {
        let s = planar(6, 9);
        let forest = build_initial_forest(&s, 2, 0).unwrap();
        let sizes: Vec<usize> = (0..2).map(|i| forest.partition.members(i).len()).collect();
        let b = sizes.iter().map(|s| s - 1).max().unwrap();
        let curves = build_cost_curves(&s, &forest, b).unwrap();
        let counts: Vec<usize> = sizes.iter().map(|s| s - 1).collect();
        let reps = materialize(&curves, &counts).unwrap();
        for i in 0..2 {
            let mut r = reps.reps[i].clone();
            r.sort_unstable();
            assert_eq!(r, forest.partition.members(i));
        }
    }

    #[test]
    fn materialize_rejects_excess() {
        let s = planar(4, 10);
        let forest = build_initial_forest(&s, 2, 0).unwrap();
        let curves = build_cost_curves(&s, &forest, 1).unwrap();
        assert!(materialize(&curves, &[5, 0]).is_err());
    }

    #[test]
    fn bestreps_oracle_on_singletons_is_zero() {
        let s = planar(4, 11);
        let forest = build_initial_forest(&s, 4, 0).unwrap();
        let (_, cost) = brute_force_bestreps(&s, &forest, 0).unwrap();
        assert_eq!(cost, 0.0);
    }

    #[test]
    fn bestreps_single_component_equals_two_center_optimum() {
        use crate::forest::brute_force_kcenter;
        let s = planar(8, 12);
        let forest = build_initial_forest(&s, 1, 0).unwrap();
        let (_, cost) = brute_force_bestreps(&s, &forest, 1).unwrap();
        let members: Vec<usize> = (0..8).collect();
        let (_, opt2) = brute_force_kcenter(&s, &members, 2).unwrap();
        assert_eq!(cost, opt2);
    }

    #[test]
    fn dp_pipeline_within_twice_bestreps_optimum() {
        for seed in 0..6 {
            let s = planar(10, 300 + seed);
            let forest = build_initial_forest(&s, 2, 0).unwrap();
            let b = 2;
            let curves = build_cost_curves(&s, &forest, b).unwrap();
            let alloc = dp_allocate(&curves, b).unwrap();
            let reps = materialize(&curves, &alloc.counts).unwrap();
            let mut pipeline_cost = 0.0;
            for i in 0..forest.t() {
                pipeline_cost += cost_of(&s, forest.partition.members(i), &reps.reps[i]).unwrap();
            }
            let (_, opt) = brute_force_bestreps(&s, &forest, b).unwrap();
            assert!(
                pipeline_cost <= 2.0 * opt + 1e-12,
                "seed {seed}: {pipeline_cost} vs 2 * {opt}"
            );
        }
    }

    #[test]
    fn dp_objective_non_increasing_in_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let raw: Vec<Vec<f64>> = (0..4)
            .map(|_| {
                let mut c: Vec<f64> = (0..=6).map(|_| rng.gen::<f64>()).collect();
                c.sort_by(|a, b| b.total_cmp(a));
                c
            })
            .collect();
        let refs: Vec<&[f64]> = raw.iter().map(Vec::as_slice).collect();
        let c = synthetic(&refs);
        let mut last = f64::INFINITY;
        for b in 0..=6 {
            let obj = dp_allocate(&c, b).unwrap().objective;
            assert!(obj <= last + 1e-15);
            last = obj;
        }
    }

    #[test]
    fn reps_round_trip_serialization() {
        let s = planar(15, 14);
        let forest = build_initial_forest(&s, 4, 0).unwrap();
        let curves = build_cost_curves(&s, &forest, 3).unwrap();
        let alloc = dp_allocate(&curves, 3).unwrap();
        let reps = materialize(&curves, &alloc.counts).unwrap();
        let mut buf = Vec::new();
        reps.write_to(&mut buf).unwrap();
        let back = RepAssignment::read_from(std::io::Cursor::new(&buf), Path::new("mem")).unwrap();
        assert_eq!(back, reps);
    }
}
