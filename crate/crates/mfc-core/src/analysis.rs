//! Evaluation quantities: the instance-specific approximation bound
//! alpha, cost and completion ratios against the optimal completion, the
//! worst-case instance generator, and a brute-force full-MST oracle.

use crate::error::{Error, Result};
use crate::forest::{weight_sum, Edge, InitialForest, Partition};
use crate::metric::{MetricKind, MetricSpace, Point};
use crate::reps::{cost_of, RepAssignment};
use crate::solver::CompletionResult;
use crate::union_find::DisjointSets;
use crate::DENSE_MATRIX_LIMIT;

/// The certificate attached to one completion run.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// Summed component costs of the representatives.
    pub cost_p_r: f64,
    pub forest_weight: f64,
    /// `1 + cost_p_r / forest_weight`; an upper bound on the cost ratio.
    pub alpha: f64,
    pub epsilon_alpha: f64,
    /// Tree weight over the optimal tree weight, when the optimum was run.
    pub cost_ratio: Option<f64>,
    /// Added weight over the optimal added weight; absent when the
    /// optimum added nothing.
    pub completion_ratio: Option<f64>,
    pub epsilon: Option<f64>,
}

/// The bound value by its formula, with the zero conventions: an empty
/// forest certifies nothing (infinite) unless the cost is also zero
/// (then the completion is exact and alpha is 1).
pub fn alpha_from_parts(cost_p_r: f64, forest_weight: f64) -> f64 {
    if forest_weight > 0.0 {
        1.0 + cost_p_r / forest_weight
    } else if cost_p_r == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// Evaluates the representative costs exactly and forms the bound.
pub fn alpha_bound(
    space: &MetricSpace,
    forest: &InitialForest,
    reps: &RepAssignment,
) -> Result<BoundReport> {
    reps.validate_for(forest)?;
    let mut cost_p_r = 0.0;
    for i in 0..forest.t() {
        cost_p_r += cost_of(space, forest.partition.members(i), &reps.reps[i])?;
    }
    let alpha = alpha_from_parts(cost_p_r, forest.forest_weight);
    Ok(BoundReport {
        cost_p_r,
        forest_weight: forest.forest_weight,
        alpha,
        epsilon_alpha: alpha - 1.0,
        cost_ratio: None,
        completion_ratio: None,
        epsilon: None,
    })
}

impl BoundReport {
    pub fn with_ratios(mut self, cost_ratio: f64, completion_ratio: Option<f64>) -> Self {
        self.cost_ratio = Some(cost_ratio);
        self.completion_ratio = completion_ratio;
        self.epsilon = Some(cost_ratio - 1.0);
        self
    }
}

/// Cost ratio and completion ratio of an approximate completion against
/// the optimal one for the same forest. The completion ratio is absent
/// when the optimum added no weight (nothing to compare against).
pub fn ratios(approx: &CompletionResult, opt: &CompletionResult) -> Result<(f64, Option<f64>)> {
    if approx.forest_weight != opt.forest_weight {
        return Err(Error::Argument(
            "results come from different forests".into(),
        ));
    }
    let cost_ratio = approx.tree_weight / opt.tree_weight;
    let completion_ratio = if opt.added_weight == 0.0 {
        None
    } else {
        Some(approx.added_weight / opt.added_weight)
    };
    Ok((cost_ratio, completion_ratio))
}

/// The worst-case construction with its forest, representative choice,
/// and the closed-form ratio the approximate completion attains on it.
#[derive(Debug)]
pub struct TightInstance {
    pub space: MetricSpace,
    pub forest: InitialForest,
    pub reps: RepAssignment,
    pub predicted_ratio: f64,
}

/// Builds the instance on which the representative-restricted completion
/// is exactly a `((2 + l*eps - eps)p - 1) / ((1 + eps*l)p - eps)`
/// approximation: `p` path components of `l + 1` points each in
/// `p + max(l, p)` dimensions under the l-infinity metric. Each
/// component has one low-norm point; the representatives are the other
/// `l` points, so every completion edge the algorithm can pick has
/// weight 1 while the optimum connects the low-norm points at `eps`.
pub fn tight_instance(p: usize, ell: usize, eps: f64) -> Result<TightInstance> {
    if p == 0 || ell == 0 {
        return Err(Error::Argument("p and ell must be positive".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Argument(format!("eps = {eps} outside (0, 1)")));
    }
    let dim = p + ell.max(p);
    let stride = ell + 1;
    let index = |i: usize, j: usize| i * stride + j;

    let mut points = Vec::with_capacity(p * stride);
    for i in 0..p {
        for j in 0..=ell {
            let mut coords = vec![0.0; dim];
            if j == 0 {
                coords[p + i] = eps;
            } else {
                coords[i] = 1.0;
                coords[p + j - 1] = eps;
            }
            points.push(Point::DenseVector(coords));
        }
    }
    let space = MetricSpace::new(points, MetricKind::ChebyshevLinf)?;

    let mut assignment = vec![0usize; p * stride];
    for i in 0..p {
        for j in 0..=ell {
            assignment[index(i, j)] = i;
        }
    }
    let partition = Partition::from_assignment(&assignment)?;
    let trees: Vec<Vec<Edge>> = (0..p)
        .map(|i| {
            let mut tree = vec![Edge::new(index(i, 0), index(i, 1), 1.0)];
            for j in 1..ell {
                tree.push(Edge::new(index(i, j), index(i, j + 1), eps));
            }
            tree
        })
        .collect();
    let forest = InitialForest::from_parts(partition, trees)?;

    let reps = RepAssignment::from_reps(
        (0..p)
            .map(|i| (1..=ell).map(|j| index(i, j)).collect())
            .collect(),
    )?;

    let pf = p as f64;
    let lf = ell as f64;
    let predicted_ratio = ((2.0 + lf * eps - eps) * pf - 1.0) / ((1.0 + eps * lf) * pf - eps);

    Ok(TightInstance {
        space,
        forest,
        reps,
        predicted_ratio,
    })
}

/// Kruskal over all `n(n-1)/2` distances with deterministic tie order.
/// The reference for everything that claims to produce a minimum
/// spanning tree; guarded to desk-scale inputs.
pub fn brute_force_full_mst(space: &MetricSpace) -> Result<(f64, Vec<Edge>)> {
    let n = space.len();
    if n == 0 {
        return Err(Error::Argument("empty space".into()));
    }
    if n > DENSE_MATRIX_LIMIT {
        return Err(Error::SizeGuard(format!(
            "brute_force_full_mst limited to {DENSE_MATRIX_LIMIT} points, got {n}"
        )));
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push(Edge::new(u, v, space.distance(u, v)));
        }
    }
    edges.sort_by(|a, b| {
        a.w.total_cmp(&b.w)
            .then(a.u.cmp(&b.u))
            .then(a.v.cmp(&b.v))
    });
    let mut dsu = DisjointSets::new(n);
    let mut tree = Vec::with_capacity(n - 1);
    for e in edges {
        if dsu.union(e.u, e.v) {
            tree.push(e);
            if tree.len() + 1 == n {
                break;
            }
        }
    }
    Ok((weight_sum(&tree), tree))
}
