//! Forest completion: coarsened component graphs under the exact and
//! representative-restricted weight functions, the coarsened MST, and
//! assembly of the completed spanning tree with witness edges.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forest::{weight_sum, Edge, InitialForest};
use crate::metric::MetricSpace;
use crate::reps::RepAssignment;
use crate::union_find::DisjointSets;

/// Complete graph on the `t` components: a symmetric weight table with a
/// witness point pair realizing each entry.
#[derive(Debug, Clone)]
pub struct CoarsenedGraph {
    t: usize,
    weights: Vec<f64>,
    witnesses: Vec<(usize, usize)>,
}

impl CoarsenedGraph {
    fn empty(t: usize) -> Self {
        let slots = t * t.saturating_sub(1) / 2;
        CoarsenedGraph {
            t,
            weights: vec![f64::NAN; slots],
            witnesses: vec![(usize::MAX, usize::MAX); slots],
        }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.t);
        i * (2 * self.t - i - 1) / 2 + (j - i - 1)
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.weights[self.slot(i, j)]
    }

    /// The point pair whose distance defines `weight(i, j)`.
    pub fn witness(&self, i: usize, j: usize) -> (usize, usize) {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.witnesses[self.slot(i, j)]
    }

    /// All unordered component pairs.
    fn pairs(t: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(t * t.saturating_sub(1) / 2);
        for i in 0..t {
            for j in (i + 1)..t {
                out.push((i, j));
            }
        }
        out
    }
}

/// Exact coarsened weights: every entry is the full bichromatic closest
/// pair between its two components. `sum_{i<j} |P_i| |P_j|` distance
/// queries.
pub fn exact_coarsened(space: &MetricSpace, forest: &InitialForest) -> Result<CoarsenedGraph> {
    let t = forest.t();
    if t < 2 {
        return Err(Error::Argument(format!("exact_coarsened needs t >= 2, got {t}")));
    }
    let pairs = CoarsenedGraph::pairs(t);
    let entries: Vec<(f64, (usize, usize))> = pairs
        .par_iter()
        .map(|&(i, j)| {
            space.set_distance(forest.partition.members(i), forest.partition.members(j))
        })
        .collect::<Result<_>>()?;
    let mut graph = CoarsenedGraph::empty(t);
    for (&(i, j), (w, pair)) in pairs.iter().zip(entries) {
        let slot = graph.slot(i, j);
        graph.weights[slot] = w;
        graph.witnesses[slot] = pair;
    }
    Ok(graph)
}

/// Representative-restricted weights: each entry is the smaller of the
/// two directed closest-pair problems `d(P_i, R_j)` and `d(P_j, R_i)`,
/// with ties keeping the first direction. `|P_i||R_j| + |P_j||R_i|`
/// distance queries per pair.
pub fn multirep_coarsened(
    space: &MetricSpace,
    forest: &InitialForest,
    reps: &RepAssignment,
) -> Result<CoarsenedGraph> {
    reps.validate_for(forest)?;
    let t = forest.t();
    let pairs = CoarsenedGraph::pairs(t);
    let entries: Vec<(f64, (usize, usize))> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (w_ij, pair_ij) =
                space.set_distance(forest.partition.members(i), &reps.reps[j])?;
            let (w_ji, pair_ji) =
                space.set_distance(forest.partition.members(j), &reps.reps[i])?;
            Ok(if w_ij <= w_ji {
                (w_ij, pair_ij)
            } else {
                (w_ji, pair_ji)
            })
        })
        .collect::<Result<_>>()?;
    let mut graph = CoarsenedGraph::empty(t);
    for (&(i, j), (w, pair)) in pairs.iter().zip(entries) {
        let slot = graph.slot(i, j);
        graph.weights[slot] = w;
        graph.witnesses[slot] = pair;
    }
    Ok(graph)
}

/// Exact MST of the coarsened graph by Kruskal, edges ordered by
/// `(weight, i, j)`. Returns `t - 1` component pairs.
pub fn coarsened_mst(graph: &CoarsenedGraph) -> Vec<(usize, usize)> {
    let t = graph.t();
    if t <= 1 {
        return Vec::new();
    }
    let mut order = CoarsenedGraph::pairs(t);
    order.sort_by(|&(ai, aj), &(bi, bj)| {
        graph
            .weight(ai, aj)
            .total_cmp(&graph.weight(bi, bj))
            .then(ai.cmp(&bi))
            .then(aj.cmp(&bj))
    });
    let mut dsu = DisjointSets::new(t);
    let mut chosen = Vec::with_capacity(t - 1);
    for (i, j) in order {
        if dsu.union(i, j) {
            chosen.push((i, j));
            if chosen.len() == t - 1 {
                break;
            }
        }
    }
    chosen
}

/// A completed spanning tree: the initial forest plus `t - 1` witness
/// edges, with weight decomposition and query/runtime accounting.
#[derive(Debug, Clone)]
pub struct CompletionResult {
    /// Witness point pairs chosen by the coarsened MST, with weights.
    pub added_edges: Vec<Edge>,
    pub tree_weight: f64,
    pub forest_weight: f64,
    pub added_weight: f64,
    pub distance_calls: u64,
    pub elapsed_ms: f64,
}

impl CompletionResult {
    /// One stats line, then every tree edge (forest first, then added)
    /// as `u v w`.
    pub fn write_tree<W: Write>(&self, forest: &InitialForest, mut out: W) -> Result<()> {
        writeln!(
            out,
            "tree_weight={} forest_weight={} added_weight={} distance_calls={} elapsed_ms={}",
            self.tree_weight,
            self.forest_weight,
            self.added_weight,
            self.distance_calls,
            self.elapsed_ms
        )?;
        for e in forest.edges().iter().chain(self.added_edges.iter()) {
            writeln!(out, "{} {} {}", e.u, e.v, e.w)?;
        }
        Ok(())
    }
}

/// Maps the coarsened MST of `graph` back to witness point edges and
/// validates that the forest plus those edges is a spanning tree.
///
/// Performs no distance queries; weights are carried from the graph.
pub fn complete(
    space: &MetricSpace,
    forest: &InitialForest,
    graph: &CoarsenedGraph,
) -> Result<CompletionResult> {
    let started = Instant::now();
    if graph.t() != forest.t() {
        return Err(Error::Argument(format!(
            "coarsened graph has {} nodes, forest has {} components",
            graph.t(),
            forest.t()
        )));
    }
    let n = space.len();
    if n != forest.n() {
        return Err(Error::Argument("forest does not match the space".into()));
    }
    let added_edges: Vec<Edge> = coarsened_mst(graph)
        .into_iter()
        .map(|(i, j)| {
            let (u, v) = graph.witness(i, j);
            Edge::new(u, v, graph.weight(i, j))
        })
        .collect();

    // Spanning validation: the forest edges and the witness edges must
    // together form a tree on all n points.
    let forest_edges = forest.edges();
    if forest_edges.len() + added_edges.len() + 1 != n {
        return Err(Error::Internal(format!(
            "{} forest + {} added edges cannot span {n} points",
            forest_edges.len(),
            added_edges.len()
        )));
    }
    let mut dsu = DisjointSets::new(n);
    for e in forest_edges.iter().chain(added_edges.iter()) {
        if e.u >= n || e.v >= n || !dsu.union(e.u, e.v) {
            return Err(Error::Internal(format!(
                "edge ({}, {}) breaks the spanning tree (witness corruption?)",
                e.u, e.v
            )));
        }
    }
    if dsu.components() != 1 {
        return Err(Error::Internal("completed tree is not connected".into()));
    }

    let added_weight = weight_sum(&added_edges);
    Ok(CompletionResult {
        added_edges,
        tree_weight: forest.forest_weight + added_weight,
        forest_weight: forest.forest_weight,
        added_weight,
        distance_calls: 0,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Optimal forest completion: exact coarsened weights, then the
/// coarsened MST. `sum_{i<j} |P_i||P_j|` distance queries.
pub fn mfc_opt(space: &MetricSpace, forest: &InitialForest) -> Result<CompletionResult> {
    let started = Instant::now();
    let before = space.distance_calls();
    let graph = if forest.t() == 1 {
        CoarsenedGraph::empty(1)
    } else {
        exact_coarsened(space, forest)?
    };
    let mut result = complete(space, forest, &graph)?;
    result.distance_calls = space.distance_calls() - before;
    result.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(result)
}

/// Approximate forest completion through the given representatives:
/// representative-restricted weights, then the coarsened MST.
pub fn multirep_mfc(
    space: &MetricSpace,
    forest: &InitialForest,
    reps: &RepAssignment,
) -> Result<CompletionResult> {
    let started = Instant::now();
    let before = space.distance_calls();
    let graph = multirep_coarsened(space, forest, reps)?;
    let mut result = complete(space, forest, &graph)?;
    result.distance_calls = space.distance_calls() - before;
    result.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(result)
}
