//! Initial-forest construction: k-center partitioning with exact
//! per-component spanning trees, early-terminated Kruskal forests, and
//! the gamma-overlap quality measure.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::union_find::DisjointSets;
use crate::DENSE_MATRIX_LIMIT;

/// A weighted edge between two point indices, normalized so `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(a: usize, b: usize, w: f64) -> Self {
        let (u, v) = if a <= b { (a, b) } else { (b, a) };
        Edge { u, v, w }
    }
}

/// Sum of edge weights in a canonical order (sorted by weight, then
/// endpoints), so that equal edge multisets always sum to bit-identical
/// totals regardless of how they were produced.
pub fn weight_sum(edges: &[Edge]) -> f64 {
    let mut order: Vec<&Edge> = edges.iter().collect();
    order.sort_by(|a, b| {
        a.w.total_cmp(&b.w)
            .then(a.u.cmp(&b.u))
            .then(a.v.cmp(&b.v))
    });
    order.iter().map(|e| e.w).sum()
}

/// A partition of point indices into `t` nonempty components.
///
/// Components are labeled canonically: sorted ascending by smallest
/// member index, so component 0 always contains point 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    assignment: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a canonical partition from a raw per-point component map.
    pub fn from_assignment(raw: &[usize]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Argument("partition of an empty point set".into()));
        }
        let t = raw.iter().max().unwrap() + 1;
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); t];
        for (p, &c) in raw.iter().enumerate() {
            members[c].push(p);
        }
        if members.iter().any(|m| m.is_empty()) {
            return Err(Error::Argument("partition has an empty component".into()));
        }
        // Canonical relabel: order components by smallest member.
        members.sort_by_key(|m| m[0]);
        let mut assignment = vec![0usize; raw.len()];
        for (c, m) in members.iter().enumerate() {
            for &p in m {
                assignment[p] = c;
            }
        }
        Ok(Partition { assignment, members })
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn t(&self) -> usize {
        self.members.len()
    }

    pub fn component_of(&self, point: usize) -> usize {
        self.assignment[point]
    }

    pub fn members(&self, component: usize) -> &[usize] {
        &self.members[component]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }
}

/// A partition together with a spanning tree per component.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialForest {
    pub partition: Partition,
    /// `trees[i]` spans `partition.members(i)` with `|P_i| - 1` edges.
    pub trees: Vec<Vec<Edge>>,
    pub forest_weight: f64,
}

impl InitialForest {
    /// Validates the spanning-tree invariants and computes the canonical
    /// forest weight.
    pub fn from_parts(partition: Partition, trees: Vec<Vec<Edge>>) -> Result<Self> {
        if trees.len() != partition.t() {
            return Err(Error::Argument(format!(
                "{} trees for {} components",
                trees.len(),
                partition.t()
            )));
        }
        for (c, tree) in trees.iter().enumerate() {
            let members = partition.members(c);
            if tree.len() + 1 != members.len() {
                return Err(Error::Argument(format!(
                    "component {c}: {} edges for {} members",
                    tree.len(),
                    members.len()
                )));
            }
            let mut dsu = DisjointSets::new(partition.n());
            for e in tree {
                if partition.component_of(e.u) != c || partition.component_of(e.v) != c {
                    return Err(Error::Argument(format!(
                        "component {c}: edge ({}, {}) leaves the component",
                        e.u, e.v
                    )));
                }
                if !dsu.union(e.u, e.v) {
                    return Err(Error::Argument(format!(
                        "component {c}: edge ({}, {}) closes a cycle",
                        e.u, e.v
                    )));
                }
            }
            // n - len(tree) components in the DSU means the tree connects
            // all members exactly when it is acyclic with |P_i| - 1 edges,
            // which the two checks above establish.
        }
        let all: Vec<Edge> = trees.iter().flatten().copied().collect();
        let forest_weight = weight_sum(&all);
        Ok(InitialForest {
            partition,
            trees,
            forest_weight,
        })
    }

    pub fn n(&self) -> usize {
        self.partition.n()
    }

    pub fn t(&self) -> usize {
        self.partition.t()
    }

    /// All forest edges, flattened. Total count is `n - t`.
    pub fn edges(&self) -> Vec<Edge> {
        self.trees.iter().flatten().copied().collect()
    }

    /// Serializes as a line `n t` followed by one `u v w c` line per edge,
    /// where `c` is the component id.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.n(), self.t())?;
        for (c, tree) in self.trees.iter().enumerate() {
            for e in tree {
                writeln!(out, "{} {} {} {}", e.u, e.v, e.w, c)?;
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }

    /// Reads the format written by [`InitialForest::write_to`]. Points not
    /// covered by any edge are singleton components; they take the unused
    /// component ids in ascending point order, which reproduces the
    /// canonical labeling.
    pub fn read_from<R: BufRead>(reader: R, path: &Path) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let header = match lines.next() {
            Some((_, line)) => line?,
            None => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: 1,
                    msg: "empty forest file".into(),
                })
            }
        };
        let parse_err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut head = header.split_whitespace();
        let n: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(1, "expected 'n t' header".into()))?;
        let t: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(1, "expected 'n t' header".into()))?;

        let mut edges: Vec<(Edge, usize)> = Vec::new();
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut f = line.split_whitespace();
            let mut field = |name: &str| {
                f.next()
                    .map(str::to_owned)
                    .ok_or_else(|| parse_err(idx + 1, format!("missing field {name}")))
            };
            let u: usize = field("u")?
                .parse()
                .map_err(|e| parse_err(idx + 1, format!("bad u: {e}")))?;
            let v: usize = field("v")?
                .parse()
                .map_err(|e| parse_err(idx + 1, format!("bad v: {e}")))?;
            let w: f64 = field("w")?
                .parse()
                .map_err(|e| parse_err(idx + 1, format!("bad w: {e}")))?;
            let c: usize = field("c")?
                .parse()
                .map_err(|e| parse_err(idx + 1, format!("bad c: {e}")))?;
            if u >= n || v >= n || c >= t {
                return Err(parse_err(idx + 1, "index out of range".into()));
            }
            edges.push((Edge::new(u, v, w), c));
        }

        let mut assignment = vec![usize::MAX; n];
        for &(e, c) in &edges {
            for p in [e.u, e.v] {
                if assignment[p] != usize::MAX && assignment[p] != c {
                    return Err(Error::Config(format!(
                        "point {p} appears in components {} and {c}",
                        assignment[p]
                    )));
                }
                assignment[p] = c;
            }
        }
        let mut used = vec![false; t];
        for &c in assignment.iter().filter(|&&c| c != usize::MAX) {
            used[c] = true;
        }
        let mut free_ids = (0..t).filter(|&c| !used[c]);
        for a in assignment.iter_mut() {
            if *a == usize::MAX {
                *a = free_ids.next().ok_or_else(|| {
                    Error::Config("more singleton points than unused component ids".into())
                })?;
            }
        }
        let partition = Partition::from_assignment(&assignment)?;
        let mut trees: Vec<Vec<Edge>> = vec![Vec::new(); t];
        for (e, _) in edges {
            trees[partition.component_of(e.u)].push(e);
        }
        InitialForest::from_parts(partition, trees)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(BufReader::new(file), path)
    }
}

/// Output of the farthest-first traversal.
#[derive(Debug, Clone)]
pub struct KCenterRun {
    /// Centers in selection order; `centers[0]` is the seed.
    pub centers: Vec<usize>,
    /// `radii[j]` is the largest distance from any member to its nearest
    /// of the first `j + 1` centers. Non-increasing.
    pub radii: Vec<f64>,
    /// For each position in `members`, the index into `centers` of its
    /// nearest center (ties go to the earliest-selected center).
    pub assignment: Vec<usize>,
}

/// Farthest-first traversal (the greedy 2-approximation for k-center)
/// restricted to `members`, seeded at point `first`.
///
/// Performs exactly `k * |members|` distance evaluations. Ties in the
/// farthest-point selection go to the smallest point index.
pub fn gonzalez_kcenter(
    space: &MetricSpace,
    members: &[usize],
    k: usize,
    first: usize,
) -> Result<KCenterRun> {
    if k == 0 || k > members.len() {
        return Err(Error::Argument(format!(
            "k = {k} out of range for {} members",
            members.len()
        )));
    }
    let first_pos = members
        .iter()
        .position(|&m| m == first)
        .ok_or_else(|| Error::Argument(format!("first center {first} not in members")))?;

    let m = members.len();
    let mut centers = Vec::with_capacity(k);
    let mut radii = Vec::with_capacity(k);
    let mut assignment = vec![0usize; m];
    let mut nearest = vec![f64::INFINITY; m];
    let mut is_center = vec![false; m];

    let mut next_pos = first_pos;
    for j in 0..k {
        centers.push(members[next_pos]);
        is_center[next_pos] = true;
        let center = members[next_pos];
        for (pos, &p) in members.iter().enumerate() {
            let d = space.distance(center, p);
            if d < nearest[pos] {
                nearest[pos] = d;
                assignment[pos] = j;
            }
        }
        let mut radius = 0.0f64;
        for &d in &nearest {
            radius = radius.max(d);
        }
        radii.push(radius);
        if j + 1 < k {
            // Farthest non-center point; ties to the smallest point index.
            let mut best: Option<(f64, usize)> = None;
            for (pos, &p) in members.iter().enumerate() {
                if is_center[pos] {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bd, bp)) => nearest[pos] > bd || (nearest[pos] == bd && p < bp),
                };
                if better {
                    best = Some((nearest[pos], p));
                }
            }
            let (_, farthest) = best.expect("k <= |members| leaves a non-center");
            next_pos = members.iter().position(|&p| p == farthest).unwrap();
        }
    }
    Ok(KCenterRun {
        centers,
        radii,
        assignment,
    })
}

/// Exact MST of the complete graph on `members` under the space's metric,
/// by dense Prim. Ties are broken by point index, so the result is
/// independent of the order of `members`.
pub fn exact_component_mst(space: &MetricSpace, members: &[usize]) -> Result<Vec<Edge>> {
    if members.is_empty() {
        return Err(Error::Argument("MST of an empty member list".into()));
    }
    let m = members.len();
    if m == 1 {
        return Ok(Vec::new());
    }
    let start = members
        .iter()
        .enumerate()
        .min_by_key(|&(_, &p)| p)
        .map(|(pos, _)| pos)
        .unwrap();

    let mut in_tree = vec![false; m];
    let mut best = vec![f64::INFINITY; m];
    let mut parent = vec![usize::MAX; m];
    in_tree[start] = true;
    for pos in 0..m {
        if pos != start {
            best[pos] = space.distance(members[start], members[pos]);
            parent[pos] = members[start];
        }
    }

    let mut edges = Vec::with_capacity(m - 1);
    for _ in 1..m {
        let mut pick: Option<usize> = None;
        for pos in 0..m {
            if in_tree[pos] {
                continue;
            }
            let better = match pick {
                None => true,
                Some(q) => {
                    best[pos] < best[q] || (best[pos] == best[q] && members[pos] < members[q])
                }
            };
            if better {
                pick = Some(pos);
            }
        }
        let pos = pick.unwrap();
        in_tree[pos] = true;
        edges.push(Edge::new(parent[pos], members[pos], best[pos]));
        for other in 0..m {
            if in_tree[other] {
                continue;
            }
            let d = space.distance(members[pos], members[other]);
            if d < best[other] || (d == best[other] && members[pos] < parent[other]) {
                best[other] = d;
                parent[other] = members[pos];
            }
        }
    }
    Ok(edges)
}

/// Builds the initial forest: k-center partition with `k = t` seeded at
/// `first`, then an exact MST per component.
pub fn build_initial_forest(space: &MetricSpace, t: usize, first: usize) -> Result<InitialForest> {
    let n = space.len();
    if t == 0 || t > n {
        return Err(Error::Argument(format!("t = {t} out of range for n = {n}")));
    }
    if first >= n {
        return Err(Error::Argument(format!("first center {first} out of range")));
    }
    let members: Vec<usize> = (0..n).collect();
    let run = gonzalez_kcenter(space, &members, t, first)?;
    let partition = Partition::from_assignment(&run.assignment)?;
    let trees: Vec<Vec<Edge>> = (0..partition.t())
        .into_par_iter()
        .map(|c| exact_component_mst(space, partition.members(c)))
        .collect::<Result<_>>()?;
    InitialForest::from_parts(partition, trees)
}

/// All-pairs edges of the space, normalized and sorted by
/// `(weight, u, v)`.
fn full_sorted_edges(space: &MetricSpace) -> Vec<Edge> {
    let n = space.len();
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
    edges
}

/// Runs Kruskal over the full distance matrix and stops when exactly `t`
/// components remain. When the MST is unique the result has
/// gamma-overlap 1 by construction.
pub fn truncated_kruskal_forest(space: &MetricSpace, t: usize) -> Result<InitialForest> {
    let n = space.len();
    if t == 0 || t > n {
        return Err(Error::Argument(format!("t = {t} out of range for n = {n}")));
    }
    let mut dsu = DisjointSets::new(n);
    let mut chosen: Vec<Edge> = Vec::with_capacity(n - t);
    if t < n {
        for e in full_sorted_edges(space) {
            if dsu.union(e.u, e.v) {
                chosen.push(e);
                if dsu.components() == t {
                    break;
                }
            }
        }
    }
    let mut roots = DisjointSets::new(n);
    for e in &chosen {
        roots.union(e.u, e.v);
    }
    let mut raw = vec![0usize; n];
    let mut label_of_root = std::collections::HashMap::new();
    let mut next = 0usize;
    for p in 0..n {
        let r = roots.find(p);
        let label = *label_of_root.entry(r).or_insert_with(|| {
            let l = next;
            next += 1;
            l
        });
        raw[p] = label;
    }
    let partition = Partition::from_assignment(&raw)?;
    let mut trees: Vec<Vec<Edge>> = vec![Vec::new(); partition.t()];
    for e in chosen {
        trees[partition.component_of(e.u)].push(e);
    }
    InitialForest::from_parts(partition, trees)
}

/// Result of [`gamma_overlap`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaOverlap {
    /// Forest weight divided by the weight the reference MST places
    /// inside components. `f64::INFINITY` when the MST has no internal
    /// edge but the forest has weight; 1.0 when both are zero.
    pub value: f64,
    /// True when equal-weight edges were encountered among the edges the
    /// MST construction examined. Without ties the MST is unique and the
    /// value is exact by uniqueness alone.
    pub weight_ties: bool,
}

/// Computes the overlap quality of a forest against one full MST of the
/// space.
///
/// The MST is built by Kruskal with edges ordered by weight, then
/// internal-before-cross relative to the forest's partition, then by
/// endpoints. Among equal-weight candidates this greedy choice keeps as
/// many internal edges as the matroid allows at every step, so the
/// internal weight it accumulates is the maximum over all MSTs and the
/// returned value equals forest weight over that maximum.
pub fn gamma_overlap(space: &MetricSpace, forest: &InitialForest) -> Result<GammaOverlap> {
    let n = space.len();
    if n != forest.n() {
        return Err(Error::Argument(format!(
            "forest has {} points, space has {n}",
            forest.n()
        )));
    }
    if n > DENSE_MATRIX_LIMIT {
        return Err(Error::SizeGuard(format!(
            "gamma_overlap needs the full distance matrix; n = {n} exceeds {DENSE_MATRIX_LIMIT}"
        )));
    }
    if n == 1 {
        return Ok(GammaOverlap {
            value: 1.0,
            weight_ties: false,
        });
    }
    let mut edges = full_sorted_edges(space);
    let internal =
        |e: &Edge| forest.partition.component_of(e.u) == forest.partition.component_of(e.v);
    edges.sort_by(|a, b| {
        a.w.total_cmp(&b.w)
            .then(internal(b).cmp(&internal(a)))
            .then(a.u.cmp(&b.u))
            .then(a.v.cmp(&b.v))
    });

    let mut dsu = DisjointSets::new(n);
    let mut internal_edges: Vec<Edge> = Vec::new();
    let mut examined = 0usize;
    for (idx, e) in edges.iter().enumerate() {
        examined = idx;
        if dsu.union(e.u, e.v) {
            if internal(e) {
                internal_edges.push(*e);
            }
            if dsu.components() == 1 {
                break;
            }
        }
    }
    let weight_ties = edges[..=examined].windows(2).any(|w| w[0].w == w[1].w);
    let denominator = weight_sum(&internal_edges);
    let value = if denominator == 0.0 {
        if forest.forest_weight == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        forest.forest_weight / denominator
    };
    Ok(GammaOverlap { value, weight_ties })
}

/// Exhaustive optimal k-center over all center subsets. Oracle for the
/// greedy's 2-approximation guarantee; guarded to tiny inputs.
pub fn brute_force_kcenter(
    space: &MetricSpace,
    members: &[usize],
    k: usize,
) -> Result<(Vec<usize>, f64)> {
    let m = members.len();
    if k == 0 || k > m {
        return Err(Error::Argument(format!("k = {k} out of range")));
    }
    if m > 15 || k > 6 {
        return Err(Error::SizeGuard(format!(
            "brute_force_kcenter limited to 15 members / k <= 6, got {m} / {k}"
        )));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let centers: Vec<usize> = subset.iter().map(|&pos| members[pos]).collect();
        let mut radius = 0.0f64;
        for &p in members {
            let mut near = f64::INFINITY;
            for &c in &centers {
                near = near.min(space.distance(c, p));
            }
            radius = radius.max(near);
        }
        if best.as_ref().map_or(true, |(r, _)| radius < *r) {
            best = Some((radius, centers));
        }
        // Next k-combination in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                let (radius, centers) = best.unwrap();
                return Ok((centers, radius));
            }
            i -= 1;
            if subset[i] != i + m - k {
                subset[i] += 1;
                for j in (i + 1)..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}
