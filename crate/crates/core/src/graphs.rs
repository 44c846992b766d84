//! Labeled graphs, couplings and the graph families used throughout.
//!
//! Vertices are `0..n` internally; the `Display` impls and every file format
//! shift to the 1-based labels used in the literature.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{DenseSymmetric, Permutation};

/// Relative pattern threshold: `|n_ij| > 1e-10 · max|n|` is an edge.
pub const DEFAULT_ZERO_REL_TOL: f64 = 1e-10;

/// Largest order accepted by [`enumerate_couplings`] without an explicit limit.
pub const COUPLING_ENUMERATION_LIMIT: usize = 12;

/// Largest `p` accepted by [`representative_labelings`] without an explicit limit.
pub const LABELING_ENUMERATION_LIMIT: usize = 5;

/// Simple undirected graph on vertices `0..order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledGraph {
    order: usize,
    /// Pairs `(i, j)` with `i < j`.
    edges: BTreeSet<(usize, usize)>,
}

impl LabeledGraph {
    pub fn empty(order: usize) -> Self {
        LabeledGraph {
            order,
            edges: BTreeSet::new(),
        }
    }

    /// Builds a graph from 0-based edges, rejecting loops and out of range
    /// vertices. Duplicates collapse.
    pub fn from_edges(order: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(order);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Same as [`from_edges`](Self::from_edges) but with 1-based labels.
    pub fn from_one_based(order: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut shifted = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == 0 || b == 0 {
                return Err(Error::InvalidGraph("labels start at 1".into()));
            }
            shifted.push((a - 1, b - 1));
        }
        Self::from_edges(order, &shifted)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(Error::InvalidGraph(format!("loop at vertex {}", a + 1)));
        }
        if a >= self.order || b >= self.order {
            return Err(Error::InvalidGraph(format!(
                "edge {{{}, {}}} outside 1..{}",
                a + 1,
                b + 1,
                self.order
            )));
        }
        self.edges.insert((a.min(b), a.max(b)));
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Edges as 1-based pairs.
    pub fn edges_one_based(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&(a, b)| (a + 1, b + 1)).collect()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.order)
            .filter(|&w| w != v && self.has_edge(v, w))
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.order).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Neighbourhoods as bitmasks; requires `order <= 64`.
    pub fn neighbor_masks(&self) -> Vec<u64> {
        assert!(self.order <= 64, "bitmask form needs at most 64 vertices");
        let mut masks = vec![0u64; self.order];
        for &(a, b) in &self.edges {
            masks[a] |= 1 << b;
            masks[b] |= 1 << a;
        }
        masks
    }

    /// Vertex sets of the connected components, each sorted, ordered by
    /// smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj: Vec<Vec<usize>> = (0..self.order).map(|v| self.neighbors(v)).collect();
        let mut seen = vec![false; self.order];
        let mut out = Vec::new();
        for s in 0..self.order {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.order > 0 && self.components().len() == 1
    }

    pub fn is_tree(&self) -> bool {
        self.order > 0 && self.edge_count() + 1 == self.order && self.is_connected()
    }

    pub fn complement(&self) -> Self {
        let mut g = Self::empty(self.order);
        for j in 0..self.order {
            for i in 0..j {
                if !self.has_edge(i, j) {
                    g.edges.insert((i, j));
                }
            }
        }
        g
    }

    /// Union of the edge sets of two graphs of the same order.
    pub fn union(&self, other: &LabeledGraph) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::DimensionMismatch {
                expected: self.order,
                found: other.order,
            });
        }
        let mut g = self.clone();
        g.edges.extend(other.edges.iter().copied());
        Ok(g)
    }

    /// Moves vertex `i` to `σ(i)`.
    pub fn relabel(&self, sigma: &Permutation) -> Result<Self> {
        if sigma.len() != self.order {
            return Err(Error::DimensionMismatch {
                expected: self.order,
                found: sigma.len(),
            });
        }
        let mut g = Self::empty(self.order);
        for &(a, b) in &self.edges {
            g.add_edge(sigma.apply(a), sigma.apply(b))?;
        }
        Ok(g)
    }

    /// Is `(i, j)` a zero position (an off-diagonal non-edge)?
    pub fn is_non_edge(&self, i: usize, j: usize) -> bool {
        i != j && !self.has_edge(i, j)
    }

    /// Non-edges `(i, j)`, `i < j`, in column-major upper-triangle order.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.order {
            for i in 0..j {
                if !self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

impl fmt::Display for LabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "order {}: {{", self.order)?;
        for (k, (a, b)) in self.edges_one_based().into_iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}{b}")?;
        }
        write!(f, "}}")
    }
}

/// Partition of `0..2p` into `p` unordered pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coupling {
    /// Sorted, each pair with its smaller vertex first.
    pairs: Vec<(usize, usize)>,
}

impl Coupling {
    pub fn new(order: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if order % 2 == 1 {
            return Err(Error::OddOrder(order));
        }
        if pairs.len() * 2 != order {
            return Err(Error::InvalidCoupling(format!(
                "{} pairs cannot cover {} vertices",
                pairs.len(),
                order
            )));
        }
        let mut seen = vec![false; order];
        let mut norm = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            for v in [a, b] {
                if v >= order {
                    return Err(Error::InvalidCoupling(format!(
                        "vertex {} out of range",
                        v + 1
                    )));
                }
                if seen[v] {
                    return Err(Error::InvalidCoupling(format!(
                        "vertex {} appears twice",
                        v + 1
                    )));
                }
                seen[v] = true;
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        Ok(Coupling { pairs: norm })
    }

    pub fn from_one_based(order: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if pairs.iter().any(|&(a, b)| a == 0 || b == 0) {
            return Err(Error::InvalidCoupling("labels start at 1".into()));
        }
        let shifted: Vec<_> = pairs.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
        Self::new(order, &shifted)
    }

    /// `{(i, i+p)}`: the coupling carried by every labeling that keeps
    /// `{k, k+p}` together.
    pub fn standard(p: usize) -> Self {
        Coupling {
            pairs: (0..p).map(|i| (i, i + p)).collect(),
        }
    }

    /// `{(0,1), (2,3), …}`, the matching along a path.
    pub fn consecutive(p: usize) -> Self {
        Coupling {
            pairs: (0..p).map(|i| (2 * i, 2 * i + 1)).collect(),
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pairs_one_based(&self) -> Vec<(usize, usize)> {
        self.pairs.iter().map(|&(a, b)| (a + 1, b + 1)).collect()
    }

    pub fn half_order(&self) -> usize {
        self.pairs.len()
    }

    pub fn order(&self) -> usize {
        2 * self.pairs.len()
    }

    /// The vertex coupled with `v`.
    pub fn partner(&self, v: usize) -> usize {
        for &(a, b) in &self.pairs {
            if a == v {
                return b;
            }
            if b == v {
                return a;
            }
        }
        panic!("vertex {v} not covered by the coupling");
    }

    /// The coupling as a graph: one edge per pair.
    pub fn as_graph(&self) -> LabeledGraph {
        let mut g = LabeledGraph::empty(self.order());
        for &(a, b) in &self.pairs {
            g.edges.insert((a, b));
        }
        g
    }

    /// Image of the coupling under a relabeling.
    pub fn relabel(&self, sigma: &Permutation) -> Result<Self> {
        let pairs: Vec<_> = self
            .pairs
            .iter()
            .map(|&(a, b)| (sigma.apply(a), sigma.apply(b)))
            .collect();
        Self::new(self.order(), &pairs)
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (a, b)) in self.pairs_one_based().into_iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({a},{b})")?;
        }
        write!(f, "}}")
    }
}

/// A graph together with a coupling of its vertex names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoupledGraph {
    pub graph: LabeledGraph,
    pub coupling: Coupling,
}

impl CoupledGraph {
    pub fn new(graph: LabeledGraph, coupling: Coupling) -> Result<Self> {
        if graph.order() != coupling.order() {
            return Err(Error::InvalidCoupling(format!(
                "coupling covers {} vertices, graph has {}",
                coupling.order(),
                graph.order()
            )));
        }
        Ok(CoupledGraph { graph, coupling })
    }

    /// A labeled graph of even order read with the coupling `{(i, i+p)}`.
    pub fn standard(graph: LabeledGraph) -> Result<Self> {
        if graph.order() % 2 == 1 {
            return Err(Error::OddOrder(graph.order()));
        }
        let p = graph.order() / 2;
        Self::new(graph, Coupling::standard(p))
    }

    pub fn order(&self) -> usize {
        self.graph.order()
    }

    /// The labeled graph obtained by giving name `v` the label `σ(v)`.
    pub fn labeled(&self, sigma: &Permutation) -> Result<LabeledGraph> {
        self.graph.relabel(sigma)
    }

    /// A representative labeling under which `target` is this coupled
    /// graph, if one exists.
    pub fn find_labeling(&self, target: &LabeledGraph) -> Result<Option<Permutation>> {
        if target.order() != self.order() || target.edge_count() != self.graph.edge_count() {
            return Ok(None);
        }
        for sigma in representative_labelings(self)? {
            if &self.graph.relabel(&sigma)? == target {
                return Ok(Some(sigma));
            }
        }
        Ok(None)
    }
}

/// Off-diagonal pattern `{i, j}` with `|n_ij| > zero_tol`.
pub fn graph_of_matrix(n: &DenseSymmetric, zero_tol: f64) -> LabeledGraph {
    let mut g = LabeledGraph::empty(n.order());
    for j in 0..n.order() {
        for i in 0..j {
            if n.get(i, j).abs() > zero_tol {
                g.edges.insert((i, j));
            }
        }
    }
    g
}

/// `1e-10 · max|n_ij|`.
pub fn default_zero_tol(n: &DenseSymmetric) -> f64 {
    DEFAULT_ZERO_REL_TOL * n.max_abs()
}

pub fn complement(g: &LabeledGraph) -> LabeledGraph {
    g.complement()
}

/// `G(𝔠)`: the graph with an edge added between every coupled pair.
pub fn coupling_closure_graph(cg: &CoupledGraph) -> LabeledGraph {
    let mut g = cg.graph.clone();
    for &(a, b) in cg.coupling.pairs() {
        g.edges.insert((a, b));
    }
    g
}

/// All `(n-1)!!` couplings of `0..n`, for `n <= 12`.
pub fn enumerate_couplings(n: usize) -> Result<Vec<Coupling>> {
    enumerate_couplings_with_limit(n, COUPLING_ENUMERATION_LIMIT)
}

pub fn enumerate_couplings_with_limit(n: usize, limit: usize) -> Result<Vec<Coupling>> {
    if n % 2 == 1 {
        return Err(Error::OddOrder(n));
    }
    if n > limit {
        return Err(Error::SizeGuard { size: n, limit });
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n / 2);
    let remaining: Vec<usize> = (0..n).collect();
    pairings(&remaining, &mut current, &mut out);
    Ok(out)
}

fn pairings(remaining: &[usize], current: &mut Vec<(usize, usize)>, out: &mut Vec<Coupling>) {
    let Some((&first, rest)) = remaining.split_first() else {
        let mut pairs = current.clone();
        pairs.sort_unstable();
        out.push(Coupling { pairs });
        return;
    };
    for k in 0..rest.len() {
        current.push((first, rest[k]));
        let others: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, &v)| v)
            .collect();
        pairings(&others, current, out);
        current.pop();
    }
}

/// The `2^p · p!` labelings `σ` that put every coupled pair on labels
/// `{k, k+p}` for some `k`, sorted lexicographically by image.
pub fn representative_labelings(cg: &CoupledGraph) -> Result<Vec<Permutation>> {
    representative_labelings_with_limit(cg, LABELING_ENUMERATION_LIMIT)
}

pub fn representative_labelings_with_limit(
    cg: &CoupledGraph,
    limit: usize,
) -> Result<Vec<Permutation>> {
    let p = cg.coupling.half_order();
    if p > limit {
        return Err(Error::SizeGuard { size: p, limit });
    }
    let pairs = cg.coupling.pairs();
    let mut out = Vec::new();
    let mut slots: Vec<usize> = (0..p).collect();
    permute_slots(&mut slots, 0, &mut |slots| {
        for flips in 0..(1u32 << p) {
            let mut images = vec![0; 2 * p];
            for (k, &(a, b)) in pairs.iter().enumerate() {
                let (lo, hi) = (slots[k], slots[k] + p);
                if flips >> k & 1 == 0 {
                    images[a] = lo;
                    images[b] = hi;
                } else {
                    images[a] = hi;
                    images[b] = lo;
                }
            }
            out.push(Permutation::new(images).expect("labeling is a bijection"));
        }
    });
    out.sort();
    Ok(out)
}

fn permute_slots(a: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == a.len() {
        f(a);
        return;
    }
    for i in k..a.len() {
        a.swap(k, i);
        permute_slots(a, k + 1, f);
        a.swap(k, i);
    }
}

/// `K_n`.
pub fn complete(n: usize) -> LabeledGraph {
    LabeledGraph::empty(n).complement()
}

/// `P_n` on `0 - 1 - … - (n-1)`.
pub fn path(n: usize) -> LabeledGraph {
    let mut g = LabeledGraph::empty(n);
    for i in 1..n {
        g.edges.insert((i - 1, i));
    }
    g
}

/// `C_n` on `0 - 1 - … - (n-1) - 0`, for `n >= 3`.
pub fn cycle(n: usize) -> Result<LabeledGraph> {
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "a cycle needs at least 3 vertices, got {n}"
        )));
    }
    let mut g = path(n);
    g.edges.insert((0, n - 1));
    Ok(g)
}

/// `P_{2p}` with the coupling `{(v1,v2), (v3,v4), …}`.
pub fn path_coupled(p: usize) -> Result<CoupledGraph> {
    CoupledGraph::new(path(2 * p), Coupling::consecutive(p))
}

/// `C_{2p}` with the coupling `{(v1,v2), (v3,v4), …}`.
pub fn cycle_coupled(p: usize) -> Result<CoupledGraph> {
    CoupledGraph::new(cycle(2 * p)?, Coupling::consecutive(p))
}

/// `K_{p,p}` with parts `{1..p}` and `{p+1..2p}`, coupled by `{(i, i+p)}`.
pub fn complete_bipartite_m(p: usize) -> Result<CoupledGraph> {
    if p == 0 {
        return Err(Error::InvalidInput("p must be positive".into()));
    }
    let mut g = LabeledGraph::empty(2 * p);
    for i in 0..p {
        for j in p..2 * p {
            g.edges.insert((i, j));
        }
    }
    CoupledGraph::standard(g)
}

/// `K̄_p ∨ K_p`: an independent set `{1..p}` joined to a clique
/// `{p+1..2p}`, coupled by `{(i, i+p)}`.
pub fn join_kbar_k_m(p: usize) -> Result<CoupledGraph> {
    if p == 0 {
        return Err(Error::InvalidInput("p must be positive".into()));
    }
    let mut g = LabeledGraph::empty(2 * p);
    for j in p..2 * p {
        for i in 0..j {
            g.edges.insert((i, j));
        }
    }
    CoupledGraph::standard(g)
}

/// Path adjacency on `p` vertices with a loop at the first vertex.
pub fn tripath_b_pattern(p: usize) -> Vec<Vec<bool>> {
    let mut b = vec![vec![false; p]; p];
    if p > 0 {
        b[0][0] = true;
    }
    for i in 1..p {
        b[i - 1][i] = true;
        b[i][i - 1] = true;
    }
    b
}

/// The standard labeled triangular path `TP_{2p}`: the graph of
/// `[[I, B], [B, I + B²]]` for the looped path pattern `B`.
pub fn tripath(n: usize) -> Result<CoupledGraph> {
    if n % 2 == 1 {
        return Err(Error::OddOrder(n));
    }
    if n < 4 {
        return Err(Error::InvalidInput(format!(
            "triangular paths need order at least 4, got {n}"
        )));
    }
    let p = n / 2;
    let b = tripath_b_pattern(p);
    let mut g = LabeledGraph::empty(n);
    for i in 0..p {
        for j in 0..p {
            if b[i][j] {
                g.edges.insert((i, j + p));
            }
        }
    }
    for j in 0..p {
        for i in 0..j {
            if (0..p).any(|k| b[i][k] && b[k][j]) {
                g.edges.insert((i + p, j + p));
            }
        }
    }
    CoupledGraph::standard(g)
}

/// `H ∘ K₁`: leaves get labels `1..p`, the vertices of `H` get `p+1..2p`,
/// and leaf `i` hangs from `p+i`. The coupling pairs each leaf with its
/// neighbour.
pub fn corona(h: &LabeledGraph) -> Result<CoupledGraph> {
    let p = h.order();
    if p == 0 {
        return Err(Error::InvalidInput("corona of the empty graph".into()));
    }
    let mut g = LabeledGraph::empty(2 * p);
    for i in 0..p {
        g.edges.insert((i, i + p));
    }
    for (a, b) in h.edges() {
        g.edges.insert((a + p, b + p));
    }
    CoupledGraph::standard(g)
}

/// Trees whose non-leaf vertices induce a path.
pub fn is_caterpillar(g: &LabeledGraph) -> bool {
    if !g.is_tree() {
        return false;
    }
    let spine: Vec<usize> = (0..g.order()).filter(|&v| g.degree(v) > 1).collect();
    // The spine of a tree is a subtree; it is a path iff no vertex has more
    // than two spine neighbours.
    spine
        .iter()
        .all(|&v| spine.iter().filter(|&&w| g.has_edge(v, w)).count() <= 2)
}

/// The unique perfect matching of a tree, if it exists, found by matching
/// leaves with their neighbours.
pub fn tree_perfect_matching(g: &LabeledGraph) -> Result<Option<Coupling>> {
    if !g.is_tree() {
        return Err(Error::NotATree);
    }
    let n = g.order();
    if n % 2 == 1 {
        return Ok(None);
    }
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v)).collect();
    let mut pairs = Vec::with_capacity(n / 2);
    let mut remaining = n;
    while remaining > 0 {
        let Some(leaf) = (0..n).find(|&v| alive[v] && deg[v] <= 1) else {
            return Ok(None);
        };
        let Some(&mate) = adj[leaf].iter().find(|&&w| alive[w]) else {
            return Ok(None);
        };
        for v in [leaf, mate] {
            alive[v] = false;
            for &w in &adj[v] {
                deg[w] = deg[w].saturating_sub(1);
            }
        }
        pairs.push((leaf, mate));
        remaining -= 2;
    }
    Ok(Some(Coupling::new(n, &pairs)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_extraction() {
        assert_eq!(
            graph_of_matrix(&DenseSymmetric::identity(4), 0.0).edge_count(),
            0
        );
        let m = DenseSymmetric::from_rows(&[vec![1.0, 1e-13], vec![1e-13, 1.0]]).unwrap();
        assert_eq!(graph_of_matrix(&m, default_zero_tol(&m)).edge_count(), 0);
        assert_eq!(graph_of_matrix(&m, 0.0).edge_count(), 1);
    }

    #[test]
    fn complement_of_c4() {
        let c4 = cycle(4).unwrap();
        let comp = c4.complement();
        assert_eq!(comp.edges_one_based(), vec![(1, 3), (2, 4)]);
        assert_eq!(complete(5).complement(), LabeledGraph::empty(5));
        assert_eq!(comp.complement(), c4);
    }

    #[test]
    fn closure_graph() {
        let cg = CoupledGraph::new(
            LabeledGraph::empty(4),
            Coupling::from_one_based(4, &[(1, 2), (3, 4)]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            coupling_closure_graph(&cg).edges_one_based(),
            vec![(1, 2), (3, 4)]
        );
        let cg = CoupledGraph::new(
            path(4),
            Coupling::from_one_based(4, &[(1, 3), (2, 4)]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            coupling_closure_graph(&cg).edges_one_based(),
            vec![(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]
        );
        let p6 = path_coupled(3).unwrap();
        assert_eq!(coupling_closure_graph(&p6), p6.graph);
    }

    #[test]
    fn coupling_counts() {
        assert_eq!(enumerate_couplings(2).unwrap().len(), 1);
        assert_eq!(enumerate_couplings(4).unwrap().len(), 3);
        assert_eq!(enumerate_couplings(6).unwrap().len(), 15);
        assert_eq!(enumerate_couplings(3), Err(Error::OddOrder(3)));
        assert!(matches!(
            enumerate_couplings(14),
            Err(Error::SizeGuard { .. })
        ));
        let all = enumerate_couplings(8).unwrap();
        let set: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), 105);
    }

    #[test]
    fn coupling_validation() {
        assert!(Coupling::from_one_based(4, &[(1, 2), (2, 3)]).is_err());
        assert!(Coupling::from_one_based(4, &[(1, 2)]).is_err());
        assert!(Coupling::from_one_based(4, &[(1, 5), (2, 3)]).is_err());
        let c = Coupling::from_one_based(4, &[(4, 1), (2, 3)]).unwrap();
        assert_eq!(c.partner(0), 3);
        assert_eq!(c.partner(2), 1);
    }

    #[test]
    fn labelings_for_p2_match_printed_order() {
        let cg = CoupledGraph::new(
            LabeledGraph::empty(4),
            Coupling::from_one_based(4, &[(1, 3), (2, 4)]).unwrap(),
        )
        .unwrap();
        let labs: Vec<Vec<usize>> = representative_labelings(&cg)
            .unwrap()
            .iter()
            .map(|s| s.one_based())
            .collect();
        let printed = vec![
            vec![1, 2, 3, 4],
            vec![1, 4, 3, 2],
            vec![2, 1, 4, 3],
            vec![2, 3, 4, 1],
            vec![3, 2, 1, 4],
            vec![3, 4, 1, 2],
            vec![4, 1, 2, 3],
            vec![4, 3, 2, 1],
        ];
        assert_eq!(labs, printed);
    }

    #[test]
    fn labeling_counts_and_guard() {
        let one = CoupledGraph::standard(LabeledGraph::empty(2)).unwrap();
        assert_eq!(representative_labelings(&one).unwrap().len(), 2);
        let three = CoupledGraph::standard(path(6)).unwrap();
        let labs = representative_labelings(&three).unwrap();
        assert_eq!(labs.len(), 48);
        let distinct: BTreeSet<_> = labs.iter().cloned().collect();
        assert_eq!(distinct.len(), 48);
        for sigma in &labs {
            assert_eq!(
                three.coupling.relabel(sigma).unwrap(),
                Coupling::standard(3)
            );
        }
        let six = CoupledGraph::standard(LabeledGraph::empty(12)).unwrap();
        assert!(matches!(
            representative_labelings(&six),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn tripath_shape() {
        for p in 2..=8 {
            let tp = tripath(2 * p).unwrap();
            assert_eq!(tp.graph.edge_count(), 3 * p - 2);
            assert!(tp.graph.is_connected());
        }
        // Neighbourhoods N(1) = {p+1, p+2}, N(p) = {2p-1} at p = 5.
        let tp = tripath(10).unwrap().graph;
        assert_eq!(tp.neighbors(0), vec![5, 6]);
        assert_eq!(tp.neighbors(4), vec![8]);
        assert!(tripath(2).is_err());
    }

    #[test]
    fn families() {
        let k22 = complete_bipartite_m(2).unwrap();
        assert_eq!(k22.graph.edge_count(), 4);
        assert!(k22.graph.neighbors(0) == vec![2, 3]);
        let j = join_kbar_k_m(3).unwrap();
        assert_eq!(j.graph.edge_count(), 9 + 3);
        let comb = corona(&path(3)).unwrap();
        assert!(comb.graph.is_tree());
        assert!(is_caterpillar(&comb.graph));
        assert_eq!(comb.coupling, Coupling::standard(3));
    }

    #[test]
    fn caterpillars_and_matchings() {
        let star = LabeledGraph::from_one_based(4, &[(1, 2), (1, 3), (1, 4)]).unwrap();
        assert!(is_caterpillar(&star));
        assert_eq!(tree_perfect_matching(&star).unwrap(), None);
        let p6 = path(6);
        assert_eq!(
            tree_perfect_matching(&p6).unwrap(),
            Some(Coupling::consecutive(3))
        );
        // Spider with three legs of length 2 is not a caterpillar.
        let spider =
            LabeledGraph::from_one_based(7, &[(1, 2), (2, 3), (1, 4), (4, 5), (1, 6), (6, 7)])
                .unwrap();
        assert!(!is_caterpillar(&spider));
        assert!(!is_caterpillar(&cycle(4).unwrap()));
        assert_eq!(
            tree_perfect_matching(&cycle(4).unwrap()),
            Err(Error::NotATree)
        );
    }
}
