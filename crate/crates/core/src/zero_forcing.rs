//! Coupled, loop and standard zero forcing.
//!
//! Vertex sets are `u64` bitmasks, so closures work up to 64 vertices; the
//! exhaustive minimum searches are guarded at 20.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{
    coupling_closure_graph, graph_of_matrix, is_caterpillar, tree_perfect_matching, CoupledGraph,
    LabeledGraph,
};
use crate::matrix::DenseSymmetric;
use crate::symplectic::{symplectic_spectrum, DEFAULT_CLUSTER_TOL};

/// Largest order searched exhaustively.
pub const SEARCH_LIMIT: usize = 20;

pub type VertexSet = u64;

pub fn to_mask(vertices: &[usize]) -> VertexSet {
    vertices.iter().fold(0, |m, &v| m | 1 << v)
}

pub fn from_mask(mask: VertexSet) -> Vec<usize> {
    (0..64).filter(|&v| mask >> v & 1 == 1).collect()
}

fn full(n: usize) -> VertexSet {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_order(n: usize) -> Result<()> {
    if n > 64 {
        return Err(Error::SizeGuard { size: n, limit: 64 });
    }
    Ok(())
}

/// Repeats both rules until nothing changes:
/// a blue `v` forces `w` when `w` is the only white vertex of `N(v)`, and a
/// white `v` with nonempty, all blue `N(v)` turns itself blue (loop rule
/// only).
fn closure(masks: &[VertexSet], mut blue: VertexSet, self_force: bool) -> VertexSet {
    let n = masks.len();
    loop {
        let before = blue;
        for v in 0..n {
            let nb = masks[v];
            let white = nb & !blue;
            if blue >> v & 1 == 1 {
                if white.count_ones() == 1 {
                    blue |= white;
                }
            } else if self_force && nb != 0 && white == 0 {
                blue |= 1 << v;
            }
        }
        if blue == before {
            return blue;
        }
    }
}

/// Final coloring under the loop rules on `G`.
pub fn loop_closure(g: &LabeledGraph, blue: VertexSet) -> Result<VertexSet> {
    check_order(g.order())?;
    Ok(closure(&g.neighbor_masks(), blue & full(g.order()), true))
}

/// Final coloring under the standard rule on `G`.
pub fn standard_closure(g: &LabeledGraph, blue: VertexSet) -> Result<VertexSet> {
    check_order(g.order())?;
    Ok(closure(&g.neighbor_masks(), blue & full(g.order()), false))
}

/// Coupled zero forcing, applied literally to `N(v) ∪ {𝔠(v)}`.
pub fn coupled_closure(cg: &CoupledGraph, blue: VertexSet) -> Result<VertexSet> {
    let n = cg.order();
    check_order(n)?;
    let mut masks = cg.graph.neighbor_masks();
    for (v, m) in masks.iter_mut().enumerate() {
        *m |= 1 << cg.coupling.partner(v);
    }
    Ok(closure(&masks, blue & full(n), true))
}

/// A minimum forcing set and its size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForcingNumber {
    pub number: usize,
    /// 0-based vertices of the first minimum set in colexicographic order.
    pub set: Vec<usize>,
}

fn minimum(n: usize, close: impl Fn(VertexSet) -> VertexSet) -> Result<ForcingNumber> {
    if n > SEARCH_LIMIT {
        return Err(Error::SizeGuard {
            size: n,
            limit: SEARCH_LIMIT,
        });
    }
    let all = full(n);
    for k in 0..=n {
        if k == 0 {
            if close(0) == all {
                return Ok(ForcingNumber {
                    number: 0,
                    set: vec![],
                });
            }
            continue;
        }
        // Gosper's hack over k-subsets of n.
        let mut s: u64 = (1 << k) - 1;
        while s <= all {
            if close(s) == all {
                return Ok(ForcingNumber {
                    number: k,
                    set: from_mask(s),
                });
            }
            let c = s & s.wrapping_neg();
            let r = s + c;
            s = (((r ^ s) >> 2) / c) | r;
        }
    }
    unreachable!("the full vertex set always forces")
}

/// `Z_C(G^𝔠)`.
pub fn zc_number(cg: &CoupledGraph) -> Result<ForcingNumber> {
    let n = cg.order();
    if n > SEARCH_LIMIT {
        return Err(Error::SizeGuard {
            size: n,
            limit: SEARCH_LIMIT,
        });
    }
    minimum(n, |b| coupled_closure(cg, b).expect("order checked"))
}

/// `Z_ℓ(G)`.
pub fn loop_zf_number(g: &LabeledGraph) -> Result<ForcingNumber> {
    let n = g.order();
    if n > SEARCH_LIMIT {
        return Err(Error::SizeGuard {
            size: n,
            limit: SEARCH_LIMIT,
        });
    }
    let masks = g.neighbor_masks();
    minimum(n, |b| closure(&masks, b, true))
}

/// `Z(G)`.
pub fn standard_zf_number(g: &LabeledGraph) -> Result<ForcingNumber> {
    let n = g.order();
    if n > SEARCH_LIMIT {
        return Err(Error::SizeGuard {
            size: n,
            limit: SEARCH_LIMIT,
        });
    }
    let masks = g.neighbor_masks();
    minimum(n, |b| closure(&masks, b, false))
}

/// `Z_C(G^𝔠) = 1` exactly when `G(𝔠)` is a caterpillar with a perfect
/// matching.
pub fn zc_equals_one(cg: &CoupledGraph) -> bool {
    let closed = coupling_closure_graph(cg);
    is_caterpillar(&closed) && matches!(tree_perfect_matching(&closed), Ok(Some(_)))
}

/// Maximum symplectic multiplicity of a matrix against `Z_C` of its coupled
/// graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MspReport {
    pub max_multiplicity: usize,
    pub zc: usize,
    pub holds: bool,
    /// 1-based labeling under which the coupled graph is the graph of `N`.
    pub labeling: Vec<usize>,
    pub cluster_tol: f64,
}

/// Checks `max multiplicity(N) <= Z_C(G^𝔠)` where the graph of `N` must be
/// a representative labeling of `cg`.
pub fn msp_upper_bound(n: &DenseSymmetric, cg: &CoupledGraph, zero_tol: f64) -> Result<MspReport> {
    let g = graph_of_matrix(n, zero_tol);
    let p = n.half_order()?;
    let labeling = if cg.coupling == crate::graphs::Coupling::standard(p) && cg.graph == g {
        crate::matrix::Permutation::identity(2 * p)
    } else {
        cg.find_labeling(&g)?.ok_or(Error::PatternMismatch)?
    };
    let spec = symplectic_spectrum(n, DEFAULT_CLUSTER_TOL)?;
    let zc = zc_number(cg)?.number;
    let max_multiplicity = spec.max_multiplicity();
    Ok(MspReport {
        max_multiplicity,
        zc,
        holds: max_multiplicity <= zc,
        labeling: labeling.one_based(),
        cluster_tol: DEFAULT_CLUSTER_TOL,
    })
}
