//! Factories for sympPD matrices and prescribed symplectic spectra, plus the
//! structural obstructions that rule such matrices out.

use nalgebra::DMatrix;
use petgraph::algo::{has_path_connecting, tarjan_scc};
use petgraph::graph::{DiGraph, NodeIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{graph_of_matrix, LabeledGraph};
use crate::matrix::{DenseSymmetric, GeneralMatrix};
use crate::sampling;
use crate::symplectic::{is_positive_definite_default, shear, symplectic_residual};

/// Attempts allowed when a random construction lands on an accidental zero.
pub const MAX_RESAMPLES: usize = 100;

fn check_targets(target: &[f64]) -> Result<()> {
    if target.is_empty() {
        return Err(Error::Empty);
    }
    if let Some(bad) = target.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput(format!(
            "target {bad} is not a positive number"
        )));
    }
    Ok(())
}

/// `[[N₁₁, N₁₁W], [WN₁₁, N₁₁⁻¹ + WN₁₁W]]`.
pub fn dopico_johnson(n11: &DenseSymmetric, w: &DenseSymmetric) -> Result<DenseSymmetric> {
    if n11.order() != w.order() {
        return Err(Error::DimensionMismatch {
            expected: n11.order(),
            found: w.order(),
        });
    }
    if !is_positive_definite_default(n11) {
        return Err(Error::NotPositiveDefinite);
    }
    let a = n11.as_matrix();
    let wm = w.as_matrix();
    let a_inv = n11.inverse()?.into_inner();
    let n12 = a * wm;
    let n22 = a_inv + wm * a * wm;
    let n22 = DenseSymmetric::symmetrize(n22).into_inner();
    DenseSymmetric::from_blocks(a, &n12, &n22)
}

/// `[[I, B], [B, I + B²]] = SᵀS` for the shear `S = [[I, B], [O, I]]`.
pub fn shear_square(b: &DenseSymmetric) -> DenseSymmetric {
    let p = b.order();
    let bm = b.as_matrix();
    let mut out = DMatrix::identity(2 * p, 2 * p);
    out.view_mut((0, p), (p, p)).copy_from(bm);
    out.view_mut((p, 0), (p, p)).copy_from(bm);
    let b2 = bm * bm;
    for j in 0..p {
        for i in 0..p {
            out[(p + i, p + j)] += b2[(i, j)];
        }
    }
    DenseSymmetric::symmetrize(out)
}

/// The matrix with the labeled graph of `shear_square(B)` and symplectic
/// spectrum `target`:
/// `[[D, √D B √D⁻¹], [√D⁻¹ B √D, D + √D⁻¹ B² √D⁻¹]]`, `D = diag(target)`.
pub fn realize_shear(b: &DenseSymmetric, target: &[f64]) -> Result<DenseSymmetric> {
    check_targets(target)?;
    let p = b.order();
    if target.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: target.len(),
        });
    }
    let sq: Vec<f64> = target.iter().map(|v| v.sqrt()).collect();
    let bm = b.as_matrix();
    let b2 = bm * bm;
    let mut out = DMatrix::zeros(2 * p, 2 * p);
    for i in 0..p {
        out[(i, i)] = target[i];
        for j in 0..p {
            let upper = sq[i] * bm[(i, j)] / sq[j];
            out[(i, p + j)] = upper;
            out[(p + j, i)] = upper;
            out[(p + i, p + j)] = b2[(i, j)] / (sq[i] * sq[j]);
        }
        out[(p + i, p + i)] += target[i];
    }
    Ok(DenseSymmetric::symmetrize(out))
}

/// `Sᵀ (D ⊕ D) S` for a nonnegative symplectic `S`; its graph is that of
/// `SᵀS` whatever the target.
pub fn realize_nonneg_symplectic(s: &GeneralMatrix, target: &[f64]) -> Result<DenseSymmetric> {
    check_targets(target)?;
    let res = symplectic_residual(s)?;
    let scale = s.amax().powi(2).max(1.0);
    if res > 1e-10 * scale {
        return Err(Error::NotSymplectic(res));
    }
    for j in 0..s.ncols() {
        for i in 0..s.nrows() {
            if s[(i, j)] < 0.0 {
                return Err(Error::NegativeEntry(i, j));
            }
        }
    }
    let p = s.nrows() / 2;
    if target.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: target.len(),
        });
    }
    let dd: Vec<f64> = target.iter().chain(target.iter()).copied().collect();
    DenseSymmetric::from_diagonal(&dd).congruence(s)
}

/// The two shapes produced by [`random_smear`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmearMode {
    /// `S_AᵀD′S_A = AᵀDA ⊕ A⁻¹DA⁻ᵀ`, graph `(K_p ⊔ K_p)`.
    TwoCliques,
    /// `R_BᵀS_AᵀD′S_AR_B`, graph `K_{2p}`.
    Complete,
}

/// Smears `D ⊕ D` with random symplectic congruences until the graph is
/// exactly the one of `mode`.
pub fn random_smear(target: &[f64], seed: u64, mode: SmearMode) -> Result<DenseSymmetric> {
    random_smear_with(target, mode, &mut sampling::seeded(seed))
}

pub fn random_smear_with<R: Rng + ?Sized>(
    target: &[f64],
    mode: SmearMode,
    rng: &mut R,
) -> Result<DenseSymmetric> {
    check_targets(target)?;
    let p = target.len();
    let dd: Vec<f64> = target.iter().chain(target.iter()).copied().collect();
    let d = DenseSymmetric::from_diagonal(&dd);
    let expected = match mode {
        SmearMode::TwoCliques => {
            let mut g = LabeledGraph::empty(2 * p);
            for block in [0, p] {
                for j in 0..p {
                    for i in 0..j {
                        g.add_edge(block + i, block + j)?;
                    }
                }
            }
            g
        }
        SmearMode::Complete => crate::graphs::complete(2 * p),
    };
    for _ in 0..MAX_RESAMPLES {
        let a = sampling::invertible(p, rng);
        let a_inv_t = a.transpose().try_inverse().ok_or(Error::Singular)?;
        let mut s = DMatrix::zeros(2 * p, 2 * p);
        s.view_mut((0, 0), (p, p)).copy_from(&a);
        s.view_mut((p, p), (p, p)).copy_from(&a_inv_t);
        if mode == SmearMode::Complete {
            s = s * shear(&sampling::uniform_symmetric(p, rng));
        }
        let n = d.congruence(&s)?;
        if graph_of_matrix(&n, crate::graphs::default_zero_tol(&n)) == expected {
            return Ok(n);
        }
    }
    Err(Error::Rejected(format!(
        "no sample with the required pattern in {MAX_RESAMPLES} attempts"
    )))
}

/// `√D A √D − E²` for diagonal `D`, `E`.
fn corona_core(a: &DenseSymmetric, d: &[f64], e: &[f64]) -> Result<DenseSymmetric> {
    let p = a.order();
    if d.len() != p || e.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: if d.len() != p { d.len() } else { e.len() },
        });
    }
    if let Some(bad) = d.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "D must be positive, found {bad}"
        )));
    }
    let sd: Vec<f64> = d.iter().map(|v| v.sqrt()).collect();
    let m = DMatrix::from_fn(p, p, |i, j| {
        sd[i] * a.get(i, j) * sd[j] - if i == j { e[i] * e[i] } else { 0.0 }
    });
    Ok(DenseSymmetric::symmetrize(m))
}

/// Symplectic spectrum of `[[D, E], [E, A]]`: square roots of the
/// eigenvalues of `√D A √D − E²`, ascending.
pub fn corona_predicted_spectrum(a: &DenseSymmetric, d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let core = corona_core(a, d, e)?;
    let ev = core.eigenvalues();
    if ev[0] <= 0.0 {
        return Err(Error::Rejected(format!(
            "√D·A·√D − E² has the nonpositive eigenvalue {:e}",
            ev[0]
        )));
    }
    Ok(ev.into_iter().map(f64::sqrt).collect())
}

/// `N = [[D, E], [E, A]]` on the corona `H ∘ K₁`, leaves first.
pub fn corona_realize(a: &DenseSymmetric, d: &[f64], e: &[f64]) -> Result<DenseSymmetric> {
    corona_predicted_spectrum(a, d, e)?;
    let p = a.order();
    let mut n = DMatrix::zeros(2 * p, 2 * p);
    for i in 0..p {
        n[(i, i)] = d[i];
        n[(i, p + i)] = e[i];
        n[(p + i, i)] = e[i];
        for j in 0..p {
            n[(p + i, p + j)] = a.get(i, j);
        }
    }
    Ok(DenseSymmetric::symmetrize(n))
}

/// Householder reflector `I − 2uuᵀ/uᵀu`: symmetric, orthogonal, and dense
/// when every `u_i` is nonzero and `2u_i² ≠ uᵀu`.
pub fn householder(u: &[f64]) -> Result<DenseSymmetric> {
    let norm2: f64 = u.iter().map(|v| v * v).sum();
    if norm2 == 0.0 {
        return Err(Error::InvalidInput("zero Householder vector".into()));
    }
    let p = u.len();
    Ok(DenseSymmetric::symmetrize(DMatrix::from_fn(
        p,
        p,
        |i, j| f64::from(i == j) - 2.0 * u[i] * u[j] / norm2,
    )))
}

/// The looped path matrix `B_p`: path adjacency plus a one at `(1, 1)`.
pub fn tripath_b(p: usize) -> DenseSymmetric {
    let pat = crate::graphs::tripath_b_pattern(p);
    DenseSymmetric::symmetrize(DMatrix::from_fn(p, p, |i, j| f64::from(pat[i][j])))
}

/// Nonzero pattern of the off-diagonal block `N[1..p, p+1..2p]` of a
/// labeled graph: `b_ij` is set when `{i, j+p}` is an edge.
pub fn off_diagonal_block_pattern(g: &LabeledGraph) -> Result<Vec<Vec<bool>>> {
    if g.order() % 2 == 1 {
        return Err(Error::OddOrder(g.order()));
    }
    let p = g.order() / 2;
    Ok((0..p)
        .map(|i| (0..p).map(|j| g.has_edge(i, j + p)).collect())
        .collect())
}

fn digraph(pattern: &[Vec<bool>]) -> (DiGraph<(), ()>, Vec<NodeIndex>) {
    let p = pattern.len();
    let mut dg = DiGraph::new();
    let nodes: Vec<NodeIndex> = (0..p).map(|_| dg.add_node(())).collect();
    for i in 0..p {
        for j in 0..p {
            if pattern[i][j] {
                dg.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    (dg, nodes)
}

/// True when a strong component of the digraph of `B` is a directed cycle
/// of length at least 3; every matrix with that pattern then has non-real
/// eigenvalues.
pub fn forbidden_cycle_detector(pattern: &[Vec<bool>]) -> bool {
    let (dg, _) = digraph(pattern);
    tarjan_scc(&dg).into_iter().any(|comp| {
        if comp.len() < 3 {
            return false;
        }
        let members: Vec<usize> = comp.iter().map(|n| n.index()).collect();
        let inside = |i: usize| members.iter().filter(move |&&j| pattern[i][j]);
        members
            .iter()
            .all(|&i| !pattern[i][i] && inside(i).count() == 1)
            && members
                .iter()
                .all(|&j| members.iter().filter(|&&i| pattern[i][j]).count() == 1)
    })
}

/// True when two strong components of the digraph of `B` are `[0]` and one
/// reaches the other; 0 is then a defective eigenvalue of every matrix with
/// that pattern.
pub fn forbidden_nilpotent_detector(pattern: &[Vec<bool>]) -> bool {
    let (dg, nodes) = digraph(pattern);
    let zeros: Vec<usize> = tarjan_scc(&dg)
        .into_iter()
        .filter(|c| c.len() == 1 && !pattern[c[0].index()][c[0].index()])
        .map(|c| c[0].index())
        .collect();
    zeros.iter().any(|&a| {
        zeros
            .iter()
            .any(|&b| a != b && has_path_connecting(&dg, nodes[a], nodes[b], None))
    })
}

/// Some vertex `i` is isolated while `i ± p` is not.
pub fn isolated_vertex_obstruction(g: &LabeledGraph) -> bool {
    let n = g.order();
    if n % 2 == 1 {
        return false;
    }
    let p = n / 2;
    (0..n).any(|i| g.degree(i) == 0 && g.degree((i + p) % n) > 0)
}

/// A connected graph of order `2p >= 4` with fewer than `3p − 2` edges
/// cannot carry a sympPD matrix.
pub fn sparsity_obstruction(g: &LabeledGraph) -> bool {
    let n = g.order();
    n >= 4 && n % 2 == 0 && g.is_connected() && g.edge_count() < 3 * (n / 2) - 2
}

/// Nonzero counts of `N` and `N⁻¹` against the lower bounds for irreducible
/// positive definite and sympPD matrices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SparsityReport {
    pub order: usize,
    pub nnz: usize,
    pub nnz_inverse: usize,
    pub irreducible: bool,
    /// `nnz + nnz_inverse >= 8n − 8`; `None` when `N` is reducible.
    pub inverse_pair_bound_holds: Option<bool>,
    pub sympd: bool,
    /// `nnz >= 4n − 4`; `None` unless `N` is sympPD and irreducible.
    pub sympd_bound_holds: Option<bool>,
    pub zero_tol: f64,
}

impl SparsityReport {
    pub fn violated(&self) -> bool {
        self.inverse_pair_bound_holds == Some(false) || self.sympd_bound_holds == Some(false)
    }
}

/// Audits `N` with entries `|x| <= zero_tol · max|x|` treated as zero, the
/// inverse filtered against its own largest entry.
pub fn sparsity_audit(n: &DenseSymmetric, zero_rel_tol: f64) -> Result<SparsityReport> {
    if !is_positive_definite_default(n) {
        return Err(Error::NotPositiveDefinite);
    }
    let inv = n.inverse()?;
    let size = n.order();
    let nnz = n.nnz(zero_rel_tol * n.max_abs());
    let nnz_inverse = inv.nnz(zero_rel_tol * inv.max_abs());
    let irreducible = graph_of_matrix(n, zero_rel_tol * n.max_abs()).is_connected();
    let sympd =
        size % 2 == 0 && crate::symplectic::is_symp_pd(n, 1e-9 * n.max_abs().max(1.0).powi(2));
    let bound = 8 * size - 8;
    Ok(SparsityReport {
        order: size,
        nnz,
        nnz_inverse,
        irreducible,
        inverse_pair_bound_holds: irreducible.then_some(nnz + nnz_inverse >= bound),
        sympd,
        sympd_bound_holds: (irreducible && sympd).then_some(nnz >= 4 * size - 4),
        zero_tol: zero_rel_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{default_zero_tol, tripath};
    use crate::symplectic::{
        is_symp_pd, omega, symp_pd_inverse_identity, symplectic_spectrum, DEFAULT_CLUSTER_TOL,
    };

    fn eq2(p: usize) -> DenseSymmetric {
        DenseSymmetric::symmetrize(DMatrix::from_fn(2 * p, 2 * p, |i, j| {
            match (i < p, j < p) {
                (true, true) => f64::from(i == j),
                (false, false) => p as f64 + f64::from(i == j),
                _ => 1.0,
            }
        }))
    }

    #[test]
    fn dopico_johnson_identities() {
        let n = dopico_johnson(&DenseSymmetric::identity(3), &DenseSymmetric::zeros(3)).unwrap();
        assert_eq!(n, DenseSymmetric::identity(6));
        let j = DenseSymmetric::symmetrize(DMatrix::from_element(3, 3, 1.0));
        let n = dopico_johnson(&DenseSymmetric::identity(3), &j).unwrap();
        assert_eq!(n, eq2(3));
        assert!(dopico_johnson(
            &DenseSymmetric::from_diagonal(&[1.0, -1.0]),
            &DenseSymmetric::zeros(2)
        )
        .is_err());
    }

    #[test]
    fn shear_square_zero_and_tripath() {
        assert_eq!(
            shear_square(&DenseSymmetric::zeros(3)),
            DenseSymmetric::identity(6)
        );
        let n = shear_square(&tripath_b(5));
        assert_eq!(graph_of_matrix(&n, 0.0), tripath(10).unwrap().graph);
        assert!(is_symp_pd(&n, 1e-12));
    }

    #[test]
    fn shear_square_householder_is_kpp() {
        let b = householder(&[1.0, 2.0, -1.5]).unwrap();
        let n = shear_square(&b);
        let (_, _, n22) = n.blocks().unwrap();
        assert!((n22 - DMatrix::identity(3, 3) * 2.0).amax() < 1e-14);
        assert!(is_symp_pd(&n, 1e-12));
    }

    #[test]
    fn realize_shear_hits_targets() {
        let b = tripath_b(5);
        let t = [1.0, 2.0, 3.0, 4.0, 5.0];
        let n = realize_shear(&b, &t).unwrap();
        let s = symplectic_spectrum(&n, DEFAULT_CLUSTER_TOL).unwrap();
        assert!(s.max_relative_error(&t) < 1e-10);
        assert_eq!(
            graph_of_matrix(&n, default_zero_tol(&n)),
            tripath(10).unwrap().graph
        );
        assert!(realize_shear(&b, &[1.0, 2.0, 0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn nonneg_symplectic() {
        let j = DenseSymmetric::symmetrize(DMatrix::from_element(3, 3, 1.0));
        let s = shear(&j);
        let t = [0.5, 1.5, 2.5];
        let n = realize_nonneg_symplectic(&s, &t).unwrap();
        let sp = symplectic_spectrum(&n, DEFAULT_CLUSTER_TOL).unwrap();
        assert!(sp.max_relative_error(&t) < 1e-12);
        let base = DenseSymmetric::identity(6).congruence(&s).unwrap();
        assert_eq!(graph_of_matrix(&n, 0.0), graph_of_matrix(&base, 0.0));
        assert!(matches!(
            realize_nonneg_symplectic(&omega(3), &t),
            Err(Error::NegativeEntry(..))
        ));
        let n = realize_nonneg_symplectic(&DMatrix::identity(4, 4), &[2.0, 3.0]).unwrap();
        assert_eq!(n, DenseSymmetric::from_diagonal(&[2.0, 3.0, 2.0, 3.0]));
    }

    #[test]
    fn smear_modes() {
        let t = [0.7, 1.1, 2.3];
        for mode in [SmearMode::TwoCliques, SmearMode::Complete] {
            let n = random_smear(&t, 42, mode).unwrap();
            let sp = symplectic_spectrum(&n, DEFAULT_CLUSTER_TOL).unwrap();
            assert!(sp.max_relative_error(&t) < 1e-9);
            assert_eq!(n, random_smear(&t, 42, mode).unwrap());
        }
        let n = random_smear(&t, 1, SmearMode::TwoCliques).unwrap();
        let (_, n12, _) = n.blocks().unwrap();
        assert_eq!(n12.amax(), 0.0);
    }

    #[test]
    fn corona_examples() {
        let n = corona_realize(
            &DenseSymmetric::identity(3).scale(2.0),
            &[1.0; 3],
            &[1.0; 3],
        )
        .unwrap();
        let sp = symplectic_spectrum(&n, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(sp.multiplicities(), vec![3]);
        assert!((sp.values[0] - 1.0).abs() < 1e-12);
        let bad = corona_realize(&DenseSymmetric::identity(2), &[1.0; 2], &[1.0; 2]);
        assert!(matches!(bad, Err(Error::Rejected(_))));
    }

    #[test]
    fn cycle_detector() {
        let cyc = vec![
            vec![false, true, false],
            vec![false, false, true],
            vec![true, false, false],
        ];
        assert!(forbidden_cycle_detector(&cyc));
        let sym = vec![
            vec![false, true, true],
            vec![true, false, true],
            vec![true, true, false],
        ];
        assert!(!forbidden_cycle_detector(&sym));
        let two = vec![vec![false, true], vec![true, false]];
        assert!(!forbidden_cycle_detector(&two));
    }

    #[test]
    fn nilpotent_detector() {
        // Strictly upper triangular 2x2: two [0] components joined by an arc.
        let b = vec![vec![false, true], vec![false, false]];
        assert!(forbidden_nilpotent_detector(&b));
        let diag = vec![vec![true, true], vec![false, true]];
        assert!(!forbidden_nilpotent_detector(&diag));
        let apart = vec![vec![false, false], vec![false, false]];
        assert!(!forbidden_nilpotent_detector(&apart));
    }

    #[test]
    fn isolated_vertices() {
        // K1 ⊔ P3 with 1 isolated and 3 in the path.
        let g = LabeledGraph::from_one_based(4, &[(2, 3), (3, 4)]).unwrap();
        assert!(isolated_vertex_obstruction(&g));
        assert!(!isolated_vertex_obstruction(&LabeledGraph::empty(4)));
        let g = LabeledGraph::from_one_based(4, &[(2, 4)]).unwrap();
        assert!(!isolated_vertex_obstruction(&g));
    }

    #[test]
    fn sparsity_of_tripaths() {
        for p in 2..=6 {
            let n = shear_square(&tripath_b(p));
            let r = sparsity_audit(&n, 1e-10).unwrap();
            assert_eq!(r.nnz, 8 * p - 4);
            assert!(r.irreducible && r.sympd);
            assert_eq!(r.sympd_bound_holds, Some(true));
            assert!(!r.violated());
            assert!(symp_pd_inverse_identity(&n, 1e-10).unwrap());
        }
        let r = sparsity_audit(&DenseSymmetric::identity(6), 1e-10).unwrap();
        assert!(!r.irreducible);
        assert_eq!(r.inverse_pair_bound_holds, None);
    }
}
