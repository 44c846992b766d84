//! The strong symplectic spectral property: the Hamiltonian basis, the
//! verification matrices `Φ(N)` and `Ξ(N)`, and the two independent tests.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{graph_of_matrix, LabeledGraph};
use crate::matrix::{DenseSymmetric, GeneralMatrix};
use crate::symplectic::{is_positive_definite_default, omega};

/// Singular values above `DEFAULT_RANK_TOL · σ_max` count toward rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Relative residual accepted when checking that a direction is tangent.
pub const TANGENT_TOL: f64 = 1e-8;

/// One element of the standard ordered basis of `sp(2p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpBasisElement {
    pub matrix: GeneralMatrix,
    pub index: usize,
}

/// The standard ordered basis of `sp(2p)`, `2p² + p` elements.
///
/// Set 1 is `E_{i,j+p} + E_{j,i+p}` and set 2 is `E_{i+p,j} + E_{j+p,i}`
/// for `i <= j`, each listed diagonal first and then by superdiagonal.
/// Set 3 is `E_{ij} − E_{j+p,i+p}`: the diagonal, then every superdiagonal
/// followed by the matching subdiagonal.
pub fn sp_basis(p: usize) -> Vec<SpBasisElement> {
    let n = 2 * p;
    let mut mats: Vec<GeneralMatrix> = Vec::with_capacity(2 * p * p + p);
    for (ro, co) in [(0, p), (p, 0)] {
        for d in 0..p {
            for i in 0..p - d {
                let j = i + d;
                let mut m = DMatrix::zeros(n, n);
                m[(i + ro, j + co)] += 1.0;
                m[(j + ro, i + co)] += 1.0;
                mats.push(m);
            }
        }
    }
    let gl = |i: usize, j: usize| {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] += 1.0;
        m[(j + p, i + p)] -= 1.0;
        m
    };
    for i in 0..p {
        mats.push(gl(i, i));
    }
    for d in 1..p {
        for i in 0..p - d {
            mats.push(gl(i, i + d));
        }
        for i in 0..p - d {
            mats.push(gl(i + d, i));
        }
    }
    mats.into_iter()
        .enumerate()
        .map(|(index, matrix)| SpBasisElement { matrix, index })
        .collect()
}

/// `ΩM` symmetric, within `tol · max(1, ‖M‖_max)`.
pub fn is_hamiltonian(m: &GeneralMatrix, tol: f64) -> bool {
    if !m.is_square() || m.nrows() % 2 == 1 {
        return false;
    }
    let om = omega(m.nrows() / 2) * m;
    (&om - om.transpose()).amax() <= tol * m.amax().max(1.0)
}

/// Position of `(i, j)`, `i <= j`, in the column-stacked upper triangle.
pub fn triangle_index(i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    j * (j + 1) / 2 + i
}

/// Upper triangle stacked column by column:
/// `m11, m12, m22, m13, m23, m33, …`.
pub fn vec_triangle(m: &DenseSymmetric) -> DVector<f64> {
    vec_triangle_general(m.as_matrix())
}

fn vec_triangle_general(m: &GeneralMatrix) -> DVector<f64> {
    let n = m.nrows();
    let mut v = DVector::zeros(n * (n + 1) / 2);
    for j in 0..n {
        for i in 0..=j {
            v[triangle_index(i, j)] = m[(i, j)];
        }
    }
    v
}

/// Inverse of [`vec_triangle`].
pub fn unvec_triangle(v: &DVector<f64>) -> Result<DenseSymmetric> {
    let len = v.len();
    let n = ((((8 * len + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
    if n * (n + 1) / 2 != len || n == 0 {
        return Err(Error::InvalidInput(format!(
            "{len} is not a triangular number"
        )));
    }
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            m[(i, j)] = v[triangle_index(i, j)];
            m[(j, i)] = v[triangle_index(i, j)];
        }
    }
    Ok(DenseSymmetric::symmetrize(m))
}

/// `Φ(N)` and its non-edge rows `Ξ(N)`.
#[derive(Clone, Debug)]
pub struct VerificationMatrix {
    /// `(2p²+p) × (2p²+p)`.
    pub full: GeneralMatrix,
    /// Rows of `full` at the zero off-diagonal positions of `N`.
    pub reduced: GeneralMatrix,
    /// `(i, j)` with `i < j` for each row of `reduced`, in `vec△` order.
    pub row_index: Vec<(usize, usize)>,
}

/// Column `k` is `vec△(M_kᵀN + NM_k)` for the `k`-th basis element.
pub fn phi(n: &DenseSymmetric) -> Result<GeneralMatrix> {
    let p = n.half_order()?;
    let basis = sp_basis(p);
    let dim = basis.len();
    let mut out = DMatrix::zeros(dim, dim);
    let nm = n.as_matrix();
    for b in &basis {
        let t = b.matrix.transpose() * nm + nm * &b.matrix;
        out.set_column(b.index, &vec_triangle_general(&t));
    }
    Ok(out)
}

/// Rows of `Φ(N)` at positions `(i, j)`, `i < j`, with `|n_ij| <= zero_tol`.
pub fn xi(n: &DenseSymmetric, zero_tol: f64) -> Result<VerificationMatrix> {
    let g = graph_of_matrix(n, zero_tol);
    xi_for_graph(n, &g)
}

/// `Ξ` taken over the non-edges of a prescribed graph.
pub fn xi_for_graph(n: &DenseSymmetric, g: &LabeledGraph) -> Result<VerificationMatrix> {
    if g.order() != n.order() {
        return Err(Error::DimensionMismatch {
            expected: n.order(),
            found: g.order(),
        });
    }
    let full = phi(n)?;
    let row_index = g.non_edges();
    let mut reduced = DMatrix::zeros(row_index.len(), full.ncols());
    for (r, &(i, j)) in row_index.iter().enumerate() {
        reduced.set_row(r, &full.row(triangle_index(i, j)));
    }
    Ok(VerificationMatrix {
        full,
        reduced,
        row_index,
    })
}

/// Numerical rank: singular values above `rel_tol · σ_max`.
pub fn numerical_rank(m: &GeneralMatrix, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.max();
    if top <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// SSSP by the row rank of `Ξ(N)`, with the pattern read from `N` at the
/// default zero tolerance.
pub fn has_sssp_rank(n: &DenseSymmetric, rank_tol: f64) -> Result<bool> {
    let g = graph_of_matrix(n, crate::graphs::default_zero_tol(n));
    has_sssp_rank_for_graph(n, &g, rank_tol)
}

pub fn has_sssp_rank_for_graph(
    n: &DenseSymmetric,
    g: &LabeledGraph,
    rank_tol: f64,
) -> Result<bool> {
    if !is_positive_definite_default(n) {
        return Err(Error::NotPositiveDefinite);
    }
    let v = xi_for_graph(n, g)?;
    let rows = v.reduced.nrows();
    Ok(rows == 0 || numerical_rank(&v.reduced, rank_tol) == rows)
}

/// Outcome of the nullspace test.
#[derive(Clone, Debug)]
pub struct NullspaceVerdict {
    pub has_sssp: bool,
    /// A nonzero `Y` with `N∘Y = O` and `ΩNY = YNΩ` when SSSP fails,
    /// scaled to `‖Y‖_max = 1`.
    pub witness: Option<DenseSymmetric>,
    /// Smallest singular value of the linear system, relative to the largest.
    pub relative_gap: f64,
}

/// SSSP by the commutation system `ΩNY − YNΩ = O` over symmetric `Y`
/// supported on the zero positions of `N`.
pub fn has_sssp_nullspace(n: &DenseSymmetric) -> Result<NullspaceVerdict> {
    has_sssp_nullspace_tol(n, DEFAULT_RANK_TOL)
}

pub fn has_sssp_nullspace_tol(n: &DenseSymmetric, rank_tol: f64) -> Result<NullspaceVerdict> {
    let g = graph_of_matrix(n, crate::graphs::default_zero_tol(n));
    nullspace_test(n, &g.non_edges(), rank_tol)
}

/// The nullspace test with the free positions of `Y` restricted to the
/// non-edges of `g`.
pub fn has_sssp_nullspace_for_graph(
    n: &DenseSymmetric,
    g: &LabeledGraph,
    rank_tol: f64,
) -> Result<NullspaceVerdict> {
    if g.order() != n.order() {
        return Err(Error::DimensionMismatch {
            expected: n.order(),
            found: g.order(),
        });
    }
    nullspace_test(n, &g.non_edges(), rank_tol)
}

fn nullspace_test(
    n: &DenseSymmetric,
    free: &[(usize, usize)],
    rank_tol: f64,
) -> Result<NullspaceVerdict> {
    let p = n.half_order()?;
    if !is_positive_definite_default(n) {
        return Err(Error::NotPositiveDefinite);
    }
    if free.is_empty() {
        return Ok(NullspaceVerdict {
            has_sssp: true,
            witness: None,
            relative_gap: 1.0,
        });
    }
    let size = 2 * p;
    let w = omega(p);
    let on = &w * n.as_matrix();
    let nw = n.as_matrix() * &w;
    let mut sys: GeneralMatrix = DMatrix::zeros(size * size, free.len());
    for (c, &(i, j)) in free.iter().enumerate() {
        // ΩN(E_ij + E_ji) − (E_ij + E_ji)NΩ, column-major.
        let mut m = DMatrix::zeros(size, size);
        for r in 0..size {
            m[(r, j)] += on[(r, i)];
            m[(r, i)] += on[(r, j)];
            m[(i, r)] -= nw[(j, r)];
            m[(j, r)] -= nw[(i, r)];
        }
        sys.set_column(c, &DVector::from_column_slice(m.as_slice()));
    }
    let svd = sys.svd(false, true);
    let sv = &svd.singular_values;
    let top = sv.max();
    let (mut kmin, mut smin) = (0, f64::INFINITY);
    for (k, &s) in sv.iter().enumerate() {
        if s < smin {
            smin = s;
            kmin = k;
        }
    }
    let gap = if top > 0.0 { smin / top } else { 0.0 };
    let has_sssp = top > 0.0 && gap > rank_tol;
    let witness = if has_sssp {
        None
    } else {
        let vt = svd.v_t.expect("requested right singular vectors");
        let y = vt.row(kmin);
        let scale = y.amax();
        let mut m: GeneralMatrix = DMatrix::zeros(size, size);
        for (c, &(i, j)) in free.iter().enumerate() {
            m[(i, j)] = y[c] / scale;
            m[(j, i)] = y[c] / scale;
        }
        Some(DenseSymmetric::symmetrize(m))
    };
    Ok(NullspaceVerdict {
        has_sssp,
        witness,
        relative_gap: gap,
    })
}

/// `‖ΩNY − YNΩ‖_max`.
pub fn commutation_residual(n: &DenseSymmetric, y: &DenseSymmetric) -> Result<f64> {
    let p = n.half_order()?;
    let w = omega(p);
    let a = &w * n.as_matrix() * y.as_matrix();
    let b = y.as_matrix() * n.as_matrix() * &w;
    Ok((a - b).amax())
}

/// `MᵀN + NM` for Hamiltonian `M`.
pub fn tangent_element(n: &DenseSymmetric, m: &GeneralMatrix) -> Result<DenseSymmetric> {
    if m.nrows() != n.order() || m.ncols() != n.order() {
        return Err(Error::DimensionMismatch {
            expected: n.order(),
            found: m.nrows(),
        });
    }
    if !is_hamiltonian(m, 1e-10) {
        let om = omega(m.nrows() / 2) * m;
        return Err(Error::NotHamiltonian((&om - om.transpose()).amax()));
    }
    let nm = n.as_matrix();
    Ok(DenseSymmetric::symmetrize(m.transpose() * nm + nm * m))
}

/// Least squares distance of `R` from `{MᵀN + NM}`, relative to `‖R‖`.
pub fn tangent_residual(n: &DenseSymmetric, r: &DenseSymmetric) -> Result<f64> {
    let f = phi(n)?;
    let target = vec_triangle(r);
    let svd = f.clone().svd(true, true);
    let top = svd.singular_values.max();
    let sol = svd
        .solve(&target, DEFAULT_RANK_TOL * top.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let res = (f * sol - &target).amax();
    Ok(res / target.amax().max(1.0))
}

/// `G` with every position where `R` is nonzero added as an edge.
pub fn direction_graph(
    g: &LabeledGraph,
    r: &DenseSymmetric,
    zero_tol: f64,
) -> Result<LabeledGraph> {
    g.union(&graph_of_matrix(r, zero_tol))
}

/// SSSP with respect to the direction `R`: only `Y = O` satisfies
/// `N∘Y = O`, `R∘Y = O` and `ΩNY = YNΩ`.
pub fn has_sssp_in_direction(n: &DenseSymmetric, r: &DenseSymmetric) -> Result<NullspaceVerdict> {
    if r.order() != n.order() {
        return Err(Error::DimensionMismatch {
            expected: n.order(),
            found: r.order(),
        });
    }
    let res = tangent_residual(n, r)?;
    if res > TANGENT_TOL {
        return Err(Error::NotTangent(res));
    }
    let g = graph_of_matrix(n, crate::graphs::default_zero_tol(n));
    let gr = direction_graph(
        &g,
        r,
        crate::graphs::default_zero_tol(r).max(f64::MIN_POSITIVE),
    )?;
    nullspace_test(n, &gr.non_edges(), DEFAULT_RANK_TOL)
}

/// Interleaves `P = [[P11, P12], [P12ᵀ, P22]]` (order `2m`) and `Q`
/// (order `2r`) so that `P`'s pairs keep labels `{k, k+m+r}`:
/// `[[P11, 0, P12, 0], [0, Q11, 0, Q12], [P12ᵀ, 0, P22, 0], [0, Q12ᵀ, 0, Q22]]`.
pub fn direct_sum_interleave(p: &DenseSymmetric, q: &DenseSymmetric) -> Result<DenseSymmetric> {
    let m = p.half_order()?;
    let r = q.half_order()?;
    if !is_positive_definite_default(p) || !is_positive_definite_default(q) {
        return Err(Error::NotPositiveDefinite);
    }
    let h = m + r;
    let mut out = DMatrix::zeros(2 * h, 2 * h);
    let place = |out: &mut GeneralMatrix, src: &DenseSymmetric, half: usize, offset: usize| {
        for i in 0..2 * half {
            for j in 0..2 * half {
                let ri = if i < half {
                    offset + i
                } else {
                    h + offset + i - half
                };
                let rj = if j < half {
                    offset + j
                } else {
                    h + offset + j - half
                };
                out[(ri, rj)] = src.get(i, j);
            }
        }
    };
    place(&mut out, p, m, 0);
    place(&mut out, q, r, m);
    Ok(DenseSymmetric::symmetrize(out))
}

/// SSSP verdicts from both tests on the same pattern.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SsspReport {
    pub rank_test: bool,
    pub nullspace_test: bool,
    pub rows: usize,
    pub columns: usize,
    pub rank: usize,
    pub rank_tol: f64,
    pub zero_tol: f64,
}

impl SsspReport {
    pub fn agree(&self) -> bool {
        self.rank_test == self.nullspace_test
    }
}

/// Runs both tests on the pattern of `N` at `zero_tol`.
pub fn sssp_report(
    n: &DenseSymmetric,
    zero_tol: f64,
    rank_tol: f64,
) -> Result<(SsspReport, NullspaceVerdict)> {
    let g = graph_of_matrix(n, zero_tol);
    let v = xi_for_graph(n, &g)?;
    if !is_positive_definite_default(n) {
        return Err(Error::NotPositiveDefinite);
    }
    let rank = numerical_rank(&v.reduced, rank_tol);
    let rank_test = rank == v.reduced.nrows();
    let null = nullspace_test(n, &g.non_edges(), rank_tol)?;
    Ok((
        SsspReport {
            rank_test,
            nullspace_test: null.has_sssp,
            rows: v.reduced.nrows(),
            columns: v.reduced.ncols(),
            rank,
            rank_tol,
            zero_tol,
        },
        null,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_p1() {
        let b = sp_basis(1);
        assert_eq!(b.len(), 3);
        assert_eq!(
            b[0].matrix,
            DMatrix::from_row_slice(2, 2, &[0., 2., 0., 0.])
        );
        assert_eq!(
            b[1].matrix,
            DMatrix::from_row_slice(2, 2, &[0., 0., 2., 0.])
        );
        assert_eq!(
            b[2].matrix,
            DMatrix::from_row_slice(2, 2, &[1., 0., 0., -1.])
        );
    }

    #[test]
    fn basis_p2_order() {
        let b = sp_basis(2);
        let e = |entries: &[(usize, usize, f64)]| {
            let mut m = DMatrix::zeros(4, 4);
            for &(i, j, v) in entries {
                m[(i - 1, j - 1)] += v;
            }
            m
        };
        let expected = [
            e(&[(1, 3, 2.)]),
            e(&[(2, 4, 2.)]),
            e(&[(1, 4, 1.), (2, 3, 1.)]),
            e(&[(3, 1, 2.)]),
            e(&[(4, 2, 2.)]),
            e(&[(3, 2, 1.), (4, 1, 1.)]),
            e(&[(1, 1, 1.), (3, 3, -1.)]),
            e(&[(2, 2, 1.), (4, 4, -1.)]),
            e(&[(1, 2, 1.), (4, 3, -1.)]),
            e(&[(2, 1, 1.), (3, 4, -1.)]),
        ];
        for (k, m) in expected.iter().enumerate() {
            assert_eq!(&b[k].matrix, m, "basis element {k}");
        }
    }

    #[test]
    fn basis_is_hamiltonian_and_independent() {
        for p in 1..=4 {
            let b = sp_basis(p);
            assert_eq!(b.len(), 2 * p * p + p);
            let n = 2 * p;
            let mut stack = DMatrix::zeros(n * n, b.len());
            for e in &b {
                assert!(is_hamiltonian(&e.matrix, 0.0));
                stack.set_column(e.index, &DVector::from_column_slice(e.matrix.as_slice()));
            }
            assert_eq!(numerical_rank(&stack, 1e-12), b.len());
        }
    }

    #[test]
    fn vec_triangle_order_and_round_trip() {
        let m = DenseSymmetric::new(DMatrix::from_fn(4, 4, |i, j| {
            (10 * (i.min(j) + 1) + j.max(i) + 1) as f64
        }))
        .unwrap();
        let v = vec_triangle(&m);
        assert_eq!(
            v.as_slice(),
            &[11., 12., 22., 13., 23., 33., 14., 24., 34., 44.]
        );
        assert_eq!(unvec_triangle(&v).unwrap(), m);
        let id = vec_triangle(&DenseSymmetric::identity(4));
        let ones: Vec<usize> = (0..10).filter(|&k| id[k] == 1.0).collect();
        assert_eq!(ones, vec![0, 2, 5, 9]);
    }

    #[test]
    fn identity_sssp() {
        assert!(!has_sssp_rank(&DenseSymmetric::identity(4), DEFAULT_RANK_TOL).unwrap());
        assert!(has_sssp_rank(&DenseSymmetric::identity(2), DEFAULT_RANK_TOL).unwrap());
        assert!(
            !has_sssp_nullspace(&DenseSymmetric::identity(4))
                .unwrap()
                .has_sssp
        );
        assert!(
            has_sssp_nullspace(&DenseSymmetric::identity(2))
                .unwrap()
                .has_sssp
        );
    }

    #[test]
    fn dimensions() {
        let n = DenseSymmetric::identity(6);
        let v = xi(&n, 0.0).unwrap();
        assert_eq!(v.full.nrows(), 21);
        assert_eq!(v.full.ncols(), 21);
        assert_eq!(v.reduced.nrows(), 15);
        assert!(phi(&DenseSymmetric::zeros(4))
            .unwrap()
            .iter()
            .all(|x| *x == 0.0));
    }

    #[test]
    fn interleave_layout() {
        let p = DenseSymmetric::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let q = DenseSymmetric::from_rows(&[vec![3.0, 1.0], vec![1.0, 4.0]]).unwrap();
        let n = direct_sum_interleave(&p, &q).unwrap();
        let expected = DenseSymmetric::from_rows(&[
            vec![2.0, 0.0, 0.5, 0.0],
            vec![0.0, 3.0, 0.0, 1.0],
            vec![0.5, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 4.0],
        ])
        .unwrap();
        assert_eq!(n, expected);
    }

    #[test]
    fn tangent_rejects_non_hamiltonian() {
        let m = DMatrix::identity(4, 4);
        assert!(matches!(
            tangent_element(&DenseSymmetric::identity(4), &m),
            Err(Error::NotHamiltonian(_))
        ));
    }
}
