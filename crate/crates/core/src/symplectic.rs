//! The symplectic form, positive definiteness, symplectic spectra and the
//! Williamson normal form.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{DenseSymmetric, GeneralMatrix, Permutation, SYMMETRY_TOL};

/// Default relative gap used to merge symplectic eigenvalues into one
/// cluster.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

/// Default pivot threshold for the positive definiteness test, relative to
/// the largest diagonal entry.
pub const DEFAULT_PD_REL_TOL: f64 = 1e-10;

/// `Ω = [[0, I_p], [-I_p, 0]]`.
pub fn omega(p: usize) -> GeneralMatrix {
    let n = 2 * p;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..p {
        m[(i, i + p)] = 1.0;
        m[(i + p, i)] = -1.0;
    }
    m
}

/// `‖SᵀΩS − Ω‖_max`.
pub fn symplectic_residual(s: &GeneralMatrix) -> Result<f64> {
    if !s.is_square() {
        return Err(Error::NotSquare {
            rows: s.nrows(),
            cols: s.ncols(),
        });
    }
    let n = s.nrows();
    if n % 2 == 1 {
        return Err(Error::OddOrder(n));
    }
    let w = omega(n / 2);
    Ok((s.transpose() * &w * s - w).amax())
}

pub fn is_symplectic(s: &GeneralMatrix, tol: f64) -> Result<bool> {
    Ok(symplectic_residual(s)? <= tol)
}

/// Pivot threshold `1e-10 · max diagonal`, floored at the smallest normal
/// float so the all-zero matrix is rejected.
pub fn default_pd_tol(n: &DenseSymmetric) -> f64 {
    (DEFAULT_PD_REL_TOL * n.max_diagonal()).max(f64::MIN_POSITIVE)
}

/// Diagonally pivoted Cholesky; true iff every pivot exceeds `tol`.
pub fn is_positive_definite(n: &DenseSymmetric, tol: f64) -> bool {
    let size = n.order();
    let mut a = n.as_matrix().clone();
    let mut perm: Vec<usize> = (0..size).collect();
    for k in 0..size {
        let (mut piv, mut best) = (k, f64::NEG_INFINITY);
        for j in k..size {
            let d = a[(perm[j], perm[j])];
            if d > best {
                best = d;
                piv = j;
            }
        }
        if !(best > tol) {
            return false;
        }
        perm.swap(k, piv);
        let pk = perm[k];
        let root = best.sqrt();
        for &pi in &perm[k + 1..] {
            a[(pi, pk)] /= root;
        }
        for j in k + 1..size {
            let pj = perm[j];
            let ljk = a[(pj, pk)];
            for &pi in &perm[j..] {
                let v = a[(pi, pk)] * ljk;
                a[(pi, pj)] -= v;
                if pi != pj {
                    a[(pj, pi)] = a[(pi, pj)];
                }
            }
        }
    }
    true
}

pub fn is_positive_definite_default(n: &DenseSymmetric) -> bool {
    is_positive_definite(n, default_pd_tol(n))
}

/// One run of numerically equal symplectic eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
}

/// The multiset of `p` symplectic eigenvalues with a declared clustering
/// rule for multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum {
    /// Ascending.
    pub values: Vec<f64>,
    pub clusters: Vec<Cluster>,
    pub cluster_tol: f64,
}

impl SymplecticSpectrum {
    /// Single-linkage clustering of the sorted values: a new cluster starts
    /// whenever the relative gap to the previous value exceeds `cluster_tol`.
    /// The representative of a cluster is its mean.
    pub fn from_values(mut values: Vec<f64>, cluster_tol: f64) -> Self {
        values.sort_by(f64::total_cmp);
        let mut clusters: Vec<Cluster> = Vec::new();
        let mut members: Vec<f64> = Vec::new();
        let flush = |members: &mut Vec<f64>, clusters: &mut Vec<Cluster>| {
            if !members.is_empty() {
                let mean = members.iter().sum::<f64>() / members.len() as f64;
                clusters.push(Cluster {
                    value: mean,
                    multiplicity: members.len(),
                });
                members.clear();
            }
        };
        for &v in &values {
            if let Some(&prev) = members.last() {
                if (v - prev) / prev.abs().max(f64::MIN_POSITIVE) > cluster_tol {
                    flush(&mut members, &mut clusters);
                }
            }
            members.push(v);
        }
        flush(&mut members, &mut clusters);
        SymplecticSpectrum {
            values,
            clusters,
            cluster_tol,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_multiplicity(&self) -> usize {
        self.clusters
            .iter()
            .map(|c| c.multiplicity)
            .max()
            .unwrap_or(0)
    }

    /// Ordered multiplicity list (ascending eigenvalue order).
    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.multiplicity).collect()
    }

    pub fn is_simple(&self) -> bool {
        self.max_multiplicity() <= 1
    }

    /// Largest relative deviation from `target` after sorting both.
    pub fn max_relative_error(&self, target: &[f64]) -> f64 {
        let mut t = target.to_vec();
        t.sort_by(f64::total_cmp);
        if t.len() != self.values.len() {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(&t)
            .map(|(v, w)| (v - w).abs() / w.abs())
            .fold(0.0, f64::max)
    }
}

/// Eigen-decomposition of the Hermitian matrix `i·K` for a real
/// skew-symmetric `K`. Its eigenvalues are `±σ_j` where `±iσ_j` are the
/// eigenvalues of `K`.
fn hermitian_of_skew(k: &GeneralMatrix) -> SymmetricEigen<Complex64, nalgebra::Dyn> {
    let h = k.map(|v| Complex64::new(0.0, v));
    SymmetricEigen::new(h)
}

/// Symplectic eigenvalues of a positive definite `N` of order `2p`.
///
/// They are the moduli of the eigenvalues of `ΩN`; here they are read off the
/// skew-symmetric `K = N^{1/2} Ω N^{1/2}`, which is similar to `ΩN`.
pub fn symplectic_spectrum(n: &DenseSymmetric, cluster_tol: f64) -> Result<SymplecticSpectrum> {
    let p = n.half_order()?;
    if !is_positive_definite_default(n) {
        return Err(Error::NotPositiveDefinite);
    }
    let root = n.sqrt_pd()?;
    let r = root.as_matrix();
    let k = r * omega(p) * r;
    let k = (&k - k.transpose()) * 0.5;
    let eig = hermitian_of_skew(&k);
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    let values: Vec<f64> = ev[..p].to_vec();
    Ok(SymplecticSpectrum::from_values(values, cluster_tol))
}

/// Symplectic `S` and the diagonal `d` with `Sᵀ N S = diag(d) ⊕ diag(d)`.
#[derive(Clone, Debug)]
pub struct WilliamsonPair {
    pub s: GeneralMatrix,
    /// Ascending, equal to the symplectic spectrum.
    pub d: Vec<f64>,
}

impl WilliamsonPair {
    /// `max(‖SᵀNS − D⊕D‖_max, ‖SᵀΩS − Ω‖_max)`.
    pub fn residual(&self, n: &DenseSymmetric) -> f64 {
        let p = self.d.len();
        let mut dd = DMatrix::zeros(2 * p, 2 * p);
        for (i, &v) in self.d.iter().enumerate() {
            dd[(i, i)] = v;
            dd[(i + p, i + p)] = v;
        }
        let congr = (self.s.transpose() * n.as_matrix() * &self.s - dd).amax();
        let sympl = symplectic_residual(&self.s).unwrap_or(f64::INFINITY);
        congr.max(sympl)
    }
}

/// Williamson normal form of a positive definite matrix.
///
/// With `A = N^{-1/2} Ω N^{-1/2}` (skew-symmetric, eigenvalues `±i/d_j`) an
/// orthogonal `Q` brings `A` to `[[0, D⁻¹], [−D⁻¹, 0]]`; then
/// `S = N^{-1/2} Q (D^{1/2} ⊕ D^{1/2})` satisfies both `SᵀNS = D ⊕ D` and
/// `SᵀΩS = Ω`.
pub fn williamson_decompose(n: &DenseSymmetric) -> Result<WilliamsonPair> {
    let p = n.half_order()?;
    if !is_positive_definite_default(n) {
        return Err(Error::NotPositiveDefinite);
    }
    let inv_root = n.inv_sqrt_pd()?;
    let r = inv_root.as_matrix();
    let a = r * omega(p) * r;
    let a = (&a - a.transpose()) * 0.5;
    let eig = hermitian_of_skew(&a);

    // Positive eigenvalues ω_j = 1/d_j, largest first so that d ascends.
    let mut order: Vec<usize> = (0..2 * p).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let dim = 2 * p;
    let mut q = DMatrix::zeros(dim, dim);
    let mut d = Vec::with_capacity(p);
    let sqrt2 = std::f64::consts::SQRT_2;
    for (j, &idx) in order[..p].iter().enumerate() {
        let w = eig.eigenvalues[idx];
        if !(w > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        d.push(1.0 / w);
        let v = eig.eigenvectors.column(idx);
        for row in 0..dim {
            // A x = ω y and A y = −ω x for v = x + i y.
            q[(row, j)] = sqrt2 * v[row].im;
            q[(row, j + p)] = sqrt2 * v[row].re;
        }
    }
    let mut scale = DMatrix::zeros(dim, dim);
    for (j, &dj) in d.iter().enumerate() {
        scale[(j, j)] = dj.sqrt();
        scale[(j + p, j + p)] = dj.sqrt();
    }
    let s = r * q * scale;
    Ok(WilliamsonPair { s, d })
}

/// `‖(ΩN)² + I‖_max`.
pub fn symp_pd_residual(n: &DenseSymmetric) -> Result<f64> {
    let p = n.half_order()?;
    let on = omega(p) * n.as_matrix();
    Ok((&on * &on + DMatrix::identity(2 * p, 2 * p)).amax())
}

/// True iff `N` is positive definite and `‖(ΩN)² + I‖_max ≤ tol`.
pub fn is_symp_pd(n: &DenseSymmetric, tol: f64) -> bool {
    match symp_pd_residual(n) {
        Ok(r) => r <= tol && is_positive_definite_default(n),
        Err(_) => false,
    }
}

/// Checks `N⁻¹ = [[N₂₂, −N₁₂ᵀ], [−N₁₂, N₁₁]]` entrywise within `tol`.
pub fn symp_pd_inverse_identity(n: &DenseSymmetric, tol: f64) -> Result<bool> {
    let (n11, n12, n22) = n.blocks()?;
    let inv = n.inverse()?;
    let p = n11.nrows();
    let mut expected = DMatrix::zeros(2 * p, 2 * p);
    expected.view_mut((0, 0), (p, p)).copy_from(&n22);
    expected
        .view_mut((0, p), (p, p))
        .copy_from(&(-n12.transpose()));
    expected.view_mut((p, 0), (p, p)).copy_from(&(-&n12));
    expected.view_mut((p, p), (p, p)).copy_from(&n11);
    Ok((inv.as_matrix() - expected).amax() <= tol)
}

/// The three generators of the symplectic group.
#[derive(Clone, Debug)]
pub enum BasicSymplectic {
    Omega(usize),
    /// `diag(A, (Aᵀ)⁻¹)` for invertible `A`.
    BlockDiag(GeneralMatrix),
    /// `[[I, B], [0, I]]` for symmetric `B`.
    Shear(GeneralMatrix),
}

pub fn basic_symplectic(kind: &BasicSymplectic) -> Result<GeneralMatrix> {
    match kind {
        BasicSymplectic::Omega(p) => Ok(omega(*p)),
        BasicSymplectic::BlockDiag(a) => {
            if !a.is_square() {
                return Err(Error::NotSquare {
                    rows: a.nrows(),
                    cols: a.ncols(),
                });
            }
            let p = a.nrows();
            let inv_t = a.transpose().try_inverse().ok_or(Error::Singular)?;
            let mut s = DMatrix::zeros(2 * p, 2 * p);
            s.view_mut((0, 0), (p, p)).copy_from(a);
            s.view_mut((p, p), (p, p)).copy_from(&inv_t);
            Ok(s)
        }
        BasicSymplectic::Shear(b) => {
            let b = DenseSymmetric::new(b.clone())?;
            let p = b.order();
            let mut s = DMatrix::identity(2 * p, 2 * p);
            s.view_mut((0, p), (p, p)).copy_from(b.as_matrix());
            Ok(s)
        }
    }
}

/// Shear `[[I, B], [0, I]]` for an already symmetric `B`.
pub fn shear(b: &DenseSymmetric) -> GeneralMatrix {
    let p = b.order();
    let mut s = DMatrix::identity(2 * p, 2 * p);
    s.view_mut((0, p), (p, p)).copy_from(b.as_matrix());
    s
}

/// True iff σ maps the coupled label pairs `{k, k+p}` onto themselves as a
/// set of pairs.
pub fn is_valid_symplectic_relabeling(sigma: &Permutation) -> bool {
    let n = sigma.len();
    if n == 0 || n % 2 == 1 {
        return false;
    }
    let p = n / 2;
    (0..p).all(|k| {
        let (a, b) = (sigma.apply(k), sigma.apply(k + p));
        a % p == b % p && a != b
    })
}

/// Signed monomial `R = E P_σ` with `RᵀΩR = Ω`, or `None` when σ does not
/// respect the coupled pairs. Pairs that σ maps in swapped order get a sign
/// flip on their second column.
pub fn monomial_lift(sigma: &Permutation) -> Option<GeneralMatrix> {
    if !is_valid_symplectic_relabeling(sigma) {
        return None;
    }
    let p = sigma.len() / 2;
    let mut r = sigma.matrix();
    for k in 0..p {
        if sigma.apply(k) >= p {
            let col = r.column(k + p) * -1.0;
            r.set_column(k + p, &col);
        }
    }
    Some(r)
}

/// `P_σ N P_σᵀ`, i.e. the entry at `(i, j)` moves to `(σ(i), σ(j))`.
pub fn relabel(n: &DenseSymmetric, sigma: &Permutation) -> Result<DenseSymmetric> {
    if sigma.len() != n.order() {
        return Err(Error::DimensionMismatch {
            expected: n.order(),
            found: sigma.len(),
        });
    }
    let size = n.order();
    let mut out = DMatrix::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            out[(sigma.apply(i), sigma.apply(j))] = n.get(i, j);
        }
    }
    DenseSymmetric::with_tolerance(out, SYMMETRY_TOL)
}

/// `R N Rᵀ` for the signed monomial lift of σ. Same labeled graph as
/// [`relabel`], and the symplectic spectrum is unchanged.
pub fn symplectic_relabel(n: &DenseSymmetric, sigma: &Permutation) -> Result<DenseSymmetric> {
    if sigma.len() != n.order() {
        return Err(Error::DimensionMismatch {
            expected: n.order(),
            found: sigma.len(),
        });
    }
    let r = monomial_lift(sigma).ok_or_else(|| {
        Error::InvalidPermutation(format!("{sigma} does not respect the pairs {{k, k+p}}"))
    })?;
    Ok(DenseSymmetric::symmetrize(
        &r * n.as_matrix() * r.transpose(),
    ))
}
