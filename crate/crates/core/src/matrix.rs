//! Dense real matrices used throughout the crate.
//!
//! Every matrix handled here is small (order at most a few dozen), so all
//! storage is dense and column-major via `nalgebra`.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A general real matrix: symplectic candidates, monomial and permutation
/// matrices, Hamiltonian basis elements.
pub type GeneralMatrix = DMatrix<f64>;

/// Relative asymmetry accepted by [`DenseSymmetric::new`] before it refuses
/// the input.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Real symmetric matrix stored in full.
///
/// `a[(i, j)] == a[(j, i)]` holds bit for bit: every constructor either
/// checks or enforces it by averaging the two triangles.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSymmetric(DMatrix<f64>);

impl DenseSymmetric {
    /// Accepts `m` when it is square and symmetric up to
    /// `SYMMETRY_TOL * max(1, max|m_ij|)`, then averages the triangles.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(m, SYMMETRY_TOL)
    }

    pub fn with_tolerance(m: DMatrix<f64>, rel_tol: f64) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::Empty);
        }
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let scale = m.amax().max(1.0);
        let n = m.nrows();
        for j in 0..n {
            for i in 0..j {
                let dev = (m[(i, j)] - m[(j, i)]).abs();
                if !(dev <= rel_tol * scale) {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        deviation: dev,
                    });
                }
            }
        }
        Ok(Self::symmetrize(m))
    }

    /// Averages `m` with its transpose without checking.
    pub fn symmetrize(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "symmetrize needs a square matrix");
        let n = m.nrows();
        let mut s = m;
        for j in 0..n {
            for i in 0..j {
                if s[(i, j)].to_bits() == s[(j, i)].to_bits() {
                    continue;
                }
                let v = 0.5 * s[(i, j)] + 0.5 * s[(j, i)];
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        DenseSymmetric(s)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        for r in rows {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        DenseSymmetric(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        DenseSymmetric(DMatrix::zeros(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        DenseSymmetric(DMatrix::from_fn(
            n,
            n,
            |i, j| if i == j { d[i] } else { 0.0 },
        ))
    }

    /// `[[a, 0], [0, b]]`.
    pub fn direct_sum(a: &DenseSymmetric, b: &DenseSymmetric) -> Self {
        let (m, r) = (a.order(), b.order());
        let mut out = DMatrix::zeros(m + r, m + r);
        out.view_mut((0, 0), (m, m)).copy_from(&a.0);
        out.view_mut((m, m), (r, r)).copy_from(&b.0);
        DenseSymmetric(out)
    }

    /// Assembles `[[n11, n12], [n12ᵀ, n22]]` from `p x p` blocks.
    pub fn from_blocks(n11: &DMatrix<f64>, n12: &DMatrix<f64>, n22: &DMatrix<f64>) -> Result<Self> {
        let p = n11.nrows();
        for blk in [n11, n12, n22] {
            if blk.nrows() != p || blk.ncols() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    found: blk.nrows().max(blk.ncols()),
                });
            }
        }
        let mut out = DMatrix::zeros(2 * p, 2 * p);
        out.view_mut((0, 0), (p, p)).copy_from(n11);
        out.view_mut((0, p), (p, p)).copy_from(n12);
        out.view_mut((p, 0), (p, p)).copy_from(&n12.transpose());
        out.view_mut((p, p), (p, p)).copy_from(n22);
        Self::with_tolerance(out, 1e-10)
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    /// `p` for an order `2p` matrix.
    pub fn half_order(&self) -> Result<usize> {
        let n = self.order();
        if n % 2 == 1 {
            Err(Error::OddOrder(n))
        } else {
            Ok(n / 2)
        }
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.0[(i, j)] = v;
        self.0[(j, i)] = v;
    }

    pub fn scale(&self, s: f64) -> Self {
        DenseSymmetric(&self.0 * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    /// Largest diagonal entry.
    pub fn max_diagonal(&self) -> f64 {
        self.0.diagonal().max()
    }

    /// Leading `p x p` block, top-right block and bottom-right block.
    pub fn blocks(&self) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
        let p = self.half_order()?;
        Ok((
            self.0.view((0, 0), (p, p)).into_owned(),
            self.0.view((0, p), (p, p)).into_owned(),
            self.0.view((p, p), (p, p)).into_owned(),
        ))
    }

    /// Number of entries whose magnitude exceeds `zero_tol`.
    pub fn nnz(&self, zero_tol: f64) -> usize {
        self.0.iter().filter(|v| v.abs() > zero_tol).count()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.order())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect()
    }

    /// Congruence `Sᵀ self S`.
    pub fn congruence(&self, s: &GeneralMatrix) -> Result<Self> {
        if s.nrows() != self.order() {
            return Err(Error::DimensionMismatch {
                expected: self.order(),
                found: s.nrows(),
            });
        }
        Ok(Self::symmetrize(s.transpose() * &self.0 * s))
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self.0.clone().try_inverse().ok_or(Error::Singular)?;
        Ok(Self::symmetrize(inv))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Applies `f` to the spectrum: `Q f(Λ) Qᵀ`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Self {
        let eig = SymmetricEigen::new(self.0.clone());
        let q = &eig.eigenvectors;
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
        Self::symmetrize(q * d * q.transpose())
    }

    /// Positive definite square root via the spectral decomposition.
    pub fn sqrt_pd(&self) -> Result<Self> {
        self.require_positive_spectrum()?;
        Ok(self.spectral_map(f64::sqrt))
    }

    /// Inverse of the positive definite square root.
    pub fn inv_sqrt_pd(&self) -> Result<Self> {
        self.require_positive_spectrum()?;
        Ok(self.spectral_map(|x| 1.0 / x.sqrt()))
    }

    fn require_positive_spectrum(&self) -> Result<()> {
        let ev = self.eigenvalues();
        let top = ev
            .last()
            .copied()
            .unwrap_or(0.0)
            .abs()
            .max(f64::MIN_POSITIVE);
        if ev[0] <= 1e-14 * top {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(())
    }

    /// Entrywise (Hadamard) product with `other`.
    pub fn hadamard(&self, other: &DenseSymmetric) -> Self {
        DenseSymmetric(self.0.component_mul(&other.0))
    }
}

impl fmt::Display for DenseSymmetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.order() {
            let row: Vec<String> = self.0.row(i).iter().map(|v| format!("{v:>10.6}")).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Permutation of `0..n`, stored by images: vertex `i` receives label
/// `images[i]`.
///
/// Input and output at the user boundary are 1-based (`from_one_based`,
/// `Display`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a permutation of 0..{n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.iter().any(|&v| v == 0) {
            return Err(Error::InvalidPermutation("labels are 1-based".into()));
        }
        Self::new(images.iter().map(|v| v - 1).collect())
    }

    /// Builds a permutation from disjoint 1-based cycles, e.g. `(1 2 4)`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &v) in cycle.iter().enumerate() {
                if v == 0 || v > n || touched[v - 1] {
                    return Err(Error::InvalidPermutation(format!("bad cycle entry {v}")));
                }
                touched[v - 1] = true;
                let next = cycle[(k + 1) % cycle.len()];
                images[v - 1] = next - 1;
            }
        }
        Self::new(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|v| v + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Permutation(inv)
    }

    /// `P_σ`, whose column `i` is column `σ(i)` of the identity, so that
    /// `P e_i = e_σ(i)`.
    pub fn matrix(&self) -> GeneralMatrix {
        let n = self.0.len();
        let mut p = DMatrix::zeros(n, n);
        for (i, &v) in self.0.iter().enumerate() {
            p[(v, i)] = 1.0;
        }
        p
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| (v + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}
