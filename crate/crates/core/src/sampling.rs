//! Seeded random matrices and graphs.
//!
//! All samplers take the generator explicitly; nothing here touches global
//! state.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graphs::LabeledGraph;
use crate::matrix::{DenseSymmetric, GeneralMatrix};
use crate::symplectic::shear;

/// Minimum `|det|` accepted for a random invertible factor.
pub const DET_FLOOR: f64 = 1e-8;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform on `[-1, 1]`.
pub fn uniform_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> GeneralMatrix {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..=1.0))
}

/// Diagonal and upper entries uniform on `[-1, 1]`.
pub fn uniform_symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseSymmetric {
    DenseSymmetric::symmetrize(uniform_matrix(n, n, rng))
}

/// Uniform `[-1, 1]` matrix, resampled until `|det| >= DET_FLOOR`.
pub fn invertible<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GeneralMatrix {
    loop {
        let a = uniform_matrix(n, n, rng);
        if a.determinant().abs() >= DET_FLOOR {
            return a;
        }
    }
}

/// Random positive definite matrix: `AᵀA + cI` with `c` uniform on `[0.1, 1]`.
pub fn positive_definite<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseSymmetric {
    let a = uniform_matrix(n, n, rng);
    let c: f64 = rng.gen_range(0.1..=1.0);
    DenseSymmetric::symmetrize(a.transpose() * &a + DMatrix::identity(n, n) * c)
}

/// Erdős–Rényi graph.
pub fn graph<R: Rng + ?Sized>(n: usize, edge_prob: f64, rng: &mut R) -> LabeledGraph {
    let mut g = LabeledGraph::empty(n);
    for j in 0..n {
        for i in 0..j {
            if rng.gen_bool(edge_prob) {
                g.add_edge(i, j).expect("in range");
            }
        }
    }
    g
}

/// Random recursive tree: each new vertex joins a uniformly chosen earlier
/// one, and the labels are shuffled.
pub fn tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LabeledGraph {
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let mut g = LabeledGraph::empty(n);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        g.add_edge(labels[u], labels[v]).expect("in range");
    }
    g
}

/// A positive definite matrix with exactly the pattern `g`.
///
/// Off-diagonal entries on edges have magnitude in `[0.2, 1]` with random
/// sign; the diagonal is shifted until the smallest eigenvalue lies in
/// `[0.1, 1]`. Only the diagonal moves, so the pattern is exact.
pub fn pd_with_pattern<R: Rng + ?Sized>(g: &LabeledGraph, rng: &mut R) -> DenseSymmetric {
    let n = g.order();
    let mut m = DMatrix::zeros(n, n);
    for (i, j) in g.edges() {
        let mag: f64 = rng.gen_range(0.2..=1.0);
        let v = if rng.gen_bool(0.5) { mag } else { -mag };
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    for i in 0..n {
        m[(i, i)] = rng.gen_range(-1.0..=1.0);
    }
    let base = DenseSymmetric::symmetrize(m);
    let lo = base.eigenvalues()[0];
    let c: f64 = rng.gen_range(0.1..=1.0);
    let mut out = base.into_inner();
    for i in 0..n {
        out[(i, i)] += c - lo;
    }
    DenseSymmetric::symmetrize(out)
}

/// `p` positive targets uniform on `[0.5, 3]`, sorted.
pub fn distinct_targets<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut t: Vec<f64> = (0..p).map(|_| rng.gen_range(0.5..=3.0)).collect();
        t.sort_by(f64::total_cmp);
        if t.windows(2).all(|w| w[1] - w[0] > 1e-3) {
            return t;
        }
    }
}

/// Positive targets with deliberate repeats: each value is drawn from a pool
/// of at most `p / 2 + 1` distinct numbers.
pub fn targets_with_repeats<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Vec<f64> {
    let pool = distinct_targets(p / 2 + 1, rng);
    let mut t: Vec<f64> = (0..p)
        .map(|_| *pool.choose(rng).expect("nonempty"))
        .collect();
    t.sort_by(f64::total_cmp);
    t
}

/// A random symplectic matrix: a product of an upper shear, a block
/// diagonal factor and a lower shear.
pub fn symplectic<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Result<GeneralMatrix> {
    if p == 0 {
        return Err(Error::InvalidInput("p must be positive".into()));
    }
    let upper = shear(&uniform_symmetric(p, rng));
    let lower = shear(&uniform_symmetric(p, rng)).transpose();
    let a = invertible(p, rng);
    let a_inv_t = a.transpose().try_inverse().ok_or(Error::Singular)?;
    let mut block = DMatrix::zeros(2 * p, 2 * p);
    block.view_mut((0, 0), (p, p)).copy_from(&a);
    block.view_mut((p, p), (p, p)).copy_from(&a_inv_t);
    Ok(upper * block * lower)
}
