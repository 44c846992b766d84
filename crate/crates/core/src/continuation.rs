//! Numerical continuation by symplectic congruence.
//!
//! Every iterate is `X_{k+1} = exp(ΔM)ᵀ X_k exp(ΔM)` with `ΔM` Hamiltonian, so
//! the symplectic spectrum never moves; only the prescribed entries are driven
//! toward their targets. `ΔM` is the minimum norm solution of the linearised
//! constraint system, whose matrix is a row selection of `Φ(X_k)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graphs::{default_zero_tol, graph_of_matrix, LabeledGraph};
use crate::matrix::{DenseSymmetric, GeneralMatrix};
use crate::sssp::{sp_basis, SpBasisElement};
use crate::symplectic::{omega, williamson_decompose};

#[derive(Clone, Debug)]
pub struct ContinuationOptions {
    /// Newton iterations per homotopy step.
    pub max_iter: usize,
    /// Convergence threshold on the constrained entries, relative to `‖X‖_max`.
    pub tol: f64,
    /// Initial number of homotopy steps.
    pub steps: usize,
    /// How many times the homotopy may be restarted with a smaller
    /// perturbation or finer steps.
    pub retries: usize,
    /// Largest Frobenius norm of a single `ΔM`.
    pub max_step: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            max_iter: 60,
            tol: 1e-13,
            steps: 4,
            retries: 6,
            max_step: 0.5,
        }
    }
}

/// Result of one Newton solve.
#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub matrix: DenseSymmetric,
    /// Largest deviation of a constrained entry from its target.
    pub residual: f64,
    pub iterations: usize,
}

fn residual(x: &GeneralMatrix, positions: &[(usize, usize)], targets: &[f64]) -> DVector<f64> {
    DVector::from_iterator(
        positions.len(),
        positions
            .iter()
            .zip(targets)
            .map(|(&(i, j), &t)| t - x[(i, j)]),
    )
}

fn jacobian(
    x: &GeneralMatrix,
    basis: &[SpBasisElement],
    positions: &[(usize, usize)],
) -> GeneralMatrix {
    let mut jac = DMatrix::zeros(positions.len(), basis.len());
    for b in basis {
        let t = b.matrix.transpose() * x + x * &b.matrix;
        for (r, &(i, j)) in positions.iter().enumerate() {
            jac[(r, b.index)] = t[(i, j)];
        }
    }
    jac
}

fn congruence_step(x: &GeneralMatrix, dm: &GeneralMatrix) -> GeneralMatrix {
    let e = dm.clone().exp();
    let y = e.transpose() * x * &e;
    (&y + y.transpose()) * 0.5
}

/// Drives the entries of `x0` at `positions` to `targets` by symplectic
/// congruence.
pub fn congruence_newton(
    x0: &DenseSymmetric,
    positions: &[(usize, usize)],
    targets: &[f64],
    opts: &ContinuationOptions,
) -> Result<NewtonOutcome> {
    let p = x0.half_order()?;
    if positions.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: positions.len(),
            found: targets.len(),
        });
    }
    let basis = sp_basis(p);
    let mut x = x0.as_matrix().clone();
    let scale = x.amax().max(1.0);
    let mut r = residual(&x, positions, targets);
    for iter in 0..=opts.max_iter {
        let rmax = r.amax();
        if rmax <= opts.tol * scale {
            return Ok(NewtonOutcome {
                matrix: DenseSymmetric::symmetrize(x),
                residual: rmax,
                iterations: iter,
            });
        }
        if iter == opts.max_iter {
            break;
        }
        let jac = jacobian(&x, &basis, positions);
        let svd = jac.svd(true, true);
        let top = svd.singular_values.max();
        if top <= 0.0 {
            break;
        }
        let coeffs = svd
            .solve(&r, 1e-12 * top)
            .map_err(|e| Error::NoConvergence(e.to_string()))?;
        let mut dm = DMatrix::zeros(2 * p, 2 * p);
        for b in &basis {
            dm += &b.matrix * coeffs[b.index];
        }
        let norm = dm.norm();
        if norm > opts.max_step {
            dm *= opts.max_step / norm;
        }
        let current = r.norm();
        let mut accepted = false;
        let mut alpha = 1.0;
        for _ in 0..30 {
            let trial = congruence_step(&x, &(&dm * alpha));
            let rt = residual(&trial, positions, targets);
            if rt.norm() < current {
                x = trial;
                r = rt;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NoConvergence(format!(
        "constraint residual {:e} after {} iterations",
        r.amax(),
        opts.max_iter
    )))
}

/// Copies `x` with the listed positions set to exact zeros.
fn snap_zeros(x: &DenseSymmetric, positions: &[(usize, usize)]) -> DenseSymmetric {
    let mut out = x.clone();
    for &(i, j) in positions {
        out.set(i, j, 0.0);
    }
    out
}

/// A matrix with pattern `supergraph` and the symplectic spectrum of
/// `seed`, obtained by switching on the new edges with a small random
/// perturbation. `seed` should have the SSSP; its graph must be a subgraph
/// of `supergraph`.
pub fn supergraph_realize<R: Rng + ?Sized>(
    seed: &DenseSymmetric,
    supergraph: &LabeledGraph,
    opts: &ContinuationOptions,
    rng: &mut R,
) -> Result<DenseSymmetric> {
    seed.half_order()?;
    let base = graph_of_matrix(seed, default_zero_tol(seed));
    if supergraph.order() != seed.order() {
        return Err(Error::DimensionMismatch {
            expected: seed.order(),
            found: supergraph.order(),
        });
    }
    if base.edges().any(|(i, j)| !supergraph.has_edge(i, j)) {
        return Err(Error::InvalidInput(
            "the seed pattern is not contained in the supergraph".into(),
        ));
    }
    let positions = base.non_edges();
    let zeros: Vec<(usize, usize)> = supergraph.non_edges();
    let lambda_min = seed.eigenvalues()[0];
    let mut eps = 0.2 * lambda_min;
    let directions: Vec<f64> = positions
        .iter()
        .map(|&(i, j)| {
            if supergraph.has_edge(i, j) {
                let mag: f64 = rng.gen_range(0.5..1.0);
                if rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            } else {
                0.0
            }
        })
        .collect();
    let mut steps = opts.steps.max(1);
    let mut last_err = Error::NoConvergence("no attempt made".into());
    for _ in 0..=opts.retries {
        match homotopy(seed, &positions, &directions, eps, steps, opts) {
            Ok(x) => {
                let x = snap_zeros(&x, &zeros);
                if &graph_of_matrix(&x, default_zero_tol(&x)) == supergraph {
                    return Ok(x);
                }
                last_err =
                    Error::NoConvergence("an existing edge vanished during continuation".into());
            }
            Err(e) => last_err = e,
        }
        eps *= 0.5;
        steps *= 2;
    }
    Err(last_err)
}

fn homotopy(
    seed: &DenseSymmetric,
    positions: &[(usize, usize)],
    directions: &[f64],
    eps: f64,
    steps: usize,
    opts: &ContinuationOptions,
) -> Result<DenseSymmetric> {
    let start: Vec<f64> = positions.iter().map(|&(i, j)| seed.get(i, j)).collect();
    let mut x = seed.clone();
    for s in 1..=steps {
        let t = s as f64 / steps as f64;
        let targets: Vec<f64> = start
            .iter()
            .zip(directions)
            .map(|(&a, &d)| a + t * eps * d)
            .collect();
        x = congruence_newton(&x, positions, &targets, opts)?.matrix;
    }
    Ok(x)
}

/// A matrix with pattern `g` whose symplectic spectrum is the given set of
/// distinct positive numbers, continued from the diagonal seed `D ⊕ D`.
pub fn realize_all_simple<R: Rng + ?Sized>(
    g: &LabeledGraph,
    targets: &[f64],
    opts: &ContinuationOptions,
    rng: &mut R,
) -> Result<DenseSymmetric> {
    if g.order() != 2 * targets.len() {
        return Err(Error::DimensionMismatch {
            expected: g.order(),
            found: 2 * targets.len(),
        });
    }
    let mut d = targets.to_vec();
    if d.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput("targets must be positive".into()));
    }
    d.sort_by(f64::total_cmp);
    if d.windows(2).any(|w| (w[1] - w[0]) <= 1e-9 * w[1]) {
        return Err(Error::Rejected("targets must be distinct".into()));
    }
    let dd: Vec<f64> = d.iter().chain(d.iter()).copied().collect();
    let seed = DenseSymmetric::from_diagonal(&dd);
    supergraph_realize(&seed, g, opts, rng)
}

/// Moves the symplectic spectrum of `n` to `target` while keeping the zero
/// pattern of `g`. Starting from a Williamson pair `(S, D)` of the current
/// iterate, `S⁻ᵀ(D̂ ⊕ D̂)S⁻¹` has the new spectrum; the zero entries are then
/// restored by congruence. Intended for SSSP matrices and nearby targets.
pub fn refine_spectrum(
    n: &DenseSymmetric,
    g: &LabeledGraph,
    target: &[f64],
    opts: &ContinuationOptions,
) -> Result<DenseSymmetric> {
    let p = n.half_order()?;
    if target.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: target.len(),
        });
    }
    if target.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidInput("targets must be positive".into()));
    }
    let mut goal = target.to_vec();
    goal.sort_by(f64::total_cmp);
    let positions = g.non_edges();
    let zeros = vec![0.0; positions.len()];
    let w = omega(p);
    let start = williamson_decompose(n)?.d;

    let mut steps = opts.steps.max(1);
    let mut last_err = Error::NoConvergence("no attempt made".into());
    for _ in 0..=opts.retries {
        let attempt = (|| -> Result<DenseSymmetric> {
            let mut x = n.clone();
            for s in 1..=steps {
                let t = s as f64 / steps as f64;
                let wp = williamson_decompose(&x)?;
                let mut dd = DMatrix::zeros(2 * p, 2 * p);
                for k in 0..p {
                    let v = start[k] + t * (goal[k] - start[k]);
                    dd[(k, k)] = v;
                    dd[(k + p, k + p)] = v;
                }
                // S⁻¹ = Ωᵀ Sᵀ Ω for symplectic S.
                let s_inv = w.transpose() * wp.s.transpose() * &w;
                let x0 = DenseSymmetric::symmetrize(s_inv.transpose() * dd * &s_inv);
                x = congruence_newton(&x0, &positions, &zeros, opts)?.matrix;
            }
            Ok(x)
        })();
        match attempt {
            Ok(x) => {
                let x = snap_zeros(&x, &positions);
                if graph_of_matrix(&x, default_zero_tol(&x)) == *g {
                    return Ok(x);
                }
                last_err = Error::NoConvergence("an edge vanished during continuation".into());
            }
            Err(e) => last_err = e,
        }
        steps *= 2;
    }
    Err(last_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{complete, cycle, path};
    use crate::symplectic::{symplectic_spectrum, DEFAULT_CLUSTER_TOL};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_simple_on_small_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let opts = ContinuationOptions::default();
        for g in [
            path(4),
            cycle(6).unwrap(),
            complete(4),
            LabeledGraph::empty(4),
        ] {
            let p = g.order() / 2;
            let targets: Vec<f64> = (1..=p).map(|k| k as f64 + 0.5).collect();
            let x = realize_all_simple(&g, &targets, &opts, &mut rng).unwrap();
            assert_eq!(graph_of_matrix(&x, default_zero_tol(&x)), g);
            let s = symplectic_spectrum(&x, DEFAULT_CLUSTER_TOL).unwrap();
            assert!(s.max_relative_error(&targets) < 1e-8, "{g}: {:?}", s.values);
        }
    }

    #[test]
    fn repeated_targets_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = realize_all_simple(
            &path(4),
            &[1.0, 1.0],
            &ContinuationOptions::default(),
            &mut rng,
        );
        assert!(matches!(r, Err(Error::Rejected(_))));
    }

    #[test]
    fn refine_splits_a_double_value() {
        // A complete pattern, so the SSSP holds vacuously.
        let n = crate::constructions::random_smear(
            &[1.0, 1.0],
            3,
            crate::constructions::SmearMode::Complete,
        )
        .unwrap();
        let g = graph_of_matrix(&n, default_zero_tol(&n));
        assert_eq!(g, complete(4));
        let x = refine_spectrum(&n, &g, &[0.98, 1.03], &ContinuationOptions::default()).unwrap();
        let sp = symplectic_spectrum(&x, DEFAULT_CLUSTER_TOL).unwrap();
        assert!(sp.max_relative_error(&[0.98, 1.03]) < 1e-8);
        assert_eq!(graph_of_matrix(&x, default_zero_tol(&x)), g);
    }
}
