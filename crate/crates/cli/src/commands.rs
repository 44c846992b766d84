//! The subcommands as functions returning serialisable reports.

use std::fmt;

use rand::Rng;
use serde::{Serialize, Serializer};

use spisep_core::constructions::{
    dopico_johnson, householder, random_smear, realize_shear, sparsity_audit, tripath_b, SmearMode,
    SparsityReport,
};
use spisep_core::graphs::{coupling_closure_graph, cycle, path, DEFAULT_ZERO_REL_TOL};
use spisep_core::sampling::{self, seeded};
use spisep_core::sssp::{
    commutation_residual, direction_graph, has_sssp_in_direction, sssp_report, DEFAULT_RANK_TOL,
};
use spisep_core::symplectic::{
    is_positive_definite_default, symplectic_spectrum, williamson_decompose, Cluster,
    DEFAULT_CLUSTER_TOL,
};
use spisep_core::zero_forcing::{zc_equals_one, zc_number};
use spisep_core::{CoupledGraph, DenseSymmetric, LabeledGraph};

use crate::catalogue::{catalogue_order4, join_matrix, CatalogueEntry, Verdict};
use crate::CliError;

pub const SEED_ENV: &str = "SPISEP_SEED";

/// Tolerances shared by all commands; `zero_tol` is relative to the largest
/// entry of the matrix it is applied to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub cluster_tol: f64,
    pub rank_tol: f64,
    pub zero_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cluster_tol: DEFAULT_CLUSTER_TOL,
            rank_tol: DEFAULT_RANK_TOL,
            zero_tol: DEFAULT_ZERO_REL_TOL,
        }
    }
}

/// `SPISEP_SEED` wins over the flag; the default seed is 0.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64, CliError> {
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        None => Ok(flag.unwrap_or(0)),
    }
}

fn rows<S: Serializer>(m: &DenseSymmetric, s: S) -> Result<S::Ok, S::Error> {
    m.rows().serialize(s)
}

fn opt_rows<S: Serializer>(m: &Option<DenseSymmetric>, s: S) -> Result<S::Ok, S::Error> {
    m.as_ref().map(DenseSymmetric::rows).serialize(s)
}

fn require_pd(n: &DenseSymmetric) -> Result<usize, CliError> {
    let p = n.half_order()?;
    if !is_positive_definite_default(n) {
        return Err(CliError::Numerical(
            "matrix is not positive definite".into(),
        ));
    }
    Ok(p)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub values: Vec<f64>,
    pub clusters: Vec<Cluster>,
    pub tolerances: Tolerances,
}

pub fn spectrum(n: &DenseSymmetric, tol: Tolerances) -> Result<SpectrumReport, CliError> {
    require_pd(n)?;
    let s = symplectic_spectrum(n, tol.cluster_tol)?;
    Ok(SpectrumReport {
        values: s.values,
        clusters: s.clusters,
        tolerances: tol,
    })
}

impl fmt::Display for SpectrumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "symplectic eigenvalues (cluster_tol {:e}):",
            self.tolerances.cluster_tol
        )?;
        for c in &self.clusters {
            writeln!(f, "  {:.12}  multiplicity {}", c.value, c.multiplicity)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WilliamsonReport {
    pub d: Vec<f64>,
    /// Symplectic `S` with `SᵀNS = D ⊕ D`, row-major.
    pub s: Vec<Vec<f64>>,
    pub residual: f64,
    pub tolerances: Tolerances,
}

pub fn williamson(n: &DenseSymmetric, tol: Tolerances) -> Result<WilliamsonReport, CliError> {
    require_pd(n)?;
    let w = williamson_decompose(n)?;
    let residual = w.residual(n);
    let s = (0..w.s.nrows())
        .map(|i| (0..w.s.ncols()).map(|j| w.s[(i, j)]).collect())
        .collect();
    Ok(WilliamsonReport {
        d: w.d,
        s,
        residual,
        tolerances: tol,
    })
}

impl fmt::Display for WilliamsonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "D = {:?}", self.d)?;
        writeln!(f, "S =")?;
        for r in &self.s {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:>14.8}")).collect();
            writeln!(f, "  {}", cells.join(" "))?;
        }
        writeln!(f, "residual {:e}", self.residual)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionReport {
    pub has_sssp: bool,
    /// 1-based edges of `G(N)` with the support of `R` added.
    pub graph: Vec<(usize, usize)>,
    #[serde(serialize_with = "opt_rows")]
    pub witness: Option<DenseSymmetric>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SsspCommandReport {
    pub has_sssp: bool,
    pub rank_test: bool,
    pub nullspace_test: bool,
    pub rows: usize,
    pub columns: usize,
    pub rank: usize,
    pub relative_gap: f64,
    /// Nonzero `Y` with `N∘Y = O` and `ΩNY = YNΩ`, when SSSP fails.
    #[serde(serialize_with = "opt_rows")]
    pub witness: Option<DenseSymmetric>,
    pub witness_residual: Option<f64>,
    pub direction: Option<DirectionReport>,
    pub tolerances: Tolerances,
}

/// Both SSSP tests; a disagreement between them is a numerical failure.
pub fn sssp(
    n: &DenseSymmetric,
    direction: Option<&DenseSymmetric>,
    tol: Tolerances,
) -> Result<SsspCommandReport, CliError> {
    require_pd(n)?;
    let zero_tol = tol.zero_tol * n.max_abs();
    let (report, null) = sssp_report(n, zero_tol, tol.rank_tol)?;
    if !report.agree() {
        return Err(CliError::Numerical(format!(
            "rank test ({}) and nullspace test ({}) disagree; relative gap {:e}",
            report.rank_test, report.nullspace_test, null.relative_gap
        )));
    }
    let witness_residual = match &null.witness {
        Some(y) => Some(commutation_residual(n, y)?),
        None => None,
    };
    let direction = match direction {
        Some(r) => {
            let v = has_sssp_in_direction(n, r)?;
            let g = spisep_core::graphs::graph_of_matrix(n, zero_tol);
            let gr = direction_graph(&g, r, tol.zero_tol * r.max_abs())?;
            Some(DirectionReport {
                has_sssp: v.has_sssp,
                graph: gr.edges_one_based(),
                witness: v.witness,
            })
        }
        None => None,
    };
    Ok(SsspCommandReport {
        has_sssp: report.rank_test,
        rank_test: report.rank_test,
        nullspace_test: report.nullspace_test,
        rows: report.rows,
        columns: report.columns,
        rank: report.rank,
        relative_gap: null.relative_gap,
        witness: null.witness,
        witness_residual,
        direction,
        tolerances: tol,
    })
}

impl fmt::Display for SsspCommandReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "SSSP: {} (rank test {}, nullspace test {}; rank {} of {} rows, rank_tol {:e})",
            self.has_sssp,
            self.rank_test,
            self.nullspace_test,
            self.rank,
            self.rows,
            self.tolerances.rank_tol
        )?;
        if let Some(y) = &self.witness {
            writeln!(f, "witness Y:\n{y}")?;
        }
        if let Some(d) = &self.direction {
            writeln!(f, "SSSP with respect to the direction: {}", d.has_sssp)?;
        }
        Ok(())
    }
}

/// Matrix families produced by `construct`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    /// `[[D, ·], [·, ·]]` on the triangular path `TP_{2p}`.
    Tripath,
    /// `K_{p,p}` with the matching coupling, from a dense Householder reflector.
    Kpp,
    /// Congruence of `D ⊕ D` by a random shear.
    Shear,
    /// `D ⊕ D`.
    Diagonal,
    /// The sympPD matrix `[[I, J], [J, pI + J]]`; targets are ignored.
    Eq2,
    /// A random sympPD matrix `[[N₁₁, N₁₁W], [WN₁₁, N₁₁⁻¹ + WN₁₁W]]`.
    DopicoJohnson,
    /// Random symplectic smear of `D ⊕ D` with graph `K_{2p}`.
    SmearComplete,
    /// Random symplectic smear of `D ⊕ D` with graph `K_p ⊔ K_p`.
    SmearTwoCliques,
    /// Corona of a path with leaves first; targets are ignored.
    CoronaPath,
    /// Corona of a cycle; targets are ignored.
    CoronaCycle,
    /// Corona of a complete graph; targets are ignored.
    CoronaComplete,
}

pub fn construct(
    family: Family,
    p: usize,
    targets: Option<&[f64]>,
    seed: u64,
) -> Result<DenseSymmetric, CliError> {
    if p == 0 {
        return Err(CliError::Precondition("p must be positive".into()));
    }
    let ones = vec![1.0; p];
    let t = targets.unwrap_or(&ones);
    if t.len() != p {
        return Err(CliError::Precondition(format!(
            "expected {p} targets, got {}",
            t.len()
        )));
    }
    let mut rng = seeded(seed);
    let m = match family {
        Family::Tripath => realize_shear(&tripath_b(p), t)?,
        Family::Kpp => {
            let u: Vec<f64> = loop {
                let u: Vec<f64> = (0..p)
                    .map(|_| {
                        let v: f64 = rng.gen_range(0.5..1.5);
                        if rng.gen_bool(0.5) {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect();
                let norm2: f64 = u.iter().map(|v| v * v).sum();
                if p == 1 || u.iter().all(|v| (2.0 * v * v - norm2).abs() > 1e-3 * norm2) {
                    break u;
                }
            };
            realize_shear(&householder(&u)?, t)?
        }
        Family::Shear => realize_shear(&sampling::uniform_symmetric(p, &mut rng), t)?,
        Family::Diagonal => {
            let dd: Vec<f64> = t.iter().chain(t).copied().collect();
            if dd.iter().any(|&v| !(v > 0.0)) {
                return Err(CliError::Precondition("targets must be positive".into()));
            }
            DenseSymmetric::from_diagonal(&dd)
        }
        Family::Eq2 => join_matrix(p),
        Family::DopicoJohnson => {
            let n11 = sampling::positive_definite(p, &mut rng);
            let w = sampling::uniform_symmetric(p, &mut rng);
            dopico_johnson(&n11, &w)?
        }
        Family::SmearComplete => random_smear(t, seed, SmearMode::Complete)?,
        Family::SmearTwoCliques => random_smear(t, seed, SmearMode::TwoCliques)?,
        Family::CoronaPath | Family::CoronaCycle | Family::CoronaComplete => {
            let h = match family {
                Family::CoronaPath => path(p),
                Family::CoronaCycle => cycle(p)?,
                _ => spisep_core::graphs::complete(p),
            };
            corona_sample(&h, &mut rng)?
        }
    };
    Ok(m)
}

/// `[[I, E], [E, A]]` with `A` on `H`, `λ_min(A) >= 0.35` and
/// `|e_i| in [0.1, 0.5]`, so `A − E²` stays positive definite.
pub fn corona_sample<R: Rng + ?Sized>(
    h: &LabeledGraph,
    rng: &mut R,
) -> Result<DenseSymmetric, CliError> {
    let p = h.order();
    let a =
        sampling::pd_with_pattern(h, rng).into_inner() + nalgebra::DMatrix::identity(p, p) * 0.25;
    let a = DenseSymmetric::symmetrize(a);
    let e: Vec<f64> = (0..p)
        .map(|_| {
            let v: f64 = rng.gen_range(0.1..=0.5);
            if rng.gen_bool(0.5) {
                v
            } else {
                -v
            }
        })
        .collect();
    Ok(spisep_core::constructions::corona_realize(
        &a,
        &vec![1.0; p],
        &e,
    )?)
}

#[derive(Clone, Debug, Serialize)]
pub struct ZcReport {
    pub order: usize,
    pub coupling: Vec<(usize, usize)>,
    pub zc: usize,
    /// 1-based minimum forcing set.
    pub set: Vec<usize>,
    pub zc_equals_one: bool,
    pub closure_edges: usize,
}

pub fn zc(cg: &CoupledGraph) -> Result<ZcReport, CliError> {
    let z = zc_number(cg)?;
    Ok(ZcReport {
        order: cg.order(),
        coupling: cg.coupling.pairs_one_based(),
        zc: z.number,
        set: z.set.iter().map(|v| v + 1).collect(),
        zc_equals_one: zc_equals_one(cg),
        closure_edges: coupling_closure_graph(cg).edge_count(),
    })
}

impl fmt::Display for ZcReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set: Vec<String> = self.set.iter().map(|v| format!("v{v}")).collect();
        writeln!(
            f,
            "Z_C = {}, minimum forcing set {{{}}}",
            self.zc,
            set.join(", ")
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    #[serde(flatten)]
    pub report: SparsityReport,
    pub violated: bool,
    pub tolerances: Tolerances,
}

pub fn audit_sparsity(n: &DenseSymmetric, tol: Tolerances) -> Result<AuditReport, CliError> {
    let report = sparsity_audit(n, tol.zero_tol)?;
    Ok(AuditReport {
        violated: report.violated(),
        report,
        tolerances: tol,
    })
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.report;
        writeln!(
            f,
            "order {}: nnz(N) = {}, nnz(N^-1) = {}, irreducible {}, sympPD {}",
            r.order, r.nnz, r.nnz_inverse, r.irreducible, r.sympd
        )?;
        if let Some(b) = r.inverse_pair_bound_holds {
            writeln!(f, "nnz(N) + nnz(N^-1) >= 8n - 8: {b}")?;
        }
        if let Some(b) = r.sympd_bound_holds {
            writeln!(f, "nnz(N) >= 4n - 4: {b}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogueReport {
    pub seed: u64,
    pub entries: Vec<CatalogueEntry>,
}

pub fn catalogue(seed: u64) -> Result<CatalogueReport, CliError> {
    Ok(CatalogueReport {
        seed,
        entries: catalogue_order4(seed)?,
    })
}

impl fmt::Display for CatalogueReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<8} {:<3} {:<28} basis", "graph", "C", "verdict")?;
        for e in &self.entries {
            let verdict = match e.verdict {
                Verdict::SpectrallyArbitrary => "spectrally_arbitrary",
                Verdict::SimpleOnly => "simple_only",
                Verdict::ArbitraryWithSsspWitness => "arbitrary_with_SSSP_witness",
            };
            let basis = match (&e.witness_check, e.obstructions.first()) {
                (Some(w), _) => format!("sympPD witness: {}", w.source),
                (None, Some(o)) => format!("{o:?}"),
                (None, None) => String::new(),
            };
            writeln!(
                f,
                "{:<8} C{:<2} {:<28} {}",
                e.graph, e.coupling_id, verdict, basis
            )?;
        }
        Ok(())
    }
}

/// Wrapper so a bare matrix can be written with `--json` or as text.
#[derive(Serialize)]
pub struct MatrixOut<'a> {
    pub order: usize,
    #[serde(serialize_with = "rows")]
    pub entries: &'a DenseSymmetric,
}
