//! Symplectic spectra of all coupled graphs of order four.
//!
//! With `p = 2` a labeled graph either allows a sympPD matrix, and then
//! every spectrum, or it allows only two distinct symplectic eigenvalues.
//! Each entry therefore carries either a sympPD witness, checked here, or
//! a structural obstruction backed by random sampling.

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use spisep_core::constructions::{dopico_johnson, random_smear, sparsity_obstruction, SmearMode};
use spisep_core::continuation::{realize_all_simple, supergraph_realize, ContinuationOptions};
use spisep_core::graphs::{default_zero_tol, graph_of_matrix, representative_labelings};
use spisep_core::sampling::{pd_with_pattern, seeded};
use spisep_core::sssp::{sssp_report, DEFAULT_RANK_TOL};
use spisep_core::symplectic::{omega, symp_pd_residual, symplectic_spectrum, DEFAULT_CLUSTER_TOL};
use spisep_core::{CoupledGraph, Coupling, DenseSymmetric, Error, LabeledGraph, Result};

/// Random matrices drawn for each `simple_only` entry.
pub const EVIDENCE_SAMPLES: usize = 1000;

/// Largest `‖(ΩN)² + I‖_max` accepted for a witness.
pub const WITNESS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SpectrallyArbitrary,
    SimpleOnly,
    ArbitraryWithSsspWitness,
}

impl Verdict {
    pub fn is_arbitrary(self) -> bool {
        self != Verdict::SimpleOnly
    }
}

/// Reasons a labeled graph cannot carry a sympPD matrix. Labels are
/// 1-based and refer to the representative labeling of the entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstruction {
    /// An isolated vertex coupled with a non-isolated one.
    IsolatedVertex,
    /// Connected with fewer than `3p − 2` edges.
    Sparsity { edges: usize, bound: usize },
    /// `((ΩN)²)_{row,col}` is a single product of two nonzero entries, so it
    /// never vanishes and `(ΩN)²` is never a multiple of `I`.
    SingleTermEntry {
        row: usize,
        col: usize,
        through: usize,
    },
}

fn rows<S: Serializer>(m: &DenseSymmetric, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.rows().serialize(s)
}

fn opt_rows<S: Serializer>(
    m: &Option<DenseSymmetric>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    m.as_ref().map(DenseSymmetric::rows).serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessCheck {
    pub source: String,
    /// Label given to `v1, …, v4`.
    pub labeling: Vec<usize>,
    pub symp_pd_residual: f64,
    pub spectrum: Vec<f64>,
    pub sssp: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub samples: usize,
    /// Samples whose two symplectic eigenvalues fell in one cluster.
    pub repeated: usize,
    pub min_relative_gap: f64,
    /// Smallest `|((ΩN)²)_{row,col}|` at a single-term position.
    pub min_single_term: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistinctRealization {
    pub targets: Vec<f64>,
    #[serde(serialize_with = "rows")]
    pub matrix: DenseSymmetric,
    pub max_relative_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogueEntry {
    pub graph: String,
    pub coupling_id: usize,
    /// 1-based vertex names.
    pub coupling: Vec<(usize, usize)>,
    pub verdict: Verdict,
    #[serde(serialize_with = "opt_rows")]
    pub witness: Option<DenseSymmetric>,
    pub witness_check: Option<WitnessCheck>,
    /// Labels of the representative labeling used for obstructions,
    /// evidence and the distinct realization.
    pub labeling: Vec<usize>,
    pub obstructions: Vec<Obstruction>,
    pub evidence: Option<Evidence>,
    pub distinct: DistinctRealization,
    pub cluster_tol: f64,
    pub rank_tol: f64,
    pub zero_tol: f64,
}

/// The eleven graphs of order four with their vertex names `v1..v4`
/// (0-based here).
pub fn order4_graphs() -> Vec<(&'static str, LabeledGraph)> {
    let g = |edges: &[(usize, usize)]| LabeledGraph::from_one_based(4, edges).expect("valid edges");
    vec![
        ("4K1", g(&[])),
        ("2K1+K2", g(&[(2, 4)])),
        ("2K2", g(&[(1, 3), (2, 4)])),
        ("K1+P3", g(&[(2, 3), (3, 4)])),
        ("K1+K3", g(&[(2, 3), (2, 4), (3, 4)])),
        ("P4", g(&[(1, 2), (2, 3), (3, 4)])),
        ("K1,3", g(&[(1, 2), (1, 3), (1, 4)])),
        ("C4", g(&[(1, 3), (1, 4), (2, 3), (2, 4)])),
        ("paw", g(&[(1, 2), (1, 3), (1, 4), (3, 4)])),
        ("K4-e", g(&[(1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])),
        ("K4", g(&[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])),
    ]
}

/// `C1 = {(v1,v2),(v3,v4)}`, `C2 = {(v1,v3),(v2,v4)}`,
/// `C3 = {(v1,v4),(v2,v3)}`.
pub fn order4_couplings() -> [Coupling; 3] {
    let c = |pairs: &[(usize, usize)]| Coupling::from_one_based(4, pairs).expect("valid coupling");
    [
        c(&[(1, 2), (3, 4)]),
        c(&[(1, 3), (2, 4)]),
        c(&[(1, 4), (2, 3)]),
    ]
}

/// The sympPD paw matrix with leading principal minors `3, 2, 1, 1`.
pub fn paw_matrix() -> DenseSymmetric {
    DenseSymmetric::from_rows(&[
        vec![3.0, -1.0, 1.0, 1.0],
        vec![-1.0, 1.0, 0.0, 0.0],
        vec![1.0, 0.0, 1.0, 1.0],
        vec![1.0, 0.0, 1.0, 2.0],
    ])
    .expect("symmetric")
}

/// A matrix on the 4-cycle `1-2-3-4` with `(ΩN)² = −2I`.
pub fn c4_matrix() -> DenseSymmetric {
    DenseSymmetric::from_rows(&[
        vec![2.0, 1.0, 0.0, 1.0],
        vec![1.0, 2.0, 1.0, 0.0],
        vec![0.0, 1.0, 2.0, -1.0],
        vec![1.0, 0.0, -1.0, 2.0],
    ])
    .expect("symmetric")
}

/// sympPD on `K_{2,2}` with parts `{1,2}`, `{3,4}`, built from a
/// Householder reflector.
pub fn kpp_matrix() -> DenseSymmetric {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DenseSymmetric::from_rows(&[
        vec![1.0, 0.0, -h, h],
        vec![0.0, 1.0, h, h],
        vec![-h, h, 2.0, 0.0],
        vec![h, h, 0.0, 2.0],
    ])
    .expect("symmetric")
}

/// `[[I, J], [J, pI + J]]`: sympPD on `K̄_p ∨ K_p`.
pub fn join_matrix(p: usize) -> DenseSymmetric {
    let j = DenseSymmetric::symmetrize(DMatrix::from_element(p, p, 1.0));
    dopico_johnson(&DenseSymmetric::identity(p), &j).expect("identity is positive definite")
}

fn k2_block() -> DenseSymmetric {
    DenseSymmetric::from_rows(&[vec![1.0, 1.0], vec![1.0, 2.0]]).expect("symmetric")
}

fn witness_candidates(seed: u64) -> Result<Vec<(String, DenseSymmetric)>> {
    use spisep_core::sssp::direct_sum_interleave;
    let i2 = DenseSymmetric::identity(2);
    let k2 = k2_block();
    Ok(vec![
        ("identity".into(), DenseSymmetric::identity(4)),
        ("join [[I, J], [J, 2I + J]]".into(), join_matrix(2)),
        ("K2,2 Householder".into(), kpp_matrix()),
        (
            "4-cycle / sqrt 2".into(),
            c4_matrix().scale(std::f64::consts::FRAC_1_SQRT_2),
        ),
        ("paw".into(), paw_matrix()),
        (
            "random smear, complete".into(),
            random_smear(&[1.0, 1.0], seed, SmearMode::Complete)?,
        ),
        (
            "random smear, two cliques".into(),
            random_smear(&[1.0, 1.0], seed, SmearMode::TwoCliques)?,
        ),
        (
            "I2 + K2 interleaved".into(),
            direct_sum_interleave(&i2, &k2)?,
        ),
        (
            "K2 + I2 interleaved".into(),
            direct_sum_interleave(&k2, &i2)?,
        ),
        (
            "K2 + K2 interleaved".into(),
            direct_sum_interleave(&k2, &k2)?,
        ),
    ])
}

/// Off-diagonal positions of `(ΩN)²` that are structurally a single
/// product, as `(row, col, through)` 0-based.
pub fn single_term_positions(g: &LabeledGraph) -> Vec<(usize, usize, usize)> {
    let n = g.order();
    if n % 2 == 1 {
        return vec![];
    }
    let p = n / 2;
    // (ΩN)_{ik} = ±N_{i±p, k}.
    let nz = |i: usize, k: usize| {
        let r = (i + p) % n;
        r == k || g.has_edge(r, k)
    };
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut through = (0..n).filter(|&k| nz(i, k) && nz(k, j));
            if let (Some(k), None) = (through.next(), through.next()) {
                out.push((i, j, k));
            }
        }
    }
    out
}

pub fn single_term_position(g: &LabeledGraph) -> Option<(usize, usize, usize)> {
    single_term_positions(g).into_iter().next()
}

/// Obstructions found on a labeled graph with the standard coupling.
pub fn obstructions(g: &LabeledGraph) -> Vec<Obstruction> {
    let mut out = Vec::new();
    if spisep_core::constructions::isolated_vertex_obstruction(g) {
        out.push(Obstruction::IsolatedVertex);
    }
    if sparsity_obstruction(g) {
        out.push(Obstruction::Sparsity {
            edges: g.edge_count(),
            bound: 3 * (g.order() / 2) - 2,
        });
    }
    if let Some((i, j, k)) = single_term_position(g) {
        out.push(Obstruction::SingleTermEntry {
            row: i + 1,
            col: j + 1,
            through: k + 1,
        });
    }
    out
}

fn check_witness(
    source: String,
    w: &DenseSymmetric,
    labeling: Vec<usize>,
) -> Result<Option<WitnessCheck>> {
    let residual = symp_pd_residual(w)?;
    if residual > WITNESS_TOL {
        return Ok(None);
    }
    let spectrum = symplectic_spectrum(w, DEFAULT_CLUSTER_TOL)?.values;
    let (report, _) = sssp_report(w, default_zero_tol(w), DEFAULT_RANK_TOL)?;
    if !report.agree() {
        return Err(Error::NoConvergence(format!(
            "SSSP tests disagree on the witness from {source}"
        )));
    }
    Ok(Some(WitnessCheck {
        source,
        labeling,
        symp_pd_residual: residual,
        spectrum,
        sssp: report.rank_test,
    }))
}

fn find_witness(cg: &CoupledGraph, seed: u64) -> Result<Option<(DenseSymmetric, WitnessCheck)>> {
    let candidates = witness_candidates(seed)?;
    let mut found: Vec<(DenseSymmetric, WitnessCheck)> = Vec::new();
    for (name, w) in &candidates {
        let g = graph_of_matrix(w, default_zero_tol(w));
        if let Some(sigma) = cg.find_labeling(&g)? {
            if let Some(check) = check_witness(name.clone(), w, sigma.one_based())? {
                found.push((w.clone(), check));
            }
        }
    }
    if found.is_empty() {
        // Switch on missing edges around a witness with the SSSP.
        let mut rng = seeded(seed);
        let opts = ContinuationOptions::default();
        'outer: for (name, w) in &candidates {
            let g = graph_of_matrix(w, default_zero_tol(w));
            let Some(pre) = check_witness(name.clone(), w, vec![])? else {
                continue;
            };
            if !pre.sssp {
                continue;
            }
            for sigma in representative_labelings(cg)? {
                let target = cg.labeled(&sigma)?;
                if target == g || g.edges().any(|(i, j)| !target.has_edge(i, j)) {
                    continue;
                }
                let Ok(x) = supergraph_realize(w, &target, &opts, &mut rng) else {
                    continue;
                };
                if graph_of_matrix(&x, default_zero_tol(&x)) != target {
                    continue;
                }
                if let Some(check) =
                    check_witness(format!("continuation from {name}"), &x, sigma.one_based())?
                {
                    found.push((x, check));
                    break 'outer;
                }
            }
        }
    }
    let pick = found.iter().position(|(_, c)| c.sssp).unwrap_or(0);
    Ok((!found.is_empty()).then(|| found.swap_remove(pick)))
}

fn evidence(
    g: &LabeledGraph,
    single: Option<(usize, usize, usize)>,
    seed: u64,
) -> Result<Evidence> {
    let mut rng = seeded(seed);
    let p = g.order() / 2;
    let w = omega(p);
    let mut repeated = 0;
    let mut min_gap = f64::INFINITY;
    let mut min_single = single.map(|_| f64::INFINITY);
    for _ in 0..EVIDENCE_SAMPLES {
        let n = pd_with_pattern(g, &mut rng);
        let spec = symplectic_spectrum(&n, DEFAULT_CLUSTER_TOL)?;
        if !spec.is_simple() {
            repeated += 1;
        }
        let v = &spec.values;
        min_gap = min_gap.min((v[v.len() - 1] - v[0]) / v[v.len() - 1]);
        if let (Some((i, j, _)), Some(m)) = (single, min_single.as_mut()) {
            let on = &w * n.as_matrix();
            let sq = &on * &on;
            *m = m.min(sq[(i, j)].abs());
        }
    }
    Ok(Evidence {
        samples: EVIDENCE_SAMPLES,
        repeated,
        min_relative_gap: min_gap,
        min_single_term: min_single,
    })
}

/// Resolves one coupled graph of order four.
pub fn resolve(
    name: &str,
    coupling_id: usize,
    cg: &CoupledGraph,
    seed: u64,
) -> Result<CatalogueEntry> {
    let sigma0 = representative_labelings(cg)?
        .into_iter()
        .next()
        .expect("at least one labeling");
    let labeled = cg.labeled(&sigma0)?;
    let found = obstructions(&labeled);
    let witness = find_witness(cg, seed)?;
    let verdict = match (&witness, found.is_empty()) {
        (Some(_), false) => {
            return Err(Error::Rejected(format!(
                "{name} C{coupling_id}: a witness and an obstruction were both found"
            )))
        }
        (Some((_, c)), true) if c.sssp => Verdict::ArbitraryWithSsspWitness,
        (Some(_), true) => Verdict::SpectrallyArbitrary,
        (None, false) => Verdict::SimpleOnly,
        (None, true) => {
            return Err(Error::Rejected(format!(
                "{name} C{coupling_id}: neither a witness nor an obstruction"
            )))
        }
    };
    let evidence = if verdict == Verdict::SimpleOnly {
        Some(evidence(&labeled, single_term_position(&labeled), seed)?)
    } else {
        None
    };
    let targets = vec![1.0, 2.0];
    let matrix = realize_all_simple(
        &labeled,
        &targets,
        &ContinuationOptions::default(),
        &mut seeded(seed),
    )?;
    let max_relative_error =
        symplectic_spectrum(&matrix, DEFAULT_CLUSTER_TOL)?.max_relative_error(&targets);
    let (witness, witness_check) = match witness {
        Some((w, c)) => (Some(w), Some(c)),
        None => (None, None),
    };
    Ok(CatalogueEntry {
        graph: name.to_string(),
        coupling_id,
        coupling: cg.coupling.pairs_one_based(),
        verdict,
        witness,
        witness_check,
        labeling: sigma0.one_based(),
        obstructions: found,
        evidence,
        distinct: DistinctRealization {
            targets,
            matrix,
            max_relative_error,
        },
        cluster_tol: DEFAULT_CLUSTER_TOL,
        rank_tol: DEFAULT_RANK_TOL,
        zero_tol: spisep_core::graphs::DEFAULT_ZERO_REL_TOL,
    })
}

/// All 33 coupled graphs of order four.
pub fn catalogue_order4(seed: u64) -> Result<Vec<CatalogueEntry>> {
    let mut out = Vec::new();
    for (name, g) in order4_graphs() {
        for (k, c) in order4_couplings().into_iter().enumerate() {
            let cg = CoupledGraph::new(g.clone(), c)?;
            out.push(resolve(name, k + 1, &cg, seed)?);
        }
    }
    Ok(out)
}
