use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use spisep_core::constructions::{
    corona_predicted_spectrum, corona_realize, dopico_johnson, realize_shear,
};
use spisep_core::graphs::{
    coupling_closure_graph, default_zero_tol, enumerate_couplings, graph_of_matrix,
    representative_labelings, CoupledGraph, Coupling,
};
use spisep_core::sampling::{self, seeded};
use spisep_core::sssp::{
    commutation_residual, has_sssp_nullspace, has_sssp_rank, phi, unvec_triangle, vec_triangle,
    DEFAULT_RANK_TOL,
};
use spisep_core::symplectic::{
    is_symp_pd, is_valid_symplectic_relabeling, omega, relabel, symp_pd_inverse_identity,
    symplectic_relabel, symplectic_spectrum, williamson_decompose, DEFAULT_CLUSTER_TOL,
};
use spisep_core::zero_forcing::{
    coupled_closure, loop_zf_number, standard_zf_number, zc_number, VertexSet,
};
use spisep_core::{DenseSymmetric, LabeledGraph, Permutation};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= tol * y.abs().max(1e-300))
}

fn random_valid_relabeling(p: usize, rng: &mut ChaCha8Rng) -> Permutation {
    let cg = CoupledGraph::standard(LabeledGraph::empty(2 * p)).unwrap();
    let labs = representative_labelings(&cg).unwrap();
    labs[rng.gen_range(0..labs.len())].clone()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn spectrum_is_congruence_invariant(seed in any::<u64>(), p in 1usize..=4) {
        let mut rng = seeded(seed);
        let n = sampling::positive_definite(2 * p, &mut rng);
        let s = sampling::symplectic(p, &mut rng).unwrap();
        let sv = s.singular_values();
        prop_assume!(sv.max() / sv.min() <= 100.0);
        let m = n.congruence(&s).unwrap();
        let a = symplectic_spectrum(&n, DEFAULT_CLUSTER_TOL).unwrap();
        let b = symplectic_spectrum(&m, DEFAULT_CLUSTER_TOL).unwrap();
        prop_assert!(rel_close(&b.values, &a.values, 1e-8), "{:?} vs {:?}", a.values, b.values);
    }

    #[test]
    fn spectrum_scales_linearly(seed in any::<u64>(), p in 1usize..=5, lambda in 0.01f64..100.0) {
        let mut rng = seeded(seed);
        let n = sampling::positive_definite(2 * p, &mut rng);
        let a = symplectic_spectrum(&n, DEFAULT_CLUSTER_TOL).unwrap();
        let b = symplectic_spectrum(&n.scale(lambda), DEFAULT_CLUSTER_TOL).unwrap();
        let scaled: Vec<f64> = a.values.iter().map(|v| v * lambda).collect();
        prop_assert!(rel_close(&b.values, &scaled, 1e-10));
    }

    #[test]
    fn diagonal_spectrum_is_geometric_mean(seed in any::<u64>(), p in 1usize..=6) {
        let mut rng = seeded(seed);
        let d: Vec<f64> = (0..p).map(|_| rng.gen_range(0.1..10.0)).collect();
        let e: Vec<f64> = (0..p).map(|_| rng.gen_range(0.1..10.0)).collect();
        let all: Vec<f64> = d.iter().chain(&e).copied().collect();
        let s = symplectic_spectrum(&DenseSymmetric::from_diagonal(&all), DEFAULT_CLUSTER_TOL).unwrap();
        let mut expected: Vec<f64> = d.iter().zip(&e).map(|(a, b)| (a * b).sqrt()).collect();
        expected.sort_by(f64::total_cmp);
        prop_assert!(rel_close(&s.values, &expected, 1e-12));
    }

    #[test]
    fn sympd_oracles_agree(seed in any::<u64>(), p in 1usize..=4, make_sympd in any::<bool>()) {
        let mut rng = seeded(seed);
        let n = if make_sympd {
            let n11 = sampling::positive_definite(p, &mut rng);
            let w = sampling::uniform_symmetric(p, &mut rng);
            dopico_johnson(&n11, &w).unwrap()
        } else {
            sampling::positive_definite(2 * p, &mut rng)
        };
        let scale = n.max_abs().max(1.0);
        let by_square = is_symp_pd(&n, 1e-8 * scale * scale);
        let by_inverse = symp_pd_inverse_identity(&n, 1e-8 * scale * scale).unwrap();
        let s = symplectic_spectrum(&n, DEFAULT_CLUSTER_TOL).unwrap();
        let by_spectrum = s.values.iter().all(|v| (v - 1.0).abs() < 1e-6);
        prop_assert_eq!(by_square, make_sympd);
        prop_assert_eq!(by_inverse, make_sympd);
        prop_assert_eq!(by_spectrum, make_sympd);
    }

    #[test]
    fn omega_n_has_imaginary_spectrum(seed in any::<u64>(), p in 1usize..=5) {
        let mut rng = seeded(seed);
        let n = sampling::positive_definite(2 * p, &mut rng);
        let on = omega(p) * n.as_matrix();
        let ev = on.complex_eigenvalues();
        for z in ev.iter() {
            prop_assert!(z.re.abs() <= 1e-8 * n.max_abs());
            prop_assert!(z.im.abs() > 0.0);
        }
    }

    #[test]
    fn williamson_reconstructs(seed in any::<u64>(), p in 1usize..=6) {
        let mut rng = seeded(seed);
        let n = sampling::positive_definite(2 * p, &mut rng);
        let w = williamson_decompose(&n).unwrap();
        prop_assert!(w.residual(&n) <= 1e-8 * n.max_abs().max(1.0));
        let s = symplectic_spectrum(&n, DEFAULT_CLUSTER_TOL).unwrap();
        prop_assert!(rel_close(&w.d, &s.values, 1e-9));
    }

    #[test]
    fn symplectic_gram_has_unit_spectrum(seed in any::<u64>(), p in 1usize..=4) {
        let mut rng = seeded(seed);
        let s = sampling::symplectic(p, &mut rng).unwrap();
        let sv = s.singular_values();
        prop_assume!(sv.max() / sv.min() <= 100.0);
        let n = DenseSymmetric::identity(2 * p).congruence(&s).unwrap();
        let w = williamson_decompose(&n).unwrap();
        for d in &w.d {
            prop_assert!((d - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn symplectic_relabel_keeps_spectrum_and_graph(seed in any::<u64>(), p in 1usize..=4) {
        let mut rng = seeded(seed);
        let n = sampling::positive_definite(2 * p, &mut rng);
        let sigma = random_valid_relabeling(p, &mut rng);
        prop_assert!(is_valid_symplectic_relabeling(&sigma));
        let plain = relabel(&n, &sigma).unwrap();
        let signed = symplectic_relabel(&n, &sigma).unwrap();
        let a = symplectic_spectrum(&n, DEFAULT_CLUSTER_TOL).unwrap();
        let b = symplectic_spectrum(&signed, DEFAULT_CLUSTER_TOL).unwrap();
        prop_assert!(rel_close(&b.values, &a.values, 1e-9));
        let tol = default_zero_tol(&n);
        prop_assert_eq!(graph_of_matrix(&plain, tol), graph_of_matrix(&signed, tol));
    }

    #[test]
    fn relabel_moves_the_graph(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = seeded(seed);
        let g = sampling::graph(n, 0.5, &mut rng);
        let m = sampling::pd_with_pattern(&g, &mut rng);
        let mut images: Vec<usize> = (0..n).collect();
        use rand::seq::SliceRandom;
        images.shuffle(&mut rng);
        let sigma = Permutation::new(images).unwrap();
        let moved = relabel(&m, &sigma).unwrap();
        prop_assert_eq!(graph_of_matrix(&moved, 0.0), g.relabel(&sigma).unwrap());
    }

    #[test]
    fn rank_and_nullspace_tests_agree(seed in any::<u64>(), p in 2usize..=5, prob in 0.1f64..0.9) {
        let mut rng = seeded(seed);
        let g = sampling::graph(2 * p, prob, &mut rng);
        let n = sampling::pd_with_pattern(&g, &mut rng);
        let rank = has_sssp_rank(&n, DEFAULT_RANK_TOL).unwrap();
        let null = has_sssp_nullspace(&n).unwrap();
        prop_assert_eq!(rank, null.has_sssp);
        if let Some(y) = null.witness {
            prop_assert!(n.hadamard(&y).max_abs() == 0.0);
            prop_assert!(commutation_residual(&n, &y).unwrap() <= 1e-8 * n.max_abs() * y.max_abs());
        }
    }

    #[test]
    fn sssp_is_open(seed in any::<u64>(), p in 2usize..=4) {
        let mut rng = seeded(seed);
        let g = sampling::graph(2 * p, 0.7, &mut rng);
        let n = sampling::pd_with_pattern(&g, &mut rng);
        prop_assume!(has_sssp_rank(&n, DEFAULT_RANK_TOL).unwrap());
        for _ in 0..50 {
            let mut pert = sampling::uniform_symmetric(2 * p, &mut rng).into_inner() * (1e-6 * n.max_abs());
            for (i, j) in g.non_edges() {
                pert[(i, j)] = 0.0;
                pert[(j, i)] = 0.0;
            }
            let m = DenseSymmetric::symmetrize(n.as_matrix() + pert);
            prop_assert!(has_sssp_rank(&m, DEFAULT_RANK_TOL).unwrap());
        }
    }

    #[test]
    fn phi_is_linear(seed in any::<u64>(), p in 1usize..=3, lambda in -5.0f64..5.0) {
        let mut rng = seeded(seed);
        let n = sampling::uniform_symmetric(2 * p, &mut rng);
        let a = phi(&n.scale(lambda)).unwrap();
        let b = phi(&n).unwrap() * lambda;
        prop_assert!((a - b).amax() <= 1e-12);
    }

    #[test]
    fn vec_triangle_round_trips(seed in any::<u64>(), n in 1usize..=8) {
        let m = sampling::uniform_symmetric(n, &mut seeded(seed));
        prop_assert_eq!(unvec_triangle(&vec_triangle(&m)).unwrap(), m);
    }

    #[test]
    fn realize_shear_hits_target(seed in any::<u64>(), p in 2usize..=6) {
        let mut rng = seeded(seed);
        let b = sampling::uniform_symmetric(p, &mut rng);
        let t = sampling::targets_with_repeats(p, &mut rng);
        let n = realize_shear(&b, &t).unwrap();
        let s = symplectic_spectrum(&n, DEFAULT_CLUSTER_TOL).unwrap();
        prop_assert!(s.max_relative_error(&t) <= 1e-8);
    }

    #[test]
    fn corona_formula_matches_spectrum(seed in any::<u64>(), p in 1usize..=6) {
        let mut rng = seeded(seed);
        let a = sampling::positive_definite(p, &mut rng).scale(3.0);
        let d: Vec<f64> = (0..p).map(|_| rng.gen_range(0.5..2.0)).collect();
        let e: Vec<f64> = (0..p).map(|_| rng.gen_range(-0.5..0.5)).collect();
        prop_assume!(corona_predicted_spectrum(&a, &d, &e).is_ok());
        let predicted = corona_predicted_spectrum(&a, &d, &e).unwrap();
        let n = corona_realize(&a, &d, &e).unwrap();
        let s = symplectic_spectrum(&n, DEFAULT_CLUSTER_TOL).unwrap();
        prop_assert!(rel_close(&s.values, &predicted, 1e-8));
    }

    #[test]
    fn coupled_closure_is_monotone_and_idempotent(seed in any::<u64>(), p in 1usize..=5) {
        let mut rng = seeded(seed);
        let g = sampling::graph(2 * p, 0.3, &mut rng);
        let couplings = enumerate_couplings(2 * p).unwrap();
        let c = couplings[rng.gen_range(0..couplings.len())].clone();
        let cg = CoupledGraph::new(g, c).unwrap();
        let all: VertexSet = (1 << (2 * p)) - 1;
        let b: VertexSet = rng.gen::<u64>() & all;
        let extra: VertexSet = rng.gen::<u64>() & all;
        let cb = coupled_closure(&cg, b).unwrap();
        prop_assert_eq!(coupled_closure(&cg, cb).unwrap(), cb);
        let cbb = coupled_closure(&cg, b | extra).unwrap();
        prop_assert_eq!(cb & cbb, cb);
    }

    #[test]
    fn zc_matches_loop_number_of_closure_graph(seed in any::<u64>(), p in 1usize..=6) {
        let mut rng = seeded(seed);
        let g = sampling::graph(2 * p, rng.gen_range(0.1..0.6), &mut rng);
        let couplings = enumerate_couplings(2 * p).unwrap();
        let c = couplings[rng.gen_range(0..couplings.len())].clone();
        let cg = CoupledGraph::new(g, c).unwrap();
        let zc = zc_number(&cg).unwrap().number;
        let zl = loop_zf_number(&coupling_closure_graph(&cg)).unwrap().number;
        prop_assert_eq!(zc, zl);
    }

    #[test]
    fn forcing_numbers_are_ordered(seed in any::<u64>(), n in 1usize..=10) {
        let mut rng = seeded(seed);
        let g = sampling::graph(n, rng.gen_range(0.1..0.9), &mut rng);
        let zl = loop_zf_number(&g).unwrap().number;
        let z = standard_zf_number(&g).unwrap().number;
        prop_assert!(g.min_degree() <= zl);
        prop_assert!(zl <= z);
    }
}

#[test]
fn plain_relabel_can_change_the_spectrum() {
    // σ swaps the first coupled pair only.
    let sigma = Permutation::from_one_based(&[3, 2, 1, 4]).unwrap();
    assert!(is_valid_symplectic_relabeling(&sigma));
    let n = DenseSymmetric::from_rows(&[
        vec![4.0, 1.0, 0.5, 0.3],
        vec![1.0, 5.0, 0.2, 0.7],
        vec![0.5, 0.2, 6.0, 1.1],
        vec![0.3, 0.7, 1.1, 7.0],
    ])
    .unwrap();
    let a = symplectic_spectrum(&n, DEFAULT_CLUSTER_TOL).unwrap();
    let plain = symplectic_spectrum(&relabel(&n, &sigma).unwrap(), DEFAULT_CLUSTER_TOL).unwrap();
    let signed = symplectic_spectrum(
        &symplectic_relabel(&n, &sigma).unwrap(),
        DEFAULT_CLUSTER_TOL,
    )
    .unwrap();
    assert!(rel_close(&signed.values, &a.values, 1e-12));
    assert!(!rel_close(&plain.values, &a.values, 1e-3));
}

#[test]
fn sympd_inverse_has_same_graph_up_to_relabeling() {
    let mut rng = seeded(17);
    for p in 1..=4 {
        let n11 = sampling::positive_definite(p, &mut rng);
        let w = sampling::uniform_symmetric(p, &mut rng);
        let n = dopico_johnson(&n11, &w).unwrap();
        let inv = n.inverse().unwrap();
        // N⁻¹ = [[N22, −N12ᵀ], [−N12, N11]]: swapping the halves gives N's graph.
        let swap: Vec<usize> = (0..2 * p).map(|i| (i + p) % (2 * p)).collect();
        let sigma = Permutation::new(swap).unwrap();
        let g = graph_of_matrix(&n, 1e-9);
        let gi = graph_of_matrix(&inv, 1e-9);
        assert_eq!(gi.relabel(&sigma).unwrap(), g);
    }
}

#[test]
fn coupling_of_closure_graph_is_perfect_matching() {
    let mut rng = seeded(23);
    for _ in 0..20 {
        let g = sampling::graph(6, 0.3, &mut rng);
        let couplings = enumerate_couplings(6).unwrap();
        let c: Coupling = couplings[rng.gen_range(0..couplings.len())].clone();
        let closed = coupling_closure_graph(&CoupledGraph::new(g, c.clone()).unwrap());
        for &(a, b) in c.pairs() {
            assert!(closed.has_edge(a, b));
        }
    }
}

#[test]
fn random_pd_matrices_are_not_sympd() {
    let mut rng = seeded(29);
    for _ in 0..100 {
        let n = sampling::positive_definite(4, &mut rng);
        assert!(!is_symp_pd(&n, 1e-8));
        assert!(!symp_pd_inverse_identity(&n, 1e-8).unwrap());
    }
    let _ = DMatrix::<f64>::zeros(1, 1);
}
