use nppt_core::bipartite::SplitOperator;
use nppt_core::distill::{certified_undistillable_bound, frame_objective, f_operator, witness_operator, witness_value, Rank2Vector};
use nppt_core::eigen::min_eigenpair;
use nppt_core::twirl::{antisymmetric_weight, conjugate_depolarize, depolarize, filter_to_standard};
use nppt_core::werner::{rho_alpha, rho_pt, ProjectorSet};
use nppt_core::{hermitian_spectrum, kron, partial_transpose, haar_unitary, BipartiteDims, ComplexMatrix, SeededRng, C64};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 32, ..ProptestConfig::default() }
}

fn local_unitary(d: usize, rng: &mut SeededRng, conjugate: bool) -> ComplexMatrix {
    let u = haar_unitary(d, rng);
    let left = if conjugate { u.conj() } else { u.clone() };
    kron(&left, &u)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn partial_transpose_is_an_involution(seed in any::<u64>(), d in 2usize..=4, copies in 1usize..=2) {
        let dims = BipartiteDims::new(d, d, copies).unwrap();
        let mut rng = SeededRng::new(seed, 0);
        let x = rng.random_hermitian(dims.total());
        let pt = partial_transpose(&x, dims).unwrap();
        prop_assert!(partial_transpose(&pt, dims).unwrap().distance(&x) < 1e-12);
        prop_assert!((pt.trace() - x.trace()).norm_sqr() < 1e-22);
        prop_assert!(pt.is_hermitian(1e-12));
    }

    #[test]
    fn partial_transpose_is_self_dual(seed in any::<u64>(), d in 2usize..=4) {
        let dims = BipartiteDims::square(d);
        let mut rng = SeededRng::new(seed, 1);
        let x = rng.ginibre(d * d, d * d);
        let y = rng.ginibre(d * d, d * d);
        let lhs = partial_transpose(&x, dims).unwrap().trace_product(&y).unwrap();
        let rhs = x.trace_product(&partial_transpose(&y, dims).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm_sqr() < 1e-20);
    }

    #[test]
    fn depolarization_is_an_invariant_projection(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = SeededRng::new(seed, 2);
        let x = rng.random_hermitian(d * d);
        let y = rng.random_hermitian(d * d);
        let dx = depolarize(&x, d).unwrap();
        prop_assert!(depolarize(&dx, d).unwrap().distance(&dx) < 1e-12);
        let lhs = dx.trace_product(&y).unwrap();
        let rhs = x.trace_product(&depolarize(&y, d).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm_sqr() < 1e-20);
        let w = local_unitary(d, &mut rng, false);
        let rotated = depolarize(&x.conjugate_by(&w).unwrap(), d).unwrap();
        prop_assert!(rotated.distance(&dx) < 1e-11);
        let weight = (antisymmetric_weight(&dx, d).unwrap() - antisymmetric_weight(&x, d).unwrap()).norm_sqr();
        prop_assert!(weight < 1e-22);
    }

    #[test]
    fn conjugate_depolarization_is_an_invariant_projection(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = SeededRng::new(seed, 3);
        let x = rng.random_hermitian(d * d);
        let ex = conjugate_depolarize(&x, d).unwrap();
        prop_assert!(conjugate_depolarize(&ex, d).unwrap().distance(&ex) < 1e-12);
        let w = local_unitary(d, &mut rng, true);
        prop_assert!(conjugate_depolarize(&x.conjugate_by(&w).unwrap(), d).unwrap().distance(&ex) < 1e-11);
    }

    #[test]
    fn family_members_are_twirl_invariant(seed in any::<u64>(), d in 2usize..=4, alpha in 0.0f64..20.0) {
        let mut rng = SeededRng::new(seed, 4);
        let rho = rho_alpha(d, alpha).unwrap();
        let w = local_unitary(d, &mut rng, false);
        prop_assert!(rho.conjugate_by(&w).unwrap().distance(&rho) < 1e-12);
        let beta = nppt_core::werner::alpha_to_beta(d, alpha);
        let pt = rho_pt(d, beta).unwrap();
        let w = local_unitary(d, &mut rng, true);
        prop_assert!(pt.conjugate_by(&w).unwrap().distance(&pt) < 1e-12);
    }

    #[test]
    fn certified_bounds_are_sound(seed in any::<u64>(), d in 3usize..=4, copies in 1usize..=2) {
        let bound = certified_undistillable_bound(d, copies).unwrap().certified_beta_bound;
        let r = witness_operator(d, bound, copies).unwrap();
        let mut rng = SeededRng::new(seed, 5);
        for _ in 0..8 {
            let psi = Rank2Vector::random(r.alice_dim, r.bob_dim, &mut rng);
            prop_assert!(witness_value(&r, &psi).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn schur_complement_reproduces_frame_minimum(seed in any::<u64>(), beta in 0.05f64..0.95) {
        let r = witness_operator(3, beta, 1).unwrap();
        let mut rng = SeededRng::new(seed, 6);
        let frame = rng.orthonormal_vectors(3, 2);
        let (m, _) = r.compress_alice_frame(&[&frame[0], &frame[1]]);
        let lambda = hermitian_spectrum(&m).unwrap().min_value();
        let (r11, _) = r.compress_alice_frame(&[&frame[0]]);
        let r11_min = hermitian_spectrum(&r11).unwrap().min_value();
        prop_assume!(lambda < r11_min - 1e-6);
        // λ is an eigenvalue of M(E) iff it is one of ⟨e2|F(λ)|e2⟩
        let f = SplitOperator::new(f_operator(&r, &frame[0], lambda).unwrap(), 3, 3).unwrap();
        let (s, _) = f.compress_alice_frame(&[&frame[1]]);
        prop_assert!((hermitian_spectrum(&s).unwrap().min_value() - lambda).abs() < 1e-10);
        if r11_min > 1e-9 {
            let mu = frame_objective(&r, &frame[0], &frame[1]).unwrap();
            prop_assert_eq!(mu < -1e-12, lambda < -1e-12);
        }
    }

    #[test]
    fn filtering_lands_in_the_distillable_family(seed in any::<u64>(), p in 0.3f64..0.9) {
        let d = 3;
        let mut rng = SeededRng::new(seed, 7);
        let mut rho = rng.random_state(d * d).scale(1.0 - p);
        rho.add_scaled(&rho_alpha(d, 50.0).unwrap(), C64::new(p, 0.0));
        let pt = partial_transpose(&rho, BipartiteDims::square(d)).unwrap();
        let (value, psi) = min_eigenpair(&pt).unwrap();
        prop_assume!(value < -1e-6);
        let out = filter_to_standard(&rho, &psi, d).unwrap();
        prop_assert!(out.filtered_witness_value < 0.0);
        prop_assert!((out.filtered.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.filtered.is_hermitian(1e-12));
        prop_assert!(out.state.lambda() > 0.5);
        prop_assert!(out.filter.schmidt_rank >= 2);
    }
}

#[test]
fn antisymmetric_weight_tracks_negativity_on_a_grid() {
    for d in 2..=5 {
        let p = ProjectorSet::new(d).unwrap();
        for i in 1..=41 {
            let beta = -1.0 + d as f64 * i as f64 / 42.0;
            let state = nppt_core::StandardState::from_beta(d, beta).unwrap();
            let weight = state.density_matrix().trace_product(&p.antisym).unwrap().re;
            assert!((weight - state.lambda()).abs() < 1e-12, "d={d} β={beta}: weight {weight}");
            let min = hermitian_spectrum(&state.partial_transpose()).unwrap().min_value();
            assert_eq!(state.lambda() > 0.5, beta > 0.0, "d={d} β={beta}");
            assert_eq!(beta > 0.0, min < -1e-12, "d={d} β={beta}: min eig {min}");
        }
    }
}
