use nppt_core::bipartite::SplitOperator;
use nppt_core::distill::{brute_force_witness, f_operator, witness_operator, witness_search, witness_value, SearchConfig};
use nppt_core::{hermitian_spectrum, SeededRng};

fn one_copy_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

#[test]
fn one_copy_minimum_matches_closed_form() {
    let config = SearchConfig { restarts: 4, ..SearchConfig::default() };
    for beta in one_copy_grid() {
        let result = witness_search(3, beta, 1, &config).unwrap();
        // 1 - (1 + β) max⟨Ψ|P|Ψ⟩ with max⟨Ψ|P|Ψ⟩ = 2/3
        let expected = (1.0 - 2.0 * beta) / 3.0;
        assert!((result.lambda_min - expected).abs() < 1e-8, "β={beta}: {} vs {expected}", result.lambda_min);
        assert_eq!(result.lambda_min < -1e-12, beta > 0.5 + 1e-12, "β={beta}");
    }
}

#[test]
fn one_copy_evidence_is_monotone_in_beta() {
    let config = SearchConfig { restarts: 4, ..SearchConfig::default() };
    let values: Vec<f64> = one_copy_grid()
        .into_iter()
        .map(|beta| witness_search(4, beta * 2.0, 1, &config).unwrap().lambda_min)
        .collect();
    for w in values.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "{values:?}");
    }
}

#[test]
fn search_is_never_worse_than_sampling() {
    let mut rng = SeededRng::new(11, 0);
    for (d, beta, copies) in [(3, 0.6, 1), (4, 1.3, 1), (3, 0.3, 2)] {
        let r = witness_operator(d, beta, copies).unwrap();
        let sampled = brute_force_witness(&r, 200, &mut rng).unwrap();
        let found = witness_search(d, beta, copies, &SearchConfig { restarts: 6, ..SearchConfig::default() }).unwrap();
        assert!(found.lambda_min <= sampled + 1e-9, "d={d} β={beta} N={copies}: {} > {sampled}", found.lambda_min);
    }
}

#[test]
fn schur_complement_grows_as_lambda0_decreases() {
    let mut rng = SeededRng::new(12, 0);
    for (beta, copies) in [(0.3, 1), (0.5, 1), (0.2, 2)] {
        let r = witness_operator(3, beta, copies).unwrap();
        for _ in 0..50 {
            let frame = rng.orthonormal_vectors(r.alice_dim, 2);
            let schur_min = |lambda0: f64| {
                let f = f_operator(&r, &frame[0], lambda0).unwrap();
                let f = SplitOperator::new(f, r.alice_dim, r.bob_dim).unwrap();
                hermitian_spectrum(&f.compress_alice_frame(&[&frame[1]]).0).unwrap().min_value()
            };
            let at_zero = schur_min(0.0);
            let lambda0 = -0.5 * rng.uniform();
            assert!(schur_min(lambda0) >= at_zero - 1e-12, "β={beta} N={copies}");
        }
    }
}

#[test]
fn negative_results_reconstruct_their_witness() {
    for (d, beta, copies) in [(3, 0.6, 1), (4, 1.3, 1), (3, 0.7, 2)] {
        let result = witness_search(d, beta, copies, &SearchConfig { restarts: 4, ..SearchConfig::default() }).unwrap();
        assert!(result.lambda_min < 0.0);
        let psi = result.best_vector.as_ref().expect("negative minimum has a rank-2 minimizer");
        let r = witness_operator(d, beta, copies).unwrap();
        assert!((witness_value(&r, psi).unwrap() - result.lambda_min).abs() < 1e-9);
        if result.converged {
            assert!(result.stationarity_residual.unwrap() <= 1e-7, "{:?}", result.stationarity_residual);
        }
    }
}
