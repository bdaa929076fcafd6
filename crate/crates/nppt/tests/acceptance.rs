//! Acceptance criteria, one line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the PASS/FAIL lines are
//! always printed. The three-copy search runs only with `NPPT_LONG_RUN=1`.

use std::process::ExitCode;
use std::time::Instant;

use nppt::commands;
use nppt::config::RunConfig;
use nppt_core::bipartite::Side;
use nppt_core::distill::{
    certified_undistillable_bound, lambda_many_copies, reduce_dimension_beta, structural_relations_check, witness_search,
    SearchConfig, SymmetryMode,
};
use nppt_core::twirl::{antisymmetric_weight, apply_protocol_traced, build_protocol, depolarize, haar_twirl_mc};
use nppt_core::werner::{rho_pt, ProjectorSet};
use nppt_core::{compress, hermitian_spectrum, kron, BipartiteDims, Isometry, SeededRng, StandardState};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'a str, Box<dyn Fn() -> Option<Outcome>>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn one_copy_threshold() -> Outcome {
    let above = witness_search(3, 0.51, 1, &SearchConfig::default()).map_err(|e| e.to_string())?;
    let below = witness_search(3, 0.49, 1, &SearchConfig { restarts: 100, ..SearchConfig::default() })
        .map_err(|e| e.to_string())?;
    check(
        above.lambda_min < -1e-6 && below.lambda_min >= -1e-9,
        format!("λ_min(0.51) = {:.3e}, λ_min(0.49) = {:.3e}", above.lambda_min, below.lambda_min),
    )
}

fn analytic_one_copy_minimum() -> Outcome {
    let r = witness_search(3, 0.6, 1, &SearchConfig::default()).map_err(|e| e.to_string())?;
    let oracle = (1.0 - 2.0 * 0.6) / 3.0;
    let gap = (r.lambda_min - oracle).abs();
    check(gap <= 1e-8, format!("λ_min = {:.15}, oracle = {oracle:.15}, gap = {gap:.2e}", r.lambda_min))
}

fn two_copy_search(restarts: usize) -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for symmetry in [SymmetryMode::Off, SymmetryMode::DiagonalFirstVector] {
        let config = SearchConfig { restarts, seed: 42, symmetry, ..SearchConfig::default() };
        let r = witness_search(3, 0.5, 2, &config).map_err(|e| e.to_string())?;
        ok &= r.lambda_min >= -1e-8;
        detail.push(format!("{symmetry:?}: λ_min = {:.3e}", r.lambda_min));
    }
    check(ok, format!("{restarts} restarts; {}", detail.join(", ")))
}

fn three_copy_search() -> Option<Outcome> {
    if std::env::var("NPPT_LONG_RUN").ok().as_deref() != Some("1") {
        return None;
    }
    let config = SearchConfig { restarts: 20, seed: 42, allow_long_run: true, ..SearchConfig::default() };
    Some(
        witness_search(3, 0.5, 3, &config)
            .map_err(|e| e.to_string())
            .and_then(|r| check(r.lambda_min >= -1e-8, format!("λ_min = {:.3e}", r.lambda_min))),
    )
}

fn protocol_exactness() -> Outcome {
    let d = 3;
    let protocol = build_protocol(d).map_err(|e| e.to_string())?;
    let antisym = ProjectorSet::new(d).map_err(|e| e.to_string())?.antisym;
    let (mut gap, mut drift) = (0.0f64, 0.0f64);
    for t in 0..20 {
        let rho = SeededRng::new(4, t).random_state(d * d);
        let weight = rho.trace_product(&antisym).map_err(|e| e.to_string())?.re;
        let out = apply_protocol_traced(&protocol, &rho, |_, _, step| {
            drift = drift.max((antisymmetric_weight(step, d).unwrap().re - weight).abs());
        })
        .map_err(|e| e.to_string())?;
        gap = gap.max(out.distance(&depolarize(&rho, d).map_err(|e| e.to_string())?));
    }
    check(gap <= 1e-10 && drift <= 1e-12, format!("max gap = {gap:.2e}, max weight drift = {drift:.2e}"))
}

fn haar_average() -> Outcome {
    let mut worst = 0.0f64;
    for t in 0..3 {
        let mut rng = SeededRng::new(5, t);
        let rho = rng.random_state(9);
        let mc = haar_twirl_mc(&rho, 3, 100_000, &mut rng, false).map_err(|e| e.to_string())?;
        worst = worst.max(mc.distance(&depolarize(&rho, 3).map_err(|e| e.to_string())?));
    }
    check(worst <= 5e-3, format!("max Frobenius gap = {worst:.2e} at 1e5 samples"))
}

fn bounds_and_relations() -> Outcome {
    let bound = |d, n| certified_undistillable_bound(d, n).map(|e| e.certified_beta_bound).map_err(|e| e.to_string());
    let table = [(3, 1, 0.5), (3, 2, 0.25), (3, 3, 1.0 / 56.0), (4, 2, 0.5)];
    let mut ok = true;
    for (d, n, expected) in table {
        ok &= (bound(d, n)? - expected).abs() <= 1e-15;
    }
    let mut violations = 0;
    let mut cases = 0;
    for n in 1..=3 {
        for k in 0..=n {
            let mut rng = SeededRng::new(6, (10 * n + k) as u64);
            violations += structural_relations_check(n, k, 10_000, &mut rng).map_err(|e| e.to_string())?.violations;
            cases += 1;
        }
    }
    check(ok && violations == 0, format!("bound table exact: {ok}; {violations} violations over {cases} (N,k) cases × 1e4"))
}

fn formula_cross_checks() -> Outcome {
    let state = StandardState::from_lambda(3, 0.6).map_err(|e| e.to_string())?;
    let rho = state.density_matrix();
    let dims = BipartiteDims::new(3, 3, 2).map_err(|e| e.to_string())?;
    let grouped = dims.regroup(&kron(&rho, &rho)).map_err(|e| e.to_string())?;
    let twirled = depolarize(&grouped, 9).map_err(|e| e.to_string())?;
    let direct = antisymmetric_weight(&twirled, 9).map_err(|e| e.to_string())?.re;
    let formula = lambda_many_copies(0.6, 2);
    let weight_gap = (direct - formula).abs();

    let mut mismatches = 0;
    for (d, k) in [(3, 2), (4, 2), (4, 3)] {
        let v = Isometry::canonical(d, k).map_err(|e| e.to_string())?;
        for i in 0..21 {
            let beta = -1.0 + d as f64 * i as f64 / 21.0;
            let predicted = reduce_dimension_beta(d, k, beta).map_err(|e| e.to_string())?;
            let pt = rho_pt(d, beta).map_err(|e| e.to_string())?;
            let reduced = compress(&pt, &v, Side::Both, BipartiteDims::square(d)).map_err(|e| e.to_string())?;
            let min = hermitian_spectrum(&reduced).map_err(|e| e.to_string())?.min_value();
            let consistent = if predicted.abs() < 1e-12 { min.abs() < 1e-12 } else { (predicted > 0.0) == (min < 0.0) };
            mismatches += usize::from(!consistent);
        }
    }
    check(
        weight_gap <= 1e-10 && mismatches == 0,
        format!("λ_9 direct = {direct:.15}, formula = {formula:.15}; {mismatches} sign mismatches over 63 points"),
    )
}

fn phase_diagram() -> Outcome {
    let cfg = RunConfig {
        d: Some(3),
        beta_min: Some(-0.5),
        beta_max: Some(2.0),
        steps: Some(51),
        copies: Some(2),
        ..RunConfig::new("sweep")
    }
    .with_defaults();
    let table = commands::sweep(&cfg).map_err(|e| e.to_string())?;
    let has = |b: f64| table.rows.iter().any(|r| r.beta == b);
    let mut ok = has(0.0) && has(0.5);
    let mut worst_below = f64::INFINITY;
    for r in &table.rows {
        let expected = if r.beta <= 0.0 {
            "separable"
        } else if r.beta > 0.5 {
            "one_distillable"
        } else if r.beta <= 0.25 {
            "certified_undistillable"
        } else {
            "undecided_band"
        };
        ok &= r.region == expected;
        if r.beta <= 0.5 {
            for v in r.lambda_min_search.iter().flatten() {
                worst_below = worst_below.min(*v);
            }
        }
    }
    ok &= worst_below >= -1e-8;
    check(ok, format!("boundaries at β = 0 and 1/2 on the grid: {}; min λ_min for β ≤ 1/2, N ≤ 2: {worst_below:.3e}", has(0.0) && has(0.5)))
}

fn main() -> ExitCode {
    let restarts = std::env::var("NPPT_N2_RESTARTS").ok().and_then(|s| s.parse().ok()).unwrap_or(500);
    let criteria: Vec<Criterion> = vec![
        ("1 one-copy threshold at d = 3", Box::new(|| Some(one_copy_threshold()))),
        ("2 analytic one-copy minimum", Box::new(|| Some(analytic_one_copy_minimum()))),
        ("3 two-copy search at β = 1/2", Box::new(move || Some(two_copy_search(restarts)))),
        ("3b three-copy search at β = 1/2 (long run)", Box::new(three_copy_search)),
        ("4 finite protocol equals the twirl", Box::new(|| Some(protocol_exactness()))),
        ("5 Haar average matches the twirl", Box::new(|| Some(haar_average()))),
        ("6 bound table and operator relations", Box::new(|| Some(bounds_and_relations()))),
        ("7 many-copy weight and dimension reduction", Box::new(|| Some(formula_cross_checks()))),
        ("8 phase diagram sweep", Box::new(|| Some(phase_diagram()))),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Some(Ok(detail)) => println!("[PASS] criterion {name}: {detail} ({secs:.1}s)"),
            Some(Err(detail)) => {
                failed += 1;
                println!("[FAIL] criterion {name}: {detail} ({secs:.1}s)");
            }
            None => println!("[SKIP] criterion {name}: set NPPT_LONG_RUN=1 to run"),
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
