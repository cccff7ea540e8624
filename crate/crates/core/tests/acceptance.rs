//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::Instant;

use rand::Rng;
use tildelab_core::correlation::{
    cd_squared_generator_form, cd_squared_trace_form, conservation_combination,
    distributed_concurrence, monogamy_report, subsystem_propagator, tau, three_party_inequality,
    verify_mixed_equality,
};
use tildelab_core::gellmann::{build_basis, identity_residuals, maximally_entangled};
use tildelab_core::inversion::{
    bloch_decompose, invert_bloch, invert_generators, invert_product, invert_subsets,
    tilde_trace_factor,
};
use tildelab_core::monotone::{
    builtin_counterexample, mon3_check, monotone_deficit_cd, monotone_deficit_cd2, RMatrix,
    TwoOutcomeChannel, VIOLATION_THRESHOLD,
};
use tildelab_core::random::{
    ginibre, random_hermitian, random_mixed_with, random_pure_with, rng_from_seed,
};
use tildelab_core::search::{search_violation, Target};
use tildelab_core::{subsets, HilbertDims, PureState, SubsetMask};

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn dims(d: &[usize]) -> HilbertDims {
    HilbertDims::new(d).unwrap()
}

fn generator_identities() -> Outcome {
    let mut rng = rng_from_seed(1);
    let mut worst = 0.0f64;
    for d in 2..=5 {
        let basis = build_basis(d).unwrap();
        let samples: Vec<_> = (0..100).map(|_| ginibre(d, d, &mut rng)).collect();
        let r = identity_residuals(&basis, &samples).unwrap();
        worst = [
            worst,
            r.normalization,
            r.trace,
            r.transpose,
            r.swap,
            r.bell_swap,
        ]
        .into_iter()
        .fold(0.0, f64::max);
    }
    (
        worst < 1e-12,
        format!("max residual {worst:.2e} (bound 1e-12)"),
    )
}

fn inverter_agreement() -> Outcome {
    let mut rng = rng_from_seed(2);
    let (mut disagree, mut trace_err, mut min_eig) = (0.0f64, 0.0f64, f64::INFINITY);
    for profile in [&[2, 2][..], &[3, 3], &[2, 3, 2], &[4, 2, 2, 2], &[3, 3, 3]] {
        let dims = dims(profile);
        for i in 0..100 {
            let rank = 1 + i % dims.total();
            let rho = random_mixed_with(&dims, rank, &mut rng).unwrap();
            let p = invert_product(&rho);
            disagree = disagree
                .max(invert_subsets(&rho).max_abs_diff(&p))
                .max(invert_generators(&rho).max_abs_diff(&p));
            if dims.common_dim().is_some() {
                disagree = disagree.max(
                    invert_bloch(&bloch_decompose(&rho))
                        .unwrap()
                        .max_abs_diff(&p),
                );
            }
            trace_err = trace_err.max((p.trace().re - tilde_trace_factor(&dims)).abs());
            min_eig = min_eig.min(p.min_eigenvalue());
        }
    }
    let pass = disagree < 1e-10 && trace_err < 1e-10 && min_eig >= -1e-10;
    (pass, format!("disagreement {disagree:.2e}, trace error {trace_err:.2e}, min eigenvalue {min_eig:.2e}"))
}

fn mixed_equality() -> Outcome {
    let profiles: [&[usize]; 12] = [
        &[2, 2],
        &[2, 3],
        &[3, 3],
        &[2, 2, 2],
        &[2, 3, 4],
        &[4, 4],
        &[2, 2, 2, 2],
        &[3, 3, 3],
        &[2, 2, 2, 2, 2],
        &[4, 4, 4],
        &[2, 2, 2, 2, 2, 2, 2, 2],
        &[4, 4, 4, 4],
    ];
    let mut rng = rng_from_seed(3);
    let mut worst = 0.0f64;
    for i in 0..500 {
        let dims = dims(profiles[i % profiles.len()]);
        let rank = rng.random_range(1..=dims.total().min(8));
        let rho = random_mixed_with(&dims, rank, &mut rng).unwrap();
        worst = worst.max(verify_mixed_equality(&rho).unwrap().residual);
    }
    (
        worst < 1e-9,
        format!("500 states, max residual {worst:.2e} (bound 1e-9)"),
    )
}

fn monogamy_values() -> Outcome {
    let ghz = PureState::ghz(4).unwrap();
    let bell = maximally_entangled(2).unwrap();
    let bell2 = bell.tensor(&bell).unwrap();
    let ledger_cd = |psi: &PureState| (monogamy_report(psi).unwrap().alternating_sum / 2.0).sqrt();
    let cd_ghz = distributed_concurrence(&ghz);
    let cd_bell2 = distributed_concurrence(&bell2);
    let mut ok = (cd_ghz - 1.0).abs() < 1e-9
        && (cd_bell2 - 1.0).abs() < 1e-9
        && (ledger_cd(&ghz) - 1.0).abs() < 1e-9
        && (ledger_cd(&bell2) - 1.0).abs() < 1e-9;
    let mut agree = (cd_squared_trace_form(&ghz) - cd_squared_generator_form(&ghz)).abs();
    agree = agree.max((cd_squared_trace_form(&bell2) - cd_squared_generator_form(&bell2)).abs());
    let profiles: [&[usize]; 4] = [&[2, 3, 2], &[3, 2, 4], &[2, 2, 3, 2, 2], &[2, 3, 2, 2, 3]];
    let mut rng = rng_from_seed(4);
    let mut max_cd = 0.0f64;
    for i in 0..100 {
        let psi = random_pure_with(&dims(profiles[i % 4]), &mut rng);
        max_cd = max_cd.max(distributed_concurrence(&psi));
        agree = agree.max((cd_squared_trace_form(&psi) - cd_squared_generator_form(&psi)).abs());
    }
    ok &= max_cd < 1e-10 && agree < 1e-10;
    (
        ok,
        format!(
            "GHZ4 {cd_ghz:.12}, Bell x Bell {cd_bell2:.12}, odd-N max {max_cd:.2e}, form agreement {agree:.2e}"
        ),
    )
}

fn counterexample() -> Outcome {
    let (psi, ch) = builtin_counterexample();
    let target = std::f64::consts::FRAC_1_SQRT_2;
    let ledger = (monogamy_report(&psi).unwrap().alternating_sum / 2.0).sqrt();
    let v1 = monotone_deficit_cd(&psi, &ch).unwrap();
    let v2 = monotone_deficit_cd2(&psi, &ch).unwrap();
    let ok = (ledger - target).abs() < 1e-9
        && (v1.lhs - target).abs() < 1e-9
        && (v1.rhs - 1.0).abs() < 1e-9
        && (v1.deficit - (target - 1.0)).abs() < 1e-9
        && v1.violated
        && (v2.lhs - 0.5).abs() < 1e-9
        && (v2.rhs - 1.0).abs() < 1e-9
        && v2.violated;
    (
        ok,
        format!(
            "C_D {:.9} (ledger {ledger:.9}), branch sum {:.9}, deficit {:.9}, C_D^2 {:.9} vs {:.9}, both flagged: {}",
            v1.lhs,
            v1.rhs,
            v1.deficit,
            v2.lhs,
            v2.rhs,
            v1.violated && v2.violated
        ),
    )
}

fn known_case_regressions() -> Outcome {
    let mut rng = rng_from_seed(6);
    let mut report = Vec::new();
    let mut ok = true;
    for profile in [&[2, 2, 2, 2][..], &[5, 5]] {
        let dims = dims(profile);
        let d1 = profile[0];
        let (mut violations, mut worst) = (0usize, f64::INFINITY);
        for _ in 0..10_000 {
            let psi = random_pure_with(&dims, &mut rng);
            let diag: Vec<f64> = (0..d1).map(|_| rng.random()).collect();
            let ch = TwoOutcomeChannel::schmidt(diag).unwrap();
            for v in [
                monotone_deficit_cd(&psi, &ch).unwrap(),
                monotone_deficit_cd2(&psi, &ch).unwrap(),
            ] {
                worst = worst.min(v.deficit);
                violations += usize::from(v.deficit < -VIOLATION_THRESHOLD);
            }
        }
        ok &= violations == 0;
        report.push(format!(
            "{dims}: {violations} violations, min deficit {worst:.2e}"
        ));
    }
    (ok, report.join("; "))
}

fn mon3_and_search() -> Outcome {
    let mut rng = rng_from_seed(7);
    let mut worst = f64::INFINITY;
    for _ in 0..100_000 {
        let raw: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        let s: f64 = 2.0 * raw.iter().sum::<f64>();
        let mut w = RMatrix::zeros(3, 3);
        for (i, (j, k)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            w[(j, k)] = raw[i] / s;
            w[(k, j)] = raw[i] / s;
        }
        let d = [rng.random(), rng.random(), rng.random()];
        worst = worst.min(mon3_check(&w, &d).unwrap());
    }
    let cd4 = search_violation(4, Target::Cd, 100_000, 7).unwrap();
    let cd2_3 = search_violation(3, Target::Cd2, 100_000, 7).unwrap();
    let cd3 = search_violation(3, Target::Cd, 100_000, 7).unwrap();
    let ok = worst >= -1e-10
        && cd4.violation_found()
        && cd2_3.violation_found()
        && !cd3.violation_found();
    (
        ok,
        format!(
            "r=3 min margin {worst:.2e}; search d1=4 cd {:.3e}, d1=3 cd2 {:.3e}, d1=3 cd {:.2e}",
            cd4.best.margin, cd2_3.best.margin, cd3.best.margin
        ),
    )
}

fn three_party() -> Outcome {
    let mut rng = rng_from_seed(8);
    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let d: Vec<usize> = (0..3).map(|_| rng.random_range(2..=3)).collect();
        let dims = dims(&d);
        let rank = rng.random_range(1..=dims.total());
        let rho = random_mixed_with(&dims, rank, &mut rng).unwrap();
        worst = worst.min(three_party_inequality(&rho).unwrap());
    }
    (
        worst >= -1e-10,
        format!("10000 states, min margin {worst:.3e}"),
    )
}

fn conservation() -> Outcome {
    let mut rng = rng_from_seed(9);
    let dims = dims(&[2, 2, 2, 2]);
    let s = SubsetMask::from_labels(&[1, 3]).unwrap();
    let mut rho = random_mixed_with(&dims, 4, &mut rng).unwrap();
    let h = random_hermitian(4, &mut rng);
    let u = subsystem_propagator(&dims, s, &h, 0.05).unwrap();
    let partial: Vec<SubsetMask> = subsets(4)
        .unwrap()
        .into_iter()
        .filter(|a| a.intersects(s) && !s.is_subset_of(*a))
        .collect();
    let start: Vec<f64> = partial.iter().map(|&a| tau(&rho, a).unwrap()).collect();
    let c0 = conservation_combination(&rho, s).unwrap();
    let (mut drift, mut change) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        rho = rho.conjugate_by(&u).unwrap();
        drift = drift.max((conservation_combination(&rho, s).unwrap() - c0).abs());
        for (a, t0) in partial.iter().zip(&start) {
            change = change.max((tau(&rho, *a).unwrap() - t0).abs());
        }
    }
    (
        drift < 1e-9 && change > 1e-3,
        format!("drift {drift:.2e}, largest partial-overlap change {change:.3e}"),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("generator identities, d = 2..5", generator_identities),
        ("four-form inverter agreement", inverter_agreement),
        ("mixed-state equality", mixed_equality),
        ("pure-state monogamy values", monogamy_values),
        ("explicit 4222 counterexample", counterexample),
        ("known-case monotonicity", known_case_regressions),
        ("mon3 margin and violation search", mon3_and_search),
        ("three-party inequality", three_party),
        ("conservation under local dynamics", conservation),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (pass, detail) = run();
        failed += usize::from(!pass);
        println!(
            "criterion {} {} {name}: {detail} [{:.1}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
