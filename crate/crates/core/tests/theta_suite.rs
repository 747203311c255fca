//! Batch sweeps of the theta-function identities and the q-difference and
//! contiguous relations.

use ellint_core::elliptic::TruncationPolicy;
use ellint_core::identities::{sweep, ThetaIdentityKind};

fn pol() -> TruncationPolicy {
    TruncationPolicy::default()
}

fn run(kind: ThetaIdentityKind, samples: usize, seed: u64, bound: f64) {
    let summary = sweep(kind, 3, samples, seed, 0.8, 0.4, bound, &pol()).unwrap();
    assert_eq!(summary.reports.len(), samples);
    assert!(
        summary.max_residual < bound,
        "{}: max residual {:.3e} at {:?}",
        kind.name(),
        summary.max_residual,
        summary.argmax
    );
    assert!(summary.reports.iter().all(|r| r.pass));
}

#[test]
fn theta1_sweep() {
    run(ThetaIdentityKind::Theta1, 30, 3, 1e-10);
}

#[test]
fn theta2_sweep() {
    run(ThetaIdentityKind::Theta2, 30, 4, 1e-10);
}

#[test]
fn theta3_sweep() {
    run(ThetaIdentityKind::Theta3, 30, 5, 1e-10);
}

#[test]
fn an_partial_fraction_sweep() {
    run(ThetaIdentityKind::AnPartialFraction, 30, 5, 1e-10);
}

#[test]
fn c_partial_fraction_sweep() {
    run(ThetaIdentityKind::CPartialFraction, 30, 6, 1e-10);
}

#[test]
fn qdiff_sweep() {
    run(ThetaIdentityKind::QdiffLemma, 30, 7, 1e-10);
}

#[test]
fn contiguous_sweep() {
    run(ThetaIdentityKind::ContiguousI, 20, 9, 1e-9);
}

#[test]
fn theta3_periodicity_over_sweep_points() {
    use ellint_core::identities::{theta3_periodicity_residual, ThetaIdentityCase};
    use ellint_core::sample::{sample_params, ParamKind, ParameterSet};
    for seed in 1..=10u64 {
        let ps = sample_params(&ParamKind::Theta3 { n: 2 }, seed, 0.8, 0.4).unwrap();
        let ParameterSet::Theta(case) = ps else { panic!() };
        if let ThetaIdentityCase::Theta3 { .. } = case {
            let r = theta3_periodicity_residual(&case, &pol()).unwrap();
            assert!(r < 1e-10, "seed {seed}: {r:.3e}");
        }
    }
}
