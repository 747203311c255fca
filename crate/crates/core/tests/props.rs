//! Property tests for the functional equations of the core functions and the
//! exactness laws of the torus quadrature.

use ellint_core::elliptic::*;
use ellint_core::quad::{integrate_torus, TorusGrid};
use proptest::prelude::*;

fn polar(m: f64, th: f64) -> C64 {
    C64::from_polar(m, th)
}

fn pol() -> TruncationPolicy {
    TruncationPolicy::new(1e-13, 4096).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_inversion_law(zm in 0.2f64..2.0, zth in 0.0f64..6.28, pm in 0.0f64..0.5, pth in 0.0f64..6.28) {
        let z = polar(zm, zth);
        let p = polar(pm, pth);
        let a = theta(z, p, &pol());
        let b = theta(ONE / z, p, &pol());
        prop_assume!(a.is_ok() && b.is_ok());
        let (a, b) = (a.unwrap(), b.unwrap());
        let rhs = -z * b;
        prop_assert!((a - rhs).norm() <= 1e-13 * a.norm().max(rhs.norm()).max(1e-3));
    }

    #[test]
    fn gamma_base_symmetry(zm in 0.3f64..1.8, zth in 0.0f64..6.28,
                           pm in 0.0f64..0.5, pth in 0.0f64..6.28,
                           qm in 0.0f64..0.5, qth in 0.0f64..6.28) {
        let z = polar(zm, zth);
        let bases = Bases::new(polar(pm, pth), polar(qm, qth)).unwrap();
        let a = elliptic_gamma(z, &bases, &pol());
        let b = elliptic_gamma(z, &bases.swapped(), &pol());
        prop_assume!(a.is_ok() && b.is_ok());
        let (a, b) = (a.unwrap(), b.unwrap());
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(b.norm()));
    }

    #[test]
    fn gamma_reflection_law(zm in 0.3f64..1.8, zth in 0.0f64..6.28,
                            pm in 0.0f64..0.45, pth in 0.0f64..6.28,
                            qm in 0.0f64..0.45, qth in 0.0f64..6.28) {
        let z = polar(zm, zth);
        let bases = Bases::new(polar(pm, pth), polar(qm, qth)).unwrap();
        let a = elliptic_gamma(z, &bases, &pol());
        let b = elliptic_gamma(bases.pq() / z, &bases, &pol());
        prop_assume!(a.is_ok() && b.is_ok());
        let prod = a.unwrap() * b.unwrap();
        prop_assert!((prod - ONE).norm() <= 1e-12);
    }

    #[test]
    fn gamma_quasi_periodicity(zm in 0.3f64..1.5, zth in 0.0f64..6.28,
                               pm in 0.0f64..0.45, pth in 0.0f64..6.28,
                               qm in 0.0f64..0.45, qth in 0.0f64..6.28) {
        let z = polar(zm, zth);
        let bases = Bases::new(polar(pm, pth), polar(qm, qth)).unwrap();
        let g = elliptic_gamma(z, &bases, &pol());
        let gq = elliptic_gamma(bases.q() * z, &bases, &pol());
        let gp = elliptic_gamma(bases.p() * z, &bases, &pol());
        prop_assume!(g.is_ok() && gq.is_ok() && gp.is_ok());
        let g = g.unwrap();
        let tp = theta(z, bases.p(), &pol()).unwrap();
        let tq = theta(z, bases.q(), &pol()).unwrap();
        prop_assert!((gq.unwrap() - tp * g).norm() <= 1e-12 * g.norm().max(1.0));
        prop_assert!((gp.unwrap() - tq * g).norm() <= 1e-12 * g.norm().max(1.0));
    }

    #[test]
    fn gamma_reflection_theta_law(zm in 0.4f64..1.6, zth in 0.0f64..6.28,
                                  pm in 0.0f64..0.4, pth in 0.0f64..6.28,
                                  qm in 0.0f64..0.4, qth in 0.0f64..6.28) {
        let z = polar(zm, zth);
        let bases = Bases::new(polar(pm, pth), polar(qm, qth)).unwrap();
        let a = elliptic_gamma(z, &bases, &pol());
        let b = elliptic_gamma(ONE / z, &bases, &pol());
        prop_assume!(a.is_ok() && b.is_ok());
        let tp = theta(z, bases.p(), &pol()).unwrap();
        let tq = theta(ONE / z, bases.q(), &pol()).unwrap();
        let prod = a.unwrap() * b.unwrap() * tp * tq;
        prop_assert!((prod - ONE).norm() <= 1e-12);
    }

    #[test]
    fn truncation_soundness(zm in 0.3f64..1.5, zth in 0.0f64..6.28,
                            pm in 0.0f64..0.4, qm in 0.0f64..0.4) {
        // doubling the retained terms moves the value by less than 10x the
        // target tolerance
        let z = polar(zm, zth);
        let bases = Bases::new(polar(pm, 0.7), polar(qm, 2.1)).unwrap();
        let loose = TruncationPolicy::new(1e-10, 4096).unwrap();
        let tight = TruncationPolicy::new(1e-20, 4096).unwrap(); // roughly doubles K
        let a = elliptic_gamma(z, &bases, &loose);
        let b = elliptic_gamma(z, &bases, &tight);
        prop_assume!(a.is_ok() && b.is_ok());
        let (a, b) = (a.unwrap(), b.unwrap());
        prop_assert!((a - b).norm() <= 10.0 * 1e-10 * b.norm().max(1e-3));
    }

    #[test]
    fn quadrature_exact_on_laurent_monomials(k in -15i32..15, am in 0.1f64..2.0, ath in 0.0f64..6.28) {
        let grid = TorusGrid::new(1, 16).unwrap();
        let alpha = polar(am, ath);
        let est = integrate_torus(|z| alpha * z[0].powi(k), &grid).unwrap();
        let expected = if k == -1 { alpha } else { C64::new(0.0, 0.0) };
        prop_assert!((est.value - expected).norm() <= 1e-13 * am.max(1.0));
    }

    #[test]
    fn quadrature_linearity(am in 0.1f64..2.0, ath in 0.0f64..6.28,
                            bm in 0.1f64..2.0, bth in 0.0f64..6.28) {
        let grid = TorusGrid::new(1, 32).unwrap();
        let alpha = polar(am, ath);
        let beta = polar(bm, bth);
        let f = |z: &[C64]| ONE / (z[0] - C64::new(0.4, 0.2));
        let g = |z: &[C64]| z[0].powi(2) + ONE / z[0];
        let combined = integrate_torus(|z| alpha * f(z) + beta * g(z), &grid).unwrap().value;
        let separate = alpha * integrate_torus(f, &grid).unwrap().value
            + beta * integrate_torus(g, &grid).unwrap().value;
        prop_assert!((combined - separate).norm() <= 1e-13 * combined.norm().max(1.0));
    }
}
