//! Tensor-product trapezoidal quadrature on the n-torus.
//!
//! The grid is the set of N-th roots of unity per dimension, so equal-angle
//! trapezoidal sums are spectrally accurate for integrands analytic in a
//! neighborhood of the torus. Two normalizations are exposed:
//!
//! * [`integrate_torus`] computes `(2 pi i)^{-n} \oint f(z) dz`, i.e. the node
//!   average of `f(z) * z_1 ... z_n`;
//! * [`torus_average_indexed`] computes `(2 pi i)^{-n} \oint g(z) dz_1/z_1 ... dz_n/z_n`,
//!   the plain node average, taking grid indices so callers can memoize per
//!   1-D node (all identity integrands here are products of gamma values at
//!   `parameter * root-of-unity` arguments).
//!
//! The error estimate comes from the embedded N/2 subgrid; accumulation uses
//! pairwise summation so results are deterministic for a fixed worker count
//! of one.

use std::f64::consts::PI;

use crate::elliptic::{pochhammer_norm, Bases, TruncationPolicy, C64, ONE};
use crate::error::{Error, Result};

/// Default cap on integrand evaluations per call (2^24), overridable through
/// the `ELLINT_BUDGET` environment variable.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

pub fn evaluation_budget() -> u64 {
    match std::env::var("ELLINT_BUDGET") {
        Ok(s) => s.parse::<u64>().unwrap_or(DEFAULT_BUDGET),
        Err(_) => DEFAULT_BUDGET,
    }
}

/// Node layout for tensor trapezoidal quadrature on the n-torus: the same
/// `N` points `e^{2 pi i k / N}` reused in every dimension.
#[derive(Debug, Clone)]
pub struct TorusGrid {
    dims: usize,
    nodes_per_dim: usize,
    nodes: Vec<C64>,
}

impl TorusGrid {
    /// `nodes_per_dim` must be even (the error estimate embeds the half grid)
    /// and at least 8.
    pub fn new(dims: usize, nodes_per_dim: usize) -> Result<Self> {
        if dims == 0 {
            return Err(Error::Domain("grid dimension must be >= 1".into()));
        }
        if nodes_per_dim < 8 || nodes_per_dim % 2 != 0 {
            return Err(Error::Domain(format!(
                "nodes per dimension must be even and >= 8, got {nodes_per_dim}"
            )));
        }
        let n = nodes_per_dim;
        let nodes = (0..n)
            .map(|k| {
                let angle = 2.0 * PI * (k as f64) / (n as f64);
                C64::from_polar(1.0, angle)
            })
            .collect();
        Ok(TorusGrid {
            dims,
            nodes_per_dim,
            nodes,
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn nodes_per_dim(&self) -> usize {
        self.nodes_per_dim
    }

    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }

    pub fn node(&self, k: usize) -> C64 {
        self.nodes[k % self.nodes_per_dim]
    }

    pub fn total_points(&self) -> u64 {
        (self.nodes_per_dim as u64).pow(self.dims as u32)
    }

    /// Same nodes, different dimension count.
    pub fn with_dims(&self, dims: usize) -> Result<TorusGrid> {
        TorusGrid::new(dims, self.nodes_per_dim)
    }
}

/// Quadrature value together with the two-grid error estimate
/// `|value(N) - value(N/2)|`.
#[derive(Debug, Clone, Copy)]
pub struct IntegralEstimate {
    pub value: C64,
    pub error_estimate: f64,
    pub nodes_used: u64,
}

/// Deterministic pairwise (binary-counter) summation accumulator.
#[derive(Debug, Default)]
struct PairwiseSum {
    levels: Vec<Option<C64>>,
    count: u64,
}

impl PairwiseSum {
    fn push(&mut self, mut v: C64) {
        self.count += 1;
        for slot in self.levels.iter_mut() {
            match slot.take() {
                Some(u) => v += u,
                None => {
                    *slot = Some(v);
                    return;
                }
            }
        }
        self.levels.push(Some(v));
    }

    fn total(&self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for v in self.levels.iter().flatten() {
            acc += v;
        }
        acc
    }
}

/// Average of `g` over the full grid and its embedded half grid, i.e. the
/// normalized contour integral of `g` against `prod_j dz_j / z_j`.
pub fn torus_average_indexed<G>(g: G, grid: &TorusGrid) -> Result<IntegralEstimate>
where
    G: Fn(&[usize]) -> C64,
{
    let budget = evaluation_budget();
    let total = grid.total_points();
    if total > budget {
        return Err(Error::BudgetExceeded {
            requested: total,
            budget,
        });
    }
    let n = grid.dims();
    let nn = grid.nodes_per_dim();
    let mut idx = vec![0usize; n];
    let mut full = PairwiseSum::default();
    let mut half = PairwiseSum::default();
    let mut flat: u64 = 0;
    loop {
        let v = g(&idx);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { index: flat });
        }
        full.push(v);
        if idx.iter().all(|&k| k % 2 == 0) {
            half.push(v);
        }
        flat += 1;
        // odometer
        let mut d = 0;
        loop {
            if d == n {
                let value = full.total() / C64::new(total as f64, 0.0);
                let half_total = ((nn / 2) as u64).pow(n as u32);
                let value_half = half.total() / C64::new(half_total as f64, 0.0);
                return Ok(IntegralEstimate {
                    value,
                    error_estimate: (value - value_half).norm(),
                    nodes_used: total,
                });
            }
            idx[d] += 1;
            if idx[d] < nn {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// `(2 pi i)^{-n} \oint_{T^n} f(z) dz`: the trapezoidal sum
/// `N^{-n} sum f(nodes) * prod(node coordinates)` with the embedded
/// half-grid error estimate.
pub fn integrate_torus<F>(f: F, grid: &TorusGrid) -> Result<IntegralEstimate>
where
    F: Fn(&[C64]) -> C64,
{
    let n = grid.dims();
    torus_average_indexed(
        |idx| {
            let mut zbuf = Vec::with_capacity(n);
            let mut weight = ONE;
            for &k in idx {
                let z = grid.node(k);
                zbuf.push(z);
                weight *= z;
            }
            f(&zbuf) * weight
        },
        grid,
    )
}

/// The normalization constants kappa, kappa_A, kappa_C:
///
/// * `kappa     = (p;p)(q;q) / (4 pi i)`,
/// * `kappa_A   = ((p;p)(q;q))^n / ((2 pi i)^n (n+1)!)`,
/// * `kappa_C   = ((p;p)(q;q))^n / ((2 pi i)^n 2^n n!)`.
///
/// These are the full constants including the `2 pi i` factors; callers pair
/// them with quadrature routines that already divide by `(2 pi i)^n`, so the
/// practical composites are exposed as [`kappa_a_composite`] and friends.
#[derive(Debug, Clone, Copy)]
pub struct KappaConstants {
    pub kappa: C64,
    pub kappa_a: C64,
    pub kappa_c: C64,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn kappa_constants(n: usize, bases: &Bases, policy: &TruncationPolicy) -> Result<KappaConstants> {
    if n == 0 {
        return Err(Error::Domain("kappa constants need n >= 1".into()));
    }
    let c = pochhammer_norm(bases, policy)?;
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let kappa = c / (C64::new(0.0, 4.0 * PI));
    let cn = c.powu(n as u32);
    let denom_pow = two_pi_i.powu(n as u32);
    let kappa_a = cn / (denom_pow * factorial(n + 1));
    let kappa_c = cn / (denom_pow * 2f64.powi(n as i32) * factorial(n));
    Ok(KappaConstants {
        kappa,
        kappa_a,
        kappa_c,
    })
}

/// `kappa_A (2 pi i)^n = ((p;p)(q;q))^n / (n+1)!`; multiplying this by a
/// [`torus_average_indexed`] value gives `kappa_A \oint ... dz/z`.
pub fn kappa_a_composite(n: usize, bases: &Bases, policy: &TruncationPolicy) -> Result<C64> {
    let c = pochhammer_norm(bases, policy)?;
    Ok(c.powu(n as u32) / factorial(n + 1))
}

/// `kappa_C (2 pi i)^n = ((p;p)(q;q))^n / (2^n n!)`.
pub fn kappa_c_composite(n: usize, bases: &Bases, policy: &TruncationPolicy) -> Result<C64> {
    let c = pochhammer_norm(bases, policy)?;
    Ok(c.powu(n as u32) / (2f64.powi(n as i32) * factorial(n)))
}

/// `kappa (2 pi i) = (p;p)(q;q) / 2` for the univariate transforms.
pub fn kappa_composite(bases: &Bases, policy: &TruncationPolicy) -> Result<C64> {
    let c = pochhammer_norm(bases, policy)?;
    Ok(c / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_close(a: C64, b: C64, tol: f64) {
        assert!(
            (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0),
            "expected {a} ~ {b}"
        );
    }

    #[test]
    fn grid_nodes_on_unit_circle() {
        let grid = TorusGrid::new(2, 64).unwrap();
        for &z in grid.nodes() {
            assert!((z.norm() - 1.0).abs() < 1e-15);
        }
        assert_eq!(grid.total_points(), 64 * 64);
    }

    #[test]
    fn grid_rejects_odd_or_small() {
        assert!(TorusGrid::new(1, 7).is_err());
        assert!(TorusGrid::new(1, 6).is_err());
        assert!(TorusGrid::new(0, 16).is_err());
    }

    #[test]
    fn cauchy_integral_of_inverse() {
        let grid = TorusGrid::new(1, 32).unwrap();
        let est = integrate_torus(|z| ONE / z[0], &grid).unwrap();
        assert_close(est.value, ONE, 1e-14);
    }

    #[test]
    fn monomial_without_residue() {
        let grid = TorusGrid::new(1, 32).unwrap();
        let est = integrate_torus(|z| z[0].powi(3), &grid).unwrap();
        assert!(est.value.norm() < 1e-14);
    }

    #[test]
    fn simple_pole_inside() {
        let grid = TorusGrid::new(1, 64).unwrap();
        let est = integrate_torus(|z| ONE / (z[0] - c(0.5, 0.0)), &grid).unwrap();
        assert_close(est.value, ONE, 1e-14);
        assert!(est.error_estimate < 1e-8);
    }

    #[test]
    fn laurent_exactness_window() {
        let grid = TorusGrid::new(1, 16).unwrap();
        for k in -15..15i32 {
            let est = integrate_torus(|z| z[0].powi(k), &grid).unwrap();
            let expected = if k == -1 { ONE } else { C64::new(0.0, 0.0) };
            assert!(
                (est.value - expected).norm() < 1e-14,
                "k={k}: {}",
                est.value
            );
        }
    }

    #[test]
    fn two_dimensional_product_integrand() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let est = integrate_torus(|z| ONE / (z[0] * z[1]), &grid).unwrap();
        assert_close(est.value, ONE, 1e-14);
    }

    #[test]
    fn linearity() {
        let grid = TorusGrid::new(1, 64).unwrap();
        let f = |z: &[C64]| ONE / (z[0] - c(0.4, 0.1));
        let g = |z: &[C64]| z[0].powi(2) + ONE / z[0];
        let alpha = c(1.3, -0.2);
        let beta = c(0.4, 2.0);
        let lhs = integrate_torus(|z| alpha * f(z) + beta * g(z), &grid)
            .unwrap()
            .value;
        let rhs = alpha * integrate_torus(f, &grid).unwrap().value
            + beta * integrate_torus(g, &grid).unwrap().value;
        assert!((lhs - rhs).norm() < 1e-13 * lhs.norm().max(1.0));
    }

    #[test]
    fn budget_exceeded_is_typed() {
        let grid = TorusGrid::new(3, 300).unwrap();
        assert!(matches!(
            integrate_torus(|_| ONE, &grid),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn non_finite_integrand_is_typed() {
        let grid = TorusGrid::new(1, 8).unwrap();
        let est = integrate_torus(|z| ONE / (z[0] - ONE), &grid);
        assert!(matches!(est, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn kappa_n1_coincidence() {
        let pol = TruncationPolicy::default();
        let bases = Bases::new(c(0.2, 0.0), c(0.1, 0.0)).unwrap();
        let k = kappa_constants(1, &bases, &pol).unwrap();
        assert_close(k.kappa_a, k.kappa, 1e-14);
        assert_close(k.kappa_c, k.kappa, 1e-14);
    }

    #[test]
    fn kappa_a_trivial_bases_n2() {
        let pol = TruncationPolicy::default();
        let bases = Bases::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        let k = kappa_constants(2, &bases, &pol).unwrap();
        let two_pi_i = C64::new(0.0, 2.0 * PI);
        let expected = ONE / (two_pi_i * two_pi_i * 6.0);
        assert_close(k.kappa_a, expected, 1e-14);
    }

    #[test]
    fn kappa_n3_against_pochhammer_oracle() {
        let pol = TruncationPolicy::new(1e-13, 4096).unwrap();
        let bases = Bases::new(c(0.1, 0.0), c(0.2, 0.0)).unwrap();
        let k = kappa_constants(3, &bases, &pol).unwrap();
        // oracle: direct truncated products
        let mut pp = ONE;
        let mut t = bases.p();
        for _ in 0..60 {
            pp *= ONE - t;
            t *= bases.p();
        }
        let mut qq = ONE;
        let mut t = bases.q();
        for _ in 0..60 {
            qq *= ONE - t;
            t *= bases.q();
        }
        let cc = pp * qq;
        let two_pi_i = C64::new(0.0, 2.0 * PI);
        let expected = cc.powu(3) / (two_pi_i.powu(3) * 24.0);
        assert_close(k.kappa_a, expected, 1e-12);
        let expected_c = cc.powu(3) / (two_pi_i.powu(3) * 48.0);
        assert_close(k.kappa_c, expected_c, 1e-12);
    }
}
