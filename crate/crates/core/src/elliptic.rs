//! Theta function, elliptic gamma function, q-Pochhammer symbols and elliptic
//! shifted factorials with rigorous truncation control.
//!
//! Conventions:
//!
//! * `(a;q)_inf = prod_{k>=0} (1 - a q^k)` for `|q| < 1`,
//! * `theta(z;p) = (z;p)_inf (p/z;p)_inf`,
//! * `Gamma(z;p,q) = prod_{mu,nu>=0} (1 - p^{mu+1} q^{nu+1} / z) / (1 - z p^mu q^nu)`,
//! * `(a;q,p)_n = Gamma(a q^n) / Gamma(a)`, a finite theta product for `n >= 0`.
//!
//! All infinite products are accumulated in log space (sum of principal-branch
//! logarithms, exponentiated at the end); branch ambiguities cancel under the
//! final exponentiation, so no winding tracking is needed.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

/// The pair of bases `(p, q)` together with `M = max(|p|, |q|)`.
///
/// `M < 1` is enforced at construction; it is the ground assumption of every
/// evaluation in this crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bases {
    p: C64,
    q: C64,
    big_m: f64,
}

impl Bases {
    pub fn new(p: C64, q: C64) -> Result<Self> {
        let big_m = p.norm().max(q.norm());
        if !big_m.is_finite() || big_m >= 1.0 {
            return Err(Error::NonConvergent { modulus: big_m });
        }
        Ok(Bases { p, q, big_m })
    }

    pub fn p(&self) -> C64 {
        self.p
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    /// `max(|p|, |q|)`, exactly.
    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    pub fn pq(&self) -> C64 {
        self.p * self.q
    }

    /// Bases with `p` and `q` interchanged.
    pub fn swapped(&self) -> Bases {
        Bases {
            p: self.q,
            q: self.p,
            big_m: self.big_m,
        }
    }
}

/// Target relative error of each truncated infinite product, plus a hard cap
/// on the number of retained terms per product index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub tolerance: f64,
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            tolerance: 1e-12,
            max_terms: 4096,
        }
    }
}

impl TruncationPolicy {
    pub fn new(tolerance: f64, max_terms: usize) -> Result<Self> {
        if !(tolerance > 0.0) || max_terms == 0 {
            return Err(Error::Domain(format!(
                "truncation policy needs tolerance > 0 and max_terms >= 1, got {tolerance}, {max_terms}"
            )));
        }
        Ok(TruncationPolicy {
            tolerance,
            max_terms,
        })
    }

    /// Smallest `K` with `m^K / (1 - m) < tolerance`, plus four safety terms.
    pub fn cutoff(&self, m: f64) -> usize {
        self.cutoff_scaled(m, 1.0)
    }

    /// Cutoff for a product whose terms are bounded by `scale * m^k`.
    pub fn cutoff_scaled(&self, m: f64, scale: f64) -> usize {
        if m <= 0.0 {
            return 2;
        }
        debug_assert!(m < 1.0);
        let s = scale.max(1.0);
        let k = ((self.tolerance * (1.0 - m) / s).ln() / m.ln()).ceil();
        let k = if k.is_finite() && k > 0.0 { k as usize } else { 1 } + 4;
        k.clamp(1, self.max_terms)
    }

    /// Relative pole-proximity radius: arguments within `sqrt(tolerance)` of a
    /// pole lattice point raise [`Error::NearPole`].
    pub fn pole_radius(&self) -> f64 {
        self.tolerance.sqrt()
    }
}

fn finite(v: C64) -> bool {
    v.re.is_finite() && v.im.is_finite()
}

fn qpochhammer_impl(a: C64, q: C64, policy: &TruncationPolicy, zero_tolerant: bool) -> Result<C64> {
    let qn = q.norm();
    if !qn.is_finite() || qn >= 1.0 {
        return Err(Error::NonConvergent { modulus: qn });
    }
    if a == ZERO {
        return Ok(ONE);
    }
    let kmax = policy.cutoff_scaled(qn, a.norm());
    let mut log_sum = ZERO;
    let mut term = a; // a q^k
    for k in 0..kmax {
        let factor = ONE - term;
        if factor == ZERO {
            if zero_tolerant {
                return Ok(ZERO);
            }
            return Err(Error::PoleHit { index: k });
        }
        log_sum += factor.ln();
        term *= q;
        if term == ZERO {
            break;
        }
    }
    let value = log_sum.exp();
    if !finite(value) {
        return Err(Error::Domain(format!(
            "q-Pochhammer overflowed for a={a}, q={q}"
        )));
    }
    Ok(value)
}

/// `(a;q)_inf`, truncated so the geometric tail stays below the policy
/// tolerance. A vanishing factor is an error here; use
/// [`qpochhammer_inf_zero_tolerant`] when `0` is an expected exact value
/// (e.g. `a = q^{-k}`).
pub fn qpochhammer_inf(a: C64, q: C64, policy: &TruncationPolicy) -> Result<C64> {
    qpochhammer_impl(a, q, policy, false)
}

/// `(a;q)_inf` returning exactly `0` when a factor vanishes.
pub fn qpochhammer_inf_zero_tolerant(a: C64, q: C64, policy: &TruncationPolicy) -> Result<C64> {
    qpochhammer_impl(a, q, policy, true)
}

/// `theta(z;p) = (z;p)_inf (p/z;p)_inf`.
///
/// Before the product the argument is reduced by the quasi-periodicity
/// `theta(z) = -z theta(pz)` (and `theta(z) = theta(p/z)`) into the annulus
/// `|p|^{1/2} <= |z| < |p|^{-1/2}`, with the accumulated prefactor applied
/// exactly; this keeps every product factor O(1).
pub fn theta(z: C64, p: C64, policy: &TruncationPolicy) -> Result<C64> {
    if z == ZERO {
        return Err(Error::Domain("theta(0;p) is undefined".into()));
    }
    let pn = p.norm();
    if !pn.is_finite() || pn >= 1.0 {
        return Err(Error::NonConvergent { modulus: pn });
    }
    if p == ZERO {
        return Ok(ONE - z);
    }
    let lo = pn.sqrt();
    let hi = 1.0 / lo;
    let mut zz = z;
    let mut prefactor = ONE;
    if zz.norm() < lo {
        zz = p / zz;
    }
    while zz.norm() >= hi {
        prefactor *= -zz;
        zz *= p;
    }
    let a = qpochhammer_inf_zero_tolerant(zz, p, policy)?;
    let b = qpochhammer_inf_zero_tolerant(p / zz, p, policy)?;
    Ok(prefactor * a * b)
}

/// The elliptic gamma function `Gamma(z;p,q)`, truncated at `mu + nu <= K`
/// with `K` from the geometric-tail bound.
///
/// Arguments within `sqrt(tolerance)` (relative) of a pole `p^{-mu} q^{-nu}`
/// raise [`Error::NearPole`]. Zeros (`z = p^{mu+1} q^{nu+1}`) are legitimate
/// exact values and return `0`.
pub fn elliptic_gamma(z: C64, bases: &Bases, policy: &TruncationPolicy) -> Result<C64> {
    if z == ZERO {
        return Err(Error::Domain("elliptic gamma is undefined at z = 0".into()));
    }
    if !finite(z) {
        return Err(Error::Domain("elliptic gamma argument is not finite".into()));
    }
    let m = bases.big_m();
    let zn = z.norm();
    let scale = zn.max(m * m / zn);
    // +2 margin absorbs the (s+1)-fold multiplicity of the antidiagonals.
    let kmax = policy.cutoff_scaled(m, scale) + 2;
    let radius = policy.pole_radius();

    let mut p_pows = Vec::with_capacity(kmax + 2);
    let mut q_pows = Vec::with_capacity(kmax + 2);
    p_pows.push(ONE);
    q_pows.push(ONE);
    for k in 0..=kmax {
        p_pows.push(p_pows[k] * bases.p());
        q_pows.push(q_pows[k] * bases.q());
    }

    let z_inv = ONE / z;
    let mut log_sum = ZERO;
    for s in 0..=kmax {
        for mu in 0..=s {
            let nu = s - mu;
            let den = ONE - z * p_pows[mu] * q_pows[nu];
            if den.norm() < radius {
                return Err(Error::NearPole {
                    mu: mu as u32,
                    nu: nu as u32,
                    radius,
                });
            }
            let num = ONE - p_pows[mu + 1] * q_pows[nu + 1] * z_inv;
            if num == ZERO {
                return Ok(ZERO);
            }
            log_sum += num.ln() - den.ln();
        }
    }
    let value = log_sum.exp();
    if !finite(value) {
        return Err(Error::Domain(format!("elliptic gamma overflowed at z={z}")));
    }
    Ok(value)
}

/// Shorthand for a product of elliptic gamma values (the usual condensed
/// notation `Gamma(a, b, c, ...)`).
pub fn gamma_prod(args: &[C64], bases: &Bases, policy: &TruncationPolicy) -> Result<C64> {
    let mut acc = ONE;
    for &a in args {
        acc *= elliptic_gamma(a, bases, policy)?;
    }
    Ok(acc)
}

/// `prod G(num) / prod G(den)` with the structural rule that a pole hit by a
/// denominator gamma is an exact zero of the product (the kernels and
/// integrands vanish on those varieties rather than blowing up).
pub fn gamma_fraction(
    num: &[C64],
    den: &[C64],
    bases: &Bases,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let mut acc = ONE;
    for &a in num {
        acc *= elliptic_gamma(a, bases, policy)?;
    }
    let mut zero = false;
    for &a in den {
        match elliptic_gamma(a, bases, policy) {
            Ok(g) => {
                if g == ZERO {
                    return Err(Error::DivisionByZero(format!(
                        "Gamma({a}) vanished in a denominator"
                    )));
                }
                acc /= g;
            }
            Err(Error::NearPole { .. }) => zero = true,
            Err(e) => return Err(e),
        }
    }
    if zero {
        return Ok(ZERO);
    }
    Ok(acc)
}

/// Elliptic shifted factorial `(a;q,p)_n = Gamma(a q^n) / Gamma(a)`.
///
/// For `n >= 0` this equals `prod_{j=0}^{n-1} theta(a q^j; p)` and is computed
/// that way (cheaper and pole-free); for `n < 0` it is computed as the gamma
/// ratio.
pub fn shifted_factorial(a: C64, n: i64, bases: &Bases, policy: &TruncationPolicy) -> Result<C64> {
    if n >= 0 {
        let mut acc = ONE;
        let mut arg = a;
        for _ in 0..n {
            acc *= theta(arg, bases.p(), policy)?;
            arg *= bases.q();
        }
        Ok(acc)
    } else {
        let denom = elliptic_gamma(a, bases, policy)?;
        if denom == ZERO {
            return Err(Error::DivisionByZero(format!(
                "Gamma({a}) = 0 in the shifted factorial ratio"
            )));
        }
        let shifted = a * bases.q().powi(n as i32);
        let num = elliptic_gamma(shifted, bases, policy)?;
        Ok(num / denom)
    }
}

/// `1 / ((p;p)_inf (q;q)_inf)`, the residue constant of
/// `lim_{z->a} (1 - z/a) Gamma(z/a) `.
pub fn residue_constant(bases: &Bases, policy: &TruncationPolicy) -> Result<C64> {
    let pp = qpochhammer_inf(bases.p(), bases.p(), policy)?;
    let qq = qpochhammer_inf(bases.q(), bases.q(), policy)?;
    Ok(ONE / (pp * qq))
}

/// `(p;p)_inf (q;q)_inf`, the normalization that enters every kappa constant.
pub fn pochhammer_norm(bases: &Bases, policy: &TruncationPolicy) -> Result<C64> {
    let pp = qpochhammer_inf(bases.p(), bases.p(), policy)?;
    let qq = qpochhammer_inf(bases.q(), bases.q(), policy)?;
    Ok(pp * qq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_close(a: C64, b: C64, tol: f64) {
        let scale = a.norm().max(b.norm()).max(1e-30);
        assert!(
            (a - b).norm() / scale <= tol,
            "expected {a} ~ {b} (rel err {:.3e} > {tol:.1e})",
            (a - b).norm() / scale
        );
    }

    /// Independent oracle: plain truncated product, no log-space tricks.
    fn qpoch_oracle(a: C64, q: C64, terms: usize) -> C64 {
        let mut acc = ONE;
        let mut t = a;
        for _ in 0..terms {
            acc *= ONE - t;
            t *= q;
        }
        acc
    }

    fn theta_oracle(z: C64, p: C64, terms: usize) -> C64 {
        qpoch_oracle(z, p, terms) * qpoch_oracle(p / z, p, terms)
    }

    #[test]
    fn qpochhammer_trivial_values() {
        let pol = TruncationPolicy::default();
        assert_close(qpochhammer_inf(ZERO, c(0.5, 0.0), &pol).unwrap(), ONE, 1e-15);
        assert_close(
            qpochhammer_inf(c(0.7, 0.0), ZERO, &pol).unwrap(),
            c(0.3, 0.0),
            1e-15,
        );
    }

    #[test]
    fn qpochhammer_half_half() {
        let pol = TruncationPolicy::new(1e-13, 4096).unwrap();
        let got = qpochhammer_inf(c(0.5, 0.0), c(0.5, 0.0), &pol).unwrap();
        let oracle = qpoch_oracle(c(0.5, 0.0), c(0.5, 0.0), 50);
        assert_close(got, oracle, 1e-12);
        // frozen from the 50-term oracle
        assert_close(got, c(0.2887880950866024, 0.0), 1e-12);
    }

    #[test]
    fn qpochhammer_rejects_divergent_base() {
        let pol = TruncationPolicy::default();
        assert!(matches!(
            qpochhammer_inf(c(0.5, 0.0), c(1.0, 0.0), &pol),
            Err(Error::NonConvergent { .. })
        ));
    }

    #[test]
    fn qpochhammer_pole_hit_vs_zero_tolerant() {
        let pol = TruncationPolicy::default();
        // a = q^{-1} makes the k = 1 factor vanish exactly
        let q = c(0.5, 0.0);
        let a = ONE / q;
        assert!(matches!(
            qpochhammer_inf(a, q, &pol),
            Err(Error::PoleHit { index: 1 })
        ));
        assert_eq!(qpochhammer_inf_zero_tolerant(a, q, &pol).unwrap(), ZERO);
    }

    #[test]
    fn theta_trivial_values() {
        let pol = TruncationPolicy::default();
        assert_eq!(theta(ONE, c(0.3, 0.0), &pol).unwrap(), ZERO);
        assert_close(theta(c(0.4, 0.0), ZERO, &pol).unwrap(), c(0.6, 0.0), 1e-15);
        assert!(matches!(
            theta(ZERO, c(0.3, 0.0), &pol),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn theta_matches_direct_product() {
        let pol = TruncationPolicy::new(1e-13, 4096).unwrap();
        let z = c(0.5, 0.0);
        let p = c(0.3, 0.0);
        let got = theta(z, p, &pol).unwrap();
        let oracle = theta_oracle(z, p, 80);
        assert_close(got, oracle, 1e-13);
    }

    #[test]
    fn theta_reduction_agrees_with_oracle_far_from_annulus() {
        let pol = TruncationPolicy::new(1e-13, 4096).unwrap();
        let p = c(0.2, 0.1);
        for &z in &[c(40.0, -3.0), c(0.001, 0.002), c(-25.0, 0.0)] {
            let got = theta(z, p, &pol).unwrap();
            let oracle = theta_oracle(z, p, 200);
            assert_close(got, oracle, 1e-11);
        }
    }

    #[test]
    fn theta_inversion_symmetry() {
        // theta(z;p) = -z theta(1/z;p)
        let pol = TruncationPolicy::new(1e-14, 4096).unwrap();
        let p = c(0.23, 0.11);
        for &z in &[c(0.7, 0.2), c(-1.3, 0.4), c(0.05, -0.9)] {
            let lhs = theta(z, p, &pol).unwrap();
            let rhs = -z * theta(ONE / z, p, &pol).unwrap();
            assert_close(lhs, rhs, 1e-13);
        }
    }

    #[test]
    fn gamma_at_sqrt_pq_is_one() {
        let pol = TruncationPolicy::new(1e-13, 4096).unwrap();
        let bases = Bases::new(c(0.2, 0.0), c(0.15, 0.0)).unwrap();
        let z = bases.pq().sqrt();
        assert_close(elliptic_gamma(z, &bases, &pol).unwrap(), ONE, 1e-12);
    }

    #[test]
    fn gamma_reflection() {
        let pol = TruncationPolicy::new(1e-13, 4096).unwrap();
        let bases = Bases::new(c(0.2, 0.0), c(0.15, 0.0)).unwrap();
        let z = c(0.3, 0.1);
        let prod = elliptic_gamma(z, &bases, &pol).unwrap()
            * elliptic_gamma(bases.pq() / z, &bases, &pol).unwrap();
        assert_close(prod, ONE, 1e-12);
    }

    #[test]
    fn gamma_truncation_cross_check() {
        // K = 60 vs K = 80 style check: tighten the tolerance and compare.
        let loose = TruncationPolicy::new(1e-10, 4096).unwrap();
        let tight = TruncationPolicy::new(1e-15, 4096).unwrap();
        let bases = Bases::new(c(0.1, 0.0), c(0.2, 0.0)).unwrap();
        let z = c(0.5, 0.0);
        let a = elliptic_gamma(z, &bases, &loose).unwrap();
        let b = elliptic_gamma(z, &bases, &tight).unwrap();
        assert_close(a, b, 1e-9);
        // frozen from the tight evaluation
        assert_close(b, c(2.31197611095325, 0.0), 1e-12);
    }

    #[test]
    fn gamma_near_pole_is_typed() {
        let pol = TruncationPolicy::default();
        let bases = Bases::new(c(0.2, 0.0), c(0.3, 0.0)).unwrap();
        let err = elliptic_gamma(c(1.0 + 1e-9, 0.0), &bases, &pol).unwrap_err();
        assert!(matches!(err, Error::NearPole { mu: 0, nu: 0, .. }));
    }

    #[test]
    fn gamma_zero_at_pq() {
        let pol = TruncationPolicy::default();
        let bases = Bases::new(c(0.2, 0.0), c(0.3, 0.0)).unwrap();
        assert_eq!(elliptic_gamma(bases.pq(), &bases, &pol).unwrap(), ZERO);
    }

    #[test]
    fn shifted_factorial_basic() {
        let pol = TruncationPolicy::new(1e-13, 4096).unwrap();
        let bases = Bases::new(c(0.3, 0.0), c(0.4, 0.0)).unwrap();
        let a = c(0.5, 0.0);
        assert_close(shifted_factorial(a, 0, &bases, &pol).unwrap(), ONE, 1e-15);
        assert_close(
            shifted_factorial(a, 1, &bases, &pol).unwrap(),
            theta(a, bases.p(), &pol).unwrap(),
            1e-14,
        );
        // n = -1: the gamma ratio must match 1/theta(a/q; p)
        let ratio = shifted_factorial(a, -1, &bases, &pol).unwrap();
        let closed = ONE / theta(a / bases.q(), bases.p(), &pol).unwrap();
        assert_close(ratio, closed, 1e-12);
    }

    #[test]
    fn shifted_factorial_gamma_ratio_consistency_positive_n() {
        let pol = TruncationPolicy::new(1e-13, 4096).unwrap();
        let bases = Bases::new(c(0.25, 0.05), c(0.3, -0.1)).unwrap();
        let a = c(0.6, 0.2);
        for n in 1..4i64 {
            let theta_form = shifted_factorial(a, n, &bases, &pol).unwrap();
            let num = elliptic_gamma(a * bases.q().powi(n as i32), &bases, &pol).unwrap();
            let den = elliptic_gamma(a, &bases, &pol).unwrap();
            assert_close(theta_form, num / den, 1e-11);
        }
    }

    #[test]
    fn residue_constant_values() {
        let pol = TruncationPolicy::new(1e-13, 4096).unwrap();
        let b0 = Bases::new(ZERO, ZERO).unwrap();
        assert_close(residue_constant(&b0, &pol).unwrap(), ONE, 1e-15);
        let b = Bases::new(c(0.5, 0.0), ZERO).unwrap();
        let got = residue_constant(&b, &pol).unwrap();
        assert_close(got, ONE / c(0.2887880950866024, 0.0), 1e-12);
        assert_close(got, c(3.4627466194550562, 0.0), 1e-10);
    }

    #[test]
    fn residue_constant_glim_limit() {
        // (1 - z/a) Gamma(z/a) at z = a (1 + eps) approaches the residue constant
        let pol = TruncationPolicy::new(1e-13, 4096).unwrap();
        let bases = Bases::new(c(0.2, 0.0), c(0.15, 0.0)).unwrap();
        let eps = 1e-6;
        let u = c(1.0 + eps, 0.0);
        let val = (ONE - u) * elliptic_gamma(u, &bases, &pol).unwrap();
        let expected = residue_constant(&bases, &pol).unwrap();
        assert!(((val - expected) / expected).norm() < 20.0 * eps);
    }

    #[test]
    fn bases_rejects_large_modulus() {
        assert!(Bases::new(c(1.0, 0.0), c(0.2, 0.0)).is_err());
        assert!(Bases::new(c(0.8, 0.8), ZERO).is_err());
    }

    #[test]
    fn policy_cutoff_satisfies_tail_bound() {
        let pol = TruncationPolicy::new(1e-12, 4096).unwrap();
        for &m in &[0.1, 0.3, 0.5, 0.85] {
            let k = pol.cutoff(m);
            assert!(m.powi(k as i32) / (1.0 - m) < pol.tolerance);
        }
    }
}
