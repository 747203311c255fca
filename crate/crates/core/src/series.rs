//! Exact finite summation of the elliptic hypergeometric identities obtained
//! from the new A_n beta integral by residue calculus: the A_n-type sum, its
//! companion, the normalized integration kernel rho, and the multi-residue
//! closed forms rho_lambda.
//!
//! Summands are products of theta values and elliptic shifted factorials.
//! Magnitudes are tracked on a separate exponent (theta values can be
//! negative real, so no logarithm of a theta is ever taken; the
//! magnitude/phase split happens on the final product only).

use crate::elliptic::{gamma_fraction, theta, Bases, TruncationPolicy, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::quad::{kappa_a_composite, torus_average_indexed, IntegralEstimate, TorusGrid};

/// Hard cap on the number of lattice points in a summation box.
pub const MAX_BOX_TERMS: u64 = 100_000;

/// A denominator theta factor below this magnitude names itself instead of
/// poisoning the sum.
const DEGENERATE_EPS: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Parameter records
// ---------------------------------------------------------------------------

/// Parameters of the A_n-type summation: `s_1..s_{n+3}` and the box orders
/// `N_1..N_n`, with `S = s_1...s_{n+3}` and `S' = s_1...s_n` derived.
#[derive(Debug, Clone)]
pub struct SeriesParamsRos {
    pub n: usize,
    pub s: Vec<C64>,
    pub orders: Vec<u32>,
    pub bases: Bases,
}

impl SeriesParamsRos {
    pub fn new(n: usize, s: Vec<C64>, orders: Vec<u32>, bases: Bases) -> Result<Self> {
        if n == 0 || s.len() != n + 3 || orders.len() != n {
            return Err(Error::Domain(format!(
                "series parameters need n+3 s's and n orders, got n={n}, |s|={}, |N|={}",
                s.len(),
                orders.len()
            )));
        }
        check_box(&orders)?;
        Ok(SeriesParamsRos { n, s, orders, bases })
    }

    pub fn big_s(&self) -> C64 {
        self.s.iter().product()
    }

    pub fn small_s(&self) -> C64 {
        self.s[..self.n].iter().product()
    }
}

/// Parameters of the companion summation: `t_1..t_n`, `b_1..b_3`, orders
/// `N_1..N_n`, with `T = t_1...t_n` and `A = q T / (b_1 b_2 b_3)` derived.
#[derive(Debug, Clone)]
pub struct SeriesParamsEb {
    pub n: usize,
    pub t: Vec<C64>,
    pub b: [C64; 3],
    pub orders: Vec<u32>,
    pub bases: Bases,
}

impl SeriesParamsEb {
    pub fn new(n: usize, t: Vec<C64>, b: [C64; 3], orders: Vec<u32>, bases: Bases) -> Result<Self> {
        if n == 0 || t.len() != n || orders.len() != n {
            return Err(Error::Domain(format!(
                "series parameters need n t's and n orders, got n={n}, |t|={}, |N|={}",
                t.len(),
                orders.len()
            )));
        }
        check_box(&orders)?;
        Ok(SeriesParamsEb {
            n,
            t,
            b,
            orders,
            bases,
        })
    }

    pub fn big_t(&self) -> C64 {
        self.t.iter().product()
    }

    pub fn cap_a(&self) -> C64 {
        self.bases.q() * self.big_t() / (self.b[0] * self.b[1] * self.b[2])
    }
}

fn check_box(orders: &[u32]) -> Result<()> {
    let mut total: u64 = 1;
    for &ni in orders {
        total = total.saturating_mul(ni as u64 + 1);
    }
    if total > MAX_BOX_TERMS {
        return Err(Error::Domain(format!(
            "summation box has {total} terms, cap is {MAX_BOX_TERMS}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Scaled products of theta factors
// ---------------------------------------------------------------------------

/// `m * exp(e)` with `|m|` kept near one; multiplication never overflows.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    m: C64,
    e: f64,
}

impl Scaled {
    fn one() -> Self {
        Scaled { m: ONE, e: 0.0 }
    }

    fn normalize(&mut self) {
        let n = self.m.norm();
        if n > 0.0 && (n > 1e50 || n < 1e-50) {
            self.e += n.ln();
            self.m /= n;
        }
    }

    fn mul(&mut self, v: C64) {
        self.m *= v;
        self.normalize();
    }

    fn div(&mut self, v: C64) {
        self.m /= v;
        self.normalize();
    }

    fn value(&self) -> C64 {
        self.m * self.e.exp()
    }
}

/// Evaluation context carrying the degenerate-denominator bookkeeping.
struct Ctx<'a> {
    bases: &'a Bases,
    policy: &'a TruncationPolicy,
    lambda: Vec<u32>,
}

impl Ctx<'_> {
    fn theta(&self, v: C64) -> Result<C64> {
        theta(v, self.bases.p(), self.policy)
    }

    /// Elliptic shifted factorial `(a;q,p)_k`, `k >= 0`, as a plain product.
    fn poch(&self, acc: &mut Scaled, a: C64, k: u32) -> Result<()> {
        let mut arg = a;
        for _ in 0..k {
            acc.mul(self.theta(arg)?);
            arg *= self.bases.q();
        }
        Ok(())
    }

    fn theta_den(&self, acc: &mut Scaled, v: C64, label: &str) -> Result<()> {
        let th = self.theta(v)?;
        if th.norm() < DEGENERATE_EPS {
            return Err(Error::DegenerateDenominator {
                lambda: self.lambda.clone(),
                factor: label.to_string(),
            });
        }
        acc.div(th);
        Ok(())
    }

    fn poch_den(&self, acc: &mut Scaled, a: C64, k: u32, label: &str) -> Result<()> {
        let mut arg = a;
        for _ in 0..k {
            let th = self.theta(arg)?;
            if th.norm() < DEGENERATE_EPS {
                return Err(Error::DegenerateDenominator {
                    lambda: self.lambda.clone(),
                    factor: label.to_string(),
                });
            }
            acc.div(th);
            arg *= self.bases.q();
        }
        Ok(())
    }
}

fn pairwise_sum(vals: &[C64]) -> C64 {
    match vals.len() {
        0 => ZERO,
        1 => vals[0],
        n => {
            let (a, b) = vals.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Iterate the lattice box `0 <= lambda_i <= N_i`.
fn for_each_lambda<F: FnMut(&[u32]) -> Result<()>>(orders: &[u32], mut f: F) -> Result<()> {
    let n = orders.len();
    let mut lambda = vec![0u32; n];
    loop {
        f(&lambda)?;
        let mut d = 0;
        loop {
            if d == n {
                return Ok(());
            }
            lambda[d] += 1;
            if lambda[d] <= orders[d] {
                break;
            }
            lambda[d] = 0;
            d += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// A_n-type summation
// ---------------------------------------------------------------------------

fn ros_term(params: &SeriesParamsRos, lambda: &[u32], policy: &TruncationPolicy) -> Result<C64> {
    let n = params.n;
    let q = params.bases.q();
    let s = &params.s;
    let big_s = params.big_s();
    let small_s = params.small_s();
    let abs_l: u32 = lambda.iter().sum();
    let ctx = Ctx {
        bases: &params.bases,
        policy,
        lambda: lambda.to_vec(),
    };
    let mut acc = Scaled::one();
    for i in 0..n {
        acc.mul(ctx.theta(small_s * s[i] * q.powi((lambda[i] + abs_l) as i32))?);
        ctx.theta_den(&mut acc, small_s * s[i], "theta(S' s_i)")?;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            acc.mul(ctx.theta(q.powi(lambda[i] as i32 - lambda[j] as i32) * s[i] / s[j])?);
            ctx.theta_den(&mut acc, s[i] / s[j], "theta(s_i/s_j)")?;
            ctx.poch_den(
                &mut acc,
                q * s[i] * s[j] / big_s,
                lambda[i] + lambda[j],
                "(q s_i s_j / S)",
            )?;
        }
    }
    for sj in s.iter() {
        ctx.poch(&mut acc, small_s * sj, abs_l)?;
        for i in 0..n {
            ctx.poch_den(&mut acc, q * s[i] / sj, lambda[i], "(q s_i / s_j)")?;
        }
    }
    for i in 0..n {
        for j in 0..n {
            ctx.poch(&mut acc, q.powi(-(params.orders[j] as i32)) * s[i] / s[j], lambda[i])?;
            ctx.poch(
                &mut acc,
                q.powi(params.orders[j] as i32 + 1) * s[i] * s[j] / big_s,
                lambda[i],
            )?;
        }
    }
    for i in 0..n {
        acc.mul(q.powi(((i as u32 + 1) * lambda[i]) as i32));
        ctx.poch(&mut acc, big_s * small_s / s[i], abs_l - lambda[i])?;
        ctx.poch_den(
            &mut acc,
            q.powi(-(params.orders[i] as i32)) * big_s * small_s / s[i],
            abs_l,
            "(q^-N S S' / s_i)",
        )?;
        ctx.poch_den(
            &mut acc,
            q.powi(params.orders[i] as i32 + 1) * small_s * s[i],
            abs_l,
            "(q^{N+1} S' s_i)",
        )?;
    }
    Ok(acc.value())
}

/// A sum whose value collapses below this fraction of its largest term is
/// degenerate for a relative-error check in double precision.
const CANCELLATION_GUARD: f64 = 5e-2;

fn guarded_sum(terms: &[C64]) -> Result<C64> {
    let sum = pairwise_sum(terms);
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    if sum.norm() < CANCELLATION_GUARD * scale {
        return Err(Error::NearZeroDenominator(format!(
            "summation cancels to {:.1e} of its term scale {:.1e}",
            sum.norm() / scale.max(f64::MIN_POSITIVE),
            scale
        )));
    }
    Ok(sum)
}

pub fn ros_lhs(params: &SeriesParamsRos, policy: &TruncationPolicy) -> Result<C64> {
    let mut terms = Vec::new();
    for_each_lambda(&params.orders, |lambda| {
        terms.push(ros_term(params, lambda, policy)?);
        Ok(())
    })?;
    guarded_sum(&terms)
}

pub fn ros_rhs(params: &SeriesParamsRos, policy: &TruncationPolicy) -> Result<C64> {
    let n = params.n;
    let q = params.bases.q();
    let s = &params.s;
    let big_s = params.big_s();
    let small_s = params.small_s();
    let ctx = Ctx {
        bases: &params.bases,
        policy,
        lambda: Vec::new(),
    };
    let mut acc = Scaled::one();
    for i in 0..n {
        let ni = params.orders[i];
        ctx.poch(&mut acc, q * small_s * s[i], ni)?;
        ctx.poch_den(&mut acc, q * s[i] / (big_s * small_s), ni, "(q s_i / (S S'))")?;
        for sj in &s[n..] {
            ctx.poch(&mut acc, q * s[i] * sj / big_s, ni)?;
            ctx.poch_den(&mut acc, q * s[i] / sj, ni, "(q s_i / s_j)")?;
        }
    }
    Ok(acc.value())
}

// ---------------------------------------------------------------------------
// Companion summation
// ---------------------------------------------------------------------------

fn eb_term(params: &SeriesParamsEb, lambda: &[u32], policy: &TruncationPolicy) -> Result<C64> {
    let n = params.n;
    let q = params.bases.q();
    let t = &params.t;
    let big_t = params.big_t();
    let cap_a = params.cap_a();
    let abs_l: u32 = lambda.iter().sum();
    let abs_n: u32 = params.orders.iter().sum();
    let ctx = Ctx {
        bases: &params.bases,
        policy,
        lambda: lambda.to_vec(),
    };
    let mut acc = Scaled::one();
    for i in 0..n {
        acc.mul(ctx.theta(big_t * t[i] * q.powi((lambda[i] + abs_l) as i32))?);
        ctx.theta_den(&mut acc, big_t * t[i], "theta(T t_i)")?;
    }
    let shift = q.powi(1 - (abs_n as i32)) / cap_a;
    for i in 0..n {
        for j in (i + 1)..n {
            acc.mul(ctx.theta(q.powi(lambda[i] as i32 - lambda[j] as i32) * t[i] / t[j])?);
            ctx.theta_den(&mut acc, t[i] / t[j], "theta(t_i/t_j)")?;
            ctx.poch(&mut acc, shift * t[i] * t[j], lambda[i] + lambda[j])?;
        }
    }
    for i in 0..n {
        for j in 0..n {
            ctx.poch(&mut acc, q.powi(-(params.orders[j] as i32)) * t[i] / t[j], lambda[i])?;
            ctx.poch_den(&mut acc, q * t[i] / t[j], lambda[i], "(q t_i / t_j)")?;
            ctx.poch_den(&mut acc, shift * t[i] * t[j], lambda[i], "(q^{1-N} t_i t_j / A)")?;
        }
    }
    for bj in &params.b {
        for i in 0..n {
            ctx.poch(&mut acc, t[i] * bj, lambda[i])?;
        }
        ctx.poch_den(&mut acc, q * big_t / bj, abs_l, "(q T / b_j)")?;
    }
    for i in 0..n {
        acc.mul(q.powi(((i as u32 + 1) * lambda[i]) as i32));
        ctx.poch(&mut acc, big_t * t[i], abs_l)?;
        ctx.poch(&mut acc, q.powi(abs_n as i32) * cap_a * big_t / t[i], abs_l)?;
        ctx.poch_den(
            &mut acc,
            q.powi(params.orders[i] as i32 + 1) * big_t * t[i],
            abs_l,
            "(q^{N_i+1} T t_i)",
        )?;
        ctx.poch_den(
            &mut acc,
            q.powi(abs_n as i32) * cap_a * big_t / t[i],
            abs_l - lambda[i],
            "(q^N A T / t_i)",
        )?;
    }
    Ok(acc.value())
}

pub fn eb_lhs(params: &SeriesParamsEb, policy: &TruncationPolicy) -> Result<C64> {
    let mut terms = Vec::new();
    for_each_lambda(&params.orders, |lambda| {
        terms.push(eb_term(params, lambda, policy)?);
        Ok(())
    })?;
    guarded_sum(&terms)
}

pub fn eb_rhs(params: &SeriesParamsEb, policy: &TruncationPolicy) -> Result<C64> {
    let n = params.n;
    let q = params.bases.q();
    let t = &params.t;
    let big_t = params.big_t();
    let cap_a = params.cap_a();
    let abs_n: u32 = params.orders.iter().sum();
    let ctx = Ctx {
        bases: &params.bases,
        policy,
        lambda: Vec::new(),
    };
    let mut acc = Scaled::one();
    for i in 0..n {
        for j in 0..n {
            ctx.poch(&mut acc, cap_a / (t[i] * t[j]), abs_n - params.orders[i])?;
            ctx.poch_den(&mut acc, cap_a / (t[i] * t[j]), abs_n, "(A/(t_i t_j))_N")?;
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            ctx.poch(&mut acc, cap_a / (t[i] * t[j]), abs_n)?;
            ctx.poch_den(
                &mut acc,
                cap_a / (t[i] * t[j]),
                abs_n - params.orders[i] - params.orders[j],
                "(A/(t_i t_j))_{N-N_i-N_j}",
            )?;
        }
    }
    for i in 0..n {
        for bj in &params.b {
            ctx.poch(&mut acc, cap_a * bj / t[i], abs_n)?;
            ctx.poch_den(&mut acc, cap_a * bj / t[i], abs_n - params.orders[i], "(A b_j / t_i)")?;
        }
    }
    for i in 0..n {
        ctx.poch(&mut acc, q * big_t * t[i], params.orders[i])?;
    }
    for bj in &params.b {
        ctx.poch_den(&mut acc, q * big_t / bj, abs_n, "(q T / b_j)")?;
    }
    Ok(acc.value())
}

// ---------------------------------------------------------------------------
// Index reversal between the two summations
// ---------------------------------------------------------------------------

/// Companion parameters carried by the same residue data: `t_i = q^{-N_i}/s_i`
/// and `b_j = s_{n+j}`.
pub fn companion_of(params: &SeriesParamsRos) -> SeriesParamsEb {
    let q = params.bases.q();
    let t: Vec<C64> = params
        .s
        .iter()
        .take(params.n)
        .zip(&params.orders)
        .map(|(&si, &ni)| q.powi(-(ni as i32)) / si)
        .collect();
    let b = [params.s[params.n], params.s[params.n + 1], params.s[params.n + 2]];
    SeriesParamsEb {
        n: params.n,
        t,
        b,
        orders: params.orders.clone(),
        bases: params.bases,
    }
}

/// Max deviation from constancy of `eb_term(lambda) / ros_term(N - lambda)`
/// across the box, normalized by the ratio of the two closed forms. Zero
/// means the companion sum is the index-reversed original, term by term.
pub fn reversal_residual(params: &SeriesParamsRos, policy: &TruncationPolicy) -> Result<f64> {
    let eb = companion_of(params);
    let ros_closed = ros_rhs(params, policy)?;
    let eb_closed = eb_rhs(&eb, policy)?;
    let expected = eb_closed / ros_closed;
    let mut worst = 0f64;
    for_each_lambda(&params.orders, |lambda| {
        let reversed: Vec<u32> = lambda
            .iter()
            .zip(&params.orders)
            .map(|(&l, &ni)| ni - l)
            .collect();
        let e = eb_term(&eb, lambda, policy)?;
        let r = ros_term(params, &reversed, policy)?;
        let ratio = e / r / expected;
        worst = worst.max((ratio - ONE).norm());
        Ok(())
    })?;
    Ok(worst)
}

// ---------------------------------------------------------------------------
// The normalized integration kernel rho and its residue closed forms
// ---------------------------------------------------------------------------

use crate::beta::NewAnParams;

/// `rho(z; s, t)` for arbitrary parameter vectors (no admissibility demanded;
/// the q-difference checks probe it off the admissible set as well).
pub(crate) fn rho_eval(
    z: &[C64],
    s: &[C64],
    t: &[C64],
    bases: &Bases,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let n = t.len();
    if z.len() != n || s.len() != n + 3 {
        return Err(Error::ArityMismatch(format!(
            "rho expects n z's and n+3 s's for n = {n}, got {} and {}",
            z.len(),
            s.len()
        )));
    }
    let big_s: C64 = s.iter().product();
    let mut ze = z.to_vec();
    ze.push(ONE / z.iter().product::<C64>());
    let mut num = Vec::new();
    let mut den = Vec::new();
    for zj in &ze {
        for &ti in t {
            num.push(ti * zj);
            den.push(big_s * ti / zj);
        }
        for &si in s {
            num.push(si / zj);
        }
    }
    for i in 0..=n {
        for j in (i + 1)..=n {
            num.push(big_s / (ze[i] * ze[j]));
            den.push(ze[i] / ze[j]);
            den.push(ze[j] / ze[i]);
        }
    }
    // closed-form normalization
    for &ti in t {
        for &sj in s {
            num.push(big_s * ti / sj);
            den.push(ti * sj);
        }
    }
    let m = s.len();
    for i in 0..m {
        for j in (i + 1)..m {
            den.push(big_s / (s[i] * s[j]));
        }
    }
    gamma_fraction(&num, &den, bases, policy)
}

/// The kernel `rho(z; s, t)`: the new-A_n integrand times the reciprocal of
/// its closed-form evaluation, so that `kappa_A \oint rho dz/z = 1`.
pub fn rho_kernel(z: &[C64], params: &NewAnParams, policy: &TruncationPolicy) -> Result<C64> {
    rho_eval(z, &params.s, &params.t, &params.bases, policy)
}

/// `kappa_A \oint_{T^n} rho(z; s, t) dz/z` by direct quadrature; equal to one
/// for admissible parameters.
pub fn rho_integral(
    params: &NewAnParams,
    grid: &TorusGrid,
    policy: &TruncationPolicy,
) -> Result<IntegralEstimate> {
    let n = params.n;
    if grid.dims() != n {
        return Err(Error::Domain(format!(
            "grid dimension {} does not match n = {n}",
            grid.dims()
        )));
    }
    let kappa = kappa_a_composite(n, &params.bases, policy)?;
    let nodes = grid.nodes().to_vec();
    let mut est = torus_average_indexed(
        |idx| {
            let z: Vec<C64> = idx.iter().map(|&k| nodes[k]).collect();
            match rho_kernel(&z, params, policy) {
                Ok(v) => v,
                Err(_) => C64::new(f64::NAN, f64::NAN),
            }
        },
        grid,
    )?;
    est.value *= kappa;
    est.error_estimate *= kappa.norm();
    Ok(est)
}

/// The multi-residue closed form `rho_lambda(s, t)` times `kappa_A` (the
/// display carries an explicit `1/kappa_A`, so this product is the pure
/// theta-factor part; it is what every consistency statement uses).
pub fn rho_lambda_normalized(
    lambda: &[u32],
    s: &[C64],
    t: &[C64],
    bases: &Bases,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let n = t.len();
    if s.len() != n + 3 || lambda.len() != n {
        return Err(Error::ArityMismatch(format!(
            "rho_lambda expects n+3 s's and n lambdas for n = {n}"
        )));
    }
    let q = bases.q();
    let big_s: C64 = s.iter().product();
    let small_s: C64 = s[..n].iter().product();
    let abs_l: u32 = lambda.iter().sum();

    // gamma prefactor
    let mut num = Vec::new();
    let mut den = Vec::new();
    for i in 0..n {
        num.push(t[i] / small_s);
        num.push(big_s * small_s / s[i]);
        den.push(ONE / (small_s * s[i]));
        den.push(big_s * small_s * t[i]);
        for sj in &s[n..] {
            num.push(big_s * t[i] / sj);
            num.push(sj / s[i]);
            den.push(big_s / (s[i] * sj));
            den.push(t[i] * sj);
        }
    }
    let prefactor = gamma_fraction(&num, &den, bases, policy)?;

    let ctx = Ctx {
        bases,
        policy,
        lambda: lambda.to_vec(),
    };
    let mut acc = Scaled::one();
    acc.mul(prefactor);
    for i in 0..n {
        acc.mul(ctx.theta(small_s * s[i] * q.powi((lambda[i] + abs_l) as i32))?);
        ctx.theta_den(&mut acc, small_s * s[i], "theta(S' s_i)")?;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            acc.mul(ctx.theta(q.powi(lambda[i] as i32 - lambda[j] as i32) * s[i] / s[j])?);
            ctx.theta_den(&mut acc, s[i] / s[j], "theta(s_i/s_j)")?;
            ctx.poch_den(
                &mut acc,
                q * s[i] * s[j] / big_s,
                lambda[i] + lambda[j],
                "(q s_i s_j / S)",
            )?;
        }
    }
    for sj in s.iter() {
        ctx.poch(&mut acc, small_s * sj, abs_l)?;
        for i in 0..n {
            ctx.poch_den(&mut acc, q * s[i] / sj, lambda[i], "(q s_i / s_j)")?;
        }
    }
    for i in 0..n {
        for j in 0..n {
            ctx.poch(&mut acc, s[i] * t[j], lambda[i])?;
            ctx.poch(&mut acc, q * s[i] / (big_s * t[j]), lambda[i])?;
        }
    }
    for i in 0..n {
        acc.mul(q.powi(((i as u32 + 1) * lambda[i]) as i32));
        ctx.poch(&mut acc, big_s * small_s / s[i], abs_l - lambda[i])?;
        ctx.poch_den(&mut acc, big_s * small_s * t[i], abs_l, "(S S' t_i)")?;
        ctx.poch_den(&mut acc, q * small_s / t[i], abs_l, "(q S' / t_i)")?;
    }
    Ok(acc.value())
}

/// The displayed closed form itself, `rho_lambda = (1/kappa_A) * [...]`.
pub fn rho_lambda(
    lambda: &[u32],
    s: &[C64],
    t: &[C64],
    bases: &Bases,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let n = t.len();
    let kappa = crate::quad::kappa_constants(n, bases, policy)?.kappa_a;
    Ok(rho_lambda_normalized(lambda, s, t, bases, policy)? / kappa)
}

/// `sum_lambda kappa_A rho_lambda(s, t)` at `t_i = q^{-N_i} / s_i`; equal to
/// one by the residue expansion of the unit integral.
pub fn rho_lambda_sum_at_residue_point(
    s: &[C64],
    orders: &[u32],
    bases: &Bases,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let n = orders.len();
    if s.len() != n + 3 {
        return Err(Error::ArityMismatch("need n+3 s parameters".into()));
    }
    let q = bases.q();
    let t: Vec<C64> = s
        .iter()
        .take(n)
        .zip(orders)
        .map(|(&si, &ni)| q.powi(-(ni as i32)) / si)
        .collect();
    let mut terms = Vec::new();
    for_each_lambda(orders, |lambda| {
        terms.push(rho_lambda_normalized(lambda, s, &t, bases, policy)?);
        Ok(())
    })?;
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn bases() -> Bases {
        Bases::new(c(0.15, 0.05), c(0.2, -0.1)).unwrap()
    }

    #[test]
    fn ros_empty_box_is_trivial() {
        let pol = TruncationPolicy::default();
        let s = vec![c(0.5, 0.1), c(0.4, -0.2), c(0.6, 0.0), c(0.3, 0.2)];
        let params = SeriesParamsRos::new(1, s, vec![0], bases()).unwrap();
        let lhs = ros_lhs(&params, &pol).unwrap();
        let rhs = ros_rhs(&params, &pol).unwrap();
        assert!((lhs - ONE).norm() < 1e-14);
        assert!((rhs - ONE).norm() < 1e-14);
    }

    #[test]
    fn ros_n1_single_order() {
        let pol = TruncationPolicy::new(1e-13, 4096).unwrap();
        let s = vec![c(0.5, 0.1), c(0.4, -0.2), c(0.6, 0.0), c(0.3, 0.2)];
        let params = SeriesParamsRos::new(1, s, vec![1], bases()).unwrap();
        let lhs = ros_lhs(&params, &pol).unwrap();
        let rhs = ros_rhs(&params, &pol).unwrap();
        let rel = (lhs - rhs).norm() / rhs.norm();
        assert!(rel < 1e-12, "rel {rel:.3e} lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn eb_empty_box_matches_rhs() {
        let pol = TruncationPolicy::new(1e-13, 4096).unwrap();
        let params = SeriesParamsEb::new(
            2,
            vec![c(0.7, 0.1), c(0.5, -0.3)],
            [c(0.4, 0.0), c(0.3, 0.15), c(0.5, -0.1)],
            vec![0, 0],
            bases(),
        )
        .unwrap();
        let lhs = eb_lhs(&params, &pol).unwrap();
        let rhs = eb_rhs(&params, &pol).unwrap();
        let rel = (lhs - rhs).norm() / rhs.norm();
        assert!(rel < 1e-12, "rel {rel:.3e}");
    }

    #[test]
    fn eb_n2_identity() {
        let pol = TruncationPolicy::new(1e-13, 4096).unwrap();
        let params = SeriesParamsEb::new(
            2,
            vec![c(0.7, 0.1), c(0.5, -0.3)],
            [c(0.4, 0.0), c(0.3, 0.15), c(0.5, -0.1)],
            vec![1, 1],
            bases(),
        )
        .unwrap();
        let lhs = eb_lhs(&params, &pol).unwrap();
        let rhs = eb_rhs(&params, &pol).unwrap();
        let rel = (lhs - rhs).norm() / rhs.norm();
        assert!(rel < 1e-12, "rel {rel:.3e} lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn box_cap_is_enforced() {
        let err = SeriesParamsRos::new(
            3,
            vec![ONE; 6],
            vec![100, 100, 100],
            bases(),
        );
        assert!(err.is_err());
    }
}
