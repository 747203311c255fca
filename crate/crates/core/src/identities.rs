//! Pointwise verification of the theta-function identities and q-difference
//! relations that drive the alternative proof of the new A_n integral: two
//! addition-type theta identities and their n-variable generalization, the
//! A_n and C-type elliptic partial fraction expansions, the q-difference
//! lemma for the kernel rho, and the contiguous relation satisfied by the
//! closed form.
//!
//! Everything here is checked pointwise in all free variables; denominators
//! within 1e-3 of a theta zero raise [`Error::NearZeroDenominator`] instead
//! of degrading the residual silently.

use crate::elliptic::{theta, Bases, TruncationPolicy, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::series::rho_eval;

/// Denominator theta values below this magnitude abort the check.
const THETA_DEN_EPS: f64 = 1e-3;

/// One identity instance: the free parameters with any balancing constraint
/// already solved (derived quantities are recomputed on demand).
#[derive(Debug, Clone)]
pub enum ThetaIdentityCase {
    /// Sum with the `theta(S t_1^2)` prefactor; `z` holds the n free torus
    /// components (the (n+1)-st is derived), `s` the n+3 spectators.
    Theta1 {
        z: Vec<C64>,
        s: Vec<C64>,
        t1: C64,
        bases: Bases,
    },
    /// The t-dependent sum equal to one; `t` holds `t_2..t_n`.
    Theta2 {
        z: Vec<C64>,
        t: Vec<C64>,
        big_s: C64,
        bases: Bases,
    },
    /// The n-variable generalization with `B z_1..z_n = b_1..b_{n+2}`
    /// (B derived).
    Theta3 {
        z: Vec<C64>,
        b: Vec<C64>,
        a: C64,
        bases: Bases,
    },
    /// A_n elliptic partial fraction with `A z_1..z_n = a_1..a_{n+1}`
    /// (A derived).
    AnPartialFraction {
        z: Vec<C64>,
        a: Vec<C64>,
        bases: Bases,
    },
    /// C-type elliptic partial fraction (no balancing).
    CPartialFraction {
        z: Vec<C64>,
        b: Vec<C64>,
        a: C64,
        bases: Bases,
    },
    /// q-difference relation for the kernel rho.
    QdiffLemma {
        z: Vec<C64>,
        s: Vec<C64>,
        t: Vec<C64>,
        bases: Bases,
    },
    /// Contiguous relation for the closed form of the new A_n integral.
    ContiguousI {
        s: Vec<C64>,
        t: Vec<C64>,
        bases: Bases,
    },
}

impl ThetaIdentityCase {
    pub fn identity_name(&self) -> &'static str {
        match self {
            ThetaIdentityCase::Theta1 { .. } => "theta1",
            ThetaIdentityCase::Theta2 { .. } => "theta2",
            ThetaIdentityCase::Theta3 { .. } => "theta3",
            ThetaIdentityCase::AnPartialFraction { .. } => "an_pf",
            ThetaIdentityCase::CPartialFraction { .. } => "c_pf",
            ThetaIdentityCase::QdiffLemma { .. } => "qdiff",
            ThetaIdentityCase::ContiguousI { .. } => "contiguous",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ThetaIdentityCase::Theta1 { z, .. }
            | ThetaIdentityCase::Theta2 { z, .. }
            | ThetaIdentityCase::Theta3 { z, .. }
            | ThetaIdentityCase::AnPartialFraction { z, .. }
            | ThetaIdentityCase::CPartialFraction { z, .. }
            | ThetaIdentityCase::QdiffLemma { z, .. } => z.len(),
            ThetaIdentityCase::ContiguousI { t, .. } => t.len(),
        }
    }

    pub fn bases(&self) -> &Bases {
        match self {
            ThetaIdentityCase::Theta1 { bases, .. }
            | ThetaIdentityCase::Theta2 { bases, .. }
            | ThetaIdentityCase::Theta3 { bases, .. }
            | ThetaIdentityCase::AnPartialFraction { bases, .. }
            | ThetaIdentityCase::CPartialFraction { bases, .. }
            | ThetaIdentityCase::QdiffLemma { bases, .. }
            | ThetaIdentityCase::ContiguousI { bases, .. } => bases,
        }
    }

    /// Free parameters, for report serialization.
    pub fn fields(&self) -> Vec<(String, C64)> {
        let mut out = Vec::new();
        let push_vec = |name: &str, vals: &[C64], out: &mut Vec<(String, C64)>| {
            for (i, &v) in vals.iter().enumerate() {
                out.push((format!("{name}_{}", i + 1), v));
            }
        };
        match self {
            ThetaIdentityCase::Theta1 { z, s, t1, .. } => {
                push_vec("z", z, &mut out);
                push_vec("s", s, &mut out);
                out.push(("t_1".into(), *t1));
            }
            ThetaIdentityCase::Theta2 { z, t, big_s, .. } => {
                push_vec("z", z, &mut out);
                push_vec("t", t, &mut out);
                out.push(("S".into(), *big_s));
            }
            ThetaIdentityCase::Theta3 { z, b, a, .. } => {
                push_vec("z", z, &mut out);
                push_vec("b", b, &mut out);
                out.push(("a".into(), *a));
            }
            ThetaIdentityCase::AnPartialFraction { z, a, .. } => {
                push_vec("z", z, &mut out);
                push_vec("a", a, &mut out);
            }
            ThetaIdentityCase::CPartialFraction { z, b, a, .. } => {
                push_vec("z", z, &mut out);
                push_vec("b", b, &mut out);
                out.push(("a".into(), *a));
            }
            ThetaIdentityCase::QdiffLemma { z, s, t, .. } => {
                push_vec("z", z, &mut out);
                push_vec("s", s, &mut out);
                push_vec("t", t, &mut out);
            }
            ThetaIdentityCase::ContiguousI { s, t, .. } => {
                push_vec("s", s, &mut out);
                push_vec("t", t, &mut out);
            }
        }
        out
    }
}

struct Th<'a> {
    p: C64,
    policy: &'a TruncationPolicy,
}

impl Th<'_> {
    fn num(&self, v: C64) -> Result<C64> {
        theta(v, self.p, self.policy)
    }

    fn den(&self, v: C64, label: &str) -> Result<C64> {
        let th = theta(v, self.p, self.policy)?;
        if th.norm() < THETA_DEN_EPS {
            return Err(Error::NearZeroDenominator(format!(
                "{label} = theta({v}) = {th}"
            )));
        }
        Ok(th)
    }
}

fn extend(z: &[C64]) -> Vec<C64> {
    let mut out = z.to_vec();
    out.push(ONE / z.iter().product::<C64>());
    out
}

fn residual(lhs: C64, rhs: C64) -> f64 {
    (lhs - rhs).norm() / (lhs.norm() + rhs.norm() + 1e-300)
}

/// Evaluate both sides of the case's identity and return
/// `|L - R| / (|L| + |R|)`.
pub fn check_identity(case: &ThetaIdentityCase, policy: &TruncationPolicy) -> Result<f64> {
    let (lhs, rhs) = evaluate_sides(case, policy)?;
    Ok(residual(lhs, rhs))
}

/// Both sides of the identity (exposed for reports).
pub fn evaluate_sides(case: &ThetaIdentityCase, policy: &TruncationPolicy) -> Result<(C64, C64)> {
    let th = Th {
        p: case.bases().p(),
        policy,
    };
    match case {
        ThetaIdentityCase::Theta1 { z, s, t1, bases } => {
            let ze = extend(z);
            let n1 = ze.len();
            let big_s: C64 = s.iter().product();
            let mut lhs = ZERO;
            for i in 0..n1 {
                let mut term = *t1 * ze[i] * th.num(big_s * t1 * t1)?;
                term /= th.den(big_s * t1 / ze[i], "theta(S t_1 / z_i)")?;
                for &sj in s {
                    term *= th.num(sj / ze[i])?;
                    term /= th.den(*t1 * sj, "theta(t_1 s_j)")?;
                }
                for (j, &zj) in ze.iter().enumerate() {
                    if j != i {
                        term *= th.num(*t1 * zj)?;
                        term /= th.den(zj / ze[i], "theta(z_j / z_i)")?;
                    }
                }
                lhs += term;
            }
            let mut prod = ONE;
            for &zi in &ze {
                prod *= th.num(*t1 * zi)?;
                prod /= th.den(big_s * t1 / zi, "theta(S t_1 / z_i)")?;
            }
            for &sj in s {
                prod *= th.num(big_s * t1 / sj)?;
                prod /= th.den(*t1 * sj, "theta(t_1 s_j)")?;
            }
            let _ = bases;
            Ok((lhs, ONE - prod))
        }
        ThetaIdentityCase::Theta2 {
            z,
            t,
            big_s,
            bases,
        } => {
            let q = bases.q();
            let ze = extend(z);
            let n = z.len();
            let z_last = ze[n];
            let mut lhs = ZERO;
            for i in 0..n {
                let mut term = ONE;
                for &tj in t {
                    term *= th.num(tj * ze[i])? * th.num(*big_s * tj / (q * ze[i]))?;
                    term /= th.den(tj * z_last / q, "theta(t_j z_{n+1} / q)")?;
                    term /= th.den(*big_s * tj / z_last, "theta(S t_j / z_{n+1})")?;
                }
                for j in 0..n {
                    if j != i {
                        term *= th.num(z_last / (q * ze[j]))? * th.num(*big_s / (ze[j] * z_last))?;
                        term /= th.den(ze[i] / ze[j], "theta(z_i / z_j)")?;
                        term /= th.den(*big_s / (q * ze[i] * ze[j]), "theta(S/(q z_i z_j))")?;
                    }
                }
                lhs += term;
            }
            Ok((lhs, ONE))
        }
        ThetaIdentityCase::Theta3 { z, b, a, bases } => {
            let n = z.len();
            let z_prod: C64 = z.iter().product();
            let b_prod: C64 = b.iter().product();
            let big_b = b_prod / z_prod;
            let _ = bases;
            let mut lhs = ZERO;
            for i in 0..n {
                let mut term = *a * z[i] * th.num(big_b * a * a)?;
                term /= th.den(big_b * a / z[i], "theta(B a / z_i)")?;
                for &bj in b {
                    term *= th.num(bj / z[i])?;
                    term /= th.den(*a * bj, "theta(a b_j)")?;
                }
                for (j, &zj) in z.iter().enumerate() {
                    if j != i {
                        term *= th.num(*a * zj)?;
                        term /= th.den(zj / z[i], "theta(z_j / z_i)")?;
                    }
                }
                lhs += term;
            }
            let mut prod = ONE;
            for &zi in z {
                prod *= th.num(*a * zi)?;
                prod /= th.den(big_b * a / zi, "theta(B a / z_i)")?;
            }
            for &bj in b {
                prod *= th.num(big_b * a / bj)?;
                prod /= th.den(*a * bj, "theta(a b_j)")?;
            }
            Ok((lhs, ONE - prod))
        }
        ThetaIdentityCase::AnPartialFraction { z, a, bases } => {
            let n = z.len();
            let big_a = a.iter().product::<C64>() / z.iter().product::<C64>();
            let _ = bases;
            let mut lhs = ZERO;
            for i in 0..n {
                let mut term = ONE;
                for &aj in a {
                    term *= th.num(aj / z[i])?;
                    term /= th.den(big_a / aj, "theta(A / a_j)")?;
                }
                for (j, &zj) in z.iter().enumerate() {
                    if j != i {
                        term *= th.num(big_a / zj)?;
                        term /= th.den(zj / z[i], "theta(z_j / z_i)")?;
                    }
                }
                lhs += term;
            }
            Ok((lhs, ONE))
        }
        ThetaIdentityCase::CPartialFraction { z, b, a, bases } => {
            let n = z.len();
            let _ = bases;
            let mut lhs = ZERO;
            for i in 0..n {
                let mut term = ONE;
                for &bj in b {
                    term *= th.num(bj * z[i])? * th.num(bj / z[i])?;
                    term /= th.den(*a * bj, "theta(a b_j)")?;
                    term /= th.den(bj / *a, "theta(b_j / a)")?;
                }
                for (j, &zj) in z.iter().enumerate() {
                    if j != i {
                        term *= th.num(*a * zj)? * th.num(zj / *a)?;
                        term /= th.den(zj / z[i], "theta(z_j / z_i)")?;
                        term /= th.den(z[i] * zj, "theta(z_i z_j)")?;
                    }
                }
                lhs += term;
            }
            Ok((lhs, ONE))
        }
        ThetaIdentityCase::QdiffLemma { z, s, t, bases } => {
            let q = bases.q();
            let n = z.len();
            let rho = rho_eval(z, s, t, bases, policy)?;
            let mut t_shift = t.clone();
            t_shift[0] *= q;
            let rho_shift = rho_eval(z, s, &t_shift, bases, policy)?;
            let lhs = rho - rho_shift;
            let mut rhs = ZERO;
            let mut scale = rho.norm().max(rho_shift.norm());
            for i in 0..n {
                let g_here = rho * f_factor(i, z, s, t, bases, &th)?;
                let mut z_shift = z.to_vec();
                z_shift[i] /= q;
                let rho_z = rho_eval(&z_shift, s, t, bases, policy)?;
                let g_shift = rho_z * f_factor(i, &z_shift, s, t, bases, &th)?;
                scale = scale.max(g_here.norm()).max(g_shift.norm());
                rhs += g_here - g_shift;
            }
            // Both sides are alternating sums of the tracked terms; when they
            // cancel past two decades the relative residual only measures
            // roundoff, so the point is degenerate for this metric.
            if lhs.norm() + rhs.norm() < 1e-2 * scale {
                return Err(Error::NearZeroDenominator(format!(
                    "q-difference cancels to {:.1e} of the term scale {:.1e}",
                    (lhs.norm() + rhs.norm()) / scale.max(f64::MIN_POSITIVE),
                    scale
                )));
            }
            Ok((lhs, rhs))
        }
        ThetaIdentityCase::ContiguousI { s, t, bases } => {
            let q = bases.q();
            let n1 = s.len() - 2; // = n + 1
            let big_s: C64 = s.iter().product();
            let s_n2 = s[s.len() - 2];
            let s_n3 = s[s.len() - 1];
            let rhs = contiguous_closed_form(s, t, bases, policy)?;
            let mut lhs = ZERO;
            for i in 0..n1 {
                let mut coeff = th.num(big_s / (q * s[i] * s_n2))?;
                coeff /= th.den(big_s / (s_n2 * s_n3), "theta(S/(s_{n+2} s_{n+3}))")?;
                for (j, &sj) in s.iter().take(n1).enumerate() {
                    if j != i {
                        coeff *= th.num(s_n3 / (q * sj))?;
                        coeff /= th.den(s[i] / sj, "theta(s_i / s_j)")?;
                    }
                }
                let mut shifted = s.clone();
                shifted[i] *= q;
                let last = shifted.len() - 1;
                shifted[last] /= q;
                lhs += coeff * contiguous_closed_form(&shifted, t, bases, policy)?;
            }
            Ok((lhs, rhs))
        }
    }
}

/// The multiplier `f_i(z; s, t)` of the q-difference relation.
fn f_factor(
    i: usize,
    z: &[C64],
    s: &[C64],
    t: &[C64],
    bases: &Bases,
    th: &Th<'_>,
) -> Result<C64> {
    let q = bases.q();
    let n = z.len();
    let ze = extend(z);
    let z_last = ze[n];
    let big_s: C64 = s.iter().product();
    let mut acc = t[0] * z_last * th.num(big_s * t[0] * t[0])?;
    for j in 0..n {
        acc *= th.num(t[0] * ze[j])?;
        acc /= th.den(ze[j] / z_last, "theta(z_j / z_{n+1})")?;
        acc /= th.den(big_s * t[j] / z_last, "theta(S t_j / z_{n+1})")?;
    }
    for &tj in &t[1..] {
        acc *= th.num(tj * ze[i])? * th.num(big_s * tj / (q * ze[i]))?;
        acc /= th.den(tj * z_last / q, "theta(t_j z_{n+1} / q)")?;
    }
    for &sj in s {
        acc *= th.num(sj / z_last)?;
        acc /= th.den(t[0] * sj, "theta(t_1 s_j)")?;
    }
    for j in 0..n {
        if j != i {
            acc *= th.num(z_last / (q * ze[j]))? * th.num(big_s / (ze[j] * z_last))?;
            acc /= th.den(ze[i] / ze[j], "theta(z_i / z_j)")?;
            acc /= th.den(big_s / (q * ze[i] * ze[j]), "theta(S / (q z_i z_j))")?;
        }
    }
    Ok(acc)
}

/// The s-dependent part of the closed form of the new A_n integral (the
/// constant prefactor drops out of the contiguous relation).
fn contiguous_closed_form(
    s: &[C64],
    t: &[C64],
    bases: &Bases,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let big_s: C64 = s.iter().product();
    let mut num = Vec::new();
    let mut den = Vec::new();
    for &ti in t {
        for &sj in s {
            num.push(ti * sj);
            den.push(big_s * ti / sj);
        }
    }
    for i in 0..s.len() {
        for j in (i + 1)..s.len() {
            num.push(big_s / (s[i] * s[j]));
        }
    }
    crate::elliptic::gamma_fraction(&num, &den, bases, policy)
}

/// Identity selector for batch sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaIdentityKind {
    Theta1,
    Theta2,
    Theta3,
    AnPartialFraction,
    CPartialFraction,
    QdiffLemma,
    ContiguousI,
}

impl ThetaIdentityKind {
    pub fn name(&self) -> &'static str {
        match self {
            ThetaIdentityKind::Theta1 => "theta1",
            ThetaIdentityKind::Theta2 => "theta2",
            ThetaIdentityKind::Theta3 => "theta3",
            ThetaIdentityKind::AnPartialFraction => "an_pf",
            ThetaIdentityKind::CPartialFraction => "c_pf",
            ThetaIdentityKind::QdiffLemma => "qdiff",
            ThetaIdentityKind::ContiguousI => "contiguous",
        }
    }

    fn param_kind(&self, n: usize) -> crate::sample::ParamKind {
        use crate::sample::ParamKind as K;
        match self {
            ThetaIdentityKind::Theta1 => K::Theta1 { n },
            ThetaIdentityKind::Theta2 => K::Theta2 { n },
            ThetaIdentityKind::Theta3 => K::Theta3 { n },
            ThetaIdentityKind::AnPartialFraction => K::AnPartialFraction { n },
            ThetaIdentityKind::CPartialFraction => K::CPartialFraction { n },
            ThetaIdentityKind::QdiffLemma => K::QdiffLemma { n },
            ThetaIdentityKind::ContiguousI => K::ContiguousI { n },
        }
    }
}

/// Result of a deterministic batch of pointwise checks.
#[derive(Debug, Clone)]
pub struct SweepSummary {
    pub reports: Vec<crate::report::VerificationReport>,
    pub max_residual: f64,
    /// Parameters attaining the max residual.
    pub argmax: Vec<(String, C64)>,
}

/// Deterministic batch of [`check_identity`] calls: sample index `i` uses
/// dimension `1 + (i mod n_max)` and stream seed `seed + i`.
pub fn sweep(
    identity: ThetaIdentityKind,
    n_max: usize,
    samples: usize,
    seed: u64,
    modulus_cap: f64,
    m_cap: f64,
    threshold: f64,
    policy: &TruncationPolicy,
) -> Result<SweepSummary> {
    let mut reports = Vec::with_capacity(samples);
    let mut max_residual = 0f64;
    let mut argmax = Vec::new();
    for i in 0..samples {
        let n = 1 + (i % n_max.max(1));
        let kind = identity.param_kind(n);
        let ps = crate::sample::sample_params(&kind, seed.wrapping_add(i as u64), modulus_cap, m_cap)?;
        let case = match &ps {
            crate::sample::ParameterSet::Theta(case) => case,
            _ => unreachable!("theta kinds sample theta cases"),
        };
        let (lhs, rhs) = evaluate_sides(case, policy)?;
        let res = residual(lhs, rhs);
        if res > max_residual {
            max_residual = res;
            argmax = ps.fields();
        }
        let report = crate::report::VerificationReport::new(
            format!("{}[n={n}]", identity.name()),
            ps.fields(),
            lhs,
            rhs,
            crate::report::GridMeta::Pointwise { points: 1 },
        )
        .with_truncation(policy.tolerance, policy.cutoff(case.bases().big_m()))
        .judged(threshold);
        reports.push(report);
    }
    Ok(SweepSummary {
        reports,
        max_residual,
        argmax,
    })
}

/// Periodicity probe for the n-variable theta identity: the difference of the
/// two sides is invariant under `a -> p a`.
pub fn theta3_periodicity_residual(
    case: &ThetaIdentityCase,
    policy: &TruncationPolicy,
) -> Result<f64> {
    if let ThetaIdentityCase::Theta3 { z, b, a, bases } = case {
        let (l0, r0) = evaluate_sides(case, policy)?;
        let moved = ThetaIdentityCase::Theta3 {
            z: z.clone(),
            b: b.clone(),
            a: *a * bases.p(),
            bases: *bases,
        };
        let (l1, r1) = evaluate_sides(&moved, policy)?;
        let f0 = l0 - r0;
        let f1 = l1 - r1;
        Ok((f1 - f0).norm() / (l0.norm() + r0.norm() + 1e-300))
    } else {
        Err(Error::Domain("periodicity probe is specific to theta3".into()))
    }
}
