//! Deterministic admissible-parameter samplers.
//!
//! Each draw fixes the bases with `max(|p|,|q|) <= m_cap`, draws every free
//! parameter with uniform phase and log-uniform modulus in
//! `[0.2, modulus_cap]`, solves the balancing constraint for the last
//! parameter where the identity has one, and rejects-and-redraws (bounded)
//! until the parameter record passes its invariants, its pole-clearance
//! preflight, and a trial evaluation of the cheap side. The stream is a
//! counter-mode generator keyed on `(kind, seed)`, so a draw is reproducible
//! across platforms and runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use crate::beta::{
    AnBetaParams, CnBetaParams, NewAnParams, UnivariateBetaParams, UnivariateForm,
};
use crate::elliptic::{Bases, TruncationPolicy, C64, ZERO};
use crate::error::{Error, Result};
use crate::identities::{check_identity, ThetaIdentityCase};
use crate::inversion::{bailey_admissible, SymmetricFunction};

use crate::series::{eb_rhs, ros_rhs, SeriesParamsEb, SeriesParamsRos};

pub const MAX_REJECTIONS: u32 = 1000;

/// Which identity-family parameter record to draw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamKind {
    Univariate,
    An { n: usize },
    Cn { n: usize },
    NewAn { n: usize },
    NewAnQLimit { n: usize },
    Ros { n: usize, orders: Vec<u32> },
    Eb { n: usize, orders: Vec<u32> },
    InversionN1 { tag: FunctionTag },
    BaileyN1,
    Theta1 { n: usize },
    Theta2 { n: usize },
    Theta3 { n: usize },
    AnPartialFraction { n: usize },
    CPartialFraction { n: usize },
    QdiffLemma { n: usize },
    ContiguousI { n: usize },
}

/// Test-function tags for the n = 1 inversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionTag {
    Constant,
    LaurentSymmetric,
    NewPair,
}

impl ParamKind {
    fn tag(&self) -> u64 {
        match self {
            ParamKind::Univariate => 1,
            ParamKind::An { n } => 2 + 16 * *n as u64,
            ParamKind::Cn { n } => 3 + 16 * *n as u64,
            ParamKind::NewAn { n } => 4 + 16 * *n as u64,
            ParamKind::NewAnQLimit { n } => 5 + 16 * *n as u64,
            ParamKind::Ros { n, .. } => 6 + 16 * *n as u64,
            ParamKind::Eb { n, .. } => 7 + 16 * *n as u64,
            ParamKind::InversionN1 { tag } => {
                8 + 16 * match tag {
                    FunctionTag::Constant => 0u64,
                    FunctionTag::LaurentSymmetric => 1,
                    FunctionTag::NewPair => 2,
                }
            }
            ParamKind::BaileyN1 => 9,
            ParamKind::Theta1 { n } => 10 + 16 * *n as u64,
            ParamKind::Theta2 { n } => 11 + 16 * *n as u64,
            ParamKind::Theta3 { n } => 12 + 16 * *n as u64,
            ParamKind::AnPartialFraction { n } => 13 + 16 * *n as u64,
            ParamKind::CPartialFraction { n } => 14 + 16 * *n as u64,
            ParamKind::QdiffLemma { n } => 15 + 16 * *n as u64,
            ParamKind::ContiguousI { n } => 16 * (*n as u64 + 1),
        }
    }
}

/// A sampled parameter record for one identity family.
#[derive(Debug, Clone)]
pub enum ParameterSet {
    Univariate(UnivariateBetaParams),
    An(AnBetaParams),
    Cn(CnBetaParams),
    NewAn(NewAnParams),
    Ros(SeriesParamsRos),
    Eb(SeriesParamsEb),
    InversionN1(InversionSample),
    BaileyN1(BaileySample),
    Theta(ThetaIdentityCase),
}

#[derive(Debug, Clone)]
pub struct InversionSample {
    pub f: SymmetricFunction,
    pub x: C64,
    pub t: C64,
    pub bases: Bases,
}

#[derive(Debug, Clone)]
pub struct BaileySample {
    pub s: [C64; 3],
    pub t: C64,
    pub bases: Bases,
}

impl ParameterSet {
    /// Flat key/value view for report serialization.
    pub fn fields(&self) -> Vec<(String, C64)> {
        fn push(out: &mut Vec<(String, C64)>, name: &str, vals: &[C64]) {
            for (i, &v) in vals.iter().enumerate() {
                out.push((format!("{name}_{}", i + 1), v));
            }
        }
        let mut out = Vec::new();
        match self {
            ParameterSet::Univariate(p) => {
                out.push(("p".into(), p.bases.p()));
                out.push(("q".into(), p.bases.q()));
                push(&mut out, "t", &p.t);
            }
            ParameterSet::An(p) => {
                out.push(("p".into(), p.bases.p()));
                out.push(("q".into(), p.bases.q()));
                push(&mut out, "s", &p.s);
                push(&mut out, "t", &p.t);
            }
            ParameterSet::Cn(p) => {
                out.push(("p".into(), p.bases.p()));
                out.push(("q".into(), p.bases.q()));
                push(&mut out, "t", &p.t);
            }
            ParameterSet::NewAn(p) => {
                out.push(("p".into(), p.bases.p()));
                out.push(("q".into(), p.bases.q()));
                push(&mut out, "t", &p.t);
                push(&mut out, "s", &p.s);
            }
            ParameterSet::Ros(p) => {
                out.push(("p".into(), p.bases.p()));
                out.push(("q".into(), p.bases.q()));
                push(&mut out, "s", &p.s);
                for (i, &ni) in p.orders.iter().enumerate() {
                    out.push((format!("N_{}", i + 1), C64::new(ni as f64, 0.0)));
                }
            }
            ParameterSet::Eb(p) => {
                out.push(("p".into(), p.bases.p()));
                out.push(("q".into(), p.bases.q()));
                push(&mut out, "t", &p.t);
                push(&mut out, "b", &p.b);
                for (i, &ni) in p.orders.iter().enumerate() {
                    out.push((format!("N_{}", i + 1), C64::new(ni as f64, 0.0)));
                }
            }
            ParameterSet::InversionN1(p) => {
                out.push(("p".into(), p.bases.p()));
                out.push(("q".into(), p.bases.q()));
                out.push(("t".into(), p.t));
                out.push(("x".into(), p.x));
                match &p.f {
                    SymmetricFunction::Constant(c) => out.push(("f_const".into(), *c)),
                    SymmetricFunction::LaurentSymmetric(cs) => push(&mut out, "f_coeff", cs),
                    SymmetricFunction::NewPairF { s, .. } => push(&mut out, "f_s", s),
                    _ => {}
                }
            }
            ParameterSet::BaileyN1(p) => {
                out.push(("p".into(), p.bases.p()));
                out.push(("q".into(), p.bases.q()));
                out.push(("t".into(), p.t));
                push(&mut out, "s", &p.s);
            }
            ParameterSet::Theta(case) => {
                out.push(("p".into(), case.bases().p()));
                out.push(("q".into(), case.bases().q()));
                out.extend(case.fields());
            }
        }
        out
    }
}

struct Draw {
    rng: ChaCha8Rng,
    modulus_cap: f64,
    m_cap: f64,
}

impl Draw {
    fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (lo.ln() + self.uniform() * (hi.ln() - lo.ln())).exp()
    }

    fn phase(&mut self) -> C64 {
        C64::from_polar(1.0, self.uniform() * TAU)
    }

    /// Free parameter: uniform phase, log-uniform modulus in [0.2, cap].
    fn param(&mut self) -> C64 {
        let m = self.log_uniform(0.2, self.modulus_cap);
        self.phase() * m
    }

    fn params(&mut self, k: usize) -> Vec<C64> {
        (0..k).map(|_| self.param()).collect()
    }

    fn torus_point(&mut self) -> C64 {
        self.phase()
    }

    fn bases(&mut self) -> Bases {
        let p = self.phase() * self.log_uniform(self.m_cap / 8.0, self.m_cap);
        let q = self.phase() * self.log_uniform(self.m_cap / 8.0, self.m_cap);
        Bases::new(p, q).expect("moduli below the cap")
    }
}

/// Draw one admissible parameter record. Deterministic per `(kind, seed)`.
pub fn sample_params(
    kind: &ParamKind,
    seed: u64,
    modulus_cap: f64,
    m_cap: f64,
) -> Result<ParameterSet> {
    if !(0.0 < m_cap && m_cap < modulus_cap && modulus_cap < 1.0) {
        return Err(Error::Domain(format!(
            "need 0 < m_cap < modulus_cap < 1, got {m_cap}, {modulus_cap}"
        )));
    }
    let key = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(kind.tag());
    let mut draw = Draw {
        rng: ChaCha8Rng::seed_from_u64(key),
        modulus_cap,
        m_cap,
    };
    let policy = TruncationPolicy::default();
    for _ in 0..MAX_REJECTIONS {
        if let Some(ps) = attempt(kind, &mut draw, &policy) {
            return Ok(ps);
        }
    }
    Err(Error::SamplingExhausted {
        attempts: MAX_REJECTIONS,
    })
}

fn attempt(kind: &ParamKind, draw: &mut Draw, policy: &TruncationPolicy) -> Option<ParameterSet> {
    match kind {
        ParamKind::Univariate => {
            let bases = draw.bases();
            let free = draw.params(5);
            let solved = bases.pq() / free.iter().product::<C64>();
            if solved.norm() > draw.modulus_cap {
                return None;
            }
            let mut t = [ZERO; 6];
            t[..5].copy_from_slice(&free);
            t[5] = solved;
            let p = UnivariateBetaParams::new(t, bases).ok()?;
            p.preflight(UnivariateForm::Symmetric).ok()?;
            p.preflight(UnivariateForm::FiveParameter).ok()?;
            crate::beta::univariate_rhs(&p, UnivariateForm::Symmetric, policy).ok()?;
            Some(ParameterSet::Univariate(p))
        }
        ParamKind::An { n } => {
            let bases = draw.bases();
            let s = draw.params(n + 2);
            let mut t = draw.params(n + 1);
            let partial: C64 = s.iter().product::<C64>() * t.iter().product::<C64>();
            let solved = bases.pq() / partial;
            if solved.norm() > draw.modulus_cap {
                return None;
            }
            t.push(solved);
            let p = AnBetaParams::new(*n, s, t, bases).ok()?;
            p.preflight().ok()?;
            crate::beta::an_rhs(&p, policy).ok()?;
            Some(ParameterSet::An(p))
        }
        ParamKind::Cn { n } => {
            let bases = draw.bases();
            let mut t = draw.params(2 * n + 3);
            let solved = bases.pq() / t.iter().product::<C64>();
            if solved.norm() > draw.modulus_cap {
                return None;
            }
            t.push(solved);
            let p = CnBetaParams::new(*n, t, bases).ok()?;
            p.preflight().ok()?;
            crate::beta::cn_rhs(&p, policy).ok()?;
            Some(ParameterSet::Cn(p))
        }
        ParamKind::NewAn { n } | ParamKind::NewAnQLimit { n } => {
            let q_limit = matches!(kind, ParamKind::NewAnQLimit { .. });
            let bases = if q_limit {
                let b = draw.bases();
                Bases::new(ZERO, b.q()).ok()?
            } else {
                draw.bases()
            };
            let t = draw.params(*n);
            let s = draw.params(n + 3);
            let p = NewAnParams::new(*n, t, s, bases).ok()?;
            p.preflight().ok()?;
            if q_limit {
                crate::beta::new_an_qlimit_rhs(&p, policy).ok()?;
            } else {
                crate::beta::new_an_rhs(&p, policy).ok()?;
            }
            Some(ParameterSet::NewAn(p))
        }
        ParamKind::Ros { n, orders } => {
            let bases = draw.bases();
            let s = draw.params(n + 3);
            let p = SeriesParamsRos::new(*n, s, orders.clone(), bases).ok()?;
            ros_rhs(&p, policy).ok()?;
            crate::series::ros_lhs(&p, policy).ok()?;
            Some(ParameterSet::Ros(p))
        }
        ParamKind::Eb { n, orders } => {
            let bases = draw.bases();
            let t = draw.params(*n);
            let b = [draw.param(), draw.param(), draw.param()];
            let p = SeriesParamsEb::new(*n, t, b, orders.clone(), bases).ok()?;
            eb_rhs(&p, policy).ok()?;
            crate::series::eb_lhs(&p, policy).ok()?;
            Some(ParameterSet::Eb(p))
        }
        ParamKind::InversionN1 { tag } => {
            let bases = draw.bases();
            let t = draw.phase() * draw.log_uniform(0.6, 0.72);
            if bases.big_m() >= t.norm() * t.norm() {
                return None;
            }
            let x_hi = (0.95 / t.norm()).min(1.18);
            let x = draw.phase() * draw.log_uniform(1.03, x_hi);
            let f = match tag {
                FunctionTag::Constant => SymmetricFunction::Constant(draw.param()),
                FunctionTag::LaurentSymmetric => {
                    SymmetricFunction::LaurentSymmetric(vec![draw.param(), draw.param(), draw.param()])
                }
                FunctionTag::NewPair => {
                    let s = [
                        draw.phase() * draw.log_uniform(0.2, 0.8),
                        draw.phase() * draw.log_uniform(0.2, 0.8),
                        draw.phase() * draw.log_uniform(0.2, 0.8),
                    ];
                    bailey_admissible(&s, t, &bases).ok()?;
                    SymmetricFunction::NewPairF { s, t }
                }
            };
            if let SymmetricFunction::Constant(c) = &f {
                if c.norm() < 1e-3 {
                    return None;
                }
            }
            let sample = InversionSample { f, x, t, bases };
            sample.f.eval1(x, &bases, policy).ok()?;
            Some(ParameterSet::InversionN1(sample))
        }
        ParamKind::BaileyN1 => {
            let bases = draw.bases();
            let t = draw.phase() * draw.log_uniform(0.6, 0.72);
            if bases.big_m() >= t.norm() * t.norm() {
                return None;
            }
            let s = [
                draw.phase() * draw.log_uniform(0.2, 0.8),
                draw.phase() * draw.log_uniform(0.2, 0.8),
                draw.phase() * draw.log_uniform(0.2, 0.8),
            ];
            crate::inversion::bailey_preflight(&s, t, &bases).ok()?;
            Some(ParameterSet::BaileyN1(BaileySample { s, t, bases }))
        }
        ParamKind::Theta1 { n } => {
            let bases = draw.bases();
            let case = ThetaIdentityCase::Theta1 {
                z: (0..*n).map(|_| draw.phase() * draw.log_uniform(0.6, 1.4)).collect(),
                s: draw.params(n + 3),
                t1: draw.param(),
                bases,
            };
            check_identity(&case, policy).ok()?;
            Some(ParameterSet::Theta(case))
        }
        ParamKind::Theta2 { n } => {
            let bases = draw.bases();
            let case = ThetaIdentityCase::Theta2 {
                z: (0..*n).map(|_| draw.phase() * draw.log_uniform(0.6, 1.4)).collect(),
                t: draw.params(n.saturating_sub(1)),
                big_s: draw.param(),
                bases,
            };
            check_identity(&case, policy).ok()?;
            Some(ParameterSet::Theta(case))
        }
        ParamKind::Theta3 { n } => {
            let bases = draw.bases();
            let case = ThetaIdentityCase::Theta3 {
                z: (0..*n).map(|_| draw.phase() * draw.log_uniform(0.6, 1.4)).collect(),
                b: draw.params(n + 2),
                a: draw.param(),
                bases,
            };
            check_identity(&case, policy).ok()?;
            Some(ParameterSet::Theta(case))
        }
        ParamKind::AnPartialFraction { n } => {
            let bases = draw.bases();
            let case = ThetaIdentityCase::AnPartialFraction {
                z: (0..*n).map(|_| draw.phase() * draw.log_uniform(0.6, 1.4)).collect(),
                a: draw.params(n + 1),
                bases,
            };
            check_identity(&case, policy).ok()?;
            Some(ParameterSet::Theta(case))
        }
        ParamKind::CPartialFraction { n } => {
            let bases = draw.bases();
            let case = ThetaIdentityCase::CPartialFraction {
                z: (0..*n).map(|_| draw.phase() * draw.log_uniform(0.6, 1.4)).collect(),
                b: draw.params(n.saturating_sub(1)),
                a: draw.param(),
                bases,
            };
            check_identity(&case, policy).ok()?;
            Some(ParameterSet::Theta(case))
        }
        ParamKind::QdiffLemma { n } => {
            let bases = draw.bases();
            let case = ThetaIdentityCase::QdiffLemma {
                z: (0..*n).map(|_| draw.torus_point()).collect(),
                s: draw.params(n + 3),
                t: draw.params(*n),
                bases,
            };
            check_identity(&case, policy).ok()?;
            Some(ParameterSet::Theta(case))
        }
        ParamKind::ContiguousI { n } => {
            let bases = draw.bases();
            let case = ThetaIdentityCase::ContiguousI {
                s: draw.params(n + 3),
                t: draw.params(*n),
                bases,
            };
            check_identity(&case, policy).ok()?;
            Some(ParameterSet::Theta(case))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_sample_passes_invariants() {
        let ps = sample_params(&ParamKind::Univariate, 1, 0.8, 0.3).unwrap();
        match ps {
            ParameterSet::Univariate(p) => {
                let prod: C64 = p.t.iter().product();
                assert!((prod - p.bases.pq()).norm() < 1e-13 * p.bases.pq().norm());
                assert!(p.t.iter().all(|v| v.norm() < 1.0));
            }
            _ => panic!("wrong variant"),
        }
    }

    #[test]
    fn same_seed_is_deterministic() {
        let a = sample_params(&ParamKind::Univariate, 7, 0.8, 0.3).unwrap();
        let b = sample_params(&ParamKind::Univariate, 7, 0.8, 0.3).unwrap();
        match (a, b) {
            (ParameterSet::Univariate(pa), ParameterSet::Univariate(pb)) => {
                assert_eq!(pa.t, pb.t);
                assert_eq!(pa.bases.p(), pb.bases.p());
            }
            _ => panic!("wrong variant"),
        }
    }

    #[test]
    fn new_an_sample_satisfies_admissibility() {
        let ps = sample_params(&ParamKind::NewAn { n: 2 }, 7, 0.8, 0.09).unwrap();
        match ps {
            ParameterSet::NewAn(p) => {
                let big_s = p.big_s();
                for ti in &p.t {
                    assert!((p.bases.pq() / (big_s * ti)).norm() < 1.0);
                }
            }
            _ => panic!("wrong variant"),
        }
    }

    #[test]
    fn impossible_caps_exhaust() {
        // the solved sixth parameter always lands on or above modulus one
        let err = sample_params(&ParamKind::Univariate, 3, 0.21, 0.2).unwrap_err();
        assert!(matches!(err, Error::SamplingExhausted { .. }));
    }

    #[test]
    fn bad_caps_are_rejected() {
        assert!(sample_params(&ParamKind::Univariate, 1, 0.3, 0.8).is_err());
        assert!(sample_params(&ParamKind::Univariate, 1, 1.2, 0.3).is_err());
    }
}
