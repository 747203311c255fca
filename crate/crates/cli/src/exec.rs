//! Sample execution and report emission for the verify and sweep commands.

use std::collections::BTreeMap;
use std::time::Instant;

use ellint_core::beta::{
    an_lhs, an_rhs, cn_lhs, cn_rhs, new_an_lhs, new_an_qlimit_lhs, new_an_qlimit_rhs, new_an_rhs,
    univariate_lhs, univariate_rhs, UnivariateForm,
};
use ellint_core::elliptic::TruncationPolicy;
use ellint_core::identities::evaluate_sides;
use ellint_core::inversion::bailey_pair_n1;
use ellint_core::quad::TorusGrid;
use ellint_core::report::{GridMeta, VerificationReport};
use ellint_core::sample::{sample_params, FunctionTag, ParamKind, ParameterSet};
use ellint_core::Result;

use crate::registry::IdentityEntry;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub entry: &'static IdentityEntry,
    pub n: usize,
    pub orders: Option<Vec<u32>>,
    pub seed: u64,
    pub grid_n: usize,
    pub tol: f64,
    pub m_cap: f64,
    pub modulus_cap: f64,
    pub samples: usize,
    pub jobs: usize,
    pub timings: bool,
}

impl RunConfig {
    fn policy(&self) -> TruncationPolicy {
        TruncationPolicy::default()
    }

    fn orders(&self) -> Vec<u32> {
        self.orders.clone().unwrap_or_else(|| vec![1; self.n])
    }
}

fn kind_for(cfg: &RunConfig, sample_idx: usize) -> ParamKind {
    let n = cfg.n;
    match cfg.entry.name {
        "univariate" => ParamKind::Univariate,
        "an" => ParamKind::An { n },
        "cn" => ParamKind::Cn { n },
        "new_an" => ParamKind::NewAn { n },
        "new_an_qlimit" => ParamKind::NewAnQLimit { n },
        "inversion_n1" => ParamKind::InversionN1 {
            tag: match sample_idx % 3 {
                0 => FunctionTag::Constant,
                1 => FunctionTag::LaurentSymmetric,
                _ => FunctionTag::NewPair,
            },
        },
        "bailey_n1" => ParamKind::BaileyN1,
        "ros" => ParamKind::Ros {
            n,
            orders: cfg.orders(),
        },
        "eb" => ParamKind::Eb {
            n,
            orders: cfg.orders(),
        },
        "theta1" => ParamKind::Theta1 { n },
        "theta2" => ParamKind::Theta2 { n },
        "theta3" => ParamKind::Theta3 { n },
        "an_pf" => ParamKind::AnPartialFraction { n },
        "c_pf" => ParamKind::CPartialFraction { n },
        "qdiff" => ParamKind::QdiffLemma { n },
        "contiguous" => ParamKind::ContiguousI { n },
        other => unreachable!("unregistered identity {other}"),
    }
}

/// Evaluate one sample of the configured identity and return its reports
/// (the transform pair emits two).
pub fn one_sample(cfg: &RunConfig, sample_idx: usize, grid_n: usize) -> Result<Vec<VerificationReport>> {
    let policy = cfg.policy();
    let started = Instant::now();
    let seed = cfg.seed.wrapping_add(sample_idx as u64);
    let kind = kind_for(cfg, sample_idx);
    let ps = sample_params(&kind, seed, cfg.modulus_cap, cfg.m_cap)?;
    let fields = ps.fields();
    let grid_meta = |n: usize| GridMeta::Quadrature { n, nodes: grid_n };
    let mut reports = match &ps {
        ParameterSet::Univariate(p) => {
            let grid = TorusGrid::new(1, grid_n)?;
            let lhs = univariate_lhs(p, &grid, UnivariateForm::Symmetric, &policy)?;
            let rhs = univariate_rhs(p, UnivariateForm::Symmetric, &policy)?;
            vec![VerificationReport::new("univariate", fields, lhs.value, rhs, grid_meta(1))]
        }
        ParameterSet::An(p) => {
            let grid = TorusGrid::new(p.n, grid_n)?;
            let lhs = an_lhs(p, &grid, &policy)?;
            let rhs = an_rhs(p, &policy)?;
            vec![VerificationReport::new(
                format!("an[n={}]", p.n),
                fields,
                lhs.value,
                rhs,
                grid_meta(p.n),
            )]
        }
        ParameterSet::Cn(p) => {
            let grid = TorusGrid::new(p.n, grid_n)?;
            let lhs = cn_lhs(p, &grid, &policy)?;
            let rhs = cn_rhs(p, &policy)?;
            vec![VerificationReport::new(
                format!("cn[n={}]", p.n),
                fields,
                lhs.value,
                rhs,
                grid_meta(p.n),
            )]
        }
        ParameterSet::NewAn(p) => {
            let grid = TorusGrid::new(p.n, grid_n)?;
            if cfg.entry.name == "new_an_qlimit" {
                let lhs = new_an_qlimit_lhs(p, &grid, &policy)?;
                let rhs = new_an_qlimit_rhs(p, &policy)?;
                vec![VerificationReport::new(
                    format!("new_an_qlimit[n={}]", p.n),
                    fields,
                    lhs.value,
                    rhs,
                    grid_meta(p.n),
                )]
            } else {
                let lhs = new_an_lhs(p, &grid, &policy)?;
                let rhs = new_an_rhs(p, &policy)?;
                vec![VerificationReport::new(
                    format!("new_an[n={}]", p.n),
                    fields,
                    lhs.value,
                    rhs,
                    grid_meta(p.n),
                )]
            }
        }
        ParameterSet::InversionN1(s) => {
            let grid = TorusGrid::new(1, grid_n)?;
            let got = ellint_core::inversion::invert_n1(&s.f, s.x, s.t, &s.bases, &grid, &policy)?;
            let direct = s.f.eval1(s.x, &s.bases, &policy)?;
            vec![VerificationReport::new("inversion_n1", fields, got, direct, grid_meta(1))]
        }
        ParameterSet::BaileyN1(b) => {
            let grid = TorusGrid::new(1, grid_n)?;
            let chk = bailey_pair_n1(&b.s, b.t, &b.bases, &grid, &policy)?;
            vec![
                VerificationReport::new(
                    "bailey_n1[fhat]",
                    fields.clone(),
                    chk.fhat_worst.0,
                    chk.fhat_worst.1,
                    grid_meta(1),
                ),
                VerificationReport::new(
                    "bailey_n1[roundtrip]",
                    fields,
                    chk.roundtrip_worst.0,
                    chk.roundtrip_worst.1,
                    grid_meta(1),
                ),
            ]
        }
        ParameterSet::Ros(p) => {
            let lhs = ellint_core::series::ros_lhs(p, &policy)?;
            let rhs = ellint_core::series::ros_rhs(p, &policy)?;
            vec![VerificationReport::new(
                format!("ros[n={}]", p.n),
                fields,
                lhs,
                rhs,
                GridMeta::LambdaBox {
                    orders: p.orders.clone(),
                },
            )]
        }
        ParameterSet::Eb(p) => {
            let lhs = ellint_core::series::eb_lhs(p, &policy)?;
            let rhs = ellint_core::series::eb_rhs(p, &policy)?;
            vec![VerificationReport::new(
                format!("eb[n={}]", p.n),
                fields,
                lhs,
                rhs,
                GridMeta::LambdaBox {
                    orders: p.orders.clone(),
                },
            )]
        }
        ParameterSet::Theta(case) => {
            let (lhs, rhs) = evaluate_sides(case, &policy)?;
            vec![VerificationReport::new(
                format!("{}[n={}]", cfg.entry.name, case.n()),
                fields,
                lhs,
                rhs,
                GridMeta::Pointwise { points: 1 },
            )]
        }
    };
    let elapsed = if cfg.timings {
        started.elapsed().as_millis() as u64
    } else {
        0
    };
    let m = match &ps {
        ParameterSet::Theta(case) => case.bases().big_m(),
        ParameterSet::Univariate(p) => p.bases.big_m(),
        ParameterSet::An(p) => p.bases.big_m(),
        ParameterSet::Cn(p) => p.bases.big_m(),
        ParameterSet::NewAn(p) => p.bases.big_m(),
        ParameterSet::Ros(p) => p.bases.big_m(),
        ParameterSet::Eb(p) => p.bases.big_m(),
        ParameterSet::InversionN1(s) => s.bases.big_m(),
        ParameterSet::BaileyN1(b) => b.bases.big_m(),
    };
    let policy_terms = policy.cutoff(m);
    for r in reports.iter_mut() {
        *r = r
            .clone()
            .with_truncation(policy.tolerance, policy_terms)
            .with_elapsed(elapsed)
            .judged(cfg.tol);
        if cfg.entry.conjecture {
            *r = r.clone().with_conjecture();
        }
    }
    Ok(reports)
}

fn run_batch(cfg: &RunConfig, grid_n: usize) -> BatchOutcome {
    let indices: Vec<usize> = (0..cfg.samples).collect();
    let results: BTreeMap<usize, Result<Vec<VerificationReport>>> = if cfg.jobs <= 1 {
        indices
            .iter()
            .map(|&i| (i, one_sample(cfg, i, grid_n)))
            .collect()
    } else {
        let mut map = BTreeMap::new();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..cfg.jobs {
                let cfg = cfg.clone();
                let idx: Vec<usize> = indices.iter().copied().skip(w).step_by(cfg.jobs).collect();
                handles.push(scope.spawn(move || {
                    idx.into_iter()
                        .map(|i| (i, one_sample(&cfg, i, grid_n)))
                        .collect::<Vec<_>>()
                }));
            }
            for h in handles {
                for (i, r) in h.join().expect("worker panicked") {
                    map.insert(i, r);
                }
            }
        });
        map
    };

    let mut lines = Vec::new();
    let mut all_pass = true;
    let mut failures = 0usize;
    let mut worst_rel = 0f64;
    for (i, res) in results {
        match res {
            Ok(reports) => {
                for r in reports {
                    if !r.pass {
                        all_pass = false;
                        failures += 1;
                    }
                    worst_rel = worst_rel.max(r.rel_err);
                    lines.push(r.to_json_line());
                }
            }
            Err(e) => {
                eprintln!("sample {i}: {e}");
                all_pass = false;
                failures += 1;
            }
        }
    }
    BatchOutcome {
        lines,
        all_pass,
        failures,
        worst_rel,
    }
}

struct BatchOutcome {
    lines: Vec<String>,
    all_pass: bool,
    failures: usize,
    worst_rel: f64,
}

/// Run the verify command; returns the process exit code.
pub fn run_verify(cfg: &RunConfig) -> i32 {
    let out = run_batch(cfg, cfg.grid_n);
    for line in out.lines {
        println!("{line}");
    }
    if out.all_pass {
        0
    } else {
        eprintln!("{} verification(s) failed", out.failures);
        1
    }
}

/// Run the sweep command over a list of grids; returns the process exit code.
pub fn run_sweep(cfg: &RunConfig, grids: &[usize]) -> i32 {
    if !cfg.entry.quadrature {
        eprintln!("identity {} has no quadrature grid to sweep", cfg.entry.name);
        return 2;
    }
    let mut final_pass = true;
    let mut previous: Option<f64> = None;
    for &g in grids {
        let out = run_batch(cfg, g);
        for line in &out.lines {
            println!("{line}");
        }
        let worst = out.worst_rel;
        let trend = match previous {
            Some(prev) if prev > 0.0 => format!(" (x{:.2e} vs previous)", worst / prev),
            _ => String::new(),
        };
        eprintln!("N={g:<6} max rel_err {worst:.3e}{trend}");
        previous = Some(worst);
        if g == *grids.last().unwrap() {
            final_pass = worst <= cfg.tol && out.failures == 0;
        }
    }
    if final_pass {
        0
    } else {
        eprintln!("finest grid missed the tolerance {:.1e}", cfg.tol);
        1
    }
}
