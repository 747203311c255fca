//! Evaluators for both sides of the elliptic beta integrals: the univariate
//! integral (six-parameter symmetric form and five-parameter form), the A_n
//! and C_n type I integrals, the new A_n integral, and its p -> 0
//! q-Pochhammer limit.
//!
//! Left-hand sides are trapezoidal torus quadratures of the displayed
//! integrands (all contour measures are `dz_j / z_j`); right-hand sides are
//! the closed-form gamma products. Every gamma argument on the grid is
//! `parameter * root-of-unity`, so each evaluation precomputes one table of
//! gamma values per parameter and the integrand reduces to table lookups.
//! The tables are per-evaluation, never global.


use crate::elliptic::{
    elliptic_gamma, qpochhammer_inf, Bases, TruncationPolicy, C64, ONE, ZERO,
};
use crate::error::{Error, Result};
use crate::quad::{torus_average_indexed, IntegralEstimate, TorusGrid};

/// Required radial clearance between any pole family and the unit torus.
pub const TORUS_CLEARANCE: f64 = 0.05;

/// Relative tolerance on multiplicative balancing constraints.
pub const BALANCE_TOL: f64 = 1e-14;

pub(crate) fn midx(m: i64, n: usize) -> usize {
    m.rem_euclid(n as i64) as usize
}

fn balanced(product: C64, target: C64) -> bool {
    let scale = product.norm().max(target.norm()).max(f64::MIN_POSITIVE);
    (product - target).norm() <= BALANCE_TOL * scale
}

// ---------------------------------------------------------------------------
// Pole preflight
// ---------------------------------------------------------------------------

/// Moduli of `p^mu q^nu` down to 1e-16, used to enumerate pole families.
pub(crate) struct PoleScan {
    ratios: Vec<f64>,
}

impl PoleScan {
    pub(crate) fn new(bases: &Bases) -> Self {
        let pa = bases.p().norm();
        let qa = bases.q().norm();
        let mut ratios = Vec::new();
        let mut rp = 1.0;
        loop {
            let mut r = rp;
            loop {
                ratios.push(r);
                r *= qa;
                if r < 1e-16 {
                    break;
                }
            }
            rp *= pa;
            if rp < 1e-16 {
                break;
            }
        }
        PoleScan { ratios }
    }

    /// Min over the lattice of the radial distance between the torus and the
    /// pole families at radii `c * r` and `c / r`.
    pub(crate) fn clearance(&self, c_abs: f64) -> f64 {
        let mut best = f64::INFINITY;
        for &r in &self.ratios {
            best = best.min((c_abs * r - 1.0).abs());
            best = best.min((c_abs / r - 1.0).abs());
        }
        best
    }

    /// Clearance of the square-root family `|z|^2 = |pq| r` coming from the
    /// `1/Gamma(z^{+-2})` measure factors.
    pub(crate) fn sqrt_clearance(&self, pq_abs: f64) -> f64 {
        let mut best = f64::INFINITY;
        for &r in &self.ratios {
            best = best.min(((pq_abs * r).sqrt() - 1.0).abs());
        }
        best
    }

    pub(crate) fn require(&self, family: &str, c_abs: f64) -> Result<()> {
        let d = self.clearance(c_abs);
        if d < TORUS_CLEARANCE {
            return Err(Error::PoleTooClose {
                family: family.to_string(),
                distance: d,
                required: TORUS_CLEARANCE,
            });
        }
        Ok(())
    }

    pub(crate) fn require_sqrt(&self, family: &str, pq_abs: f64) -> Result<()> {
        let d = self.sqrt_clearance(pq_abs);
        if d < TORUS_CLEARANCE {
            return Err(Error::PoleTooClose {
                family: family.to_string(),
                distance: d,
                required: TORUS_CLEARANCE,
            });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Gamma tables on the grid
// ---------------------------------------------------------------------------

/// `Gamma(c * omega^m)` for every grid node `omega^m`.
pub(crate) fn gamma_circle_table(
    c: C64,
    grid: &TorusGrid,
    bases: &Bases,
    policy: &TruncationPolicy,
) -> Result<Vec<C64>> {
    grid.nodes()
        .iter()
        .map(|&w| elliptic_gamma(c * w, bases, policy))
        .collect()
}

/// `1 / Gamma(c * omega^m)` for every grid node.
pub(crate) fn inv_gamma_circle_table(
    c: C64,
    grid: &TorusGrid,
    bases: &Bases,
    policy: &TruncationPolicy,
) -> Result<Vec<C64>> {
    grid.nodes()
        .iter()
        .map(|&w| {
            let g = elliptic_gamma(c * w, bases, policy)?;
            if g == ZERO {
                Err(Error::DivisionByZero(format!(
                    "Gamma({}) vanished in a denominator table",
                    c * w
                )))
            } else {
                Ok(ONE / g)
            }
        })
        .collect()
}

/// `1 / Gamma(omega^m)` with the structural pole at `m = 0` mapped to the
/// exact zero of the integrand.
pub(crate) fn unit_inv_gamma_table(
    grid: &TorusGrid,
    bases: &Bases,
    policy: &TruncationPolicy,
) -> Result<Vec<C64>> {
    grid.nodes()
        .iter()
        .enumerate()
        .map(|(m, &w)| {
            if m == 0 {
                Ok(ZERO)
            } else {
                Ok(ONE / elliptic_gamma(w, bases, policy)?)
            }
        })
        .collect()
}

/// `(c * omega^m; q)_inf` for every grid node.
pub(crate) fn qpoch_circle_table(
    c: C64,
    grid: &TorusGrid,
    q: C64,
    policy: &TruncationPolicy,
) -> Result<Vec<C64>> {
    grid.nodes()
        .iter()
        .map(|&w| qpochhammer_inf(c * w, q, policy))
        .collect()
}

/// `(omega^m; q)_inf` with `(1;q)_inf = 0` kept as an exact numerator zero.
pub(crate) fn unit_qpoch_table(
    grid: &TorusGrid,
    q: C64,
    policy: &TruncationPolicy,
) -> Result<Vec<C64>> {
    grid.nodes()
        .iter()
        .enumerate()
        .map(|(m, &w)| {
            if m == 0 {
                Ok(ZERO)
            } else {
                qpochhammer_inf(w, q, policy)
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Univariate integral
// ---------------------------------------------------------------------------

/// Which of the two displayed forms of the univariate integral to evaluate:
/// the symmetric six-parameter form or the five-parameter form with
/// `T = t_1 ... t_5` eliminated through the reflection equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnivariateForm {
    Symmetric,
    FiveParameter,
}

/// Six parameters with `t_1 ... t_6 = pq` and `max |t_i| < 1`.
#[derive(Debug, Clone)]
pub struct UnivariateBetaParams {
    pub t: [C64; 6],
    pub bases: Bases,
}

impl UnivariateBetaParams {
    pub fn new(t: [C64; 6], bases: Bases) -> Result<Self> {
        let prod: C64 = t.iter().product();
        if !balanced(prod, bases.pq()) {
            return Err(Error::Domain(format!(
                "balancing violated: t_1..t_6 = {prod}, pq = {}",
                bases.pq()
            )));
        }
        if t.iter().any(|ti| ti.norm() >= 1.0) {
            return Err(Error::Domain("admissibility needs max |t_i| < 1".into()));
        }
        Ok(UnivariateBetaParams { t, bases })
    }

    pub fn big_t(&self) -> C64 {
        self.t[..5].iter().product()
    }

    pub fn preflight(&self, form: UnivariateForm) -> Result<()> {
        let scan = PoleScan::new(&self.bases);
        for (i, ti) in self.t.iter().enumerate() {
            scan.require(&format!("t_{}", i + 1), ti.norm())?;
        }
        scan.require_sqrt("z^2", self.bases.pq().norm())?;
        if form == UnivariateForm::FiveParameter {
            scan.require("T", self.big_t().norm())?;
        }
        Ok(())
    }
}

pub fn univariate_lhs(
    params: &UnivariateBetaParams,
    grid: &TorusGrid,
    form: UnivariateForm,
    policy: &TruncationPolicy,
) -> Result<IntegralEstimate> {
    if grid.dims() != 1 {
        return Err(Error::Domain("univariate integral needs a 1-d grid".into()));
    }
    params.preflight(form)?;
    let bases = &params.bases;
    let nn = grid.nodes_per_dim();
    let unit_inv = unit_inv_gamma_table(grid, bases, policy)?;

    match form {
        UnivariateForm::Symmetric => {
            let tables: Vec<Vec<C64>> = params
                .t
                .iter()
                .map(|&ti| gamma_circle_table(ti, grid, bases, policy))
                .collect::<Result<_>>()?;
            torus_average_indexed(
                |idx| {
                    let k = idx[0];
                    let mut acc = unit_inv[midx(2 * k as i64, nn)] * unit_inv[midx(-2 * (k as i64), nn)];
                    for tab in &tables {
                        acc *= tab[k] * tab[midx(-(k as i64), nn)];
                    }
                    acc
                },
                grid,
            )
        }
        UnivariateForm::FiveParameter => {
            let tables: Vec<Vec<C64>> = params.t[..5]
                .iter()
                .map(|&ti| gamma_circle_table(ti, grid, bases, policy))
                .collect::<Result<_>>()?;
            let inv_t = inv_gamma_circle_table(params.big_t(), grid, bases, policy)?;
            torus_average_indexed(
                |idx| {
                    let k = idx[0] as i64;
                    let mut acc = unit_inv[midx(2 * k, nn)] * unit_inv[midx(-2 * k, nn)];
                    acc *= inv_t[midx(k, nn)] * inv_t[midx(-k, nn)];
                    for tab in &tables {
                        acc *= tab[midx(k, nn)] * tab[midx(-k, nn)];
                    }
                    acc
                },
                grid,
            )
        }
    }
}

pub fn univariate_rhs(
    params: &UnivariateBetaParams,
    form: UnivariateForm,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let bases = &params.bases;
    let c = crate::elliptic::pochhammer_norm(bases, policy)?;
    match form {
        UnivariateForm::Symmetric => {
            let mut prod = ONE;
            for i in 0..6 {
                for j in (i + 1)..6 {
                    prod *= elliptic_gamma(params.t[i] * params.t[j], bases, policy)?;
                }
            }
            Ok(2.0 * prod / c)
        }
        UnivariateForm::FiveParameter => {
            let big_t = params.big_t();
            let mut num = ONE;
            for i in 0..5 {
                for j in (i + 1)..5 {
                    num *= elliptic_gamma(params.t[i] * params.t[j], bases, policy)?;
                }
            }
            let mut den = ONE;
            for i in 0..5 {
                den *= elliptic_gamma(big_t / params.t[i], bases, policy)?;
            }
            Ok(2.0 * num / (c * den))
        }
    }
}

// ---------------------------------------------------------------------------
// A_n integral
// ---------------------------------------------------------------------------

/// `2n + 4` parameters `s_1..s_{n+2}`, `t_1..t_{n+2}` with `S T = pq` and all
/// moduli below one.
#[derive(Debug, Clone)]
pub struct AnBetaParams {
    pub n: usize,
    pub s: Vec<C64>,
    pub t: Vec<C64>,
    pub bases: Bases,
}

impl AnBetaParams {
    pub fn new(n: usize, s: Vec<C64>, t: Vec<C64>, bases: Bases) -> Result<Self> {
        if n == 0 || s.len() != n + 2 || t.len() != n + 2 {
            return Err(Error::Domain(format!(
                "A_n parameters need n >= 1 with n+2 entries each, got n={n}, |s|={}, |t|={}",
                s.len(),
                t.len()
            )));
        }
        let prod: C64 = s.iter().chain(t.iter()).product();
        if !balanced(prod, bases.pq()) {
            return Err(Error::Domain(format!(
                "balancing violated: S T = {prod}, pq = {}",
                bases.pq()
            )));
        }
        if s.iter().chain(t.iter()).any(|v| v.norm() >= 1.0) {
            return Err(Error::Domain(
                "admissibility needs max(|s_i|, |t_i|) < 1".into(),
            ));
        }
        Ok(AnBetaParams { n, s, t, bases })
    }

    pub fn big_s(&self) -> C64 {
        self.s.iter().product()
    }

    pub fn big_t(&self) -> C64 {
        self.t.iter().product()
    }

    pub fn preflight(&self) -> Result<()> {
        let scan = PoleScan::new(&self.bases);
        for (i, v) in self.s.iter().enumerate() {
            scan.require(&format!("s_{}", i + 1), v.norm())?;
        }
        for (i, v) in self.t.iter().enumerate() {
            scan.require(&format!("t_{}", i + 1), v.norm())?;
        }
        Ok(())
    }
}

pub fn an_lhs(
    params: &AnBetaParams,
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
    params.preflight()?;
    let bases = &params.bases;
    let nn = grid.nodes_per_dim();
    let unit_inv = unit_inv_gamma_table(grid, bases, policy)?;
    let s_tabs: Vec<Vec<C64>> = params
        .s
        .iter()
        .map(|&v| gamma_circle_table(v, grid, bases, policy))
        .collect::<Result<_>>()?;
    let t_tabs: Vec<Vec<C64>> = params
        .t
        .iter()
        .map(|&v| gamma_circle_table(v, grid, bases, policy))
        .collect::<Result<_>>()?;

    torus_average_indexed(
        |idx| {
            let mut kk: Vec<i64> = idx.iter().map(|&k| k as i64).collect();
            let sum: i64 = kk.iter().sum();
            kk.push((-sum).rem_euclid(nn as i64));
            let mut acc = ONE;
            for &k in &kk {
                let kp = midx(k, nn);
                let km = midx(-k, nn);
                for s_tab in &s_tabs {
                    acc *= s_tab[kp];
                }
                for t_tab in &t_tabs {
                    acc *= t_tab[km];
                }
            }
            for i in 0..=n {
                for j in (i + 1)..=n {
                    acc *= unit_inv[midx(kk[i] - kk[j], nn)] * unit_inv[midx(kk[j] - kk[i], nn)];
                }
            }
            acc
        },
        grid,
    )
}

pub fn an_rhs(params: &AnBetaParams, policy: &TruncationPolicy) -> Result<C64> {
    let bases = &params.bases;
    let c = crate::elliptic::pochhammer_norm(bases, policy)?;
    let big_s = params.big_s();
    let big_t = params.big_t();
    let mut prod = ONE;
    for v in &params.s {
        prod *= elliptic_gamma(big_s / v, bases, policy)?;
    }
    for v in &params.t {
        prod *= elliptic_gamma(big_t / v, bases, policy)?;
    }
    for si in &params.s {
        for tj in &params.t {
            prod *= elliptic_gamma(si * tj, bases, policy)?;
        }
    }
    let fact: f64 = (1..=(params.n + 1)).map(|k| k as f64).product();
    Ok(fact * prod / c.powu(params.n as u32))
}

// ---------------------------------------------------------------------------
// C_n integral
// ---------------------------------------------------------------------------

/// `2n + 4` parameters with `t_1 ... t_{2n+4} = pq` and all moduli below one.
#[derive(Debug, Clone)]
pub struct CnBetaParams {
    pub n: usize,
    pub t: Vec<C64>,
    pub bases: Bases,
}

impl CnBetaParams {
    pub fn new(n: usize, t: Vec<C64>, bases: Bases) -> Result<Self> {
        if n == 0 || t.len() != 2 * n + 4 {
            return Err(Error::Domain(format!(
                "C_n parameters need 2n+4 entries, got n={n}, |t|={}",
                t.len()
            )));
        }
        let prod: C64 = t.iter().product();
        if !balanced(prod, bases.pq()) {
            return Err(Error::Domain(format!(
                "balancing violated: t_1..t_{} = {prod}, pq = {}",
                2 * n + 4,
                bases.pq()
            )));
        }
        if t.iter().any(|v| v.norm() >= 1.0) {
            return Err(Error::Domain("admissibility needs max |t_i| < 1".into()));
        }
        Ok(CnBetaParams { n, t, bases })
    }

    pub fn preflight(&self) -> Result<()> {
        let scan = PoleScan::new(&self.bases);
        for (i, v) in self.t.iter().enumerate() {
            scan.require(&format!("t_{}", i + 1), v.norm())?;
        }
        scan.require_sqrt("z^2", self.bases.pq().norm())?;
        Ok(())
    }
}

pub fn cn_lhs(
    params: &CnBetaParams,
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
    params.preflight()?;
    let bases = &params.bases;
    let nn = grid.nodes_per_dim();
    let unit_inv = unit_inv_gamma_table(grid, bases, policy)?;
    let t_tabs: Vec<Vec<C64>> = params
        .t
        .iter()
        .map(|&v| gamma_circle_table(v, grid, bases, policy))
        .collect::<Result<_>>()?;

    torus_average_indexed(
        |idx| {
            let mut acc = ONE;
            for &k in idx {
                let k = k as i64;
                for t_tab in &t_tabs {
                    acc *= t_tab[midx(k, nn)] * t_tab[midx(-k, nn)];
                }
                acc *= unit_inv[midx(2 * k, nn)] * unit_inv[midx(-2 * k, nn)];
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let (ki, kj) = (idx[i] as i64, idx[j] as i64);
                    acc *= unit_inv[midx(ki + kj, nn)]
                        * unit_inv[midx(ki - kj, nn)]
                        * unit_inv[midx(-ki + kj, nn)]
                        * unit_inv[midx(-ki - kj, nn)];
                }
            }
            acc
        },
        grid,
    )
}

pub fn cn_rhs(params: &CnBetaParams, policy: &TruncationPolicy) -> Result<C64> {
    let bases = &params.bases;
    let c = crate::elliptic::pochhammer_norm(bases, policy)?;
    let m = params.t.len();
    let mut prod = ONE;
    for i in 0..m {
        for j in (i + 1)..m {
            prod *= elliptic_gamma(params.t[i] * params.t[j], bases, policy)?;
        }
    }
    let fact: f64 = (1..=params.n).map(|k| k as f64).product();
    Ok(2f64.powi(params.n as i32) * fact * prod / c.powu(params.n as u32))
}

// ---------------------------------------------------------------------------
// New A_n integral and its p -> 0 limit
// ---------------------------------------------------------------------------

/// Parameters `t_1..t_n`, `s_1..s_{n+3}` subject to the admissibility
/// `max(|t_i|, |s_j|, |pq S^{-1} t_i^{-1}|) < 1` with `S = s_1 ... s_{n+3}`.
/// There is no balancing constraint. With `p = 0` the same record drives the
/// q-Pochhammer limit evaluators.
#[derive(Debug, Clone)]
pub struct NewAnParams {
    pub n: usize,
    pub t: Vec<C64>,
    pub s: Vec<C64>,
    pub bases: Bases,
}

impl NewAnParams {
    pub fn new(n: usize, t: Vec<C64>, s: Vec<C64>, bases: Bases) -> Result<Self> {
        if n == 0 || t.len() != n || s.len() != n + 3 {
            return Err(Error::Domain(format!(
                "new A_n parameters need n t's and n+3 s's, got n={n}, |t|={}, |s|={}",
                t.len(),
                s.len()
            )));
        }
        let big_s: C64 = s.iter().product();
        let pq = bases.pq();
        let mut worst = 0f64;
        for v in t.iter().chain(s.iter()) {
            worst = worst.max(v.norm());
        }
        for ti in &t {
            worst = worst.max((pq / (big_s * ti)).norm());
        }
        if worst >= 1.0 {
            return Err(Error::Domain(format!(
                "admissibility max(|t_i|, |s_j|, |pq/(S t_i)|) = {worst} >= 1"
            )));
        }
        Ok(NewAnParams { n, t, s, bases })
    }

    pub fn big_s(&self) -> C64 {
        self.s.iter().product()
    }

    pub fn preflight(&self) -> Result<()> {
        let scan = PoleScan::new(&self.bases);
        let big_s = self.big_s();
        for (i, v) in self.t.iter().enumerate() {
            scan.require(&format!("t_{}", i + 1), v.norm())?;
        }
        for (i, v) in self.s.iter().enumerate() {
            scan.require(&format!("s_{}", i + 1), v.norm())?;
        }
        scan.require("S", big_s.norm())?;
        let pq = self.bases.pq().norm();
        for (i, v) in self.t.iter().enumerate() {
            let c = (big_s * v).norm();
            if pq > 0.0 {
                scan.require(&format!("S t_{} / pq", i + 1), c / pq)?;
            } else {
                scan.require(&format!("S t_{}", i + 1), c)?;
            }
        }
        Ok(())
    }
}

pub fn new_an_lhs(
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
    params.preflight()?;
    let bases = &params.bases;
    let nn = grid.nodes_per_dim();
    let big_s = params.big_s();
    let unit_inv = unit_inv_gamma_table(grid, bases, policy)?;
    let t_tabs: Vec<Vec<C64>> = params
        .t
        .iter()
        .map(|&v| gamma_circle_table(v, grid, bases, policy))
        .collect::<Result<_>>()?;
    let s_tabs: Vec<Vec<C64>> = params
        .s
        .iter()
        .map(|&v| gamma_circle_table(v, grid, bases, policy))
        .collect::<Result<_>>()?;
    let st_inv_tabs: Vec<Vec<C64>> = params
        .t
        .iter()
        .map(|&v| inv_gamma_circle_table(big_s * v, grid, bases, policy))
        .collect::<Result<_>>()?;
    let s_big_tab = gamma_circle_table(big_s, grid, bases, policy)?;

    torus_average_indexed(
        |idx| {
            let mut kk: Vec<i64> = idx.iter().map(|&k| k as i64).collect();
            let sum: i64 = kk.iter().sum();
            kk.push((-sum).rem_euclid(nn as i64));
            let mut acc = ONE;
            for &k in &kk {
                let kp = midx(k, nn);
                let km = midx(-k, nn);
                for t_tab in &t_tabs {
                    acc *= t_tab[kp];
                }
                for s_tab in &s_tabs {
                    acc *= s_tab[km];
                }
                for st_inv in &st_inv_tabs {
                    acc *= st_inv[km];
                }
            }
            for i in 0..=n {
                for j in (i + 1)..=n {
                    acc *= s_big_tab[midx(-kk[i] - kk[j], nn)];
                    acc *= unit_inv[midx(kk[i] - kk[j], nn)] * unit_inv[midx(kk[j] - kk[i], nn)];
                }
            }
            acc
        },
        grid,
    )
}

pub fn new_an_rhs(params: &NewAnParams, policy: &TruncationPolicy) -> Result<C64> {
    let bases = &params.bases;
    let c = crate::elliptic::pochhammer_norm(bases, policy)?;
    let big_s = params.big_s();
    let mut prod = ONE;
    for ti in &params.t {
        for sj in &params.s {
            prod *= elliptic_gamma(ti * sj, bases, policy)?;
            let den = elliptic_gamma(big_s * ti / sj, bases, policy)?;
            if den == ZERO {
                return Err(Error::DivisionByZero(format!(
                    "Gamma(S t s^-1) vanished for t={ti}, s={sj}"
                )));
            }
            prod /= den;
        }
    }
    let m = params.s.len();
    for i in 0..m {
        for j in (i + 1)..m {
            prod *= elliptic_gamma(big_s / (params.s[i] * params.s[j]), bases, policy)?;
        }
    }
    let fact: f64 = (1..=(params.n + 1)).map(|k| k as f64).product();
    Ok(fact * prod / c.powu(params.n as u32))
}

/// p -> 0 limit of the new A_n integral. `params.bases.p()` must be zero;
/// only `q` enters.
pub fn new_an_qlimit_lhs(
    params: &NewAnParams,
    grid: &TorusGrid,
    policy: &TruncationPolicy,
) -> Result<IntegralEstimate> {
    let n = params.n;
    if params.bases.p() != ZERO {
        return Err(Error::Domain("q-limit evaluator needs p = 0".into()));
    }
    if grid.dims() != n {
        return Err(Error::Domain(format!(
            "grid dimension {} does not match n = {n}",
            grid.dims()
        )));
    }
    params.preflight()?;
    let q = params.bases.q();
    let nn = grid.nodes_per_dim();
    let big_s = params.big_s();
    let unit_qp = unit_qpoch_table(grid, q, policy)?;
    let t_tabs: Vec<Vec<C64>> = params
        .t
        .iter()
        .map(|&v| qpoch_circle_table(v, grid, q, policy))
        .collect::<Result<_>>()?;
    let s_tabs: Vec<Vec<C64>> = params
        .s
        .iter()
        .map(|&v| qpoch_circle_table(v, grid, q, policy))
        .collect::<Result<_>>()?;
    let st_tabs: Vec<Vec<C64>> = params
        .t
        .iter()
        .map(|&v| qpoch_circle_table(big_s * v, grid, q, policy))
        .collect::<Result<_>>()?;
    let s_big_tab = qpoch_circle_table(big_s, grid, q, policy)?;

    torus_average_indexed(
        |idx| {
            let mut kk: Vec<i64> = idx.iter().map(|&k| k as i64).collect();
            let sum: i64 = kk.iter().sum();
            kk.push((-sum).rem_euclid(nn as i64));
            let mut num = ONE;
            let mut den = ONE;
            for &k in &kk {
                let kp = midx(k, nn);
                let km = midx(-k, nn);
                for st in &st_tabs {
                    num *= st[km];
                }
                for t_tab in &t_tabs {
                    den *= t_tab[kp];
                }
                for s_tab in &s_tabs {
                    den *= s_tab[km];
                }
            }
            for i in 0..=n {
                for j in (i + 1)..=n {
                    num *= unit_qp[midx(kk[i] - kk[j], nn)] * unit_qp[midx(kk[j] - kk[i], nn)];
                    den *= s_big_tab[midx(-kk[i] - kk[j], nn)];
                }
            }
            num / den
        },
        grid,
    )
}

pub fn new_an_qlimit_rhs(params: &NewAnParams, policy: &TruncationPolicy) -> Result<C64> {
    if params.bases.p() != ZERO {
        return Err(Error::Domain("q-limit evaluator needs p = 0".into()));
    }
    let q = params.bases.q();
    let big_s = params.big_s();
    let mut prod = ONE;
    for ti in &params.t {
        for sj in &params.s {
            prod *= qpochhammer_inf(big_s * ti / sj, q, policy)?;
            prod /= qpochhammer_inf(ti * sj, q, policy)?;
        }
    }
    let m = params.s.len();
    for i in 0..m {
        for j in (i + 1)..m {
            prod /= qpochhammer_inf(big_s / (params.s[i] * params.s[j]), q, policy)?;
        }
    }
    let qq = qpochhammer_inf(q, q, policy)?;
    let fact: f64 = (1..=(params.n + 1)).map(|k| k as f64).product();
    Ok(fact * prod / qq.powu(params.n as u32))
}

/// Relative error between an integral estimate and a closed form.
pub fn relative_error(lhs: C64, rhs: C64) -> f64 {
    let scale = lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
    (lhs - rhs).norm() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sixth_root_params() -> UnivariateBetaParams {
        let bases = Bases::new(c(0.09, 0.0), c(0.09, 0.0)).unwrap();
        let r = bases.pq().norm().powf(1.0 / 6.0);
        UnivariateBetaParams::new([c(r, 0.0); 6], bases).unwrap()
    }

    #[test]
    fn univariate_balancing_is_enforced() {
        let bases = Bases::new(c(0.1, 0.0), c(0.1, 0.0)).unwrap();
        let err = UnivariateBetaParams::new([c(0.5, 0.0); 6], bases);
        assert!(err.is_err());
    }

    #[test]
    fn univariate_identity_at_symmetric_point() {
        let params = sixth_root_params();
        let pol = TruncationPolicy::default();
        let grid = TorusGrid::new(1, 256).unwrap();
        let lhs = univariate_lhs(&params, &grid, UnivariateForm::Symmetric, &pol).unwrap();
        let rhs = univariate_rhs(&params, UnivariateForm::Symmetric, &pol).unwrap();
        assert!(
            relative_error(lhs.value, rhs) < 1e-10,
            "rel err {:.3e}",
            relative_error(lhs.value, rhs)
        );
    }

    #[test]
    fn univariate_rhs_pq_swap_invariance() {
        let bases = Bases::new(c(0.11, 0.02), c(0.07, -0.03)).unwrap();
        let r = 0.5;
        // five free parameters, solve the sixth
        let t5 = [c(r, 0.0), c(0.4, 0.1), c(-0.45, 0.1), c(0.3, -0.2), c(0.55, 0.0)];
        let prod5: C64 = t5.iter().product();
        let t6 = bases.pq() / prod5;
        let mut t = [ZERO; 6];
        t[..5].copy_from_slice(&t5);
        t[5] = t6;
        let pol = TruncationPolicy::default();
        let params = UnivariateBetaParams::new(t, bases).unwrap();
        let swapped = UnivariateBetaParams::new(t, bases.swapped()).unwrap();
        let a = univariate_rhs(&params, UnivariateForm::Symmetric, &pol).unwrap();
        let b = univariate_rhs(&swapped, UnivariateForm::Symmetric, &pol).unwrap();
        assert!(relative_error(a, b) < 1e-13);
    }

    #[test]
    fn five_parameter_form_matches_symmetric() {
        let params = sixth_root_params();
        let pol = TruncationPolicy::default();
        let grid = TorusGrid::new(1, 128).unwrap();
        let sym = univariate_rhs(&params, UnivariateForm::Symmetric, &pol).unwrap();
        let five = univariate_rhs(&params, UnivariateForm::FiveParameter, &pol).unwrap();
        assert!(relative_error(sym, five) < 1e-12);
        let lhs_sym = univariate_lhs(&params, &grid, UnivariateForm::Symmetric, &pol).unwrap();
        let lhs_five = univariate_lhs(&params, &grid, UnivariateForm::FiveParameter, &pol).unwrap();
        assert!(relative_error(lhs_sym.value, lhs_five.value) < 1e-12);
    }

    #[test]
    fn pole_too_close_is_typed() {
        let bases = Bases::new(c(0.09, 0.0), c(0.09, 0.0)).unwrap();
        let t5 = [c(0.97, 0.0), c(0.32, 0.0), c(0.32, 0.0), c(0.32, 0.0), c(0.32, 0.0)];
        let prod5: C64 = t5.iter().product();
        let t6 = bases.pq() / prod5;
        let mut t = [ZERO; 6];
        t[..5].copy_from_slice(&t5);
        t[5] = t6;
        let params = UnivariateBetaParams::new(t, bases).unwrap();
        let pol = TruncationPolicy::default();
        let grid = TorusGrid::new(1, 64).unwrap();
        let err = univariate_lhs(&params, &grid, UnivariateForm::Symmetric, &pol).unwrap_err();
        assert!(matches!(err, Error::PoleTooClose { .. }));
    }

    #[test]
    fn an_n1_reduces_to_univariate() {
        let bases = Bases::new(c(0.08, 0.01), c(0.06, -0.02)).unwrap();
        let s = vec![c(0.5, 0.1), c(0.4, -0.05), c(0.35, 0.0)];
        let t2 = vec![c(0.45, 0.0), c(0.3, 0.1)];
        let partial: C64 = s.iter().product::<C64>() * t2.iter().product::<C64>();
        let t3 = bases.pq() / partial;
        let mut t = t2.clone();
        t.push(t3);
        let pol = TruncationPolicy::default();
        let an = AnBetaParams::new(1, s.clone(), t.clone(), bases).unwrap();
        let mut u = [ZERO; 6];
        u[..3].copy_from_slice(&s);
        u[3..].copy_from_slice(&t);
        let uni = UnivariateBetaParams::new(u, bases).unwrap();
        let a = an_rhs(&an, &pol).unwrap();
        let b = univariate_rhs(&uni, UnivariateForm::Symmetric, &pol).unwrap();
        assert!(relative_error(a, b) < 1e-12, "rel err {:.3e}", relative_error(a, b));
    }

    #[test]
    fn cn_n1_reduces_to_univariate() {
        let bases = Bases::new(c(0.08, 0.01), c(0.06, -0.02)).unwrap();
        let t5 = [c(0.5, 0.1), c(0.4, -0.05), c(0.35, 0.0), c(0.45, 0.0), c(0.3, 0.1)];
        let prod5: C64 = t5.iter().product();
        let t6 = bases.pq() / prod5;
        let mut t = t5.to_vec();
        t.push(t6);
        let pol = TruncationPolicy::default();
        let cn = CnBetaParams::new(1, t.clone(), bases).unwrap();
        let mut u = [ZERO; 6];
        u.copy_from_slice(&t);
        let uni = UnivariateBetaParams::new(u, bases).unwrap();
        let a = cn_rhs(&cn, &pol).unwrap();
        let b = univariate_rhs(&uni, UnivariateForm::Symmetric, &pol).unwrap();
        assert!(relative_error(a, b) < 1e-13);
    }

    #[test]
    fn cn_rhs_permutation_invariance() {
        let bases = Bases::new(c(0.08, 0.01), c(0.06, -0.02)).unwrap();
        let t5 = [c(0.5, 0.1), c(0.4, -0.05), c(0.35, 0.0), c(0.45, 0.0), c(0.3, 0.1)];
        let prod5: C64 = t5.iter().product();
        let t6 = bases.pq() / prod5;
        let mut t = t5.to_vec();
        t.push(t6);
        let pol = TruncationPolicy::default();
        let a = cn_rhs(&CnBetaParams::new(1, t.clone(), bases).unwrap(), &pol).unwrap();
        t.swap(0, 3);
        t.swap(1, 5);
        let b = cn_rhs(&CnBetaParams::new(1, t, bases).unwrap(), &pol).unwrap();
        assert!(relative_error(a, b) < 1e-12);
    }
}
