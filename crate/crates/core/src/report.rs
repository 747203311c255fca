//! Machine-readable verification records.
//!
//! One record per verified sample, emitted as one JSON object per line with
//! every numeric carried as a decimal string (Rust's shortest round-trip
//! formatting), so streams diff cleanly across languages and runs.

use crate::elliptic::C64;

pub const SCHEMA_VERSION: u32 = 1;

/// Grid or box metadata of the evaluation route.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridMeta {
    /// Torus quadrature over `n` variables with `N` nodes per dimension.
    Quadrature { n: usize, nodes: usize },
    /// Finite summation over the lattice box `0..=N_i`.
    LambdaBox { orders: Vec<u32> },
    /// Pointwise identity checks.
    Pointwise { points: usize },
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub identity_id: String,
    /// Exact decimal strings of every parameter (complex as re/im pairs).
    pub params: Vec<(String, C64)>,
    pub lhs: C64,
    pub rhs: C64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub grid: GridMeta,
    pub truncation_tolerance: f64,
    pub truncation_terms: usize,
    pub elapsed_ms: u64,
    pub pass: bool,
    pub conjecture_flag: bool,
}

fn dec(v: f64) -> String {
    format!("\"{v:?}\"")
}

fn complex(v: C64) -> String {
    format!("[{},{}]", dec(v.re), dec(v.im))
}

impl VerificationReport {
    pub fn new(
        identity_id: impl Into<String>,
        params: Vec<(String, C64)>,
        lhs: C64,
        rhs: C64,
        grid: GridMeta,
    ) -> Self {
        let abs_err = (lhs - rhs).norm();
        let rel_err = abs_err / lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
        VerificationReport {
            identity_id: identity_id.into(),
            params,
            lhs,
            rhs,
            abs_err,
            rel_err,
            grid,
            truncation_tolerance: 0.0,
            truncation_terms: 0,
            elapsed_ms: 0,
            pass: false,
            conjecture_flag: false,
        }
    }

    pub fn with_truncation(mut self, tolerance: f64, terms: usize) -> Self {
        self.truncation_tolerance = tolerance;
        self.truncation_terms = terms;
        self
    }

    pub fn with_elapsed(mut self, ms: u64) -> Self {
        self.elapsed_ms = ms;
        self
    }

    pub fn with_conjecture(mut self) -> Self {
        self.conjecture_flag = true;
        self
    }

    /// `pass` holds exactly when no error was raised and the relative error
    /// meets the threshold; errors never reach a report (they surface as
    /// diagnostics), so only the threshold is applied here.
    pub fn judged(mut self, threshold: f64) -> Self {
        self.pass = self.rel_err <= threshold;
        self
    }

    pub fn to_json_line(&self) -> String {
        let mut s = String::with_capacity(512);
        s.push_str(&format!(
            "{{\"schema\":{SCHEMA_VERSION},\"identity\":\"{}\",\"params\":{{",
            self.identity_id
        ));
        for (i, (k, v)) in self.params.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&format!("\"{k}\":{}", complex(*v)));
        }
        s.push_str("},");
        s.push_str(&format!(
            "\"lhs\":{},\"rhs\":{},\"abs_err\":{},\"rel_err\":{},",
            complex(self.lhs),
            complex(self.rhs),
            dec(self.abs_err),
            dec(self.rel_err)
        ));
        match &self.grid {
            GridMeta::Quadrature { n, nodes } => {
                s.push_str(&format!("\"grid\":{{\"n\":{n},\"N\":{nodes}}},"));
            }
            GridMeta::LambdaBox { orders } => {
                let list: Vec<String> = orders.iter().map(|v| v.to_string()).collect();
                s.push_str(&format!("\"grid\":{{\"lambda_box\":[{}]}},", list.join(",")));
            }
            GridMeta::Pointwise { points } => {
                s.push_str(&format!("\"grid\":{{\"points\":{points}}},"));
            }
        }
        s.push_str(&format!(
            "\"truncation\":{{\"tolerance\":{},\"K\":{}}},\"elapsed_ms\":{},\"pass\":{},\"conjecture\":{}}}",
            dec(self.truncation_tolerance),
            self.truncation_terms,
            self.elapsed_ms,
            self.pass,
            self.conjecture_flag
        ));
        s
    }

    /// The stable schema document printed by the CLI for `--schema`.
    pub fn schema_document() -> String {
        format!(
            concat!(
                "{{\"schema_version\":{},\"record\":{{",
                "\"schema\":\"int\",",
                "\"identity\":\"string\",",
                "\"params\":\"map name -> [re,im] decimal strings\",",
                "\"lhs\":\"[re,im] decimal strings\",",
                "\"rhs\":\"[re,im] decimal strings\",",
                "\"abs_err\":\"decimal string\",",
                "\"rel_err\":\"decimal string\",",
                "\"grid\":\"{{n,N}} | {{lambda_box}} | {{points}}\",",
                "\"truncation\":\"{{tolerance,K}}\",",
                "\"elapsed_ms\":\"int (0 unless --timings)\",",
                "\"pass\":\"bool\",",
                "\"conjecture\":\"bool\"",
                "}}}}"
            ),
            SCHEMA_VERSION
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_line_is_stable_and_string_numeric() {
        let r = VerificationReport::new(
            "univariate",
            vec![("t_1".into(), C64::new(0.5, -0.25))],
            C64::new(1.0, 0.0),
            C64::new(1.0, 1e-12),
            GridMeta::Quadrature { n: 1, nodes: 256 },
        )
        .with_truncation(1e-12, 30)
        .judged(1e-9);
        let line = r.to_json_line();
        assert!(line.contains("\"t_1\":[\"0.5\",\"-0.25\"]"));
        assert!(line.contains("\"grid\":{\"n\":1,\"N\":256}"));
        assert!(line.contains("\"pass\":true"));
        assert_eq!(line, r.to_json_line());
    }

    #[test]
    fn judged_applies_threshold() {
        let r = VerificationReport::new(
            "x",
            vec![],
            C64::new(1.0, 0.0),
            C64::new(1.001, 0.0),
            GridMeta::Pointwise { points: 1 },
        )
        .judged(1e-9);
        assert!(!r.pass);
    }
}
