use thiserror::Error;

/// Errors shared across the evaluation kernels.
///
/// Every failure mode is typed; identities are verified away from poles, and a
/// silent blow-up would hide bugs, so proximity checks raise instead of
/// returning huge values.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series does not converge: modulus {modulus} is not < 1")]
    NonConvergent { modulus: f64 },

    #[error("infinite product factor vanished at index {index}")]
    PoleHit { index: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument within {radius:.3e} (relative) of elliptic gamma pole p^-{mu} q^-{nu}")]
    NearPole { mu: u32, nu: u32, radius: f64 },

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("evaluation budget exceeded: {requested} nodes > cap {budget}")]
    BudgetExceeded { requested: u64, budget: u64 },

    #[error("integrand returned a non-finite value at node {index}")]
    NonFinite { index: u64 },

    #[error("pole family {family} at distance {distance:.4} from the unit torus (need >= {required})")]
    PoleTooClose {
        family: String,
        distance: f64,
        required: f64,
    },

    #[error("parameter sampling exhausted after {attempts} rejections")]
    SamplingExhausted { attempts: u32 },

    #[error("degenerate series denominator {factor} at lambda {lambda:?}")]
    DegenerateDenominator { lambda: Vec<u32>, factor: String },

    #[error("near-zero denominator: {0}")]
    NearZeroDenominator(String),

    #[error("kernel arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("|x| = 1 requires a principal-value prescription, which is unsupported")]
    PrincipalValueUnsupported,
}

pub type Result<T> = std::result::Result<T, Error>;
