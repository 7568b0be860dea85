use thiserror::Error;

/// Errors produced by this crate.
///
/// Errors fall into two categories: parameter errors (the inputs are
/// structurally invalid) and resource/certification errors (the computation
/// cannot be carried out or certified within the given budget). The CLI maps
/// the former to exit code 2 and the latter to exit code 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The (k, n, N) triple violates 1 <= k <= n <= N.
    #[error("invalid order-statistic spec: k={k}, n={n}, N={pop_size}; require 1 <= k <= n <= N")]
    InvalidSpec { k: u64, n: u64, pop_size: u64 },

    /// A parameter other than the (k, n, N) triple is out of range.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An observation that cannot arise from any population, e.g. a maximum
    /// smaller than the sample size.
    #[error("impossible observation: {0}")]
    ImpossibleObservation(String),

    /// Skewness/kurtosis requested for a zero-variance (census) distribution.
    #[error("degenerate distribution (n = N): {0}")]
    Degenerate(&'static str),

    /// Exhaustive enumeration would exceed the subset budget.
    #[error("enumeration budget exceeded: C({pop_size},{n}) = {subsets} > {budget}")]
    BudgetExceeded {
        pop_size: u64,
        n: u64,
        subsets: u128,
        budget: u64,
    },

    /// A truncation error bound at the requested tolerance cannot be
    /// certified from the available prior tail information.
    #[error("cannot certify truncation error <= {tol}: {reason}")]
    Certification { tol: f64, reason: String },

    /// The prior assigns no mass to any population size consistent with the
    /// observation, so the posterior is undefined.
    #[error("prior is inconsistent with the observation (normalizing sum is zero)")]
    InconsistentPrior,

    /// A resource guard tripped (e.g. a heatmap grid too large to compute).
    #[error("resource limit: {0}")]
    ResourceLimit(String),
}

impl Error {
    /// Process exit code for the CLI: 2 for parameter errors, 3 for
    /// resource/certification errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidSpec { .. }
            | Error::InvalidParameter { .. }
            | Error::ImpossibleObservation(_)
            | Error::Degenerate(_)
            | Error::InconsistentPrior => 2,
            Error::BudgetExceeded { .. }
            | Error::Certification { .. }
            | Error::ResourceLimit(_) => 3,
        }
    }
}
