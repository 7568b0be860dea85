//! Order statistics under simple random sampling without replacement from a
//! finite population.
//!
//! The k-th smallest value in a without-replacement sample of size `n` from
//! the population `{1, ..., N}` follows a shifted beta-binomial law. This
//! crate provides that distribution exactly (pmf, cdf, quantile, moments,
//! mixture-based sampling), the joint law of several order statistics and its
//! Dirichlet-multinomial form, a rank-based simulation algorithm for
//! arbitrary finite populations, classical and Bayesian population-size
//! estimators, normal-approximation diagnostics, and a brute-force
//! enumeration oracle used to verify all of the above at small sizes.

pub mod bayes;
pub mod dist;
pub mod exact;
pub mod joint;
pub mod normal;
pub mod numeric;
pub mod oracle;
pub mod sampler;
pub mod tank;

mod error;

pub use dist::{MixtureDraw, MomentSet, OrderStatSpec, ScaledMoments};
pub use error::Error;
pub use joint::{DeltaVectors, RankSet};
pub use sampler::{BenchReport, Population, SimulationRequest};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
