//! Shared fixtures for the sampler benchmarks.

use fpos::{Population, SimulationRequest};

/// The integer population `1..=N` as a [`Population`].
pub fn identity_population(pop_size: u64) -> Population {
    Population::new((1..=pop_size).map(|v| v as f64).collect()).expect("nonempty")
}

/// Evenly spaced ranks `step, 2*step, ...` for a sample of size `n`.
pub fn spread_ranks(n: u64, count: u64) -> Vec<u64> {
    let step = n / count;
    (1..=count).map(|i| i * step).collect()
}

/// The reference benchmark workload: N = 40, n = 20, six evenly spaced
/// ranks, with a caller-chosen number of simulations per call.
pub fn reference_request(sims: u64) -> SimulationRequest {
    SimulationRequest::new(identity_population(40), 20, spread_ranks(20, 6), sims)
        .expect("valid request")
}
