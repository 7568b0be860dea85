//! Classical population-size estimation from order statistics (the German
//! tank problem).
//!
//! Scaling the k-th order statistic as `(n+1)/k * X_(k) - 1` gives an
//! unbiased estimator of the population size; `k = n` is the classical
//! serial-number estimator. The sampling model is simple random sampling
//! without replacement, and when `k < n` the higher order statistics must be
//! missing completely at random — unobserved for reasons unrelated to their
//! values. That assumption is the caller's to uphold; nothing here can check
//! it.

use rand::Rng;
use serde::Serialize;

use crate::normal::AsymptoticRegime;
use crate::{Error, Result};

/// A population-size estimate from one observed order statistic.
///
/// The estimate is real-valued by construction; [`EstimateResult::rounded`]
/// gives a round-half-up integer for display. The standard error is filled
/// in only on request, since the estimator's variance depends on the unknown
/// population size itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateResult {
    pub estimate: f64,
    pub k: u64,
    pub n: u64,
    pub standard_error: Option<f64>,
}

impl EstimateResult {
    /// Round-half-up integer form of the estimate, for display only.
    pub fn rounded(&self) -> u64 {
        (self.estimate + 0.5).floor() as u64
    }

    /// Attach the standard error computed at a hypothesized population size.
    pub fn with_standard_error_at(mut self, pop_size: f64) -> Result<Self> {
        self.standard_error = Some(estimator_variance(pop_size, self.n, self.k)?.sqrt());
        Ok(self)
    }

    /// Attach the plug-in standard error, using the estimate itself as the
    /// population size.
    pub fn with_plugin_standard_error(self) -> Result<Self> {
        let est = self.estimate;
        self.with_standard_error_at(est)
    }
}

/// `(n+1)/n * x_max - 1`: the unbiased estimator from the sample maximum.
pub fn estimate_from_max(n: u64, x_max: u64) -> Result<EstimateResult> {
    if n < 1 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "sample size must be at least 1".into(),
        });
    }
    if x_max < n {
        return Err(Error::ImpossibleObservation(format!(
            "a maximum of {x_max} cannot arise from a sample of {n} distinct serial numbers"
        )));
    }
    estimate_from_kth(n, n, x_max)
}

/// `(n+1)/k * x_k - 1`: the unbiased estimator from the k-th order
/// statistic. Reduces to [`estimate_from_max`] at `k = n`.
pub fn estimate_from_kth(n: u64, k: u64, x_k: u64) -> Result<EstimateResult> {
    if k < 1 || k > n {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("rank must satisfy 1 <= k <= n, got k={k}, n={n}"),
        });
    }
    if x_k < k {
        return Err(Error::ImpossibleObservation(format!(
            "the k-th smallest of distinct serial numbers is at least k, got x={x_k} with k={k}"
        )));
    }
    // multiply before dividing so integer-valued estimates come out exact
    let estimate = ((n + 1) as u128 * x_k as u128) as f64 / k as f64 - 1.0;
    Ok(EstimateResult {
        estimate,
        k,
        n,
        standard_error: None,
    })
}

/// Exact sampling variance of the estimator,
/// `(N+1)(N-n)/(n+2) * (n-k+1)/k`, at a given population size.
///
/// Strictly decreasing in `k` for fixed `n < N`: the highest observed order
/// statistic always estimates best.
pub fn estimator_variance(pop_size: f64, n: u64, k: u64) -> Result<f64> {
    if k < 1 || k > n {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("rank must satisfy 1 <= k <= n, got k={k}, n={n}"),
        });
    }
    if pop_size.is_nan() || pop_size < n as f64 {
        return Err(Error::InvalidParameter {
            name: "pop_size",
            reason: format!("population size {pop_size} is below the sample size {n}"),
        });
    }
    let (nf, kf) = (n as f64, k as f64);
    Ok((pop_size + 1.0) * (pop_size - nf) / (nf + 2.0) * (nf - kf + 1.0) / kf)
}

/// One row of a Monte Carlo consistency study: the empirical mean and
/// standard deviation of `N_hat / N` at one population size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsistencyRow {
    pub pop_size: u64,
    pub n: u64,
    pub k: u64,
    pub sims: u64,
    pub mean_ratio: f64,
    pub sd_ratio: f64,
}

/// Samples `X_(k)` at each population size along the limit path induced by
/// `(lambda, phi)` and tabulates how `N_hat / N` concentrates at 1.
///
/// Zero sims gives an empty table.
pub fn consistency_study<R: Rng + ?Sized>(
    lambda: f64,
    phi: f64,
    pop_sizes: &[u64],
    sims: u64,
    rng: &mut R,
) -> Result<Vec<ConsistencyRow>> {
    if sims == 0 {
        return Ok(Vec::new());
    }
    let mut rows = Vec::with_capacity(pop_sizes.len());
    for &pop_size in pop_sizes {
        let spec = AsymptoticRegime::new(lambda, phi, pop_size)?.induced_spec()?;
        let (k, n) = (spec.k(), spec.n());
        let draws = spec.sample(rng, sims as usize);
        let ratios: Vec<f64> = draws
            .into_iter()
            .map(|x| {
                let est = ((n + 1) as u128 * x as u128) as f64 / k as f64 - 1.0;
                est / pop_size as f64
            })
            .collect();
        let mean = ratios.iter().sum::<f64>() / sims as f64;
        let var =
            ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (sims - 1).max(1) as f64;
        rows.push(ConsistencyRow {
            pop_size,
            n,
            k,
            sims,
            mean_ratio: mean,
            sd_ratio: var.sqrt(),
        });
    }
    Ok(rows)
}
