//! Bayesian inference for an unknown population size from a single observed
//! order statistic.
//!
//! Given `X_(k) = x` out of a sample of `n`, the likelihood of a population
//! size `N` is `(N-n)! (N-x)! / (N! (N-n-x+k)!)`. A prior mass function over
//! population sizes turns this into a posterior through the normalizing sum
//!
//! ```text
//! H(n, k, x, prior) = sum_{i >= n} L_x(i) * prior(i),
//! ```
//!
//! which rarely has a closed form. `H` is evaluated as a certified partial
//! sum: the factorial ratio is bounded by `1/N^k`, so the omitted tail past
//! a truncation point `N*` is at most `1/((k-1) N*^(k-1))` for `k >= 2`, and
//! at most the prior's own tail envelope in general. The reported value and
//! error bound always sandwich the true `H`.
//!
//! Posterior factorial moments are ratios of two certified sums — the
//! numerator is the falling-factorial-weighted variant of `H`, equal to the
//! shifted evaluation `H(n-r, k-r, x-r, pi_r)` — with their uncertainty
//! propagated by interval arithmetic.

use serde::Serialize;

use crate::numeric::ln_factorial;
use crate::{Error, Result};

/// Hard cap on the number of likelihood terms a single `H` evaluation may
/// sum; tolerances that would need more are refused as uncertifiable.
const MAX_H_TERMS: u64 = 100_000_000;

// term recurrence is re-anchored on a fresh log-gamma evaluation this often
const REANCHOR_EVERY: u64 = 1 << 20;

/// Prior mass over population sizes.
///
/// Masses must be nonnegative and at most one per point (all constructors
/// guarantee this); the power-law prior is used unnormalized, which is
/// harmless because posteriors are invariant to the prior's scale. Improper
/// priors are rejected at construction.
#[derive(Debug, Clone, PartialEq)]
pub enum Prior {
    /// Equal mass on each integer in `[lo, hi]`.
    Uniform { lo: u64, hi: u64 },
    /// All mass at one population size.
    PointMass { at: u64 },
    /// Mass proportional to `N^(-alpha)` for `N >= min`; `alpha > 1`.
    PowerLaw { alpha: f64, min: u64 },
    /// The reindexed prior `pi_r(i) = pi_0(i + r)` behind the shifted form
    /// of the factorial-moment identity.
    Shifted { base: Box<Prior>, by: u64 },
}

impl Prior {
    pub fn uniform(lo: u64, hi: u64) -> Result<Prior> {
        if lo < 1 || hi < lo {
            return Err(Error::InvalidParameter {
                name: "prior",
                reason: format!("uniform prior needs 1 <= lo <= hi, got [{lo}, {hi}]"),
            });
        }
        Ok(Prior::Uniform { lo, hi })
    }

    pub fn point_mass(at: u64) -> Result<Prior> {
        if at < 1 {
            return Err(Error::InvalidParameter {
                name: "prior",
                reason: "point-mass prior needs a positive population size".into(),
            });
        }
        Ok(Prior::PointMass { at })
    }

    pub fn power_law(alpha: f64, min: u64) -> Result<Prior> {
        if alpha.is_nan() || alpha <= 1.0 {
            return Err(Error::InvalidParameter {
                name: "prior",
                reason: format!("a power-law prior is proper only for alpha > 1, got {alpha}"),
            });
        }
        if min < 1 {
            return Err(Error::InvalidParameter {
                name: "prior",
                reason: "power-law prior needs min >= 1".into(),
            });
        }
        Ok(Prior::PowerLaw { alpha, min })
    }

    /// The prior `pi_r(i) = pi_0(i + r)`.
    pub fn shifted(self, by: u64) -> Prior {
        if by == 0 {
            return self;
        }
        match self {
            Prior::Shifted { base, by: prev } => Prior::Shifted {
                base,
                by: prev + by,
            },
            other => Prior::Shifted {
                base: Box::new(other),
                by,
            },
        }
    }

    /// Prior mass at population size `i >= 1`.
    pub fn mass(&self, i: u64) -> f64 {
        match self {
            Prior::Uniform { lo, hi } => {
                if i >= *lo && i <= *hi {
                    1.0 / (hi - lo + 1) as f64
                } else {
                    0.0
                }
            }
            Prior::PointMass { at } => {
                if i == *at {
                    1.0
                } else {
                    0.0
                }
            }
            Prior::PowerLaw { alpha, min } => {
                if i >= *min {
                    (i as f64).powf(-alpha)
                } else {
                    0.0
                }
            }
            Prior::Shifted { base, by } => base.mass(i + by),
        }
    }

    /// Upper end of the support when it is finite.
    pub fn support_max(&self) -> Option<u64> {
        match self {
            Prior::Uniform { hi, .. } => Some(*hi),
            Prior::PointMass { at } => Some(*at),
            Prior::PowerLaw { .. } => None,
            Prior::Shifted { base, by } => base.support_max().map(|m| m.saturating_sub(*by)),
        }
    }

    /// Certified upper envelope for the tail mass `sum_{i > beyond} mass(i)`.
    pub fn tail_bound(&self, beyond: u64) -> Option<f64> {
        match self {
            Prior::Uniform { lo, hi } => {
                let above = if beyond >= *hi {
                    0
                } else {
                    hi - beyond.max(lo - 1)
                };
                Some(above as f64 / (hi - lo + 1) as f64)
            }
            Prior::PointMass { at } => Some(if beyond >= *at { 0.0 } else { 1.0 }),
            Prior::PowerLaw { alpha, min } => {
                // integral bound: sum_{i > b} i^-a <= b^(1-a) / (a-1)
                let b = beyond.max(min.saturating_sub(1)).max(1) as f64;
                Some(b.powf(1.0 - alpha) / (alpha - 1.0))
            }
            Prior::Shifted { base, by } => base.tail_bound(beyond + by),
        }
    }
}

/// A certified partial evaluation of the scaling function `H`: the true
/// value lies in `[value, value + error_bound]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HValue {
    pub value: f64,
    pub truncation_point: u64,
    pub error_bound: f64,
}

/// A value carrying a certified absolute error half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certified {
    pub value: f64,
    pub error_bound: f64,
}

/// Unnormalized likelihood of population size `N` given `X_(k) = x` from a
/// sample of `n`: `(N-n)! (N-x)! / (N! (N-n-x+k)!)`, computed in log space.
/// Zero for `N < n` or `N < n + x - k`, where the observation is impossible.
pub fn likelihood(pop_size: u64, n: u64, k: u64, x: u64) -> Result<f64> {
    check_observation(n, k, x)?;
    Ok(likelihood_term(pop_size, n, k, x))
}

fn check_observation(n: u64, k: u64, x: u64) -> Result<()> {
    if n < 1 || k < 1 || k > n {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("need 1 <= k <= n, got k={k}, n={n}"),
        });
    }
    if x < k {
        return Err(Error::ImpossibleObservation(format!(
            "the k-th smallest of distinct values is at least k, got x={x} with k={k}"
        )));
    }
    Ok(())
}

// first index with a structurally possible likelihood term; can be zero in
// the reindexed sums behind shifted factorial moments
fn term_start(n: u64, k: u64, x: u64) -> u64 {
    n.max((n + x).saturating_sub(k))
}

fn likelihood_term(i: u64, n: u64, k: u64, x: u64) -> f64 {
    if i < term_start(n, k, x) {
        return 0.0;
    }
    (ln_factorial(i - n) + ln_factorial(i - x) - ln_factorial(i) - ln_factorial(i + k - n - x))
        .exp()
}

/// The partial sum `H_{N*}` with its certified truncation error bound.
///
/// The bound is the smallest of the applicable envelopes at this `N*`: zero
/// once the prior support is exhausted, `1/((k-1) N*^(k-1))` for `k >= 2`,
/// and the prior tail envelope (optionally sharpened by `1/N*^k`). Runs the
/// likelihood-term recurrence with periodic log-gamma re-anchoring and
/// compensated summation.
pub fn h_truncated(n: u64, k: u64, x: u64, prior: &Prior, n_star: u64) -> Result<HValue> {
    check_observation(n, k, x)?;
    Ok(h_truncated_unchecked(n, k, x, prior, n_star))
}

fn h_truncated_unchecked(n: u64, k: u64, x: u64, prior: &Prior, n_star: u64) -> HValue {
    h_weighted_truncated(n, k, x, 0, prior, n_star)
}

// The partial sum of (i)_r * L_x(i) * prior(i) up to n_star. With r = 0
// this is the plain H; with r >= 1 it is the numerator of the r-th
// posterior falling factorial moment, summed over the original index so no
// argument ever goes negative. The weighted terms decay like 1/i^(k-r),
// which drives the error bound.
fn h_weighted_truncated(n: u64, k: u64, x: u64, r: u64, prior: &Prior, n_star: u64) -> HValue {
    // (i)_r vanishes below i = r
    let start = term_start(n, k, x).max(r);
    let mut sum = 0.0;
    let mut comp = 0.0;
    if start <= n_star {
        let ln_weighted = |i: u64| {
            ln_factorial(i) - ln_factorial(i - r)
                + (ln_factorial(i - n) + ln_factorial(i - x)
                    - ln_factorial(i)
                    - ln_factorial(i + k - n - x))
        };
        let mut term = ln_weighted(start).exp();
        let mut i = start;
        loop {
            let mass = prior.mass(i);
            if mass > 0.0 {
                // Kahan step
                let y = term * mass - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            if i == n_star {
                break;
            }
            i += 1;
            if (i - start).is_multiple_of(REANCHOR_EVERY) {
                term = ln_weighted(i).exp();
            } else {
                // term(i) / term(i-1), including the (i)_r / (i-1)_r factor
                term *= (i - n) as f64 * (i - x) as f64 / (i as f64 * (i + k - n - x) as f64);
                term *= i as f64 / (i - r) as f64;
            }
        }
    }
    HValue {
        value: sum,
        truncation_point: n_star,
        error_bound: truncation_bound(k as i64 - r as i64, prior, n_star),
    }
}

// Smallest valid envelope for the omitted weighted tail past n_star, where
// the terms are bounded by 1/i^k_eff (k_eff = k - r, possibly negative).
// With a growing weight only an exhausted finite support certifies.
fn truncation_bound(k_eff: i64, prior: &Prior, n_star: u64) -> f64 {
    if let Some(hi) = prior.support_max() {
        if n_star >= hi {
            return 0.0;
        }
    }
    let mut best = f64::INFINITY;
    if k_eff >= 2 && n_star >= 1 {
        best = best.min(1.0 / ((k_eff - 1) as f64 * (n_star as f64).powi(k_eff as i32 - 1)));
    }
    if k_eff >= 0 {
        if let Some(tail) = prior.tail_bound(n_star) {
            // the weighted factorial ratio is at most 1/N^k_eff <= 1
            best = best.min(tail);
            if n_star >= 1 {
                best = best.min(tail / (n_star as f64).powi(k_eff as i32));
            }
        }
    }
    best
}

// smallest truncation point certifying error <= tol, if one is reachable
fn required_truncation(k_eff: i64, prior: &Prior, tol: f64) -> Result<u64> {
    let mut best: Option<u64> = prior.support_max();
    if k_eff >= 2 {
        let exact = (1.0 / ((k_eff - 1) as f64 * tol))
            .powf(1.0 / (k_eff - 1) as f64)
            .ceil();
        if exact <= MAX_H_TERMS as f64 {
            best = Some(best.map_or(exact as u64, |b| b.min(exact as u64)));
        }
    }
    if k_eff >= 0 && prior.tail_bound(1).is_some() {
        // tail envelopes are nonincreasing, so double until the combined
        // bound clears the tolerance
        let mut n_star = 64u64;
        while n_star <= MAX_H_TERMS && truncation_bound(k_eff, prior, n_star) > tol {
            n_star *= 2;
        }
        if n_star <= MAX_H_TERMS {
            best = Some(best.map_or(n_star, |b| b.min(n_star)));
        }
    }
    match best {
        Some(n_star) if n_star <= MAX_H_TERMS => Ok(n_star),
        _ => Err(Error::Certification {
            tol,
            reason: format!(
                "no available tail envelope reaches the tolerance within {MAX_H_TERMS} terms \
                 (effective decay exponent {k_eff})"
            ),
        }),
    }
}

/// The scaling function `H(n, k, x, prior)` evaluated to a certified
/// truncation error of at most `tol`.
pub fn h_function(n: u64, k: u64, x: u64, prior: &Prior, tol: f64) -> Result<HValue> {
    check_observation(n, k, x)?;
    check_tol(tol)?;
    let n_star = required_truncation(k as i64, prior, tol)?;
    Ok(h_truncated_unchecked(n, k, x, prior, n_star))
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("tolerance must be positive, got {tol}"),
        });
    }
    Ok(())
}

/// Posterior mass `P(N = i | n, k, x)` under the given prior.
pub fn posterior_pmf(i: u64, n: u64, k: u64, x: u64, prior: &Prior, tol: f64) -> Result<f64> {
    let h = h_function(n, k, x, prior, tol)?;
    if h.value <= 0.0 {
        return Err(Error::InconsistentPrior);
    }
    Ok(likelihood_term(i, n, k, x) * prior.mass(i) / h.value)
}

/// Posterior falling factorial moment `E[(N)_r | n, k, x]` as the ratio of
/// two certified sums — the numerator equals the shifted evaluation
/// `H(n-r, k-r, x-r, pi_r)` and is summed in weighted form over the
/// original index. The interval half-width of the quotient is reported as
/// the error bound.
///
/// The weighted terms decay like `1/i^(k-r)`, so for `r >= k` (where they
/// stop decaying or grow) certification needs a finite-support prior.
pub fn posterior_factorial_moment(
    r: u64,
    n: u64,
    k: u64,
    x: u64,
    prior: &Prior,
    tol: f64,
) -> Result<Certified> {
    check_observation(n, k, x)?;
    check_tol(tol)?;
    if r == 0 {
        return Ok(Certified {
            value: 1.0,
            error_bound: 0.0,
        });
    }
    let den = h_function(n, k, x, prior, tol)?;
    if den.value <= 0.0 {
        return Err(Error::InconsistentPrior);
    }
    let num_star = required_truncation(k as i64 - r as i64, prior, tol)?;
    let num = h_weighted_truncated(n, k, x, r, prior, num_star);
    let lo = num.value / (den.value + den.error_bound);
    let hi = (num.value + num.error_bound) / den.value;
    Ok(Certified {
        value: 0.5 * (lo + hi),
        error_bound: 0.5 * (hi - lo),
    })
}

/// Posterior mean and variance via the H-ratio factorial moments: the mean
/// is `E[(N)_1]` and the variance `E[(N)_2] + mean - mean^2`, which is the
/// same algebra as the paper-form ratio display. Error bounds are interval
/// half-widths.
pub fn posterior_mean_variance(
    n: u64,
    k: u64,
    x: u64,
    prior: &Prior,
    tol: f64,
) -> Result<(Certified, Certified)> {
    let mean = posterior_factorial_moment(1, n, k, x, prior, tol)?;
    let second = posterior_factorial_moment(2, n, k, x, prior, tol)?;
    let (m_lo, m_hi) = (mean.value - mean.error_bound, mean.value + mean.error_bound);
    let (s_lo, s_hi) = (
        second.value - second.error_bound,
        second.value + second.error_bound,
    );
    // v = s + m - m^2 is monotone in s and, for m >= 1/2, antitone in m
    let v_lo = s_lo + m_lo - m_hi * m_hi;
    let v_hi = s_hi + m_hi - m_lo * m_lo;
    Ok((
        mean,
        Certified {
            value: 0.5 * (v_lo + v_hi),
            error_bound: 0.5 * (v_hi - v_lo),
        },
    ))
}

/// The full posterior summary emitted by the CLI: masses from the structural
/// support minimum through the truncation point, plus certified moments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorTable {
    pub support_min: u64,
    pub masses: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub error_bound: f64,
    pub truncation_point: u64,
}

/// Computes the posterior mass table together with its H-ratio moments.
pub fn posterior_summary(
    n: u64,
    k: u64,
    x: u64,
    prior: &Prior,
    tol: f64,
) -> Result<PosteriorTable> {
    let h = h_function(n, k, x, prior, tol)?;
    if h.value <= 0.0 {
        return Err(Error::InconsistentPrior);
    }
    let support_min = term_start(n, k, x);
    let masses: Vec<f64> = (support_min..=h.truncation_point)
        .map(|i| likelihood_term(i, n, k, x) * prior.mass(i) / h.value)
        .collect();
    let (mean, variance) = posterior_mean_variance(n, k, x, prior, tol)?;
    Ok(PosteriorTable {
        support_min,
        masses,
        mean: mean.value,
        variance: variance.value,
        error_bound: mean.error_bound.max(variance.error_bound),
        truncation_point: h.truncation_point,
    })
}
