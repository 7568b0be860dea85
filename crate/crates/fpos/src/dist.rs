//! The univariate distribution of the k-th order statistic under simple
//! random sampling without replacement from the population `{1, ..., N}`.
//!
//! The mass function is
//!
//! ```text
//! P(X_(k) = x) = C(x-1, k-1) * C(N-x, n-k) / C(N, n),   x = k, ..., N-n+k,
//! ```
//!
//! a shifted beta-binomial. Everything here is computed through log-gamma
//! sums and exponentiated at the end, so population sizes up to about 10^6
//! stay usable; an exact big-rational route lives in [`crate::exact`].

use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma};
use serde::Serialize;

use crate::numeric::ln_binomial;
use crate::{Error, Result};

/// Parameters of one order-statistic distribution: rank `k`, sample size
/// `n`, population size `N`, with `1 <= k <= n <= N`.
///
/// # Example
///
/// ```
/// use fpos::OrderStatSpec;
///
/// let spec = OrderStatSpec::new(1, 2, 3).unwrap();
/// assert!((spec.pmf(1) - 2.0 / 3.0).abs() < 1e-14);
/// assert_eq!(spec.support(), 1..=2);
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderStatSpec {
    k: u64,
    n: u64,
    pop_size: u64,
}

/// Mean, variance, skewness and kurtosis as one record.
///
/// Skewness and kurtosis are `None` for the degenerate census case `n = N`,
/// where the variance is zero and neither is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSet {
    pub mean: f64,
    pub variance: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

/// One draw from the beta-binomial mixture, keeping the latent beta variate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureDraw {
    /// Latent uniform-order-statistic value in (0, 1).
    pub u: f64,
    /// The order-statistic value, in `[k, N-n+k]`.
    pub x: u64,
}

/// Moments of the scaled order statistic `X_(k) / (N+1)`.
///
/// The scaling puts the value inside the unit interval with the same mean as
/// the k-th order statistic of `n` IID uniforms; the variance carries the
/// extra factor `(N-n)/(N+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledMoments {
    pub mean: f64,
    pub variance: f64,
}

impl OrderStatSpec {
    /// Validates `1 <= k <= n <= N`.
    pub fn new(k: u64, n: u64, pop_size: u64) -> Result<Self> {
        if k < 1 || k > n || n > pop_size {
            return Err(Error::InvalidSpec { k, n, pop_size });
        }
        Ok(OrderStatSpec { k, n, pop_size })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn pop_size(&self) -> u64 {
        self.pop_size
    }

    /// Support of the distribution: `k ..= N-n+k`, of length `N-n+1`.
    pub fn support(&self) -> std::ops::RangeInclusive<u64> {
        self.k..=self.upper()
    }

    fn upper(&self) -> u64 {
        self.pop_size - self.n + self.k
    }

    /// True when `n = N`, i.e. the sample is a census and the distribution
    /// is a point mass at `k`.
    pub fn is_degenerate(&self) -> bool {
        self.n == self.pop_size
    }

    /// Probability mass at `x`; zero outside the support.
    pub fn pmf(&self, x: u64) -> f64 {
        let lp = self.log_pmf(x);
        if lp == f64::NEG_INFINITY {
            0.0
        } else {
            lp.exp()
        }
    }

    /// Natural log of the mass at `x`; negative infinity outside the support.
    pub fn log_pmf(&self, x: u64) -> f64 {
        if x < self.k || x > self.upper() {
            return f64::NEG_INFINITY;
        }
        ln_binomial(x - 1, self.k - 1) + ln_binomial(self.pop_size - x, self.n - self.k)
            - ln_binomial(self.pop_size, self.n)
    }

    /// The whole mass table over the support, indexed by `x - k`.
    ///
    /// Anchored at the mean in log space and extended with the exact ratio
    /// recurrence, so it costs one log-gamma evaluation plus O(support)
    /// multiplications. Far-tail entries that underflow f64 come out as zero.
    pub fn pmf_table(&self) -> Vec<f64> {
        let lo = self.k;
        let hi = self.upper();
        let len = (hi - lo + 1) as usize;
        let mut table = vec![0.0; len];
        let anchor = (self.moments().mean.round() as u64).clamp(lo, hi);
        let ai = (anchor - lo) as usize;
        table[ai] = self.pmf(anchor);
        // pmf(x+1)/pmf(x) = x/(x-k+1) * (N-n+k-x)/(N-x)
        let (kf, nf, popf) = (self.k as f64, self.n as f64, self.pop_size as f64);
        let hif = popf - nf + kf;
        for i in ai + 1..len {
            let x = (lo + i as u64 - 1) as f64;
            let ratio = x / (x - kf + 1.0) * (hif - x) / (popf - x);
            table[i] = table[i - 1] * ratio;
        }
        for i in (0..ai).rev() {
            let x = (lo + i as u64) as f64;
            let ratio = x / (x - kf + 1.0) * (hif - x) / (popf - x);
            table[i] = table[i + 1] / ratio;
        }
        table
    }

    /// P(X <= x). Zero below the support, one at and beyond its upper end.
    pub fn cdf(&self, x: u64) -> f64 {
        if x < self.k {
            return 0.0;
        }
        if x >= self.upper() {
            return 1.0;
        }
        (self.k..=x).map(|v| self.pmf(v)).sum()
    }

    /// Smallest `x` in the support with `cdf(x) >= p`, for `p` in (0, 1].
    pub fn quantile(&self, p: f64) -> Result<u64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                reason: format!("quantile level must lie in (0, 1], got {p}"),
            });
        }
        let mut acc = 0.0;
        for x in self.support() {
            acc += self.pmf(x);
            if acc >= p {
                return Ok(x);
            }
        }
        // the running sum can fall a few ulps short of 1 at p = 1
        Ok(self.upper())
    }

    /// Rising factorial moment `E[X (X+1) ... (X+r-1)]`, which has the
    /// closed form `(N+1)^(r) k^(r) / (n+1)^(r)` in rising-factorial
    /// notation. `r = 0` gives 1.
    pub fn factorial_moment(&self, r: u32) -> f64 {
        let (kf, nf, popf) = (self.k as f64, self.n as f64, self.pop_size as f64);
        (0..r)
            .map(|i| {
                let i = i as f64;
                (popf + 1.0 + i) * (kf + i) / (nf + 1.0 + i)
            })
            .product()
    }

    /// Mean, variance, skewness and kurtosis in closed form.
    ///
    /// For the census `n = N` the distribution is a point mass at `k`: the
    /// mean is `k`, the variance zero, and skewness/kurtosis are reported as
    /// undefined rather than through division by `N - n`.
    pub fn moments(&self) -> MomentSet {
        let (k, n, pop) = (self.k as f64, self.n as f64, self.pop_size as f64);
        let mean = (pop + 1.0) / (n + 1.0) * k;
        if self.is_degenerate() {
            return MomentSet {
                mean,
                variance: 0.0,
                skewness: None,
                kurtosis: None,
            };
        }
        let variance =
            (pop + 1.0) * (pop - n) / ((n + 1.0) * (n + 1.0) * (n + 2.0)) * k * (n - k + 1.0);
        let skewness = (n - 2.0 * k + 1.0)
            * (1.0 + 2.0 * (pop - n - 1.0) / (n + 3.0))
            * ((n + 2.0) / ((pop + 1.0) * (pop - n) * k * (n - k + 1.0))).sqrt();
        let kurtosis = 3.0
            + (n * (n + 1.0).powi(3) * (n + 2.0)
                / ((pop - n) * (n + 3.0) * (n + 4.0) * k * (n - k + 1.0))
                - 6.0 * (n + 1.0) * (n + 1.0) * (n + 2.0) / ((pop - n) * (n + 3.0) * (n + 4.0))
                + 6.0 * (pop + 1.0) * (n + 1.0) * (n + 1.0) * (n + 2.0)
                    / ((n + 3.0) * (n + 4.0) * k * (n - k + 1.0))
                - 6.0 * (pop + 1.0) * (5.0 * n + 11.0) / ((n + 3.0) * (n + 4.0)))
                / (pop + 1.0);
        MomentSet {
            mean,
            variance,
            skewness: Some(skewness),
            kurtosis: Some(kurtosis),
        }
    }

    /// Moments of the scaled order statistic `X_(k) / (N+1)`.
    pub fn scaled_moments(&self) -> ScaledMoments {
        let (k, n, pop) = (self.k as f64, self.n as f64, self.pop_size as f64);
        ScaledMoments {
            mean: k / (n + 1.0),
            variance: (pop - n) / (pop + 1.0) * k * (n - k + 1.0)
                / ((n + 1.0) * (n + 1.0) * (n + 2.0)),
        }
    }

    /// One draw through the mixture process
    /// `X ~ k + Bin(N-n, U)` with `U ~ Beta(k, n-k+1)`, returning the latent
    /// beta variate alongside the order-statistic value.
    ///
    /// The beta variate is generated as `G1 / (G1 + G2)` from two unit-scale
    /// gamma draws with shapes `k` and `n-k+1`.
    pub fn sample_mixture<R: Rng + ?Sized>(&self, rng: &mut R) -> MixtureDraw {
        let g1 = Gamma::new(self.k as f64, 1.0).expect("shape >= 1");
        let g2 = Gamma::new((self.n - self.k + 1) as f64, 1.0).expect("shape >= 1");
        self.mixture_draw(&g1, &g2, rng)
    }

    fn mixture_draw<R: Rng + ?Sized>(
        &self,
        g1: &Gamma<f64>,
        g2: &Gamma<f64>,
        rng: &mut R,
    ) -> MixtureDraw {
        let a = g1.sample(rng);
        let b = g2.sample(rng);
        let u = a / (a + b);
        let trials = self.pop_size - self.n;
        let count = Binomial::new(trials, u)
            .expect("beta variate is a probability")
            .sample(rng);
        MixtureDraw {
            u,
            x: self.k + count,
        }
    }

    /// `count` independent draws via the mixture process. Identical rng
    /// state gives identical output.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<u64> {
        let g1 = Gamma::new(self.k as f64, 1.0).expect("shape >= 1");
        let g2 = Gamma::new((self.n - self.k + 1) as f64, 1.0).expect("shape >= 1");
        (0..count)
            .map(|_| self.mixture_draw(&g1, &g2, rng).x)
            .collect()
    }
}

/// Shifted beta-binomial mass `BetaBin(x - k | N - n, k, n - k + 1)`,
/// computed on its own log-gamma route.
///
/// This is algebraically the same distribution as [`OrderStatSpec::pmf`] and
/// exists as an independent implementation of that identity for testing.
pub fn beta_binomial_pmf(spec: &OrderStatSpec, x: u64) -> f64 {
    if x < spec.k() || x > spec.pop_size() - spec.n() + spec.k() {
        return 0.0;
    }
    let (k, n, pop) = (spec.k(), spec.n(), spec.pop_size());
    let y = x - k;
    let trials = pop - n;
    // ln C(trials, y) + ln B(y + a, trials - y + b) - ln B(a, b),
    // a = k, b = n - k + 1, with integer beta functions via factorials
    let ln_beta = |a: u64, b: u64| {
        crate::numeric::ln_factorial(a - 1) + crate::numeric::ln_factorial(b - 1)
            - crate::numeric::ln_factorial(a + b - 1)
    };
    (ln_binomial(trials, y) + ln_beta(y + k, trials - y + n - k + 1) - ln_beta(k, n - k + 1)).exp()
}
