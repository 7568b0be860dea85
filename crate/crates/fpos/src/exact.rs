//! Exact big-rational evaluation of the order-statistic distribution.
//!
//! The floating-point route in [`crate::dist`] goes through log-gamma sums;
//! this module computes the same quantities as ratios of big-integer
//! binomial coefficients instead. It exists for exact comparison against the
//! enumeration oracle and for the CLI's `--exact` mode, and is practical for
//! populations up to a few dozen.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dist::OrderStatSpec;

/// Exact binomial coefficient C(n, k); zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut result = BigInt::one();
    for i in 0..k {
        result *= BigInt::from(n - i);
        result /= BigInt::from(i + 1);
    }
    result
}

/// Exact probability mass at `x` as a big rational.
pub fn pmf(spec: &OrderStatSpec, x: u64) -> BigRational {
    let (k, n, pop) = (spec.k(), spec.n(), spec.pop_size());
    if x < k || x > pop - n + k {
        return BigRational::zero();
    }
    BigRational::new(
        binomial(x - 1, k - 1) * binomial(pop - x, n - k),
        binomial(pop, n),
    )
}

/// Exact cumulative probability P(X <= x).
pub fn cdf(spec: &OrderStatSpec, x: u64) -> BigRational {
    let mut total = BigRational::zero();
    for v in spec.support() {
        if v > x {
            break;
        }
        total += pmf(spec, v);
    }
    total
}

/// Exact mean `(N+1) k / (n+1)`.
pub fn mean(spec: &OrderStatSpec) -> BigRational {
    BigRational::new(
        BigInt::from((spec.pop_size() + 1) * spec.k()),
        BigInt::from(spec.n() + 1),
    )
}

/// Exact variance `(N+1)(N-n) k (n-k+1) / ((n+1)^2 (n+2))`.
pub fn variance(spec: &OrderStatSpec) -> BigRational {
    let (k, n, pop) = (
        BigInt::from(spec.k()),
        BigInt::from(spec.n()),
        BigInt::from(spec.pop_size()),
    );
    let one = BigInt::one();
    let numer = (&pop + &one) * (&pop - &n) * &k * (&n - &k + &one);
    let denom = (&n + &one) * (&n + &one) * (&n + BigInt::from(2));
    BigRational::new(numer, denom)
}

/// Exact rising factorial moment `(N+1)^(r) k^(r) / (n+1)^(r)`.
pub fn factorial_moment(spec: &OrderStatSpec, r: u32) -> BigRational {
    let mut result = BigRational::one();
    for i in 0..u64::from(r) {
        result *= BigRational::new(
            BigInt::from(spec.pop_size() + 1 + i) * BigInt::from(spec.k() + i),
            BigInt::from(spec.n() + 1 + i),
        );
    }
    result
}
