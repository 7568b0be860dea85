//! Log-gamma based combinatorics and the scalar special functions used by
//! the distribution code and its diagnostics.

use std::sync::LazyLock;

const LN_FACT_TABLE_SIZE: usize = 1024;

static LN_FACT: LazyLock<Vec<f64>> = LazyLock::new(|| {
    (0..LN_FACT_TABLE_SIZE)
        .map(|n| libm::lgamma(n as f64 + 1.0))
        .collect()
});

/// Natural log of `n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < LN_FACT_TABLE_SIZE {
        LN_FACT[n as usize]
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// Natural log of the binomial coefficient C(n, k).
///
/// Returns negative infinity when `k > n`, matching the convention that the
/// coefficient itself is zero there.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Standard normal density at `z`.
pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal cdf, evaluated through `erfc` for accuracy in both tails.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Regularized upper incomplete gamma function Q(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if a.is_nan() || a <= 0.0 || x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - lower_gamma_series(a, x)
    } else {
        upper_gamma_cf(a, x)
    }
}

// P(a, x) by its power series; converges quickly for x < a + 1.
fn lower_gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut term = sum;
    for _ in 0..500 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (a * x.ln() - x - libm::lgamma(a)).exp()
}

// Q(a, x) by a continued fraction (modified Lentz); for x >= a + 1.
fn upper_gamma_cf(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (a * x.ln() - x - libm::lgamma(a)).exp() * h
}

/// Survival function of the chi-square distribution with `df` degrees of
/// freedom, i.e. P(X > x).
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    gamma_q(df / 2.0, x / 2.0)
}

/// Pearson goodness-of-fit test of observed counts against expected counts.
///
/// Adjacent cells are pooled left-to-right until each pooled cell has an
/// expected count of at least 5, keeping the chi-square approximation valid
/// in thin tails. Returns `(statistic, degrees_of_freedom, p_value)`.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> (f64, f64, f64) {
    assert_eq!(observed.len(), expected.len());
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (&o, &e) in observed.iter().zip(expected) {
        acc.0 += o as f64;
        acc.1 += e;
        if acc.1 >= 5.0 {
            cells.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.1 > 0.0 || acc.0 > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => cells.push(acc),
        }
    }
    if cells.len() < 2 {
        // everything pooled into one cell: nothing to reject with
        return (0.0, 0.0, 1.0);
    }
    let mut stat = 0.0;
    for &(o, e) in &cells {
        let d = o - e;
        stat += d * d / e;
    }
    let df = (cells.len() - 1) as f64;
    (stat, df, chi_square_sf(stat, df))
}

/// Two-sample chi-square homogeneity test on per-category counts.
///
/// Adjacent categories are pooled left-to-right until each pooled column has
/// a combined count of at least 10, which keeps the asymptotic chi-square
/// approximation honest in thin tails. Returns `(statistic,
/// degrees_of_freedom, p_value)`.
pub fn two_sample_chi_square(a: &[u64], b: &[u64]) -> (f64, f64, f64) {
    assert_eq!(a.len(), b.len());
    let mut cols: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        acc.0 += x as f64;
        acc.1 += y as f64;
        if acc.0 + acc.1 >= 10.0 {
            cols.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 + acc.1 > 0.0 {
        match cols.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => cols.push(acc),
        }
    }
    if cols.len() < 2 {
        return (0.0, 0.0, 1.0);
    }
    let row_a: f64 = cols.iter().map(|c| c.0).sum();
    let row_b: f64 = cols.iter().map(|c| c.1).sum();
    let total = row_a + row_b;
    let mut stat = 0.0;
    for &(x, y) in &cols {
        let col = x + y;
        let ea = row_a * col / total;
        let eb = row_b * col / total;
        stat += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
    }
    let df = (cols.len() - 1) as f64;
    (stat, df, chi_square_sf(stat, df))
}
