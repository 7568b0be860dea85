//! Normal approximation of the order-statistic distribution and its
//! diagnostics: asymptotic moments along proportional limit paths, the
//! normed-pointwise discrete approximation with its log-RMSE, heatmap grids
//! over all `(k, n)`, and the Kolmogorov-style distance used to check the
//! central limit behaviour numerically.

use serde::Serialize;

use crate::dist::{MomentSet, OrderStatSpec};
use crate::numeric::{std_normal_cdf, std_normal_pdf};
use crate::{Error, Result};

/// Largest population size [`heatmap`] will grid; the full grid has
/// N(N-1)/2 cells with O(N) work each, so this keeps a single call bounded.
pub const MAX_HEATMAP_POP: u64 = 2048;

// LRMSE of a perfect match would be log(0); the guard keeps CSV numeric.
const LRMSE_FLOOR: f64 = -690.7755278982137; // ln(1e-300)

/// A proportional limit path: sample a fraction `lambda` of the population
/// and look at the order statistic a fraction `phi` up the sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticRegime {
    lambda: f64,
    phi: f64,
    pop_size: u64,
}

impl AsymptoticRegime {
    pub fn new(lambda: f64, phi: f64, pop_size: u64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("sampling fraction must lie in (0, 1), got {lambda}"),
            });
        }
        if !(phi > 0.0 && phi < 1.0) {
            return Err(Error::InvalidParameter {
                name: "phi",
                reason: format!("rank fraction must lie in (0, 1), got {phi}"),
            });
        }
        if pop_size < 1 {
            return Err(Error::InvalidParameter {
                name: "pop_size",
                reason: "population size must be at least 1".into(),
            });
        }
        Ok(AsymptoticRegime {
            lambda,
            phi,
            pop_size,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn pop_size(&self) -> u64 {
        self.pop_size
    }

    /// The concrete spec induced by this path: `n = round(lambda N)` and
    /// `k = round(phi n)`, rounded to nearest and clamped into validity.
    pub fn induced_spec(&self) -> Result<OrderStatSpec> {
        let n = ((self.lambda * self.pop_size as f64).round() as u64).clamp(1, self.pop_size);
        let k = ((self.phi * n as f64).round() as u64).clamp(1, n);
        OrderStatSpec::new(k, n, self.pop_size)
    }
}

/// Asymptotic moments along the proportional path: to leading order the
/// mean is `phi N`, the variance `(1-lambda)/lambda * phi(1-phi) * N`, the
/// skewness `2(1/2-phi)(2-lambda) / sqrt(lambda(1-lambda)phi(1-phi) N)`,
/// and the kurtosis `3 + O(1/N)`; the distribution is asymptotically
/// unskewed and mesokurtic.
pub fn asymptotic_moments(regime: &AsymptoticRegime) -> MomentSet {
    let (lam, phi, pop) = (regime.lambda, regime.phi, regime.pop_size as f64);
    let pq = phi * (1.0 - phi);
    let mean = phi * pop;
    let variance = (1.0 - lam) / lam * pq * pop;
    let skewness = 2.0 * (0.5 - phi) * (2.0 - lam) / (lam * (1.0 - lam) * pq * pop).sqrt();
    let kurtosis =
        3.0 + (lam / (1.0 - lam) * (1.0 / pq - 6.0) + 6.0 / lam * (1.0 / pq - 5.0)) / pop;
    MomentSet {
        mean,
        variance,
        skewness: Some(skewness),
        kurtosis: Some(kurtosis),
    }
}

/// The normed-pointwise normal approximation: the normal density with the
/// exact mean and variance, evaluated at each support point and renormalized
/// to sum to one. Indexed by `x - k`, like [`OrderStatSpec::pmf_table`].
pub fn normal_approx_pmf(spec: &OrderStatSpec) -> Result<Vec<f64>> {
    if spec.is_degenerate() {
        return Err(Error::Degenerate(
            "the census distribution is a point mass; the normal approximation needs n < N",
        ));
    }
    let m = spec.moments();
    let sd = m.variance.sqrt();
    let mut table: Vec<f64> = spec
        .support()
        .map(|x| std_normal_pdf((x as f64 - m.mean) / sd))
        .collect();
    let total: f64 = table.iter().sum();
    for v in &mut table {
        *v /= total;
    }
    Ok(table)
}

/// Log root-mean-squared error of the normal approximation over the
/// support: `log sqrt( sum (pmf - approx)^2 / (N-n+1) )`.
///
/// A perfect match would be log of zero; the result is floored at
/// `ln(1e-300)` so downstream CSV stays numeric.
pub fn lrmse(spec: &OrderStatSpec) -> Result<f64> {
    let approx = normal_approx_pmf(spec)?;
    let exact = spec.pmf_table();
    let points = exact.len() as f64;
    let mse = exact
        .iter()
        .zip(&approx)
        .map(|(e, a)| (e - a) * (e - a))
        .sum::<f64>()
        / points;
    Ok((mse.sqrt().ln()).max(LRMSE_FLOOR))
}

/// One heatmap cell: the approximation error at a single `(k, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatmapCell {
    pub n: u64,
    pub k: u64,
    pub lrmse: f64,
}

/// LRMSE over every valid `(k, n)` with `n < N`, ordered by `n` then `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapGrid {
    pub pop_size: u64,
    pub cells: Vec<HeatmapCell>,
}

impl HeatmapGrid {
    /// CSV rendering: header `N,n,k,lrmse`, one row per cell, LF endings,
    /// shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,n,k,lrmse\n");
        for cell in &self.cells {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.pop_size, cell.n, cell.k, cell.lrmse
            ));
        }
        out
    }

    /// The cell with the smallest error (first such cell in row order).
    pub fn min_cell(&self) -> HeatmapCell {
        *self
            .cells
            .iter()
            .min_by(|a, b| a.lrmse.total_cmp(&b.lrmse))
            .expect("grid is nonempty")
    }

    pub fn median_lrmse(&self) -> f64 {
        let mut values: Vec<f64> = self.cells.iter().map(|c| c.lrmse).collect();
        values.sort_by(f64::total_cmp);
        let mid = values.len() / 2;
        if values.len() % 2 == 1 {
            values[mid]
        } else {
            0.5 * (values[mid - 1] + values[mid])
        }
    }
}

/// Approximation error for every `(k, n)` with `1 <= k <= n <= N-1`.
pub fn heatmap(pop_size: u64) -> Result<HeatmapGrid> {
    if pop_size < 3 {
        return Err(Error::InvalidParameter {
            name: "pop_size",
            reason: "a heatmap needs N >= 3".into(),
        });
    }
    if pop_size > MAX_HEATMAP_POP {
        return Err(Error::ResourceLimit(format!(
            "heatmap grid for N={pop_size} exceeds the N={MAX_HEATMAP_POP} guard"
        )));
    }
    let mut cells = Vec::with_capacity((pop_size * (pop_size - 1) / 2) as usize);
    for n in 1..pop_size {
        for k in 1..=n {
            let spec = OrderStatSpec::new(k, n, pop_size)?;
            cells.push(HeatmapCell {
                n,
                k,
                lrmse: lrmse(&spec)?,
            });
        }
    }
    Ok(HeatmapGrid { pop_size, cells })
}

/// Kolmogorov-style distance between the standardized order statistic and
/// the standard normal: the largest over support points of
/// `|P((X - mu)/sigma <= z) - Phi(z)|`.
pub fn standardized_cdf_distance(spec: &OrderStatSpec) -> Result<f64> {
    if spec.is_degenerate() {
        return Err(Error::Degenerate(
            "the census distribution has zero variance; standardization needs n < N",
        ));
    }
    let m = spec.moments();
    let sd = m.variance.sqrt();
    let table = spec.pmf_table();
    let mut cum = 0.0;
    let mut worst: f64 = 0.0;
    for (i, x) in spec.support().enumerate() {
        cum += table[i];
        let z = (x as f64 - m.mean) / sd;
        worst = worst.max((cum - std_normal_cdf(z)).abs());
    }
    Ok(worst)
}
