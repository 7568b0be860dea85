//! Order-statistic simulation for an arbitrary finite population, and the
//! benchmark comparing the rank-based method against sample-and-sort.
//!
//! The rank-based method generates a requested vector of order statistics
//! without materializing the sample: gamma draws with the rank-gap shapes
//! normalize to a Dirichlet vector, a multinomial spreads the `N - n`
//! out-of-sample elements across the gaps, and cumulative counts shift the
//! ranks to their order-statistic values, which are then mapped through the
//! sorted population. Its cost scales with the number of requested ranks
//! rather than the sample size, so it shines when few ranks are needed; with
//! all ranks requested it may be no faster than sorting the sample.

use std::time::Instant;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma};
use serde::Serialize;

use crate::dist::OrderStatSpec;
use crate::{Error, Result};

/// A finite population of real values, held sorted; duplicates are allowed.
///
/// The rank-to-value map `omega(r)` is position `r` (1-based) in the sorted
/// order. It is generally not injective, so the preimage of a value is a
/// contiguous run of ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    values: Vec<f64>,
}

impl Population {
    /// Sorts the values on construction. Rejects empty and non-finite input.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter {
                name: "population",
                reason: "population must contain at least one value".into(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "population",
                reason: "population values must be finite".into(),
            });
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Population { values })
    }

    /// Parses the population file format: one plain decimal value per line,
    /// with blank lines ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line.parse().map_err(|_| Error::InvalidParameter {
                name: "population",
                reason: format!("line {}: not a decimal value: {line:?}", lineno + 1),
            })?;
            values.push(v);
        }
        Population::new(values)
    }

    pub fn size(&self) -> u64 {
        self.values.len() as u64
    }

    /// The sorted values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `omega(rank)`: the value at a 1-based rank in the sorted population.
    pub fn value_at_rank(&self, rank: u64) -> f64 {
        self.values[(rank - 1) as usize]
    }

    /// `omega^{-1}(z)`: the 1-based rank range holding `z`, found by binary
    /// search for the value's contiguous run. Empty if `z` is not attained.
    pub fn preimage(&self, z: f64) -> std::ops::Range<u64> {
        let lo = self.values.partition_point(|&v| v < z) as u64;
        let hi = self.values.partition_point(|&v| v <= z) as u64;
        lo + 1..hi + 1
    }
}

/// One simulation job: which population, how large a sample, which ranks
/// (in any order, kept as given for output), and how many simulations.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRequest {
    population: Population,
    sample_size: u64,
    ranks: Vec<u64>,
    sims: u64,
}

impl SimulationRequest {
    pub fn new(
        population: Population,
        sample_size: u64,
        ranks: Vec<u64>,
        sims: u64,
    ) -> Result<Self> {
        if sample_size < 1 || sample_size > population.size() {
            return Err(Error::InvalidParameter {
                name: "sample_size",
                reason: format!(
                    "need 1 <= n <= N, got n={sample_size} with N={}",
                    population.size()
                ),
            });
        }
        if ranks.is_empty() {
            return Err(Error::InvalidParameter {
                name: "ranks",
                reason: "at least one rank is required".into(),
            });
        }
        if ranks.iter().any(|&k| k < 1 || k > sample_size) {
            return Err(Error::InvalidParameter {
                name: "ranks",
                reason: format!("ranks must lie in [1, {sample_size}], got {ranks:?}"),
            });
        }
        let mut seen = ranks.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter {
                name: "ranks",
                reason: format!("ranks must be distinct, got {ranks:?}"),
            });
        }
        Ok(SimulationRequest {
            population,
            sample_size,
            ranks,
            sims,
        })
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn sample_size(&self) -> u64 {
        self.sample_size
    }

    /// Ranks in the caller's original order.
    pub fn ranks(&self) -> &[u64] {
        &self.ranks
    }

    pub fn sims(&self) -> u64 {
        self.sims
    }
}

/// Simulation output: one row per simulation, one column per requested rank,
/// columns in the caller's original rank order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    data: Vec<f64>,
    cols: usize,
}

impl SampleMatrix {
    fn with_capacity(rows: u64, cols: usize) -> Self {
        SampleMatrix {
            data: Vec::with_capacity(rows as usize * cols),
            cols,
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_count(&self) -> usize {
        self.data.len().checked_div(self.cols).unwrap_or(0)
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    /// CSV rendering: one simulation per row, LF endings, no trailing
    /// delimiter, shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        out
    }
}

// below this many out-of-sample elements, per-trial bucketing beats the
// conditional-binomial chain (whose divisions and variable-length cdf scans
// serialize badly at small counts)
const BUCKETING_MAX_TRIALS: u64 = 64;

// one conditioned binomial of the sequential multinomial decomposition
fn draw_binomial<R: Rng + ?Sized>(trials: u64, p: f64, rng: &mut R) -> u64 {
    let p = p.clamp(0.0, 1.0);
    if trials == 0 || p == 0.0 {
        return 0;
    }
    if p == 1.0 {
        return trials;
    }
    Binomial::new(trials, p)
        .expect("p is a probability")
        .sample(rng)
}

/// Rank-based simulation of order-statistic vectors.
///
/// Per simulation: draw `r + 1` unit-scale gamma variates with the rank-gap
/// shapes, normalize to a Dirichlet weight vector, spread the `N - n`
/// out-of-sample elements over the gaps by a multinomial draw, shift each
/// sorted rank by its cumulative gap count, and map the resulting positions
/// through the sorted population. Output columns follow the caller's
/// original rank order; identical rng state gives identical output.
///
/// The multinomial itself is drawn per-trial against the cumulative gamma
/// weights when `N - n` is small, and by sequential conditional binomials
/// when it is large, so cost stays O(r) per simulation for big populations.
pub fn sample_order_stats<R: Rng + ?Sized>(req: &SimulationRequest, rng: &mut R) -> SampleMatrix {
    let r = req.ranks.len();
    // sorted ranks plus, for each output column, its position after sorting
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_unstable_by_key(|&i| req.ranks[i]);
    let mut sorted_ranks = vec![0u64; r];
    let mut col_of_output = vec![0usize; r];
    for (pos, &orig) in order.iter().enumerate() {
        sorted_ranks[pos] = req.ranks[orig];
        col_of_output[orig] = pos;
    }
    // rank-gap shapes (k1, k2-k1, ..., n-kr+1), all at least 1
    let mut shapes = Vec::with_capacity(r + 1);
    shapes.push(sorted_ranks[0]);
    for w in sorted_ranks.windows(2) {
        shapes.push(w[1] - w[0]);
    }
    shapes.push(req.sample_size - sorted_ranks[r - 1] + 1);
    let gammas: Vec<Gamma<f64>> = shapes
        .iter()
        .map(|&s| Gamma::new(s as f64, 1.0).expect("shape >= 1"))
        .collect();
    let trials = req.population.size() - req.sample_size;

    let mut out = SampleMatrix::with_capacity(req.sims, r);
    let mut draws = vec![0.0f64; r + 1];
    let mut cum_weight = vec![0.0f64; r];
    let mut cum_counts = vec![0u64; r];
    for _ in 0..req.sims {
        let mut total = 0.0;
        for (d, g) in draws.iter_mut().zip(&gammas) {
            *d = g.sample(rng);
            total += *d;
        }
        if trials <= BUCKETING_MAX_TRIALS {
            // cum_counts[i] = number of trials landing below the i-th
            // cumulative weight; the comparison loop is branch-free
            let mut acc = 0.0;
            for (cw, &d) in cum_weight.iter_mut().zip(&draws[..r]) {
                acc += d;
                *cw = acc;
            }
            cum_counts.fill(0);
            for _ in 0..trials {
                let v = rng.random::<f64>() * total;
                for (count, &cw) in cum_counts.iter_mut().zip(&cum_weight) {
                    *count += u64::from(v < cw);
                }
            }
        } else {
            let mut remaining = trials;
            let mut weight = total;
            let mut cum = 0u64;
            for (&d, count) in draws[..r].iter().zip(&mut cum_counts) {
                let c = draw_binomial(remaining, d / weight, rng);
                cum += c;
                remaining -= c;
                weight -= d;
                *count = cum;
            }
        }
        for &col in &col_of_output {
            out.data.push(
                req.population
                    .value_at_rank(sorted_ranks[col] + cum_counts[col]),
            );
        }
    }
    out
}

/// The standard method: generate the whole sample, sort it, extract the
/// requested ranks, map through the population. Distributionally identical
/// to [`sample_order_stats`].
///
/// Sampling without replacement is a partial Fisher-Yates pass over an index
/// pool; the pool stays a permutation between simulations, so it never needs
/// resetting.
pub fn naive_sample_order_stats<R: Rng + ?Sized>(
    req: &SimulationRequest,
    rng: &mut R,
) -> SampleMatrix {
    let pop_size = req.population.size() as usize;
    let n = req.sample_size as usize;
    let mut pool: Vec<u64> = (1..=req.population.size()).collect();
    let mut sample = vec![0u64; n];
    let mut out = SampleMatrix::with_capacity(req.sims, req.ranks.len());
    for _ in 0..req.sims {
        for i in 0..n {
            let j = rng.random_range(i..pop_size);
            pool.swap(i, j);
        }
        sample.copy_from_slice(&pool[..n]);
        sample.sort_unstable();
        for &k in &req.ranks {
            out.data
                .push(req.population.value_at_rank(sample[(k - 1) as usize]));
        }
    }
    out
}

/// Mass function of the k-th order statistic of a sample from an arbitrary
/// finite population: the rank-order mass summed over the preimage of `z`.
/// Zero if `z` is not attained by the population.
pub fn generalized_pmf(population: &Population, k: u64, n: u64, z: f64) -> Result<f64> {
    let spec = OrderStatSpec::new(k, n, population.size())?;
    Ok(population.preimage(z).map(|x| spec.pmf(x)).sum())
}

/// Expectation `E[f(Z_(k))]` case by case over the rank support.
pub fn generalized_expectation(
    population: &Population,
    k: u64,
    n: u64,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    let spec = OrderStatSpec::new(k, n, population.size())?;
    Ok(spec
        .support()
        .map(|x| f(population.value_at_rank(x)) * spec.pmf(x))
        .sum())
}

const KILOSORT_BATCH: u32 = 32;
const KILOSORT_SAMPLES: usize = 31;

/// Calibrates the machine-relative time unit: the wall time of sorting the
/// descending sequence `1000..1` into ascending order.
///
/// Each measurement times a batch of 32 rebuild-and-sort passes on a
/// monotone clock and divides; the unit is the median over 31 such
/// measurements, with the sorted output consumed so the work cannot be
/// eliminated. Returns seconds per sort, always positive.
pub fn kilosort_unit() -> f64 {
    let template: Vec<u32> = (1..=1000).rev().collect();
    let mut scratch = template.clone();
    let mut samples = [0.0f64; KILOSORT_SAMPLES];
    let mut guard = 0u32;
    for sample in &mut samples {
        let start = Instant::now();
        for _ in 0..KILOSORT_BATCH {
            scratch.copy_from_slice(&template);
            scratch.sort_unstable();
            guard ^= std::hint::black_box(scratch[0]);
        }
        *sample = start.elapsed().as_secs_f64() / KILOSORT_BATCH as f64;
    }
    std::hint::black_box(guard);
    samples.sort_unstable_by(f64::total_cmp);
    samples[KILOSORT_SAMPLES / 2].max(1e-12)
}

/// Wall-time measurements of one simulation method across repetitions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodTiming {
    /// Seconds per repetition, in execution order; empty when nothing ran.
    pub raw_seconds: Vec<f64>,
    pub mean_kilosorts: Option<f64>,
    pub median_kilosorts: Option<f64>,
}

impl MethodTiming {
    fn from_raw(raw: Vec<f64>, kilosort_s: f64) -> Self {
        if raw.is_empty() {
            return MethodTiming {
                raw_seconds: raw,
                mean_kilosorts: None,
                median_kilosorts: None,
            };
        }
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        let mut sorted = raw.clone();
        sorted.sort_unstable_by(f64::total_cmp);
        let median = if sorted.len() % 2 == 1 {
            sorted[sorted.len() / 2]
        } else {
            0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
        };
        MethodTiming {
            raw_seconds: raw,
            mean_kilosorts: Some(mean / kilosort_s),
            median_kilosorts: Some(median / kilosort_s),
        }
    }
}

/// Benchmark result: both methods on identical requests, reported in
/// kilosorts, with the calibration metadata retained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    /// Kilosort unit in nanoseconds, the mean of the two calibrations.
    pub kilosort_ns: f64,
    pub kilosort_before_ns: f64,
    pub kilosort_after_ns: f64,
    pub rank_based: MethodTiming,
    pub standard: MethodTiming,
}

/// Times [`sample_order_stats`] against [`naive_sample_order_stats`] on the
/// same request.
///
/// One untimed warm-up pass per method, then `repetitions` timed passes
/// each, interleaved A/B so clock drift hits both alike; the kilosort unit
/// is calibrated before and after the measured workload. A request with
/// zero sims produces a report with empty timings.
pub fn benchmark<R: Rng + ?Sized>(
    req: &SimulationRequest,
    repetitions: u64,
    rng: &mut R,
) -> BenchReport {
    let before = kilosort_unit();
    let mut rank_raw = Vec::new();
    let mut naive_raw = Vec::new();
    if req.sims > 0 && repetitions > 0 {
        std::hint::black_box(sample_order_stats(req, rng));
        std::hint::black_box(naive_sample_order_stats(req, rng));
        rank_raw.reserve(repetitions as usize);
        naive_raw.reserve(repetitions as usize);
        for _ in 0..repetitions {
            let t = Instant::now();
            std::hint::black_box(sample_order_stats(req, rng));
            rank_raw.push(t.elapsed().as_secs_f64());
            let t = Instant::now();
            std::hint::black_box(naive_sample_order_stats(req, rng));
            naive_raw.push(t.elapsed().as_secs_f64());
        }
    }
    let after = kilosort_unit();
    let unit = 0.5 * (before + after);
    BenchReport {
        kilosort_ns: unit * 1e9,
        kilosort_before_ns: before * 1e9,
        kilosort_after_ns: after * 1e9,
        rank_based: MethodTiming::from_raw(rank_raw, unit),
        standard: MethodTiming::from_raw(naive_raw, unit),
    }
}
