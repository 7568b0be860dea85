//! Brute-force ground truth by exhaustive subset enumeration.
//!
//! Every size-`n` subset of `{1, ..., N}` is equally likely under simple
//! random sampling without replacement, so exact distributions of order
//! statistics follow from a tally over all `C(N, n)` subsets. Everything is
//! kept in big-rational arithmetic; mass tables sum to exactly one. This is
//! the reference the analytic code is verified against at small sizes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::dist::OrderStatSpec;
use crate::joint::RankSet;
use crate::{Error, Result};

/// Cap on the number of subsets an enumeration may visit.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationBudget {
    pub max_subsets: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_subsets: 10_000_000,
        }
    }
}

fn subset_count(pop_size: u64, n: u64) -> u128 {
    // C(N, n) without overflow for any budget-relevant size; saturates far
    // beyond any plausible budget
    let k = n.min(pop_size - n);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.saturating_mul((pop_size - i) as u128) / (i + 1) as u128;
        if c > u128::MAX / pop_size.max(2) as u128 {
            return u128::MAX;
        }
    }
    c
}

fn check_budget(pop_size: u64, n: u64, budget: &EnumerationBudget) -> Result<u64> {
    let subsets = subset_count(pop_size, n);
    if subsets > budget.max_subsets as u128 {
        return Err(Error::BudgetExceeded {
            pop_size,
            n,
            subsets,
            budget: budget.max_subsets,
        });
    }
    Ok(subsets as u64)
}

/// Visits every `n`-subset of `{1, ..., pop_size}` in lexicographic order.
///
/// The visitor receives the subset already sorted ascending. Iteration order
/// does not affect any result, but it is fixed so that partial-failure
/// diagnostics reproduce.
fn for_each_subset(pop_size: u64, n: u64, mut visit: impl FnMut(&[u64])) {
    let r = n as usize;
    let mut comb: Vec<u64> = (1..=n).collect();
    loop {
        visit(&comb);
        // lexicographic successor: bump the rightmost element not at its cap
        let mut i = r;
        while i > 0 && comb[i - 1] == pop_size - (r - i) as u64 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        comb[i - 1] += 1;
        for j in i..r {
            comb[j] = comb[j - 1] + 1;
        }
    }
}

/// Exact mass table of the k-th order statistic over `[k, N-n+k]`.
pub fn enumerate_pmf(
    spec: &OrderStatSpec,
    budget: &EnumerationBudget,
) -> Result<BTreeMap<u64, BigRational>> {
    let total = check_budget(spec.pop_size(), spec.n(), budget)?;
    let lo = spec.k();
    let mut tally = vec![0u64; spec.support().count()];
    let idx = (spec.k() - 1) as usize;
    for_each_subset(spec.pop_size(), spec.n(), |subset| {
        tally[(subset[idx] - lo) as usize] += 1;
    });
    let denom = BigInt::from(total);
    Ok(tally
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(i, c)| {
            (
                lo + i as u64,
                BigRational::new(BigInt::from(c), denom.clone()),
            )
        })
        .collect())
}

/// Exact joint mass table of `(X_(k1), ..., X_(kr))` over rank vectors.
pub fn enumerate_joint_pmf(
    ranks: &RankSet,
    budget: &EnumerationBudget,
) -> Result<BTreeMap<Vec<u64>, BigRational>> {
    let total = check_budget(ranks.pop_size(), ranks.n(), budget)?;
    let idx: Vec<usize> = ranks.ranks().iter().map(|&k| (k - 1) as usize).collect();
    let mut tally: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for_each_subset(ranks.pop_size(), ranks.n(), |subset| {
        let key: Vec<u64> = idx.iter().map(|&i| subset[i]).collect();
        *tally.entry(key).or_insert(0) += 1;
    });
    let denom = BigInt::from(total);
    Ok(tally
        .into_iter()
        .map(|(key, c)| (key, BigRational::new(BigInt::from(c), denom.clone())))
        .collect())
}

/// Exact expectation `E[f(X_(k))]` in rational arithmetic.
pub fn enumerate_expectation_exact(
    spec: &OrderStatSpec,
    f: impl Fn(u64) -> BigRational,
    budget: &EnumerationBudget,
) -> Result<BigRational> {
    let pmf = enumerate_pmf(spec, budget)?;
    Ok(pmf
        .into_iter()
        .fold(BigRational::zero(), |acc, (x, p)| acc + f(x) * p))
}

/// Floating-point expectation `E[f(X_(k))]` with exact masses.
pub fn enumerate_expectation(
    spec: &OrderStatSpec,
    f: impl Fn(u64) -> f64,
    budget: &EnumerationBudget,
) -> Result<f64> {
    let pmf = enumerate_pmf(spec, budget)?;
    Ok(pmf
        .into_iter()
        .map(|(x, p)| f(x) * p.to_f64().expect("mass fits in f64"))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn spec(k: u64, n: u64, pop: u64) -> OrderStatSpec {
        OrderStatSpec::new(k, n, pop).unwrap()
    }

    fn frac(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn pmf_of_three_subsets() {
        let budget = EnumerationBudget::default();
        let table = enumerate_pmf(&spec(1, 2, 3), &budget).unwrap();
        assert_eq!(table[&1], frac(2, 3));
        assert_eq!(table[&2], frac(1, 3));
        let table = enumerate_pmf(&spec(2, 2, 3), &budget).unwrap();
        assert_eq!(table[&2], frac(1, 3));
        assert_eq!(table[&3], frac(2, 3));
    }

    #[test]
    fn census_is_a_point_mass() {
        let table = enumerate_pmf(&spec(4, 4, 4), &EnumerationBudget::default()).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table[&4], BigRational::one());
    }

    #[test]
    fn mass_tables_sum_to_exactly_one() {
        let budget = EnumerationBudget::default();
        for (k, n, pop) in [(1, 2, 3), (3, 5, 10), (2, 6, 12)] {
            let table = enumerate_pmf(&spec(k, n, pop), &budget).unwrap();
            let total: BigRational = table.values().cloned().sum();
            assert_eq!(total, BigRational::one());
        }
    }

    #[test]
    fn joint_pmf_three_subsets() {
        let ranks = RankSet::new(vec![1, 2], 2, 3).unwrap();
        let table = enumerate_joint_pmf(&ranks, &EnumerationBudget::default()).unwrap();
        assert_eq!(table.len(), 3);
        for key in [vec![1, 2], vec![1, 3], vec![2, 3]] {
            assert_eq!(table[&key], frac(1, 3));
        }
    }

    #[test]
    fn joint_reduces_to_univariate_at_r_equals_one() {
        let ranks = RankSet::new(vec![2], 3, 6).unwrap();
        let budget = EnumerationBudget::default();
        let joint = enumerate_joint_pmf(&ranks, &budget).unwrap();
        let uni = enumerate_pmf(&spec(2, 3, 6), &budget).unwrap();
        for (key, mass) in joint {
            assert_eq!(mass, uni[&key[0]]);
        }
    }

    #[test]
    fn census_joint_is_the_identity_vector() {
        let ranks = RankSet::new((1..=4).collect(), 4, 4).unwrap();
        let table = enumerate_joint_pmf(&ranks, &EnumerationBudget::default()).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table[&vec![1, 2, 3, 4]], BigRational::one());
    }

    #[test]
    fn joint_marginalizes_to_univariate() {
        let ranks = RankSet::new(vec![1, 3], 4, 7).unwrap();
        let budget = EnumerationBudget::default();
        let joint = enumerate_joint_pmf(&ranks, &budget).unwrap();
        let mut marginal: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (key, mass) in joint {
            *marginal.entry(key[1]).or_insert_with(BigRational::zero) += mass;
        }
        let uni = enumerate_pmf(&spec(3, 4, 7), &budget).unwrap();
        assert_eq!(marginal, uni);
    }

    #[test]
    fn expectation_examples() {
        let budget = EnumerationBudget::default();
        let s = spec(1, 2, 3);
        let id = enumerate_expectation_exact(&s, |x| BigRational::from(BigInt::from(x)), &budget);
        assert_eq!(id.unwrap(), frac(4, 3));
        let rising = enumerate_expectation_exact(
            &s,
            |x| BigRational::from(BigInt::from(x * (x + 1))),
            &budget,
        );
        assert_eq!(rising.unwrap(), frac(10, 3));
        let unit = enumerate_expectation(&s, |_| 1.0, &budget).unwrap();
        assert_eq!(unit, 1.0);
    }

    #[test]
    fn budget_is_enforced() {
        let tight = EnumerationBudget { max_subsets: 2 };
        let err = enumerate_pmf(&spec(1, 2, 3), &tight).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn float_expectation_matches_exact() {
        let budget = EnumerationBudget::default();
        let s = spec(2, 4, 9);
        let exact =
            enumerate_expectation_exact(&s, |x| BigRational::from(BigInt::from(x)), &budget)
                .unwrap();
        let float = enumerate_expectation(&s, |x| x as f64, &budget).unwrap();
        assert!((float - exact.to_f64().unwrap()).abs() < 1e-12);
    }
}
