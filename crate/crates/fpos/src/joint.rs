//! Joint distribution of a vector of order statistics
//! `(X_(k1), ..., X_(kr))` under sampling without replacement, its
//! Dirichlet-multinomial form, and the N-free conditional law of the lower
//! order statistics given the highest one.
//!
//! The joint mass at strictly increasing `x* = (x1, ..., xr)` is the product
//! of binomial coefficients over the gaps between consecutive order
//! statistics, divided by `C(N, n)`. Writing `dx` and `dk` for the padded
//! difference vectors of the observations and the ranks, the same mass is a
//! shifted Dirichlet-multinomial, `DirichletMultinomial(dx - dk | N - n, dk)`,
//! which this module also evaluates on an independent route for testing.

use crate::dist::OrderStatSpec;
use crate::numeric::{ln_binomial, ln_factorial};
use crate::{Error, Result};

/// Strictly increasing ranks `k1 < ... < kr` within a sample of size `n`
/// from a population of size `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankSet {
    ranks: Vec<u64>,
    n: u64,
    pop_size: u64,
}

/// Padded difference vectors of an observation vector and its ranks.
///
/// Both have length `r + 1`: gaps between consecutive entries, with the
/// first entry itself in front and the distance to the far end
/// (`N - xr + 1`, `n - kr + 1`) at the back. They always sum to `N + 1` and
/// `n + 1` respectively; every entry is at least 1 exactly when the
/// observation is inside the joint support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaVectors {
    pub dx: Vec<i64>,
    pub dk: Vec<i64>,
}

impl RankSet {
    pub fn new(ranks: Vec<u64>, n: u64, pop_size: u64) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::InvalidParameter {
                name: "ranks",
                reason: "at least one rank is required".into(),
            });
        }
        if !ranks.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter {
                name: "ranks",
                reason: format!("ranks must be strictly increasing, got {ranks:?}"),
            });
        }
        if ranks[0] < 1 || *ranks.last().unwrap() > n || n > pop_size {
            return Err(Error::InvalidParameter {
                name: "ranks",
                reason: format!(
                    "need 1 <= k1 < ... < kr <= n <= N, got ranks {ranks:?} with n={n}, N={pop_size}"
                ),
            });
        }
        Ok(RankSet { ranks, n, pop_size })
    }

    pub fn ranks(&self) -> &[u64] {
        &self.ranks
    }

    pub fn r(&self) -> usize {
        self.ranks.len()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn pop_size(&self) -> u64 {
        self.pop_size
    }

    /// The padded rank differences `(k1, k2-k1, ..., n-kr+1)`.
    pub fn delta_k(&self) -> Vec<u64> {
        let r = self.r();
        let mut dk = Vec::with_capacity(r + 1);
        dk.push(self.ranks[0]);
        for w in self.ranks.windows(2) {
            dk.push(w[1] - w[0]);
        }
        dk.push(self.n - self.ranks[r - 1] + 1);
        dk
    }

    /// Same ranks with a different population size.
    pub fn with_pop_size(&self, pop_size: u64) -> Result<Self> {
        RankSet::new(self.ranks.clone(), self.n, pop_size)
    }
}

/// Difference vectors of an observation against a rank set.
///
/// Requires `x` strictly increasing with one entry per rank. The resulting
/// `dx` sums to `N + 1` and `dk` to `n + 1` whatever the observation.
pub fn delta_vectors(x: &[u64], ranks: &RankSet) -> Result<DeltaVectors> {
    if x.len() != ranks.r() {
        return Err(Error::InvalidParameter {
            name: "x",
            reason: format!("expected {} observations, got {}", ranks.r(), x.len()),
        });
    }
    if !x.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter {
            name: "x",
            reason: format!("observations must be strictly increasing, got {x:?}"),
        });
    }
    let mut dx = Vec::with_capacity(x.len() + 1);
    dx.push(x[0] as i64);
    for w in x.windows(2) {
        dx.push((w[1] - w[0]) as i64);
    }
    dx.push(ranks.pop_size() as i64 - *x.last().unwrap() as i64 + 1);
    let dk = ranks.delta_k().into_iter().map(|v| v as i64).collect();
    Ok(DeltaVectors { dx, dk })
}

// Log joint mass via the product-of-binomials form; NEG_INFINITY off support.
fn ln_joint_pmf(ranks: &RankSet, x: &[u64]) -> f64 {
    if !x.windows(2).all(|w| w[0] < w[1]) {
        return f64::NEG_INFINITY;
    }
    if x[0] < 1 || *x.last().unwrap() > ranks.pop_size() {
        return f64::NEG_INFINITY;
    }
    let dk = ranks.delta_k();
    let mut ln = -ln_binomial(ranks.pop_size(), ranks.n());
    let mut prev = 0u64;
    for (i, &xi) in x.iter().enumerate() {
        let gap = xi - prev; // = dx_i
        if gap < dk[i] {
            return f64::NEG_INFINITY;
        }
        ln += ln_binomial(gap - 1, dk[i] - 1);
        prev = xi;
    }
    let last_gap = ranks.pop_size() - prev + 1;
    if last_gap < dk[ranks.r()] {
        return f64::NEG_INFINITY;
    }
    ln + ln_binomial(last_gap - 1, dk[ranks.r()] - 1)
}

/// Joint probability mass at the observation vector `x`.
///
/// Points off the support (ties, wrong ordering, or gaps too small for the
/// intervening ranks) get mass zero rather than an error, so callers can sum
/// over lattices freely. Only a length mismatch is an error.
pub fn joint_pmf(ranks: &RankSet, x: &[u64]) -> Result<f64> {
    if x.len() != ranks.r() {
        return Err(Error::InvalidParameter {
            name: "x",
            reason: format!("expected {} observations, got {}", ranks.r(), x.len()),
        });
    }
    let ln = ln_joint_pmf(ranks, x);
    Ok(if ln == f64::NEG_INFINITY {
        0.0
    } else {
        ln.exp()
    })
}

/// The same mass computed as a shifted Dirichlet-multinomial,
/// `DirichletMultinomial(dx - dk | N - n, dk)`, on its own log-gamma route.
///
/// Exists as an independent evaluation of the identity with [`joint_pmf`];
/// the two agree to floating-point accuracy on every supported point.
pub fn dm_pmf(ranks: &RankSet, x: &[u64]) -> Result<f64> {
    if x.len() != ranks.r() {
        return Err(Error::InvalidParameter {
            name: "x",
            reason: format!("expected {} observations, got {}", ranks.r(), x.len()),
        });
    }
    if !x.windows(2).all(|w| w[0] < w[1]) {
        return Ok(0.0);
    }
    // counts c = dx - dk over r+1 cells; any negative count is off support
    let dk = ranks.delta_k();
    let mut counts = Vec::with_capacity(dk.len());
    let mut prev = 0u64;
    for (i, &xi) in x.iter().enumerate() {
        let gap = xi as i64 - prev as i64;
        counts.push(gap - dk[i] as i64);
        prev = xi;
    }
    counts.push(ranks.pop_size() as i64 - prev as i64 + 1 - dk[ranks.r()] as i64);
    if counts.iter().any(|&c| c < 0) {
        return Ok(0.0);
    }
    let trials = ranks.pop_size() - ranks.n();
    // ln Mu(c | trials, s) integrated against Dirichlet(s | dk):
    //   ln trials! - sum ln c_i! + ln Gamma(n+1) - ln Gamma(N+1)
    //   + sum [ln Gamma(dk_i + c_i) - ln Gamma(dk_i)]
    let mut ln = ln_factorial(trials) + ln_factorial(ranks.n()) - ln_factorial(ranks.pop_size());
    for (&alpha, &c) in dk.iter().zip(&counts) {
        let c = c as u64;
        ln -= ln_factorial(c);
        ln += ln_factorial(alpha + c - 1) - ln_factorial(alpha - 1);
    }
    Ok(ln.exp())
}

/// Conditional law of the next order statistic given a lower one:
/// `P(X_(k_next) = x | X_(k_i) = x_i)` equals the univariate mass of a
/// fresh spec on the remaining elements, `(k_next - k_i, n - k_i, N - x_i)`
/// evaluated at `x - x_i`.
pub fn conditional_next_pmf(
    k_i: u64,
    x_i: u64,
    k_next: u64,
    n: u64,
    pop_size: u64,
    x: u64,
) -> Result<f64> {
    if k_i >= k_next || k_next > n || x_i < k_i {
        return Err(Error::InvalidParameter {
            name: "ranks",
            reason: format!(
                "conditioning needs k_i < k_next <= n and x_i >= k_i, got k_i={k_i}, \
                 k_next={k_next}, n={n}, x_i={x_i}"
            ),
        });
    }
    let sub = OrderStatSpec::new(k_next - k_i, n - k_i, pop_size.saturating_sub(x_i))?;
    Ok(if x > x_i { sub.pmf(x - x_i) } else { 0.0 })
}

/// Conditional mass of the lower order statistics given the highest one,
/// `P(X_(k1..k_{r-1}) = x1..x_{r-1} | X_(kr) = xr)`.
///
/// The population size cancels out of this ratio entirely: the value is a
/// product of binomial gap counts over `C(xr - 1, kr - 1)`, so evaluating
/// the same ranks with any two population sizes gives identical results.
/// Requires `r >= 2`; off-support observations get mass zero.
pub fn conditional_lower_pmf(ranks: &RankSet, x: &[u64]) -> Result<f64> {
    let r = ranks.r();
    if r < 2 {
        return Err(Error::InvalidParameter {
            name: "ranks",
            reason: "conditioning on the highest order statistic needs r >= 2".into(),
        });
    }
    if x.len() != r {
        return Err(Error::InvalidParameter {
            name: "x",
            reason: format!("expected {r} observations, got {}", x.len()),
        });
    }
    if !x.windows(2).all(|w| w[0] < w[1]) {
        return Ok(0.0);
    }
    let dk = ranks.delta_k();
    let (kr, xr) = (ranks.ranks()[r - 1], x[r - 1]);
    if xr < kr {
        return Ok(0.0);
    }
    let mut ln = -ln_binomial(xr - 1, kr - 1);
    let mut prev = 0u64;
    for (i, &xi) in x.iter().enumerate() {
        let gap = xi - prev;
        if gap < dk[i] {
            return Ok(0.0);
        }
        ln += ln_binomial(gap - 1, dk[i] - 1);
        prev = xi;
    }
    Ok(if ln == f64::NEG_INFINITY {
        0.0
    } else {
        ln.exp()
    })
}

/// The two factors of the Fisher-Neyman split of the joint mass: the joint
/// law of the lower statistics inside the truncated population
/// `(ranks k1..k_{r-1}, sample kr - 1, population xr - 1)` and the
/// univariate law of the highest statistic. Their product is [`joint_pmf`].
pub fn factorization_check(ranks: &RankSet, x: &[u64]) -> Result<(f64, f64)> {
    let r = ranks.r();
    if r < 2 {
        return Err(Error::InvalidParameter {
            name: "ranks",
            reason: "the factorization needs r >= 2".into(),
        });
    }
    if x.len() != r {
        return Err(Error::InvalidParameter {
            name: "x",
            reason: format!("expected {r} observations, got {}", x.len()),
        });
    }
    let (kr, xr) = (ranks.ranks()[r - 1], x[r - 1]);
    let lower = RankSet::new(ranks.ranks()[..r - 1].to_vec(), kr - 1, xr - 1)?;
    let head = joint_pmf(&lower, &x[..r - 1])?;
    let tail = OrderStatSpec::new(kr, ranks.n(), ranks.pop_size())?.pmf(xr);
    Ok((head, tail))
}

/// Iterator over the full joint support lattice: all strictly increasing
/// `x` with `k_i <= x_i <= N - n + k_i`.
pub fn support_points(ranks: &RankSet) -> SupportLattice {
    SupportLattice {
        current: ranks.ranks().to_vec(),
        caps: ranks
            .ranks()
            .iter()
            .map(|&k| ranks.pop_size() - ranks.n() + k)
            .collect(),
        floors: ranks.ranks().to_vec(),
        started: false,
        done: false,
    }
}

/// See [`support_points`].
#[derive(Debug, Clone)]
pub struct SupportLattice {
    current: Vec<u64>,
    caps: Vec<u64>,
    floors: Vec<u64>,
    started: bool,
    done: bool,
}

impl Iterator for SupportLattice {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current.clone());
        }
        let r = self.current.len();
        // rightmost coordinate that can still move up
        let mut i = r;
        while i > 0 && self.current[i - 1] == self.caps[i - 1] {
            i -= 1;
        }
        if i == 0 {
            self.done = true;
            return None;
        }
        self.current[i - 1] += 1;
        for j in i..r {
            // floors and caps both rise strictly with the rank, so the reset
            // value never exceeds its cap
            self.current[j] = self.floors[j].max(self.current[j - 1] + 1);
        }
        Some(self.current.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{self, EnumerationBudget};
    use approx::assert_relative_eq;
    use num_traits::ToPrimitive;

    fn ranks(ks: &[u64], n: u64, pop: u64) -> RankSet {
        RankSet::new(ks.to_vec(), n, pop).unwrap()
    }

    #[test]
    fn rank_set_validation() {
        assert!(RankSet::new(vec![], 3, 5).is_err());
        assert!(RankSet::new(vec![2, 2], 3, 5).is_err());
        assert!(RankSet::new(vec![3, 1], 3, 5).is_err());
        assert!(RankSet::new(vec![1, 4], 3, 5).is_err());
        assert!(RankSet::new(vec![1, 3], 3, 2).is_err());
        assert!(RankSet::new(vec![1, 3], 3, 5).is_ok());
    }

    #[test]
    fn delta_vector_examples() {
        let d = delta_vectors(&[1, 3], &ranks(&[1, 2], 2, 3)).unwrap();
        assert_eq!(d.dx, vec![1, 2, 1]);
        assert_eq!(d.dk, vec![1, 1, 1]);
        let d = delta_vectors(&[2, 5], &ranks(&[2, 4], 5, 9)).unwrap();
        assert_eq!(d.dx, vec![2, 3, 5]);
        assert_eq!(d.dk, vec![2, 2, 2]);
        // census: dx equals dk
        let d = delta_vectors(&[1, 2, 3], &ranks(&[1, 2, 3], 3, 3)).unwrap();
        assert_eq!(d.dx, d.dk);
        assert!(delta_vectors(&[3, 2], &ranks(&[1, 2], 2, 3)).is_err());
        assert!(delta_vectors(&[1], &ranks(&[1, 2], 2, 3)).is_err());
    }

    #[test]
    fn delta_sums_are_invariant() {
        for (x, ks, n, pop) in [
            (vec![1u64, 3], vec![1u64, 2], 2u64, 3u64),
            (vec![2, 5, 9], vec![1, 3, 4], 5, 11),
            (vec![4, 20], vec![2, 3], 4, 30),
        ] {
            let rs = ranks(&ks, n, pop);
            let d = delta_vectors(&x, &rs).unwrap();
            assert_eq!(d.dx.iter().sum::<i64>(), pop as i64 + 1);
            assert_eq!(d.dk.iter().sum::<i64>(), n as i64 + 1);
        }
    }

    #[test]
    fn joint_pmf_examples() {
        let rs = ranks(&[1, 2], 2, 3);
        assert_relative_eq!(
            joint_pmf(&rs, &[1, 3]).unwrap(),
            1.0 / 3.0,
            max_relative = 1e-13
        );
        // r = 1 reduces to the univariate pmf
        let rs = ranks(&[2], 4, 9);
        let s = OrderStatSpec::new(2, 4, 9).unwrap();
        for x in s.support() {
            assert_relative_eq!(
                joint_pmf(&rs, &[x]).unwrap(),
                s.pmf(x),
                max_relative = 1e-13
            );
        }
        // census
        let rs = ranks(&(1..=4).collect::<Vec<_>>(), 4, 4);
        assert_relative_eq!(
            joint_pmf(&rs, &[1, 2, 3, 4]).unwrap(),
            1.0,
            max_relative = 1e-13
        );
        // ties and disorder carry no mass
        let rs = ranks(&[1, 2], 2, 5);
        assert_eq!(joint_pmf(&rs, &[2, 2]).unwrap(), 0.0);
        assert_eq!(joint_pmf(&rs, &[3, 2]).unwrap(), 0.0);
        assert!(joint_pmf(&rs, &[1]).is_err());
    }

    #[test]
    fn joint_matches_oracle() {
        let budget = EnumerationBudget::default();
        for (ks, n, pop) in [
            (vec![1u64, 2], 2u64, 5u64),
            (vec![1, 3], 3, 7),
            (vec![2, 4, 5], 5, 9),
        ] {
            let rs = ranks(&ks, n, pop);
            let table = oracle::enumerate_joint_pmf(&rs, &budget).unwrap();
            for (x, mass) in table {
                assert_relative_eq!(
                    joint_pmf(&rs, &x).unwrap(),
                    mass.to_f64().unwrap(),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn dm_route_agrees_with_product_route() {
        for (ks, n, pop) in [
            (vec![1u64, 2], 2u64, 3u64),
            (vec![1, 3], 3, 9),
            (vec![2, 4, 6], 7, 12),
        ] {
            let rs = ranks(&ks, n, pop);
            for x in support_points(&rs) {
                let a = joint_pmf(&rs, &x).unwrap();
                let b = dm_pmf(&rs, &x).unwrap();
                assert!(
                    (a - b).abs() <= 1e-12 * a.max(1.0),
                    "{ks:?} at {x:?}: {a} vs {b}"
                );
            }
        }
        // spot value against the oracle
        let rs = ranks(&[1, 2], 2, 3);
        assert_relative_eq!(
            dm_pmf(&rs, &[1, 3]).unwrap(),
            1.0 / 3.0,
            max_relative = 1e-13
        );
        // census: zero-trials multinomial
        let rs = ranks(&[1, 2], 2, 2);
        assert_relative_eq!(dm_pmf(&rs, &[1, 2]).unwrap(), 1.0, max_relative = 1e-13);
        // off support
        assert_eq!(dm_pmf(&rs, &[1, 5]).unwrap(), 0.0);
    }

    #[test]
    fn joint_normalizes_over_the_lattice() {
        for (ks, n, pop) in [
            (vec![1u64, 2], 3u64, 10u64),
            (vec![1, 2, 3], 3, 12),
            (vec![2, 5], 6, 12),
        ] {
            let rs = ranks(&ks, n, pop);
            let total: f64 = support_points(&rs)
                .map(|x| joint_pmf(&rs, &x).unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-10, "{ks:?}: total {total}");
        }
    }

    #[test]
    fn lattice_size_matches_brute_force_filter() {
        let rs = ranks(&[1, 3], 4, 8);
        let lattice: Vec<Vec<u64>> = support_points(&rs).collect();
        // brute force: all strictly increasing pairs within the per-rank bounds
        let mut count = 0;
        for x1 in 1..=(8 - 4 + 1) {
            for x2 in (x1 + 1)..=(8 - 4 + 3) {
                if x2 >= 3 {
                    count += 1;
                }
            }
        }
        assert_eq!(lattice.len(), count);
        assert!(
            lattice.windows(2).all(|w| w[0] < w[1]),
            "lexicographic order"
        );
    }

    #[test]
    fn conditional_next_examples() {
        // given the minimum is 1 in n=2 from {1,2,3}, the max is uniform on {2,3}
        let p2 = conditional_next_pmf(1, 1, 2, 2, 3, 2).unwrap();
        let p3 = conditional_next_pmf(1, 1, 2, 2, 3, 3).unwrap();
        assert_relative_eq!(p2, 0.5, max_relative = 1e-13);
        assert_relative_eq!(p3, 0.5, max_relative = 1e-13);
        assert!(conditional_next_pmf(2, 2, 2, 3, 5, 3).is_err());
        assert!(conditional_next_pmf(1, 0, 2, 3, 5, 3).is_err());
    }

    #[test]
    fn chained_conditionals_reproduce_joint() {
        let rs = ranks(&[1, 3, 4], 5, 9);
        for x in support_points(&rs) {
            let mut product = OrderStatSpec::new(1, 5, 9).unwrap().pmf(x[0]);
            for i in 1..3 {
                product *=
                    conditional_next_pmf(rs.ranks()[i - 1], x[i - 1], rs.ranks()[i], 5, 9, x[i])
                        .unwrap();
            }
            assert_relative_eq!(
                product,
                joint_pmf(&rs, &x).unwrap(),
                max_relative = 1e-11,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn conditional_lower_examples() {
        let rs = ranks(&[1, 2], 2, 3);
        assert_relative_eq!(
            conditional_lower_pmf(&rs, &[1, 3]).unwrap(),
            0.5,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            conditional_lower_pmf(&rs, &[2, 3]).unwrap(),
            0.5,
            max_relative = 1e-13
        );
        let single = ranks(&[1], 2, 3);
        assert!(conditional_lower_pmf(&single, &[1]).is_err());
    }

    #[test]
    fn conditional_lower_is_free_of_population_size() {
        let small = ranks(&[1, 2, 4], 5, 10);
        let large = small.with_pop_size(100).unwrap();
        for x in support_points(&small) {
            let a = conditional_lower_pmf(&small, &x).unwrap();
            let b = conditional_lower_pmf(&large, &x).unwrap();
            assert_eq!(a.to_bits(), b.to_bits(), "at {x:?}");
        }
    }

    #[test]
    fn factorization_examples() {
        let rs = ranks(&[1, 2], 2, 3);
        let (head, tail) = factorization_check(&rs, &[1, 3]).unwrap();
        assert_relative_eq!(head, 0.5, max_relative = 1e-13);
        assert_relative_eq!(tail, 2.0 / 3.0, max_relative = 1e-13);
        assert_relative_eq!(head * tail, 1.0 / 3.0, max_relative = 1e-13);
        // census with r = 2
        let rs = ranks(&[1, 2], 2, 2);
        let (head, tail) = factorization_check(&rs, &[1, 2]).unwrap();
        assert_eq!((head, tail), (1.0, 1.0));
    }

    #[test]
    fn factorization_product_identity_on_a_grid() {
        for pop in 4..=10u64 {
            let rs = ranks(&[1, 3], 4, pop);
            for x in support_points(&rs) {
                let (head, tail) = factorization_check(&rs, &x).unwrap();
                let joint = joint_pmf(&rs, &x).unwrap();
                assert!(
                    (head * tail - joint).abs() <= 1e-12 * joint.max(1.0),
                    "N={pop}, x={x:?}"
                );
            }
        }
    }

    #[test]
    fn marginals_of_the_joint_match_univariate() {
        let rs = ranks(&[2, 4], 5, 10);
        let s = OrderStatSpec::new(4, 5, 10).unwrap();
        let mut marginal = std::collections::BTreeMap::new();
        for x in support_points(&rs) {
            *marginal.entry(x[1]).or_insert(0.0) += joint_pmf(&rs, &x).unwrap();
        }
        for (x, mass) in marginal {
            assert_relative_eq!(mass, s.pmf(x), max_relative = 1e-11);
        }
    }
}
