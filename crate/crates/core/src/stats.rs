//! Two-sample Mann-Whitney U test.
//!
//! The normal approximation uses the tie-corrected variance
//!
//! ```text
//! sigma^2 = n1 n2 / 12 * ((n + 1) - sum_t (t^3 - t) / (n (n - 1)))
//! ```
//!
//! and a 0.5 continuity correction toward the mean. An exact enumeration of
//! the null distribution is included for small, tie-free samples so the
//! approximation can be checked against it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest `n1 * n2` accepted by [`exact_u_distribution`].
pub const EXACT_GUARD: usize = 30;
/// Two-tailed 95% acceptance region for Z.
pub const ACCEPTANCE_REGION: [f64; 2] = [-1.96, 1.96];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("sample is empty")]
    Empty,
    #[error("value at position {0} is not finite")]
    NonFinite(usize),
    #[error("each group needs at least {min} observations, got {got}")]
    TooSmall { min: usize, got: usize },
    #[error("pooled sample size must be at least 2, got {0}")]
    PooledTooSmall(usize),
    #[error("tie groups of total size {total} exceed the pooled size {n}")]
    InconsistentTies { total: usize, n: usize },
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("all pooled observations are identical; the U statistic has zero variance")]
    ZeroVariance,
    #[error("exact enumeration limited to n1 * n2 <= {EXACT_GUARD}, got {n1} x {n2}")]
    ExactTooLarge { n1: usize, n2: usize },
}

fn check_finite(values: &[f64]) -> Result<(), StatsError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(StatsError::NonFinite(i)),
        None => Ok(()),
    }
}

/// Ascending ranks starting at 1; tied values share the mean of the
/// positions they occupy.
pub fn average_ranks(values: &[f64]) -> Result<Vec<f64>, StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    check_finite(values)?;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let shared = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = shared;
        }
        start = end;
    }
    Ok(ranks)
}

/// Sizes of the groups of equal values that contain two or more members.
pub fn tie_group_sizes(values: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .chunk_by(|a, b| a == b)
        .map(<[f64]>::len)
        .filter(|&t| t > 1)
        .collect()
}

/// `(U1, U2)` from the rank sum of `group1` in the pooled sample.
pub fn mann_whitney_u(group1: &[f64], group2: &[f64]) -> Result<(f64, f64), StatsError> {
    if group1.is_empty() || group2.is_empty() {
        return Err(StatsError::Empty);
    }
    let pooled: Vec<f64> = group1.iter().chain(group2).copied().collect();
    let ranks = average_ranks(&pooled)?;
    let (n1, n2) = (group1.len() as f64, group2.len() as f64);
    let r1: f64 = ranks[..group1.len()].iter().sum();
    let u1 = r1 - n1 * (n1 + 1.0) / 2.0;
    Ok((u1, n1 * n2 - u1))
}

pub fn ties_corrected_sigma(n1: usize, n2: usize, tie_group_sizes: &[usize]) -> Result<f64, StatsError> {
    let n = n1 + n2;
    if n < 2 {
        return Err(StatsError::PooledTooSmall(n));
    }
    let total: usize = tie_group_sizes.iter().sum();
    if total > n {
        return Err(StatsError::InconsistentTies { total, n });
    }
    let nf = n as f64;
    let correction: f64 = tie_group_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum::<f64>()
        / (nf * (nf - 1.0));
    let var = (n1 * n2) as f64 / 12.0 * ((nf + 1.0) - correction);
    Ok(var.max(0.0).sqrt())
}

/// Standardized U with the 0.5 continuity correction applied toward `mu`.
pub fn z_with_continuity(u: f64, mu: f64, sigma: f64) -> Result<f64, StatsError> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(StatsError::NonPositiveSigma(sigma));
    }
    let dev = u - mu;
    Ok(if dev < 0.0 {
        (dev + 0.5) / sigma
    } else if dev > 0.0 {
        (dev - 0.5) / sigma
    } else {
        0.0
    })
}

/// Complementary error function. The Maclaurin series of erf is summed for
/// `|x| < 2.5`; beyond that the Laplace continued fraction for erfc is
/// evaluated with the modified Lentz method. Both converge to roughly 1e-14.
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let upper = if z < 2.5 { 1.0 - erf_series(z) } else { erfc_continued_fraction(z) };
    if x >= 0.0 {
        upper
    } else {
        2.0 - upper
    }
}

fn erf_series(x: f64) -> f64 {
    // erf(x) = 2/sqrt(pi) * sum_n (-1)^n x^(2n+1) / (n! (2n+1))
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..200 {
        term *= -x2 / n as f64;
        let contrib = term / (2 * n + 1) as f64;
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum * std::f64::consts::FRAC_2_SQRT_PI
}

fn erfc_continued_fraction(x: f64) -> f64 {
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        d = if d.abs() < TINY { TINY } else { d };
        c = x + a / c;
        c = if c.abs() < TINY { TINY } else { c };
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (f * std::f64::consts::PI.sqrt())
}

/// Standard normal CDF. The lower tail is always evaluated directly so small
/// upper-tail probabilities are not lost to cancellation.
pub fn normal_cdf(z: f64) -> f64 {
    let lower_tail = |a: f64| 0.5 * erfc(a / std::f64::consts::SQRT_2);
    if z <= 0.0 {
        lower_tail(-z)
    } else {
        1.0 - lower_tail(z)
    }
}

pub fn two_tailed_p(z: f64) -> f64 {
    (2.0 * normal_cdf(-z.abs())).min(1.0)
}

/// `(|Z| / sqrt(n1 + n2), U1 / (n1 n2))`.
pub fn effect_sizes(z: f64, u1: f64, n1: usize, n2: usize) -> (f64, f64) {
    let r = z.abs() / ((n1 + n2) as f64).sqrt();
    let cl = u1 / (n1 * n2) as f64;
    (r, cl)
}

/// Exact null distribution of U1 for tie-free samples, keyed by U1.
pub fn exact_u_distribution(n1: usize, n2: usize) -> Result<BTreeMap<usize, f64>, StatsError> {
    if n1 == 0 || n2 == 0 {
        return Err(StatsError::Empty);
    }
    if n1 * n2 > EXACT_GUARD {
        return Err(StatsError::ExactTooLarge { n1, n2 });
    }
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    // Each arrangement is a choice of the n1 ranks (1-based) held by group 1.
    fn choose(next_rank: usize, n: usize, left: usize, rank_sum: usize, base: usize, counts: &mut BTreeMap<usize, u64>) {
        if left == 0 {
            *counts.entry(rank_sum - base).or_default() += 1;
            return;
        }
        for r in next_rank..=n + 1 - left {
            choose(r + 1, n, left - 1, rank_sum + r, base, counts);
        }
    }
    choose(1, n1 + n2, n1, 0, n1 * (n1 + 1) / 2, &mut counts);
    let total: u64 = counts.values().sum();
    Ok(counts
        .into_iter()
        .map(|(u, c)| (u, c as f64 / total as f64))
        .collect())
}

/// Exact two-tailed p for an observed U1: mass of outcomes at least as far
/// from the mean.
pub fn exact_two_tailed_p(n1: usize, n2: usize, u1: f64) -> Result<f64, StatsError> {
    let dist = exact_u_distribution(n1, n2)?;
    let mu = (n1 * n2) as f64 / 2.0;
    let dev = (u1 - mu).abs();
    Ok(dist
        .iter()
        .filter(|(&u, _)| (u as f64 - mu).abs() >= dev - 1e-9)
        .map(|(_, p)| p)
        .sum::<f64>()
        .min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UTestResult {
    pub n1: usize,
    pub n2: usize,
    #[serde(rename = "U1")]
    pub u1: f64,
    #[serde(rename = "U2")]
    pub u2: f64,
    pub mu: f64,
    pub sigma: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    pub p_two_tailed: f64,
    pub r_effect: f64,
    pub cl_effect: f64,
}

impl UTestResult {
    /// Whether Z falls inside the two-tailed 95% acceptance region.
    pub fn accepts_null(&self) -> bool {
        (ACCEPTANCE_REGION[0]..=ACCEPTANCE_REGION[1]).contains(&self.z)
    }

    /// The U acceptance interval `mu -/+ 1.96 sigma`.
    pub fn u_acceptance_region(&self) -> [f64; 2] {
        [
            self.mu + ACCEPTANCE_REGION[0] * self.sigma,
            self.mu + ACCEPTANCE_REGION[1] * self.sigma,
        ]
    }
}

/// Completes the test from U1, the group sizes and an already computed sigma.
pub fn summarize(u1: f64, n1: usize, n2: usize, sigma: f64) -> Result<UTestResult, StatsError> {
    if n1 == 0 || n2 == 0 {
        return Err(StatsError::Empty);
    }
    let mu = (n1 * n2) as f64 / 2.0;
    let z = z_with_continuity(u1, mu, sigma)?;
    let (r_effect, cl_effect) = effect_sizes(z, u1, n1, n2);
    Ok(UTestResult {
        n1,
        n2,
        u1,
        u2: (n1 * n2) as f64 - u1,
        mu,
        sigma,
        z,
        p_two_tailed: two_tailed_p(z),
        r_effect,
        cl_effect,
    })
}

pub fn run_utest(group1: &[f64], group2: &[f64]) -> Result<UTestResult, StatsError> {
    for g in [group1, group2] {
        if g.len() < 2 {
            return Err(StatsError::TooSmall { min: 2, got: g.len() });
        }
    }
    let (u1, _) = mann_whitney_u(group1, group2)?;
    let pooled: Vec<f64> = group1.iter().chain(group2).copied().collect();
    let sigma = ties_corrected_sigma(group1.len(), group2.len(), &tie_group_sizes(&pooled))?;
    if sigma <= 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    summarize(u1, group1.len(), group2.len(), sigma)
}
