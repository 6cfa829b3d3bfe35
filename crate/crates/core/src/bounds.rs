//! Analytic rate bounds for uniform demands.
//!
//! The lower bound is the cut-set bound
//!
//! ```text
//! R(M) >= max_{l in 1..=min(n,m)}  P_l [H_lib - l M F]^+ / (floor(m/l) F)
//! ```
//!
//! where `P_l` is the probability that a uniform demand vector contains at
//! least `l` distinct files. The upper bound is the expected rate of the
//! compressed scheme with an optimized two-level caching distribution,
//! `min{expected_coded_rate, expected_distinct_requests}`, minimized over the library's correlation levels.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::library::GroupedLibrary;
use crate::placement::{self, UniformPlacement};

/// Distribution of the number of distinct files among `n` uniform draws
/// from `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistinctDemandPmf {
    n: usize,
    m: usize,
    exact: Vec<BigRational>,
}

fn big(x: usize) -> BigUint {
    BigUint::from(x)
}

/// `pmf(j) = C(m,j) S(n,j) j! / m^n`, exact.
pub fn distinct_pmf(n: usize, m: usize) -> Result<DistinctDemandPmf> {
    if n == 0 || m == 0 {
        return Err(Error::OutOfRange("n and m must be at least 1".into()));
    }
    let gamma = n.min(m);
    // falling[j] * S(n, j) counts demand vectors with exactly j distinct
    // files, where falling[j] = m (m-1) ... (m-j+1) = C(m,j) j!.
    let mut stirling = vec![BigUint::zero(); gamma + 1];
    stirling[0] = BigUint::one();
    for row in 1..=n {
        let top = row.min(gamma);
        for j in (1..=top).rev() {
            let carried = &stirling[j] * big(j);
            stirling[j] = carried + &stirling[j - 1];
        }
        stirling[0] = BigUint::zero();
    }
    let total = num_traits::pow(big(m), n);
    let mut falling = BigUint::one();
    let mut exact = Vec::with_capacity(gamma);
    for (j, ways) in stirling.iter().enumerate().take(gamma + 1).skip(1) {
        falling *= big(m - j + 1);
        let count = &falling * ways;
        exact.push(BigRational::new(count.into(), total.clone().into()));
    }
    Ok(DistinctDemandPmf { n, m, exact })
}

impl DistinctDemandPmf {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `min(n, m)`.
    pub fn max_distinct(&self) -> usize {
        self.exact.len()
    }

    pub fn exact(&self, j: usize) -> BigRational {
        if j == 0 || j > self.exact.len() {
            BigRational::zero()
        } else {
            self.exact[j - 1].clone()
        }
    }

    pub fn pmf(&self, j: usize) -> f64 {
        self.exact(j).to_f64().unwrap_or(0.0)
    }

    /// Exact `P(at least l distinct)`.
    pub fn tail_exact(&self, l: usize) -> BigRational {
        self.exact.iter().skip(l.saturating_sub(1)).fold(BigRational::zero(), |acc, p| acc + p)
    }

    pub fn tail(&self, l: usize) -> f64 {
        self.tail_exact(l).to_f64().unwrap_or(0.0)
    }
}

/// Cut-set lower bound, maximized over `l` for each `M`.
pub fn lower_bound(n: usize, m: usize, memory: f64, h_lib_units: u64, file_units: u64) -> Result<f64> {
    let pmf = distinct_pmf(n, m)?;
    Ok(lower_bound_with(&pmf, memory, h_lib_units, file_units))
}

pub fn lower_bound_with(pmf: &DistinctDemandPmf, memory: f64, h_lib_units: u64, file_units: u64) -> f64 {
    let h = h_lib_units as f64 / file_units as f64;
    (1..=pmf.max_distinct())
        .map(|l| {
            let numerator = (h - l as f64 * memory).max(0.0);
            pmf.tail(l) * numerator / (pmf.m() / l) as f64
        })
        .fold(0.0, f64::max)
}

fn pow0(base: f64, exp: usize) -> f64 {
    // 0^0 = 1 is what powi gives, kept explicit for readability
    if exp == 0 {
        1.0
    } else {
        base.powi(exp as i32)
    }
}

/// `(pM)^(l-1) (1-pM)^(n-l+1)`.
pub fn subset_weight(p: f64, memory: f64, n: usize, ell: usize) -> Result<f64> {
    if ell == 0 || ell > n {
        return Err(Error::OutOfRange(format!("ell={ell} must lie in 1..={n}")));
    }
    let x = checked_fraction(p, memory)?;
    Ok(pow0(x, ell - 1) * pow0(1.0 - x, n - ell + 1))
}

fn checked_fraction(p: f64, memory: f64) -> Result<f64> {
    let x = p * memory;
    if !(-1e-12..=1.0 + 1e-12).contains(&x) || x.is_nan() {
        return Err(Error::OutOfRange(format!("pM = {x} must lie in [0, 1]")));
    }
    Ok(x.clamp(0.0, 1.0))
}

fn binomial_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0; n + 1];
    for k in 1..=n {
        row[k] = row[k - 1] * (n - k + 1) as f64 / k as f64;
    }
    row
}

/// `sum_l C(n,l) (w_l(i_share) + delta w_l(p_share))` with `w_l` the subset weight.
pub fn expected_coded_rate(delta: f64, i_share: f64, p_share: f64, memory: f64, n: usize) -> Result<f64> {
    let binom = binomial_row(n);
    let mut total = 0.0;
    for (ell, &weight) in binom.iter().enumerate().skip(1) {
        let li = subset_weight(i_share, memory, n, ell)?;
        let lp = subset_weight(p_share, memory, n, ell)?;
        total += weight * (li + delta * lp);
    }
    Ok(total)
}

/// Expected number of distinct files in a uniform demand vector.
pub fn expected_distinct_requests(n: usize, m: usize) -> f64 {
    m as f64 * (1.0 - (1.0 - 1.0 / m as f64).powi(n as i32))
}

/// One correlation level considered by [`upper_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct UpperBoundCandidate {
    pub delta: f64,
    pub kappa: usize,
    /// `None` when the compressed library fits in the cache outright.
    pub placement: Option<UniformPlacement>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpperBound {
    pub value: f64,
    pub candidates: Vec<UpperBoundCandidate>,
}

impl UpperBound {
    pub fn best(&self) -> &UpperBoundCandidate {
        self.candidates.iter().min_by(|a, b| a.value.total_cmp(&b.value)).expect("at least one candidate")
    }
}

/// Cache size (in files) above which the whole compressed library fits.
pub fn full_library_memory(m: usize, delta: f64, kappa: usize) -> f64 {
    m as f64 / kappa as f64 * (1.0 + (kappa as f64 - 1.0) * delta)
}

fn candidate(n: usize, m: usize, memory: f64, delta: f64, kappa: usize) -> Result<UpperBoundCandidate> {
    let mbar = expected_distinct_requests(n, m);
    if memory >= full_library_memory(m, delta, kappa) {
        return Ok(UpperBoundCandidate { delta, kappa, placement: None, value: 0.0 });
    }
    let opt = placement::optimize_distribution_uniform(n, m, memory, delta, kappa)?;
    let value = opt.expected_coded_rate.min(mbar);
    Ok(UpperBoundCandidate { delta, kappa, placement: Some(opt), value })
}

/// Infimum over the library's correlation levels of `min{expected_coded_rate*, expected_distinct_requests}`:
/// the generating `delta` with its `kappa`, and the uncompressed
/// (`kappa = 1`) fallback.
pub fn upper_bound(n: usize, m: usize, memory: f64, lib: &GroupedLibrary) -> Result<UpperBound> {
    if memory < 0.0 || memory > m as f64 {
        return Err(Error::OutOfRange(format!("M={memory} must lie in [0, {m}]")));
    }
    let mut candidates = vec![candidate(n, m, memory, 0.0, 1)?];
    if lib.group_size() > 1 {
        let kappa = lib.min_ensemble_size(lib.delta());
        candidates.push(candidate(n, m, memory, lib.delta(), kappa)?);
    }
    let value = candidates.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
    Ok(UpperBound { value, candidates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pmf_small_cases() {
        let pmf = distinct_pmf(2, 4).unwrap();
        assert_eq!(pmf.tail_exact(1), BigRational::one());
        assert_eq!(pmf.tail_exact(2), BigRational::new(3.into(), 4.into()));
        let pmf = distinct_pmf(1, 9).unwrap();
        assert_eq!(pmf.pmf(1), 1.0);
        let pmf = distinct_pmf(3, 3).unwrap();
        assert_eq!(pmf.exact(3), BigRational::new(6.into(), 27.into()));
        assert_eq!(pmf.exact(2), BigRational::new(18.into(), 27.into()));
        assert_eq!(pmf.exact(1), BigRational::new(3.into(), 27.into()));
        assert!(distinct_pmf(0, 3).is_err());
    }

    #[test]
    fn pmf_large_sums_to_one() {
        let pmf = distinct_pmf(300, 1000).unwrap();
        let total: f64 = (1..=pmf.max_distinct()).map(|j| pmf.pmf(j)).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        assert_eq!(pmf.tail_exact(1), BigRational::one());
    }

    #[test]
    fn lower_bound_four_files_without_memory() {
        assert_abs_diff_eq!(lower_bound(2, 4, 0.0, 20, 8).unwrap(), 0.9375, epsilon = 1e-15);
        assert_eq!(lower_bound(2, 4, 2.5, 20, 8).unwrap(), 0.0);
        assert_eq!(lower_bound(10, 100, 60.0, 600, 10).unwrap(), 0.0);
    }

    #[test]
    fn subset_weight_values() {
        assert_abs_diff_eq!(subset_weight(0.25, 1.0, 2, 1).unwrap(), 0.5625, epsilon = 1e-15);
        assert_eq!(subset_weight(0.0, 5.0, 3, 1).unwrap(), 1.0);
        assert_eq!(subset_weight(0.0, 5.0, 3, 2).unwrap(), 0.0);
        assert_eq!(subset_weight(0.2, 5.0, 3, 3).unwrap(), 0.0);
        assert!(subset_weight(0.5, 5.0, 3, 1).is_err());
        assert!(subset_weight(0.1, 1.0, 3, 4).is_err());
    }

    #[test]
    fn expected_coded_rate_values() {
        assert_abs_diff_eq!(expected_coded_rate(0.25, 0.25, 0.25, 1.0, 2).unwrap(), 1.640625, epsilon = 1e-12);
        assert_eq!(expected_coded_rate(0.3, 0.1, 0.1, 10.0, 4).unwrap(), 0.0);
        let no_p = expected_coded_rate(0.0, 0.05, 0.09, 4.0, 5).unwrap();
        let only_i = expected_coded_rate(0.0, 0.05, 0.0, 4.0, 5).unwrap();
        assert_abs_diff_eq!(no_p, only_i, epsilon = 1e-15);
        assert_abs_diff_eq!(expected_coded_rate(0.2, 0.01, 0.01, 0.0, 10).unwrap(), 12.0, epsilon = 1e-12);
    }

    #[test]
    fn coded_rate_matches_closed_form_without_correlation() {
        // sum_l C(n,l) x^(l-1) (1-x)^(n-l+1) = (1-x)/x (1 - (1-x)^n)
        for &(n, m, mem) in &[(10usize, 100usize, 20.0f64), (3, 7, 2.0), (6, 10, 9.5)] {
            let x = mem / m as f64;
            let closed = (1.0 - x) / x * (1.0 - (1.0 - x).powi(n as i32));
            assert_abs_diff_eq!(
                expected_coded_rate(0.0, 1.0 / m as f64, 0.0, mem, n).unwrap(),
                closed,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn expected_distinct_requests_values() {
        assert_abs_diff_eq!(expected_distinct_requests(10, 100), 9.5618, epsilon = 5e-4);
        assert_abs_diff_eq!(expected_distinct_requests(1, 50), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn upper_bound_zero_at_full_library() {
        let lib = GroupedLibrary::uniform(100, 2, 0.2, 10).unwrap();
        let ub = upper_bound(10, 100, 60.0, &lib).unwrap();
        assert!(ub.value.abs() < 1e-9, "{}", ub.value);
        let ub = upper_bound(10, 100, 0.0, &lib).unwrap();
        assert_abs_diff_eq!(ub.value, expected_distinct_requests(10, 100), epsilon = 1e-12);
    }

    #[test]
    fn upper_bound_fallback_is_uncorrelated_scheme() {
        let lib = GroupedLibrary::uniform(100, 2, 0.2, 10).unwrap();
        let ub = upper_bound(10, 100, 30.0, &lib).unwrap();
        let fallback = &ub.candidates[0];
        assert_eq!(fallback.kappa, 1);
        let x: f64 = 0.3;
        let closed = (1.0 - x) / x * (1.0 - (1.0 - x).powi(10));
        assert_abs_diff_eq!(fallback.value, closed, epsilon = 1e-9);
        assert!(ub.value <= fallback.value);
    }
}
