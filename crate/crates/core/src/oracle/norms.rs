//! H^2, weighted Hardy and Sobolev-type norms of polynomials, and the
//! equivalence constants between the last two.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::monomial_norm_sq;
use super::series::{MultiIndex, TruncatedSeries};
use crate::error::{Error, Result};
use crate::linalg::{random_sphere_point, C64};

/// `||f_k||^2` of each homogeneous part, indexed by `k`.
pub fn homogeneous_norms_sq(f: &TruncatedSeries) -> Vec<f64> {
    let mut out = vec![0.0; f.degree() + 1];
    for (alpha, c) in f.terms() {
        out[alpha.degree()] += c.norm_sqr() * monomial_norm_sq(alpha);
    }
    out
}

pub fn h2_norm_sq(f: &TruncatedSeries) -> f64 {
    homogeneous_norms_sq(f).iter().sum()
}

/// `sum_k ||f_k||^2 (k + 1)^{2 nu}`.
pub fn weighted_norm_sq(f: &TruncatedSeries, nu: f64) -> f64 {
    homogeneous_norms_sq(f)
        .iter()
        .enumerate()
        .map(|(k, m)| m * ((k + 1) as f64).powf(2.0 * nu))
        .sum()
}

/// `Gamma(c+1) k! / Gamma(c+k+2)`, the ratio of `A^2_c` to `H^2` norms on
/// degree-`k` homogeneous polynomials; 1 at `c = -1`.
fn bergman_weight(k: usize, c: f64) -> f64 {
    if c == -1.0 {
        return 1.0;
    }
    (ln_gamma(c + 1.0) + ln_gamma(k as f64 + 1.0) - ln_gamma(c + k as f64 + 2.0)).exp()
}

/// `|f(0)|^2 + sum_{k >= 1} k^{2s} ||f_k||^2 Gamma(c+1) k! / Gamma(c+k+2)`:
/// the `A^2_c` norm of the radial derivative `R^s f`, plus the constant term.
pub fn sobolev_norm_sq(f: &TruncatedSeries, s: u32, c: f64) -> Result<f64> {
    if c.is_nan() || c < -1.0 {
        return Err(Error::ParameterConstraintViolated(format!("weight c = {c} must be >= -1")));
    }
    Ok(homogeneous_norms_sq(f)
        .iter()
        .enumerate()
        .map(|(k, m)| {
            if k == 0 {
                *m
            } else {
                m * (k as f64).powi(2 * s as i32) * bergman_weight(k, c)
            }
        })
        .sum())
}

/// `(s, c)` with `s = ceil(nu) + 1` and `c = 2s - 2 nu - 1`.
pub fn norm_equivalence_parameters(nu: f64) -> Result<(u32, f64)> {
    if !nu.is_finite() {
        return Err(Error::ParameterConstraintViolated(format!("nu = {nu}")));
    }
    let s = (nu.ceil() + 1.0).max(0.0);
    let c = 2.0 * s - 2.0 * nu - 1.0;
    if s < nu || c < -1.0 {
        return Err(Error::ParameterConstraintViolated(format!("s = {s}, c = {c} for nu = {nu}")));
    }
    Ok((s as u32, c))
}

/// Constants `lower <= weighted / sobolev <= upper` valid for every
/// polynomial of degree `<= max_degree`: the extreme per-degree ratios.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEquivalence {
    pub nu: f64,
    pub s: u32,
    pub c: f64,
    pub max_degree: usize,
    pub lower: f64,
    pub upper: f64,
    /// Ratio of the degree-`k` weights, `k = 0..=max_degree`.
    pub per_degree: Vec<f64>,
    /// Large-`k` limit `1 / Gamma(c + 1)` of the per-degree ratio.
    pub asymptote: f64,
}

impl NormEquivalence {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, ratio: f64, rel_tol: f64) -> bool {
        ratio >= self.lower * (1.0 - rel_tol) && ratio <= self.upper * (1.0 + rel_tol)
    }
}

pub fn norm_equivalence_bounds(nu: f64, max_degree: usize) -> Result<NormEquivalence> {
    let (s, c) = norm_equivalence_parameters(nu)?;
    let per_degree: Vec<f64> = (0..=max_degree)
        .map(|k| {
            if k == 0 {
                1.0
            } else {
                ((k + 1) as f64).powf(2.0 * nu) / ((k as f64).powi(2 * s as i32) * bergman_weight(k, c))
            }
        })
        .collect();
    let lower = per_degree.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = per_degree.iter().copied().fold(0.0, f64::max);
    Ok(NormEquivalence {
        nu,
        s,
        c,
        max_degree,
        lower,
        upper,
        per_degree,
        asymptote: (-ln_gamma(c + 1.0)).exp(),
    })
}

/// Observed `weighted / sobolev` ratios for random polynomials against the
/// precomputed interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEquivalenceCheck {
    pub bounds: NormEquivalence,
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub all_within: bool,
}

/// Random polynomials of degree `<= max_degree` in `n` variables with
/// coefficients uniform in the unit square.
pub fn norm_equivalence_check(nu: f64, n: usize, max_degree: usize, samples: usize, seed: u64) -> Result<NormEquivalenceCheck> {
    let bounds = norm_equivalence_bounds(nu, max_degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut all_within = true;
    for _ in 0..samples {
        let degree = rng.random_range(0..=max_degree);
        let terms: Vec<(MultiIndex, C64)> = MultiIndex::up_to_degree(n, degree)
            .into_iter()
            .map(|a| (a, C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect();
        let f = TruncatedSeries::from_terms(n, degree, terms)?;
        let ratio = weighted_norm_sq(&f, nu) / sobolev_norm_sq(&f, bounds.s, bounds.c)?;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        all_within &= bounds.contains(ratio, 1e-12);
    }
    Ok(NormEquivalenceCheck {
        bounds,
        n,
        samples,
        min_ratio: lo,
        max_ratio: hi,
        all_within,
    })
}

/// Monte-Carlo estimate of `int_S |f|^2 d sigma` with its standard error.
pub fn sphere_norm_sq_estimate<R: Rng + ?Sized>(f: &TruncatedSeries, samples: usize, rng: &mut R) -> Result<(f64, f64)> {
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let z = random_sphere_point(f.dim(), rng);
        let v = f.evaluate(z.as_slice())?.norm_sqr();
        sum += v;
        sum_sq += v * v;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0);
    Ok((mean, (var / m).sqrt()))
}
