//! Independent numerical checks: truncated power series, monomial norms of
//! H^2(B_N), Galerkin compressions of composition operators, eigenfunction
//! residuals and weighted/Sobolev norm equivalence.

mod compression;
mod eigen;
mod norms;
mod series;

pub use compression::{
    build_compression, build_compression_with, compression_eigenvalues, compression_spectrum, default_degree_cap,
    map_power_series, CompressionHeader, CompressionMatrix, CompressionOptions, MapExpansion,
};
pub use eigen::{
    binomial_eigenfunctions, binomial_truncation_degree, compose_with_map, eigenfunction_candidates,
    eigenfunction_residual, monomial_eigenfunctions, residual_table, EigenfunctionCandidate, ResidualRow,
};
pub use norms::{
    h2_norm_sq, homogeneous_norms_sq, norm_equivalence_bounds, norm_equivalence_check, norm_equivalence_parameters, sobolev_norm_sq,
    sphere_norm_sq_estimate, weighted_norm_sq, NormEquivalence, NormEquivalenceCheck,
};
pub use series::{basis_dimension, MultiIndex, TruncatedSeries};

/// Factorials up to 20! are exact in u64.
const EXACT_FACTORIAL_MAX: usize = 20;

fn factorial_u64(m: usize) -> u64 {
    (1..=m as u64).product()
}

pub(crate) fn ln_factorial(m: usize) -> f64 {
    if m <= EXACT_FACTORIAL_MAX {
        (factorial_u64(m) as f64).ln()
    } else {
        statrs::function::gamma::ln_gamma(m as f64 + 1.0)
    }
}

/// `||z^alpha||^2 = (N-1)! alpha! / (N-1+|alpha|)!` in H^2(B_N).
pub fn monomial_norm_sq(alpha: &MultiIndex) -> f64 {
    let n = alpha.dim();
    if n == 0 {
        return 1.0;
    }
    let k = alpha.degree();
    if n - 1 + k <= EXACT_FACTORIAL_MAX {
        let num = factorial_u64(n - 1) * alpha.exponents().iter().map(|&e| factorial_u64(e as usize)).product::<u64>();
        return num as f64 / factorial_u64(n - 1 + k) as f64;
    }
    let ln = ln_factorial(n - 1) + alpha.exponents().iter().map(|&e| ln_factorial(e as usize)).sum::<f64>()
        - ln_factorial(n - 1 + k);
    ln.exp()
}
