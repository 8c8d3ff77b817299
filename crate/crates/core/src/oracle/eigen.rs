//! Composition of series with a map and eigenfunction residuals of `C_phi`.

use serde::Serialize;

use super::compression::MapExpansion;
use super::norms::h2_norm_sq;
use super::series::{MultiIndex, TruncatedSeries};
use crate::error::{Error, Result};
use crate::lfm::LinearFractionalMap;
use crate::linalg::{C64, ONE, ZERO};

/// Degree-`degree` truncation of `f o phi`, by substituting the cached
/// coordinate powers of `phi` into every term of `f`.
pub fn compose_with_map(f: &TruncatedSeries, map: &LinearFractionalMap, degree: usize) -> Result<TruncatedSeries> {
    let n = map.dim();
    if f.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: f.dim(),
        });
    }
    let mut max = vec![0u32; n];
    for (alpha, _) in f.terms() {
        for (m, &e) in max.iter_mut().zip(alpha.exponents()) {
            *m = (*m).max(e);
        }
    }
    let mut exp = MapExpansion::new(map, degree)?;
    exp.ensure_powers(&max)?;
    let mut out = TruncatedSeries::zero(n, degree);
    for (alpha, c) in f.terms() {
        if *c == ZERO {
            continue;
        }
        out = out.axpy(*c, &exp.power(alpha)?)?;
    }
    Ok(out)
}

/// `||F o phi - lambda F|| / ||F||` in the H^2 norm truncated at `degree`.
/// `f` may carry terms beyond `degree`; they enter through the composition.
pub fn eigenfunction_residual(map: &LinearFractionalMap, f: &TruncatedSeries, lambda: C64, degree: usize) -> Result<f64> {
    let base = f.truncate(degree);
    let denom = h2_norm_sq(&base);
    if denom == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let composed = compose_with_map(f, map, degree)?;
    let diff = composed.axpy(-lambda, &base)?;
    Ok((h2_norm_sq(&diff) / denom).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenfunctionCandidate {
    pub label: String,
    pub function: TruncatedSeries,
    pub eigenvalue: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRow {
    pub label: String,
    #[serde(with = "crate::serde_util::c64")]
    pub eigenvalue: C64,
    pub residual: f64,
}

pub fn residual_table(
    map: &LinearFractionalMap,
    candidates: &[EigenfunctionCandidate],
    degree: usize,
) -> Result<Vec<ResidualRow>> {
    candidates
        .iter()
        .map(|c| {
            Ok(ResidualRow {
                label: c.label.clone(),
                eigenvalue: c.eigenvalue,
                residual: eigenfunction_residual(map, &c.function, c.eigenvalue, degree)?,
            })
        })
        .collect()
}

fn is_small(z: C64, scale: f64) -> bool {
    z.norm() <= 1e-12 * scale.max(1.0)
}

/// Diagonal linear maps `z -> Lambda z` have eigenfunctions `z^alpha` with
/// eigenvalue `Lambda^alpha`.
pub fn monomial_eigenfunctions(
    map: &LinearFractionalMap,
    max_degree: usize,
    series_degree: usize,
) -> Result<Vec<EigenfunctionCandidate>> {
    let (a, b, c) = map.parts_with_unit_d()?;
    let n = map.dim();
    let scale = a.norm();
    let diagonal = (0..n).all(|i| is_small(b[i], scale) && is_small(c[i], scale))
        && (0..n).all(|i| (0..n).all(|j| i == j || is_small(a[(i, j)], scale)));
    if !diagonal {
        return Err(Error::NoEigenfunctionFamily("map is not diagonal and linear".into()));
    }
    let lambda: Vec<C64> = (0..n).map(|i| a[(i, i)]).collect();
    MultiIndex::up_to_degree(n, max_degree)
        .into_iter()
        .map(|alpha| {
            Ok(EigenfunctionCandidate {
                label: format!("z^{:?}", alpha.exponents()),
                eigenvalue: alpha.eval(&lambda),
                function: TruncatedSeries::monomial(n, series_degree, alpha, ONE)?,
            })
        })
        .collect()
}

/// Degree at which `(1 - z_1)^s o phi` is resolved through `degree` when
/// `1 - phi_1 = kappa (1 - z_1)`: the dropped terms are bounded by
/// `C(k, degree) |1 - kappa|^{k - degree} k^2`.
pub fn binomial_truncation_degree(kappa: C64, degree: usize) -> usize {
    let q = (ONE - kappa).norm();
    if q == 0.0 {
        return degree;
    }
    let lq = q.ln();
    let mut ln_binom = 0.0;
    let cap = 20 * degree.max(50);
    for k in degree + 1..=cap {
        // ln C(k, degree) from ln C(k-1, degree)
        ln_binom += (k as f64).ln() - ((k - degree) as f64).ln();
        let bound = ln_binom + (k - degree) as f64 * lq + 2.0 * (k as f64).ln();
        if k > 2 * degree && bound < (1e-18f64).ln() {
            return k;
        }
    }
    cap
}

/// For maps with `1 - phi_1(z) = kappa (1 - z_1)`, the functions
/// `(1 - z_1)^s` are eigenfunctions with eigenvalue `kappa^s`.
pub fn binomial_eigenfunctions(
    map: &LinearFractionalMap,
    exponents: &[C64],
    degree: usize,
) -> Result<Vec<EigenfunctionCandidate>> {
    let (a, b, c) = map.parts_with_unit_d()?;
    let n = map.dim();
    let kappa = a[(0, 0)];
    let scale = a.norm();
    let shape = (0..n).all(|i| is_small(c[i], scale))
        && (1..n).all(|j| is_small(a[(0, j)], scale))
        && is_small(b[0] + kappa - ONE, scale);
    if !shape || kappa.re <= 0.0 {
        return Err(Error::NoEigenfunctionFamily(
            "first coordinate is not of the form 1 - kappa (1 - z_1) with Re kappa > 0".into(),
        ));
    }
    let k = binomial_truncation_degree(kappa, degree);
    Ok(exponents
        .iter()
        .map(|&s| EigenfunctionCandidate {
            label: format!("(1-z1)^({}{:+}i)", s.re, s.im),
            eigenvalue: kappa.powc(s),
            function: TruncatedSeries::binomial(n, k, 0, s),
        })
        .collect())
}

/// Closed-form eigenfunctions available for `map`, trying the monomial
/// family, then the binomial family.
pub fn eigenfunction_candidates(
    map: &LinearFractionalMap,
    max_degree: usize,
    exponents: &[C64],
    degree: usize,
) -> Result<Vec<EigenfunctionCandidate>> {
    match monomial_eigenfunctions(map, max_degree, degree) {
        Ok(c) => Ok(c),
        Err(Error::NoEigenfunctionFamily(_)) => binomial_eigenfunctions(map, exponents, degree).map_err(|_| {
            Error::NoEigenfunctionFamily("neither a diagonal linear map nor 1 - phi_1 = kappa (1 - z_1)".into())
        }),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CMatrix, CVector};

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn hyperbolic2() -> LinearFractionalMap {
        let a = CMatrix::from_diagonal(&CVector::from_column_slice(&[r(0.5), r(0.5)]));
        LinearFractionalMap::new(a, CVector::from_column_slice(&[r(0.5), ZERO]), CVector::zeros(2), ONE).unwrap()
    }

    #[test]
    fn constants_are_fixed() {
        let f = TruncatedSeries::constant(2, 10, ONE);
        assert_eq!(eigenfunction_residual(&hyperbolic2(), &f, ONE, 10).unwrap(), 0.0);
        let z = TruncatedSeries::zero(2, 10);
        assert_eq!(eigenfunction_residual(&hyperbolic2(), &z, ONE, 10).unwrap_err(), Error::ZeroFunction);
    }

    #[test]
    fn rotation_monomials() {
        let theta = std::f64::consts::TAU * (2f64.sqrt() - 1.0);
        let a = CMatrix::from_diagonal(&CVector::from_column_slice(&[C64::from_polar(1.0, theta), r(0.5)]));
        let map = LinearFractionalMap::linear(a).unwrap();
        let cands = monomial_eigenfunctions(&map, 6, 20).unwrap();
        assert_eq!(cands.len(), 28);
        for row in residual_table(&map, &cands, 20).unwrap() {
            assert!(row.residual < 1e-12, "{row:?}");
        }
        // a wrong eigenvalue is detected
        let f = TruncatedSeries::monomial(2, 20, MultiIndex::new(vec![1, 0]), ONE).unwrap();
        assert!(eigenfunction_residual(&map, &f, ONE, 20).unwrap() > 0.1);
    }

    #[test]
    fn binomial_family_of_translation() {
        let map = hyperbolic2();
        assert!(monomial_eigenfunctions(&map, 2, 10).is_err());
        let s = [r(0.3), C64::new(1.0, 2.0), C64::new(-0.4, 1.0)];
        let cands = eigenfunction_candidates(&map, 2, &s, 60).unwrap();
        for (cand, s) in cands.iter().zip(s) {
            assert!((cand.eigenvalue - r(2.0).powc(-s)).norm() < 1e-14);
            let res = eigenfunction_residual(&map, &cand.function, cand.eigenvalue, 60).unwrap();
            assert!(res < 1e-9, "{s}: {res}");
        }
    }

    #[test]
    fn composition_matches_evaluation() {
        let map = LinearFractionalMap::mobius(r(0.3), r(0.2), r(0.3), ONE).unwrap();
        let f = TruncatedSeries::binomial(1, 40, 0, C64::new(0.5, 0.7));
        let g = compose_with_map(&f, &map, 40).unwrap();
        for x in [r(0.3), C64::new(-0.1, 0.25), C64::new(0.0, -0.3)] {
            let w = map.evaluate(&CVector::from_element(1, x)).unwrap()[0];
            let direct = f.evaluate(&[w]).unwrap();
            assert!((g.evaluate(&[x]).unwrap() - direct).norm() < 1e-9);
        }
    }
}
