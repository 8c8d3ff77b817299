//! Matrix of `C_phi` compressed to polynomials of degree `<= D`, in the
//! orthonormal monomial basis `e_alpha = z^alpha / ||z^alpha||`.

use rayon::prelude::*;
use serde::Serialize;

use super::series::{basis_dimension, MultiIndex, TruncatedSeries};
use super::monomial_norm_sq;
use crate::error::{Error, Result};
use crate::lfm::LinearFractionalMap;
use crate::linalg::{eigenvalues, CMatrix, C64, ONE};

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionOptions {
    /// Largest admissible basis size `C(N + D, N)`.
    pub size_cap: usize,
}

impl Default for CompressionOptions {
    fn default() -> Self {
        CompressionOptions { size_cap: 5000 }
    }
}

/// Default truncation degree, keeping the basis at a few hundred elements.
pub fn default_degree_cap(n: usize) -> usize {
    match n {
        0 | 1 => 60,
        2 => 25,
        3 => 12,
        4 => 7,
        _ => 4,
    }
}

/// Coordinates `phi_j` as series and their cached powers.
#[derive(Debug, Clone)]
pub struct MapExpansion {
    degree: usize,
    /// `powers[j][k] = phi_j^k`.
    powers: Vec<Vec<TruncatedSeries>>,
}

impl MapExpansion {
    pub fn new(map: &LinearFractionalMap, degree: usize) -> Result<Self> {
        let n = map.dim();
        let (a, b, c) = map.parts_with_unit_d()?;
        let den: Vec<C64> = c.iter().map(|x| x.conj()).collect();
        let recip = TruncatedSeries::affine(degree, ONE, &den).reciprocal()?;
        let powers = (0..n)
            .map(|i| {
                let row: Vec<C64> = (0..n).map(|j| a[(i, j)]).collect();
                let phi = TruncatedSeries::affine(degree, b[i], &row).mul(&recip)?;
                Ok(vec![TruncatedSeries::constant(n, degree, ONE), phi])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MapExpansion { degree, powers })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coordinate(&self, j: usize) -> &TruncatedSeries {
        &self.powers[j][1]
    }

    /// Extends the cache so that `phi_j^k` is available for `k <= max[j]`.
    pub fn ensure_powers(&mut self, max: &[u32]) -> Result<()> {
        for (j, &m) in max.iter().enumerate() {
            while self.powers[j].len() <= m as usize {
                let next = self.powers[j].last().unwrap().mul(&self.powers[j][1])?;
                self.powers[j].push(next);
            }
        }
        Ok(())
    }

    /// `phi^beta` from cached powers; call `ensure_powers` first.
    pub fn power(&self, beta: &MultiIndex) -> Result<TruncatedSeries> {
        let mut out: Option<TruncatedSeries> = None;
        for (j, &e) in beta.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let p = self
                .powers[j]
                .get(e as usize)
                .ok_or_else(|| Error::ParameterConstraintViolated(format!("power {e} of coordinate {j} not cached")))?;
            out = Some(match out {
                None => p.clone(),
                Some(acc) => acc.mul(p)?,
            });
        }
        Ok(out.unwrap_or_else(|| self.powers[0][0].clone()))
    }
}

/// Degree-`degree` Taylor polynomial of `prod_j phi_j^{beta_j}` at 0.
pub fn map_power_series(map: &LinearFractionalMap, beta: &MultiIndex, degree: usize) -> Result<TruncatedSeries> {
    if beta.dim() != map.dim() {
        return Err(Error::DimensionMismatch {
            expected: map.dim(),
            actual: beta.dim(),
        });
    }
    let mut exp = MapExpansion::new(map, degree)?;
    exp.ensure_powers(beta.exponents())?;
    exp.power(beta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionMatrix {
    pub n: usize,
    pub degree: usize,
    /// Graded-lexicographic basis; row and column order of `matrix`.
    pub basis: Vec<MultiIndex>,
    /// `M[alpha, beta] = <C_phi e_beta, e_alpha>`.
    pub matrix: CMatrix,
}

/// Describes the basis ordering of an exported compression matrix.
#[derive(Debug, Clone, Serialize)]
pub struct CompressionHeader {
    #[serde(rename = "N")]
    pub n: usize,
    pub degree: usize,
    pub order: &'static str,
    pub dimension: usize,
    pub basis: Vec<MultiIndex>,
}

impl CompressionMatrix {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn header(&self) -> CompressionHeader {
        CompressionHeader {
            n: self.n,
            degree: self.degree,
            order: "grlex",
            dimension: self.dimension(),
            basis: self.basis.clone(),
        }
    }

    /// Rows `row,col,re,im` for the non-zero entries, column-major.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,col,re,im\n");
        for j in 0..self.dimension() {
            for i in 0..self.dimension() {
                let z = self.matrix[(i, j)];
                if z.re != 0.0 || z.im != 0.0 {
                    s.push_str(&format!("{i},{j},{:?},{:?}\n", z.re, z.im));
                }
            }
        }
        s
    }
}

pub fn build_compression(map: &LinearFractionalMap, degree: usize) -> Result<CompressionMatrix> {
    build_compression_with(map, degree, &CompressionOptions::default())
}

pub fn build_compression_with(
    map: &LinearFractionalMap,
    degree: usize,
    opts: &CompressionOptions,
) -> Result<CompressionMatrix> {
    let n = map.dim();
    let dimension = basis_dimension(n, degree);
    if dimension > opts.size_cap {
        return Err(Error::SizeCapExceeded {
            degree,
            dimension,
            cap: opts.size_cap,
        });
    }
    let basis = MultiIndex::up_to_degree(n, degree);
    let norms: Vec<f64> = basis.iter().map(|a| monomial_norm_sq(a).sqrt()).collect();
    let mut exp = MapExpansion::new(map, degree)?;
    exp.ensure_powers(&vec![degree as u32; n])?;

    let index: std::collections::HashMap<&MultiIndex, usize> = basis.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let columns: Vec<Vec<(usize, C64)>> = basis
        .par_iter()
        .enumerate()
        .map(|(j, beta)| {
            let col = exp.power(beta)?;
            Ok(col
                .terms()
                .map(|(alpha, c)| {
                    let i = index[alpha];
                    (i, c * (norms[i] / norms[j]))
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut matrix = CMatrix::zeros(dimension, dimension);
    for (j, col) in columns.into_iter().enumerate() {
        for (i, v) in col {
            matrix[(i, j)] = v;
        }
    }
    Ok(CompressionMatrix {
        n,
        degree,
        basis,
        matrix,
    })
}

/// Eigenvalues sorted by descending modulus, then argument.
pub fn compression_eigenvalues(m: &CompressionMatrix) -> Result<Vec<C64>> {
    let mut vals = eigenvalues(&m.matrix)?;
    vals.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(a.arg().total_cmp(&b.arg())));
    Ok(vals)
}

pub fn compression_spectrum(map: &LinearFractionalMap, degree: usize) -> Result<Vec<C64>> {
    compression_eigenvalues(&build_compression(map, degree)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{multiset_distance, CVector, ZERO};

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn diag(xs: &[C64]) -> LinearFractionalMap {
        LinearFractionalMap::linear(CMatrix::from_diagonal(&CVector::from_column_slice(xs))).unwrap()
    }

    #[test]
    fn power_series_of_maps() {
        let id = LinearFractionalMap::identity(2);
        let s = map_power_series(&id, &MultiIndex::new(vec![2, 0]), 4).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.coeff(&MultiIndex::new(vec![2, 0])) - ONE).norm() < 1e-15);
        let half = LinearFractionalMap::mobius(r(0.5), r(0.5), ZERO, ONE).unwrap();
        let s = map_power_series(&half, &MultiIndex::new(vec![2]), 2).unwrap();
        for (k, e) in [0.25, 0.5, 0.25].iter().enumerate() {
            assert!((s.coeff(&MultiIndex::new(vec![k as u32])) - r(*e)).norm() < 1e-15);
        }
        let z = LinearFractionalMap::mobius(ONE, ZERO, r(-1.0), r(2.0)).unwrap();
        let s = map_power_series(&z, &MultiIndex::new(vec![1]), 5).unwrap();
        // z / (2 - z) = sum_{k>=1} z^k / 2^k
        for k in 1..=5 {
            assert!((s.coeff(&MultiIndex::new(vec![k])) - r(0.5f64.powi(k as i32))).norm() < 1e-15);
        }
    }

    #[test]
    fn small_compressions() {
        let m = build_compression(&LinearFractionalMap::identity(2), 3).unwrap();
        assert!((m.matrix.clone() - CMatrix::identity(10, 10)).norm() < 1e-14);
        let m = build_compression(&LinearFractionalMap::mobius(r(0.5), ZERO, ZERO, ONE).unwrap(), 3).unwrap();
        let expect = CMatrix::from_diagonal(&CVector::from_column_slice(&[r(1.0), r(0.5), r(0.25), r(0.125)]));
        assert!((m.matrix - expect).norm() < 1e-15);
        let half = LinearFractionalMap::mobius(r(0.5), r(0.5), ZERO, ONE).unwrap();
        let m = build_compression(&half, 2).unwrap();
        for (k, e) in [1.0, 0.5, 0.25].iter().enumerate() {
            assert!((m.matrix[(k, k)] - r(*e)).norm() < 1e-15);
        }
        let vals = compression_spectrum(&half, 3).unwrap();
        let d = multiset_distance(&vals, &[r(1.0), r(0.5), r(0.25), r(0.125)]).unwrap();
        assert!(d < 1e-12);
    }

    #[test]
    fn diagonal_map_products() {
        let vals = compression_spectrum(&diag(&[r(0.5), r(1.0 / 3.0)]), 2).unwrap();
        let expect = [1.0, 0.5, 1.0 / 3.0, 0.25, 1.0 / 6.0, 1.0 / 9.0].map(r);
        assert!(multiset_distance(&vals, &expect).unwrap() < 1e-12);
    }

    #[test]
    fn block_triangular_when_origin_fixed() {
        let a = CMatrix::from_row_slice(2, 2, &[r(0.3), C64::new(0.1, 0.2), r(-0.2), C64::new(0.0, 0.4)]);
        let map = LinearFractionalMap::new(a, CVector::zeros(2), CVector::from_column_slice(&[r(0.2), C64::new(0.0, 0.1)]), ONE).unwrap();
        let m = build_compression(&map, 5).unwrap();
        for (j, beta) in m.basis.iter().enumerate() {
            for (i, alpha) in m.basis.iter().enumerate() {
                if alpha.degree() < beta.degree() {
                    assert_eq!(m.matrix[(i, j)], ZERO);
                }
            }
        }
    }

    #[test]
    fn size_cap() {
        let err = build_compression_with(&LinearFractionalMap::identity(3), 20, &CompressionOptions { size_cap: 1000 })
            .unwrap_err();
        assert_eq!(err, Error::SizeCapExceeded { degree: 20, dimension: 1771, cap: 1000 });
    }

    #[test]
    fn csv_and_header() {
        let m = build_compression(&LinearFractionalMap::identity(1), 1).unwrap();
        let csv = m.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "row,col,re,im");
        assert!(lines[1].starts_with("0,0,") && lines[2].starts_with("1,1,"));
        assert_eq!(m.header().order, "grlex");
    }
}
