//! Multivariate power series truncated at a total degree.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};

/// Exponent vector `alpha` of `z^alpha`, ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `z^alpha` at a point.
    pub fn eval(&self, z: &[C64]) -> C64 {
        self.0.iter().zip(z).fold(ONE, |acc, (&e, &x)| acc * x.powu(e))
    }

    /// Indices of total degree exactly `k`, ascending.
    pub fn of_degree(n: usize, k: usize) -> Vec<MultiIndex> {
        fn rec(n: usize, k: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if n == 1 {
                prefix.push(k as u32);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in 0..=k {
                prefix.push(e as u32);
                rec(n - 1, k - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            if k == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        rec(n, k, &mut Vec::with_capacity(n), &mut out);
        out
    }

    /// The graded basis `|alpha| <= d`, ascending.
    pub fn up_to_degree(n: usize, d: usize) -> Vec<MultiIndex> {
        (0..=d).flat_map(|k| Self::of_degree(n, k)).collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `C(n + d, n)`, the number of monomials of degree at most `d` in `n`
/// variables; saturates at `usize::MAX`.
pub fn basis_dimension(n: usize, d: usize) -> usize {
    let mut acc: u128 = 1;
    for i in 1..=n as u128 {
        acc = acc * (d as u128 + i) / i;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Power series in `n` variables keeping only terms of total degree `<= degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    n: usize,
    degree: usize,
    coeffs: BTreeMap<MultiIndex, C64>,
}

impl TruncatedSeries {
    pub fn zero(n: usize, degree: usize) -> Self {
        TruncatedSeries {
            n,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, degree: usize, c: C64) -> Self {
        let mut s = Self::zero(n, degree);
        s.coeffs.insert(MultiIndex::zero(n), c);
        s
    }

    /// `c z^alpha`, or zero when `|alpha| > degree`.
    pub fn monomial(n: usize, degree: usize, alpha: MultiIndex, c: C64) -> Result<Self> {
        check_dim(n, alpha.dim())?;
        let mut s = Self::zero(n, degree);
        if alpha.degree() <= degree {
            s.coeffs.insert(alpha, c);
        }
        Ok(s)
    }

    pub fn variable(n: usize, degree: usize, j: usize) -> Self {
        let mut s = Self::zero(n, degree);
        if degree >= 1 {
            s.coeffs.insert(MultiIndex::unit(n, j), ONE);
        }
        s
    }

    /// `c0 + sum_j coeffs[j] z_j`.
    pub fn affine(degree: usize, c0: C64, coeffs: &[C64]) -> Self {
        let n = coeffs.len();
        let mut s = Self::zero(n, degree);
        if c0 != ZERO {
            s.coeffs.insert(MultiIndex::zero(n), c0);
        }
        if degree >= 1 {
            for (j, &c) in coeffs.iter().enumerate() {
                if c != ZERO {
                    s.coeffs.insert(MultiIndex::unit(n, j), c);
                }
            }
        }
        s
    }

    /// Terms with `|alpha| > degree` are dropped.
    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, C64)>>(n: usize, degree: usize, terms: I) -> Result<Self> {
        let mut s = Self::zero(n, degree);
        for (alpha, c) in terms {
            check_dim(n, alpha.dim())?;
            if alpha.degree() <= degree {
                *s.coeffs.entry(alpha).or_insert(ZERO) += c;
            }
        }
        Ok(s)
    }

    /// `(1 - z_j)^s` by the recurrence `b_{k+1} = b_k (k - s) / (k + 1)`.
    pub fn binomial(n: usize, degree: usize, j: usize, s: C64) -> Self {
        let mut out = Self::zero(n, degree);
        let mut b = ONE;
        for k in 0..=degree {
            let mut e = vec![0; n];
            e[j] = k as u32;
            // (1 - z)^s = sum_k b_k z^k with b_k = (-1)^k C(s, k)
            out.coeffs.insert(MultiIndex(e), b);
            b *= (C64::new(k as f64, 0.0) - s) / (k as f64 + 1.0);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> C64 {
        self.coeffs.get(alpha).copied().unwrap_or(ZERO)
    }

    /// Stored terms in graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// All coefficients exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| *c == ZERO)
    }

    /// Largest total degree carrying a non-zero coefficient.
    pub fn effective_degree(&self) -> Option<usize> {
        self.coeffs.iter().rev().find(|(_, c)| **c != ZERO).map(|(a, _)| a.degree())
    }

    pub fn truncate(&self, degree: usize) -> Self {
        let degree = degree.min(self.degree);
        TruncatedSeries {
            n: self.n,
            degree,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(a, _)| a.degree() <= degree)
                .map(|(a, c)| (a.clone(), *c))
                .collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        TruncatedSeries {
            n: self.n,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(a, x)| (a.clone(), x * c)).collect(),
        }
    }

    /// Sum truncated at the smaller of the two degrees.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(ONE, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-ONE, other)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: C64, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        let mut out = self.truncate(other.degree);
        for (a, x) in &other.coeffs {
            if a.degree() <= out.degree {
                *out.coeffs.entry(a.clone()).or_insert(ZERO) += c * x;
            }
        }
        Ok(out)
    }

    /// Product truncated at the smaller of the two degrees.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        let degree = self.degree.min(other.degree);
        let mut coeffs: BTreeMap<MultiIndex, C64> = BTreeMap::new();
        // both maps iterate in ascending degree, so the inner loop can stop early
        for (a, x) in &self.coeffs {
            let da = a.degree();
            if da > degree {
                break;
            }
            for (b, y) in &other.coeffs {
                if da + b.degree() > degree {
                    break;
                }
                *coeffs.entry(a.add(b)).or_insert(ZERO) += x * y;
            }
        }
        Ok(TruncatedSeries { n: self.n, degree, coeffs })
    }

    pub fn powi(&self, k: u32) -> Result<Self> {
        let mut out = Self::constant(self.n, self.degree, ONE);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// `1 / s` through `degree`, from `1/s = (1/c0) sum_k (-v)^k` with
    /// `v = s/c0 - 1`.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = self.coeff(&MultiIndex::zero(self.n));
        if c0 == ZERO {
            return Err(Error::ZeroConstantTerm);
        }
        let mut v = self.scale(ONE / c0);
        v.coeffs.remove(&MultiIndex::zero(self.n));
        let one = Self::constant(self.n, self.degree, ONE);
        // Horner: 1 - v (1 - v (1 - ...))
        let mut acc = one.clone();
        for _ in 0..self.degree {
            acc = one.sub(&v.mul(&acc)?)?;
        }
        Ok(acc.scale(ONE / c0))
    }

    pub fn evaluate(&self, z: &[C64]) -> Result<C64> {
        check_dim(self.n, z.len())?;
        Ok(self.coeffs.iter().map(|(a, c)| c * a.eval(z)).sum())
    }
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}
