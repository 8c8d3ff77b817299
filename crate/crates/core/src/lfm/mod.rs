//! Linear fractional maps `z -> (Az + B) / (<z, C> + d)` of the unit ball.
//!
//! A map is stored through its associated `(N+1) x (N+1)` matrix
//! `[[A, B], [C*, d]]`, scaled so that `d` is real and non-negative and the
//! matrix has unit Frobenius norm. Two maps are equal as maps exactly when
//! their normalised matrices agree.

mod dynamics;
mod halfplane;
mod validate;

pub use dynamics::{
    ball_automorphism_to_origin, random_automorphism, DenjoyWolff, FixedPoint, FixedPointKind, FixedPointSet,
    FixedSlice,
};
pub use halfplane::{cayley_matrix, cayley_inverse_matrix, HalfPlaneConjugation, HalfPlaneMap};
pub use validate::{ValidationOptions, ValidationReport};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{frobenius, inner, norm, real, CMatrix, CVector, C64, ONE};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFractionalMap {
    a: CMatrix,
    b: CVector,
    c: CVector,
    d: C64,
}

impl LinearFractionalMap {
    pub fn new(a: CMatrix, b: CVector, c: CVector, d: C64) -> Result<Self> {
        let n = a.nrows();
        if n == 0 {
            return Err(Error::DegenerateMap("dimension must be positive".into()));
        }
        for len in [a.ncols(), b.len(), c.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: len,
                });
            }
        }
        let mut m = CMatrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&a);
        m.view_mut((0, n), (n, 1)).copy_from(&b);
        for j in 0..n {
            m[(n, j)] = c[j].conj();
        }
        m[(n, n)] = d;
        Self::from_associated(m)
    }

    /// Builds the map represented (projectively) by an associated matrix.
    pub fn from_associated(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() < 2 {
            return Err(Error::DegenerateMap(format!(
                "associated matrix must be square of size >= 2, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let m = normalize(m)?;
        let n = m.nrows() - 1;
        let a = m.view((0, 0), (n, n)).into_owned();
        let b = m.view((0, n), (n, 1)).column(0).into_owned();
        let c = CVector::from_fn(n, |j, _| m[(n, j)].conj());
        Ok(LinearFractionalMap { a, b, c, d: m[(n, n)] })
    }

    pub fn identity(n: usize) -> Self {
        Self::linear(CMatrix::identity(n, n)).expect("identity is non-degenerate")
    }

    /// `z -> Az`.
    pub fn linear(a: CMatrix) -> Result<Self> {
        let n = a.nrows();
        Self::new(a, CVector::zeros(n), CVector::zeros(n), ONE)
    }

    /// One-variable Moebius map `z -> (a z + b) / (c z + d)`.
    pub fn mobius(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        Self::new(
            CMatrix::from_element(1, 1, a),
            CVector::from_element(1, b),
            CVector::from_element(1, c.conj()),
            d,
        )
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
    pub fn a(&self) -> &CMatrix {
        &self.a
    }
    pub fn b(&self) -> &CVector {
        &self.b
    }
    pub fn c(&self) -> &CVector {
        &self.c
    }
    pub fn d(&self) -> C64 {
        self.d
    }

    pub fn associated_matrix(&self) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&self.a);
        m.view_mut((0, n), (n, 1)).copy_from(&self.b);
        for j in 0..n {
            m[(n, j)] = self.c[j].conj();
        }
        m[(n, n)] = self.d;
        m
    }

    /// The same map rescaled so that `d = 1` (fails when `d = 0`).
    pub fn parts_with_unit_d(&self) -> Result<(CMatrix, CVector, CVector)> {
        if self.d.norm() < 1e-300 {
            return Err(Error::DenominatorVanishes { modulus: 0.0 });
        }
        let s = ONE / self.d;
        Ok((&self.a * s, &self.b * s, &self.c * s.conj()))
    }

    pub fn denominator(&self, z: &CVector) -> C64 {
        inner(z, &self.c) + self.d
    }

    fn check_dim(&self, z: &CVector) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: z.len(),
            });
        }
        Ok(())
    }

    fn checked_denominator(&self, z: &CVector) -> Result<C64> {
        self.check_dim(z)?;
        let q = self.denominator(z);
        // the matrix has unit norm, so an absolute threshold is meaningful
        if q.norm() < 1e-14 {
            return Err(Error::DenominatorVanishes { modulus: q.norm() });
        }
        Ok(q)
    }

    pub fn evaluate(&self, z: &CVector) -> Result<CVector> {
        let q = self.checked_denominator(z)?;
        Ok((&self.a * z + &self.b) / q)
    }

    /// `dphi_z = (A - phi(z) C*) / (<z,C> + d)`.
    pub fn jacobian(&self, z: &CVector) -> Result<CMatrix> {
        let q = self.checked_denominator(z)?;
        let phi = (&self.a * z + &self.b) / q;
        Ok((&self.a - phi * self.c.adjoint()) / q)
    }

    /// `self o other`.
    pub fn compose(&self, other: &LinearFractionalMap) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Self::from_associated(self.associated_matrix() * other.associated_matrix())
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self
            .associated_matrix()
            .try_inverse()
            .ok_or_else(|| Error::DegenerateMap("associated matrix is singular".into()))?;
        Self::from_associated(inv)
    }

    /// `sigma^{-1} o self o sigma`.
    pub fn conjugate_by(&self, sigma: &LinearFractionalMap) -> Result<Self> {
        sigma.inverse()?.compose(&self.compose(sigma)?)
    }

    /// n-th iterate (`power(0)` is the identity).
    pub fn power(&self, n: usize) -> Self {
        let mut acc = Self::identity(self.dim());
        for _ in 0..n {
            acc = self.compose(&acc).expect("same dimension");
        }
        acc
    }

    /// Distance between normalised associated matrices; zero exactly for
    /// equal maps when `d != 0`.
    pub fn projective_distance(&self, other: &LinearFractionalMap) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        frobenius(&(self.associated_matrix() - other.associated_matrix()))
    }

    /// True iff `m* J m = lambda J` for some `lambda > 0`, `J = diag(I, -1)`.
    pub fn is_automorphism_with(&self, rel_tol: f64) -> bool {
        let n = self.dim();
        let m = self.associated_matrix();
        let mut j = CMatrix::identity(n + 1, n + 1);
        j[(n, n)] = real(-1.0);
        let k = m.adjoint() * &j * &m;
        let lambda = (&j * &k).trace().re / (n + 1) as f64;
        if lambda <= 0.0 {
            return false;
        }
        frobenius(&(&k - &j * real(lambda))) <= rel_tol * frobenius(&k)
    }

    pub fn is_automorphism(&self) -> bool {
        self.is_automorphism_with(crate::Tolerances::default().automorphism)
    }

    /// `min |<z,C> + d|` over the closed ball, i.e. `|d| - |C|`.
    pub fn denominator_margin(&self) -> f64 {
        self.d.norm() - norm(&self.c)
    }
}

fn normalize(mut m: CMatrix) -> Result<CMatrix> {
    let n = m.nrows() - 1;
    let fro = frobenius(&m);
    if fro == 0.0 || !fro.is_finite() {
        return Err(Error::DegenerateMap("associated matrix is zero".into()));
    }
    let anchor = if m[(n, n)].norm() > 0.0 {
        m[(n, n)]
    } else {
        *m.iter().find(|z| z.norm() > 0.0).expect("nonzero matrix")
    };
    let scale = anchor / anchor.norm() * fro;
    // keep normalisation idempotent bit-for-bit
    if (scale - ONE).norm() > 4.0 * f64::EPSILON {
        m /= scale;
    }
    if m[(n, n)].im != 0.0 && m[(n, n)].im.abs() < 1e-15 * m[(n, n)].re.abs() {
        m[(n, n)].im = 0.0;
    }
    Ok(m)
}

#[derive(Serialize, Deserialize)]
struct MapFile {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "B")]
    b: Vec<[f64; 2]>,
    #[serde(rename = "C")]
    c: Vec<[f64; 2]>,
    d: [f64; 2],
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn cplx(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

impl Serialize for LinearFractionalMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        MapFile {
            n,
            a: (0..n)
                .map(|i| (0..n).map(|j| pair(self.a[(i, j)])).collect())
                .collect(),
            b: self.b.iter().copied().map(pair).collect(),
            c: self.c.iter().copied().map(pair).collect(),
            d: pair(self.d),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearFractionalMap {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let f = MapFile::deserialize(de)?;
        let n = f.n;
        if f.a.len() != n || f.a.iter().any(|r| r.len() != n) {
            return Err(D::Error::custom(format!("A must be {n}x{n}")));
        }
        if f.b.len() != n || f.c.len() != n {
            return Err(D::Error::custom(format!("B and C must have length {n}")));
        }
        let a = CMatrix::from_fn(n, n, |i, j| cplx(f.a[i][j]));
        let b = CVector::from_iterator(n, f.b.iter().copied().map(cplx));
        let c = CVector::from_iterator(n, f.c.iter().copied().map(cplx));
        LinearFractionalMap::new(a, b, c, cplx(f.d)).map_err(D::Error::custom)
    }
}
