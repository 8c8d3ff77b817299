//! Affine self-maps of the Siegel half-plane `H_N = {(z, w) : Re z > |w|^2}`
//! and the Cayley transform `sigma_C(z, w) = ((1 + z) / (1 - z), w / (1 - z))`
//! carrying the ball onto it.

use serde::Serialize;

use super::LinearFractionalMap;
use crate::error::{Error, Result};
use crate::linalg::{
    frobenius, norm, real, spectral_norm, unitary_with_first_column, CMatrix, CVector, C64, ONE,
};
use crate::serde_util::{c64, cmat, cvec};
use crate::Tolerances;

/// `psi(z, w) = (1/alpha) (z + <w, b> + c, A w + d)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfPlaneMap {
    pub alpha: f64,
    #[serde(with = "c64")]
    pub c: C64,
    #[serde(with = "cvec")]
    pub b: CVector,
    #[serde(with = "cmat")]
    pub a: CMatrix,
    #[serde(with = "cvec")]
    pub d: CVector,
}

/// Homogeneous Cayley matrix acting on `(z, w, t)`.
pub fn cayley_matrix(n: usize) -> CMatrix {
    let mut s = CMatrix::identity(n + 1, n + 1);
    s[(0, n)] = ONE;
    s[(n, 0)] = real(-1.0);
    s
}

/// Inverse of [`cayley_matrix`] up to the scalar 1/2.
pub fn cayley_inverse_matrix(n: usize) -> CMatrix {
    let mut s = CMatrix::identity(n + 1, n + 1) * real(2.0);
    s[(0, 0)] = ONE;
    s[(n, n)] = ONE;
    s[(0, n)] = real(-1.0);
    s[(n, 0)] = ONE;
    s
}

fn block_rotation(u: &CMatrix) -> CMatrix {
    let n = u.nrows();
    let mut r = CMatrix::identity(n + 1, n + 1);
    r.view_mut((0, 0), (n, n)).copy_from(u);
    r
}

impl HalfPlaneMap {
    /// Builds the map and checks `alpha Re c >= |d|^2` and `||A|| <= sqrt(alpha)`.
    pub fn new(alpha: f64, c: C64, b: CVector, a: CMatrix, d: CVector) -> Result<Self> {
        let m = (b.len(), a.nrows(), a.ncols(), d.len());
        if m.0 != m.1 || m.1 != m.2 || m.2 != m.3 {
            return Err(Error::InvalidHalfPlaneForm(format!(
                "inconsistent block sizes b={}, A={}x{}, d={}",
                m.0, m.1, m.2, m.3
            )));
        }
        let map = HalfPlaneMap { alpha, c, b, a, d };
        map.check(1e-9)?;
        Ok(map)
    }

    pub fn dim(&self) -> usize {
        self.b.len() + 1
    }

    pub fn check(&self, tol: f64) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidHalfPlaneForm(format!("alpha = {} is not positive", self.alpha)));
        }
        let d2 = norm(&self.d).powi(2);
        if self.alpha * self.c.re < d2 - tol * (1.0 + d2) {
            return Err(Error::InvalidHalfPlaneForm(format!(
                "alpha Re c = {} < |d|^2 = {}",
                self.alpha * self.c.re,
                d2
            )));
        }
        let an = spectral_norm(&self.a);
        if an > self.alpha.sqrt() * (1.0 + tol) + tol {
            return Err(Error::InvalidHalfPlaneForm(format!(
                "||A|| = {an} exceeds sqrt(alpha) = {}",
                self.alpha.sqrt()
            )));
        }
        Ok(())
    }

    /// Evaluates at `(z, w)` given as one vector with `z` first.
    pub fn evaluate(&self, p: &CVector) -> Result<CVector> {
        let h = self.affine_matrix();
        let n = self.dim();
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: p.len() });
        }
        let mut x = CVector::from_element(n + 1, ONE);
        x.rows_mut(0, n).copy_from(p);
        Ok((h * x).rows(0, n).into_owned())
    }

    /// `[[1/a, b*/a, c/a], [0, A/a, d/a], [0, 0, 1]]`.
    pub fn affine_matrix(&self) -> CMatrix {
        let n = self.dim();
        let s = real(1.0 / self.alpha);
        let mut h = CMatrix::zeros(n + 1, n + 1);
        h[(0, 0)] = s;
        for j in 1..n {
            h[(0, j)] = self.b[j - 1].conj() * s;
            h[(j, n)] = self.d[j - 1] * s;
        }
        h[(0, n)] = self.c * s;
        h.view_mut((1, 1), (n - 1, n - 1)).copy_from(&(&self.a * s));
        h[(n, n)] = ONE;
        h
    }

    /// Reads the form off a (projective) affine matrix of size `N + 1`.
    pub fn from_affine_matrix(h: &CMatrix) -> Result<Self> {
        let n = h.nrows() - 1;
        let scale = frobenius(h);
        let last = h[(n, n)];
        if last.norm() < 1e-13 * scale {
            return Err(Error::InvalidHalfPlaneForm("infinity is not fixed".into()));
        }
        let h = h / last;
        let scale = frobenius(&h);
        let mut stray = (0..n).map(|j| h[(n, j)].norm()).fold(0.0, f64::max);
        stray = (1..n).map(|i| h[(i, 0)].norm()).fold(stray, f64::max);
        if stray > 1e-9 * scale {
            return Err(Error::InvalidHalfPlaneForm(format!(
                "matrix is not of half-plane form (stray entry {stray:.3e})"
            )));
        }
        let a00 = h[(0, 0)];
        if a00.re <= 0.0 || a00.im.abs() > 1e-9 * a00.norm() {
            return Err(Error::InvalidHalfPlaneForm(format!("leading coefficient {a00} is not positive")));
        }
        let alpha = 1.0 / a00.re;
        let s = real(alpha);
        let b = CVector::from_fn(n - 1, |j, _| h[(0, j + 1)].conj() * s);
        let d = CVector::from_fn(n - 1, |j, _| h[(j + 1, n)] * s);
        let a = h.view((1, 1), (n - 1, n - 1)) * s;
        let c = h[(0, n)] * s;
        HalfPlaneMap::new(alpha, c, b, a, d)
    }

    /// The ball map `sigma_C^{-1} o psi o sigma_C`.
    pub fn pull_back(&self) -> Result<LinearFractionalMap> {
        let n = self.dim();
        LinearFractionalMap::from_associated(cayley_inverse_matrix(n) * self.affine_matrix() * cayley_matrix(n))
    }
}

/// A half-plane form together with the unitary `U` (`U e_1 = tau`) used to
/// move the Denjoy-Wolff point to `e_1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfPlaneConjugation {
    pub half_plane: HalfPlaneMap,
    #[serde(with = "cmat")]
    pub rotation: CMatrix,
}

impl HalfPlaneConjugation {
    /// `U sigma_C^{-1} psi sigma_C U*`, which should reproduce the original map.
    pub fn to_ball_map(&self) -> Result<LinearFractionalMap> {
        let r = block_rotation(&self.rotation);
        let inner = self.half_plane.pull_back()?.associated_matrix();
        LinearFractionalMap::from_associated(&r * inner * r.adjoint())
    }
}

impl LinearFractionalMap {
    /// Conjugates to the half-plane at the Denjoy-Wolff point `tau`.
    pub fn conjugate_to_halfplane(&self, tau: &CVector) -> Result<HalfPlaneConjugation> {
        self.conjugate_to_halfplane_with(tau, &Tolerances::default())
    }

    pub fn conjugate_to_halfplane_with(
        &self,
        tau: &CVector,
        tol: &Tolerances,
    ) -> Result<HalfPlaneConjugation> {
        let n = self.dim();
        if tau.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: tau.len() });
        }
        let r = norm(tau);
        if (r - 1.0).abs() > tol.boundary {
            return Err(Error::NotDenjoyWolff(format!("|tau| = {r} is not on the sphere")));
        }
        let tau = tau / real(r);
        let residual = norm(&(self.evaluate(&tau)? - &tau));
        if residual > tol.fixed_point.max(1e-8) {
            return Err(Error::NotDenjoyWolff(format!("tau is not fixed (residual {residual:.3e})")));
        }
        let dil = self.dilation_at(&tau)?;
        if dil > 1.0 + tol.dilation_slack {
            return Err(Error::NotDenjoyWolff(format!("dilation {dil} exceeds 1")));
        }
        let u = unitary_with_first_column(&tau);
        let rot = block_rotation(&u);
        let m = rot.adjoint() * self.associated_matrix() * &rot;
        let h = cayley_matrix(n) * m * cayley_inverse_matrix(n);
        let half_plane = HalfPlaneMap::from_affine_matrix(&h)?;
        Ok(HalfPlaneConjugation { half_plane, rotation: u })
    }
}
