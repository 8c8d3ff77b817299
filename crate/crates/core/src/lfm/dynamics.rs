//! Fixed points, the Denjoy-Wolff point and the involutive automorphisms
//! `phi_a` of the ball.

use rand::Rng;
use serde::Serialize;

use super::LinearFractionalMap;
use crate::error::{Error, Result};
use crate::linalg::{
    eigenspaces, inner, is_finite, norm, orthonormalize, random_sphere_point, random_unitary, real,
    CMatrix, CVector, ONE,
};
use crate::serde_util::{cvec, cvec_slice};
use crate::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointKind {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoint {
    #[serde(with = "cvec")]
    pub location: CVector,
    pub kind: FixedPointKind,
    /// `<dphi_tau(tau), tau>`, present exactly for boundary points.
    pub dilation: Option<f64>,
}

/// An affine slice of fixed points meeting the open ball.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedSlice {
    /// Point of the slice closest to the origin.
    #[serde(with = "cvec")]
    pub base: CVector,
    #[serde(with = "cvec_slice")]
    pub directions: Vec<CVector>,
    pub dimension: usize,
    pub whole_ball: bool,
}

impl FixedSlice {
    /// A point where the slice meets the unit sphere.
    pub fn boundary_point(&self) -> CVector {
        let r = norm(&self.base);
        let t = (1.0 - r * r).max(0.0).sqrt();
        &self.base + &self.directions[0] * real(t)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct FixedPointSet {
    pub points: Vec<FixedPoint>,
    /// Directions of fixed points on the hyperplane at infinity.
    #[serde(with = "cvec_slice")]
    pub at_infinity: Vec<CVector>,
    pub slices: Vec<FixedSlice>,
}

impl FixedPointSet {
    /// An interior fixed point, preferring isolated points over slices.
    pub fn interior_point(&self) -> Option<CVector> {
        self.points
            .iter()
            .find(|p| p.kind == FixedPointKind::Interior)
            .map(|p| p.location.clone())
            .or_else(|| self.slices.first().map(|s| s.base.clone()))
    }

    pub fn boundary_points(&self) -> Vec<&FixedPoint> {
        self.points
            .iter()
            .filter(|p| p.kind == FixedPointKind::Boundary)
            .collect()
    }

    pub fn has_slice(&self) -> bool {
        !self.slices.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenjoyWolff {
    pub point: FixedPoint,
    pub alpha: f64,
    /// `(1 - |phi(r tau)|) / (1 - r)` at `r = 1 - 1e-6`.
    pub radial_alpha: f64,
    /// Other boundary fixed points whose dilation is also within tolerance of
    /// the Denjoy-Wolff range (near-parabolic degeneracy).
    pub ties: Vec<FixedPoint>,
    pub warnings: Vec<String>,
}

impl DenjoyWolff {
    pub fn tau(&self) -> &CVector {
        &self.point.location
    }
}

const CLUSTER_TOL: f64 = 1e-6;
const NULL_TOL: f64 = 1e-8;

impl LinearFractionalMap {
    pub fn fixed_points(&self) -> Result<FixedPointSet> {
        self.fixed_points_with(&Tolerances::default())
    }

    /// Fixed points from the eigenvectors of the associated matrix.
    pub fn fixed_points_with(&self, tol: &Tolerances) -> Result<FixedPointSet> {
        let n = self.dim();
        let m = self.associated_matrix();
        let mut set = FixedPointSet::default();
        let mut affine: Vec<CVector> = Vec::new();

        for space in eigenspaces(&m, CLUSTER_TOL, NULL_TOL)? {
            let last: Vec<_> = space.basis.iter().map(|e| e[n]).collect();
            let weight: f64 = last.iter().map(|l| l.norm_sqr()).sum();
            if weight.sqrt() < 1e-10 {
                for e in &space.basis {
                    let dir = e.rows(0, n).into_owned();
                    let len = norm(&dir);
                    set.at_infinity.push(dir / real(len));
                }
                continue;
            }
            let mut x = CVector::zeros(n + 1);
            for (e, l) in space.basis.iter().zip(&last) {
                x += e * (l.conj() / weight);
            }
            let dirs: Vec<CVector> = space
                .basis
                .iter()
                .zip(&last)
                .map(|(e, l)| (e - &x * *l).rows(0, n).into_owned())
                .collect();
            let dirs = orthonormalize(&dirs, 1e-10);
            let p = x.rows(0, n).into_owned();
            if dirs.is_empty() {
                affine.push(p);
                continue;
            }
            let mut base = p.clone();
            for q in &dirs {
                base -= q * inner(&p, q);
            }
            let r = norm(&base);
            if r < 1.0 - tol.boundary {
                set.slices.push(FixedSlice {
                    whole_ball: dirs.len() == n,
                    dimension: dirs.len(),
                    base,
                    directions: dirs,
                });
            } else {
                // slice misses the open ball; keep its nearest point
                affine.push(base);
            }
        }

        for p in affine {
            if !is_finite(&p) {
                continue;
            }
            let p = self.polish_fixed_point(p);
            let r = norm(&p);
            let kind = if (1.0 - r).abs() < tol.boundary {
                FixedPointKind::Boundary
            } else if r < 1.0 {
                FixedPointKind::Interior
            } else {
                FixedPointKind::Exterior
            };
            let dilation = match kind {
                FixedPointKind::Boundary => Some(self.dilation_at(&p)?),
                _ => None,
            };
            set.points.push(FixedPoint {
                location: p,
                kind,
                dilation,
            });
        }
        set.points.sort_by(|a, b| {
            let rank = |p: &FixedPoint| match p.kind {
                FixedPointKind::Interior => 0,
                FixedPointKind::Boundary => 1,
                FixedPointKind::Exterior => 2,
            };
            rank(a)
                .cmp(&rank(b))
                .then(a.dilation.unwrap_or(0.0).total_cmp(&b.dilation.unwrap_or(0.0)))
        });
        Ok(set)
    }

    /// A few guarded Newton steps on `phi(z) - z`.
    fn polish_fixed_point(&self, mut z: CVector) -> CVector {
        if norm(&z) > 1e6 {
            return z;
        }
        let resid = |z: &CVector| self.evaluate(z).map(|w| norm(&(w - z))).unwrap_or(f64::INFINITY);
        let mut best = resid(&z);
        let n = self.dim();
        for _ in 0..4 {
            if best < 1e-15 {
                break;
            }
            let Ok(jac) = self.jacobian(&z) else { break };
            let Ok(w) = self.evaluate(&z) else { break };
            let sys = jac - CMatrix::identity(n, n);
            let Some(step) = sys.lu().solve(&(w - &z)) else { break };
            let trial = &z - step;
            let r = resid(&trial);
            if !(r < best) {
                break;
            }
            z = trial;
            best = r;
        }
        z
    }

    /// `<dphi_tau(tau), tau>` as a real number.
    pub fn dilation_at(&self, tau: &CVector) -> Result<f64> {
        let jac = self.jacobian(tau)?;
        Ok(inner(&(jac * tau), tau).re)
    }

    pub fn denjoy_wolff(&self) -> Result<DenjoyWolff> {
        self.denjoy_wolff_with(&Tolerances::default())
    }

    pub fn denjoy_wolff_with(&self, tol: &Tolerances) -> Result<DenjoyWolff> {
        let set = self.fixed_points_with(tol)?;
        if set.interior_point().is_some() {
            return Err(Error::HasInteriorFixedPoint);
        }
        let mut candidates: Vec<FixedPoint> = set
            .boundary_points()
            .into_iter()
            .filter(|p| p.dilation.is_some_and(|d| d <= 1.0 + tol.dilation_slack))
            .cloned()
            .collect();
        if candidates.is_empty() {
            return Err(Error::NoQualifyingBoundaryPoint);
        }
        let point = candidates.remove(0);
        let alpha = point.dilation.expect("boundary point has a dilation");
        let mut warnings = Vec::new();
        if !candidates.is_empty() {
            warnings.push(format!(
                "{} further boundary fixed point(s) with dilation within {} of 1; reporting the smallest",
                candidates.len(),
                tol.dilation_slack
            ));
        }
        let radial_alpha = self.radial_dilation(&point.location, 1e-6)?;
        if (radial_alpha - alpha).abs() > tol.radial_agreement {
            return Err(Error::DilationMismatch {
                jacobian: alpha,
                radial: radial_alpha,
            });
        }
        Ok(DenjoyWolff {
            point,
            alpha,
            radial_alpha,
            ties: candidates,
            warnings,
        })
    }

    /// Radial difference quotient `(1 - |phi(r tau)|) / (1 - r)`, `r = 1 - h`.
    pub fn radial_dilation(&self, tau: &CVector, h: f64) -> Result<f64> {
        let t = tau / real(norm(tau));
        let w = self.evaluate(&(&t * real(1.0 - h)))?;
        Ok((1.0 - norm(&w)) / h)
    }
}

/// The involutive automorphism `phi_a` exchanging `a` and `0`:
/// `phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>)`, `s_a = sqrt(1 - |a|^2)`.
pub fn ball_automorphism_to_origin(a: &CVector) -> Result<LinearFractionalMap> {
    let n = a.len();
    let r = norm(a);
    if r >= 1.0 {
        return Err(Error::PointNotInterior { norm: r });
    }
    let s = (1.0 - r * r).sqrt();
    let mut lin = CMatrix::identity(n, n) * real(-s);
    if r > 0.0 {
        let p = (a * a.adjoint()) / real(r * r);
        lin -= p * real(1.0 - s);
    }
    LinearFractionalMap::new(lin, a.clone(), -a.clone(), ONE)
}

/// `U o phi_a` with Haar-random `U` and `a` uniform in direction with
/// `|a| <= max_radius`.
pub fn random_automorphism<R: Rng + ?Sized>(n: usize, max_radius: f64, rng: &mut R) -> LinearFractionalMap {
    let a = random_sphere_point(n, rng) * real(max_radius * rng.random::<f64>());
    let phi = ball_automorphism_to_origin(&a).expect("|a| < 1");
    LinearFractionalMap::linear(random_unitary(n, rng))
        .expect("unitary is non-degenerate")
        .compose(&phi)
        .expect("same dimension")
}
