//! Classification of linear fractional self-maps (elliptic, parabolic,
//! hyperbolic) and their normal forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lfm::{
    ball_automorphism_to_origin, cayley_inverse_matrix, FixedPoint, HalfPlaneMap, LinearFractionalMap,
};
use crate::linalg::{
    eigenvalues, norm, random_sphere_point, real, spectral_norm, unitary_with_first_column, CMatrix,
    CVector, C64, ONE,
};
use crate::serde_util::{c64, c64_slice, cmat, cvec, opt_cvec};
use crate::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MapKind {
    EllipticAutomorphism,
    /// Interior fixed point, unitary index `p > 0`.
    EllipticUnitaryPart,
    /// `p = 0`, no boundary fixed point.
    EllipticInteriorOnly,
    /// `p = 0`, exactly one boundary fixed point.
    EllipticBoundaryFixed,
    Parabolic,
    HyperbolicOneFixed,
    HyperbolicTwoFixed,
    /// Hyperbolic automorphism; parabolic automorphisms are `Parabolic`.
    OtherAutomorphism,
}

impl MapKind {
    pub fn is_elliptic(self) -> bool {
        matches!(
            self,
            MapKind::EllipticAutomorphism
                | MapKind::EllipticUnitaryPart
                | MapKind::EllipticInteriorOnly
                | MapKind::EllipticBoundaryFixed
        )
    }

    pub fn is_hyperbolic(self) -> bool {
        matches!(self, MapKind::HyperbolicOneFixed | MapKind::HyperbolicTwoFixed)
    }
}

/// One conjugation `phi -> sigma^{-1} o phi o sigma` of the normalisation chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugationStep {
    pub label: String,
    pub conjugator: LinearFractionalMap,
    pub result: LinearFractionalMap,
}

impl ConjugationStep {
    fn apply(label: &str, map: &LinearFractionalMap, conjugator: LinearFractionalMap) -> Result<Self> {
        let result = map.conjugate_by(&conjugator)?;
        Ok(ConjugationStep {
            label: label.to_string(),
            conjugator,
            result,
        })
    }
}

/// Undoes a conjugation chain starting from its last result.
pub fn reconstruct(chain: &[ConjugationStep]) -> Result<Option<LinearFractionalMap>> {
    let Some(last) = chain.last() else {
        return Ok(None);
    };
    let mut map = last.result.clone();
    for step in chain.iter().rev() {
        map = map.conjugate_by(&step.conjugator.inverse()?)?;
    }
    Ok(Some(map))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EllipticSpectralData {
    #[serde(with = "c64_slice")]
    pub unimodular: Vec<C64>,
    #[serde(with = "c64_slice")]
    pub contractive: Vec<C64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum P0Domain {
    /// `delta < 1`; `r = (1 - delta^2)^{-1/2}`.
    Ellipsoid { r: f64 },
    /// `delta = 1`.
    HalfPlane,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EllipticP0Form {
    pub delta: f64,
    #[serde(with = "cmat")]
    pub a1: CMatrix,
    pub a1_norm: f64,
    /// `U` with `U* V = delta e_1`.
    #[serde(with = "cmat")]
    pub rotation: CMatrix,
    pub domain: P0Domain,
    /// Largest `|sigma(phi~(z)) - A_1 sigma(z)|` over the sample points.
    pub conjugacy_residual: f64,
    #[serde(skip)]
    chain: Vec<ConjugationStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HyperbolicCase {
    OneFixed {
        c: f64,
        #[serde(with = "cmat")]
        a: CMatrix,
        #[serde(with = "cvec")]
        d: CVector,
    },
    /// `(z / alpha, A' w / sqrt(alpha))`.
    TwoFixed {
        #[serde(with = "cmat")]
        a_prime: CMatrix,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicNormalForm {
    pub alpha: f64,
    pub case: HyperbolicCase,
    /// Half-plane form before the Heisenberg step.
    pub initial: HalfPlaneMap,
    /// Half-plane form after both translations.
    pub reduced: HalfPlaneMap,
    #[serde(with = "cvec")]
    pub k1: CVector,
    #[serde(with = "c64")]
    pub k2: C64,
    /// `t` of the translation `(z, w) -> (z + t, w)`.
    #[serde(with = "c64")]
    pub translation: C64,
    /// Eigenvalues of `A` (one fixed point) or `A'` (two fixed points).
    #[serde(with = "c64_slice")]
    pub block_eigenvalues: Vec<C64>,
    #[serde(skip)]
    chain: Vec<ConjugationStep>,
}

impl HyperbolicNormalForm {
    pub fn fixed_point_count(&self) -> usize {
        match self.case {
            HyperbolicCase::OneFixed { .. } => 1,
            HyperbolicCase::TwoFixed { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub kind: MapKind,
    #[serde(with = "opt_cvec")]
    pub interior_fixed_point: Option<CVector>,
    /// The interior fixed set is a slice of positive dimension.
    pub fixed_slice: bool,
    #[serde(with = "opt_cvec")]
    pub denjoy_wolff: Option<CVector>,
    pub boundary_fixed_points: Vec<FixedPoint>,
    pub alpha: Option<f64>,
    pub radial_alpha: Option<f64>,
    pub unitary_index: Option<usize>,
    /// Eigenvalues of `dphi` at the interior fixed point, or of the
    /// half-plane block for hyperbolic maps.
    #[serde(with = "c64_slice")]
    pub eigenvalues: Vec<C64>,
    #[serde(with = "c64_slice")]
    pub unimodular_eigenvalues: Vec<C64>,
    #[serde(with = "c64_slice")]
    pub contractive_eigenvalues: Vec<C64>,
    pub elliptic_p0: Option<EllipticP0Form>,
    pub hyperbolic: Option<HyperbolicNormalForm>,
    pub chain: Vec<ConjugationStep>,
    pub warnings: Vec<String>,
}

impl Classification {
    fn new(kind: MapKind) -> Self {
        Classification {
            kind,
            interior_fixed_point: None,
            fixed_slice: false,
            denjoy_wolff: None,
            boundary_fixed_points: Vec::new(),
            alpha: None,
            radial_alpha: None,
            unitary_index: None,
            eigenvalues: Vec::new(),
            unimodular_eigenvalues: Vec::new(),
            contractive_eigenvalues: Vec::new(),
            elliptic_p0: None,
            hyperbolic: None,
            chain: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// The map rebuilt from the normal form through the recorded chain.
    pub fn reconstruct(&self) -> Result<Option<LinearFractionalMap>> {
        reconstruct(&self.chain)
    }
}

/// Sorts by decreasing modulus, then by argument.
fn sort_eigenvalues(v: &mut [C64]) {
    v.sort_by(|a, b| {
        let (ma, mb) = (a.norm(), b.norm());
        if (ma - mb).abs() > 1e-12 {
            mb.total_cmp(&ma)
        } else {
            a.arg().total_cmp(&b.arg())
        }
    });
}

fn check_fixed(map: &LinearFractionalMap, z0: &CVector, tol: &Tolerances) -> Result<()> {
    let residual = norm(&(map.evaluate(z0)? - z0));
    if residual > tol.fixed_point {
        return Err(Error::NotAFixedPoint { residual });
    }
    Ok(())
}

fn jacobian_eigenvalues(map: &LinearFractionalMap, z0: &CVector) -> Result<Vec<C64>> {
    let mut vals = eigenvalues(&map.jacobian(z0)?)?;
    sort_eigenvalues(&mut vals);
    Ok(vals)
}

pub fn unitary_index(map: &LinearFractionalMap, z0: &CVector) -> Result<usize> {
    unitary_index_with(map, z0, &Tolerances::default())
}

/// Number of eigenvalues of `dphi_{z0}` on the unit circle, with multiplicity.
pub fn unitary_index_with(map: &LinearFractionalMap, z0: &CVector, tol: &Tolerances) -> Result<usize> {
    check_fixed(map, z0, tol)?;
    Ok(jacobian_eigenvalues(map, z0)?
        .iter()
        .filter(|l| (l.norm() - 1.0).abs() < tol.unimodular)
        .count())
}

pub fn elliptic_spectral_data(map: &LinearFractionalMap, z0: &CVector) -> Result<EllipticSpectralData> {
    elliptic_spectral_data_with(map, z0, &Tolerances::default())
}

/// Splits the eigenvalues of `dphi_{z0}` into unimodular and contractive ones.
pub fn elliptic_spectral_data_with(
    map: &LinearFractionalMap,
    z0: &CVector,
    tol: &Tolerances,
) -> Result<EllipticSpectralData> {
    check_fixed(map, z0, tol)?;
    let mut unimodular = Vec::new();
    let mut contractive = Vec::new();
    for l in jacobian_eigenvalues(map, z0)? {
        let m = l.norm();
        if (m - 1.0).abs() < tol.unimodular {
            unimodular.push(l);
        } else if m < 1.0 - tol.gap {
            contractive.push(l);
        } else {
            return Err(Error::GapEigenvalue { modulus: m });
        }
    }
    Ok(EllipticSpectralData {
        unimodular,
        contractive,
    })
}

const DELTA_TOL: f64 = 1e-7;

pub fn elliptic_p0_normal_form(map: &LinearFractionalMap) -> Result<EllipticP0Form> {
    elliptic_p0_normal_form_with(map, &Tolerances::default())
}

pub fn elliptic_p0_normal_form_with(map: &LinearFractionalMap, tol: &Tolerances) -> Result<EllipticP0Form> {
    let z0 = map
        .fixed_points_with(tol)?
        .interior_point()
        .ok_or(Error::NotElliptic)?;
    let p = unitary_index_with(map, &z0, tol)?;
    if p > 0 {
        return Err(Error::UnitaryIndexNonzero(p));
    }
    let n = map.dim();
    let step1 = ConjugationStep::apply(
        "move the interior fixed point to the origin",
        map,
        ball_automorphism_to_origin(&z0)?,
    )?;
    let (a, _, c) = step1.result.parts_with_unit_d()?;
    let v = (a.adjoint() - CMatrix::identity(n, n))
        .lu()
        .solve(&c)
        .ok_or_else(|| Error::DegenerateMap("A* - I is singular".into()))?;
    let delta = norm(&v);
    let u = unitary_with_first_column(&v);
    let a1 = u.adjoint() * &a * &u;
    let step2 = ConjugationStep::apply(
        "rotate V to delta e_1",
        &step1.result,
        LinearFractionalMap::linear(u.clone())?,
    )?;
    let mut sigma_c = CVector::zeros(n);
    sigma_c[0] = real(-delta);
    let sigma = LinearFractionalMap::new(CMatrix::identity(n, n), CVector::zeros(n), sigma_c, ONE)?;
    let step3 = ConjugationStep::apply("linearise by sigma", &step2.result, sigma.inverse()?)?;

    let phi_hat = &step2.result;
    let mut rng = ChaCha8Rng::seed_from_u64(0x0e11_1b70);
    let mut residual: f64 = 0.0;
    for _ in 0..100 {
        let z = random_sphere_point(n, &mut rng) * real(0.9 * rng.random::<f64>());
        let lhs = sigma.evaluate(&phi_hat.evaluate(&z)?)?;
        let rhs = &a1 * sigma.evaluate(&z)?;
        residual = residual.max(norm(&(lhs - &rhs)) / norm(&rhs).max(1.0));
    }

    let domain = if delta > 1.0 - DELTA_TOL {
        P0Domain::HalfPlane
    } else {
        P0Domain::Ellipsoid {
            r: (1.0 - delta * delta).powf(-0.5),
        }
    };
    Ok(EllipticP0Form {
        delta,
        a1_norm: spectral_norm(&a1),
        a1,
        rotation: u,
        domain,
        conjugacy_residual: residual,
        chain: vec![step1, step2, step3],
    })
}

const TWO_FIXED_TOL: f64 = 1e-9;

pub fn hyperbolic_normal_form(map: &LinearFractionalMap) -> Result<HyperbolicNormalForm> {
    hyperbolic_normal_form_with(map, &Tolerances::default())
}

pub fn hyperbolic_normal_form_with(map: &LinearFractionalMap, tol: &Tolerances) -> Result<HyperbolicNormalForm> {
    let dw = map.denjoy_wolff_with(tol).map_err(|e| match e {
        Error::HasInteriorFixedPoint => Error::NotHyperbolic,
        other => other,
    })?;
    if dw.alpha >= 1.0 - tol.parabolic {
        return Err(Error::NotHyperbolic);
    }
    let n = map.dim();
    let conj = map.conjugate_to_halfplane_with(dw.tau(), tol)?;
    let initial = conj.half_plane.clone();
    let alpha = initial.alpha;

    let step1 = ConjugationStep::apply(
        "rotate the Denjoy-Wolff point to e_1",
        map,
        LinearFractionalMap::linear(conj.rotation.clone())?,
    )?;
    let step2 = ConjugationStep::apply(
        "Cayley transform",
        &step1.result,
        LinearFractionalMap::from_associated(cayley_inverse_matrix(n))?,
    )?;

    // Heisenberg translation eta(z, w) = (z + 2<w, k1> + k2, w + k1)
    let m = n - 1;
    let k1 = if m == 0 {
        CVector::zeros(0)
    } else {
        ((initial.a.adjoint() - CMatrix::identity(m, m)) * real(2.0))
            .lu()
            .solve(&initial.b)
            .ok_or_else(|| Error::DegenerateMap("A* - I is singular".into()))?
    };
    let k2 = real(norm(&k1).powi(2));
    let mut eta = CMatrix::identity(n + 1, n + 1);
    for j in 0..m {
        eta[(0, j + 1)] = k1[j].conj() * real(2.0);
        eta[(j + 1, n)] = k1[j];
    }
    eta[(0, n)] = k2;
    let eta_inv = eta
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateMap("Heisenberg matrix is singular".into()))?;
    let h1 = &eta_inv * initial.affine_matrix() * &eta;
    let after_eta = HalfPlaneMap::from_affine_matrix(&h1)?;
    let step3 = ConjugationStep::apply(
        "Heisenberg translation",
        &step2.result,
        LinearFractionalMap::from_associated(eta)?,
    )?;

    // imaginary translation nu(z, w) = (z - i c2 / (1 - alpha), w)
    let t = C64::new(0.0, -after_eta.c.im / (1.0 - alpha));
    let mut nu = CMatrix::identity(n + 1, n + 1);
    nu[(0, n)] = t;
    let mut nu_inv = CMatrix::identity(n + 1, n + 1);
    nu_inv[(0, n)] = -t;
    let mut reduced = HalfPlaneMap::from_affine_matrix(&(nu_inv * after_eta.affine_matrix() * &nu))?;
    let step4 = ConjugationStep::apply(
        "imaginary translation",
        &step3.result,
        LinearFractionalMap::from_associated(nu)?,
    )?;

    let scale = 1.0 + initial.c.norm();
    let (case, block) = if reduced.c.re.abs() <= TWO_FIXED_TOL * scale {
        let a_prime = &reduced.a / real(alpha.sqrt());
        (
            HyperbolicCase::TwoFixed {
                a_prime: a_prime.clone(),
            },
            a_prime,
        )
    } else {
        reduced.c = real(reduced.c.re);
        (
            HyperbolicCase::OneFixed {
                c: reduced.c.re,
                a: reduced.a.clone(),
                d: reduced.d.clone(),
            },
            reduced.a.clone(),
        )
    };
    let mut block_eigenvalues = eigenvalues(&block)?;
    sort_eigenvalues(&mut block_eigenvalues);
    Ok(HyperbolicNormalForm {
        alpha,
        case,
        initial,
        reduced,
        k1,
        k2,
        translation: t,
        block_eigenvalues,
        chain: vec![step1, step2, step3, step4],
    })
}

pub fn classify(map: &LinearFractionalMap) -> Result<Classification> {
    classify_with(map, &Tolerances::default())
}

pub fn classify_with(map: &LinearFractionalMap, tol: &Tolerances) -> Result<Classification> {
    let set = map.fixed_points_with(tol)?;
    let boundary: Vec<FixedPoint> = set.boundary_points().into_iter().cloned().collect();
    let automorphism = map.is_automorphism_with(tol.automorphism);

    if let Some(z0) = set.interior_point() {
        let mut out;
        if automorphism {
            out = Classification::new(MapKind::EllipticAutomorphism);
            let eig = jacobian_eigenvalues(map, &z0)?;
            out.unitary_index = Some(eig.len());
            out.unimodular_eigenvalues = eig.clone();
            out.eigenvalues = eig;
        } else {
            let data = elliptic_spectral_data_with(map, &z0, tol)?;
            let p = data.unimodular.len();
            let kind = if p > 0 {
                MapKind::EllipticUnitaryPart
            } else {
                match boundary.len() {
                    0 => MapKind::EllipticInteriorOnly,
                    1 => MapKind::EllipticBoundaryFixed,
                    k => return Err(Error::TooManyBoundaryFixedPoints(k)),
                }
            };
            out = Classification::new(kind);
            out.unitary_index = Some(p);
            out.eigenvalues = data.unimodular.iter().chain(&data.contractive).copied().collect();
            out.unimodular_eigenvalues = data.unimodular;
            out.contractive_eigenvalues = data.contractive;
            if p == 0 {
                let form = elliptic_p0_normal_form_with(map, tol)?;
                let half_plane = matches!(form.domain, P0Domain::HalfPlane);
                if half_plane != (kind == MapKind::EllipticBoundaryFixed) {
                    out.warnings.push(format!(
                        "delta = {} disagrees with {} boundary fixed point(s)",
                        form.delta,
                        boundary.len()
                    ));
                }
                out.chain = form.chain.clone();
                out.elliptic_p0 = Some(form);
            } else {
                out.chain = vec![ConjugationStep::apply(
                    "move the interior fixed point to the origin",
                    map,
                    ball_automorphism_to_origin(&z0)?,
                )?];
            }
        }
        out.fixed_slice = set.has_slice();
        out.interior_fixed_point = Some(z0);
        out.boundary_fixed_points = boundary;
        return Ok(out);
    }

    let dw = map.denjoy_wolff_with(tol)?;
    // alpha = 1 decides parabolic before the automorphism test, so parabolic
    // automorphisms such as disk translations land here too
    let kind = if dw.alpha >= 1.0 - tol.parabolic {
        MapKind::Parabolic
    } else if automorphism {
        MapKind::OtherAutomorphism
    } else {
        MapKind::HyperbolicOneFixed
    };
    let mut out = Classification::new(kind);
    out.alpha = Some(dw.alpha);
    out.radial_alpha = Some(dw.radial_alpha);
    out.denjoy_wolff = Some(dw.point.location.clone());
    out.warnings.extend(dw.warnings.iter().cloned());
    out.boundary_fixed_points = boundary;
    if kind == MapKind::HyperbolicOneFixed {
        let form = hyperbolic_normal_form_with(map, tol)?;
        if form.fixed_point_count() == 2 {
            out.kind = MapKind::HyperbolicTwoFixed;
        }
        if form.fixed_point_count() != out.boundary_fixed_points.len() {
            out.warnings.push(format!(
                "normal form implies {} boundary fixed point(s), eigenvector search found {}",
                form.fixed_point_count(),
                out.boundary_fixed_points.len()
            ));
        }
        out.eigenvalues = form.block_eigenvalues.clone();
        out.chain = form.chain.clone();
        out.hyperbolic = Some(form);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfm::random_automorphism;
    use crate::linalg::{multiset_distance, ZERO};

    fn v(xs: &[C64]) -> CVector {
        CVector::from_column_slice(xs)
    }

    fn diag(xs: &[C64]) -> LinearFractionalMap {
        LinearFractionalMap::linear(CMatrix::from_diagonal(&v(xs))).unwrap()
    }

    fn half_z() -> LinearFractionalMap {
        LinearFractionalMap::mobius(ONE, ZERO, real(-1.0), real(2.0)).unwrap()
    }

    fn hyperbolic2() -> LinearFractionalMap {
        let a = CMatrix::from_diagonal(&v(&[real(0.5), real(0.5)]));
        LinearFractionalMap::new(a, v(&[real(0.5), ZERO]), CVector::zeros(2), ONE).unwrap()
    }

    fn planted_two_fixed(a: C64) -> LinearFractionalMap {
        let alpha: f64 = 0.5;
        let block = CMatrix::from_element(1, 1, a * alpha.sqrt());
        HalfPlaneMap::new(alpha, ZERO, CVector::zeros(1), block, CVector::zeros(1))
            .unwrap()
            .pull_back()
            .unwrap()
    }

    #[test]
    fn unitary_indices() {
        let rot = diag(&[C64::from_polar(1.0, 0.7), real(0.5)]);
        assert_eq!(unitary_index(&rot, &CVector::zeros(2)).unwrap(), 1);
        assert_eq!(unitary_index(&diag(&[real(0.5), real(1.0 / 3.0)]), &CVector::zeros(2)).unwrap(), 0);
        assert_eq!(unitary_index(&LinearFractionalMap::identity(3), &CVector::zeros(3)).unwrap(), 3);
        let moved = v(&[real(0.5), ZERO]);
        assert!(matches!(
            unitary_index(&diag(&[real(0.5), real(0.5)]), &moved),
            Err(Error::NotAFixedPoint { .. })
        ));
    }

    #[test]
    fn spectral_data_split() {
        let rot = diag(&[C64::from_polar(1.0, 0.7), real(0.5)]);
        let d = elliptic_spectral_data(&rot, &CVector::zeros(2)).unwrap();
        assert_eq!(d.unimodular.len(), 1);
        assert!((d.unimodular[0] - C64::from_polar(1.0, 0.7)).norm() < 1e-14);
        assert!((d.contractive[0] - real(0.5)).norm() < 1e-14);
        let gap = diag(&[real(1.0 - 1e-7), real(0.5)]);
        assert!(matches!(
            elliptic_spectral_data(&gap, &CVector::zeros(2)),
            Err(Error::GapEigenvalue { .. })
        ));
    }

    #[test]
    fn p0_forms() {
        let f = elliptic_p0_normal_form(&diag(&[real(0.5), real(1.0 / 3.0)])).unwrap();
        assert!(f.delta < 1e-14);
        assert_eq!(f.domain, P0Domain::Ellipsoid { r: 1.0 });
        assert!(f.conjugacy_residual < 1e-10);

        let f = elliptic_p0_normal_form(&half_z()).unwrap();
        assert!((f.delta - 1.0).abs() < 1e-12);
        assert_eq!(f.domain, P0Domain::HalfPlane);
        assert!((f.a1[(0, 0)] - real(0.5)).norm() < 1e-12);
        assert!(f.conjugacy_residual < 1e-10);

        let rot = diag(&[C64::from_polar(1.0, 0.7), real(0.5)]);
        assert!(matches!(elliptic_p0_normal_form(&rot), Err(Error::UnitaryIndexNonzero(1))));
    }

    #[test]
    fn classification_examples() {
        let c = classify(&half_z()).unwrap();
        assert_eq!(c.kind, MapKind::EllipticBoundaryFixed);
        assert_eq!(c.unitary_index, Some(0));
        assert!(norm(c.interior_fixed_point.as_ref().unwrap()) < 1e-14);
        assert!((c.boundary_fixed_points[0].location[0] - ONE).norm() < 1e-12);

        let c = classify(&hyperbolic2()).unwrap();
        assert_eq!(c.kind, MapKind::HyperbolicOneFixed);
        assert!((c.alpha.unwrap() - 0.5).abs() < 1e-12);

        let c = classify(&diag(&[real(0.5), real(1.0 / 3.0)])).unwrap();
        assert_eq!(c.kind, MapKind::EllipticInteriorOnly);

        let c = classify(&LinearFractionalMap::identity(2)).unwrap();
        assert_eq!(c.kind, MapKind::EllipticAutomorphism);
        assert!(c.fixed_slice);

        let constant = LinearFractionalMap::new(CMatrix::zeros(2, 2), v(&[real(0.3), ZERO]), CVector::zeros(2), ONE).unwrap();
        assert_eq!(classify(&constant).unwrap().kind, MapKind::EllipticInteriorOnly);

        let parabolic = LinearFractionalMap::mobius(ONE, ONE, real(-1.0), real(3.0)).unwrap();
        let c = classify(&parabolic).unwrap();
        assert_eq!(c.kind, MapKind::Parabolic);
        assert!((c.alpha.unwrap() - 1.0).abs() < 1e-8);

        // Cayley pullback of zeta -> zeta + 1 is a parabolic automorphism
        let i = C64::new(0.0, 1.0);
        let translation = LinearFractionalMap::mobius(real(2.0) * i - ONE, ONE, real(-1.0), real(2.0) * i + ONE).unwrap();
        assert!(translation.is_automorphism());
        let c = classify(&translation).unwrap();
        assert_eq!(c.kind, MapKind::Parabolic);
        assert!((c.alpha.unwrap() - 1.0).abs() < 1e-8);

        let hyp_aut = LinearFractionalMap::mobius(ONE, real(0.5), real(0.5), ONE).unwrap();
        assert_eq!(classify(&hyp_aut).unwrap().kind, MapKind::OtherAutomorphism);
    }

    #[test]
    fn hyperbolic_forms() {
        let disk = LinearFractionalMap::mobius(ONE, ONE, ZERO, real(2.0)).unwrap();
        let f = hyperbolic_normal_form(&disk).unwrap();
        assert!((f.alpha - 0.5).abs() < 1e-14);
        match f.case {
            HyperbolicCase::OneFixed { c, .. } => assert!(c > 0.0),
            _ => panic!("expected one fixed point"),
        }
        for a in [real(0.8), C64::from_polar(0.5, std::f64::consts::FRAC_PI_3)] {
            let map = planted_two_fixed(a);
            let c = classify(&map).unwrap();
            assert_eq!(c.kind, MapKind::HyperbolicTwoFixed, "{:?}", c.warnings);
            assert!((c.alpha.unwrap() - 0.5).abs() < 1e-9);
            assert!((c.eigenvalues[0] - a).norm() < 1e-9);
            assert!(c.warnings.is_empty());
        }
        assert!(matches!(hyperbolic_normal_form(&half_z()), Err(Error::NotHyperbolic)));
    }

    #[test]
    fn heisenberg_step_removes_b_and_keeps_block() {
        let alpha: f64 = 0.5;
        let a = CMatrix::from_row_slice(2, 2, &[real(0.3), C64::new(0.1, 0.2), ZERO, C64::new(-0.2, 0.1)]);
        let planted = HalfPlaneMap::new(alpha, C64::new(0.8, 0.3), v(&[C64::new(0.2, -0.1), real(0.1)]), a.clone(), v(&[real(0.1), C64::new(0.0, 0.2)])).unwrap();
        let map = planted.pull_back().unwrap();
        let f = hyperbolic_normal_form(&map).unwrap();
        assert!(norm(&f.reduced.b) < 1e-12);
        assert!(f.reduced.c.im.abs() < 1e-12);
        assert!(f.alpha * f.reduced.c.re >= norm(&f.reduced.d).powi(2) - 1e-10);
        let before = eigenvalues(&a).unwrap();
        let after = eigenvalues(&f.reduced.a).unwrap();
        assert!(multiset_distance(&before, &after).unwrap() < 1e-10);
    }

    #[test]
    fn chains_reconstruct_the_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let maps = [
            half_z(),
            hyperbolic2(),
            diag(&[real(0.5), real(1.0 / 3.0)]),
            planted_two_fixed(real(0.8)),
        ];
        for map in maps {
            let sigma = random_automorphism(map.dim(), 0.6, &mut rng);
            let map = map.conjugate_by(&sigma).unwrap();
            let c = classify(&map).unwrap();
            let back = c.reconstruct().unwrap().unwrap();
            for _ in 0..20 {
                let z = random_sphere_point(map.dim(), &mut rng) * real(0.95 * rng.random::<f64>());
                let err = norm(&(back.evaluate(&z).unwrap() - map.evaluate(&z).unwrap()));
                assert!(err < 1e-9, "{err}");
            }
        }
    }

    #[test]
    fn classification_is_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let maps = [
            half_z(),
            hyperbolic2(),
            diag(&[C64::from_polar(1.0, 0.7), real(0.5)]),
            planted_two_fixed(C64::new(0.3, 0.4)),
        ];
        for map in maps {
            let base = classify(&map).unwrap();
            for _ in 0..5 {
                let sigma = random_automorphism(map.dim(), 0.7, &mut rng);
                let c = classify(&map.conjugate_by(&sigma).unwrap()).unwrap();
                assert_eq!(c.kind, base.kind);
                assert_eq!(c.unitary_index, base.unitary_index);
                if let (Some(a), Some(b)) = (c.alpha, base.alpha) {
                    assert!((a - b).abs() < 1e-8);
                }
                assert!(multiset_distance(&c.eigenvalues, &base.eigenvalues).unwrap() < 1e-8);
            }
        }
    }
}
