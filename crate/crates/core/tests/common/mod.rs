#![allow(dead_code)]

use std::f64::consts::TAU;

use lfm_spectra::classify::MapKind;
use lfm_spectra::lfm::{random_automorphism, HalfPlaneMap};
use lfm_spectra::linalg::{random_unitary, CMatrix, CVector, C64};
use lfm_spectra::LinearFractionalMap;
use rand::Rng;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn v(xs: &[C64]) -> CVector {
    CVector::from_column_slice(xs)
}

pub fn diag(xs: &[C64]) -> LinearFractionalMap {
    LinearFractionalMap::linear(CMatrix::from_diagonal(&v(xs))).unwrap()
}

/// `z / (2 - z)`.
pub fn half_z() -> LinearFractionalMap {
    LinearFractionalMap::mobius(ONE, ZERO, r(-1.0), r(2.0)).unwrap()
}

/// `(1 + z) / 2`.
pub fn disk_translation() -> LinearFractionalMap {
    LinearFractionalMap::mobius(r(0.5), r(0.5), ZERO, ONE).unwrap()
}

/// `((1 + z) / 2, w / 2)`.
pub fn ball_translation() -> LinearFractionalMap {
    let a = CMatrix::from_diagonal(&v(&[r(0.5), r(0.5)]));
    LinearFractionalMap::new(a, v(&[r(0.5), ZERO]), CVector::zeros(2), ONE).unwrap()
}

/// `(z_1, lambda w) / (2 - z_1)`: fixes 0 and `e_1`.
pub fn boundary_fixed(lambda: &[C64]) -> LinearFractionalMap {
    let n = lambda.len() + 1;
    let mut a = CMatrix::zeros(n, n);
    a[(0, 0)] = ONE;
    for (j, l) in lambda.iter().enumerate() {
        a[(j + 1, j + 1)] = *l;
    }
    let mut c = CVector::zeros(n);
    c[0] = r(-1.0);
    LinearFractionalMap::new(a, CVector::zeros(n), c, r(2.0)).unwrap()
}

/// Ball map whose half-plane form is `(zeta / alpha, block w / alpha)` plus
/// the translation `c / alpha` in the first coordinate.
pub fn planted(alpha: f64, c: f64, block: CMatrix) -> LinearFractionalMap {
    let k = block.nrows();
    HalfPlaneMap::new(alpha, r(c), CVector::zeros(k), block, CVector::zeros(k))
        .unwrap()
        .pull_back()
        .unwrap()
}

/// Cayley pullback of `zeta -> zeta + 1`.
pub fn parabolic(n: usize) -> LinearFractionalMap {
    planted(1.0, 1.0, CMatrix::identity(n - 1, n - 1) * r(0.5))
}

pub fn contraction<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> CMatrix {
    let s = CVector::from_fn(n, |_, _| r(rng.random_range(lo..hi)));
    random_unitary(n, rng) * CMatrix::from_diagonal(&s) * random_unitary(n, rng)
}

fn phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, TAU * rng.random::<f64>())
}

/// A random map from one of the supported classes, moved off its normal
/// position by a random automorphism. Returns the expected kind.
pub fn random_supported_map<R: Rng + ?Sized>(rng: &mut R) -> (LinearFractionalMap, MapKind) {
    let n = rng.random_range(1..=3usize);
    let kind = rng.random_range(0..5);
    let (map, expected) = match kind {
        0 => (LinearFractionalMap::linear(contraction(n, 0.1, 0.8, rng)).unwrap(), MapKind::EllipticInteriorOnly),
        1 => {
            let n = n.max(2);
            let mut d = vec![if rng.random::<bool>() {
                C64::from_polar(1.0, TAU * rng.random_range(1..7) as f64 / 7.0)
            } else {
                phase(rng)
            }];
            d.extend((1..n).map(|_| phase(rng) * rng.random_range(0.2..0.7)));
            (diag(&d), MapKind::EllipticUnitaryPart)
        }
        2 => {
            let lambda: Vec<C64> = (1..n).map(|_| phase(rng) * rng.random_range(0.1..1.0)).collect();
            (boundary_fixed(&lambda), MapKind::EllipticBoundaryFixed)
        }
        3 => {
            let alpha: f64 = rng.random_range(0.3..0.8);
            let block = contraction(n - 1, 0.1, 0.9, rng) * r(alpha.sqrt());
            (planted(alpha, rng.random_range(0.2..1.0), block), MapKind::HyperbolicOneFixed)
        }
        _ => {
            let n = n.max(2);
            let alpha: f64 = rng.random_range(0.3..0.8);
            let block = contraction(n - 1, 0.2, 0.9, rng) * r(alpha.sqrt());
            (planted(alpha, 0.0, block), MapKind::HyperbolicTwoFixed)
        }
    };
    let sigma = random_automorphism(map.dim(), 0.5, rng);
    (map.conjugate_by(&sigma).unwrap(), expected)
}
