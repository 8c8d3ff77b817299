//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// `<u, v> = sum u_j conj(v_j)`, linear in the first slot.
pub fn inner(u: &CVector, v: &CVector) -> C64 {
    u.iter().zip(v.iter()).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Eigenvalues of a square complex matrix from its complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let n = m.nrows();
    match n {
        0 => Ok(Vec::new()),
        1 => Ok(vec![m[(0, 0)]]),
        _ => {
            let schur =
                Schur::try_new(m.clone(), f64::EPSILON, 50_000).ok_or(Error::DegenerateEigenproblem)?;
            let (_, t) = schur.unpack();
            let vals: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
            if vals.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::DegenerateEigenproblem);
            }
            Ok(vals)
        }
    }
}

/// An eigenvalue cluster with a basis of its (numerical) eigenspace.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub value: C64,
    pub algebraic: usize,
    pub basis: Vec<CVector>,
}

/// Groups eigenvalues closer than `cluster_tol` and computes a null-space
/// basis of `m - value I` for each group.
///
/// The cluster centre is the mean of its members, which recovers defective
/// eigenvalues to roughly machine precision even though each individual
/// Schur eigenvalue is only accurate to its square root.
pub fn eigenspaces(m: &CMatrix, cluster_tol: f64, null_tol: f64) -> Result<Vec<Eigenspace>> {
    let n = m.nrows();
    let vals = eigenvalues(m)?;
    let scale = frobenius(m).max(f64::MIN_POSITIVE);
    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for v in vals {
        let mean = |c: &Vec<C64>| c.iter().sum::<C64>() / c.len() as f64;
        match clusters
            .iter_mut()
            .find(|c| (mean(c) - v).norm() < cluster_tol * scale)
        {
            Some(c) => c.push(v),
            None => clusters.push(vec![v]),
        }
    }
    let mut out = Vec::with_capacity(clusters.len());
    for c in clusters {
        let value = c.iter().sum::<C64>() / c.len() as f64;
        let shifted = m - CMatrix::identity(n, n) * value;
        let basis = null_space(&shifted, null_tol * scale, c.len());
        out.push(Eigenspace {
            value,
            algebraic: c.len(),
            basis,
        });
    }
    Ok(out)
}

/// Right singular vectors whose singular values fall below `tol`; always
/// returns at least the one for the smallest singular value, and never more
/// than `max_dim`.
pub fn null_space(m: &CMatrix, tol: f64, max_dim: usize) -> Vec<CVector> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let mut basis = Vec::new();
    for (rank, &i) in order.iter().enumerate() {
        if rank > 0 && (svd.singular_values[i] >= tol || basis.len() >= max_dim) {
            break;
        }
        let v = CVector::from_iterator(n, (0..n).map(|j| v_t[(i, j)].conj()));
        basis.push(v);
    }
    basis
}

/// Unitary `U` with `U e_1 = u / |u|`, built from one Householder reflection.
pub fn unitary_with_first_column(u: &CVector) -> CMatrix {
    let n = u.len();
    let mut eye = CMatrix::identity(n, n);
    let len = norm(u);
    if n == 0 || len == 0.0 {
        return eye;
    }
    let u = u / C64::new(len, 0.0);
    let phase = if u[0].norm() > 0.0 {
        u[0] / u[0].norm()
    } else {
        ONE
    };
    // reflect a = phase e_1 onto u, then undo the phase on the first column
    let mut x = -u.clone();
    x[0] += phase;
    let xx = norm(&x);
    if xx > 1e-15 {
        let x = x / C64::new(xx, 0.0);
        eye -= (&x * x.adjoint()) * C64::new(2.0, 0.0);
    }
    let mut h = eye;
    let first = h.column(0) * phase;
    h.set_column(0, &first);
    h
}

/// Orthonormalises the given vectors (modified Gram-Schmidt), dropping
/// numerically dependent ones.
pub fn orthonormalize(vs: &[CVector], tol: f64) -> Vec<CVector> {
    let mut out: Vec<CVector> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for q in &out {
            let p = inner(&w, q);
            w -= q * p;
        }
        let len = norm(&w);
        if len > tol {
            out.push(w / C64::new(len, 0.0));
        }
    }
    out
}

/// Haar-distributed random unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let ph = d / d.norm();
            let col = q.column(j) * ph;
            q.set_column(j, &col);
        }
    }
    q
}

/// Uniform random point on the unit sphere of C^n.
pub fn random_sphere_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let len = norm(&v);
        if len > 1e-12 {
            return v / C64::new(len, 0.0);
        }
    }
}

/// Greedy nearest-neighbour matching of two multisets; returns the largest
/// matched distance, or `None` when the sizes differ.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))?;
        used[j] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

pub(crate) fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub(crate) fn is_finite(v: &CVector) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}
