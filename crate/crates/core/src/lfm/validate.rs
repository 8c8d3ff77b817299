//! Numerical self-map check: the largest modulus of `phi` on the unit sphere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::LinearFractionalMap;
use crate::linalg::{inner, norm, random_sphere_point, real, CVector, C64};
use crate::serde_util::cvec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    pub tol: f64,
    /// Sphere samples; `None` picks a default from the dimension.
    pub samples: Option<usize>,
    /// Number of best samples refined by projected gradient ascent.
    pub refine: usize,
    pub seed: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            tol: 1e-9,
            samples: None,
            refine: 8,
            seed: 0x05e1_f3a9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    /// `+inf` when the denominator vanishes somewhere on the closed ball.
    pub max_modulus: f64,
    #[serde(with = "cvec")]
    pub witness: CVector,
    pub samples: usize,
    pub tolerance: f64,
}

/// Relative gap below which two sampled moduli count as equal.
const TIE_REL: f64 = 1e-12;

fn default_samples(n: usize) -> usize {
    10_000 * n.saturating_sub(2).max(1)
}

impl LinearFractionalMap {
    pub fn validate_self_map(&self) -> ValidationReport {
        self.validate_self_map_with(&ValidationOptions::default())
    }

    pub fn validate_self_map_with(&self, opts: &ValidationOptions) -> ValidationReport {
        let n = self.dim();
        let samples = opts.samples.unwrap_or_else(|| default_samples(n));
        let c_norm = norm(self.c());

        // where the denominator is smallest on the sphere
        let pole_dir = (c_norm > 0.0).then(|| {
            let d = self.d();
            let phase = if d.norm() > 0.0 { d / d.norm() } else { real(1.0) };
            -(self.c() * phase) / real(c_norm)
        });

        if self.denominator_margin() <= 1e-12 {
            return ValidationReport {
                ok: false,
                max_modulus: f64::INFINITY,
                witness: pole_dir.unwrap_or_else(|| unit(n, 0)),
                samples: 0,
                tolerance: opts.tol,
            };
        }

        // coordinate directions first: among near-ties the earliest candidate
        // is reported, so flat maxima give a reproducible witness such as e_1
        let mut candidates: Vec<CVector> = Vec::with_capacity(samples + 2 * n + 1);
        for j in 0..n {
            candidates.push(unit(n, j));
            candidates.push(-unit(n, j));
        }
        if let Some(p) = pole_dir.clone() {
            candidates.push(p);
        }
        if n == 1 {
            for k in 0..samples {
                let t = std::f64::consts::TAU * k as f64 / samples as f64;
                candidates.push(CVector::from_element(1, C64::from_polar(1.0, t)));
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            for _ in 0..samples {
                candidates.push(random_sphere_point(n, &mut rng));
            }
        }
        let mut scored: Vec<(f64, CVector)> = candidates
            .into_iter()
            .map(|z| (self.modulus_sq(&z), z))
            .collect();
        let top = scored.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
        let tie = |v: f64| v >= top * (1.0 - TIE_REL);
        let first = scored.iter().position(|s| tie(s.0)).expect("at least one candidate");
        let mut best = scored[first].clone();
        // stable: ties keep candidate order
        scored.sort_by(|a, b| b.0.total_cmp(&a.0));

        for (_, start) in scored.iter().take(opts.refine) {
            let (val, z) = self.ascend(start.clone());
            if val > best.0 * (1.0 + TIE_REL) {
                best = (val, z);
            }
        }
        let max_modulus = best.0.sqrt();
        ValidationReport {
            ok: max_modulus <= 1.0 + opts.tol,
            max_modulus,
            witness: best.1,
            samples,
            tolerance: opts.tol,
        }
    }

    fn modulus_sq(&self, z: &CVector) -> f64 {
        match self.evaluate(z) {
            Ok(w) => w.iter().map(|x| x.norm_sqr()).sum(),
            Err(_) => f64::INFINITY,
        }
    }

    /// Projected gradient ascent of `|phi|^2` on the sphere.
    fn ascend(&self, mut z: CVector) -> (f64, CVector) {
        let mut val = self.modulus_sq(&z);
        let mut step = 0.1;
        for _ in 0..200 {
            let (Ok(w), Ok(jac)) = (self.evaluate(&z), self.jacobian(&z)) else {
                break;
            };
            // ascent direction of |phi|^2 in C^n ~ R^{2n}
            let g = jac.adjoint() * w;
            let radial = inner(&g, &z).re;
            let tangent = &g - &z * real(radial);
            let gn = norm(&tangent);
            if gn < 1e-15 {
                break;
            }
            let mut improved = false;
            while step > 1e-12 {
                let trial = &z + &tangent * real(step / gn);
                let trial = &trial / real(norm(&trial));
                let tv = self.modulus_sq(&trial);
                if tv > val {
                    z = trial;
                    val = tv;
                    step *= 2.0;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (val, z)
    }
}

fn unit(n: usize, j: usize) -> CVector {
    let mut e = CVector::zeros(n);
    e[j] = real(1.0);
    e
}
