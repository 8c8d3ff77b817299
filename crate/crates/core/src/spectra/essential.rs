//! Estimator for the iteration limit
//! `lim_n (limsup_{|z|->1} ((1-|z|^2) / (1-|phi^n(z)|^2))^{N/2})^{1/n}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lfm::LinearFractionalMap;
use crate::linalg::{norm, real, unitary_with_first_column, CVector, C64};
use crate::serde_util::cvec;

/// Below this, `1 - |phi^n(z)|^2` is dominated by rounding.
const RELIABLE_GAP: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EssentialRadiusEstimate {
    #[serde(with = "cvec")]
    pub tau: CVector,
    pub n: Vec<usize>,
    /// Sampled limsup `g_n`.
    pub g: Vec<f64>,
    /// `g_n^{1/n}`.
    pub roots: Vec<f64>,
    /// Radius used for each `n`.
    pub radius: Vec<f64>,
    pub r_schedule: Vec<f64>,
    /// `[n_lo, n_hi]` of the log-linear fit.
    pub window: (usize, usize),
    pub limit: f64,
}

pub fn default_r_schedule() -> Vec<f64> {
    (2..=8).map(|k| 1.0 - 10f64.powi(-k)).collect()
}

/// Boundary point at which the limsup localises: the boundary fixed point of
/// least dilation, else a boundary point of a fixed slice, else (for
/// automorphisms) `e_1`.
pub fn anchor_point(map: &LinearFractionalMap) -> Result<CVector> {
    let set = map.fixed_points()?;
    let best = set
        .boundary_points()
        .into_iter()
        .min_by(|a, b| a.dilation.unwrap_or(f64::INFINITY).total_cmp(&b.dilation.unwrap_or(f64::INFINITY)));
    if let Some(p) = best {
        return Ok(&p.location / real(norm(&p.location)));
    }
    if let Some(slice) = set.slices.first() {
        return Ok(slice.boundary_point());
    }
    if map.is_automorphism() {
        let mut e1 = CVector::zeros(map.dim());
        e1[0] = real(1.0);
        return Ok(e1);
    }
    Err(Error::NoBoundaryFixedPoint)
}

/// Directions of the spherical cap around `tau`.
fn cap_directions(tau: &CVector) -> Vec<CVector> {
    let n = tau.len();
    let i = C64::new(0.0, 1.0);
    let mut dirs = vec![CVector::zeros(n), tau * i, -(tau * i)];
    if n > 1 {
        let perp = unitary_with_first_column(tau).column(1).into_owned();
        dirs.extend([perp.clone(), -perp.clone(), &perp * i, -(&perp * i)]);
    }
    dirs
}

pub fn essential_radius_estimate(
    map: &LinearFractionalMap,
    n_max: usize,
    r_schedule: &[f64],
) -> Result<EssentialRadiusEstimate> {
    let tau = anchor_point(map)?;
    essential_radius_estimate_at(map, &tau, n_max, r_schedule)
}

pub fn essential_radius_estimate_at(
    map: &LinearFractionalMap,
    tau: &CVector,
    n_max: usize,
    r_schedule: &[f64],
) -> Result<EssentialRadiusEstimate> {
    let n_max = n_max.max(2);
    let dims = map.dim() as f64;
    let dirs = cap_directions(tau);
    let mut radii: Vec<f64> = r_schedule.to_vec();
    radii.sort_by(|a, b| b.total_cmp(a));

    let mut iterate = map.clone();
    let mut out = EssentialRadiusEstimate {
        tau: tau.clone(),
        n: Vec::new(),
        g: Vec::new(),
        roots: Vec::new(),
        radius: Vec::new(),
        r_schedule: r_schedule.to_vec(),
        window: (0, 0),
        limit: f64::NAN,
    };
    for n in 1..=n_max {
        if n > 1 {
            iterate = map.compose(&iterate)?;
        }
        // largest radius at which every sample is numerically resolved
        let mut chosen = None;
        for &r in &radii {
            let h = (1.0 - r).sqrt();
            let mut best: f64 = 0.0;
            let mut reliable = true;
            for u in &dirs {
                let p = tau + u * real(h);
                let z = &p * real(r / norm(&p));
                let w = match iterate.evaluate(&z) {
                    Ok(w) => w,
                    Err(_) => {
                        reliable = false;
                        break;
                    }
                };
                let gap = 1.0 - norm(&w).powi(2);
                if gap <= RELIABLE_GAP {
                    reliable = false;
                    break;
                }
                best = best.max(((1.0 - r * r) / gap).powf(dims / 2.0));
            }
            if reliable {
                chosen = Some((r, best));
                break;
            }
        }
        if let Some((r, g)) = chosen {
            out.n.push(n);
            out.g.push(g);
            out.roots.push(g.powf(1.0 / n as f64));
            out.radius.push(r);
        }
    }

    // slope of ln g_n over the upper half of the n range
    let lo = n_max / 2;
    let pts: Vec<(f64, f64)> = out
        .n
        .iter()
        .zip(&out.g)
        .filter(|(&n, &g)| n >= lo && g > 0.0)
        .map(|(&n, &g)| (n as f64, g.ln()))
        .collect();
    if pts.len() >= 2 {
        let m = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        out.limit = slope.exp();
        out.window = (pts[0].0 as usize, pts[pts.len() - 1].0 as usize);
    } else if let Some(&last) = out.roots.last() {
        out.limit = last;
        out.window = (*out.n.last().unwrap(), *out.n.last().unwrap());
    }
    Ok(out)
}
