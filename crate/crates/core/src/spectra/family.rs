//! Root-of-unity detection and enumeration of eigenvalue products.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::linalg::{C64, ONE};
use crate::serde_util::c64;

/// Outcome of the rationality test for one unimodular eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleReport {
    #[serde(with = "c64")]
    pub eigenvalue: C64,
    /// `theta / 2 pi` as `[p, q]` when within tolerance of `p / q`, `q <= Q`.
    pub fraction: Option<(u64, u64)>,
}

/// Finds `p/q` with `q <= q_max` and `|x - p/q| <= tol` for `x = arg(z) / 2 pi`
/// in `[0, 1)`, via the continued-fraction convergents of `x`.
pub fn rational_angle(z: C64, q_max: u64, tol: f64) -> Option<(u64, u64)> {
    let mut x = z.arg() / TAU;
    if x < 0.0 {
        x += 1.0;
    }
    if x >= 1.0 || x.abs() <= tol || (1.0 - x) <= tol {
        return Some((0, 1));
    }
    // convergents h/k of x
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        let ai = a as u64;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > q_max {
            break;
        }
        if (x - h2 as f64 / k2 as f64).abs() <= tol {
            return Some((h2 % k2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = rem - a;
        if frac <= 1e-15 {
            break;
        }
        rem = 1.0 / frac;
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Order of the cyclic group generated by roots of unity `e^{2 pi i p/q}`.
pub fn cyclic_order(fractions: &[(u64, u64)]) -> u64 {
    fractions.iter().fold(1, |acc, &(p, q)| {
        let order = q / gcd(p, q).max(1);
        acc / gcd(acc, order) * order
    })
}

/// Products `prod g_j^{a_j}` over multi-indices with `|a| >= min_degree` and
/// product modulus at least `tail_tol`, for generators of modulus `< 1`.
/// Returns the values and whether the count cap cut the enumeration short.
pub fn contractive_products(
    generators: &[C64],
    min_degree: usize,
    tail_tol: f64,
    cap: usize,
) -> (Vec<C64>, bool) {
    let mut out = Vec::new();
    let mut truncated = false;
    let mut stack: Vec<(usize, C64, usize)> = vec![(0, ONE, 0)];
    while let Some((j, value, degree)) = stack.pop() {
        if j == generators.len() {
            if degree >= min_degree {
                if out.len() >= cap {
                    truncated = true;
                    break;
                }
                out.push(value);
            }
            continue;
        }
        let g = generators[j];
        let mut v = value;
        let mut e = 0;
        loop {
            stack.push((j + 1, v, degree + e));
            v *= g;
            e += 1;
            if v.norm() < tail_tol {
                break;
            }
            if e > cap {
                truncated = true;
                break;
            }
        }
    }
    (out, truncated)
}

/// All products with `|a| <= max_degree`, as a multiset (used to compare
/// against truncated compressions).
pub fn products_up_to_degree(generators: &[C64], max_degree: usize) -> Vec<C64> {
    let mut level = vec![(ONE, 0usize)];
    let mut out = vec![ONE];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for &(v, last) in &level {
            for (j, g) in generators.iter().enumerate().skip(last) {
                next.push((v * g, j));
            }
        }
        out.extend(next.iter().map(|p| p.0));
        level = next;
    }
    out
}

/// Sorts by modulus and drops numerically repeated values.
pub fn sort_dedup(values: &mut Vec<C64>) {
    values.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    let mut out: Vec<C64> = Vec::with_capacity(values.len());
    for &v in values.iter() {
        let eps = 1e-14 * v.norm().max(1e-300);
        let dup = out
            .iter()
            .rev()
            .take_while(|w| v.norm() - w.norm() <= eps)
            .any(|w| (v - w).norm() <= eps.max(1e-15));
        if !dup {
            out.push(v);
        }
    }
    *values = out;
}
