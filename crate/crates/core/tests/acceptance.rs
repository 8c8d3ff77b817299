//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use lfm_spectra::classify::{classify, HyperbolicCase, MapKind};
use lfm_spectra::lfm::random_automorphism;
use lfm_spectra::linalg::{multiset_distance, norm, CMatrix, C64};
use lfm_spectra::oracle::{
    binomial_eigenfunctions, compression_spectrum, eigenfunction_residual, monomial_eigenfunctions,
    norm_equivalence_bounds, sobolev_norm_sq, weighted_norm_sq, MultiIndex, TruncatedSeries,
};
use lfm_spectra::spectra::{
    default_r_schedule, essential_radius_estimate, products_up_to_degree, spectral_radius, spectrum, Component,
    SpectralSet,
};
use lfm_spectra::{Error, LinearFractionalMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(elapsed: Duration, limit_s: u64) -> Outcome {
    ensure!(elapsed < Duration::from_secs(limit_s), "took {:.1?} (limit {limit_s} s)", elapsed);
    Ok(format!("{elapsed:.2?}"))
}

fn disk_radius(s: &SpectralSet) -> Option<f64> {
    s.components.iter().find_map(|c| match c {
        Component::Disk { radius, .. } => Some(*radius),
        _ => None,
    })
}

fn disk_maps() -> Outcome {
    let t = Instant::now();
    let f = half_z();
    let s = spectrum(&f).map_err(|e| e.to_string())?;
    let target = 0.5f64.sqrt();
    let rho = disk_radius(&s).ok_or("no disk for z/(2-z)")?;
    ensure!((rho - target).abs() < 1e-9, "z/(2-z): disk radius {rho}");
    ensure!(s.contains(ONE, 0.0) && !s.contains(r(0.8), 1e-6), "z/(2-z): set is not disk u {{1}}");
    let est = essential_radius_estimate(&f, 20, &default_r_schedule()).map_err(|e| e.to_string())?;
    ensure!((est.limit - target).abs() < 0.05 * target, "estimator {} vs {target}", est.limit);

    let s = spectrum(&disk_translation()).map_err(|e| e.to_string())?;
    let rho = disk_radius(&s).ok_or("no disk for (1+z)/2")?;
    ensure!((rho - 2f64.sqrt()).abs() < 1e-9 && s.components.len() == 1, "(1+z)/2: disk radius {rho}");

    let mut worst: f64 = 0.0;
    for theta in [0.7, 2.0 * PI / 5.0, 3.0] {
        let rot = LinearFractionalMap::mobius(C64::from_polar(1.0, theta), ZERO, ZERO, ONE).unwrap();
        let g = f.compose(&rot).unwrap();
        let lambda = C64::from_polar(0.5, theta);
        let s = spectrum(&g).map_err(|e| e.to_string())?;
        ensure!(classify(&g).unwrap().kind == MapKind::EllipticInteriorOnly, "rotated map misclassified");
        ensure!(s.contains(ZERO, 0.0) && s.contains(ONE, 0.0), "rotated map: 0 or 1 missing");
        let family = s
            .components
            .iter()
            .find_map(|c| match c {
                Component::Family { family, .. } => Some(family.values.clone()),
                _ => None,
            })
            .ok_or("rotated map: no point family")?;
        let expected: Vec<C64> = (1..=39).map(|k| lambda.powi(k)).collect();
        ensure!(family.len() == expected.len(), "family has {} points, expected 39", family.len());
        worst = worst.max(multiset_distance(&family, &expected).unwrap());
        ensure!((s.max_modulus() - 1.0).abs() < 1e-12, "rotated map: max modulus {}", s.max_modulus());
    }
    ensure!(worst < 1e-9, "lambda^k mismatch {worst:e}");
    let time = within(t.elapsed(), 10)?;
    Ok(format!(
        "disk 2^-1/2 u {{1}}, disk sqrt2, {{0,1}} u {{lambda^k}} (max dev {worst:.1e}); estimator {:.5}; {time}",
        est.limit
    ))
}

fn compression_oracle() -> Outcome {
    let t = Instant::now();
    let f = diag(&[r(0.5), r(1.0 / 3.0)]);
    let vals = compression_spectrum(&f, 6).map_err(|e| e.to_string())?;
    let expected = products_up_to_degree(&[r(0.5), r(1.0 / 3.0)], 6);
    let d = multiset_distance(&vals, &expected).ok_or("multiset sizes differ")?;
    ensure!(d < 1e-8, "compression eigenvalues deviate by {d:e}");
    let s = spectrum(&f).map_err(|e| e.to_string())?;
    ensure!(vals.iter().all(|v| s.contains(*v, 1e-8)), "compression eigenvalue outside the point family");
    let time = within(t.elapsed(), 5)?;
    Ok(format!("{} eigenvalues, max deviation {d:.1e}; {time}", vals.len()))
}

fn rotation_eigenfunctions() -> Outcome {
    let theta = TAU * (2f64.sqrt() - 1.0);
    let psi = diag(&[C64::from_polar(1.0, theta), r(0.5)]);
    let mut worst: f64 = 0.0;
    for cand in monomial_eigenfunctions(&psi, 6, 20).map_err(|e| e.to_string())? {
        worst = worst.max(eigenfunction_residual(&psi, &cand.function, cand.eigenvalue, 20).map_err(|e| e.to_string())?);
    }
    ensure!(worst < 1e-12, "residual {worst:e}");
    let s = spectrum(&psi).map_err(|e| e.to_string())?;
    let radii: Vec<f64> = s
        .components
        .iter()
        .filter_map(|c| match c {
            Component::Circle { radius, .. } => Some(*radius),
            _ => None,
        })
        .collect();
    for g in 0..=39 {
        ensure!(radii.iter().any(|x| (x - 0.5f64.powi(g)).abs() < 1e-15), "circle 2^-{g} missing");
    }
    ensure!(radii.iter().all(|x| (x.log2() - x.log2().round()).abs() < 1e-12), "extra circle");
    let vals = compression_spectrum(&psi, 10).map_err(|e| e.to_string())?;
    let off = vals
        .iter()
        .map(|v| radii.iter().map(|x| (v.norm() - x).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    ensure!(off < 1e-8, "compression eigenvalue {off:e} off every circle");
    Ok(format!("max residual {worst:.1e}; {} circles; {} compression eigenvalues on circles", radii.len(), vals.len()))
}

fn translation_disk() -> Outcome {
    let f = ball_translation();
    // |lambda| = 2^{-Re s} spread over (0, 2)
    let s: Vec<C64> = (0..20)
        .map(|k| {
            let modulus = 0.05 + 1.88 * k as f64 / 19.0;
            C64::new(-modulus.log2(), if k % 2 == 0 { 0.0 } else { 1.0 + 0.1 * k as f64 })
        })
        .collect();
    let cands = binomial_eigenfunctions(&f, &s, 60).map_err(|e| e.to_string())?;
    let set = spectrum(&f).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut moduli = Vec::new();
    for c in &cands {
        worst = worst.max(eigenfunction_residual(&f, &c.function, c.eigenvalue, 60).map_err(|e| e.to_string())?);
        ensure!(set.contains(c.eigenvalue, 0.0), "eigenvalue {} outside the spectrum", c.eigenvalue);
        moduli.push(c.eigenvalue.norm());
    }
    ensure!(worst < 1e-9, "residual {worst:e}");
    moduli.sort_by(f64::total_cmp);
    let gap = moduli.windows(2).map(|w| w[1] - w[0]).fold(moduli[0], f64::max).max(2.0 - moduli[19]);
    ensure!(gap < 0.15, "moduli leave a gap of {gap} in (0, 2)");
    let rho = spectral_radius(&f).map_err(|e| e.to_string())?;
    // alpha comes from normalised matrix entries, so "exactly" means to a few ulps
    ensure!((rho - 2.0).abs() <= 8.0 * f64::EPSILON, "spectral radius {rho:?}");
    let est = essential_radius_estimate(&f, 20, &default_r_schedule()).map_err(|e| e.to_string())?;
    ensure!((est.limit - 2.0).abs() < 0.1, "estimator {}", est.limit);
    Ok(format!(
        "20 exponents with Re s in [{:.3}, {:.3}], max residual {worst:.1e}, |lambda| in [{:.3}, {:.3}]; radius {rho}; estimator {:.4}",
        s.iter().map(|x| x.re).fold(f64::INFINITY, f64::min),
        s.iter().map(|x| x.re).fold(f64::NEG_INFINITY, f64::max),
        moduli[0],
        moduli[19],
        est.limit
    ))
}

fn plant_and_recover() -> Outcome {
    let alpha: f64 = 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut details = Vec::new();
    for a in [r(0.8), C64::from_polar(0.5, PI / 3.0)] {
        let map = planted(alpha, 0.0, CMatrix::from_element(1, 1, a * alpha.sqrt()));
        let c = classify(&map).map_err(|e| e.to_string())?;
        ensure!(c.kind == MapKind::HyperbolicTwoFixed, "kind {:?}", c.kind);
        let h = c.hyperbolic.as_ref().unwrap();
        ensure!((h.alpha - alpha).abs() < 1e-9, "alpha {}", h.alpha);
        let HyperbolicCase::TwoFixed { a_prime } = &h.case else {
            return Err("not a two-fixed-point form".into());
        };
        ensure!((a_prime[(0, 0)] - a).norm() < 1e-9, "recovered {} for {a}", a_prime[(0, 0)]);
        let s = spectrum(&map).map_err(|e| e.to_string())?;
        ensure!(s.closure && s.contains(ZERO, 0.0), "closure flag or 0 missing");
        let m = a.norm();
        let mut k = 0;
        for comp in &s.components {
            if let Component::Annulus { r_in, r_out, .. } = comp {
                let p = m.powi(k);
                ensure!((r_in - p / 2.0).abs() < 1e-9 && (r_out - 2.0 * p).abs() < 1e-9, "annulus {k}");
                k += 1;
            }
        }
        ensure!(m.powi(k) * 2.0 < 1e-11, "annuli stop at k = {k}");
        // direct modulus arithmetic: 0 or some |a|^k / 2 <= |lambda| <= 2 |a|^k
        let direct = |z: C64, tol: f64| {
            let x = z.norm();
            x <= tol || (0..k).any(|j| x >= m.powi(j) / 2.0 - tol && x <= 2.0 * m.powi(j) + tol)
        };
        let mut agree = 0;
        for _ in 0..1000 {
            let z = C64::from_polar(rng.random_range(0.0..2.5), rng.random_range(0.0..TAU));
            ensure!(direct(z, 1e-8) == s.contains(z, 1e-8), "membership disagrees at {z}");
            agree += 1;
        }
        details.push(format!("a={a:.3}: {k} annuli, {agree}/1000 probes agree"));
    }
    Ok(details.join("; "))
}

fn conjugation_invariance() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for _ in 0..50 {
        let (f, expected) = random_supported_map(&mut rng);
        let c = classify(&f).map_err(|e| e.to_string())?;
        ensure!(c.kind == expected, "kind {:?}, expected {expected:?}", c.kind);
        let s = spectrum(&f).map_err(|e| e.to_string())?;
        let cloud = s.discretize(12);
        for _ in 0..5 {
            let sigma = random_automorphism(f.dim(), 0.6, &mut rng);
            let g = f.conjugate_by(&sigma).unwrap();
            let cg = classify(&g).map_err(|e| e.to_string())?;
            ensure!(cg.kind == c.kind && cg.unitary_index == c.unitary_index, "{:?} became {:?}", c.kind, cg.kind);
            if let (Some(a), Some(b)) = (c.alpha, cg.alpha) {
                ensure!((a - b).abs() < 1e-8, "alpha {a} vs {b}");
            }
            let sg = spectrum(&g).map_err(|e| e.to_string())?;
            ensure!(cloud.iter().all(|p| sg.contains(p.0, 1e-8)), "{:?}: spectrum shrank", c.kind);
            ensure!(sg.discretize(12).iter().all(|p| s.contains(p.0, 1e-8)), "{:?}: spectrum grew", c.kind);
            checked += 1;
        }
    }
    let time = within(t.elapsed(), 120)?;
    Ok(format!("{checked} conjugates agree; {time}"))
}

fn norm_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut widths = Vec::new();
    for nu in [-1.0, -0.5, 0.0] {
        let b = norm_equivalence_bounds(nu, 30).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let n = rng.random_range(1..=3usize);
            let degree = rng.random_range(0..=30usize);
            let terms = MultiIndex::up_to_degree(n, degree).into_iter().map(|a| {
                let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                (a, c)
            });
            let f = TruncatedSeries::from_terms(n, degree, terms).unwrap();
            let ratio = weighted_norm_sq(&f, nu) / sobolev_norm_sq(&f, b.s, b.c).map_err(|e| e.to_string())?;
            ensure!(b.contains(ratio, 1e-12), "nu={nu}: ratio {ratio} outside [{}, {}]", b.lower, b.upper);
        }
        widths.push(format!("nu={nu}: s={} c={} [{:.4}, {:.4}] width {:.4}", b.s, b.c, b.lower, b.upper, b.width()));
    }
    Ok(widths.join("; "))
}

fn negative_controls() -> Outcome {
    let doubling = LinearFractionalMap::mobius(r(2.0), ZERO, ZERO, ONE).unwrap();
    let v = doubling.validate_self_map();
    ensure!(!v.ok, "2z accepted");
    let w = doubling.evaluate(&v.witness).unwrap();
    ensure!(v.witness[0] == ONE && (norm(&w) - 2.0).abs() < 1e-9, "bad witness {}", v.witness[0]);
    let mut alphas = Vec::new();
    for n in [1, 2] {
        let p = parabolic(n);
        ensure!(p.validate_self_map().ok, "parabolic map fails validation");
        let c = classify(&p).map_err(|e| e.to_string())?;
        ensure!(c.kind == MapKind::Parabolic, "N={n}: kind {:?}", c.kind);
        let alpha = c.alpha.unwrap();
        ensure!((alpha - 1.0).abs() < 1e-8, "alpha {alpha}");
        ensure!(spectrum(&p).unwrap_err() == Error::UnsupportedParabolic, "spectrum did not refuse");
        ensure!(spectral_radius(&p).unwrap() == 1.0, "spectral radius");
        alphas.push(alpha);
    }
    Ok(format!(
        "2z rejected with witness {:.3}, max modulus {:.3}; parabolic alpha = {:?}, spectrum refused, radius 1",
        v.witness[0], v.max_modulus, alphas
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("disk maps", disk_maps),
        ("compression oracle", compression_oracle),
        ("rotation eigenfunctions", rotation_eigenfunctions),
        ("translation disk via eigenfunctions", translation_disk),
        ("two-fixed-point plant and recover", plant_and_recover),
        ("conjugation invariance", conjugation_invariance),
        ("weighted/Sobolev equivalence", norm_equivalence),
        ("negative controls", negative_controls),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
