//! Spectra of composition operators on H^2(B_N) as symbolic unions of
//! origin-centred circles, disks, annuli and eigenvalue-product families.

mod essential;
mod family;

pub use essential::{
    anchor_point, default_r_schedule, essential_radius_estimate, essential_radius_estimate_at,
    EssentialRadiusEstimate,
};
pub use family::{
    contractive_products, cyclic_order, products_up_to_degree, rational_angle, sort_dedup,
    AngleReport,
};

use std::f64::consts::TAU;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::classify::{classify_with, Classification, HyperbolicCase, MapKind};
use crate::error::{Error, Result};
use crate::lfm::LinearFractionalMap;
use crate::linalg::{real, C64, ONE, ZERO};
use crate::serde_util::{c64, c64_slice};
use crate::Tolerances;

/// Which result produced a component. The string forms are part of the JSON
/// interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    EllipticAutomorphism,
    UnitaryIrrational,
    UnitaryRational,
    CompactPower,
    BoundaryFixed,
    HyperbolicOneFixed,
    HyperbolicTwoFixed,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::EllipticAutomorphism => "elliptic automorphism (closure of unitary eigenvalue products)",
            Provenance::UnitaryIrrational => "Theorem 2.2(i)",
            Provenance::UnitaryRational => "Theorem 2.2(ii)",
            Provenance::CompactPower => "Theorem 2.3",
            Provenance::BoundaryFixed => "Theorem 2.5",
            Provenance::HyperbolicOneFixed => "Theorem 3.2",
            Provenance::HyperbolicTwoFixed => "Theorem F",
        })
    }
}

impl Serialize for Provenance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A generated family `{Lambda^a : |a| >= min_degree}` truncated below
/// `tail_tol` (the tail is covered by a `Point(0)` component).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFamily {
    #[serde(with = "c64_slice")]
    pub generators: Vec<C64>,
    /// Sorted by modulus, duplicates removed.
    #[serde(with = "c64_slice")]
    pub values: Vec<C64>,
    pub min_degree: usize,
    pub tail_tol: f64,
    /// The count cap stopped the enumeration before `tail_tol` was reached.
    pub truncated: bool,
}

impl PointFamily {
    fn nearest_within(&self, z: C64, tol: f64) -> bool {
        let m = z.norm();
        let start = self.values.partition_point(|v| v.norm() < m - tol);
        self.values[start..]
            .iter()
            .take_while(|v| v.norm() <= m + tol)
            .any(|v| (v - z).norm() <= tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Component {
    Point {
        #[serde(with = "c64")]
        value: C64,
        provenance: Provenance,
    },
    #[serde(rename = "points")]
    Family {
        #[serde(flatten)]
        family: PointFamily,
        provenance: Provenance,
    },
    Circle { radius: f64, provenance: Provenance },
    Disk { radius: f64, provenance: Provenance },
    /// Stored open on both sides; the owning set's closure flag applies.
    Annulus {
        r_in: f64,
        r_out: f64,
        open: bool,
        provenance: Provenance,
    },
}

impl Component {
    pub fn max_modulus(&self) -> f64 {
        match self {
            Component::Point { value, .. } => value.norm(),
            Component::Family { family, .. } => family.values.last().map_or(0.0, |v| v.norm()),
            Component::Circle { radius, .. } | Component::Disk { radius, .. } => *radius,
            Component::Annulus { r_out, .. } => *r_out,
        }
    }

    fn contains(&self, z: C64, tol: f64, closed: bool) -> bool {
        let m = z.norm();
        match self {
            Component::Point { value, .. } => (z - value).norm() <= tol,
            Component::Family { family, .. } => family.nearest_within(z, tol),
            Component::Circle { radius, .. } => (m - radius).abs() <= tol,
            Component::Disk { radius, .. } => m <= radius + tol,
            Component::Annulus { r_in, r_out, open, .. } => {
                if *open && !closed && tol == 0.0 {
                    m > *r_in && m < *r_out
                } else {
                    m >= r_in - tol && m <= r_out + tol
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoReport {
    /// `d_phi(tau)^{-N/2}` at the boundary fixed point.
    pub closed_form: f64,
    pub estimate: EssentialRadiusEstimate,
    pub relative_difference: f64,
    /// Relative difference above 5%.
    pub disagreement: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalityReport {
    pub q_max: u64,
    pub tol: f64,
    pub angles: Vec<AngleReport>,
    /// `"rational"` or `"irrational"`.
    pub branch: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSet {
    pub components: Vec<Component>,
    pub provenance: Provenance,
    pub spectral_radius: f64,
    /// The spectrum is the closure of the union of the components.
    pub closure: bool,
    pub rationality: Option<RationalityReport>,
    pub rho: Option<RhoReport>,
    pub notes: Vec<String>,
}

impl SpectralSet {
    pub fn contains(&self, z: C64, tol: f64) -> bool {
        self.components.iter().any(|c| c.contains(z, tol, self.closure))
    }

    pub fn max_modulus(&self) -> f64 {
        self.components.iter().map(Component::max_modulus).fold(0.0, f64::max)
    }

    /// Deterministic point cloud with the index of the emitting component.
    pub fn discretize(&self, resolution: usize) -> Vec<(C64, usize)> {
        let res = resolution.max(1);
        let ring = |r: f64| (0..res).map(move |k| C64::from_polar(r, TAU * k as f64 / res as f64));
        let mut out = Vec::new();
        for (idx, c) in self.components.iter().enumerate() {
            match c {
                Component::Point { value, .. } => out.push((*value, idx)),
                Component::Family { family, .. } => out.extend(family.values.iter().map(|v| (*v, idx))),
                Component::Circle { radius, .. } => out.extend(ring(*radius).map(|v| (v, idx))),
                Component::Disk { radius, .. } => {
                    out.push((ZERO, idx));
                    for j in 1..=res {
                        out.extend(ring(radius * j as f64 / res as f64).map(|v| (v, idx)));
                    }
                }
                Component::Annulus { r_in, r_out, .. } => {
                    for j in 0..=res {
                        let r = r_in + (r_out - r_in) * j as f64 / res as f64;
                        out.extend(ring(r).map(|v| (v, idx)));
                    }
                }
            }
        }
        out
    }

    fn new(provenance: Provenance, spectral_radius: f64) -> Self {
        SpectralSet {
            components: Vec::new(),
            provenance,
            spectral_radius,
            closure: false,
            rationality: None,
            rho: None,
            notes: Vec::new(),
        }
    }

    fn push_point(&mut self, value: C64) {
        let provenance = self.provenance;
        self.components.push(Component::Point { value, provenance });
    }
}

/// CSV rows `re,im,component_index`.
pub fn cloud_csv(points: &[(C64, usize)]) -> String {
    let mut s = String::from("re,im,component_index\n");
    for (z, i) in points {
        s.push_str(&format!("{:?},{:?},{}\n", z.re, z.im, i));
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumOptions {
    pub tol: Tolerances,
    /// Largest denominator accepted by the root-of-unity test.
    pub q_max: u64,
    pub angle_tol: f64,
    pub tail_tol: f64,
    /// Cap on enumerated family members.
    pub max_family: usize,
    /// Iterates used by the essential-radius estimator.
    pub n_max: usize,
    pub r_schedule: Vec<f64>,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            tol: Tolerances::default(),
            q_max: 64,
            angle_tol: 1e-9,
            tail_tol: 1e-12,
            max_family: 200_000,
            n_max: 20,
            r_schedule: default_r_schedule(),
        }
    }
}

/// 1 for elliptic and parabolic maps, `alpha^{-N/2}` otherwise.
pub fn spectral_radius(map: &LinearFractionalMap) -> Result<f64> {
    let c = classify_with(map, &Tolerances::default())?;
    Ok(spectral_radius_from(map.dim(), &c))
}

pub fn spectral_radius_from(n: usize, c: &Classification) -> f64 {
    match c.alpha {
        // parabolic means alpha = 1; the computed value only differs by rounding
        Some(_) if c.kind == MapKind::Parabolic => 1.0,
        Some(alpha) if !c.kind.is_elliptic() => alpha.powf(-(n as f64) / 2.0),
        _ => 1.0,
    }
}

pub fn spectrum(map: &LinearFractionalMap) -> Result<SpectralSet> {
    spectrum_with(map, &SpectrumOptions::default())
}

pub fn spectrum_with(map: &LinearFractionalMap, opts: &SpectrumOptions) -> Result<SpectralSet> {
    let c = classify_with(map, &opts.tol)?;
    spectrum_from_classification(map, &c, opts)
}

fn rationality(unimodular: &[C64], opts: &SpectrumOptions) -> RationalityReport {
    let angles: Vec<AngleReport> = unimodular
        .iter()
        .map(|&l| AngleReport {
            eigenvalue: l,
            fraction: rational_angle(l, opts.q_max, opts.angle_tol),
        })
        .collect();
    let branch = if angles.iter().all(|a| a.fraction.is_some()) {
        "rational"
    } else {
        "irrational"
    };
    RationalityReport {
        q_max: opts.q_max,
        tol: opts.angle_tol,
        angles,
        branch: branch.into(),
    }
}

fn family(
    generators: &[C64],
    rotations: &[C64],
    min_degree: usize,
    opts: &SpectrumOptions,
) -> PointFamily {
    let (base, mut truncated) = contractive_products(generators, min_degree, opts.tail_tol, opts.max_family);
    let mut values = Vec::with_capacity(base.len() * rotations.len().max(1));
    'outer: for r in rotations {
        for b in &base {
            if values.len() >= opts.max_family {
                truncated = true;
                break 'outer;
            }
            values.push(r * b);
        }
    }
    sort_dedup(&mut values);
    PointFamily {
        generators: generators.to_vec(),
        values,
        min_degree,
        tail_tol: opts.tail_tol,
        truncated,
    }
}

/// Distinct moduli of contractive products (including the empty product).
fn product_moduli(generators: &[C64], opts: &SpectrumOptions, floor: f64) -> (Vec<f64>, bool) {
    let mods: Vec<C64> = generators.iter().map(|g| real(g.norm())).collect();
    let (vals, truncated) = contractive_products(&mods, 0, floor, opts.max_family);
    let mut m: Vec<f64> = vals.iter().map(|v| v.re).collect();
    m.sort_by(|a, b| b.total_cmp(a));
    m.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
    (m, truncated)
}

pub fn spectrum_from_classification(
    map: &LinearFractionalMap,
    c: &Classification,
    opts: &SpectrumOptions,
) -> Result<SpectralSet> {
    let n = map.dim();
    let radius = spectral_radius_from(n, c);
    match c.kind {
        MapKind::Parabolic => Err(Error::UnsupportedParabolic),
        MapKind::OtherAutomorphism => Err(Error::UnsupportedAutomorphism { spectral_radius: radius }),
        MapKind::EllipticAutomorphism => {
            let mut set = SpectralSet::new(Provenance::EllipticAutomorphism, radius);
            let report = rationality(&c.unimodular_eigenvalues, opts);
            if report.branch == "rational" {
                let fr: Vec<(u64, u64)> = report.angles.iter().filter_map(|a| a.fraction).collect();
                let order = cyclic_order(&fr);
                if order as usize > opts.max_family {
                    set.components.push(Component::Circle { radius: 1.0, provenance: set.provenance });
                    set.notes.push(format!("rotation group of order {order} exceeds the family cap; emitted the unit circle"));
                } else {
                    let rots: Vec<C64> = (0..order).map(|k| C64::from_polar(1.0, TAU * k as f64 / order as f64)).collect();
                    let fam = family(&[], &rots, 0, opts);
                    set.components.push(Component::Family { family: fam, provenance: set.provenance });
                }
            } else {
                set.components.push(Component::Circle { radius: 1.0, provenance: set.provenance });
            }
            set.closure = true;
            set.rationality = Some(report);
            Ok(set)
        }
        MapKind::EllipticUnitaryPart => {
            let report = rationality(&c.unimodular_eigenvalues, opts);
            let irrational = report.branch == "irrational";
            let prov = if irrational { Provenance::UnitaryIrrational } else { Provenance::UnitaryRational };
            let mut set = SpectralSet::new(prov, radius);
            if irrational {
                let (mods, truncated) = product_moduli(&c.contractive_eigenvalues, opts, opts.tail_tol);
                for r in mods {
                    set.components.push(Component::Circle { radius: r, provenance: prov });
                }
                if truncated {
                    set.notes.push("circle family truncated by the count cap".into());
                }
            } else {
                let fr: Vec<(u64, u64)> = report.angles.iter().filter_map(|a| a.fraction).collect();
                let order = cyclic_order(&fr);
                let rots: Vec<C64> = (0..order).map(|k| C64::from_polar(1.0, TAU * k as f64 / order as f64)).collect();
                let fam = family(&c.contractive_eigenvalues, &rots, 0, opts);
                set.components.push(Component::Family { family: fam, provenance: prov });
            }
            set.push_point(ZERO);
            set.closure = true;
            set.rationality = Some(report);
            Ok(set)
        }
        MapKind::EllipticInteriorOnly => {
            let mut set = SpectralSet::new(Provenance::CompactPower, radius);
            set.push_point(ZERO);
            set.push_point(ONE);
            let fam = family(&c.eigenvalues, &[ONE], 1, opts);
            set.components.push(Component::Family { family: fam, provenance: set.provenance });
            set.closure = true;
            Ok(set)
        }
        MapKind::EllipticBoundaryFixed => {
            let mut set = SpectralSet::new(Provenance::BoundaryFixed, radius);
            let bp = c.boundary_fixed_points.first().ok_or(Error::NoBoundaryFixedPoint)?;
            let d = bp.dilation.ok_or(Error::NoBoundaryFixedPoint)?;
            let rho = d.powf(-(n as f64) / 2.0);
            let estimate = essential_radius_estimate_at(map, &bp.location, opts.n_max, &opts.r_schedule)?;
            let rel = (estimate.limit - rho).abs() / rho;
            if rel > 0.05 {
                set.notes.push(format!(
                    "essential radius estimate {} differs from d(tau)^(-N/2) = {rho} by {:.1}%",
                    estimate.limit,
                    100.0 * rel
                ));
            }
            if rho >= 1.0 {
                set.notes.push(format!("closed-form essential radius {rho} is not below 1"));
            }
            set.rho = Some(RhoReport {
                closed_form: rho,
                estimate,
                relative_difference: rel,
                disagreement: rel > 0.05,
            });
            set.components.push(Component::Disk { radius: rho, provenance: set.provenance });
            let fam = family(&c.eigenvalues, &[ONE], 1, opts);
            set.components.push(Component::Family { family: fam, provenance: set.provenance });
            set.push_point(ONE);
            Ok(set)
        }
        MapKind::HyperbolicOneFixed => {
            let mut set = SpectralSet::new(Provenance::HyperbolicOneFixed, radius);
            set.components.push(Component::Disk { radius, provenance: set.provenance });
            Ok(set)
        }
        MapKind::HyperbolicTwoFixed => {
            let mut set = SpectralSet::new(Provenance::HyperbolicTwoFixed, radius);
            let form = c.hyperbolic.as_ref().ok_or(Error::NotHyperbolic)?;
            debug_assert!(matches!(form.case, HyperbolicCase::TwoFixed { .. }));
            let alpha = form.alpha;
            let s = alpha.powf(n as f64 / 2.0);
            // annuli vanish once their outer radius drops below the tail
            let (mods, truncated) = product_moduli(&form.block_eigenvalues, opts, opts.tail_tol * s);
            for m in mods {
                set.components.push(Component::Annulus {
                    r_in: m * s,
                    r_out: m / s,
                    open: true,
                    provenance: set.provenance,
                });
            }
            if truncated {
                set.notes.push("annulus family truncated by the count cap".into());
            }
            set.push_point(ZERO);
            set.closure = true;
            Ok(set)
        }
    }
}
