//! Command dispatch and report assembly.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use lfm_spectra::classify::{classify_with, Classification, MapKind};
use lfm_spectra::lfm::{ValidationOptions, ValidationReport};
use lfm_spectra::linalg::C64;
use lfm_spectra::oracle::{
    build_compression, compression_eigenvalues, default_degree_cap, eigenfunction_candidates, norm_equivalence_check,
    residual_table,
};
use lfm_spectra::spectra::{
    cloud_csv, essential_radius_estimate, spectral_radius_from, spectrum_from_classification, SpectrumOptions,
};
use lfm_spectra::{Error, LinearFractionalMap, Tolerances};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::{json, Cli, Command, Format};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_UNSUPPORTED: u8 = 3;

const DEFAULT_EXPONENTS: [C64; 3] = [C64::new(0.3, 0.0), C64::new(1.0, 2.0), C64::new(-0.4, 1.0)];
const DEFAULT_NUS: [f64; 3] = [-1.0, -0.5, 0.0];

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize to JSON")
}

fn pair(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn load_map(path: &Path) -> Result<LinearFractionalMap> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    // serde_json errors carry the line and column
    serde_json::from_str(&text).with_context(|| format!("malformed map JSON in {}", path.display()))
}

struct Settings {
    cli_tol: f64,
    tolerances: Tolerances,
    spectrum: SpectrumOptions,
}

impl Settings {
    fn new(cli: &Cli) -> Self {
        let tolerances = Tolerances {
            self_map: cli.tol,
            ..Tolerances::default()
        };
        let spectrum = SpectrumOptions {
            tol: tolerances,
            n_max: cli.nmax,
            ..SpectrumOptions::default()
        };
        Settings {
            cli_tol: cli.tol,
            tolerances,
            spectrum,
        }
    }

    fn tolerances_value(&self, cli: &Cli) -> Value {
        let s = &self.spectrum;
        json!({
            "validation": self.cli_tol,
            "classification": to_value(&self.tolerances),
            "root_of_unity_q_max": s.q_max,
            "angle_tol": s.angle_tol,
            "tail_tol": s.tail_tol,
            "max_family": s.max_family,
            "n_max": s.n_max,
            "r_schedule": s.r_schedule,
            "resolution": cli.resolution,
        })
    }
}

struct Report {
    fields: Map<String, Value>,
}

impl Report {
    fn new(command: &str, map: &LinearFractionalMap, tolerances: Value) -> Self {
        let mut fields = Map::new();
        fields.insert("tool".into(), json!("lfmspec"));
        fields.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        fields.insert("command".into(), json!(command));
        fields.insert("map".into(), to_value(map));
        fields.insert("tolerances".into(), tolerances);
        Report { fields }
    }

    fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.into(), value);
    }

    fn render(self) -> String {
        json::to_string(&Value::Object(self.fields))
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Classify { .. } => "classify",
        Command::Spectrum { .. } => "spectrum",
        Command::Radius { .. } => "radius",
        Command::Compress { .. } => "compress",
        Command::VerifyEigen { .. } => "verify-eigen",
        Command::Norms { .. } => "norms",
        Command::Export { .. } => "export",
    }
}

fn map_path(c: &Command) -> &Path {
    match c {
        Command::Validate { map }
        | Command::Classify { map }
        | Command::Spectrum { map }
        | Command::Radius { map }
        | Command::Export { map }
        | Command::Compress { map, .. }
        | Command::VerifyEigen { map, .. }
        | Command::Norms { map, .. } => map,
    }
}

fn validation_message(v: &ValidationReport) -> String {
    let witness: Vec<String> = v.witness.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
    format!(
        "not a self-map of the ball: |phi| reaches {} > 1 + {} at witness [{}]",
        v.max_modulus,
        v.tolerance,
        witness.join(", ")
    )
}

pub fn run(cli: &Cli) -> Result<u8> {
    let ctx = Settings::new(cli);
    if !cli.tol.is_finite() || cli.tol < 0.0 {
        anyhow::bail!("--tol must be a non-negative number, got {}", cli.tol);
    }
    let map = load_map(map_path(&cli.command))?;
    let mut report = Report::new(command_name(&cli.command), &map, ctx.tolerances_value(cli));

    let validation = map.validate_self_map_with(&ValidationOptions {
        tol: cli.tol,
        ..ValidationOptions::default()
    });
    report.set("validation", to_value(&validation));
    if !validation.ok {
        eprintln!("{}", validation_message(&validation));
        emit(cli, &report.render())?;
        return Ok(EXIT_INVALID);
    }
    if let Command::Validate { .. } = cli.command {
        emit(cli, &report.render())?;
        return Ok(EXIT_OK);
    }

    let classification = classify_with(&map, &ctx.tolerances);
    match &classification {
        Ok(c) => report.set("classification", to_value(c)),
        Err(e) => report.set("classification_error", json!(e.to_string())),
    }

    match &cli.command {
        Command::Validate { .. } => unreachable!("handled above"),
        Command::Classify { .. } => {
            classification?;
            emit(cli, &report.render())?;
            Ok(EXIT_OK)
        }
        Command::Spectrum { .. } | Command::Export { .. } => {
            let c = classification?;
            let set = match spectrum_from_classification(&map, &c, &ctx.spectrum) {
                Ok(set) => set,
                Err(e) => return unsupported(cli, report, &c, &map, e),
            };
            let csv = matches!(cli.command, Command::Export { .. }) || cli.format == Some(Format::Csv);
            if csv {
                emit(cli, &cloud_csv(&set.discretize(cli.resolution)))?;
            } else {
                report.set("spectrum", to_value(&set));
                emit(cli, &report.render())?;
            }
            Ok(EXIT_OK)
        }
        Command::Radius { .. } => {
            let c = classification?;
            radius(cli, &ctx, report, &map, &c)
        }
        Command::Compress { matrix, header, .. } => {
            let degree = cli.degree.unwrap_or_else(|| default_degree_cap(map.dim()));
            let m = build_compression(&map, degree)?;
            let eigenvalues = compression_eigenvalues(&m)?;
            if let Some(path) = matrix {
                fs::write(path, m.to_csv()).with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = header {
                fs::write(path, json::to_string(&to_value(&m.header())))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if cli.format == Some(Format::Json) {
                report.set(
                    "oracle",
                    json!({
                        "degree": degree,
                        "dimension": m.dimension(),
                        "eigenvalues": eigenvalues.iter().copied().map(pair).collect::<Vec<_>>(),
                    }),
                );
                emit(cli, &report.render())?;
            } else {
                let mut s = String::from("re,im\n");
                for z in &eigenvalues {
                    s.push_str(&format!("{:?},{:?}\n", z.re, z.im));
                }
                emit(cli, &s)?;
            }
            Ok(EXIT_OK)
        }
        Command::VerifyEigen {
            exponents, max_degree, ..
        } => {
            let degree = cli.degree.unwrap_or(20);
            let exponents = if exponents.is_empty() {
                DEFAULT_EXPONENTS.to_vec()
            } else {
                exponents.clone()
            };
            let candidates = eigenfunction_candidates(&map, *max_degree, &exponents, degree)?;
            let rows = residual_table(&map, &candidates, degree)?;
            if cli.format == Some(Format::Csv) {
                let mut s = String::from("label,re,im,residual\n");
                for r in &rows {
                    s.push_str(&format!(
                        "\"{}\",{:?},{:?},{:?}\n",
                        r.label, r.eigenvalue.re, r.eigenvalue.im, r.residual
                    ));
                }
                emit(cli, &s)?;
            } else {
                let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
                report.set(
                    "oracle",
                    json!({ "degree": degree, "max_residual": worst, "residuals": to_value(&rows) }),
                );
                emit(cli, &report.render())?;
            }
            Ok(EXIT_OK)
        }
        Command::Norms { nu, samples, seed, .. } => {
            let degree = cli.degree.unwrap_or(30);
            let nus = if nu.is_empty() { DEFAULT_NUS.to_vec() } else { nu.clone() };
            let checks = nus
                .iter()
                .map(|&v| norm_equivalence_check(v, map.dim(), degree, *samples, *seed))
                .collect::<lfm_spectra::Result<Vec<_>>>()?;
            if cli.format == Some(Format::Csv) {
                let mut s = String::from("nu,s,c,lower,upper,width,min_ratio,max_ratio,all_within\n");
                for c in &checks {
                    let b = &c.bounds;
                    s.push_str(&format!(
                        "{:?},{},{:?},{:?},{:?},{:?},{:?},{:?},{}\n",
                        b.nu,
                        b.s,
                        b.c,
                        b.lower,
                        b.upper,
                        b.width(),
                        c.min_ratio,
                        c.max_ratio,
                        c.all_within
                    ));
                }
                emit(cli, &s)?;
            } else {
                let table: Vec<Value> = checks
                    .iter()
                    .map(|c| {
                        let mut v = to_value(c);
                        v["width"] = json!(c.bounds.width());
                        v
                    })
                    .collect();
                report.set("oracle", json!({ "max_degree": degree, "seed": seed, "norms": table }));
                emit(cli, &report.render())?;
            }
            Ok(if checks.iter().all(|c| c.all_within) {
                EXIT_OK
            } else {
                EXIT_ERROR
            })
        }
    }
}

fn unsupported(
    cli: &Cli,
    mut report: Report,
    c: &Classification,
    map: &LinearFractionalMap,
    e: Error,
) -> Result<u8> {
    match e {
        Error::UnsupportedParabolic | Error::UnsupportedAutomorphism { .. } => {
            let class = match c.kind {
                MapKind::Parabolic => "parabolic",
                _ => "non-elliptic automorphism",
            };
            let message = e.to_string();
            eprintln!("{message}");
            report.set(
                "unsupported",
                json!({
                    "class": class,
                    "alpha": c.alpha,
                    "spectral_radius": spectral_radius_from(map.dim(), c),
                    "message": message,
                }),
            );
            if cli.format != Some(Format::Csv) && !matches!(cli.command, Command::Export { .. }) {
                emit(cli, &report.render())?;
            }
            Ok(EXIT_UNSUPPORTED)
        }
        other => Err(other.into()),
    }
}

fn radius(
    cli: &Cli,
    ctx: &Settings,
    mut report: Report,
    map: &LinearFractionalMap,
    c: &Classification,
) -> Result<u8> {
    let closed = spectral_radius_from(map.dim(), c);
    let mut out = Map::new();
    out.insert("spectral_radius".into(), json!(closed));
    out.insert("alpha".into(), json!(c.alpha));
    match essential_radius_estimate(map, ctx.spectrum.n_max, &ctx.spectrum.r_schedule) {
        Ok(est) => {
            out.insert("essential_radius_estimate".into(), json!(est.limit));
            out.insert("estimator".into(), to_value(&est));
        }
        Err(e) => {
            out.insert("essential_radius_estimate".into(), Value::Null);
            out.insert("estimator_error".into(), json!(e.to_string()));
        }
    }
    report.set("radius", Value::Object(out));
    emit(cli, &report.render())?;
    Ok(EXIT_OK)
}
