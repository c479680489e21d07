//! Work units of a sweep and their outcomes.

use std::collections::BTreeMap;

use mbtri_core::triangle::TriangleSpec;
use mbtri_core::verify::{self, CheckOptions, CheckReport, VerifyError};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

type Points = Vec<(f64, f64)>;

#[derive(Clone, Debug)]
pub enum Unit {
    Barnes1([Complex64; 4]),
    Star(TriangleSpec, Points),
    Fourier(Points),
    Orthogonality(TriangleSpec, Points),
    R2(TriangleSpec, Complex64, Complex64, f64),
    R1([Complex64; 3], Vec<(Complex64, Complex64)>),
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Checked {
        report: CheckReport,
    },
    /// Precondition did not hold; not a failure.
    Skipped {
        identity: String,
        params: BTreeMap<String, String>,
        reason: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Experimental check that did not pass.
    Flag,
    Skip,
}

impl Outcome {
    pub fn status(&self) -> Status {
        match self {
            Outcome::Checked { report } if report.passed => Status::Pass,
            Outcome::Checked { report } if report.experimental => Status::Flag,
            Outcome::Checked { .. } => Status::Fail,
            Outcome::Skipped { .. } => Status::Skip,
        }
    }

    pub fn identity(&self) -> &str {
        match self {
            Outcome::Checked { report } => &report.identity,
            Outcome::Skipped { identity, .. } => identity,
        }
    }

    pub fn params(&self) -> &BTreeMap<String, String> {
        match self {
            Outcome::Checked { report } => &report.params,
            Outcome::Skipped { params, .. } => params,
        }
    }

    pub fn without_timing(self) -> Self {
        match self {
            Outcome::Checked { report } => Outcome::Checked { report: report.without_timing() },
            s => s,
        }
    }
}

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn fmt_spec(s: &TriangleSpec) -> String {
    s.nu.iter().map(mbtri_core::gamma_algebra::format_exact).collect::<Vec<_>>().join(",")
}

impl Unit {
    pub fn identity(&self) -> &'static str {
        match self {
            Unit::Barnes1(_) => "barnes1",
            Unit::Star(..) => "star_triangle",
            Unit::Fourier(_) => "fourier_phi1",
            Unit::Orthogonality(..) => "orthogonality",
            Unit::R2(..) => "r2_pointwise",
            Unit::R1(..) => "r1_ratio",
        }
    }

    fn describe(&self, point: Option<(f64, f64)>) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        match self {
            Unit::Barnes1(l) => {
                for (i, z) in l.iter().enumerate() {
                    put(&format!("lambda{}", i + 1), fmt_c(*z));
                }
            }
            Unit::Star(s, _) | Unit::Orthogonality(s, _) => {
                put("alpha", fmt_spec(s));
                put("d", s.d.to_string());
            }
            Unit::Fourier(_) => {}
            Unit::R2(s, u, v, e) => {
                put("alpha", fmt_spec(s));
                put("d", s.d.to_string());
                put("u", fmt_c(*u));
                put("v", fmt_c(*v));
                put("eps", e.to_string());
            }
            Unit::R1(e, _) => put("eps", e.iter().map(|z| fmt_c(*z)).collect::<Vec<_>>().join(",")),
        }
        if let Some((x, y)) = point {
            put("x", x.to_string());
            put("y", y.to_string());
        }
        m
    }

    fn skipped(&self, point: Option<(f64, f64)>, e: VerifyError) -> Outcome {
        Outcome::Skipped { identity: self.identity().into(), params: self.describe(point), reason: e.to_string() }
    }

    fn points(&self) -> Option<&Points> {
        match self {
            Unit::Star(_, p) | Unit::Orthogonality(_, p) | Unit::Fourier(p) => Some(p),
            _ => None,
        }
    }

    fn with_points(&self, p: Points) -> Unit {
        match self {
            Unit::Star(s, _) => Unit::Star(s.clone(), p),
            Unit::Orthogonality(s, _) => Unit::Orthogonality(s.clone(), p),
            Unit::Fourier(_) => Unit::Fourier(p),
            other => other.clone(),
        }
    }

    fn call(&self, opts: &CheckOptions) -> Result<Vec<CheckReport>, VerifyError> {
        match self {
            Unit::Barnes1(l) => Ok(vec![verify::check_barnes1(*l, opts)?]),
            Unit::Star(s, p) => verify::check_star_triangle_points(s, p, opts),
            Unit::Fourier(p) => verify::check_fourier_phi1_points(p, opts),
            Unit::Orthogonality(s, p) => verify::check_orthogonality_points(s, p, opts),
            Unit::R2(s, u, v, e) => Ok(vec![verify::check_r2_pointwise(s, *u, *v, *e, opts)?]),
            Unit::R1(e, g) => Ok(vec![verify::check_r1_ratio(*e, g, opts)?]),
        }
    }

    /// Runs the unit. A multi-point unit that fails a precondition is retried point by
    /// point so that only the offending points are skipped.
    pub fn run(&self, opts: &CheckOptions) -> Vec<Outcome> {
        match self.call(opts) {
            Ok(rs) => rs.into_iter().map(|report| Outcome::Checked { report }).collect(),
            Err(e) => match self.points() {
                Some(p) if p.len() > 1 => p.iter().flat_map(|&pt| self.with_points(vec![pt]).run(opts)).collect(),
                Some(p) => vec![self.skipped(p.first().copied(), e)],
                None => vec![self.skipped(None, e)],
            },
        }
    }
}

/// Runs units on a pool of `jobs` workers; results come back in unit order.
pub fn run_all(units: &[(Unit, CheckOptions)], jobs: usize) -> anyhow::Result<Vec<Outcome>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let nested: Vec<Vec<Outcome>> = pool.install(|| units.par_iter().map(|(u, o)| u.run(o)).collect());
    Ok(nested.into_iter().flatten().collect())
}
