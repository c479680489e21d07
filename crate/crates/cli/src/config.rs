//! TOML run configuration. Top level: `seed`, `output`, `format`, `[quadrature]`, and any
//! number of `[[check]]` blocks. Unknown keys are errors. Command-line flags win over the file.
//!
//! ```toml
//! seed = 42
//! format = "json"
//!
//! [quadrature]
//! target_rel_tol = 1e-10
//!
//! [[check]]
//! identity = "barnes1"
//! random = 50
//!
//! [[check]]
//! identity = "orthogonality"
//! alpha = [0.6, 0.7, 0.8]
//! d = 4
//! points = [[0.3, 0.4], [1.0, 1.0]]
//! schedule = { epsilons = [0.1, 0.05, 0.025, 0.0125, 0.00625], extrapolation_order = 3 }
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mbtri_core::mb_engine::{QuadratureConfig, RegularizationSchedule};
use mbtri_core::triangle::TriangleSpec;
use mbtri_core::verify::{sample, R1_GRID};
use num_complex::Complex64;
use serde::Deserialize;

use crate::output::Format;
use crate::run::Unit;
use crate::values;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    /// Report file; stdout when absent.
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default, rename = "check")]
    pub checks: Vec<CheckBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    Barnes1,
    StarTriangle,
    FourierPhi1,
    Orthogonality,
    R2Pointwise,
    R1Ratio,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Eps {
    One(f64),
    Three(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckBlock {
    pub identity: Identity,
    /// Number of seeded random draws instead of (or in addition to) explicit parameters.
    #[serde(default)]
    pub random: usize,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub schedule: Option<RegularizationSchedule>,
    /// barnes1: four complex numbers as strings.
    pub lambda: Option<Vec<String>>,
    pub alpha: Option<Vec<f64>>,
    pub d: Option<f64>,
    pub points: Option<Vec<[f64; 2]>>,
    /// Random (x, y) points per random α draw (star_triangle, orthogonality).
    pub points_per_case: Option<usize>,
    pub u: Option<String>,
    pub v: Option<String>,
    /// r2_pointwise: one number; r1_ratio: three.
    pub eps: Option<Eps>,
    /// r1_ratio: list of [u, v] string pairs.
    pub grid: Option<Vec<[String; 2]>>,
}

pub fn load(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text)?;
    cfg.quadrature.validate()?;
    Ok(cfg)
}

fn c(s: &str) -> Result<Complex64> {
    values::complex(s).map_err(anyhow::Error::msg)
}

impl CheckBlock {
    fn spec(&self) -> Result<Option<TriangleSpec>> {
        match (&self.alpha, self.d) {
            (Some(a), Some(d)) => {
                if a.len() != 3 {
                    bail!("alpha needs 3 values, got {}", a.len());
                }
                Ok(Some(TriangleSpec::from_f64([a[0], a[1], a[2]], d)?))
            }
            (None, None) => Ok(None),
            _ => bail!("alpha and d must be given together"),
        }
    }

    fn uniqueness_spec(&self) -> Result<Option<TriangleSpec>> {
        // α₃ = d − α₁ − α₂ exactly when the decimals agree to 1e-12
        let Some(mut s) = self.spec()? else { return Ok(None) };
        let d = mbtri_core::gamma_algebra::exact_real(s.d);
        let gap = mbtri_core::gamma_algebra::to_c64(&(s.sum() - d)).norm();
        if gap <= 1e-12 {
            s.nu[2] = d - s.nu[0] - s.nu[1];
        }
        Ok(Some(s))
    }

    fn explicit_points(&self) -> Vec<(f64, f64)> {
        self.points.iter().flatten().map(|p| (p[0], p[1])).collect()
    }

    fn points_for(
        &self,
        rng: &mut rand_chacha::ChaCha8Rng,
        draw: fn(&mut rand_chacha::ChaCha8Rng) -> (f64, f64),
    ) -> Vec<(f64, f64)> {
        if self.points.is_some() {
            self.explicit_points()
        } else {
            (0..self.points_per_case.unwrap_or(5)).map(|_| draw(rng)).collect()
        }
    }

    /// Work units for this block, in declaration order: explicit parameters first, then draws.
    pub fn units(&self, seed: u64) -> Result<Vec<Unit>> {
        let mut rng = sample::rng(seed);
        let mut out = Vec::new();
        match self.identity {
            Identity::Barnes1 => {
                if let Some(l) = &self.lambda {
                    if l.len() != 4 {
                        bail!("lambda needs 4 values, got {}", l.len());
                    }
                    out.push(Unit::Barnes1([c(&l[0])?, c(&l[1])?, c(&l[2])?, c(&l[3])?]));
                }
                for _ in 0..self.random {
                    out.push(Unit::Barnes1(sample::barnes_lambdas(&mut rng)));
                }
            }
            Identity::StarTriangle => {
                if let Some(s) = self.uniqueness_spec()? {
                    let pts = self.points_for(&mut rng, sample::xy_point);
                    out.push(Unit::Star(s, pts));
                }
                for _ in 0..self.random {
                    let s = sample::uniqueness_alpha(&mut rng);
                    let pts = self.points_for(&mut rng, sample::xy_point);
                    out.push(Unit::Star(s, pts));
                }
            }
            Identity::FourierPhi1 => {
                let mut pts = self.explicit_points();
                pts.extend((0..self.random).map(|_| sample::ladder_point(&mut rng)));
                if !pts.is_empty() {
                    out.push(Unit::Fourier(pts));
                }
            }
            Identity::Orthogonality => {
                if let Some(s) = self.spec()? {
                    let pts = self.points_for(&mut rng, sample::xy_point);
                    out.push(Unit::Orthogonality(s, pts));
                }
                for _ in 0..self.random {
                    let s = sample::orthogonality_alpha(&mut rng);
                    let pts = self.points_for(&mut rng, sample::xy_point);
                    out.push(Unit::Orthogonality(s, pts));
                }
            }
            Identity::R2Pointwise => {
                if let Some(s) = self.spec()? {
                    let (Some(u), Some(v), Some(Eps::One(e))) = (&self.u, &self.v, &self.eps) else {
                        bail!("r2_pointwise needs u, v and a single eps");
                    };
                    out.push(Unit::R2(s, c(u)?, c(v)?, *e));
                }
                for _ in 0..self.random {
                    let (s, u, v, e) = sample::r2_config(&mut rng);
                    out.push(Unit::R2(s, u, v, e));
                }
            }
            Identity::R1Ratio => {
                let grid = match &self.grid {
                    Some(g) => g.iter().map(|[u, v]| Ok((c(u)?, c(v)?))).collect::<Result<Vec<_>>>()?,
                    None => R1_GRID.to_vec(),
                };
                match &self.eps {
                    Some(Eps::Three(e)) if e.len() == 3 => {
                        out.push(Unit::R1([e[0], e[1], e[2]].map(|x| Complex64::new(x, 0.0)), grid.clone()))
                    }
                    Some(_) => bail!("r1_ratio needs eps = [e1, e2, e3]"),
                    None if self.random == 0 => {
                        out.push(Unit::R1([0.1, 0.07, -0.17].map(|x| Complex64::new(x, 0.0)), grid.clone()))
                    }
                    None => {}
                }
                for _ in 0..self.random {
                    out.push(Unit::R1(sample::r1_eps(&mut rng), grid.clone()));
                }
            }
        }
        if out.is_empty() {
            bail!("declares no cases (give explicit parameters or random = N)");
        }
        Ok(out)
    }
}
