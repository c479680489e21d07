//! `mbtri`: evaluate Mellin-Barnes triangle quantities and run identity checks.
//!
//! Exit status: 0 all checks passed, 1 a gating check failed, 2 usage or precondition error.

mod config;
mod output;
mod run;
mod values;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mbtri_core::gamma_algebra::{var, AlgebraError};
use mbtri_core::mb_engine::{self, monomial_values, QuadratureConfig, RegularizationSchedule};
use mbtri_core::triangle::{self, TriangleError, TriangleSpec, UdPoint};
use mbtri_core::verify::{star_schedule, CheckOptions, ReIm};
use num_complex::Complex64;
use serde::Serialize;

use crate::output::{Format, Summary};
use crate::run::{Outcome, Unit};

#[derive(Parser)]
#[command(name = "mbtri", version, about = "Mellin-Barnes Gamma-product engine for the one-loop massless triangle")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output format [default: text].
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Omit wall times so that repeated runs give identical bytes.
    #[arg(long, global = true)]
    no_timing: bool,
    /// TOML file supplying `seed` and `[quadrature]` (its [[check]] blocks are ignored outside sweep).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
    /// Tolerance on rel_err, overriding the per-identity default.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Base seed for random draws and report tagging.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Regularization epsilons for pinched evaluations, largest first, e.g. 0.1,0.05,0.025,0.0125.
    #[arg(long, global = true, value_parser = values::real, value_delimiter = ',')]
    eps_schedule: Option<Vec<f64>>,
    /// Extrapolation order for --eps-schedule (default: number of epsilons minus 2).
    #[arg(long, global = true, requires = "eps_schedule")]
    order: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single quantity.
    #[command(subcommand)]
    Eval(Eval),
    /// Run one identity check.
    #[command(subcommand)]
    Check(Check),
    /// Run every [[check]] block of a TOML configuration (grammar in the README).
    ///
    /// Quadrature defaults: target_rel_tol 1e-10, initial_nodes_per_fold 64, max_refinements 6,
    /// truncation_slack 16. Per-identity tolerances: barnes1 1e-8, star_triangle and fourier_phi1
    /// 1e-6, r2_pointwise 1e-5, orthogonality 1e-3, r1_ratio 1e-4. Block seeds default to
    /// seed + block index.
    Sweep { config: PathBuf },
}

#[derive(Args, Clone)]
struct SpecArgs {
    /// Three indices, comma-separated (complex allowed).
    #[arg(long, alias = "nu", value_parser = values::complex3, allow_hyphen_values = true)]
    alpha: [Complex64; 3],
    /// Dimension.
    #[arg(long, default_value_t = 4.0)]
    d: f64,
}

impl SpecArgs {
    fn spec(&self) -> Result<TriangleSpec> {
        Ok(TriangleSpec::from_complex(self.alpha, self.d)?)
    }
}

#[derive(Args, Clone)]
struct XyArgs {
    #[arg(long, value_parser = values::real, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, value_parser = values::real, allow_hyphen_values = true)]
    y: f64,
}

#[derive(Subcommand)]
enum Eval {
    /// The kernel D^(a,b)[nu] at given a, b.
    #[command(name = "D", alias = "d")]
    D {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_parser = values::complex, allow_hyphen_values = true)]
        a: Complex64,
        #[arg(long, value_parser = values::complex, allow_hyphen_values = true)]
        b: Complex64,
    },
    /// The two-fold integral J(nu; d)(x, y).
    #[command(name = "J", alias = "j")]
    J {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        xy: XyArgs,
    },
    /// The ladder function Phi^(n)(x, y).
    Phi {
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[command(flatten)]
        xy: XyArgs,
    },
    /// Closed form of the f integral at regulator eps.
    #[command(name = "f_closed", alias = "f-closed")]
    FClosed {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_parser = values::complex, allow_hyphen_values = true)]
        u: Complex64,
        #[arg(long, value_parser = values::complex, allow_hyphen_values = true)]
        v: Complex64,
        #[arg(long, value_parser = values::real)]
        eps: f64,
    },
}

#[derive(Subcommand)]
enum Check {
    /// First Barnes lemma.
    Barnes1 {
        /// lambda1..lambda4, comma-separated.
        #[arg(long, value_parser = values::complex4, allow_hyphen_values = true)]
        lambda: [Complex64; 4],
    },
    /// Star-triangle relation (sum of alpha = d).
    StarTriangle {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        xy: XyArgs,
    },
    /// Phi^(1) against its MB representation J(1,1,1; 4).
    Fourier {
        #[command(flatten)]
        xy: XyArgs,
    },
    /// Orthogonality of the D kernel.
    Orthogonality {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        xy: XyArgs,
    },
    /// The f integral at (u, v) against its closed form.
    R2 {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_parser = values::complex, allow_hyphen_values = true)]
        u: Complex64,
        #[arg(long, value_parser = values::complex, allow_hyphen_values = true)]
        v: Complex64,
        #[arg(long, value_parser = values::real)]
        eps: f64,
    },
    /// Experimental ratio test of the R1 relation on a (u, v) grid.
    R1 {
        /// eps1,eps2,eps3 with zero sum.
        #[arg(long, value_parser = values::complex3, allow_hyphen_values = true)]
        eps: [Complex64; 3],
        /// Grid point "u;v"; repeat for more points. Default: a built-in 6-point grid.
        #[arg(long = "point", value_parser = values::uv_pair, allow_hyphen_values = true)]
        points: Vec<(Complex64, Complex64)>,
    },
}

/// Settings from a config file, overridden by flags.
struct Base {
    quadrature: QuadratureConfig,
    seed: u64,
    format: Format,
    output: Option<PathBuf>,
}

impl Global {
    fn base_from(&self, cfg: &config::RunConfig) -> Base {
        Base {
            quadrature: cfg.quadrature.clone(),
            seed: self.seed.unwrap_or(cfg.seed),
            format: self.format.or(cfg.format).unwrap_or(Format::Text),
            output: self.output.clone().or_else(|| cfg.output.clone()),
        }
    }

    fn base(&self) -> Result<Base> {
        let cfg = match &self.config {
            Some(p) => config::load(p)?,
            None => config::RunConfig::default(),
        };
        Ok(self.base_from(&cfg))
    }

    fn schedule(&self) -> Result<Option<RegularizationSchedule>> {
        let Some(e) = &self.eps_schedule else { return Ok(None) };
        let s = RegularizationSchedule {
            epsilons: e.clone(),
            extrapolation_order: self.order.unwrap_or(e.len().saturating_sub(2).max(1)),
        };
        s.validate()?;
        Ok(Some(s))
    }

    fn options(&self, base: &Base) -> Result<CheckOptions> {
        Ok(CheckOptions {
            quadrature: base.quadrature.clone(),
            tolerance: self.tol,
            schedule: self.schedule()?,
            seed: self.seed.or(self.config.as_ref().map(|_| base.seed)),
        })
    }
}

#[derive(Serialize)]
struct EvalOut {
    quantity: String,
    params: BTreeMap<String, String>,
    value: ReIm,
    #[serde(skip_serializing_if = "Option::is_none")]
    error_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
    diagnostics: Vec<String>,
}

impl EvalOut {
    fn new(quantity: &str, value: Complex64) -> Self {
        EvalOut {
            quantity: quantity.into(),
            params: BTreeMap::new(),
            value: value.into(),
            error_estimate: None,
            converged: None,
            diagnostics: Vec::new(),
        }
    }

    fn param(mut self, k: &str, v: impl ToString) -> Self {
        self.params.insert(k.into(), v.to_string());
        self
    }

    fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(self)? + "\n",
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["quantity", "params_hash", "re", "im", "error_estimate", "converged"])?;
                w.write_record([
                    self.quantity.clone(),
                    output::params_hash(&self.params),
                    self.value.re.to_string(),
                    self.value.im.to_string(),
                    self.error_estimate.map(|e| e.to_string()).unwrap_or_default(),
                    self.converged.map(|c| c.to_string()).unwrap_or_default(),
                ])?;
                String::from_utf8(w.into_inner()?)?
            }
            Format::Text => {
                let mut s = format!("{} = {}", self.quantity, fmt_c(self.value.into()));
                let args: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                s += &format!("\n    at {}", args.join(" "));
                if let Some(e) = self.error_estimate {
                    s += &format!("\n    error estimate {e:.3e}, converged {}", self.converged.unwrap_or(true));
                }
                for d in &self.diagnostics {
                    s += &format!("\n    | {d}");
                }
                s + "\n"
            }
        })
    }
}

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{} {} {}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs())
    }
}

fn eval(cmd: &Eval, g: &Global, base: &Base) -> Result<EvalOut> {
    match cmd {
        Eval::D { spec, a, b } => {
            let s = spec.spec()?;
            let p = triangle::build_d(&s)?;
            let (z2, z3) = (var("z2"), var("z3"));
            let value = p.eval(&|v| {
                if *v == z2 {
                    Some(*a)
                } else if *v == z3 {
                    Some(*b)
                } else {
                    None
                }
            })?;
            let mut o = EvalOut::new("D", value)
                .param("alpha", fmt_alpha(spec))
                .param("d", spec.d)
                .param("a", compact(*a))
                .param("b", compact(*b));
            o.diagnostics.push(format!("D^(z2,z3) = {p}"));
            Ok(o)
        }
        Eval::J { spec, xy } => {
            let s = spec.spec()?;
            let mono = monomial_values([("x", xy.x), ("y", xy.y)]);
            if !(xy.x > 0.0 && xy.y > 0.0) {
                bail!(TriangleError::Domain(format!("x = {}, y = {} must be positive", xy.x, xy.y)));
            }
            let mut diag = Vec::new();
            let r = match triangle::build_j(&s) {
                Ok(m) => {
                    diag.push(format!("contour {:?}", m.contour().unwrap_or_default()));
                    mb_engine::evaluate(&m, &mono, &base.quadrature)?
                }
                Err(TriangleError::Algebra(AlgebraError::Infeasible { .. })) => {
                    // pinched contour: open it and extrapolate
                    let sched = g.schedule()?.unwrap_or_else(star_schedule);
                    diag.push(format!(
                        "pinched contour, eps schedule {:?} order {}",
                        sched.epsilons, sched.extrapolation_order
                    ));
                    mb_engine::evaluate_pinched(&triangle::build_j_symbolic(&s), &mono, &base.quadrature, &sched)?
                }
                Err(e) => return Err(e.into()),
            };
            let mut o = EvalOut::new("J", r.value)
                .param("alpha", fmt_alpha(spec))
                .param("d", spec.d)
                .param("x", xy.x)
                .param("y", xy.y);
            o.error_estimate = Some(r.error_estimate);
            o.converged = Some(r.converged);
            diag.push(format!("nodes {} refinements {}", r.nodes_used, r.refinements));
            o.diagnostics = diag;
            Ok(o)
        }
        Eval::Phi { n, xy } => {
            let p = UdPoint::new(*n, xy.x, xy.y)?;
            let v = triangle::ud_phi(&p)?;
            Ok(EvalOut::new("phi", Complex64::new(v, 0.0)).param("n", n).param("x", xy.x).param("y", xy.y))
        }
        Eval::FClosed { spec, u, v, eps } => {
            let s = spec.spec()?;
            let value = triangle::f_closed(&s, *u, *v, *eps)?;
            Ok(EvalOut::new("f_closed", value)
                .param("alpha", fmt_alpha(spec))
                .param("d", spec.d)
                .param("u", compact(*u))
                .param("v", compact(*v))
                .param("eps", eps))
        }
    }
}

fn compact(z: Complex64) -> String {
    fmt_c(z).replace(' ', "")
}

fn fmt_alpha(s: &SpecArgs) -> String {
    s.alpha.iter().map(|z| compact(*z)).collect::<Vec<_>>().join(",")
}

fn check_unit(cmd: &Check) -> Result<Unit> {
    Ok(match cmd {
        Check::Barnes1 { lambda } => Unit::Barnes1(*lambda),
        Check::StarTriangle { spec, xy } => Unit::Star(spec.spec()?, vec![(xy.x, xy.y)]),
        Check::Fourier { xy } => Unit::Fourier(vec![(xy.x, xy.y)]),
        Check::Orthogonality { spec, xy } => Unit::Orthogonality(spec.spec()?, vec![(xy.x, xy.y)]),
        Check::R2 { spec, u, v, eps } => Unit::R2(spec.spec()?, *u, *v, *eps),
        Check::R1 { eps, points } => {
            let grid = if points.is_empty() { mbtri_core::verify::R1_GRID.to_vec() } else { points.clone() };
            Unit::R1(*eps, grid)
        }
    })
}

fn sweep_units(cfg: &config::RunConfig, g: &Global, base: &Base) -> Result<Vec<(Unit, CheckOptions)>> {
    let base_seed = base.seed;
    let sched = g.schedule()?;
    let mut out = Vec::new();
    for (i, b) in cfg.checks.iter().enumerate() {
        let seed = b.seed.unwrap_or(base_seed.wrapping_add(i as u64));
        if let Some(s) = &b.schedule {
            s.validate().with_context(|| format!("check block {}", i + 1))?;
        }
        let opts = CheckOptions {
            quadrature: cfg.quadrature.clone(),
            tolerance: b.tolerance.or(g.tol),
            schedule: b.schedule.clone().or_else(|| sched.clone()),
            seed: Some(seed),
        };
        for u in b.units(seed).with_context(|| format!("check block {} ({:?})", i + 1, b.identity))? {
            out.push((u, opts.clone()));
        }
    }
    Ok(out)
}

fn emit(base: &Base, text: &str) -> Result<()> {
    match &base.output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut o = std::io::stdout().lock();
            o.write_all(text.as_bytes())?;
            Ok(o.flush()?)
        }
    }
}

fn finish(g: &Global, base: &Base, outcomes: Vec<Outcome>, detail: bool) -> Result<u8> {
    let outcomes: Vec<Outcome> =
        if g.no_timing { outcomes.into_iter().map(Outcome::without_timing).collect() } else { outcomes };
    emit(base, &output::render(&outcomes, base.format, detail)?)?;
    let s = Summary::of(&outcomes);
    Ok(if s.any_failed() { 1 } else { 0 })
}

fn real_main(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    match &cli.command {
        Command::Eval(e) => {
            let base = g.base()?;
            let o = eval(e, g, &base)?;
            emit(&base, &o.render(base.format)?)?;
            Ok(0)
        }
        Command::Check(c) => {
            let base = g.base()?;
            let opts = g.options(&base)?;
            let unit = check_unit(c)?;
            let outcomes = run::run_all(&[(unit, opts)], g.jobs as usize)?;
            if let [Outcome::Skipped { reason, .. }] = outcomes.as_slice() {
                bail!("{reason}");
            }
            finish(g, &base, outcomes, true)
        }
        Command::Sweep { config } => {
            let cfg = config::load(config)?;
            if cfg.checks.is_empty() {
                bail!("no checks declared in {}", config.display());
            }
            let base = g.base_from(&cfg);
            let units = sweep_units(&cfg, g, &base)?;
            let outcomes = run::run_all(&units, g.jobs as usize)?;
            finish(g, &base, outcomes, false)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
