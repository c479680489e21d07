//! Identity checks. Each returns a [`CheckReport`] with both sides, the errors and
//! the verdict; preconditions that do not hold are errors, not failed reports.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gamma_algebra::{
    apply_barnes_first, as_nonpositive_integer, exact_from_c64, exact_real, format_exact, int, take_residues, to_c64,
    var, AffineExponent, AlgebraError, GammaFactor, GammaProduct, MBIntegral,
};
use crate::mb_engine::{
    evaluate, evaluate_many, evaluate_pinched_many, monomial_values, EngineError, EvalResult, MonomialValues,
    QuadratureConfig, RegularizationSchedule,
};
use crate::triangle::{self, R1Eps, TriangleError, TriangleSpec, UdPoint};

pub const BARNES_TOL: f64 = 1e-8;
pub const STAR_TOL: f64 = 1e-6;
pub const FOURIER_TOL: f64 = 1e-6;
pub const ORTHOGONALITY_TOL: f64 = 1e-3;
pub const R2_TOL: f64 = 1e-5;
pub const R1_TOL: f64 = 1e-4;
/// Agreement required between the residue value and the extrapolated quadrature.
pub const DOUBLE_ENTRY_TOL: f64 = 1e-4;

/// Default (u, v) grid for the loop-reduction ratio.
pub const R1_GRID: [(Complex64, Complex64); 6] = [
    (Complex64::new(-0.3, 0.0), Complex64::new(-0.4, 0.0)),
    (Complex64::new(-0.35, 0.0), Complex64::new(-0.25, 0.0)),
    (Complex64::new(-0.3, 0.2), Complex64::new(-0.4, -0.1)),
    (Complex64::new(-0.45, 0.0), Complex64::new(-0.3, 0.0)),
    (Complex64::new(-0.2, 0.0), Complex64::new(-0.5, 0.0)),
    (Complex64::new(-0.3, -0.3), Complex64::new(-0.3, 0.1)),
];

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("uniqueness violated: {0}")]
    UniquenessViolated(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("RHS bracket vanishes at u = {u}, v = {v}")]
    DegenerateBracket { u: Complex64, v: Complex64 },
    #[error(transparent)]
    Triangle(#[from] TriangleError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl VerifyError {
    /// True for contour-feasibility failures, wherever they were raised.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            VerifyError::Algebra(AlgebraError::Infeasible { .. })
                | VerifyError::Triangle(TriangleError::Algebra(AlgebraError::Infeasible { .. }))
                | VerifyError::Engine(EngineError::Algebra(AlgebraError::Infeasible { .. }))
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReIm {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ReIm {
    fn from(z: Complex64) -> Self {
        ReIm { re: z.re, im: z.im }
    }
}

impl From<ReIm> for Complex64 {
    fn from(z: ReIm) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub identity: String,
    pub params: BTreeMap<String, String>,
    pub lhs: ReIm,
    pub rhs: ReIm,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Every engine call converged (and extrapolations did not diverge).
    pub converged: bool,
    /// Outcome of the residue path, when the identity has one.
    pub symbolic: Option<bool>,
    /// Non-gating check whose outcome is recorded only.
    pub experimental: bool,
    pub seed: Option<u64>,
    /// Seconds; None when timing is suppressed.
    pub wall_time: Option<f64>,
    pub diagnostics: Vec<String>,
}

impl CheckReport {
    pub fn without_timing(mut self) -> Self {
        self.wall_time = None;
        self
    }
}

/// Knobs shared by all checks; `None` picks the per-check default.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckOptions {
    pub quadrature: QuadratureConfig,
    pub tolerance: Option<f64>,
    pub schedule: Option<RegularizationSchedule>,
    pub seed: Option<u64>,
}

/// ε = 0.1 · 2⁻ᵏ, k = 0..6, with quintic extrapolation.
pub fn star_schedule() -> RegularizationSchedule {
    RegularizationSchedule::halving(0.1, 7, 5)
}

/// ε = 0.1 · 2⁻ᵏ, k = 0..4, with cubic extrapolation.
pub fn orthogonality_schedule() -> RegularizationSchedule {
    RegularizationSchedule::halving(0.1, 5, 3)
}

struct Draft {
    identity: &'static str,
    params: BTreeMap<String, String>,
    diagnostics: Vec<String>,
    start: Instant,
    seed: Option<u64>,
}

impl Draft {
    fn new(identity: &'static str, opts: &CheckOptions) -> Self {
        Draft { identity, params: BTreeMap::new(), diagnostics: vec![], start: Instant::now(), seed: opts.seed }
    }

    fn param(&mut self, k: &str, v: impl ToString) -> &mut Self {
        self.params.insert(k.to_string(), v.to_string());
        self
    }

    fn note(&mut self, s: impl Into<String>) {
        self.diagnostics.push(s.into());
    }

    fn finish(self, lhs: Complex64, rhs: Complex64, tol: f64, converged: bool, symbolic: Option<bool>) -> CheckReport {
        let abs_err = (lhs - rhs).norm();
        let rel_err = abs_err / rhs.norm();
        let within = if rhs.norm() < 1e-10 { abs_err <= tol } else { rel_err <= tol };
        CheckReport {
            identity: self.identity.to_string(),
            params: self.params,
            lhs: lhs.into(),
            rhs: rhs.into(),
            abs_err,
            rel_err,
            tolerance: tol,
            passed: within && converged && symbolic != Some(false),
            converged,
            symbolic,
            experimental: false,
            seed: self.seed,
            wall_time: Some(self.start.elapsed().as_secs_f64()),
            diagnostics: self.diagnostics,
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
    s.nu.iter().map(format_exact).collect::<Vec<_>>().join(",")
}

fn fmt_contour(m: &MBIntegral) -> String {
    let c = m.contour().unwrap_or(&[]);
    m.vars().iter().zip(c).map(|(v, c)| format!("{v}={c:.6}")).collect::<Vec<_>>().join(", ")
}

fn xy(x: f64, y: f64) -> MonomialValues {
    monomial_values([("x", x), ("y", y)])
}

fn check_xy(x: f64, y: f64) -> Result<(), VerifyError> {
    if x.is_finite() && y.is_finite() && x > 0.0 && y > 0.0 {
        Ok(())
    } else {
        Err(VerifyError::Precondition(format!("x = {x}, y = {y} must be positive")))
    }
}

/// Value of a 0-fold integral at the given monomial bases.
fn closed_value(m: &MBIntegral, bases: &MonomialValues) -> Result<Complex64, VerifyError> {
    let p = m.integrand().value().map_err(|e| VerifyError::Precondition(e.to_string()))?;
    let l =
        m.monomial_log(bases, &|_| None).ok_or_else(|| VerifyError::Precondition("monomial base missing".into()))?;
    Ok(p * l.exp())
}

fn engine_notes(d: &mut Draft, r: &EvalResult) {
    d.note(format!("nodes {} refinements {} error estimate {:.3e}", r.nodes_used, r.refinements, r.error_estimate));
    if let Some(x) = &r.extrapolation {
        let eps: Vec<String> = x.samples.iter().map(|s| format!("{}", s.eps)).collect();
        d.note(format!("eps schedule [{}], order {}", eps.join(", "), x.order));
        for s in &x.samples {
            d.note(format!("  eps {:<10} value {} (converged {})", s.eps, fmt_c(s.value), s.converged));
        }
        let w: Vec<String> = x.windows.iter().map(|z| fmt_c(*z)).collect();
        d.note(format!(
            "extrapolants [{}], spread {:.3e}, amplification {:.2}",
            w.join(", "),
            x.spread,
            x.amplification
        ));
    }
}

/// ∮ Γ(λ₁+z)Γ(λ₂+z)Γ(λ₃−z)Γ(λ₄−z) dz/(2πi) = Γ(λ₁+λ₃)Γ(λ₁+λ₄)Γ(λ₂+λ₃)Γ(λ₂+λ₄)/Γ(Σλ).
pub fn check_barnes1(lambda: [Complex64; 4], opts: &CheckOptions) -> Result<CheckReport, VerifyError> {
    let mut d = Draft::new("barnes1", opts);
    for (i, l) in lambda.iter().enumerate() {
        d.param(&format!("lambda{}", i + 1), fmt_c(*l));
    }
    let z = AffineExponent::var("z");
    let mut fs = Vec::new();
    for (i, l) in lambda.iter().enumerate() {
        let c = exact_from_c64(*l)?;
        let arg = if i < 2 { z.plus_const(&c) } else { (-&z).plus_const(&c) };
        fs.push(GammaFactor::new(arg, 1));
    }
    let m = MBIntegral::new(GammaProduct::new(crate::gamma_algebra::exact_one(), fs), [], vec![var("z")])?
        .with_feasible_contour()?;
    let closed = apply_barnes_first(&m, &var("z"))?;
    let rhs = closed.value().map_err(|e| VerifyError::Precondition(e.to_string()))?;
    let r = evaluate(&m, &monomial_values([]), &opts.quadrature)?;
    d.note(format!("contour {}", fmt_contour(&m)));
    d.note(format!("closed form {closed}"));
    engine_notes(&mut d, &r);
    Ok(d.finish(r.value, rhs, opts.tolerance.unwrap_or(BARNES_TOL), r.converged, None))
}

fn check_uniqueness(alpha: &TriangleSpec) -> Result<TriangleSpec, VerifyError> {
    let d = exact_real(alpha.d);
    let gap = to_c64(&(alpha.sum() - d)).norm();
    if gap > 1e-12 {
        return Err(VerifyError::UniquenessViolated(format!("sum(alpha) - d = {gap:.3e}")));
    }
    let mut a = alpha.clone();
    a.nu[2] = d - a.nu[0] - a.nu[1];
    let h = a.h();
    for (i, x) in a.nu.iter().enumerate() {
        if as_nonpositive_integer(&(h - x)).is_some() {
            return Err(VerifyError::UniquenessViolated(format!("alpha{} - d/2 is a non-negative integer", i + 1)));
        }
    }
    Ok(a)
}

/// Star-triangle relation at Σα = d. Symbolic: residues at z₂ = α₁ − h, z₃ = α₂ − h give the
/// RHS string exactly. Numeric: the pinch-regularized J, extrapolated to ε → 0, at each (x, y).
/// The numeric path needs 0 < Re αᵢ < h; otherwise the contour does not pinch.
pub fn check_star_triangle_points(
    alpha: &TriangleSpec,
    points: &[(f64, f64)],
    opts: &CheckOptions,
) -> Result<Vec<CheckReport>, VerifyError> {
    let start = Instant::now();
    let a = check_uniqueness(alpha)?;
    for &(x, y) in points {
        check_xy(x, y)?;
    }
    let h = crate::gamma_algebra::rational_to_f64(&(a.d / int(2)));
    for (i, x) in a.nu.iter().enumerate() {
        let re = to_c64(x).re;
        if !(re > 0.0 && re < h) {
            return Err(VerifyError::Precondition(format!("numeric path needs 0 < Re alpha{} < d/2, got {re}", i + 1)));
        }
    }
    let j = triangle::build_j_symbolic(&a);
    let rhs_m = triangle::star_triangle_rhs(&a);
    let residue = take_residues(&j, &triangle::star_triangle_residue_points(&a))?;
    let symbolic = residue == rhs_m;
    let sched = opts.schedule.clone().unwrap_or_else(star_schedule);
    let pts: Vec<_> = points.iter().map(|&(x, y)| xy(x, y)).collect();
    let rs = evaluate_pinched_many(&j, &pts, &opts.quadrature, &sched)?;
    let tol = opts.tolerance.unwrap_or(STAR_TOL);
    let mut out = Vec::new();
    for (&(x, y), r) in points.iter().zip(&rs) {
        let mut d = Draft::new("star_triangle", opts);
        d.start = start;
        d.param("alpha", fmt_spec(&a)).param("d", a.d).param("x", x).param("y", y);
        d.note(format!("residue result {residue}"));
        d.note(format!("RHS {rhs_m}"));
        let rhs = closed_value(&rhs_m, &xy(x, y))?;
        let residue_value = closed_value(&residue, &xy(x, y))?;
        let agree = (residue_value - r.value).norm() / rhs.norm();
        d.note(format!("residue vs quadrature {agree:.3e} (limit {DOUBLE_ENTRY_TOL:.0e})"));
        engine_notes(&mut d, r);
        let ok = symbolic && agree <= DOUBLE_ENTRY_TOL;
        out.push(d.finish(r.value, rhs, tol, r.converged, Some(ok)));
    }
    Ok(out)
}

pub fn check_star_triangle(
    alpha: &TriangleSpec,
    x: f64,
    y: f64,
    opts: &CheckOptions,
) -> Result<CheckReport, VerifyError> {
    Ok(check_star_triangle_points(alpha, &[(x, y)], opts)?.remove(0))
}

/// J(1,1,1; d = 4)(x, y) against Φ⁽¹⁾(x, y).
pub fn check_fourier_phi1_points(points: &[(f64, f64)], opts: &CheckOptions) -> Result<Vec<CheckReport>, VerifyError> {
    let start = Instant::now();
    let mut phis = Vec::new();
    for &(x, y) in points {
        phis.push(triangle::ud_phi(&UdPoint::new(1, x, y)?)?);
    }
    let j = triangle::build_j(&TriangleSpec::from_f64([1.0, 1.0, 1.0], 4.0)?)?;
    let pts: Vec<_> = points.iter().map(|&(x, y)| xy(x, y)).collect();
    let rs = evaluate_many(&j, &pts, &opts.quadrature)?;
    let tol = opts.tolerance.unwrap_or(FOURIER_TOL);
    Ok(points
        .iter()
        .zip(rs)
        .zip(phis)
        .map(|((&(x, y), r), phi)| {
            let mut d = Draft::new("fourier_phi1", opts);
            d.start = start;
            d.param("x", x).param("y", y);
            d.note(format!("contour {}", fmt_contour(&j)));
            engine_notes(&mut d, &r);
            d.finish(r.value, Complex64::new(phi, 0.0), tol, r.converged, None)
        })
        .collect())
}

pub fn check_fourier_phi1(x: f64, y: f64, opts: &CheckOptions) -> Result<CheckReport, VerifyError> {
    Ok(check_fourier_phi1_points(&[(x, y)], opts)?.remove(0))
}

/// ∮∮ xᵘ yᵛ f(u,v) = x^{−α₁} y^{−α₂}: residues at (−α₁, −α₂) and the ε → 0 limit of the
/// regularized double integral.
pub fn check_orthogonality_points(
    alpha: &TriangleSpec,
    points: &[(f64, f64)],
    opts: &CheckOptions,
) -> Result<Vec<CheckReport>, VerifyError> {
    let start = Instant::now();
    for &(x, y) in points {
        check_xy(x, y)?;
    }
    let m = triangle::orthogonality_integral(alpha);
    let rhs_m = triangle::orthogonality_rhs(alpha);
    let residue = take_residues(&m, &triangle::orthogonality_residue_points(alpha))?;
    let symbolic = residue == rhs_m;
    let sched = opts.schedule.clone().unwrap_or_else(orthogonality_schedule);
    let pts: Vec<_> = points.iter().map(|&(x, y)| xy(x, y)).collect();
    let rs = evaluate_pinched_many(&m, &pts, &opts.quadrature, &sched)?;
    let tol = opts.tolerance.unwrap_or(ORTHOGONALITY_TOL);
    let mut out = Vec::new();
    for (&(x, y), r) in points.iter().zip(&rs) {
        let mut d = Draft::new("orthogonality", opts);
        d.start = start;
        d.param("alpha", fmt_spec(alpha)).param("d", alpha.d).param("x", x).param("y", y);
        d.note(format!("residue result {residue}"));
        let rhs = closed_value(&rhs_m, &xy(x, y))?;
        let residue_value = closed_value(&residue, &xy(x, y))?;
        let agree = (residue_value - r.value).norm() / rhs.norm();
        d.note(format!("residue vs quadrature {agree:.3e} (limit {DOUBLE_ENTRY_TOL:.0e})"));
        engine_notes(&mut d, r);
        let ok = symbolic && agree <= DOUBLE_ENTRY_TOL;
        out.push(d.finish(r.value, rhs, tol, r.converged, Some(ok)));
    }
    Ok(out)
}

pub fn check_orthogonality(
    alpha: &TriangleSpec,
    x: f64,
    y: f64,
    opts: &CheckOptions,
) -> Result<CheckReport, VerifyError> {
    Ok(check_orthogonality_points(alpha, &[(x, y)], opts)?.remove(0))
}

/// The ε-regularized f(u,v) double integral against f_closed at the same ε.
pub fn check_r2_pointwise(
    alpha: &TriangleSpec,
    u: Complex64,
    v: Complex64,
    eps: f64,
    opts: &CheckOptions,
) -> Result<CheckReport, VerifyError> {
    let mut d = Draft::new("r2_pointwise", opts);
    d.param("alpha", fmt_spec(alpha)).param("d", alpha.d).param("u", fmt_c(u)).param("v", fmt_c(v)).param("eps", eps);
    let rhs = triangle::f_closed(alpha, u, v, eps)?;
    let m = triangle::build_f_integral_regularized(alpha, u, v, eps)?;
    let r = evaluate(&m, &monomial_values([]), &opts.quadrature)?;
    d.note(format!("contour {}", fmt_contour(&m)));
    engine_notes(&mut d, &r);
    Ok(d.finish(r.value, rhs, opts.tolerance.unwrap_or(R2_TOL), r.converged, None))
}

/// r(u,v) = LHS / bracket on a grid; passes when its coefficient of variation is below
/// tolerance. `lhs` and `rhs` of the report both hold the fitted factor mean(r), and
/// `rel_err` the coefficient of variation.
pub fn check_r1_ratio(
    eps: [Complex64; 3],
    grid: &[(Complex64, Complex64)],
    opts: &CheckOptions,
) -> Result<CheckReport, VerifyError> {
    let mut d = Draft::new("r1_ratio", opts);
    d.param("eps", eps.iter().map(|e| fmt_c(*e)).collect::<Vec<_>>().join(","));
    d.param("grid", grid.iter().map(|(u, v)| format!("({};{})", fmt_c(*u), fmt_c(*v))).collect::<Vec<_>>().join(" "));
    let e = R1Eps::new(eps)?;
    if grid.len() < 2 {
        return Err(VerifyError::Precondition("the grid needs at least two points".into()));
    }
    d.note("EXPERIMENTAL: the one-index D^(a,b)[nu] is read as D^(a,b)[1,1,nu], d = 4");
    let mut ratios = Vec::new();
    let mut converged = true;
    for &(u, v) in grid {
        let b = triangle::r1_bracket(&e, u, v)?;
        let m = triangle::build_r1_lhs(&e, u, v)?;
        let r = evaluate(&m, &monomial_values([]), &opts.quadrature)?;
        if b.norm() < 1e-12 * r.value.norm().max(1.0) {
            return Err(VerifyError::DegenerateBracket { u, v });
        }
        converged &= r.converged;
        let q = r.value / b;
        d.note(format!(
            "u={} v={}: lhs {} bracket {} ratio {} (contour {})",
            fmt_c(u),
            fmt_c(v),
            fmt_c(r.value),
            fmt_c(b),
            fmt_c(q),
            fmt_contour(&m)
        ));
        ratios.push(q);
    }
    let n = ratios.len() as f64;
    let mean = ratios.iter().sum::<Complex64>() / n;
    let sd = (ratios.iter().map(|q| (q - mean).norm_sqr()).sum::<f64>() / (n - 1.0)).sqrt();
    let cv = sd / mean.norm();
    d.note(format!("fitted factor {} coefficient of variation {cv:.3e}", fmt_c(mean)));
    let tol = opts.tolerance.unwrap_or(R1_TOL);
    let mut rep = d.finish(mean, mean, tol, converged, None);
    rep.abs_err = sd;
    rep.rel_err = cv;
    rep.passed = cv <= tol && converged;
    rep.experimental = true;
    Ok(rep)
}

/// Seeded parameter draws for sweeps. Values are rounded to three decimals so that
/// they have short exact rational forms.
pub mod sample {
    use super::*;
    use rand::SeedableRng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn r3(x: f64) -> f64 {
        (x * 1000.0).round() / 1000.0
    }

    fn c3(re: f64, im: f64) -> Complex64 {
        Complex64::new(r3(re), r3(im))
    }

    /// λ with 0.1 ≤ Re λᵢ ≤ 1.3 and |Im λᵢ| ≤ 0.5; always separable.
    pub fn barnes_lambdas(rng: &mut ChaCha8Rng) -> [Complex64; 4] {
        std::array::from_fn(|_| c3(rng.gen_range(0.1..1.3), rng.gen_range(-0.5..0.5)))
    }

    /// α with Σα = d, d ∈ {3, 3.5, ..., 6}, every αᵢ in (0.1 h, 0.9 h).
    pub fn uniqueness_alpha(rng: &mut ChaCha8Rng) -> TriangleSpec {
        loop {
            let d = 3.0 + 0.5 * rng.gen_range(0..=6) as f64;
            let h = d / 2.0;
            let a1 = r3(rng.gen_range(0.1 * h..0.9 * h));
            let a2 = r3(rng.gen_range(0.1 * h..0.9 * h));
            let a3 = d - a1 - a2;
            if a3 > 0.1 * h && a3 < 0.9 * h {
                let mut s = TriangleSpec::from_f64([a1, a2, 0.0], d).expect("finite");
                s.nu[2] = exact_real(s.d) - s.nu[0] - s.nu[1];
                return s;
            }
        }
    }

    /// (x, y) with Λ² > 0 and x + y < 1, log-uniform in each coordinate.
    pub fn ladder_point(rng: &mut ChaCha8Rng) -> (f64, f64) {
        loop {
            let x = r3(10f64.powf(rng.gen_range(-2.0..-0.3)));
            let y = r3(10f64.powf(rng.gen_range(-2.0..-0.3)));
            if UdPoint::new(1, x, y).is_ok() && triangle::lambda_sq(x, y) > 1e-3 {
                return (x, y);
            }
        }
    }

    /// Monomial point with x, y in [0.2, 2].
    pub fn xy_point(rng: &mut ChaCha8Rng) -> (f64, f64) {
        (r3(rng.gen_range(0.2..2.0)), r3(rng.gen_range(0.2..2.0)))
    }

    /// α in (0.2, 1.5)³ with d = 4.
    pub fn orthogonality_alpha(rng: &mut ChaCha8Rng) -> TriangleSpec {
        let a: [f64; 3] = std::array::from_fn(|_| r3(rng.gen_range(0.2..1.5)));
        TriangleSpec::from_f64(a, 4.0).expect("finite")
    }

    /// (α, u, v, ε) inside the feasible window Re u < −α₁, Re v < −α₂,
    /// Re(u + v) > −α₁ − α₂ − ε of the regularized f integral.
    pub fn r2_config(rng: &mut ChaCha8Rng) -> (TriangleSpec, Complex64, Complex64, f64) {
        let a: [f64; 3] = std::array::from_fn(|_| r3(rng.gen_range(0.3..0.9)));
        let eps = r3(rng.gen_range(0.1..0.4));
        let du = rng.gen_range(0.15..0.4) * eps;
        let dv = rng.gen_range(0.15..0.4) * eps;
        let u = c3(-a[0] - du, rng.gen_range(-0.5..0.5));
        let v = c3(-a[1] - dv, rng.gen_range(-0.5..0.5));
        (TriangleSpec::from_f64(a, 4.0).expect("finite"), u, v, eps)
    }

    /// ε₁, ε₂ with |εᵢ| in [0.05, 0.2] and ε₃ = −ε₁ − ε₂ kept away from zero.
    pub fn r1_eps(rng: &mut ChaCha8Rng) -> [Complex64; 3] {
        loop {
            let e1 = r3(rng.gen_range(0.05..0.2));
            let e2 = r3(rng.gen_range(0.05..0.2)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let e3 = -(e1 + e2);
            if e3.abs() > 0.03 {
                return [e1, e2, r3(e3)].map(|x| Complex64::new(x, 0.0));
            }
        }
    }
}
