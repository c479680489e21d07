//! Numerical evaluation of 1- and 2-fold MB integrals along vertical contours.
//!
//! Each fold is parametrized as z = c + i t. The integrand is evaluated as a sum of
//! ln Γ terms, the t-range is cut where the integrand has dropped `truncation_slack`
//! decades below its peak, and the remaining segment is covered by Gauss-Legendre
//! panels that are graded geometrically toward nearby poles. Refinement raises the
//! Gauss order so that the node count of the tensor grid doubles per level.
//!
//! Integrals whose contour is pinched between two poles, with a compensating 1/Γ(0),
//! are handled by [`evaluate_pinched`]: the pinch is opened by ε and the result is
//! extrapolated to ε = 0.

mod extrapolate;
mod gauss;
mod quad;

pub use extrapolate::{amplification, neville_at_zero, window_extrapolants};
pub use gauss::GaussLegendre;
pub use quad::monomial_values;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::gamma_algebra::{
    as_nonpositive_integer, exact_real, max_slack_point, rational_from_f64, AffineExponent, AlgebraError, GammaFactor,
    GammaProduct, MBIntegral,
};
use crate::special_functions::SpecialError;

/// Values of the monomial bases (x, y, ...) at one evaluation point.
pub type MonomialValues = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid quadrature settings: {0}")]
    InvalidConfig(String),
    #[error("contour invalid: {0}")]
    ContourInvalid(String),
    #[error("{0}-fold integrals are not supported (at most 2)")]
    TooManyFolds(usize),
    #[error("variable {0} is neither integrated nor bound")]
    Unbound(String),
    #[error("missing or invalid monomial base {0}")]
    MissingMonomial(String),
    #[error("integrand does not decay along the contour: {0}")]
    NonDecaying(String),
    #[error("no pinch detected: {0}")]
    NoPinchDetected(String),
    #[error("extrapolation diverged: spread {spread:.3e} at value {value}")]
    ExtrapolationDiverged { spread: f64, value: Complex64 },
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub target_rel_tol: f64,
    /// Nodes per fold on the uniform part of the first level; graded panels near poles come on top.
    pub initial_nodes_per_fold: usize,
    pub max_refinements: usize,
    /// Decades below the peak magnitude at which the tails are cut.
    pub truncation_slack: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            target_rel_tol: 1e-10,
            initial_nodes_per_fold: 64,
            max_refinements: 6,
            truncation_slack: 16.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |m: String| Err(EngineError::InvalidConfig(m));
        if !(self.target_rel_tol >= 1e-12 && self.target_rel_tol < 1.0) {
            return bad(format!("target_rel_tol = {} must lie in [1e-12, 1)", self.target_rel_tol));
        }
        if self.initial_nodes_per_fold < 16 {
            return bad(format!("initial_nodes_per_fold = {} must be >= 16", self.initial_nodes_per_fold));
        }
        if !(2..=12).contains(&self.max_refinements) {
            return bad(format!("max_refinements = {} must lie in 2..=12", self.max_refinements));
        }
        if !(self.truncation_slack.is_finite() && self.truncation_slack >= 1.0) {
            return bad(format!("truncation_slack = {} must be >= 1", self.truncation_slack));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizationSchedule {
    pub epsilons: Vec<f64>,
    pub extrapolation_order: usize,
}

impl Default for RegularizationSchedule {
    fn default() -> Self {
        RegularizationSchedule { epsilons: vec![0.1, 0.05, 0.025, 0.0125], extrapolation_order: 2 }
    }
}

impl RegularizationSchedule {
    /// Halving schedule `start, start/2, ...` with `n` entries.
    pub fn halving(start: f64, n: usize, order: usize) -> Self {
        RegularizationSchedule {
            epsilons: (0..n).map(|k| start / f64::powi(2.0, k as i32)).collect(),
            extrapolation_order: order,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |m: String| Err(EngineError::InvalidConfig(m));
        let e = &self.epsilons;
        if e.len() < 3 {
            return bad(format!("need at least 3 epsilons, got {}", e.len()));
        }
        if e.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return bad("epsilons must be positive".into());
        }
        if e.windows(2).any(|w| w[1] > 0.7 * w[0]) {
            return bad("epsilons must decrease by a factor of at least 1/0.7 per step".into());
        }
        if self.extrapolation_order == 0 || self.extrapolation_order >= e.len() {
            return bad(format!("extrapolation_order {} needs 1 <= order < {}", self.extrapolation_order, e.len()));
        }
        Ok(())
    }
}

/// One row of the ε table of a pinched evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct PinchSample {
    pub eps: f64,
    pub value: Complex64,
    pub error_estimate: f64,
    pub converged: bool,
    pub contour: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Extrapolation {
    pub samples: Vec<PinchSample>,
    pub order: usize,
    /// Extrapolants over consecutive windows of order + 1 samples, largest ε first.
    pub windows: Vec<Complex64>,
    /// |last window − the one before| (or the lower-order extrapolant when there is one window).
    pub spread: f64,
    /// Σ|ℓⱼ(0)| of the final window.
    pub amplification: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub nodes_used: usize,
    /// Quadrature: the relative change stayed below tolerance on the last two refinements.
    /// Pinched: every underlying quadrature converged and the extrapolation did not diverge.
    pub converged: bool,
    pub refinements: usize,
    /// |I_k − I_{k−1}| per refinement step.
    pub error_history: Vec<f64>,
    pub extrapolation: Option<Extrapolation>,
}

/// Evaluates an integral with a valid contour, including 1/(2πi) per fold when normalized.
pub fn evaluate(m: &MBIntegral, monomials: &MonomialValues, cfg: &QuadratureConfig) -> Result<EvalResult, EngineError> {
    Ok(quad::evaluate_points(m, std::slice::from_ref(monomials), cfg)?.remove(0))
}

/// Same as [`evaluate`] at several monomial points, sharing the quadrature grid.
pub fn evaluate_many(
    m: &MBIntegral,
    points: &[MonomialValues],
    cfg: &QuadratureConfig,
) -> Result<Vec<EvalResult>, EngineError> {
    if points.is_empty() {
        return Ok(vec![]);
    }
    quad::evaluate_points(m, points, cfg)
}

/// The two Gamma factors responsible for a pinched contour.
#[derive(Clone, Debug, PartialEq)]
pub struct Pinch {
    /// Numerator argument L that is opened to L + ε.
    pub numerator: AffineExponent,
    /// Denominator Γ(0).
    pub denominator: AffineExponent,
}

/// Finds the pinching numerator factor and the compensating 1/Γ(0).
pub fn detect_pinch(m: &MBIntegral) -> Result<Pinch, EngineError> {
    let sol = max_slack_point(m)?;
    if sol.slack > 1e-9 {
        return Err(EngineError::NoPinchDetected(format!("the contour has slack {:.3e}", sol.slack)));
    }
    if sol.slack < -1e-9 {
        return Err(EngineError::NoPinchDetected(format!(
            "the pole families overlap by {:.3e}, not a pinch",
            -sol.slack
        )));
    }
    let denominator = m
        .integrand()
        .denominator()
        .find(|f| f.argument.is_constant() && as_nonpositive_integer(f.argument.constant_part()) == Some(0))
        .map(|f| f.argument.clone())
        .ok_or_else(|| EngineError::NoPinchDetected("no 1/Gamma(0) in the integrand".into()))?;
    let factors = m.integrand().factors();
    let numerator = sol
        .active
        .iter()
        .map(|&i| &factors[i].argument)
        .max_by_key(|a| (a.coefficients().len(), std::cmp::Reverse(*a)))
        .cloned()
        .ok_or_else(|| EngineError::NoPinchDetected("no active constraint".into()))?;
    Ok(Pinch { numerator, denominator })
}

/// The integral with Γ(L) → Γ(L + ε) and 1/Γ(0) → 1/Γ(ε), at its max-slack contour.
pub fn regularize_pinch(m: &MBIntegral, pinch: &Pinch, eps: f64) -> Result<MBIntegral, EngineError> {
    let e = exact_real(rational_from_f64(eps)?);
    let opened = pinch.numerator.plus_const(&e);
    let p = m
        .integrand()
        .replace_argument(&pinch.numerator, &opened)
        .ok_or_else(|| EngineError::NoPinchDetected(format!("Gamma({}) is not a factor", pinch.numerator)))?;
    let swap = GammaProduct::new(
        crate::gamma_algebra::exact_one(),
        [GammaFactor::new(pinch.denominator.clone(), 1), GammaFactor::new(AffineExponent::constant(e), -1)],
    );
    let r = m.clone().with_integrand(p.multiply(&swap));
    let sol = max_slack_point(&r)?;
    if sol.slack <= 0.0 {
        return Err(EngineError::Algebra(AlgebraError::Infeasible {
            max_slack: sol.slack,
            active: sol.active.iter().map(|&i| format!("Gamma({})", r.integrand().factors()[i].argument)).collect(),
        }));
    }
    Ok(r.with_contour(sol.point)?)
}

/// Limit ε → 0 of the pinch-regularized integral.
pub fn evaluate_pinched(
    m: &MBIntegral,
    monomials: &MonomialValues,
    cfg: &QuadratureConfig,
    sched: &RegularizationSchedule,
) -> Result<EvalResult, EngineError> {
    Ok(evaluate_pinched_many(m, std::slice::from_ref(monomials), cfg, sched)?.remove(0))
}

pub fn evaluate_pinched_many(
    m: &MBIntegral,
    points: &[MonomialValues],
    cfg: &QuadratureConfig,
    sched: &RegularizationSchedule,
) -> Result<Vec<EvalResult>, EngineError> {
    sched.validate()?;
    cfg.validate()?;
    let pinch = detect_pinch(m)?;
    let mut table: Vec<Vec<PinchSample>> = vec![Vec::new(); points.len()];
    let mut nodes = 0;
    for &eps in &sched.epsilons {
        let r = regularize_pinch(m, &pinch, eps)?;
        let res = evaluate_many(&r, points, cfg)?;
        let contour = r.contour().map(<[f64]>::to_vec).unwrap_or_default();
        // the grid is shared by all points
        nodes += res.first().map_or(0, |v| v.nodes_used);
        for (row, v) in table.iter_mut().zip(res) {
            row.push(PinchSample {
                eps,
                value: v.value,
                error_estimate: v.error_estimate,
                converged: v.converged,
                contour: contour.clone(),
            });
        }
    }
    table.into_iter().map(|samples| extrapolate(samples, sched.extrapolation_order, nodes)).collect()
}

fn extrapolate(samples: Vec<PinchSample>, order: usize, nodes: usize) -> Result<EvalResult, EngineError> {
    let xs: Vec<f64> = samples.iter().map(|s| s.eps).collect();
    let ys: Vec<Complex64> = samples.iter().map(|s| s.value).collect();
    let windows = window_extrapolants(&xs, &ys, order);
    let n = xs.len();
    let value = *windows.last().expect("schedule has more than order samples");
    let spread = if windows.len() >= 2 {
        (windows[windows.len() - 1] - windows[windows.len() - 2]).norm()
    } else {
        (value - neville_at_zero(&xs[n - order..], &ys[n - order..])).norm()
    };
    let amp = amplification(&xs[n - order - 1..]);
    let quad_err = samples.iter().map(|s| s.error_estimate).fold(0.0, f64::max);
    let noise = amp * quad_err;
    let spreads: Vec<f64> = windows.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let growing = spreads.len() >= 2 && {
        let (a, b) = (spreads[spreads.len() - 2], spreads[spreads.len() - 1]);
        b > a && b > 10.0 * noise
    };
    if !spread.is_finite() || spread > value.norm() || growing {
        return Err(EngineError::ExtrapolationDiverged { spread, value });
    }
    let converged = samples.iter().all(|s| s.converged);
    Ok(EvalResult {
        value,
        error_estimate: spread + noise,
        nodes_used: nodes,
        converged,
        refinements: 0,
        error_history: vec![],
        extrapolation: Some(Extrapolation { samples, order, windows, spread, amplification: amp }),
    })
}
