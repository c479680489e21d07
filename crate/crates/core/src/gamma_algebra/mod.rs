//! Symbolic Gamma products with affine arguments: canonical form, pole families,
//! contour feasibility, the first Barnes lemma and residue extraction.

mod affine;
mod exact;
mod integral;
mod product;
mod rewrite;
mod text;

pub use affine::{AffineExponent, VarId};
pub use exact::{
    as_nonpositive_integer, as_positive_integer, exact, exact_from_c64, exact_one, exact_real, exact_zero, factorial,
    format_exact, int, parse_rational, rat, rational_from_f64, rational_to_f64, to_c64, ExactComplex, Rational,
};
pub use integral::{
    feasible_contour, feasible_contour_with_margin, max_slack_point, MBIntegral, SlackSolution, CONTOUR_MARGIN,
};
pub use product::{canonical_monomials, multiply, substitute, EvalError, GammaFactor, GammaProduct, MonomialFactor};
pub use rewrite::{apply_barnes_first, barnes_reduce, poles_in, take_residues, PoleFamilies, PoleFamily};
pub use text::{
    parse_affine, parse_affine_with, parse_constant, parse_integral, parse_integral_with, parse_product,
    parse_product_with, ParseOptions,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("coefficient {coefficient} of {var} is not +-1")]
    GeneralCoefficient { var: String, coefficient: i64 },
    #[error("variable {var} has coefficient {coefficient}; pole families need +-1")]
    MixedCoefficient { var: String, coefficient: i64 },
    #[error("no contour separates the poles (max slack {max_slack:.3e}); tight constraints: {}", active.join(", "))]
    Infeasible { max_slack: f64, active: Vec<String> },
    #[error("invalid contour: {0}")]
    ContourInvalid(String),
    #[error("pattern mismatch: {0}")]
    PatternMismatch(String),
    #[error("not a simple pole: {0}")]
    NotASimplePole(String),
    #[error("pole collision: {0}")]
    MultiplePoleCollision(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("duplicate integration variable {0}")]
    DuplicateVariable(String),
}

/// Shorthand for a variable.
pub fn var(name: &str) -> VarId {
    VarId::from(name)
}
