//! Mellin-Barnes integrals of Gamma products for the one-loop massless triangle.
//!
//! * [`special_functions`]: ln Γ, Γ and Li_n on the complex plane.
//! * [`gamma_algebra`]: exact symbolic Gamma products and MB integrals.
//! * [`mb_engine`]: quadrature along vertical contours, with pinch extrapolation.
//! * [`triangle`]: the triangle kernel D, J, the ladder functions Φ⁽ⁿ⁾ and related objects.
//! * [`verify`]: identity checks returning [`verify::CheckReport`].

pub mod gamma_algebra;
pub mod mb_engine;
pub mod special_functions;
pub mod triangle;
pub mod verify;

pub use gamma_algebra::{
    AffineExponent, ExactComplex, GammaFactor, GammaProduct, MBIntegral, MonomialFactor, Rational, VarId,
};
pub use special_functions::ComplexValue;
