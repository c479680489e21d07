//! The triangle kernel D, the integral J, the ladder functions Φ⁽ⁿ⁾, the weight Δ,
//! the kernel f(u,v) and the two sides of the loop-reduction identity.
//!
//! Everything is dimensionless: only functions of x = p₁²/p₃², y = p₂²/p₃² are built.
//! Contour variables are `z2`, `z3` (and `u`, `v` for the f-kernel), monomial bases `x`, `y`.

use num_complex::Complex64;
use num_traits::Zero;
use thiserror::Error;

use crate::gamma_algebra::{
    as_nonpositive_integer, exact_from_c64, exact_one, exact_real, factorial, format_exact, int, rat,
    rational_from_f64, rational_to_f64, to_c64, var, AffineExponent, AlgebraError, EvalError, ExactComplex,
    GammaFactor, GammaProduct, MBIntegral, MonomialFactor, Rational, VarId,
};
use crate::special_functions::{polylog, SpecialError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TriangleError {
    #[error("construction pole: {0}")]
    ConstructionPole(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("imaginary part {0:.3e} did not cancel")]
    ImaginaryLeak(f64),
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

/// Indices (ν₁, ν₂, ν₃) and dimension d. Also used for (α₁, α₂, α₃).
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleSpec {
    pub nu: [ExactComplex; 3],
    pub d: Rational,
}

impl TriangleSpec {
    pub fn new(nu: [ExactComplex; 3], d: Rational) -> Result<Self, TriangleError> {
        if d <= Rational::zero() {
            return Err(TriangleError::Domain(format!("d = {d} must be positive")));
        }
        Ok(TriangleSpec { nu, d })
    }

    /// From decimal values; 0.6 is read as 3/5.
    pub fn from_f64(nu: [f64; 3], d: f64) -> Result<Self, TriangleError> {
        let n = [rational_from_f64(nu[0])?, rational_from_f64(nu[1])?, rational_from_f64(nu[2])?];
        Self::new(n.map(exact_real), rational_from_f64(d)?)
    }

    pub fn from_complex(nu: [Complex64; 3], d: f64) -> Result<Self, TriangleError> {
        Self::new([exact_from_c64(nu[0])?, exact_from_c64(nu[1])?, exact_from_c64(nu[2])?], rational_from_f64(d)?)
    }

    pub fn h(&self) -> ExactComplex {
        exact_real(self.d / int(2))
    }

    pub fn sum(&self) -> ExactComplex {
        self.nu[0] + self.nu[1] + self.nu[2]
    }

    fn nu_affine(&self) -> [AffineExponent; 3] {
        self.nu.map(AffineExponent::constant)
    }
}

fn z2() -> AffineExponent {
    AffineExponent::var("z2")
}

fn z3() -> AffineExponent {
    AffineExponent::var("z3")
}

fn c(x: ExactComplex) -> AffineExponent {
    AffineExponent::constant(x)
}

/// D^{(a,b)}[ν₁,ν₂,ν₃] in dimension d for affine indices and arguments:
/// Γ(−a)Γ(−b)Γ(−a−ν₂−ν₃+h)Γ(−b−ν₁−ν₃+h)Γ(a+b+ν₃)Γ(Σν−h+a+b) / [Γ(ν₁)Γ(ν₂)Γ(ν₃)Γ(d−Σν)].
/// No pole checks; denominators at poles are kept as symbolic Γ(−n)⁻¹.
pub fn d_transform(nu: &[AffineExponent; 3], d: Rational, a: &AffineExponent, b: &AffineExponent) -> GammaProduct {
    let h = c(exact_real(d / int(2)));
    let dd = c(exact_real(d));
    let s = &(&nu[0] + &nu[1]) + &nu[2];
    let factors = [
        GammaFactor::new(-a, 1),
        GammaFactor::new(-b, 1),
        GammaFactor::new(&(&(-a) - &(&nu[1] + &nu[2])) + &h, 1),
        GammaFactor::new(&(&(-b) - &(&nu[0] + &nu[2])) + &h, 1),
        GammaFactor::new(&(a + b) + &nu[2], 1),
        GammaFactor::new(&(&s - &h) + &(a + b), 1),
        GammaFactor::new(nu[0].clone(), -1),
        GammaFactor::new(nu[1].clone(), -1),
        GammaFactor::new(nu[2].clone(), -1),
        GammaFactor::new(&dd - &s, -1),
    ];
    GammaProduct::new(exact_one(), factors)
}

fn check_restricted(p: &GammaProduct) -> Result<(), TriangleError> {
    for f in p.factors() {
        if let Some((v, k)) = f.argument.coefficients().iter().find(|(_, k)| k.abs() != 1) {
            return Err(AlgebraError::GeneralCoefficient { var: v.to_string(), coefficient: *k }.into());
        }
    }
    Ok(())
}

/// D^{(z₂,z₃)}[ν] for numeric indices, without pole checks.
pub fn build_d_symbolic(spec: &TriangleSpec) -> GammaProduct {
    d_transform(&spec.nu_affine(), spec.d, &z2(), &z3())
}

/// D^{(z₂,z₃)}[ν]; a denominator Γ(νᵢ) or Γ(d − Σν) at a pole is an error.
pub fn build_d(spec: &TriangleSpec) -> Result<GammaProduct, TriangleError> {
    let dd = exact_real(spec.d);
    for (name, x) in [("nu1", spec.nu[0]), ("nu2", spec.nu[1]), ("nu3", spec.nu[2]), ("d - sum(nu)", dd - spec.sum())] {
        if as_nonpositive_integer(&x).is_some() {
            return Err(TriangleError::ConstructionPole(format!("Gamma({name}) with {name} = {}", fmt_exact(&x))));
        }
    }
    Ok(build_d_symbolic(spec))
}

fn fmt_exact(x: &ExactComplex) -> String {
    format_exact(x)
}

fn eval_err(e: EvalError) -> TriangleError {
    match e {
        EvalError::Special(s) => TriangleError::Special(s),
        other => TriangleError::Domain(other.to_string()),
    }
}

fn xy_monomials() -> [MonomialFactor; 2] {
    [MonomialFactor::new("x", z2()), MonomialFactor::new("y", z3())]
}

/// ∮∮ D^{(z₂,z₃)}[ν] x^{z₂} y^{z₃} without a contour; Γ(0) denominators allowed.
pub fn build_j_symbolic(spec: &TriangleSpec) -> MBIntegral {
    MBIntegral::new(build_d_symbolic(spec), xy_monomials(), vec![var("z2"), var("z3")]).expect("distinct variables")
}

/// J(ν; d)(x, y) as an MB integral at its max-slack contour.
pub fn build_j(spec: &TriangleSpec) -> Result<MBIntegral, TriangleError> {
    let d = build_d(spec)?;
    let m = MBIntegral::new(d, xy_monomials(), vec![var("z2"), var("z3")])?;
    Ok(m.with_feasible_contour()?)
}

/// Right-hand side of the star-triangle relation for Σα = d, as a 0-fold integral:
/// Γ(h−α₁)Γ(h−α₂)Γ(h−α₃)/[Γ(α₁)Γ(α₂)Γ(α₃)] · x^{α₁−h} y^{α₂−h}.
pub fn star_triangle_rhs(alpha: &TriangleSpec) -> MBIntegral {
    let h = alpha.h();
    let mut fs = Vec::new();
    for a in &alpha.nu {
        fs.push(GammaFactor::new(c(h - a), 1));
        fs.push(GammaFactor::new(c(*a), -1));
    }
    let monos = [MonomialFactor::new("x", c(alpha.nu[0] - h)), MonomialFactor::new("y", c(alpha.nu[1] - h))];
    MBIntegral::new(GammaProduct::new(exact_one(), fs), monos, vec![]).expect("no variables")
}

/// Residue points z₂ = α₁ − h, z₃ = α₂ − h of the star-triangle argument.
pub fn star_triangle_residue_points(alpha: &TriangleSpec) -> [(VarId, AffineExponent); 2] {
    let h = alpha.h();
    [(var("z2"), c(alpha.nu[0] - h)), (var("z3"), c(alpha.nu[1] - h))]
}

/// A point of the ladder functions: order n and ratios x, y in the region
/// Λ² = (1−x−y)² − 4xy > 0 with x + y < 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UdPoint {
    pub n: u32,
    pub x: f64,
    pub y: f64,
}

impl UdPoint {
    pub fn new(n: u32, x: f64, y: f64) -> Result<Self, TriangleError> {
        if !(1..=4).contains(&n) {
            return Err(TriangleError::Domain(format!("n = {n} outside 1..=4")));
        }
        if !(x.is_finite() && y.is_finite() && x > 0.0 && y > 0.0) {
            return Err(TriangleError::Domain(format!("x = {x}, y = {y} must be positive")));
        }
        let l2 = lambda_sq(x, y);
        if l2 <= 0.0 {
            return Err(TriangleError::Domain(format!("Lambda^2 <= 0 (Lambda^2 = {l2:.6e})")));
        }
        if x + y >= 1.0 {
            return Err(TriangleError::Domain(format!(
                "x + y = {} >= 1: outside the sqrt(x) + sqrt(y) < 1 branch",
                x + y
            )));
        }
        Ok(UdPoint { n, x, y })
    }

    pub fn lambda(&self) -> f64 {
        lambda_sq(self.x, self.y).sqrt()
    }

    pub fn rho(&self) -> f64 {
        2.0 / (1.0 - self.x - self.y + self.lambda())
    }
}

pub fn lambda_sq(x: f64, y: f64) -> f64 {
    (1.0 - x - y).powi(2) - 4.0 * x * y
}

/// Φ⁽ⁿ⁾(x, y) = −1/(n!Λ) Σ_{j=n}^{2n} (−1)ʲ j! ln^{2n−j}(y/x) / [(j−n)!(2n−j)!] · [Liⱼ(−1/(ρx)) − Liⱼ(−ρy)].
pub fn ud_phi(p: &UdPoint) -> Result<f64, TriangleError> {
    let n = p.n as u64;
    let lam = p.lambda();
    let rho = p.rho();
    let lyx = (p.y / p.x).ln();
    let a = Complex64::new(-1.0 / (rho * p.x), 0.0);
    let b = Complex64::new(-rho * p.y, 0.0);
    let f = |k: u64| rational_to_f64(&factorial(k));
    let mut sum = Complex64::zero();
    for j in n..=2 * n {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign * f(j) * lyx.powi((2 * n - j) as i32) / (f(j - n) * f(2 * n - j));
        sum += (polylog(j as u32, a)? - polylog(j as u32, b)?) * coeff;
    }
    let v = -sum / (f(n) * lam);
    if v.im.abs() > 1e-10 * v.re.abs().max(1.0) {
        return Err(TriangleError::ImaginaryLeak(v.im));
    }
    Ok(v.re)
}

/// Δ^{(α)}(z₂,z₃) = Γ(Σα−z₂−z₃−h)Γ(h+z₂)Γ(h+z₃) / [Γ(d−Σα+z₂+z₃)Γ(−z₂)Γ(−z₃)].
pub fn build_weight(alpha: &TriangleSpec) -> GammaProduct {
    let h = c(alpha.h());
    let s = c(alpha.sum());
    let dd = c(exact_real(alpha.d));
    let zz = &z2() + &z3();
    GammaProduct::new(
        exact_one(),
        [
            GammaFactor::new(&(&s - &zz) - &h, 1),
            GammaFactor::new(&h + &z2(), 1),
            GammaFactor::new(&h + &z3(), 1),
            GammaFactor::new(&(&dd - &s) + &zz, -1),
            GammaFactor::new(-z2(), -1),
            GammaFactor::new(-z3(), -1),
        ],
    )
}

/// Prefactor Γ(h−α₁)Γ(h−α₂)Γ(h−α₃)/[Γ(α₁)Γ(α₂)Γ(α₃)].
fn alpha_prefactor(alpha: &TriangleSpec) -> GammaProduct {
    let h = alpha.h();
    GammaProduct::new(
        exact_one(),
        alpha.nu.iter().flat_map(|a| [GammaFactor::new(c(h - a), 1), GammaFactor::new(c(*a), -1)]),
    )
}

/// Integrand of f(u,v): prefactor · Δ · D^{(z₂,z₃)}[h−α] · D^{(u,v)}[h+z₂, h+z₃, Σα−z₂−z₃−h],
/// with u and v given as affine expressions (symbols or constants).
pub fn f_integrand(
    alpha: &TriangleSpec,
    u: &AffineExponent,
    v: &AffineExponent,
) -> Result<GammaProduct, TriangleError> {
    let h = c(alpha.h());
    let s = c(alpha.sum());
    let nu_a = alpha.nu.map(|a| c(alpha.h() - a));
    let d1 = d_transform(&nu_a, alpha.d, &z2(), &z3());
    let nu_b = [&h + &z2(), &h + &z3(), &(&s - &(&z2() + &z3())) - &h];
    let d2 = d_transform(&nu_b, alpha.d, u, v);
    let p = alpha_prefactor(alpha).multiply(&build_weight(alpha)).multiply(&d1).multiply(&d2);
    check_restricted(&p)?;
    Ok(p)
}

fn uv_affine(u: Complex64, v: Complex64) -> Result<(AffineExponent, AffineExponent), TriangleError> {
    Ok((c(exact_from_c64(u)?), c(exact_from_c64(v)?)))
}

/// f(u,v) as a 2-fold integral in (z₂, z₃), without a contour. Its constraints always
/// pinch (the three u-dependent and the three α-dependent numerator arguments sum to
/// h − Σα and Σα − h), so it can only be evaluated regularized.
pub fn build_f_integral(alpha: &TriangleSpec, u: Complex64, v: Complex64) -> Result<MBIntegral, TriangleError> {
    let (u, v) = uv_affine(u, v)?;
    Ok(MBIntegral::new(f_integrand(alpha, &u, &v)?, [], vec![var("z2"), var("z3")])?)
}

/// The ε-regularized f(u,v) integral, at its max-slack contour:
/// Γ(z₂+z₃+h−α₃) → Γ(z₂+z₃+h−α₃+δa), Γ(u+v+Σα−h−z₂−z₃) → Γ(u+v+Σα−h−z₂−z₃+δb) with
/// δa = ε/2 − (Σα−h), δb = ε/2 + (Σα−h), and 1/[Γ(Σα−h)Γ(h−Σα)] → 1/Γ(ε/2)².
/// Two Barnes integrations of this integrand give exactly [`f_closed`] at the same ε.
pub fn build_f_integral_regularized(
    alpha: &TriangleSpec,
    u: Complex64,
    v: Complex64,
    eps: f64,
) -> Result<MBIntegral, TriangleError> {
    let p = f_integrand_regularized(alpha, u, v, eps)?;
    let m = MBIntegral::new(p, [], vec![var("z2"), var("z3")])?;
    Ok(m.with_feasible_contour()?)
}

pub fn f_integrand_regularized(
    alpha: &TriangleSpec,
    u: Complex64,
    v: Complex64,
    eps: f64,
) -> Result<GammaProduct, TriangleError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(TriangleError::Domain(format!("eps = {eps} must be positive")));
    }
    let e = exact_real(rational_from_f64(eps)?);
    let half = e * exact_real(rat(1, 2));
    let (ua, va) = uv_affine(u, v)?;
    let h = c(alpha.h());
    let s = c(alpha.sum());
    let gap = alpha.sum() - alpha.h();
    let p = f_integrand(alpha, &ua, &va)?;
    let a3 = &(&(&z2() + &z3()) + &h) - &c(alpha.nu[2]);
    let b3 = &(&(&(&ua + &va) + &s) - &h) - &(&z2() + &z3());
    let p = p
        .replace_argument(&a3, &a3.plus_const(&(half - gap)))
        .and_then(|p| p.replace_argument(&b3, &b3.plus_const(&(half + gap))))
        .ok_or_else(|| TriangleError::ConstraintViolated("f integrand lacks the expected Gamma factors".into()))?;
    let swap = GammaProduct::new(
        exact_one(),
        [GammaFactor::new(c(gap), 1), GammaFactor::new(c(-gap), 1), GammaFactor::new(c(half), -2)],
    );
    Ok(p.multiply(&swap))
}

/// Γ(Σα+u+v)Γ(−u)Γ(−v)Γ(−u−α₁)Γ(−v−α₂)Γ(u+v+α₁+α₂+ε) / [Γ(α₁)Γ(α₂)Γ(α₃)Γ(ε)];
/// ε = 0 gives the symbolic form with 1/Γ(0).
pub fn f_closed_product(alpha: &TriangleSpec, u: &AffineExponent, v: &AffineExponent, eps: Rational) -> GammaProduct {
    let e = exact_real(eps);
    let [a1, a2, a3] = alpha.nu;
    let uv = u + v;
    let factors = [
        GammaFactor::new(uv.plus_const(&alpha.sum()), 1),
        GammaFactor::new(-u, 1),
        GammaFactor::new(-v, 1),
        GammaFactor::new((-u).plus_const(&-a1), 1),
        GammaFactor::new((-v).plus_const(&-a2), 1),
        GammaFactor::new(uv.plus_const(&(a1 + a2 + e)), 1),
        GammaFactor::new(c(a1), -1),
        GammaFactor::new(c(a2), -1),
        GammaFactor::new(c(a3), -1),
        GammaFactor::new(c(e), -1),
    ];
    GammaProduct::new(exact_one(), factors)
}

/// Numeric f_closed at ε > 0.
pub fn f_closed(alpha: &TriangleSpec, u: Complex64, v: Complex64, eps: f64) -> Result<Complex64, TriangleError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(TriangleError::Domain(format!("eps = {eps} must be positive")));
    }
    let (ua, va) = uv_affine(u, v)?;
    let p = f_closed_product(alpha, &ua, &va, rational_from_f64(eps)?);
    p.value().map_err(eval_err)
}

/// ∮∮ du dv xᵘ yᵛ f(u,v) in its pinched (ε = 0) form.
pub fn orthogonality_integral(alpha: &TriangleSpec) -> MBIntegral {
    let u = AffineExponent::var("u");
    let v = AffineExponent::var("v");
    let p = f_closed_product(alpha, &u, &v, Rational::zero());
    MBIntegral::new(p, [MonomialFactor::new("x", u), MonomialFactor::new("y", v)], vec![var("u"), var("v")])
        .expect("distinct variables")
}

/// Residue points u = −α₁, v = −α₂.
pub fn orthogonality_residue_points(alpha: &TriangleSpec) -> [(VarId, AffineExponent); 2] {
    [(var("u"), c(-alpha.nu[0])), (var("v"), c(-alpha.nu[1]))]
}

/// x^{−α₁} y^{−α₂} as a 0-fold integral.
pub fn orthogonality_rhs(alpha: &TriangleSpec) -> MBIntegral {
    MBIntegral::new(
        GammaProduct::one(),
        [MonomialFactor::new("x", c(-alpha.nu[0])), MonomialFactor::new("y", c(-alpha.nu[1]))],
        vec![],
    )
    .expect("no variables")
}

/// The three ε's of the loop-reduction identity; they must sum to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct R1Eps(pub [ExactComplex; 3]);

impl R1Eps {
    pub fn new(eps: [Complex64; 3]) -> Result<Self, TriangleError> {
        let s = eps[0] + eps[1] + eps[2];
        if s.norm() > 1e-14 {
            return Err(TriangleError::ConstraintViolated(format!("eps1 + eps2 + eps3 = {s} != 0")));
        }
        let e1 = exact_from_c64(eps[0])?;
        let e2 = exact_from_c64(eps[1])?;
        // the third is fixed by the constraint so that the sum is exactly zero
        let e3 = -(e1 + e2);
        if e1.is_zero() || e2.is_zero() || e3.is_zero() {
            return Err(TriangleError::ConstraintViolated("every eps must be nonzero".into()));
        }
        Ok(R1Eps([e1, e2, e3]))
    }
}

/// LHS of the loop-reduction identity in d = 4:
/// ∮∮ D^{(u,v)}[1+ε₁−z₃, 1+ε₂−z₂, 1+ε₃] · D^{(z₂,z₃)}[1+ε₂, 1+ε₁, 1+ε₃], at its max-slack contour.
pub fn build_r1_lhs(eps: &R1Eps, u: Complex64, v: Complex64) -> Result<MBIntegral, TriangleError> {
    let (ua, va) = uv_affine(u, v)?;
    let one = exact_one();
    let [e1, e2, e3] = eps.0;
    let d = int(4);
    let outer = [c(one + e1) - z3(), c(one + e2) - z2(), c(one + e3)];
    let inner = [c(one + e2), c(one + e1), c(one + e3)];
    let p = d_transform(&outer, d, &ua, &va).multiply(&d_transform(&inner, d, &z2(), &z3()));
    check_restricted(&p)?;
    let m = MBIntegral::new(p, [], vec![var("z2"), var("z3")])?;
    Ok(m.with_feasible_contour()?)
}

/// The three terms of the RHS bracket, as (coefficient, product) pairs, reading the
/// one-index D^{(a,b)}[ν] as D^{(a,b)}[1,1,ν] in d = 4:
/// D^{(u,v−ε₂)}[1−ε₁]/(ε₂ε₃) + D^{(u,v)}[1+ε₃]/(ε₁ε₂) + D^{(u−ε₁,v)}[1−ε₂]/(ε₁ε₃).
pub fn r1_bracket_terms(
    eps: &R1Eps,
    u: Complex64,
    v: Complex64,
) -> Result<Vec<(ExactComplex, GammaProduct)>, TriangleError> {
    let (ua, va) = uv_affine(u, v)?;
    let one = exact_one();
    let [e1, e2, e3] = eps.0;
    let d = int(4);
    let dd =
        |a: &AffineExponent, b: &AffineExponent, nu3: ExactComplex| d_transform(&[c(one), c(one), c(nu3)], d, a, b);
    Ok(vec![
        (one / (e2 * e3), dd(&ua, &va.plus_const(&-e2), one - e1)),
        (one / (e1 * e2), dd(&ua, &va, one + e3)),
        (one / (e1 * e3), dd(&ua.plus_const(&-e1), &va, one - e2)),
    ])
}

pub fn r1_bracket(eps: &R1Eps, u: Complex64, v: Complex64) -> Result<Complex64, TriangleError> {
    let mut acc = Complex64::zero();
    for (k, p) in r1_bracket_terms(eps, u, v)? {
        let val = p.value().map_err(eval_err)?;
        acc += to_c64(&k) * val;
    }
    Ok(acc)
}
