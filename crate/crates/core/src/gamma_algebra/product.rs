use num_complex::Complex64;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Mul;

use super::affine::{AffineExponent, VarId};
use super::exact::{
    as_nonpositive_integer, as_positive_integer, exact_one, exact_real, factorial, to_c64, write_constant, ExactComplex,
};
use crate::special_functions::{log_gamma, SpecialError};

// Γ(n) for positive integer n up to this bound is folded into the prefactor.
const FOLD_FACTORIAL_MAX: u64 = 30;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GammaFactor {
    pub argument: AffineExponent,
    pub power: i32,
}

impl GammaFactor {
    pub fn new(argument: AffineExponent, power: i32) -> Self {
        GammaFactor { argument, power }
    }

    pub fn is_numerator(&self) -> bool {
        self.power > 0
    }
}

/// prefactor · Π Γ(argᵢ)^powerᵢ, always kept canonical.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GammaProduct {
    prefactor: ExactComplex,
    factors: Vec<GammaFactor>,
}

impl Default for GammaProduct {
    fn default() -> Self {
        Self::one()
    }
}

impl GammaProduct {
    pub fn new(prefactor: ExactComplex, factors: impl IntoIterator<Item = GammaFactor>) -> Self {
        let mut p = GammaProduct { prefactor, factors: factors.into_iter().collect() };
        p.normalize();
        p
    }

    pub fn one() -> Self {
        GammaProduct { prefactor: exact_one(), factors: Vec::new() }
    }

    pub fn constant(c: ExactComplex) -> Self {
        GammaProduct { prefactor: c, factors: Vec::new() }
    }

    /// Γ(arg).
    pub fn gamma(arg: AffineExponent) -> Self {
        Self::gamma_pow(arg, 1)
    }

    /// Γ(arg)^power.
    pub fn gamma_pow(arg: AffineExponent, power: i32) -> Self {
        Self::new(exact_one(), [GammaFactor::new(arg, power)])
    }

    pub fn prefactor(&self) -> &ExactComplex {
        &self.prefactor
    }

    pub fn factors(&self) -> &[GammaFactor] {
        &self.factors
    }

    pub fn numerator(&self) -> impl Iterator<Item = &GammaFactor> {
        self.factors.iter().filter(|f| f.power > 0)
    }

    pub fn denominator(&self) -> impl Iterator<Item = &GammaFactor> {
        self.factors.iter().filter(|f| f.power < 0)
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.factors.iter().flat_map(|f| f.argument.coefficients().keys().cloned()).collect()
    }

    pub fn depends_on(&self, v: &VarId) -> bool {
        self.factors.iter().any(|f| f.argument.depends_on(v))
    }

    /// Rebuilds the canonical form; a no-op on values produced by this module.
    pub fn canonicalize(&self) -> Self {
        Self::new(self.prefactor, self.factors.iter().cloned())
    }

    fn normalize(&mut self) {
        let mut merged: BTreeMap<AffineExponent, i32> = BTreeMap::new();
        for f in self.factors.drain(..) {
            *merged.entry(f.argument).or_insert(0) += f.power;
        }
        let mut out = Vec::with_capacity(merged.len());
        for (arg, power) in merged {
            if power == 0 {
                continue;
            }
            if arg.is_constant() {
                if let Some(n) = as_positive_integer(arg.constant_part()).filter(|&n| n <= FOLD_FACTORIAL_MAX) {
                    let g = exact_real(factorial(n - 1));
                    for _ in 0..power.unsigned_abs() {
                        self.prefactor = if power > 0 { self.prefactor * g } else { self.prefactor / g };
                    }
                    continue;
                }
            }
            out.push(GammaFactor::new(arg, power));
        }
        // BTreeMap iteration already follows AffineExponent's ordering
        self.factors = out;
    }

    pub fn multiply(&self, other: &GammaProduct) -> GammaProduct {
        Self::new(self.prefactor * other.prefactor, self.factors.iter().chain(other.factors.iter()).cloned())
    }

    pub fn scale(&self, c: &ExactComplex) -> GammaProduct {
        GammaProduct { prefactor: self.prefactor * c, factors: self.factors.clone() }
    }

    /// 1/p. Panics if the prefactor is zero.
    pub fn inverse(&self) -> GammaProduct {
        assert!(!self.prefactor.is_zero(), "inverse of a zero product");
        Self::new(
            exact_one() / self.prefactor,
            self.factors.iter().map(|f| GammaFactor::new(f.argument.clone(), -f.power)),
        )
    }

    pub fn divide(&self, other: &GammaProduct) -> GammaProduct {
        self.multiply(&other.inverse())
    }

    pub fn substitute(&self, var: &VarId, value: &AffineExponent) -> GammaProduct {
        Self::new(
            self.prefactor,
            self.factors.iter().map(|f| GammaFactor::new(f.argument.substitute(var, value), f.power)),
        )
    }

    pub fn rename(&self, map: &BTreeMap<VarId, VarId>) -> GammaProduct {
        Self::new(self.prefactor, self.factors.iter().map(|f| GammaFactor::new(f.argument.rename(map), f.power)))
    }

    /// Swaps two variable names.
    pub fn swap_vars(&self, a: &VarId, b: &VarId) -> GammaProduct {
        self.rename(&BTreeMap::from([(a.clone(), b.clone()), (b.clone(), a.clone())]))
    }

    /// Replaces Γ(old)^k by Γ(new)^k, leaving other factors alone. Returns None if
    /// `old` is not a factor.
    pub fn replace_argument(&self, old: &AffineExponent, new: &AffineExponent) -> Option<GammaProduct> {
        let idx = self.factors.iter().position(|f| &f.argument == old)?;
        let mut factors = self.factors.clone();
        factors[idx].argument = new.clone();
        Some(Self::new(self.prefactor, factors))
    }

    pub fn power_of(&self, arg: &AffineExponent) -> i32 {
        self.factors.iter().find(|f| &f.argument == arg).map_or(0, |f| f.power)
    }

    /// Numeric value at `point`. A denominator Γ at a pole contributes a zero.
    pub fn eval(&self, point: &dyn Fn(&VarId) -> Option<Complex64>) -> Result<Complex64, EvalError> {
        let mut log_sum = Complex64::new(0.0, 0.0);
        let mut zero = false;
        for f in &self.factors {
            let z = f.argument.eval(point).ok_or_else(|| EvalError::Unbound(f.argument.to_string()))?;
            match log_gamma(z) {
                Ok(l) => log_sum += l * f.power as f64,
                Err(SpecialError::Pole(_)) if f.power < 0 => zero = true,
                Err(e) => return Err(EvalError::Special(e)),
            }
        }
        if zero || self.prefactor.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if log_sum.re > 709.0 {
            return Err(EvalError::Special(SpecialError::Range(log_sum)));
        }
        Ok(to_c64(&self.prefactor) * log_sum.exp())
    }

    /// Value of a product with no variables.
    pub fn value(&self) -> Result<Complex64, EvalError> {
        self.eval(&|_| None)
    }

    pub(crate) fn write_to(&self, f: &mut impl fmt::Write) -> fmt::Result {
        let mut first = true;
        if !self.prefactor.is_one() || self.factors.is_empty() {
            f.write_str("(")?;
            write_constant(f, &self.prefactor, true)?;
            f.write_str(")")?;
            first = false;
        }
        for g in &self.factors {
            if !first {
                f.write_str(" * ")?;
            }
            f.write_str("Gamma(")?;
            g.argument.write_to(f)?;
            f.write_str(")")?;
            if g.power != 1 {
                write!(f, "^{}", g.power)?;
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Display for GammaProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_to(f)
    }
}

impl Mul for &GammaProduct {
    type Output = GammaProduct;
    fn mul(self, rhs: &GammaProduct) -> GammaProduct {
        self.multiply(rhs)
    }
}

impl Mul for GammaProduct {
    type Output = GammaProduct;
    fn mul(self, rhs: GammaProduct) -> GammaProduct {
        self.multiply(&rhs)
    }
}

/// Free-function form of [`GammaProduct::multiply`].
pub fn multiply(a: &GammaProduct, b: &GammaProduct) -> GammaProduct {
    a.multiply(b)
}

/// Free-function form of [`GammaProduct::substitute`].
pub fn substitute(p: &GammaProduct, var: &VarId, value: &AffineExponent) -> GammaProduct {
    p.substitute(var, value)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable in {0}")]
    Unbound(String),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

/// base^exponent with a real positive base supplied at evaluation time.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MonomialFactor {
    pub base: String,
    pub exponent: AffineExponent,
}

impl MonomialFactor {
    pub fn new(base: impl Into<String>, exponent: AffineExponent) -> Self {
        MonomialFactor { base: base.into(), exponent }
    }
}

impl fmt::Display for MonomialFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^({})", self.base, self.exponent)
    }
}

/// Merges equal bases, drops zero exponents and sorts by base.
pub fn canonical_monomials(ms: impl IntoIterator<Item = MonomialFactor>) -> Vec<MonomialFactor> {
    let mut merged: BTreeMap<String, AffineExponent> = BTreeMap::new();
    for m in ms {
        let e = merged.entry(m.base).or_insert_with(AffineExponent::zero);
        *e = &*e + &m.exponent;
    }
    merged
        .into_iter()
        .filter(|(_, e)| !(e.is_constant() && e.constant_part().is_zero()))
        .map(|(base, exponent)| MonomialFactor { base, exponent })
        .collect()
}

/// Σ over factors whose argument reduces to a non-positive integer constant.
pub(crate) fn constant_pole_power(p: &GammaProduct) -> i32 {
    p.factors()
        .iter()
        .filter(|f| f.argument.is_constant() && as_nonpositive_integer(f.argument.constant_part()).is_some())
        .map(|f| f.power.max(0))
        .sum()
}
