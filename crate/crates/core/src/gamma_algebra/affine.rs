use num_complex::Complex64;
use num_traits::Zero;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use super::exact::{cmp_exact, exact_real, exact_zero, to_c64, write_constant, ExactComplex, Rational};
use super::AlgebraError;

/// Name of a contour variable (z2, z3, u, v, ...).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VarId(String);

impl VarId {
    pub fn new(name: impl Into<String>) -> Result<Self, AlgebraError> {
        let name = name.into();
        if is_identifier(&name) && !matches!(name.as_str(), "i" | "Gamma" | "MB" | "MBraw") {
            Ok(VarId(name))
        } else {
            Err(AlgebraError::Parse { pos: 0, msg: format!("invalid variable name {name:?}") })
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl From<&str> for VarId {
    /// Panics on an invalid identifier; use [`VarId::new`] for untrusted input.
    fn from(s: &str) -> Self {
        VarId::new(s).expect("invalid variable name")
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// constant + Σ coefficient·var with integer coefficients.
///
/// Coefficients are ±1 unless built through [`AffineExponent::new_unrestricted`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AffineExponent {
    coeffs: BTreeMap<VarId, i64>,
    constant: ExactComplex,
}

impl AffineExponent {
    pub fn new(coeffs: impl IntoIterator<Item = (VarId, i64)>, constant: ExactComplex) -> Result<Self, AlgebraError> {
        let a = Self::new_unrestricted(coeffs, constant);
        if let Some((v, c)) = a.coeffs.iter().find(|(_, c)| c.abs() != 1) {
            return Err(AlgebraError::GeneralCoefficient { var: v.to_string(), coefficient: *c });
        }
        Ok(a)
    }

    /// Escape hatch for coefficients other than ±1. Pole analysis rejects such terms.
    pub fn new_unrestricted(coeffs: impl IntoIterator<Item = (VarId, i64)>, constant: ExactComplex) -> Self {
        let mut map = BTreeMap::new();
        for (v, c) in coeffs {
            *map.entry(v).or_insert(0) += c;
        }
        map.retain(|_, c| *c != 0);
        AffineExponent { coeffs: map, constant }
    }

    pub fn constant(c: ExactComplex) -> Self {
        AffineExponent { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn real(r: Rational) -> Self {
        Self::constant(exact_real(r))
    }

    pub fn var(v: impl Into<VarId>) -> Self {
        AffineExponent { coeffs: BTreeMap::from([(v.into(), 1)]), constant: exact_zero() }
    }

    pub fn zero() -> Self {
        Self::constant(exact_zero())
    }

    pub fn coefficients(&self) -> &BTreeMap<VarId, i64> {
        &self.coeffs
    }

    pub fn coeff(&self, v: &VarId) -> i64 {
        self.coeffs.get(v).copied().unwrap_or(0)
    }

    pub fn constant_part(&self) -> &ExactComplex {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn depends_on(&self, v: &VarId) -> bool {
        self.coeffs.contains_key(v)
    }

    pub fn is_restricted(&self) -> bool {
        self.coeffs.values().all(|c| c.abs() == 1)
    }

    /// The expression with the `v` term dropped.
    pub fn without(&self, v: &VarId) -> Self {
        let mut a = self.clone();
        a.coeffs.remove(v);
        a
    }

    pub fn scale(&self, k: i64) -> Self {
        let kr = Rational::from_integer(k as i128);
        Self::new_unrestricted(
            self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)),
            ExactComplex::new(self.constant.re * kr, self.constant.im * kr),
        )
    }

    pub fn plus_const(&self, c: &ExactComplex) -> Self {
        let mut a = self.clone();
        a.constant += c;
        a
    }

    /// Replaces `v` by `value`.
    pub fn substitute(&self, v: &VarId, value: &AffineExponent) -> Self {
        match self.coeffs.get(v) {
            None => self.clone(),
            Some(&c) => &self.without(v) + &value.scale(c),
        }
    }

    pub fn rename(&self, map: &BTreeMap<VarId, VarId>) -> Self {
        Self::new_unrestricted(
            self.coeffs.iter().map(|(v, c)| (map.get(v).cloned().unwrap_or_else(|| v.clone()), *c)),
            self.constant,
        )
    }

    /// Numeric value with variables looked up in `point`; None if one is unbound.
    pub fn eval(&self, point: &dyn Fn(&VarId) -> Option<Complex64>) -> Option<Complex64> {
        let mut acc = to_c64(&self.constant);
        for (v, c) in &self.coeffs {
            acc += point(v)? * (*c as f64);
        }
        Some(acc)
    }

    pub fn constant_c64(&self) -> Complex64 {
        to_c64(&self.constant)
    }

    pub(crate) fn write_to(&self, f: &mut impl fmt::Write) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let mag = c.abs();
            if first {
                if *c < 0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if *c < 0 { " - " } else { " + " })?;
            }
            if mag != 1 {
                write!(f, "{mag}*")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        if first || !self.constant.is_zero() {
            write_constant(f, &self.constant, first)?;
        }
        Ok(())
    }
}

impl fmt::Display for AffineExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_to(f)
    }
}

impl Ord for AffineExponent {
    /// Lexicographic on the dense coefficient vector (variables in name order), then constant.
    fn cmp(&self, other: &Self) -> Ordering {
        let mut keys: Vec<&VarId> = self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.sort();
        keys.dedup();
        for k in keys {
            let o = self.coeff(k).cmp(&other.coeff(k));
            if o != Ordering::Equal {
                return o;
            }
        }
        cmp_exact(&self.constant, &other.constant)
    }
}

impl PartialOrd for AffineExponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &AffineExponent {
    type Output = AffineExponent;
    fn add(self, rhs: &AffineExponent) -> AffineExponent {
        AffineExponent::new_unrestricted(
            self.coeffs.iter().chain(rhs.coeffs.iter()).map(|(v, c)| (v.clone(), *c)),
            self.constant + rhs.constant,
        )
    }
}

impl Sub for &AffineExponent {
    type Output = AffineExponent;
    fn sub(self, rhs: &AffineExponent) -> AffineExponent {
        self + &(-rhs)
    }
}

impl Neg for &AffineExponent {
    type Output = AffineExponent;
    fn neg(self) -> AffineExponent {
        self.scale(-1)
    }
}

impl Add for AffineExponent {
    type Output = AffineExponent;
    fn add(self, rhs: AffineExponent) -> AffineExponent {
        &self + &rhs
    }
}

impl Sub for AffineExponent {
    type Output = AffineExponent;
    fn sub(self, rhs: AffineExponent) -> AffineExponent {
        &self - &rhs
    }
}

impl Neg for AffineExponent {
    type Output = AffineExponent;
    fn neg(self) -> AffineExponent {
        -&self
    }
}

impl Add<ExactComplex> for AffineExponent {
    type Output = AffineExponent;
    fn add(self, rhs: ExactComplex) -> AffineExponent {
        self.plus_const(&rhs)
    }
}

impl Sub<ExactComplex> for AffineExponent {
    type Output = AffineExponent;
    fn sub(self, rhs: ExactComplex) -> AffineExponent {
        self.plus_const(&-rhs)
    }
}
