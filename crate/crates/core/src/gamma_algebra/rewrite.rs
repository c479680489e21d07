use num_traits::One;

use super::affine::{AffineExponent, VarId};
use super::exact::{as_nonpositive_integer, exact_real, factorial, ExactComplex};
use super::integral::MBIntegral;
use super::product::{constant_pole_power, GammaFactor, GammaProduct};
use super::AlgebraError;

/// One Gamma factor's pole sequence in a variable.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleFamily {
    /// First pole; the rest follow at base − n (left) or base + n (right).
    pub base: AffineExponent,
    pub multiplicity: u32,
    /// Index into the product's factor list.
    pub factor: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PoleFamilies {
    /// From Γ(var + a): poles at var = −a − n.
    pub left: Vec<PoleFamily>,
    /// From Γ(a − var): poles at var = a + n.
    pub right: Vec<PoleFamily>,
}

fn expand(fams: &[PoleFamily]) -> Vec<AffineExponent> {
    fams.iter().flat_map(|f| std::iter::repeat(f.base.clone()).take(f.multiplicity as usize)).collect()
}

impl PoleFamilies {
    /// Left bases, repeated by multiplicity.
    pub fn left_bases(&self) -> Vec<AffineExponent> {
        expand(&self.left)
    }

    pub fn right_bases(&self) -> Vec<AffineExponent> {
        expand(&self.right)
    }
}

/// Pole families of the numerator factors of `p` in `var`.
pub fn poles_in(p: &GammaProduct, var: &VarId) -> Result<PoleFamilies, AlgebraError> {
    let mut out = PoleFamilies::default();
    for (idx, f) in p.factors().iter().enumerate() {
        let c = f.argument.coeff(var);
        if c == 0 || f.power <= 0 {
            continue;
        }
        let rest = f.argument.without(var);
        let fam = |base| PoleFamily { base, multiplicity: f.power as u32, factor: idx };
        match c {
            1 => out.left.push(fam(-&rest)),
            -1 => out.right.push(fam(rest)),
            _ => return Err(AlgebraError::MixedCoefficient { var: var.to_string(), coefficient: c }),
        }
    }
    Ok(out)
}

/// First Barnes lemma in `var`:
/// ∮ Γ(λ₁+z)Γ(λ₂+z)Γ(λ₃−z)Γ(λ₄−z) = Γ(λ₁+λ₃)Γ(λ₁+λ₄)Γ(λ₂+λ₃)Γ(λ₂+λ₄)/Γ(λ₁+λ₂+λ₃+λ₄).
///
/// Returns the new integrand with `var` integrated out. If the integral carries a
/// contour it must be valid; symbolic integrals without a contour are accepted.
pub fn apply_barnes_first(m: &MBIntegral, var: &VarId) -> Result<GammaProduct, AlgebraError> {
    if !m.vars().contains(var) {
        return Err(AlgebraError::UnknownVariable(var.to_string()));
    }
    if m.contour().is_some() && !m.contour_valid() {
        return Err(AlgebraError::ContourInvalid("contour does not separate the pole families".into()));
    }
    if let Some(mono) = m.monomials().iter().find(|x| x.exponent.depends_on(var)) {
        return Err(AlgebraError::PatternMismatch(format!("monomial {mono} depends on {var}")));
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut rest = Vec::new();
    for f in m.integrand().factors() {
        let c = f.argument.coeff(var);
        if c == 0 {
            rest.push(f.clone());
            continue;
        }
        if f.power < 0 {
            return Err(AlgebraError::PatternMismatch(format!("denominator Gamma({}) depends on {var}", f.argument)));
        }
        let lambda = f.argument.without(var);
        let bucket = match c {
            1 => &mut plus,
            -1 => &mut minus,
            _ => return Err(AlgebraError::MixedCoefficient { var: var.to_string(), coefficient: c }),
        };
        for _ in 0..f.power {
            bucket.push(lambda.clone());
        }
    }
    if plus.len() != 2 || minus.len() != 2 {
        return Err(AlgebraError::PatternMismatch(format!(
            "expected two Gamma(l+{var}) and two Gamma(l-{var}) factors, found {} and {}",
            plus.len(),
            minus.len()
        )));
    }
    let total = &(&plus[0] + &plus[1]) + &(&minus[0] + &minus[1]);
    let mut factors = rest;
    for a in &plus {
        for b in &minus {
            factors.push(GammaFactor::new(a + b, 1));
        }
    }
    factors.push(GammaFactor::new(total, -1));
    Ok(GammaProduct::new(*m.integrand().prefactor(), factors))
}

/// [`apply_barnes_first`] packaged as the remaining integral.
pub fn barnes_reduce(m: &MBIntegral, var: &VarId) -> Result<MBIntegral, AlgebraError> {
    let p = apply_barnes_first(m, var)?;
    Ok(m.reduced(var, p))
}

/// Iterated residues at the designated points, in the given order.
///
/// With upward contours, closing right on a pole of Γ(a − z) and closing left on a
/// pole of Γ(z + b) both contribute +(−1)ⁿ/n! times the rest of the integrand, where
/// the Gamma argument equals −n at the pole. Numerator factors that also hit a
/// Gamma pole at the point must be cancelled exactly by denominator factors
/// (the Γ(0)/Γ(0) collapse); otherwise the pole is rejected.
pub fn take_residues(m: &MBIntegral, points: &[(VarId, AffineExponent)]) -> Result<MBIntegral, AlgebraError> {
    let mut cur = m.clone().without_contour();
    for (var, at) in points {
        if !cur.vars().contains(var) {
            return Err(AlgebraError::UnknownVariable(var.to_string()));
        }
        let p = cur.integrand();
        // (factor index, n, orientation) for each numerator factor singular at the point
        let mut hits: Vec<(usize, u64, i64)> = Vec::new();
        for (idx, f) in p.factors().iter().enumerate() {
            let c = f.argument.coeff(var);
            if c == 0 || f.power <= 0 {
                continue;
            }
            if c.abs() != 1 {
                return Err(AlgebraError::MixedCoefficient { var: var.to_string(), coefficient: c });
            }
            let v = f.argument.substitute(var, at);
            if v.is_constant() {
                if let Some(n) = as_nonpositive_integer(v.constant_part()) {
                    hits.push((idx, n, c));
                }
            }
        }
        if hits.is_empty() {
            return Err(AlgebraError::NotASimplePole(format!("no numerator factor is singular at {var} = {at}")));
        }
        // right-family factors first; the result does not depend on the choice
        hits.sort_by_key(|&(idx, _, c)| (c, idx));
        let mut accepted = None;
        for &(idx, n, _) in &hits {
            let mut factors = p.factors().to_vec();
            factors[idx].power -= 1;
            let sign = if n % 2 == 0 { ExactComplex::one() } else { -ExactComplex::one() };
            let coeff = sign / exact_real(factorial(n));
            let reduced = GammaProduct::new(*p.prefactor() * coeff, factors).substitute(var, at);
            if constant_pole_power(&reduced) == 0 {
                accepted = Some(reduced);
                break;
            }
        }
        let reduced = accepted.ok_or_else(|| {
            let f = &p.factors()[hits[0].0];
            if hits.len() == 1 {
                AlgebraError::NotASimplePole(format!(
                    "Gamma({})^{} has a pole of order {} at {var} = {at}",
                    f.argument, f.power, f.power
                ))
            } else {
                AlgebraError::MultiplePoleCollision(format!(
                    "{} numerator factors share the pole {var} = {at}",
                    hits.len()
                ))
            }
        })?;
        cur = cur.substitute(var, at).with_integrand(reduced);
    }
    Ok(cur)
}
