use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

use super::affine::{AffineExponent, VarId};
use super::product::{canonical_monomials, GammaProduct, MonomialFactor};
use super::AlgebraError;

/// Minimal slack δ demanded by [`feasible_contour`].
pub const CONTOUR_MARGIN: f64 = 1e-3;

// Box bound on contour real parts, only active for integrands that are
// unbounded on one side.
const CONTOUR_BOX: f64 = 8.0;

/// ∮ Π (dzₖ/2πi) · integrand · Π monomials, over vertical lines Re zₖ = cₖ.
#[derive(Clone, PartialEq, Debug)]
pub struct MBIntegral {
    integrand: GammaProduct,
    monomials: Vec<MonomialFactor>,
    vars: Vec<VarId>,
    contour: Option<Vec<f64>>,
    normalized: bool,
}

impl MBIntegral {
    /// An integral with the (1/2πi)-per-fold normalization and no contour yet.
    pub fn new(
        integrand: GammaProduct,
        monomials: impl IntoIterator<Item = MonomialFactor>,
        vars: Vec<VarId>,
    ) -> Result<Self, AlgebraError> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(AlgebraError::DuplicateVariable(v.to_string()));
            }
        }
        Ok(MBIntegral { integrand, monomials: canonical_monomials(monomials), vars, contour: None, normalized: true })
    }

    /// Same integral without the 1/2πi factors (raw ∮ dz).
    pub fn raw(mut self) -> Self {
        self.normalized = false;
        self
    }

    pub fn with_normalization(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }

    pub fn integrand(&self) -> &GammaProduct {
        &self.integrand
    }

    pub fn monomials(&self) -> &[MonomialFactor] {
        &self.monomials
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn folds(&self) -> usize {
        self.vars.len()
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    pub fn contour(&self) -> Option<&[f64]> {
        self.contour.as_deref()
    }

    /// True when a contour is set and every variable-dependent numerator argument has
    /// positive real part on it.
    pub fn contour_valid(&self) -> bool {
        self.contour.as_ref().is_some_and(|c| self.slack_at(c).is_ok_and(|s| s > 0.0))
    }

    /// Smallest real part of a variable-dependent numerator argument at the contour point.
    pub fn slack_at(&self, c: &[f64]) -> Result<f64, AlgebraError> {
        let rows = self.constraint_rows()?;
        Ok(rows.iter().map(|r| r.value(c)).fold(f64::INFINITY, f64::min))
    }

    /// Sets the contour, rejecting points that do not separate the pole families.
    pub fn with_contour(mut self, c: Vec<f64>) -> Result<Self, AlgebraError> {
        if c.len() != self.vars.len() {
            return Err(AlgebraError::ContourInvalid(format!(
                "contour has {} entries for {} variables",
                c.len(),
                self.vars.len()
            )));
        }
        let s = self.slack_at(&c)?;
        if s <= 0.0 {
            return Err(AlgebraError::ContourInvalid(format!("minimal slack {s} at {c:?}")));
        }
        self.contour = Some(c);
        Ok(self)
    }

    /// Places the contour at the max-slack point, requiring slack ≥ δ.
    pub fn with_feasible_contour(self) -> Result<Self, AlgebraError> {
        let c = feasible_contour(&self)?;
        self.with_contour(c)
    }

    pub fn without_contour(mut self) -> Self {
        self.contour = None;
        self
    }

    /// Reorders the integration variables; the contour follows.
    pub fn with_var_order(mut self, order: &[VarId]) -> Result<Self, AlgebraError> {
        let mut sorted_new = order.to_vec();
        sorted_new.sort();
        let mut sorted_old = self.vars.clone();
        sorted_old.sort();
        if sorted_new != sorted_old {
            return Err(AlgebraError::UnknownVariable(format!("{order:?}")));
        }
        if let Some(c) = &self.contour {
            let map: BTreeMap<&VarId, f64> = self.vars.iter().zip(c.iter().copied()).collect();
            self.contour = Some(order.iter().map(|v| map[v]).collect());
        }
        self.vars = order.to_vec();
        Ok(self)
    }

    pub fn with_integrand(mut self, integrand: GammaProduct) -> Self {
        self.integrand = integrand;
        self.contour = None;
        self
    }

    /// Substitutes `var = value` everywhere; `var` leaves the integration list.
    pub fn substitute(&self, var: &VarId, value: &AffineExponent) -> MBIntegral {
        let vars: Vec<VarId> = self.vars.iter().filter(|v| *v != var).cloned().collect();
        let monomials =
            self.monomials.iter().map(|m| MonomialFactor::new(m.base.clone(), m.exponent.substitute(var, value)));
        MBIntegral {
            integrand: self.integrand.substitute(var, value),
            monomials: canonical_monomials(monomials),
            vars,
            contour: None,
            normalized: self.normalized,
        }
    }

    /// The integral after the `var` fold is replaced by `integrand`.
    pub(crate) fn reduced(&self, var: &VarId, integrand: GammaProduct) -> MBIntegral {
        let pos = self.vars.iter().position(|v| v == var);
        let vars = self.vars.iter().filter(|v| *v != var).cloned().collect();
        let contour = match (&self.contour, pos) {
            (Some(c), Some(p)) => {
                let mut c = c.clone();
                c.remove(p);
                Some(c)
            }
            _ => None,
        };
        MBIntegral { integrand, monomials: self.monomials.clone(), vars, contour, normalized: self.normalized }
    }

    /// Renames variables in integrand, monomials and the integration list.
    pub fn rename(&self, map: &BTreeMap<VarId, VarId>) -> MBIntegral {
        MBIntegral {
            integrand: self.integrand.rename(map),
            monomials: canonical_monomials(
                self.monomials.iter().map(|m| MonomialFactor::new(m.base.clone(), m.exponent.rename(map))),
            ),
            vars: self.vars.iter().map(|v| map.get(v).cloned().unwrap_or_else(|| v.clone())).collect(),
            contour: self.contour.clone(),
            normalized: self.normalized,
        }
    }

    /// One linear constraint per variable-dependent numerator factor.
    pub(crate) fn constraint_rows(&self) -> Result<Vec<ConstraintRow>, AlgebraError> {
        let mut rows = Vec::new();
        for (idx, f) in self.integrand.factors().iter().enumerate() {
            if f.power <= 0 || f.argument.is_constant() {
                continue;
            }
            let mut a = vec![0.0; self.vars.len()];
            let b = f.argument.constant_c64().re;
            for (v, c) in f.argument.coefficients() {
                match self.vars.iter().position(|w| w == v) {
                    Some(k) => a[k] = *c as f64,
                    None => return Err(AlgebraError::UnknownVariable(v.to_string())),
                }
            }
            rows.push(ConstraintRow { a, b, factor: idx });
        }
        Ok(rows)
    }

    /// Value of the monomials at a point, given positive real bases.
    pub fn monomial_log(
        &self,
        bases: &BTreeMap<String, f64>,
        point: &dyn Fn(&VarId) -> Option<Complex64>,
    ) -> Option<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in &self.monomials {
            let b = *bases.get(&m.base)?;
            acc += m.exponent.eval(point)? * b.ln();
        }
        Some(acc)
    }
}

impl fmt::Display for MBIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.normalized { "MB[" } else { "MBraw[" })?;
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("] ")?;
        self.integrand.write_to(f)?;
        for m in &self.monomials {
            write!(f, " * {m}")?;
        }
        if let Some(c) = &self.contour {
            f.write_str(" @ ")?;
            for (i, (v, x)) in self.vars.iter().zip(c).enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{v}={x:?}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub(crate) struct ConstraintRow {
    pub a: Vec<f64>,
    pub b: f64,
    pub factor: usize,
}

impl ConstraintRow {
    pub fn value(&self, c: &[f64]) -> f64 {
        self.b + self.a.iter().zip(c).map(|(a, x)| a * x).sum::<f64>()
    }
}

/// Outcome of the max-slack problem.
#[derive(Clone, Debug, PartialEq)]
pub struct SlackSolution {
    pub point: Vec<f64>,
    pub slack: f64,
    /// Indices into the integrand's factor list of the constraints tight at the optimum.
    pub active: Vec<usize>,
}

/// Maximizes the minimal real part of the variable-dependent numerator arguments over
/// contour points; ties go to the lexicographically smallest point.
pub fn max_slack_point(m: &MBIntegral) -> Result<SlackSolution, AlgebraError> {
    let rows = m.constraint_rows()?;
    let n = m.vars.len();
    if rows.is_empty() {
        return Ok(SlackSolution { point: vec![0.0; n], slack: f64::INFINITY, active: vec![] });
    }
    // Unknowns (c_1..c_n, s). Slack rows: a·c - s >= -b. Box rows: ±c_k >= -R.
    let mut lhs: Vec<(Vec<f64>, f64)> = rows
        .iter()
        .map(|r| {
            let mut v = r.a.clone();
            v.push(-1.0);
            (v, -r.b)
        })
        .collect();
    for k in 0..n {
        for sign in [1.0, -1.0] {
            let mut v = vec![0.0; n + 1];
            v[k] = sign;
            lhs.push((v, -CONTOUR_BOX));
        }
    }
    let dim = n + 1;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for subset in combinations(lhs.len(), dim) {
        let a: Vec<Vec<f64>> = subset.iter().map(|&i| lhs[i].0.clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&i| lhs[i].1).collect();
        let Some(x) = solve(a, b) else { continue };
        let ok = lhs.iter().all(|(row, rhs)| {
            let v: f64 = row.iter().zip(&x).map(|(p, q)| p * q).sum();
            v >= rhs - 1e-10 * (1.0 + rhs.abs())
        });
        if !ok {
            continue;
        }
        let s = x[n];
        let c = x[..n].to_vec();
        best = match best {
            None => Some((c, s)),
            Some((bc, bs)) => {
                let tol = 1e-11 * (1.0 + bs.abs());
                if s > bs + tol || (s > bs - tol && lex_less(&c, &bc)) {
                    Some((c, s.max(bs)))
                } else {
                    Some((bc, bs))
                }
            }
        };
    }
    let (point, _) = best.ok_or_else(|| AlgebraError::ContourInvalid("no vertex found".into()))?;
    let slack = rows.iter().map(|r| r.value(&point)).fold(f64::INFINITY, f64::min);
    let active =
        rows.iter().filter(|r| r.value(&point) <= slack + 1e-9 * (1.0 + slack.abs())).map(|r| r.factor).collect();
    Ok(SlackSolution { point, slack, active })
}

/// Contour real parts with every numerator argument at slack ≥ [`CONTOUR_MARGIN`].
pub fn feasible_contour(m: &MBIntegral) -> Result<Vec<f64>, AlgebraError> {
    feasible_contour_with_margin(m, CONTOUR_MARGIN)
}

pub fn feasible_contour_with_margin(m: &MBIntegral, margin: f64) -> Result<Vec<f64>, AlgebraError> {
    let sol = max_slack_point(m)?;
    if sol.slack >= margin {
        Ok(sol.point)
    } else {
        let active = sol.active.iter().map(|&i| format!("Gamma({})", m.integrand.factors()[i].argument)).collect();
        Err(AlgebraError::Infeasible { max_slack: sol.slack, active })
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > 1e-12 {
            return x < y;
        }
    }
    false
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

// Gaussian elimination with partial pivoting; None if singular.
#[allow(clippy::needless_range_loop)]
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for k in col..n {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}
