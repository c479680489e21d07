use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::{LN_10, PI};

use super::gauss::GaussLegendre;
use super::{EngineError, EvalResult, MonomialValues, QuadratureConfig};
use crate::gamma_algebra::{to_c64, MBIntegral};
use crate::special_functions::{log_gamma, SpecialError};

// Step of the outward tail scan, and the extra margin below the cut level.
const SCAN_STEP: f64 = 0.5;
const SCAN_MAX_STEPS: usize = 4000;
const SCAN_MARGIN: f64 = LN_10;
// Gauss order of refinement level 0.
const BASE_ORDER: usize = 8;
const ABS_FLOOR: f64 = 1e-14;
const NOISE_FLOOR: f64 = 1e-13;

#[derive(Clone, Debug)]
struct Factor {
    a: [f64; 2],
    k: Complex64,
    p: f64,
}

impl Factor {
    fn arg(&self, z: [Complex64; 2]) -> Complex64 {
        z[0] * self.a[0] + z[1] * self.a[1] + self.k
    }
}

#[derive(Clone, Copy, Debug)]
struct Monomial {
    lin: [f64; 2],
    c: Complex64,
}

impl Monomial {
    fn log(&self, z: [Complex64; 2]) -> Complex64 {
        z[0] * self.lin[0] + z[1] * self.lin[1] + self.c
    }
}

#[derive(Clone, Copy, Debug)]
struct Hint {
    t: f64,
    delta: f64,
}

/// The integrand reduced to floating point, with factors split by which fold they touch.
struct Problem {
    nv: usize,
    c: [f64; 2],
    log_const: Complex64,
    zero: bool,
    // nv = 1: everything; nv = 2: factors free of the inner variable
    outer: Vec<Factor>,
    // nv = 2: factors containing the inner variable
    inner: Vec<Factor>,
    monos: Vec<Monomial>,
    fold_factor: Complex64,
}

fn sum_log(fs: &[Factor], z: [Complex64; 2]) -> Result<Option<Complex64>, SpecialError> {
    let mut acc = Complex64::zero();
    for f in fs {
        match log_gamma(f.arg(z)) {
            Ok(l) => acc += l * f.p,
            Err(SpecialError::Pole(_)) if f.p < 0.0 => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(acc))
}

fn re_or_neg_inf(x: Result<Option<Complex64>, SpecialError>) -> f64 {
    match x {
        Ok(Some(l)) => l.re,
        _ => f64::NEG_INFINITY,
    }
}

impl Problem {
    fn compile(m: &MBIntegral, points: &[MonomialValues]) -> Result<Problem, EngineError> {
        let nv = m.folds();
        if nv > 2 {
            return Err(EngineError::TooManyFolds(nv));
        }
        let c = match m.contour() {
            Some(c) if m.contour_valid() => c.to_vec(),
            Some(c) => return Err(EngineError::ContourInvalid(format!("contour {c:?} does not separate the poles"))),
            None if nv == 0 => vec![],
            None => return Err(EngineError::ContourInvalid("no contour set".into())),
        };
        let mut cc = [0.0; 2];
        cc[..nv].copy_from_slice(&c);
        let index = |name: &crate::gamma_algebra::VarId| -> Result<usize, EngineError> {
            m.vars().iter().position(|v| v == name).ok_or_else(|| EngineError::Unbound(name.to_string()))
        };
        let pref = to_c64(m.integrand().prefactor());
        let mut zero = pref.is_zero();
        let mut log_const = if zero { Complex64::zero() } else { pref.ln() };
        let mut outer = Vec::new();
        let mut inner = Vec::new();
        for g in m.integrand().factors() {
            if g.argument.is_constant() {
                match log_gamma(g.argument.constant_c64()) {
                    Ok(l) => log_const += l * g.power as f64,
                    Err(SpecialError::Pole(_)) if g.power < 0 => zero = true,
                    Err(e) => return Err(EngineError::Special(e)),
                }
                continue;
            }
            let mut a = [0.0; 2];
            for (v, k) in g.argument.coefficients() {
                a[index(v)?] = *k as f64;
            }
            let f = Factor { a, k: g.argument.constant_c64(), p: g.power as f64 };
            if nv == 2 && a[1] != 0.0 {
                inner.push(f);
            } else {
                outer.push(f);
            }
        }
        let mut monos = Vec::with_capacity(points.len());
        for pt in points {
            let mut mono = Monomial { lin: [0.0; 2], c: Complex64::zero() };
            for mf in m.monomials() {
                let b = *pt.get(&mf.base).ok_or_else(|| EngineError::MissingMonomial(mf.base.clone()))?;
                if !(b.is_finite() && b > 0.0) {
                    return Err(EngineError::MissingMonomial(format!("{} = {b} is not a positive real", mf.base)));
                }
                let lb = b.ln();
                for (v, k) in mf.exponent.coefficients() {
                    mono.lin[index(v)?] += *k as f64 * lb;
                }
                mono.c += mf.exponent.constant_c64() * lb;
            }
            monos.push(mono);
        }
        let fold_factor = if m.normalized() { Complex64::new(1.0 / (2.0 * PI), 0.0) } else { Complex64::i() };
        Ok(Problem { nv, c: cc, log_const, zero, outer, inner, monos, fold_factor })
    }

    fn z(&self, t0: f64, t1: f64) -> [Complex64; 2] {
        [Complex64::new(self.c[0], t0), Complex64::new(self.c[1], t1)]
    }

    // Pole hints for a fold: factor list, fold index, values of the other variable.
    fn hints(&self, fs: &[Factor], k: usize, other: Complex64) -> Vec<Hint> {
        let mut out = Vec::new();
        for f in fs.iter().filter(|f| f.p > 0.0 && f.a[k] != 0.0) {
            let rest = f.k + other * f.a[1 - k];
            let ak = f.a[k];
            out.push(Hint { t: -rest.im / ak, delta: (ak * self.c[k] + rest.re) / ak.abs() });
        }
        out
    }

    // Singularities of the inner integral as a function of the outer variable, from
    // pairs of inner factors pinching the inner contour.
    fn induced_hints(&self) -> Vec<Hint> {
        let mut out = Vec::new();
        let nums: Vec<&Factor> = self.inner.iter().filter(|f| f.p > 0.0).collect();
        for f in &nums {
            for g in &nums {
                if !(f.a[1] > 0.0 && g.a[1] < 0.0) {
                    continue;
                }
                let (wf, wg) = (-g.a[1], f.a[1]);
                let a0 = wf * f.a[0] + wg * g.a[0];
                if a0 == 0.0 {
                    continue;
                }
                let k = f.k * wf + g.k * wg;
                out.push(Hint { t: -k.im / a0, delta: (a0 * self.c[0] + k.re) / a0.abs() });
            }
        }
        out
    }

    // Ridge points of the inner factors at a given outer t.
    fn inner_ridges(&self, t0: f64) -> Vec<f64> {
        self.inner.iter().map(|f| -(f.a[0] * t0 + f.k.im) / f.a[1]).collect()
    }

    fn outer_log(&self, t0: f64) -> Result<Option<Complex64>, SpecialError> {
        sum_log(&self.outer, self.z(t0, 0.0))
    }

    // Crude log-magnitude of the integrand along the outer fold.
    fn outer_profile(&self, t0: f64) -> f64 {
        let base = re_or_neg_inf(self.outer_log(t0));
        if self.nv == 1 {
            return base;
        }
        let mut cands = self.inner_ridges(t0);
        cands.push(0.0);
        cands
            .into_iter()
            .map(|t1| re_or_neg_inf(sum_log(&self.inner, self.z(t0, t1))))
            .fold(f64::NEG_INFINITY, f64::max)
            + base
    }
}

/// Range [lo, hi] outside of which `profile` stays `slack` below its peak.
fn truncate(profile: &dyn Fn(f64) -> f64, cands: &[f64], slack: f64) -> Result<(f64, f64, f64), EngineError> {
    let mut peak = f64::NEG_INFINITY;
    let mut lo_c = f64::INFINITY;
    let mut hi_c = f64::NEG_INFINITY;
    for &t in cands.iter().chain(std::iter::once(&0.0)) {
        if !t.is_finite() {
            continue;
        }
        peak = peak.max(profile(t));
        lo_c = lo_c.min(t);
        hi_c = hi_c.max(t);
    }
    if !peak.is_finite() && peak > 0.0 {
        return Err(EngineError::NonDecaying("integrand overflows at the contour".into()));
    }
    let edge = |start: f64, dir: f64, peak: &mut f64| -> Result<f64, EngineError> {
        let mut prev = profile(start);
        let mut t = start;
        for _ in 0..SCAN_MAX_STEPS {
            t += dir * SCAN_STEP;
            let v = profile(t);
            if v.is_nan() {
                return Err(EngineError::NonDecaying(format!("integrand is NaN at t = {t}")));
            }
            *peak = peak.max(v);
            if v < *peak - slack - SCAN_MARGIN && v <= prev {
                return Ok(t);
            }
            prev = v;
        }
        Err(EngineError::NonDecaying(format!("no decay found up to |t| = {}", t.abs())))
    };
    let hi = edge(hi_c, 1.0, &mut peak)?;
    let lo = edge(lo_c, -1.0, &mut peak)?;
    Ok((lo, hi, peak))
}

/// Panel breakpoints: a uniform cover of [lo, hi] refined geometrically toward hints.
fn breakpoints(lo: f64, hi: f64, hints: &mut [Hint], uniform_panels: usize) -> Vec<f64> {
    let n = uniform_panels.max(((hi - lo) / 2.0).ceil() as usize).max(1);
    let w = (hi - lo) / n as f64;
    let mut b: Vec<f64> = (0..=n).map(|i| lo + w * i as f64).collect();
    hints.sort_by(|x, y| x.t.total_cmp(&y.t));
    let mut merged: Vec<Hint> = Vec::new();
    for h in hints.iter().filter(|h| h.delta > 0.0 && h.delta < w && h.t > lo && h.t < hi) {
        match merged.last_mut() {
            Some(last) if (h.t - last.t).abs() < 0.5 * last.delta.min(h.delta) => last.delta = last.delta.min(h.delta),
            _ => merged.push(*h),
        }
    }
    for h in &merged {
        b.push(h.t);
        let mut s = h.delta;
        while s < w {
            for x in [h.t - s, h.t + s] {
                if x > lo && x < hi {
                    b.push(x);
                }
            }
            s *= 2.0;
        }
    }
    b.sort_by(f64::total_cmp);
    let min_gap = 1e-12 * (1.0 + hi.abs().max(lo.abs()));
    b.dedup_by(|x, y| (*x - *y).abs() < min_gap);
    b
}

fn rule(breaks: &[f64], order: usize) -> Vec<(f64, f64)> {
    let g = GaussLegendre::cached(order);
    let mut out = Vec::with_capacity((breaks.len() - 1) * order);
    for p in breaks.windows(2) {
        let (mid, half) = ((p[0] + p[1]) / 2.0, (p[1] - p[0]) / 2.0);
        for (x, w) in g.nodes.iter().zip(&g.weights) {
            out.push((mid + half * x, half * w));
        }
    }
    out
}

fn order_at(level: usize, nv: usize) -> usize {
    (BASE_ORDER as f64 * 2f64.powf(level as f64 / nv as f64)).round() as usize
}

struct Level {
    sums: Vec<Complex64>,
    nodes: usize,
}

impl Problem {
    fn level(
        &self,
        outer_breaks: &[f64],
        order: usize,
        cfg: &QuadratureConfig,
        shift: f64,
    ) -> Result<Level, EngineError> {
        let np = self.monos.len();
        let outer_nodes = rule(outer_breaks, order);
        if self.nv == 1 {
            let mut sums = vec![Complex64::zero(); np];
            for &(t, w) in &outer_nodes {
                let Some(l) = self.outer_log(t).map_err(EngineError::Special)? else { continue };
                let z = self.z(t, 0.0);
                for (s, m) in sums.iter_mut().zip(&self.monos) {
                    *s += (l - shift + m.log(z)).exp() * w;
                }
            }
            return Ok(Level { sums, nodes: outer_nodes.len() });
        }
        let slack = cfg.truncation_slack * LN_10;
        let uniform = (cfg.initial_nodes_per_fold / BASE_ORDER).max(1);
        let per_node: Vec<Result<(Vec<Complex64>, usize), EngineError>> = outer_nodes
            .par_iter()
            .map(|&(t0, w0)| {
                let mut sums = vec![Complex64::zero(); np];
                let Some(lo) = self.outer_log(t0).map_err(EngineError::Special)? else {
                    return Ok((sums, 0));
                };
                let z0 = Complex64::new(self.c[0], t0);
                let profile = |t1: f64| re_or_neg_inf(sum_log(&self.inner, self.z(t0, t1)));
                let (a, b, _) = truncate(&profile, &self.inner_ridges(t0), slack)?;
                let mut hints = self.hints(&self.inner, 1, z0);
                let inner_nodes = rule(&breakpoints(a, b, &mut hints, uniform), order);
                for &(t1, w1) in &inner_nodes {
                    let z = self.z(t0, t1);
                    let Some(li) = sum_log(&self.inner, z).map_err(EngineError::Special)? else { continue };
                    let l = lo + li - shift;
                    for (s, m) in sums.iter_mut().zip(&self.monos) {
                        *s += (l + m.log(z)).exp() * (w0 * w1);
                    }
                }
                Ok((sums, inner_nodes.len()))
            })
            .collect();
        let mut sums = vec![Complex64::zero(); np];
        let mut nodes = 0;
        for r in per_node {
            let (s, n) = r?;
            for (acc, x) in sums.iter_mut().zip(s) {
                *acc += x;
            }
            nodes += n;
        }
        Ok(Level { sums, nodes })
    }
}

fn within(e: f64, v: f64, tol: f64) -> bool {
    e <= tol * v || (v < ABS_FLOOR && e <= ABS_FLOOR)
}

pub(crate) fn evaluate_points(
    m: &MBIntegral,
    points: &[MonomialValues],
    cfg: &QuadratureConfig,
) -> Result<Vec<EvalResult>, EngineError> {
    cfg.validate()?;
    let prob = Problem::compile(m, points)?;
    let np = points.len();
    let done = |value: Complex64| EvalResult {
        value,
        error_estimate: 0.0,
        nodes_used: 1,
        converged: true,
        refinements: 0,
        error_history: vec![],
        extrapolation: None,
    };
    if prob.zero {
        return Ok(vec![done(Complex64::zero()); np]);
    }
    if prob.nv == 0 {
        return Ok(prob.monos.iter().map(|mo| done((prob.log_const + mo.c).exp())).collect());
    }
    let slack = cfg.truncation_slack * LN_10;
    let mut outer_hints = prob.hints(&prob.outer, 0, Complex64::zero());
    let mut cands: Vec<f64> = outer_hints.iter().map(|h| h.t).collect();
    if prob.nv == 2 {
        let induced = prob.induced_hints();
        cands.extend(induced.iter().map(|h| h.t));
        outer_hints.extend(induced);
        // ridges of mixed factors at t1 = 0
        cands.extend(prob.inner.iter().filter(|f| f.a[0] != 0.0).map(|f| -f.k.im / f.a[0]));
    }
    let (lo, hi, peak) = truncate(&|t| prob.outer_profile(t), &cands, slack)?;
    let shift = if peak.is_finite() { peak } else { 0.0 };
    let uniform = (cfg.initial_nodes_per_fold / BASE_ORDER).max(1);
    let outer_breaks = breakpoints(lo, hi, &mut outer_hints, uniform);
    let scale = prob.fold_factor.powi(prob.nv as i32) * (prob.log_const + shift).exp();

    let mut hist: Vec<Vec<Complex64>> = vec![Vec::new(); np];
    let mut errs: Vec<Vec<f64>> = vec![Vec::new(); np];
    let mut floors = vec![0.0; np];
    let mut frozen: Vec<Option<usize>> = vec![None; np];
    let mut nodes_used = 0;
    let mut last_level = 0;
    for level in 0..=cfg.max_refinements {
        last_level = level;
        let lv = prob.level(&outer_breaks, order_at(level, prob.nv), cfg, shift)?;
        nodes_used += lv.nodes;
        for p in 0..np {
            if frozen[p].is_some() {
                continue;
            }
            let v = lv.sums[p] * scale;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(EngineError::Special(SpecialError::Range(v)));
            }
            if level == 1 {
                floors[p] = NOISE_FLOOR * v.norm();
            }
            if let Some(prev) = hist[p].last() {
                errs[p].push((v - prev).norm().max(floors[p]));
            }
            hist[p].push(v);
            let (h, e) = (&hist[p], &errs[p]);
            let k = e.len();
            if k >= 2
                && within(e[k - 1], h[k].norm(), cfg.target_rel_tol)
                && within(e[k - 2], h[k - 1].norm(), cfg.target_rel_tol)
                && e[k - 1] <= e[k - 2]
            {
                frozen[p] = Some(level);
            }
        }
        if frozen.iter().all(Option::is_some) {
            break;
        }
    }
    Ok((0..np)
        .map(|p| EvalResult {
            value: *hist[p].last().expect("at least one level"),
            error_estimate: errs[p].last().copied().unwrap_or(f64::INFINITY),
            nodes_used,
            converged: frozen[p].is_some(),
            refinements: frozen[p].unwrap_or(last_level),
            error_history: errs[p].clone(),
            extrapolation: None,
        })
        .collect())
}

/// Monomial values for a single point given as pairs.
pub fn monomial_values<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> MonomialValues {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>()
}
