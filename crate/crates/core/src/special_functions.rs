//! Complex log-Gamma, Gamma and integer-order polylogarithms.
//!
//! `log_gamma` follows the usual branch of ln Γ: analytic on the plane cut along
//! the negative real axis, real on the positive axis, and taken as the limit from
//! above on the negative axis. Its exponential is Γ(z) everywhere off the poles.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

pub type ComplexValue = Complex64;

/// Absolute distance to a non-positive integer below which Γ is treated as a pole.
pub const POLE_TOL: f64 = 1e-12;

/// Largest order accepted by [`polylog`].
pub const MAX_POLYLOG_ORDER: u32 = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("Gamma has a pole at z = {0}")]
    Pole(Complex64),
    #[error("Gamma({0}) overflows double range")]
    Range(Complex64),
    #[error("argument {0} lies on the branch cut or is not finite")]
    Domain(Complex64),
    #[error("polylog order {0} is outside 1..=8")]
    UnsupportedOrder(u32),
}

// g = 671/128, 14 terms; relative error below 1e-14 on the right half plane.
const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_7e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

fn lanczos(z: Complex64) -> Complex64 {
    let tmp = z + LANCZOS_G;
    let head = (z + 0.5) * tmp.ln() - tmp;
    let mut ser = Complex64::new(LANCZOS_C0, 0.0);
    let mut y = z;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    head + (ser * SQRT_2PI / z).ln()
}

// ln sin(πz) for Im z >= 0, continuous on the closed upper half plane and
// free of overflow for large Im z.
fn ln_sin_pi_upper(z: Complex64) -> Complex64 {
    let k = z.re.round();
    let d = z - k;
    // 1 - exp(2πi z) = -2i sin(πd) exp(iπd), with the integer part removed
    let one_minus_w = Complex64::new(0.0, -2.0) * (d * PI).sin() * (Complex64::i() * PI * d).exp();
    -Complex64::i() * PI * z + Complex64::new(0.0, 0.5).ln() + one_minus_w.ln()
}

fn near_pole(z: Complex64) -> bool {
    if z.re > 0.5 || z.im.abs() > POLE_TOL {
        return false;
    }
    let n = z.re.round();
    n <= 0.0 && (z - n).norm() <= POLE_TOL
}

fn log_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        return lanczos(z);
    }
    if z.im < 0.0 {
        return log_gamma_unchecked(z.conj()).conj();
    }
    PI.ln() - ln_sin_pi_upper(z) - lanczos(1.0 - z)
}

/// ln Γ(z).
pub fn log_gamma(z: Complex64) -> Result<Complex64, SpecialError> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(SpecialError::Domain(z));
    }
    if near_pole(z) {
        return Err(SpecialError::Pole(z));
    }
    Ok(log_gamma_unchecked(z))
}

/// Γ(z). Real input gives a result with exactly zero imaginary part.
pub fn gamma(z: Complex64) -> Result<Complex64, SpecialError> {
    let l = log_gamma(z)?;
    if l.re > 709.0 {
        return Err(SpecialError::Range(z));
    }
    let g = l.exp();
    if z.im == 0.0 {
        Ok(Complex64::new(g.re, 0.0))
    } else {
        Ok(g)
    }
}

/// Real convenience wrapper around [`gamma`].
pub fn gamma_real(x: f64) -> Result<f64, SpecialError> {
    gamma(Complex64::new(x, 0.0)).map(|g| g.re)
}

const ZETA: [f64; 9] = [
    f64::NAN,
    f64::INFINITY,
    PI * PI / 6.0,
    1.202_056_903_159_594_2,
    PI * PI * PI * PI / 90.0,
    1.036_927_755_143_37,
    PI * PI * PI * PI * PI * PI / 945.0,
    1.008_349_277_381_922_8,
    PI * PI * PI * PI * PI * PI * PI * PI / 9450.0,
];

/// ζ(s) for integer s ≥ 2.
pub fn zeta_int(s: u32) -> f64 {
    assert!(s >= 2, "zeta_int needs s >= 2");
    if (s as usize) < ZETA.len() {
        return ZETA[s as usize];
    }
    // s >= 9: the tail past 40 terms is below 40^{1-s}/(s-1) < 1e-15
    (1..=40).rev().map(|k| (k as f64).powi(-(s as i32))).sum()
}

// Bernoulli numbers B_0..B_8 (B_1 = -1/2).
const BERNOULLI: [f64; 9] = [1.0, -0.5, 1.0 / 6.0, 0.0, -1.0 / 30.0, 0.0, 1.0 / 42.0, 0.0, -1.0 / 30.0];

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn bernoulli_poly(n: u32, x: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        acc += binomial(n, k) * BERNOULLI[k as usize] * x.powi((n - k) as i32);
    }
    acc
}

fn check_order(j: u32) -> Result<(), SpecialError> {
    if j == 0 || j > MAX_POLYLOG_ORDER {
        Err(SpecialError::UnsupportedOrder(j))
    } else {
        Ok(())
    }
}

/// Li_j(z) by its defining power series; only sensible for |z| < 1.
pub fn polylog_series(j: u32, z: Complex64) -> Result<Complex64, SpecialError> {
    check_order(j)?;
    if z.norm() >= 1.0 {
        return Err(SpecialError::Domain(z));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zk = z;
    for k in 1..100_000u32 {
        let term = zk / (k as f64).powi(j as i32);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
        zk *= z;
    }
    Ok(sum)
}

/// Li_j(z) from the expansion in μ = ln z around z = 1; converges for |ln z| < 2π.
pub fn polylog_log_expansion(j: u32, z: Complex64) -> Result<Complex64, SpecialError> {
    check_order(j)?;
    let mu = z.ln();
    if mu.norm() == 0.0 {
        return if j >= 2 { Ok(Complex64::new(zeta_int(j), 0.0)) } else { Err(SpecialError::Domain(z)) };
    }
    if mu.norm() >= 2.0 * PI {
        return Err(SpecialError::Domain(z));
    }
    let n = j;
    let mut sum = Complex64::new(0.0, 0.0);
    // k = 0..n-2: zeta(n-k) mu^k / k!
    let mut muk = Complex64::new(1.0, 0.0);
    for k in 0..n.saturating_sub(1) {
        sum += zeta_int(n - k) * muk / factorial(k);
        muk *= mu;
    }
    // k = n-1: the logarithmic term
    let harmonic: f64 = (1..n).map(|i| 1.0 / i as f64).sum();
    sum += mu.powi((n - 1) as i32) / factorial(n - 1) * (harmonic - (-mu).ln());
    // k = n: zeta(0) = -1/2
    let mun = mu.powi(n as i32);
    sum += -0.5 * mun / factorial(n);
    // k = n - 1 + 2p, p >= 1: zeta(1-2p) = (-1)^p 2 (2p-1)! zeta(2p) / (2π)^{2p}
    let mu2 = mu * mu;
    let mut pw = mu.powi((n - 1) as i32);
    let two_pi_sq = 4.0 * PI * PI;
    let mut scale = 1.0;
    for p in 1..200u32 {
        pw *= mu2;
        scale /= two_pi_sq;
        let denom: f64 = (0..n).map(|i| (2 * p + i) as f64).product();
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let term = pw * (sign * 2.0 * zeta_int(2 * p) * scale / denom);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    Ok(sum)
}

/// Li_j(z) through the inversion relation
/// Li_j(z) + (-1)^j Li_j(1/z) = -(2πi)^j / j! · B_j(1/2 + ln(-z)/(2πi)).
pub fn polylog_inversion(j: u32, z: Complex64) -> Result<Complex64, SpecialError> {
    check_order(j)?;
    if z.norm() == 0.0 {
        return Err(SpecialError::Domain(z));
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let b = bernoulli_poly(j, 0.5 + (-z).ln() / two_pi_i);
    let inv = polylog(j, 1.0 / z)?;
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    Ok(-sign * inv - two_pi_i.powi(j as i32) / factorial(j) * b)
}

/// Li_j(z) for 1 ≤ j ≤ 8 and z off the cut (1, ∞).
pub fn polylog(j: u32, z: Complex64) -> Result<Complex64, SpecialError> {
    check_order(j)?;
    if !z.re.is_finite() || !z.im.is_finite() || (z.im == 0.0 && z.re > 1.0) {
        return Err(SpecialError::Domain(z));
    }
    if j == 1 {
        if z == Complex64::new(1.0, 0.0) {
            return Err(SpecialError::Domain(z));
        }
        return Ok(-(1.0 - z).ln());
    }
    let r = z.norm();
    if r <= 0.5 {
        polylog_series(j, z)
    } else if r >= 2.0 {
        polylog_inversion(j, z)
    } else {
        polylog_log_expansion(j, z)
    }
}
