use num_complex::{Complex, Complex64};
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

use super::AlgebraError;

/// Exact rational used for every parameter constant.
pub type Rational = Ratio<i128>;

/// Exact complex rational. Parameters such as ν, d, α, ε and spectator u, v live here,
/// so that cancellations like Γ(0)/Γ(0) are decided exactly.
pub type ExactComplex = Complex<Rational>;

pub fn rat(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

pub fn int(n: i128) -> Rational {
    Rational::from_integer(n)
}

pub fn exact(re: Rational, im: Rational) -> ExactComplex {
    Complex::new(re, im)
}

pub fn exact_real(re: Rational) -> ExactComplex {
    Complex::new(re, Rational::zero())
}

pub fn exact_zero() -> ExactComplex {
    Complex::new(Rational::zero(), Rational::zero())
}

pub fn exact_one() -> ExactComplex {
    Complex::new(Rational::one(), Rational::zero())
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn to_c64(z: &ExactComplex) -> Complex64 {
    Complex64::new(rational_to_f64(&z.re), rational_to_f64(&z.im))
}

pub fn cmp_exact(a: &ExactComplex, b: &ExactComplex) -> Ordering {
    a.re.cmp(&b.re).then_with(|| a.im.cmp(&b.im))
}

/// Some(n) when z is exactly the integer -n with n >= 0.
pub fn as_nonpositive_integer(z: &ExactComplex) -> Option<u64> {
    if z.im.is_zero() && z.re.is_integer() && !z.re.is_positive() {
        u64::try_from(-z.re.to_integer()).ok()
    } else {
        None
    }
}

/// Some(n) when z is exactly the integer n >= 1.
pub fn as_positive_integer(z: &ExactComplex) -> Option<u64> {
    if z.im.is_zero() && z.re.is_integer() && z.re.is_positive() {
        u64::try_from(z.re.to_integer()).ok()
    } else {
        None
    }
}

pub fn factorial(n: u64) -> Rational {
    (1..=n as i128).fold(Rational::one(), |acc, k| acc * int(k))
}

/// Parses `3`, `-2/7`, `0.125`, `1.5e-3` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, AlgebraError> {
    let bad = || AlgebraError::Parse { pos: 0, msg: format!("not a rational number: {s:?}") };
    let s = s.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(AlgebraError::Parse { pos: 0, msg: "zero denominator".into() });
        }
        return Ok(n / d);
    }
    let (neg, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(k) => (&body[..k], body[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (body, 0),
    };
    let (ip, fp) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    let digits = digits.trim_start_matches('0');
    let numer: i128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
    let scale = exp - fp.len() as i32;
    if scale.abs() > 36 {
        return Err(AlgebraError::Parse { pos: 0, msg: format!("exponent out of range in {s:?}") });
    }
    let mut r = int(numer);
    let ten = int(10);
    for _ in 0..scale.unsigned_abs() {
        r = if scale > 0 { r * ten } else { r / ten };
    }
    Ok(if neg { -r } else { r })
}

/// Exact rational from a double via its shortest round-trip decimal form,
/// so that 0.6 becomes 3/5.
pub fn rational_from_f64(x: f64) -> Result<Rational, AlgebraError> {
    if !x.is_finite() {
        return Err(AlgebraError::Parse { pos: 0, msg: format!("non-finite value {x}") });
    }
    parse_rational(&format!("{x:e}"))
}

pub fn exact_from_c64(z: Complex64) -> Result<ExactComplex, AlgebraError> {
    Ok(exact(rational_from_f64(z.re)?, rational_from_f64(z.im)?))
}

pub struct DisplayRational<'a>(pub &'a Rational);

impl fmt::Display for DisplayRational<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.0;
        if r.is_integer() {
            write!(f, "{}", r.numer())
        } else {
            write!(f, "{}/{}", r.numer(), r.denom())
        }
    }
}

/// Writes a complex constant as `a`, `a + b*i`, `b*i`, `-i`, with `first` controlling
/// whether a leading `+` is needed.
pub(crate) fn write_constant(f: &mut impl fmt::Write, z: &ExactComplex, first: bool) -> fmt::Result {
    let mut first = first;
    if !z.re.is_zero() || z.im.is_zero() {
        write_signed(f, &z.re, first)?;
        first = false;
    }
    if !z.im.is_zero() {
        let mag = z.im.abs();
        if first {
            if z.im.is_negative() {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if z.im.is_negative() { " - " } else { " + " })?;
        }
        if mag.is_one() {
            f.write_str("i")?;
        } else {
            write!(f, "{}*i", DisplayRational(&mag))?;
        }
    }
    Ok(())
}

fn write_signed(f: &mut impl fmt::Write, r: &Rational, first: bool) -> fmt::Result {
    let mag = r.abs();
    if first {
        if r.is_negative() {
            f.write_str("-")?;
        }
    } else {
        f.write_str(if r.is_negative() { " - " } else { " + " })?;
    }
    write!(f, "{}", DisplayRational(&mag))
}

pub fn format_exact(z: &ExactComplex) -> String {
    let mut s = String::new();
    write_constant(&mut s, z, true).expect("writing to a String cannot fail");
    s
}
