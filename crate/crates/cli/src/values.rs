//! Parsers for command-line values: reals, complex numbers ("0.7+0.2i", "-0.3i") and lists.

use std::str::FromStr;

use num_complex::Complex64;

pub fn complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    Complex64::from_str(t)
        .ok()
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .ok_or_else(|| format!("'{t}' is not a complex number (use forms like 0.5, -0.2+0.4i, 0.3i)"))
}

pub fn real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| format!("'{t}' is not a finite number"))
}

fn list<T>(s: &str, n: usize, f: fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let v = s.split(',').map(f).collect::<Result<Vec<_>, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated values, got {}", v.len()));
    }
    Ok(v)
}

pub fn complex3(s: &str) -> Result<[Complex64; 3], String> {
    let v = list(s, 3, complex)?;
    Ok([v[0], v[1], v[2]])
}

pub fn complex4(s: &str) -> Result<[Complex64; 4], String> {
    let v = list(s, 4, complex)?;
    Ok([v[0], v[1], v[2], v[3]])
}

/// "u;v" pair.
pub fn uv_pair(s: &str) -> Result<(Complex64, Complex64), String> {
    let (a, b) = s.split_once(';').ok_or_else(|| format!("'{s}' is not a u;v pair"))?;
    Ok((complex(a)?, complex(b)?))
}
