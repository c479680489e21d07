use num_complex::Complex64;

/// Value at x = 0 of the polynomial through the points (Neville).
pub fn neville_at_zero(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    let n = xs.len();
    let mut p = ys.to_vec();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (p[i] * xs[i + k] - p[i + 1] * xs[i]) / (xs[i + k] - xs[i]);
        }
    }
    p[0]
}

/// Σ |ℓ_j(0)| for the Lagrange basis on `xs`: how much the extrapolation amplifies noise.
pub fn amplification(xs: &[f64]) -> f64 {
    (0..xs.len())
        .map(|j| {
            xs.iter().enumerate().filter(|(m, _)| *m != j).map(|(_, xm)| (xm / (xm - xs[j])).abs()).product::<f64>()
        })
        .sum()
}

/// Extrapolants of degree `order` over every window of `order + 1` consecutive points.
pub fn window_extrapolants(xs: &[f64], ys: &[Complex64], order: usize) -> Vec<Complex64> {
    let w = order + 1;
    if xs.len() < w {
        return Vec::new();
    }
    (0..=xs.len() - w).map(|s| neville_at_zero(&xs[s..s + w], &ys[s..s + w])).collect()
}
