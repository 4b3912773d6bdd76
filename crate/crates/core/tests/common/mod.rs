#![allow(dead_code)]

/// Composite Simpson rule on `[a, b]` with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Integral over `(0, inf)` via the substitution `x = e^t`, `t` in `[lo, hi]`.
pub fn positive_line(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    simpson(|t| f(t.exp()) * t.exp(), lo, hi, 200_000)
}

/// Gamma(a, theta) density, with the normaliser from a Lanczos-free log-gamma
/// (Stirling series with shift), independent of the library.
pub fn gamma_pdf(x: f64, a: f64, theta: f64) -> f64 {
    (-(x / theta) + (a - 1.0) * x.ln() - a * theta.ln() - ln_gamma(a)).exp()
}

pub fn ln_gamma(a: f64) -> f64 {
    // shift up until the asymptotic series is accurate
    let mut x = a;
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let series =
        (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
            + 1.0 / (1260.0 * x.powi(5));
    series + shift
}
