//! Quadrature helpers.

/// Composite Simpson rule over [a, b] with n (even, >= 2) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Cumulative Simpson integral of sampled values on a uniform grid.
/// Returns partial integrals at every sample point (trapezoid-corrected
/// on the running odd panel).
pub fn cumulative_simpson(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    for i in (2..n).step_by(2) {
        out[i] = out[i - 2] + h / 3.0 * (values[i - 2] + 4.0 * values[i - 1] + values[i]);
    }
    for i in (1..n).step_by(2) {
        // Odd endpoints: previous even partial plus one trapezoid panel
        // refined with a quadratic through the three nearest samples.
        let base = out[i - 1];
        if i + 1 < n {
            out[i] = base + h / 12.0 * (5.0 * values[i - 1] + 8.0 * values[i] - values[i + 1]);
        } else {
            out[i] = base + h / 2.0 * (values[i - 1] + values[i]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_quartic() {
        let v = simpson(|x| x * x * x * x, 0.0, 1.0, 64);
        assert!((v - 0.2).abs() < 1e-9);
    }

    #[test]
    fn cumulative_matches_closed_form() {
        let h = 0.01;
        let vals: Vec<f64> = (0..501).map(|i| (i as f64 * h).cos()).collect();
        let cum = cumulative_simpson(&vals, h);
        for (i, c) in cum.iter().enumerate() {
            let x = i as f64 * h;
            assert!((c - x.sin()).abs() < 1e-8, "at {x}: {c} vs {}", x.sin());
        }
    }
}
