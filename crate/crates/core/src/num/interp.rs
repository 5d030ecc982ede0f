//! Interpolation helpers: cubic Hermite sampling of dense ODE output,
//! periodic splines on the circle and Catmull-Rom tables on the torus.

/// Cubic Hermite interpolation of (x, value, slope) samples with
/// strictly increasing x. Queries outside the range clamp to the ends.
pub struct HermiteSeries {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl HermiteSeries {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, ds: Vec<f64>) -> Self {
        debug_assert!(xs.len() == ys.len() && ys.len() == ds.len());
        debug_assert!(xs.windows(2).all(|w| w[1] > w[0]));
        HermiteSeries { xs, ys, ds }
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let k = match self
            .xs
            .binary_search_by(|v| v.partial_cmp(&x).unwrap())
        {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[k + 1] - self.xs[k];
        let u = (x - self.xs[k]) / h;
        let (y0, y1) = (self.ys[k], self.ys[k + 1]);
        let (d0, d1) = (self.ds[k] * h, self.ds[k + 1] * h);
        let u2 = u * u;
        let u3 = u2 * u;
        y0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + d0 * (u3 - 2.0 * u2 + u)
            + y1 * (-2.0 * u3 + 3.0 * u2)
            + d1 * (u3 - u2)
    }
}

/// Natural periodic cubic spline on a uniform grid over [0, 2pi).
#[derive(Debug)]
pub struct PeriodicSpline {
    values: Vec<f64>,
    second: Vec<f64>,
    h: f64,
}

impl PeriodicSpline {
    /// values[i] = f(2pi i / n).
    pub fn new(values: Vec<f64>) -> Self {
        let n = values.len();
        assert!(n >= 4);
        let h = std::f64::consts::TAU / n as f64;
        // Solve the cyclic tridiagonal system for second derivatives:
        // m[i-1] + 4 m[i] + m[i+1] = 6 (y[i-1] - 2 y[i] + y[i+1]) / h^2.
        let rhs: Vec<f64> = (0..n)
            .map(|i| {
                let im = (i + n - 1) % n;
                let ip = (i + 1) % n;
                6.0 * (values[im] - 2.0 * values[i] + values[ip]) / (h * h)
            })
            .collect();
        let second = solve_cyclic_tridiag(1.0, 4.0, 1.0, &rhs);
        PeriodicSpline { values, second, h }
    }

    fn locate(&self, theta: f64) -> (usize, usize, f64) {
        let n = self.values.len();
        let t = theta.rem_euclid(std::f64::consts::TAU);
        let mut i = (t / self.h) as usize;
        if i >= n {
            i = n - 1;
        }
        let u = t - i as f64 * self.h;
        (i, (i + 1) % n, u)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let (i, j, u) = self.locate(theta);
        let h = self.h;
        let a = (h - u) / h;
        let b = u / h;
        a * self.values[i]
            + b * self.values[j]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[j]) * h * h / 6.0
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        let (i, j, u) = self.locate(theta);
        let h = self.h;
        let a = (h - u) / h;
        let b = u / h;
        (self.values[j] - self.values[i]) / h
            + ((1.0 - 3.0 * a * a) * self.second[i] + (3.0 * b * b - 1.0) * self.second[j]) * h
                / 6.0
    }
}

/// Solve a cyclic tridiagonal system with constant bands (sub, diag, sup)
/// via the Sherman-Morrison correction of the plain Thomas solve.
fn solve_cyclic_tridiag(sub: f64, diag: f64, sup: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let gamma = -diag;
    let mut b = vec![diag; n];
    b[0] -= gamma;
    b[n - 1] -= sub * sup / gamma;
    let solve = |b: &[f64], r: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        c[0] = sup / b[0];
        x[0] = r[0] / b[0];
        for i in 1..n {
            let m = b[i] - sub * c[i - 1];
            c[i] = sup / m;
            x[i] = (r[i] - sub * x[i - 1]) / m;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    };
    let x = solve(&b, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = sup;
    let z = solve(&b, &u);
    let vx = x[0] + sub / gamma * x[n - 1];
    let vz = z[0] + sub / gamma * z[n - 1];
    let factor = vx / (1.0 + vz);
    (0..n).map(|i| x[i] - factor * z[i]).collect()
}

/// Catmull-Rom weights for local coordinate u in [0, 1].
fn cr_weights(u: f64) -> [f64; 4] {
    let u2 = u * u;
    let u3 = u2 * u;
    [
        -0.5 * u3 + u2 - 0.5 * u,
        1.5 * u3 - 2.5 * u2 + 1.0,
        -1.5 * u3 + 2.0 * u2 + 0.5 * u,
        0.5 * u3 - 0.5 * u2,
    ]
}

/// Bicubic Catmull-Rom interpolation of a doubly periodic n x n table
/// over [0, 2pi)^2.
pub struct TorusTable {
    pub n: usize,
    pub data: Vec<f64>,
}

impl TorusTable {
    pub fn new(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n);
        TorusTable { n, data }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn eval(&self, a: f64, b: f64) -> f64 {
        let n = self.n;
        let h = std::f64::consts::TAU / n as f64;
        let fa = a.rem_euclid(std::f64::consts::TAU) / h;
        let fb = b.rem_euclid(std::f64::consts::TAU) / h;
        let ia = fa.floor() as usize % n;
        let ib = fb.floor() as usize % n;
        let wa = cr_weights(fa - fa.floor());
        let wb = cr_weights(fb - fb.floor());
        let mut acc = 0.0;
        for (di, wi) in wa.iter().enumerate() {
            let i = (ia + n + di - 1) % n;
            let mut row = 0.0;
            for (dj, wj) in wb.iter().enumerate() {
                let j = (ib + n + dj - 1) % n;
                row += wj * self.at(i, j);
            }
            acc += wi * row;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn periodic_spline_reproduces_trig() {
        let n = 64;
        let vals: Vec<f64> = (0..n).map(|i| (TAU * i as f64 / n as f64).sin()).collect();
        let sp = PeriodicSpline::new(vals);
        for k in 0..200 {
            let t = 0.031 * k as f64;
            assert!((sp.eval(t) - t.sin()).abs() < 2e-6);
            assert!((sp.derivative(t) - t.cos()).abs() < 2e-4);
        }
    }

    #[test]
    fn torus_table_reproduces_smooth_field() {
        let n = 48;
        let f = |a: f64, b: f64| (a.sin() * (2.0 * b).cos()) + 0.3 * (a + b).cos();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = f(TAU * i as f64 / n as f64, TAU * j as f64 / n as f64);
            }
        }
        let t = TorusTable::new(n, data);
        for k in 0..100 {
            let a = 0.063 * k as f64;
            let b = 1.7 + 0.01 * k as f64;
            assert!((t.eval(a, b) - f(a, b)).abs() < 5e-4);
        }
    }

    #[test]
    fn hermite_matches_cubic() {
        let f = |x: f64| x * x * x - x;
        let d = |x: f64| 3.0 * x * x - 1.0;
        let xs: Vec<f64> = (0..11).map(|i| i as f64 * 0.3).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let ds: Vec<f64> = xs.iter().map(|&x| d(x)).collect();
        let h = HermiteSeries::new(xs, ys, ds);
        for k in 0..30 {
            let x = 0.09 * k as f64;
            assert!((h.eval(x) - f(x)).abs() < 1e-12);
        }
    }
}
