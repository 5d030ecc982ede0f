//! Adaptive fourth-order Runge-Kutta integration with step doubling.

/// One classical RK4 step.
pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let mut y2 = *y;
    for i in 0..N {
        y2[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = f(t + 0.5 * h, &y2);
    for i in 0..N {
        y2[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = f(t + 0.5 * h, &y2);
    for i in 0..N {
        y2[i] = y[i] + h * k3[i];
    }
    let k4 = f(t + h, &y2);
    let mut out = *y;
    for i in 0..N {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

pub struct StepControl {
    /// Target local error per step.
    pub tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Hard cap on accepted steps before the driver gives up.
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            tol: crate::defaults::ODE_TOL,
            h_init: 1e-2,
            h_min: 1e-9,
            h_max: 0.25,
            max_steps: 4_000_000,
        }
    }
}

impl StepControl {
    pub fn with_tol(tol: f64) -> Self {
        StepControl {
            tol,
            ..Default::default()
        }
    }
}

pub enum StepOutcome {
    /// Reached the requested end time.
    Done,
    /// Step size underflowed or the step budget ran out at the given time.
    Truncated(f64),
}

/// Integrate y' = f(t, y) from t0 to t1 (t1 > t0), calling `on_accept`
/// after every accepted step. `on_accept` may modify the state
/// (renormalization) and is also called once for the initial state.
///
/// Error control is step doubling: a full step is compared against two
/// half steps, and the Richardson-corrected half-step result is kept.
pub fn integrate_adaptive<const N: usize, F, A>(
    f: &F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    ctrl: &StepControl,
    mut on_accept: A,
) -> ([f64; N], StepOutcome)
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    A: FnMut(f64, &mut [f64; N]),
{
    let mut t = t0;
    let mut y = y0;
    on_accept(t, &mut y);
    if t1 <= t0 {
        return (y, StepOutcome::Done);
    }
    let mut h = ctrl.h_init.min(t1 - t0).min(ctrl.h_max);
    let mut steps = 0usize;
    while t < t1 {
        if steps >= ctrl.max_steps {
            return (y, StepOutcome::Truncated(t));
        }
        let h_eff = h.min(t1 - t);
        let full = rk4_step(f, t, &y, h_eff);
        let half = rk4_step(f, t, &y, 0.5 * h_eff);
        let two = rk4_step(f, t + 0.5 * h_eff, &half, 0.5 * h_eff);
        let mut err: f64 = 0.0;
        for i in 0..N {
            let scale = 1.0 + y[i].abs();
            err = err.max(((two[i] - full[i]) / scale).abs() / 15.0);
        }
        if err <= ctrl.tol || h_eff <= ctrl.h_min {
            t += h_eff;
            for i in 0..N {
                y[i] = two[i] + (two[i] - full[i]) / 15.0;
            }
            on_accept(t, &mut y);
            steps += 1;
        }
        // PI-free step update; clamp growth to keep the dense output smooth.
        let fac = if err > 0.0 {
            (ctrl.tol / err).powf(0.2) * 0.9
        } else {
            5.0
        };
        h = (h_eff * fac.clamp(0.2, 5.0)).clamp(ctrl.h_min, ctrl.h_max);
    }
    (y, StepOutcome::Done)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let f = |_t: f64, y: &[f64; 1]| [-y[0]];
        let ctrl = StepControl::with_tol(1e-12);
        let (y, _) = integrate_adaptive(&f, 0.0, 3.0, [1.0], &ctrl, |_, _| {});
        assert!((y[0] - (-3.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let ctrl = StepControl::with_tol(1e-11);
        let (y, _) = integrate_adaptive(&f, 0.0, 20.0, [1.0, 0.0], &ctrl, |_, _| {});
        let e = y[0] * y[0] + y[1] * y[1];
        assert!((e - 1.0).abs() < 1e-8, "energy drift {e}");
    }
}
