//! Embedded Dormand–Prince 5(4) integration with PI step-size control.
//!
//! The integrator is generic over the state dimension and reports every
//! accepted step (endpoint states and derivatives) to a callback, which is
//! enough to reconstruct dense output via cubic Hermite interpolation and to
//! locate events by re-integration. A rejection predicate lets callers carve
//! forbidden regions out of the state space (used for the trigonometric
//! family's pole): trial steps that land inside are retried with a smaller
//! step instead of being accepted.

use crate::{Error, Result};

/// Dormand–Prince coefficients. `A[i][j]` multiplies stage j in stage i+1;
/// `B` is the 5th-order solution weight row, `E` the (5th − 4th) error row.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const BHAT: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One accepted integration step with endpoint derivatives (Hermite data).
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepRecord<const D: usize> {
    pub t0: f64,
    pub y0: [f64; D],
    pub f0: [f64; D],
    pub t1: f64,
    pub y1: [f64; D],
    pub f1: [f64; D],
}

impl<const D: usize> StepRecord<D> {
    /// Cubic Hermite interpolant of component `k` at time `t ∈ [t0, t1]`.
    pub fn interpolate(&self, k: usize, t: f64) -> f64 {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y0[k] + h10 * h * self.f0[k] + h01 * self.y1[k] + h11 * h * self.f1[k]
    }

    /// Cubic Hermite interpolant of the full state at time `t ∈ [t0, t1]`.
    pub fn interpolate_all(&self, t: f64) -> [f64; D] {
        std::array::from_fn(|k| self.interpolate(k, t))
    }
}

/// Whether to keep integrating after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Control {
    Continue,
    /// Stop at the end of this step (the step is kept).
    Stop,
}

pub(crate) struct Options<'a, const D: usize> {
    pub rtol: f64,
    pub atol: f64,
    /// Optional hard cap on the step size.
    pub max_step: f64,
    /// Hard cap on attempted steps before giving up (guards exploratory
    /// integrations against pathological stiffness).
    pub max_steps: usize,
    /// Trial end states satisfying this predicate are rejected and the step
    /// retried with half the size.
    pub reject: Option<&'a dyn Fn(&[f64; D]) -> bool>,
}

impl<const D: usize> Default for Options<'_, D> {
    fn default() -> Self {
        Options {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 50_000_000,
            reject: None,
        }
    }
}

/// Integrate `y' = rhs(t, y)` from `(t0, y0)` to `t_end`, reporting accepted
/// steps. Returns the final `(t, y)`; early [`Control::Stop`] returns the end
/// of the stopping step.
pub(crate) fn integrate<const D: usize>(
    rhs: &dyn Fn(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    y0: [f64; D],
    t_end: f64,
    opts: &Options<'_, D>,
    mut on_step: impl FnMut(&StepRecord<D>) -> Control,
) -> Result<(f64, [f64; D])> {
    let span = t_end - t0;
    if !(span > 0.0) || !span.is_finite() {
        return Err(Error::Integration(format!(
            "integration span must be positive and finite, got [{t0}, {t_end}]"
        )));
    }
    let mut t = t0;
    let mut y = y0;
    let mut f = rhs(t, &y);
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integration(
            "right-hand side non-finite at the initial state".into(),
        ));
    }

    let mut h = initial_step(rhs, t, &y, &f, opts).min(span).min(opts.max_step);
    let h_floor = span * 1e-14;
    // PI controller memory (Hairer's DOPRI5 arrangement).
    let mut facold: f64 = 1e-4;
    const SAFETY: f64 = 0.9;
    const EXPO1: f64 = 0.2 - 0.04 * 0.75;
    const BETA: f64 = 0.04;

    let mut stages = [[0.0; D]; 7];
    for _ in 0..opts.max_steps {
        if t >= t_end {
            return Ok((t, y));
        }
        h = h.min(t_end - t).min(opts.max_step);
        if h < h_floor {
            return Err(Error::Integration(format!(
                "step size underflow at t = {t:.6e} (h = {h:.3e})"
            )));
        }

        stages[0] = f;
        let mut failed = false;
        for i in 0..6 {
            let mut yi = y;
            for (j, stage) in stages.iter().enumerate().take(i + 1) {
                let a = A[i][j];
                if a != 0.0 {
                    for k in 0..D {
                        yi[k] += h * a * stage[k];
                    }
                }
            }
            let fi = rhs(t + C_NODES[i + 1] * h, &yi);
            if fi.iter().any(|v| !v.is_finite()) {
                failed = true;
                break;
            }
            stages[i + 1] = fi;
        }
        if failed {
            h *= 0.25;
            continue;
        }

        // The 6th stage combination IS the 5th-order solution (FSAL).
        let mut y_new = y;
        for (j, stage) in stages.iter().enumerate() {
            if B[j] != 0.0 {
                for k in 0..D {
                    y_new[k] += h * B[j] * stage[k];
                }
            }
        }
        if let Some(reject) = opts.reject {
            if reject(&y_new) {
                h *= 0.5;
                continue;
            }
        }

        let mut err_sq = 0.0;
        for k in 0..D {
            let mut e = 0.0;
            for (j, stage) in stages.iter().enumerate() {
                e += (B[j] - BHAT[j]) * stage[k];
            }
            e *= h;
            let scale = opts.atol + opts.rtol * y[k].abs().max(y_new[k].abs());
            err_sq += (e / scale) * (e / scale);
        }
        let err = (err_sq / D as f64).sqrt().max(1e-30);

        if err <= 1.0 {
            let f_new = stages[6]; // FSAL: stage 7 is rhs at (t+h, y_new).
            let record = StepRecord {
                t0: t,
                y0: y,
                f0: f,
                t1: t + h,
                y1: y_new,
                f1: f_new,
            };
            t += h;
            y = y_new;
            f = f_new;
            let fac11 = err.powf(EXPO1);
            let fac = (fac11 / facold.powf(BETA) / SAFETY).clamp(0.2, 5.0);
            facold = err.max(1e-4);
            h /= fac;
            if on_step(&record) == Control::Stop {
                return Ok((t, y));
            }
        } else {
            let fac11 = err.powf(EXPO1);
            h /= (fac11 / SAFETY).min(5.0);
        }
    }
    Err(Error::Integration("step budget exhausted".into()))
}

const C_NODES: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

/// Curtis–Hairer-style cheap initial step estimate.
fn initial_step<const D: usize>(
    rhs: &dyn Fn(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    y0: &[f64; D],
    f0: &[f64; D],
    opts: &Options<'_, D>,
) -> f64 {
    let norm = |v: &[f64; D], y: &[f64; D]| -> f64 {
        let mut s = 0.0;
        for k in 0..D {
            let sc = opts.atol + opts.rtol * y[k].abs();
            s += (v[k] / sc) * (v[k] / sc);
        }
        (s / D as f64).sqrt()
    };
    let d0 = norm(y0, y0);
    let d1 = norm(f0, y0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    // One Euler probe to estimate the second derivative scale.
    let mut y1 = *y0;
    for k in 0..D {
        y1[k] += h0 * f0[k];
    }
    let f1 = rhs(t0 + h0, &y1);
    let mut diff = [0.0; D];
    for k in 0..D {
        diff[k] = f1[k] - f0[k];
    }
    let d2 = norm(&diff, y0) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// Evaluate the solution passing through `(t0, y0)` at `t* ∈ (t0, t0 + span]`
/// by direct re-integration at tight tolerance (used for event polishing).
pub(crate) fn eval_from<const D: usize>(
    rhs: &dyn Fn(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    y0: [f64; D],
    t_star: f64,
) -> Result<[f64; D]> {
    if t_star <= t0 {
        return Ok(y0);
    }
    let opts = Options {
        rtol: 1e-12,
        atol: 1e-14,
        ..Options::default()
    };
    let (_, y) = integrate(rhs, t0, y0, t_star, &opts, |_| Control::Continue)?;
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_exponential_growth() {
        let rhs = |_t: f64, y: &[f64; 1]| [y[0]];
        let opts = Options::default();
        let (t, y) = integrate(&rhs, 0.0, [1.0], 2.0, &opts, |_| Control::Continue).unwrap();
        assert_eq!(t, 2.0);
        assert_relative_eq!(y[0], 2.0f64.exp(), max_relative = 1e-9);
    }

    #[test]
    fn integrates_harmonic_oscillator_energy() {
        let rhs = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let opts = Options {
            rtol: 1e-11,
            atol: 1e-13,
            ..Options::default()
        };
        let (_, y) = integrate(&rhs, 0.0, [1.0, 0.0], 50.0, &opts, |_| Control::Continue).unwrap();
        let energy = y[0] * y[0] + y[1] * y[1];
        assert_relative_eq!(energy, 1.0, max_relative = 1e-9);
        assert_relative_eq!(y[0], 50.0f64.cos(), epsilon = 1e-7);
    }

    #[test]
    fn hermite_interpolation_tracks_solution() {
        let rhs = |t: f64, _y: &[f64; 1]| [t.cos()];
        let opts = Options::default();
        let mut records = Vec::new();
        integrate(&rhs, 0.0, [0.0], 3.0, &opts, |r| {
            records.push(*r);
            Control::Continue
        })
        .unwrap();
        // Hermite dense output is O(h⁴) between the O(h⁵) step endpoints; it
        // is used for bracketing only, with events polished by re-integration.
        for r in &records {
            let tm = 0.5 * (r.t0 + r.t1);
            assert_relative_eq!(r.interpolate(0, tm), tm.sin(), epsilon = 1e-6);
        }
    }

    #[test]
    fn stop_control_halts_early() {
        let rhs = |_t: f64, y: &[f64; 1]| [y[0]];
        let opts = Options::default();
        let (t, _) = integrate(&rhs, 0.0, [1.0], 10.0, &opts, |r| {
            if r.t1 > 1.0 {
                Control::Stop
            } else {
                Control::Continue
            }
        })
        .unwrap();
        assert!(t > 1.0 && t < 10.0);
    }

    #[test]
    fn rejects_invalid_span() {
        let rhs = |_t: f64, y: &[f64; 1]| [y[0]];
        let opts = Options::default();
        assert!(integrate(&rhs, 1.0, [1.0], 1.0, &opts, |_| Control::Continue).is_err());
    }
}
