//! Normal-extremal geodesic flow, two-point distances, and the singular-set
//! scaling probe.
//!
//! The flow integrates the canonical system of `H = ½(u² + f(x)² v²)`:
//!
//! ```text
//! ẋ = u,   ẏ = f(x)² v,   u̇ = −f(x) f′(x) v²,   v̇ = 0
//! ```
//!
//! with `u̇` derived analytically from `−∂H/∂x` so the Hamiltonian is the
//! single source of truth. `v` is carried structurally (never integrated),
//! making it bitwise constant. Distances solve the two-point boundary value
//! problem by damped Gauss–Newton shooting over deterministic seeded
//! restarts, with exact handling of the degenerate cases (coincident
//! points, horizontal segments, boundary-to-boundary dips, and the
//! trigonometric pole concatenation). An independent grid-graph oracle
//! provides rigorous upper bounds for validation.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::model::{Family, SpaceModel, X_MIN};
use crate::numerics::dijkstra::grid_shortest_path;
use crate::numerics::ode::{self, Control, Options};
use crate::numerics::quad::{adaptive, simpson};
use crate::numerics::roots::brent;
use crate::{Error, Result};

/// Base seed for the deterministic shooting restarts; recorded in every
/// distance report so failures reproduce exactly.
pub const SHOOTING_SEED: u64 = 0x5EED_CAFE;

/// Threshold below which an x-coordinate counts as lying on the singular
/// set for boundary-value purposes.
const BOUNDARY_EPS: f64 = 1e-9;

/// Stand-off from the trigonometric pole where the flow reports a hit.
const POLE_EPS: f64 = 1e-9;

/// Canonical phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicState {
    pub x: f64,
    pub y: f64,
    /// Momentum dual to x.
    pub u: f64,
    /// Momentum dual to y; a constant of motion.
    pub v: f64,
}

/// Why a trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Reached the requested time.
    Completed,
    /// x crossed the singular set x = 0 (v ≠ 0 solutions stop there).
    SingularHit,
    /// x reached the trigonometric pole x = π/2.
    PoleHit,
}

/// Integrated trajectory with its Riemannian length `√(2H₀)·T`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// (t, state) samples in increasing t, including both endpoints.
    pub samples: Vec<(f64, GeodesicState)>,
    pub length: f64,
    pub termination: Termination,
}

impl Trajectory {
    /// Final time reached.
    pub fn duration(&self) -> f64 {
        self.samples.last().map(|(t, _)| *t).unwrap_or(0.0)
    }

    /// Final state.
    pub fn end(&self) -> GeodesicState {
        self.samples
            .last()
            .map(|(_, s)| *s)
            .expect("trajectory has samples")
    }

    /// Smallest x over the recorded samples.
    pub fn min_x(&self) -> f64 {
        self.samples
            .iter()
            .map(|(_, s)| s.x)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Hamiltonian `½(u² + f(x)² v²)`. States with `v = 0` are admitted at any
/// x (the warp factor is not evaluated); otherwise x must be interior.
pub fn hamiltonian(space: &SpaceModel, s: &GeodesicState) -> Result<f64> {
    for (name, val) in [("x", s.x), ("y", s.y), ("u", s.u), ("v", s.v)] {
        if !val.is_finite() {
            return Err(Error::Domain(format!("non-finite state component {name} = {val}")));
        }
    }
    if s.v == 0.0 {
        return Ok(0.5 * s.u * s.u);
    }
    let (_, hi) = space.domain();
    if s.x < X_MIN || s.x >= hi {
        return Err(Error::Domain(format!(
            "x = {} is on or outside the domain boundary with v = {} != 0",
            s.x, s.v
        )));
    }
    Ok(0.5 * (s.u * s.u + space.warp_sq(s.x) * s.v * s.v))
}

fn validate_flow_tol(tol: f64) -> Result<()> {
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::Invalid(format!(
            "flow tolerance must lie in [1e-12, 1e-4], got {tol}"
        )));
    }
    Ok(())
}

/// Energy of a flow start. Unlike the public [`hamiltonian`], singular-set
/// starts (x = 0, v ≠ 0) are admitted through the continuous limit
/// `f(0)² = 0`, which is what boundary dips launch from.
fn flow_energy(space: &SpaceModel, s: &GeodesicState) -> Result<f64> {
    for (name, val) in [("x", s.x), ("y", s.y), ("u", s.u), ("v", s.v)] {
        if !val.is_finite() {
            return Err(Error::Domain(format!("non-finite state component {name} = {val}")));
        }
    }
    if s.v == 0.0 {
        return Ok(0.5 * s.u * s.u);
    }
    let (_, hi) = space.domain();
    if s.x < 0.0 || s.x >= hi {
        return Err(Error::Domain(format!(
            "x = {} is outside the closed domain with v = {} != 0",
            s.x, s.v
        )));
    }
    Ok(0.5 * (s.u * s.u + space.warp_sq(s.x) * s.v * s.v))
}

/// Analytic v = 0 flow: a straight x-line. Stops at the trigonometric pole.
fn flow_meridian(space: &SpaceModel, s0: &GeodesicState, t_end: f64) -> Trajectory {
    let mut t_stop = t_end;
    let mut termination = Termination::Completed;
    if space.family() == Family::Sphere && s0.u != 0.0 {
        let wall = if s0.u > 0.0 {
            FRAC_PI_2 - POLE_EPS
        } else {
            -FRAC_PI_2 + POLE_EPS
        };
        let t_hit = (wall - s0.x) / s0.u;
        if t_hit >= 0.0 && t_hit < t_end {
            t_stop = t_hit;
            termination = Termination::PoleHit;
        }
    }
    let n = 64;
    let samples = (0..=n)
        .map(|i| {
            let t = t_stop * (i as f64) / (n as f64);
            (
                t,
                GeodesicState {
                    x: s0.x + s0.u * t,
                    y: s0.y,
                    u: s0.u,
                    v: 0.0,
                },
            )
        })
        .collect();
    Trajectory {
        samples,
        length: s0.u.abs() * t_stop,
        termination,
    }
}

/// Integrate the canonical flow for time `T` with per-step error ≤ `tol`.
///
/// The trajectory stops early with a [`Termination::SingularHit`] when x
/// crosses 0 with `v ≠ 0`, or [`Termination::PoleHit`] at the
/// trigonometric pole.
pub fn flow(space: &SpaceModel, s0: &GeodesicState, t_end: f64, tol: f64) -> Result<Trajectory> {
    flow_impl(space, s0, t_end, tol, 50_000_000)
}

/// Step budget for exploratory shooting probes: deep enough for every
/// legitimate minimizer flight, small enough that a pathological probe
/// (wild momenta, grazing crossings) fails fast instead of stalling a
/// whole restart schedule.
const PROBE_MAX_STEPS: usize = 150_000;

/// Residual-evaluation budget per shooting restart (Jacobian and line
/// search included): well past what a converging solve needs, so only
/// stagnating restarts are cut off.
const PROBE_MAX_EVALS: usize = 240;

fn flow_impl(
    space: &SpaceModel,
    s0: &GeodesicState,
    t_end: f64,
    tol: f64,
    max_steps: usize,
) -> Result<Trajectory> {
    validate_flow_tol(tol)?;
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::Invalid(format!("T must be positive and finite, got {t_end}")));
    }
    let h0 = flow_energy(space, s0)?;
    if s0.v == 0.0 {
        return Ok(flow_meridian(space, s0, t_end));
    }
    let v = s0.v;
    let rhs = move |_t: f64, y: &[f64; 3]| -> [f64; 3] {
        [y[2], space.warp_sq(y[0]) * v, -space.warp_force(y[0]) * v * v]
    };
    let is_sphere = space.family() == Family::Sphere;
    let reject_wall = FRAC_PI_2 - 1e-12;
    let reject = move |y: &[f64; 3]| is_sphere && y[0].abs() >= reject_wall;
    let opts = Options {
        rtol: tol * 1e-2,
        atol: tol * 1e-3,
        max_step: f64::INFINITY,
        max_steps,
        reject: Some(&reject),
    };
    let y0 = [s0.x, s0.y, s0.u];
    // The start may sit exactly on x = 0 (boundary dips); the singular-set
    // crossing detector arms only after the trajectory has moved interior.
    let mut armed = s0.x > BOUNDARY_EPS;
    let mut samples: Vec<(f64, GeodesicState)> = vec![(0.0, *s0)];
    let mut termination = Termination::Completed;
    let mut event: Option<(f64, [f64; 3], f64)> = None; // (t0_step, y0_step, t_event)

    let push = |samples: &mut Vec<(f64, GeodesicState)>, t: f64, y: &[f64; 3]| {
        samples.push((
            t,
            GeodesicState {
                x: y[0],
                y: y[1],
                u: y[2],
                v,
            },
        ));
    };

    let outcome = ode::integrate(&rhs, 0.0, y0, t_end, &opts, |step| {
        // Pole proximity (trigonometric family only).
        if is_sphere && step.y1[0].abs() >= FRAC_PI_2 - POLE_EPS {
            let wall = (FRAC_PI_2 - POLE_EPS) * step.y1[0].signum();
            let t_ev = locate_in_step(step, |y| y[0] - wall);
            event = Some((step.t0, step.y0, t_ev));
            termination = Termination::PoleHit;
            return Control::Stop;
        }
        // Singular-set crossing.
        if armed && step.y1[0] <= 0.0 {
            let t_ev = locate_in_step(step, |y| y[0]);
            event = Some((step.t0, step.y0, t_ev));
            termination = Termination::SingularHit;
            return Control::Stop;
        }
        if !armed && step.y1[0] > BOUNDARY_EPS {
            armed = true;
        }
        let t_mid = 0.5 * (step.t0 + step.t1);
        let mid = step.interpolate_all(t_mid);
        push(&mut samples, t_mid, &mid);
        push(&mut samples, step.t1, &step.y1);
        Control::Continue
    });

    let (t_final, _) = outcome?;
    if let Some((t0s, y0s, t_ev)) = event {
        // Polish the event state by re-integrating the partial step tightly.
        let y_ev = ode::eval_from(&rhs, t0s, y0s, t_ev)?;
        push(&mut samples, t_ev, &y_ev);
        return Ok(Trajectory {
            samples,
            length: (2.0 * h0).sqrt() * t_ev,
            termination,
        });
    }
    Ok(Trajectory {
        samples,
        length: (2.0 * h0).sqrt() * t_final,
        termination: Termination::Completed,
    })
}

/// Bisect a scalar event function on a step's dense interpolant.
fn locate_in_step(step: &ode::StepRecord<3>, g: impl Fn(&[f64; 3]) -> f64) -> f64 {
    let span = step.t1 - step.t0;
    let ga = g(&step.y0);
    let gb = g(&step.y1);
    if ga == 0.0 {
        return step.t0;
    }
    if ga.signum() == gb.signum() {
        // Event reached only at the step end (e.g. overshoot past a wall
        // in the last sub-ulp); report the endpoint.
        return step.t1;
    }
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut fa = ga;
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        let ym = step.interpolate_all(step.t0 + m * span);
        let fm = g(&ym);
        if fm == 0.0 {
            return step.t0 + m * span;
        }
        if fa.signum() == fm.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    step.t0 + 0.5 * (a + b) * span
}

/// How a reported distance was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    /// Converged normal-extremal shooting.
    Shooting,
    /// Identical endpoints.
    Coincident,
    /// Same-y endpoints: the horizontal segment is exactly minimizing.
    Horizontal,
    /// Both endpoints on the singular set: symmetric dip solved by
    /// bracketing the monotone return map.
    BoundaryDip,
    /// Trigonometric concatenation of two meridians through the pole.
    PoleMeridian,
}

/// Distance answer with provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceReport {
    pub d: f64,
    pub method: DistanceMethod,
    /// Number of shooting restarts that converged (0 for exact methods).
    pub converged_shots: usize,
    pub seed: u64,
}

struct ShotResult {
    d: f64,
    min_x: f64,
    index: usize,
}

/// Canonicalized endpoint pair: y-translation and y-reflection invariance
/// plus time reversal let every problem be posed as
/// `(xa, 0) → (xb, dy)` with `xa ≤ xb`, `dy ≥ 0`. This makes
/// `d(p,q) = d(q,p)` and y-reflection symmetry exact by construction.
struct CanonicalPair {
    xa: f64,
    xb: f64,
    dy: f64,
}

fn canonicalize(space: &SpaceModel, p: (f64, f64), q: (f64, f64)) -> Result<CanonicalPair> {
    let (_, hi) = space.domain();
    for (pt, name) in [(p, "p"), (q, "q")] {
        if !pt.0.is_finite() || !pt.1.is_finite() {
            return Err(Error::Domain(format!("endpoint {name} has non-finite coordinates")));
        }
        if pt.0 < 0.0 {
            return Err(Error::Domain(format!(
                "endpoint {name} has x = {} outside the closed half-space",
                pt.0
            )));
        }
        if pt.0 >= hi {
            return Err(Error::Domain(format!(
                "endpoint {name} has x = {} at or beyond the far boundary {hi}",
                pt.0
            )));
        }
    }
    let (mut xa, mut xb) = (p.0, q.0);
    if xa > xb {
        std::mem::swap(&mut xa, &mut xb);
    }
    Ok(CanonicalPair {
        xa,
        xb,
        dy: (q.1 - p.1).abs(),
    })
}

/// Metric length of the straight coordinate segment a → b (an admissible
/// path, hence an upper bound and a natural time scale for shooting).
fn chord_length(space: &SpaceModel, a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let lo = X_MIN * 2.0;
    let integrand = |s: f64| {
        let x = (a.0 + s * dx).max(lo);
        space
            .metric_length(x, dx, dy)
            .unwrap_or(f64::INFINITY)
    };
    simpson(&integrand, 0.0, 1.0, 96)
}

/// One damped Gauss–Newton solve of the 2-parameter shooting residual.
/// Returns (params, converged) with the final residual norm folded into
/// the convergence flag.
fn gauss_newton_2(
    mut residual: impl FnMut(&[f64; 2]) -> Option<[f64; 2]>,
    start: [f64; 2],
    scale: [f64; 2],
    tol: f64,
) -> Option<[f64; 2]> {
    let mut p = start;
    let mut r = residual(&p)?;
    let mut rn = r[0].hypot(r[1]);
    for _ in 0..60 {
        if rn <= tol {
            return Some(p);
        }
        // Forward-difference Jacobian.
        let mut jac = [[0.0f64; 2]; 2];
        for j in 0..2 {
            let h = 1e-7 * scale[j].abs().max(1e-3);
            let mut pj = p;
            pj[j] += h;
            let rj = residual(&pj)?;
            jac[0][j] = (rj[0] - r[0]) / h;
            jac[1][j] = (rj[1] - r[1]) / h;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-300 || !det.is_finite() {
            return None;
        }
        let dx = [
            (r[0] * jac[1][1] - r[1] * jac[0][1]) / det,
            (r[1] * jac[0][0] - r[0] * jac[1][0]) / det,
        ];
        // Backtracking line search on the residual norm.
        let mut lambda = 1.0f64;
        let mut improved = false;
        for _ in 0..8 {
            let cand = [p[0] - lambda * dx[0], p[1] - lambda * dx[1]];
            if cand[1] > 0.0 {
                if let Some(rc) = residual(&cand) {
                    let rcn = rc[0].hypot(rc[1]);
                    if rcn < rn {
                        p = cand;
                        r = rc;
                        rn = rcn;
                        improved = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            return None;
        }
    }
    if rn <= tol {
        Some(p)
    } else {
        None
    }
}

const SHOOT_FLOW_TOL: f64 = 1e-9;

/// Interior-to-interior shooting: parameters (φ, T), initial covector
/// (cos φ, sin φ / f(xa)) of unit speed.
fn shoot_interior(
    space: &SpaceModel,
    pair: &CanonicalPair,
    restarts: usize,
) -> (Vec<ShotResult>, usize) {
    let f_a = space.profile(pair.xa).map(|p| p.f).unwrap_or(1.0);
    // With f(xa) this small the covector angle cannot resolve the momenta
    // that move in y at all (sin φ / f(xa) jumps by more than any useful v
    // per ulp of φ); the quadrature sweep owns this regime.
    if f_a < 1e-10 && pair.dy > 0.0 {
        return (Vec::new(), 0);
    }
    let target = (pair.xb, pair.dy);
    // Two natural time scales: the straight chord (tight away from the
    // singular set) and a dip-like scale that stays sane when the chord
    // cost blows up near x = 0.
    let chord = chord_length(space, (pair.xa, 0.0), target);
    let dip_scale = 3.0 * pair.dy.sqrt() + 1.5 * (pair.xb - pair.xa) + pair.xa + 0.01;
    let l_est = chord.min(dip_scale).max(1e-6);
    let phi_aim = (pair.dy / f_a).atan2(pair.xb - pair.xa);
    let res_tol = 1e-9 * (1.0 + pair.xb.abs() + pair.dy.abs());
    // Concentric exploration: most restarts stay near the aim direction,
    // the rest sweep the full covector circle.
    const SPREADS: [f64; 4] = [0.05, 0.2, 0.7, PI];

    let solve_one = |i: usize| -> Option<ShotResult> {
        let mut rng = ChaCha8Rng::seed_from_u64(SHOOTING_SEED ^ (i as u64));
        let (phi0, t0) = if i == 0 {
            (phi_aim, l_est)
        } else {
            let spread = SPREADS[(i - 1) % SPREADS.len()];
            (
                phi_aim + spread * rng.gen_range(-1.0f64..1.0),
                l_est * (rng.gen_range(-0.9f64..0.9)).exp(),
            )
        };
        let evals = std::cell::Cell::new(0usize);
        let residual = |p: &[f64; 2]| -> Option<[f64; 2]> {
            if evals.replace(evals.get() + 1) >= PROBE_MAX_EVALS {
                return None;
            }
            let s0 = GeodesicState {
                x: pair.xa,
                y: 0.0,
                u: p[0].cos(),
                v: p[0].sin() / f_a,
            };
            let traj = flow_impl(space, &s0, p[1], SHOOT_FLOW_TOL, PROBE_MAX_STEPS).ok()?;
            let end = traj.end();
            Some([end.x - target.0, end.y - target.1])
        };
        let sol = gauss_newton_2(residual, [phi0, t0], [1.0, l_est], res_tol)?;
        // Re-fly the converged shot once to harvest its trajectory.
        let s0 = GeodesicState {
            x: pair.xa,
            y: 0.0,
            u: sol[0].cos(),
            v: sol[0].sin() / f_a,
        };
        let traj = flow(space, &s0, sol[1], SHOOT_FLOW_TOL).ok()?;
        if traj.termination != Termination::Completed {
            return None;
        }
        Some(ShotResult {
            d: sol[1],
            min_x: traj.min_x().min(pair.xa).min(pair.xb),
            index: i,
        })
    };

    let shots: Vec<ShotResult> = (0..restarts)
        .into_par_iter()
        .filter_map(solve_one)
        .collect();
    let converged = shots.len();
    (shots, converged)
}

/// One-sweep boundary-value solve by reduction to quadrature.
///
/// Along a unit-speed geodesic the momentum `v` is conserved and
/// `dx/dt = ±sqrt(1 − f(x)² v²)`, so the path turns in x exactly where
/// `f(x_top) v = 1`. For a warp that increases on the sweep range, time
/// and y-gain from height `x_end` up to `x_top` are explicit integrals,
/// and matching the target offset `dy` becomes scalar root finding in the
/// turning height. This stays well conditioned where angle-based shooting
/// loses all resolution (warp values spanning hundreds of decades near
/// the singular set, where minimizers bow far upward).
fn profile_sweep(space: &SpaceModel, pair: &CanonicalPair, index: usize) -> Option<ShotResult> {
    if pair.dy <= 0.0 {
        return None;
    }
    let (_, hi_dom) = space.domain();
    let x_lo = pair.xa.max(2.0 * X_MIN);
    let f_at = |x: f64| -> Option<(f64, f64)> {
        let p = space.profile(x).ok()?;
        if p.df > 0.0 && p.f.is_finite() && p.f > 0.0 {
            Some((p.f, p.df))
        } else {
            None
        }
    };
    // 1 − (f(x)/f_top)² for a point `delta` below the turning height.
    // `delta` is supplied by the caller in exact arithmetic (s², or
    // gap + (xb − x)) because x_top − x loses everything to rounding near
    // the top. Evaluating 1 − r² directly would carry absolute rounding
    // noise ~1e−16 over the whole near-top band — noise the adaptive error
    // estimate cannot integrate past, so it bisects the band down to the
    // width floor. Instead the log-warp difference ΔL = ln f(x) − ln f(x_top)
    // is assembled per family from exact increments (half-angle identities
    // driven by `delta`, ratios taken before products so nothing overflows)
    // and the result −expm1(2ΔL) is accurate at every scale.
    let one_minus_rsq = |x: f64, delta: f64, top: (f64, f64, f64)| -> f64 {
        let (x_top, _, _) = top;
        let x = x.max(2.0 * X_MIN);
        let alpha = space.alpha();
        let dl = match space.family() {
            Family::Plane => alpha * (-delta / x_top).ln_1p(),
            Family::Sphere => {
                let m = 0.5 * (x + x_top);
                let half = (0.5 * delta).sin();
                alpha * (-2.0 * half * (m.cos() / x_top.sin())).ln_1p()
                    - (2.0 * half * (m.sin() / x_top.cos())).ln_1p()
            }
            Family::Hyperbolic => {
                let m = 0.5 * (x + x_top);
                let half = (0.5 * delta).sinh();
                alpha * (-2.0 * half * (m.cosh() / x_top.sinh())).ln_1p()
                    - (-2.0 * half * (m.sinh() / x_top.cosh())).ln_1p()
            }
            Family::Infinity => -delta / (x * x_top),
        };
        (-(2.0 * dl).exp_m1()).max(1e-300)
    };
    let quad_tol = 1e-12;
    // Branch integrals from x_end up to the turning height, with the
    // substitution x = x_top − s² flattening the turning singularity.
    let branch = |top: (f64, f64, f64), x_end: f64, want_time: bool| -> Option<f64> {
        let (x_top, f_top, _) = top;
        if x_end >= x_top {
            return Some(0.0);
        }
        let s_max = (x_top - x_end).sqrt();
        let g = |s: f64| -> f64 {
            let x = (x_top - s * s).clamp(x_end, x_top);
            let om = one_minus_rsq(x, s * s, top);
            let denom = om.sqrt();
            if want_time {
                2.0 * s / denom
            } else {
                2.0 * s * (1.0 - om) * f_top / denom
            }
        };
        let scale = if want_time { s_max * s_max } else { s_max * s_max * f_top };
        adaptive(&g, 0.0, s_max, quad_tol * (1.0 + scale)).ok()
    };
    // Monotone-climb integrals for the sub-turning momentum v = 1/f_top;
    // `gap` is the exact height margin x_top − xb. Near-critical (turning
    // level grazing xb) the x-space integrand spikes like 1/√(gap + xb − x)
    // and adaptive refinement at the xb endpoint becomes very expensive, so
    // that regime is computed as a difference of substituted branch
    // integrals instead (the subtracted tail is small there, so no
    // cancellation); away from it the direct x integral is both cheap and
    // free of the differencing cancellation that grows with the gap.
    let mono = |top: (f64, f64, f64), gap: f64, want_time: bool| -> Option<f64> {
        let (_, f_top, df_top) = top;
        if 2.0 * df_top / f_top * gap < 1e-4 {
            let full = branch(top, x_lo, want_time)?;
            let tail = branch(top, pair.xb, want_time)?;
            return Some(full - tail);
        }
        let g = |x: f64| -> f64 {
            let om = one_minus_rsq(x, gap + (pair.xb - x), top);
            let denom = om.sqrt();
            if want_time {
                1.0 / denom
            } else {
                (1.0 - om) * f_top / denom
            }
        };
        adaptive(&g, x_lo, pair.xb, quad_tol * (1.0 + f_top)).ok()
    };

    // Critical y-gain: turning exactly at xb.
    let (f_b, df_b) = f_at(pair.xb)?;
    let y_crit = branch((pair.xb, f_b, df_b), x_lo, false)?;
    let arc_family = pair.dy >= y_crit;

    // y-gain of the candidate with turning height xb + gap, minus target.
    let mut residual = |gap: f64| -> Result<f64> {
        let x_top = pair.xb + gap;
        let (f_top, df_top) = f_at(x_top).ok_or_else(|| {
            Error::NoConvergence("warp not increasing at sweep height".into())
        })?;
        let top = (x_top, f_top, df_top);
        let err = || Error::Quadrature("sweep branch integral failed".into());
        let y = if arc_family {
            branch(top, x_lo, false).ok_or_else(err)?
                + branch(top, pair.xb, false).ok_or_else(err)?
        } else {
            mono(top, gap, false).ok_or_else(err)?
        };
        Ok(y - pair.dy)
    };

    // Bracket the root in the turning-height gap: at gap → 0 both families
    // approach y_crit (arc from below the target, monotone from above), and
    // the far end over- or under-shoots once the gap is large enough.
    let cap = if hi_dom.is_finite() {
        (hi_dom - pair.xb) * (1.0 - 1e-12)
    } else {
        1e7
    };
    let mut gap_lo = (1e-9 * (1.0 + pair.xb)).min(0.5 * cap);
    let mut r_lo = residual(gap_lo).ok()?;
    if (arc_family && r_lo > 0.0) || (!arc_family && r_lo < 0.0) {
        // Degenerate bracket start (root tighter than the seed gap):
        // shrink toward zero a few times before giving up.
        for _ in 0..8 {
            gap_lo *= 1e-2;
            r_lo = residual(gap_lo).ok()?;
            if (arc_family && r_lo <= 0.0) || (!arc_family && r_lo >= 0.0) {
                break;
            }
        }
    }
    let mut gap_hi = gap_lo;
    let mut bracketed = false;
    let mut f_prev = 0.0f64;
    for _ in 0..48 {
        if gap_hi >= cap {
            break;
        }
        gap_hi = (gap_hi * 4.0).min(cap);
        // For bounded warps (tanh-like profiles) f saturates in f64 well
        // before the domain ends; past that height the turning level is no
        // longer resolvable and the integrands degrade to noise.
        let f_here = f_at(pair.xb + gap_hi).map(|(f, _)| f).unwrap_or(f64::NAN);
        if !(f_here > f_prev * (1.0 + 1e-12)) {
            break;
        }
        f_prev = f_here;
        match residual(gap_hi) {
            Ok(r) if r.is_finite() => {
                if r_lo == 0.0 || r_lo * r <= 0.0 {
                    bracketed = true;
                    break;
                }
                gap_lo = gap_hi;
                r_lo = r;
            }
            // Warp stopped increasing (or quadrature failed) above this
            // height: the sweep family ends here.
            _ => break,
        }
    }
    if !bracketed {
        return None;
    }
    let gap = if r_lo == 0.0 {
        gap_lo
    } else {
        brent(&mut residual, gap_lo, gap_hi, 1e-13 * (1.0 + gap_hi)).ok()?
    };

    let x_top = pair.xb + gap;
    let (f_top, df_top) = f_at(x_top)?;
    let top = (x_top, f_top, df_top);
    // Verify the matched y-gain and assemble the length.
    let (y, t) = if arc_family {
        let ya = branch(top, x_lo, false)?;
        let ta = branch(top, x_lo, true)?;
        let yb = branch(top, pair.xb, false)?;
        let tb = branch(top, pair.xb, true)?;
        (ya + yb, ta + tb)
    } else {
        (mono(top, gap, false)?, mono(top, gap, true)?)
    };
    if !(t > 0.0) || (y - pair.dy).abs() > 1e-6 * (1.0 + pair.dy) {
        return None;
    }
    Some(ShotResult {
        d: t,
        min_x: x_lo,
        index,
    })
}

/// Boundary-to-interior shooting: initial state (0, 0, 1, v), parameters
/// (v, T).
fn shoot_from_boundary(
    space: &SpaceModel,
    pair: &CanonicalPair,
    restarts: usize,
) -> (Vec<ShotResult>, usize) {
    let target = (pair.xb, pair.dy);
    let l_est = ((pair.xb * pair.xb) + pair.dy * pair.dy).sqrt().max(1e-6);
    let res_tol = 1e-9 * (1.0 + pair.xb.abs() + pair.dy.abs());
    // v scale: the dip turning point satisfies f(x*)|v| = 1.
    let x_scale = (0.5 * pair.xb).max(1e-3);
    let v_scale = space.profile(x_scale).map(|p| 1.0 / p.f).unwrap_or(1.0);

    let solve_one = |i: usize| -> Option<ShotResult> {
        let mut rng = ChaCha8Rng::seed_from_u64(SHOOTING_SEED ^ 0x9E37 ^ (i as u64));
        let v0 = if pair.dy == 0.0 {
            0.0
        } else {
            v_scale * (rng.gen_range(-2.0f64..2.0)).exp()
        };
        let t0 = l_est * (rng.gen_range(-0.7f64..0.7)).exp();
        let evals = std::cell::Cell::new(0usize);
        let residual = |p: &[f64; 2]| -> Option<[f64; 2]> {
            if evals.replace(evals.get() + 1) >= PROBE_MAX_EVALS {
                return None;
            }
            let s0 = GeodesicState {
                x: 0.0,
                y: 0.0,
                u: 1.0,
                v: p[0],
            };
            let traj = flow_impl(space, &s0, p[1], SHOOT_FLOW_TOL, PROBE_MAX_STEPS).ok()?;
            let end = traj.end();
            Some([end.x - target.0, end.y - target.1])
        };
        let sol = gauss_newton_2(residual, [v0, t0], [v_scale.max(1e-3), l_est], res_tol)?;
        let s0 = GeodesicState {
            x: 0.0,
            y: 0.0,
            u: 1.0,
            v: sol[0],
        };
        let traj = flow(space, &s0, sol[1], SHOOT_FLOW_TOL).ok()?;
        if traj.termination != Termination::Completed {
            return None;
        }
        Some(ShotResult {
            d: sol[1],
            min_x: 0.0,
            index: i,
        })
    };

    let shots: Vec<ShotResult> = (0..restarts)
        .into_par_iter()
        .filter_map(solve_one)
        .collect();
    let converged = shots.len();
    (shots, converged)
}

/// Symmetric boundary-to-boundary dip: flow (0,0,1,v) to its first return
/// to the singular set; the return displacement Y(v) decreases in v, so a
/// bracketed root solve pins v and the distance is the flight time.
fn boundary_dip(space: &SpaceModel, dy: f64) -> Result<(f64, f64)> {
    let flight = |v: f64| -> Result<(f64, f64)> {
        let s0 = GeodesicState {
            x: 0.0,
            y: 0.0,
            u: 1.0,
            v,
        };
        let traj = flow(space, &s0, 1e6, 1e-10)?;
        if traj.termination != Termination::SingularHit {
            return Err(Error::NoConvergence(format!(
                "dip flight at v = {v} did not return to the singular set"
            )));
        }
        let end = traj.end();
        Ok((end.y.abs(), traj.duration()))
    };
    // A dip turns around where f(x*)|v| = 1, so it returns only when |v|
    // exceeds the reciprocal of the warp supremum: 0 for the unbounded
    // warps, 1 for the flat-at-infinity family. Bracket Y(v) = dy in the
    // excess s = v - v_floor between a small s (wide dip, large Y) and a
    // large s (narrow dip, small Y).
    let v_floor = if space.family() == Family::Infinity { 1.0 } else { 0.0 };
    let mut s_lo = 1.0f64;
    let mut y_lo = flight(v_floor + s_lo)?.0;
    let mut grow = 0;
    while y_lo < dy {
        s_lo /= 8.0;
        y_lo = flight(v_floor + s_lo)?.0;
        grow += 1;
        if grow > 40 {
            return Err(Error::NoConvergence(format!(
                "could not bracket the dip displacement {dy} from below"
            )));
        }
    }
    let mut s_hi = s_lo * 8.0;
    let mut y_hi = flight(v_floor + s_hi)?.0;
    grow = 0;
    while y_hi > dy {
        s_hi *= 8.0;
        y_hi = flight(v_floor + s_hi)?.0;
        grow += 1;
        if grow > 40 {
            return Err(Error::NoConvergence(format!(
                "could not bracket the dip displacement {dy} from above"
            )));
        }
    }
    let mut g = |s: f64| flight(v_floor + s).map(|(y, _)| y - dy);
    let s_star = brent(&mut g, s_lo, s_hi, 1e-13 * (v_floor + s_hi))?;
    let (_, t_return) = flight(v_floor + s_star)?;
    Ok((t_return, v_floor + s_star))
}

/// Distance with full provenance. See [`distance_bvp`] for the plain value.
pub fn distance_report(
    space: &SpaceModel,
    p: (f64, f64),
    q: (f64, f64),
    restarts: usize,
) -> Result<DistanceReport> {
    let (report, _) = distance_inner(space, p, q, restarts)?;
    Ok(report)
}

/// Minimal geodesic length between p and q in the closed half-space.
///
/// Shooting restarts are deterministic (seed recorded in the report) and
/// explored concurrently; the reported value is the minimum over all
/// converged shots and exact-mode candidates.
pub fn distance_bvp(space: &SpaceModel, p: (f64, f64), q: (f64, f64), restarts: usize) -> Result<f64> {
    Ok(distance_report(space, p, q, restarts)?.d)
}

fn distance_inner(
    space: &SpaceModel,
    p: (f64, f64),
    q: (f64, f64),
    restarts: usize,
) -> Result<(DistanceReport, f64)> {
    if restarts < 8 {
        return Err(Error::Invalid(format!(
            "restarts must be at least 8, got {restarts}"
        )));
    }
    let pair = canonicalize(space, p, q)?;
    let on_boundary_a = pair.xa <= BOUNDARY_EPS;
    let on_boundary_b = pair.xb <= BOUNDARY_EPS;

    // Coincident points.
    if pair.xa == pair.xb && pair.dy == 0.0 {
        return Ok((
            DistanceReport {
                d: 0.0,
                method: DistanceMethod::Coincident,
                converged_shots: 0,
                seed: SHOOTING_SEED,
            },
            pair.xa,
        ));
    }
    // Same-y pairs: the horizontal segment is exactly minimizing (any
    // admissible path has length ≥ ∫|dx| ≥ |Δx|).
    if pair.dy == 0.0 {
        return Ok((
            DistanceReport {
                d: pair.xb - pair.xa,
                method: DistanceMethod::Horizontal,
                converged_shots: 0,
                seed: SHOOTING_SEED,
            },
            pair.xa,
        ));
    }
    // Both endpoints on the singular set.
    if on_boundary_a && on_boundary_b {
        let (d, _) = boundary_dip(space, pair.dy)?;
        return Ok((
            DistanceReport {
                d,
                method: DistanceMethod::BoundaryDip,
                converged_shots: 0,
                seed: SHOOTING_SEED,
            },
            0.0,
        ));
    }

    let (mut shots, mut converged) = if on_boundary_a {
        shoot_from_boundary(space, &pair, restarts)
    } else {
        shoot_interior(space, &pair, restarts)
    };
    // The turning-height sweep is the fallback for regimes where angle
    // shooting cannot resolve the covector (warp values spanning hundreds of
    // orders of magnitude near the singular line); when shooting converged it
    // already owns the answer and the sweep would only duplicate work.
    if shots.is_empty() {
        if let Some(sweep) = profile_sweep(space, &pair, restarts) {
            converged += 1;
            shots.push(sweep);
        }
    }

    let best_shot = shots
        .into_iter()
        .min_by(|a, b| a.d.total_cmp(&b.d).then(a.index.cmp(&b.index)));

    // Pole concatenation candidate (trigonometric family): two meridians
    // meeting at the pole point, absorbing any y-offset.
    let pole = if space.family() == Family::Sphere {
        Some((FRAC_PI_2 - pair.xa) + (FRAC_PI_2 - pair.xb))
    } else {
        None
    };

    match (best_shot, pole) {
        (Some(s), Some(dp)) if dp < s.d => Ok((
            DistanceReport {
                d: dp,
                method: DistanceMethod::PoleMeridian,
                converged_shots: converged,
                seed: SHOOTING_SEED,
            },
            pair.xa.min(pair.xb),
        )),
        (Some(s), _) => Ok((
            DistanceReport {
                d: s.d,
                method: DistanceMethod::Shooting,
                converged_shots: converged,
                seed: SHOOTING_SEED,
            },
            s.min_x,
        )),
        (None, Some(dp)) => Ok((
            DistanceReport {
                d: dp,
                method: DistanceMethod::PoleMeridian,
                converged_shots: 0,
                seed: SHOOTING_SEED,
            },
            pair.xa.min(pair.xb),
        )),
        (None, None) => Err(Error::NoConvergence(format!(
            "no shooting restart converged for ({}, {}) -> ({}, {}) with {restarts} restarts (seed {SHOOTING_SEED:#x})",
            p.0, p.1, q.0, q.1
        ))),
    }
}

/// Smallest x visited by the minimizing geodesic between two interior
/// points (half-space convexity probe). For p = q returns x(p).
pub fn convexity_probe(space: &SpaceModel, p: (f64, f64), q: (f64, f64)) -> Result<f64> {
    if p.0 <= 0.0 || q.0 <= 0.0 {
        return Err(Error::Domain(
            "convexity probe requires endpoints with x > 0".into(),
        ));
    }
    let (_, min_x) = distance_inner(space, p, q, 16)?;
    Ok(min_x)
}

/// Independent upper-bound oracle: shortest path on an n×n 8-neighbor grid
/// over a margined bounding box, with edge weights from the metric at edge
/// midpoints, plus exact straight-chord connections from the endpoints to
/// their nearest nodes (so the reported value is the length of a concrete
/// admissible path).
pub fn distance_graph_oracle(
    space: &SpaceModel,
    p: (f64, f64),
    q: (f64, f64),
    n: usize,
) -> Result<f64> {
    if n < 100 {
        return Err(Error::Invalid(format!(
            "oracle grid needs at least 100 nodes per axis, got {n}"
        )));
    }
    let pair_check = canonicalize(space, p, q)?;
    let singular = space.alpha() > 0.0 || space.family() == Family::Infinity;
    if singular && (p.0 <= BOUNDARY_EPS || q.0 <= BOUNDARY_EPS) {
        return Err(Error::Domain(
            "oracle box would touch the singular set of a degenerate metric".into(),
        ));
    }
    let _ = pair_check;
    let (_, hi_dom) = space.domain();
    let (x_min_pt, x_max_pt) = (p.0.min(q.0), p.0.max(q.0));
    let (y_min_pt, y_max_pt) = (p.1.min(q.1), p.1.max(q.1));
    let span_x = x_max_pt - x_min_pt;
    let span_y = y_max_pt - y_min_pt;
    // Minimizers have monotone y (v is conserved) and bow only toward
    // larger x, where the warp factor makes y-motion cheaper; margins are
    // therefore asymmetric — tight near the singular set, generous above.
    let left = 0.15 * span_x + 0.05 * span_y + 0.02;
    let right = 0.15 * span_x + 0.8 * span_y + 0.05;
    let y_pad = 0.1 * (span_x + span_y) + 0.03;
    let x_lo = (x_min_pt - left).max(x_min_pt * 0.25).max(1e-6);
    let x_hi = (x_max_pt + right).min(hi_dom - 1e-3);
    let y_lo = y_min_pt - y_pad;
    let y_hi = y_max_pt + y_pad;
    let dx = (x_hi - x_lo) / (n - 1) as f64;
    let dy = (y_hi - y_lo) / (n - 1) as f64;
    let node = |ix: usize, iy: usize| (x_lo + ix as f64 * dx, y_lo + iy as f64 * dy);
    let nearest = |pt: (f64, f64)| -> (usize, usize) {
        let ix = ((pt.0 - x_lo) / dx).round().clamp(0.0, (n - 1) as f64) as usize;
        let iy = ((pt.1 - y_lo) / dy).round().clamp(0.0, (n - 1) as f64) as usize;
        (ix, iy)
    };
    let np = nearest(p);
    let nq = nearest(q);
    let weight = |ix: usize, iy: usize, jx: usize, jy: usize| -> f64 {
        let a = node(ix, iy);
        let b = node(jx, jy);
        let xm = 0.5 * (a.0 + b.0);
        space
            .metric_length(xm, b.0 - a.0, b.1 - a.1)
            .unwrap_or(f64::INFINITY)
    };
    let graph_d = grid_shortest_path(n, n, np, nq, &weight);
    if !graph_d.is_finite() {
        return Err(Error::NoConvergence(
            "oracle grid search found no finite path".into(),
        ));
    }
    // Exact chords endpoint → snapped node keep the total an admissible
    // path length (a rigorous upper bound up to quadrature error).
    let chord_p = chord_length(space, p, node(np.0, np.1));
    let chord_q = chord_length(space, node(nq.0, nq.1), q);
    Ok(graph_d + chord_p + chord_q)
}

/// Distance from (0,0) to (0,δ) through the half-space (the boundary dip).
pub fn singular_gap_distance(space: &SpaceModel, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Invalid(format!("delta must be positive, got {delta}")));
    }
    boundary_dip(space, delta).map(|(d, _)| d)
}

/// Local scaling exponent of boundary-gap distances at scale δ, estimated
/// by the two-point slope between δ and δ/2:
/// `log 2 / log(d(δ)/d(δ/2))`. For the power-law family this converges to
/// α+1 as δ → 0; for the Infinity family it grows without bound.
pub fn dimension_exponent(space: &SpaceModel, delta: f64) -> Result<f64> {
    if !matches!(space.family(), Family::Plane | Family::Infinity) {
        return Err(Error::Invalid(
            "the scaling probe applies to the power-law and Infinity families".into(),
        ));
    }
    if !(delta > 1e-6 && delta < 0.5) {
        return Err(Error::Invalid(format!(
            "delta must lie in (1e-6, 0.5), got {delta}"
        )));
    }
    let d1 = singular_gap_distance(space, delta)?;
    let d2 = singular_gap_distance(space, 0.5 * delta)?;
    if !(d1 > d2 && d2 > 0.0) {
        return Err(Error::NoConvergence(format!(
            "dip distances not strictly decreasing: d({delta}) = {d1}, d({}) = {d2}",
            0.5 * delta
        )));
    }
    Ok(std::f64::consts::LN_2 / (d1 / d2).ln())
}

/// (δ, d(δ), exponent at δ) rows for a δ sequence (CLI plumbing).
pub fn dimension_profile(space: &SpaceModel, deltas: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    deltas
        .iter()
        .map(|&delta| {
            let d = singular_gap_distance(space, delta)?;
            let e = dimension_exponent(space, delta)?;
            Ok((delta, d, e))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn state(x: f64, y: f64, u: f64, v: f64) -> GeodesicState {
        GeodesicState { x, y, u, v }
    }

    #[test]
    fn hamiltonian_reference_values() {
        let m = SpaceModel::plane(1.0, 1.0).unwrap();
        assert_relative_eq!(hamiltonian(&m, &state(1.0, 0.0, 1.0, 0.0)).unwrap(), 0.5);
        let m = SpaceModel::sphere(1.0, 1.0).unwrap();
        let h = hamiltonian(&m, &state(std::f64::consts::FRAC_PI_4, 0.0, 0.0, 1.0)).unwrap();
        assert_relative_eq!(h, 0.5, max_relative = 1e-14);
        let m = SpaceModel::infinity(3.0, 1.0).unwrap();
        let h = hamiltonian(&m, &state(1.0, 0.0, 0.0, std::f64::consts::E)).unwrap();
        assert_relative_eq!(h, 0.5, max_relative = 1e-14);
        // Boundary states with v ≠ 0 are rejected; v = 0 is admitted.
        assert!(hamiltonian(&m, &state(0.0, 0.0, 1.0, 1.0)).is_err());
        assert!(hamiltonian(&m, &state(0.0, 0.0, 1.0, 0.0)).is_ok());
    }

    #[test]
    fn meridian_flow_is_exact() {
        let m = SpaceModel::plane(1.0, 1.0).unwrap();
        let traj = flow(&m, &state(1.0, 0.0, 1.0, 0.0), 2.0, 1e-10).unwrap();
        let end = traj.end();
        assert_abs_diff_eq!(end.x, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(end.y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(end.u, 1.0, epsilon = 1e-12);
        assert_relative_eq!(traj.length, 2.0, max_relative = 1e-12);
        assert_eq!(traj.termination, Termination::Completed);
    }

    #[test]
    fn meridian_stops_at_pole() {
        let m = SpaceModel::sphere(1.0, 1.0).unwrap();
        let traj = flow(&m, &state(1.0, 0.0, 1.0, 0.0), 2.0, 1e-10).unwrap();
        assert_eq!(traj.termination, Termination::PoleHit);
        assert_abs_diff_eq!(traj.end().x, FRAC_PI_2 - POLE_EPS, epsilon = 1e-12);
    }

    #[test]
    fn round_sphere_flow_matches_great_circle() {
        // α = 0 trigonometric metric is the round sphere in
        // latitude/longitude coordinates; compare against the embedded
        // great-circle closed form.
        let m = SpaceModel::sphere(0.0, 0.0).unwrap();
        let x0 = std::f64::consts::FRAC_PI_4;
        let v0 = x0.cos() * x0.cos() * std::f64::consts::SQRT_2;
        let s0 = state(x0, 0.0, 0.0, v0);
        assert_relative_eq!(hamiltonian(&m, &s0).unwrap(), 0.5, max_relative = 1e-14);
        let t_end = 0.7;
        let traj = flow(&m, &s0, t_end, 1e-10).unwrap();
        let end = traj.end();
        // Embedded start P0 and unit velocity V0 = (0, 1, 0).
        let p = [
            x0.cos() * t_end.cos(),
            t_end.sin() * 1.0,
            x0.sin() * t_end.cos(),
        ];
        let x_exact = p[2].asin();
        let y_exact = p[1].atan2(p[0]);
        assert_abs_diff_eq!(end.x, x_exact, epsilon = 1e-7);
        assert_abs_diff_eq!(end.y, y_exact, epsilon = 1e-7);
    }

    #[test]
    fn energy_conserved_and_v_constant() {
        use rand::Rng;
        let models = [
            SpaceModel::plane(1.0, 2.0).unwrap(),
            SpaceModel::sphere(1.0, 4.0).unwrap(),
            SpaceModel::hyperbolic(1.0, 2.0).unwrap(),
            SpaceModel::infinity(3.0, 1.0).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in &models {
            for _ in 0..10 {
                let (_, hi) = m.domain();
                let x0 = rng.gen_range(0.2..hi.min(4.0) * 0.7);
                let s0 = state(
                    x0,
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.5..1.5),
                );
                let h0 = hamiltonian(m, &s0).unwrap();
                let traj = flow(m, &s0, 1.0, 1e-10).unwrap();
                let end = traj.end();
                assert_eq!(end.v.to_bits(), s0.v.to_bits(), "v must be bitwise constant");
                if traj.termination == Termination::Completed && h0 > 1e-12 {
                    let h1 = hamiltonian(m, &end).unwrap();
                    assert!(
                        ((h1 - h0) / h0).abs() <= 1e-8,
                        "energy drift {} for {m}",
                        ((h1 - h0) / h0).abs()
                    );
                }
            }
        }
    }

    #[test]
    fn flow_validates_inputs() {
        let m = SpaceModel::plane(1.0, 1.0).unwrap();
        let s = state(1.0, 0.0, 1.0, 0.0);
        assert!(flow(&m, &s, 1.0, 1e-13).is_err());
        assert!(flow(&m, &s, 1.0, 1e-3).is_err());
        assert!(flow(&m, &s, -1.0, 1e-8).is_err());
    }

    #[test]
    fn horizontal_distance_is_exact() {
        let m = SpaceModel::plane(1.0, 1.0).unwrap();
        let r = distance_report(&m, (1.0, 0.0), (2.0, 0.0), 8).unwrap();
        assert_eq!(r.d, 1.0);
        assert_eq!(r.method, DistanceMethod::Horizontal);
        assert_eq!(distance_bvp(&m, (1.5, 0.3), (1.5, 0.3), 8).unwrap(), 0.0);
        assert!(distance_bvp(&m, (1.0, 0.0), (2.0, 0.0), 4).is_err());
    }

    #[test]
    fn round_sphere_distance_matches_closed_form() {
        let m = SpaceModel::sphere(0.0, 0.0).unwrap();
        let (p, q): ((f64, f64), (f64, f64)) = ((0.3, 0.0), (0.3, 1.0));
        // Embedded chord angle on the unit sphere.
        let dot = p.0.cos() * q.0.cos() * (q.1 - p.1).cos() + p.0.sin() * q.0.sin();
        let exact = dot.acos();
        let d = distance_bvp(&m, p, q, 16).unwrap();
        assert_abs_diff_eq!(d, exact, epsilon = 1e-6);
    }

    #[test]
    fn distance_symmetries_are_exact() {
        let m = SpaceModel::plane(1.0, 2.0).unwrap();
        let d1 = distance_bvp(&m, (1.0, 0.25), (1.7, 1.0), 12).unwrap();
        let d2 = distance_bvp(&m, (1.7, 1.0), (1.0, 0.25), 12).unwrap();
        assert_eq!(d1.to_bits(), d2.to_bits(), "canonicalization makes symmetry exact");
        let d3 = distance_bvp(&m, (1.0, 0.0), (1.7, 0.75), 12).unwrap();
        let d4 = distance_bvp(&m, (1.0, 0.0), (1.7, -0.75), 12).unwrap();
        assert_eq!(d3.to_bits(), d4.to_bits(), "y-reflection is exact");
    }

    #[test]
    fn oracle_brackets_bvp() {
        let m = SpaceModel::plane(1.0, 1.0).unwrap();
        let oracle = distance_graph_oracle(&m, (1.0, 0.0), (2.0, 0.0), 200).unwrap();
        assert_abs_diff_eq!(oracle, 1.0, epsilon = 0.01);
        let d = distance_bvp(&m, (1.0, 0.0), (1.0, 1.0), 16).unwrap();
        let oracle = distance_graph_oracle(&m, (1.0, 0.0), (1.0, 1.0), 400).unwrap();
        assert!(d <= oracle + 1e-3, "bvp {d} vs oracle {oracle}");
        assert!(oracle - d <= 0.05 * oracle, "oracle {oracle} not within 5% of bvp {d}");
        assert!(distance_graph_oracle(&m, (1.0, 0.0), (2.0, 0.0), 50).is_err());
        assert!(distance_graph_oracle(&m, (0.0, 0.0), (1.0, 0.0), 200).is_err());
    }

    #[test]
    fn hyperbolic_oracle_instance() {
        let m = SpaceModel::hyperbolic(1.0, 1.0).unwrap();
        let d = distance_bvp(&m, (0.5, 0.0), (0.5, 0.5), 16).unwrap();
        let oracle = distance_graph_oracle(&m, (0.5, 0.0), (0.5, 0.5), 400).unwrap();
        assert!(oracle >= d - 1e-3, "oracle {oracle} vs bvp {d}");
        assert!(oracle - d <= 0.1 * oracle);
    }

    #[test]
    fn triangle_inequality_sampled() {
        use rand::Rng;
        let m = SpaceModel::plane(1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..6 {
            let mut pt = || (rng.gen_range(0.5..2.0), rng.gen_range(-0.8..0.8));
            let (p, q, r) = (pt(), pt(), pt());
            let dpq = distance_bvp(&m, p, q, 12).unwrap();
            let dqr = distance_bvp(&m, q, r, 12).unwrap();
            let dpr = distance_bvp(&m, p, r, 12).unwrap();
            assert!(
                dpr <= dpq + dqr + 1e-6,
                "triangle violated: {dpr} > {dpq} + {dqr}"
            );
        }
    }

    #[test]
    fn convexity_probe_stays_interior() {
        let m = SpaceModel::plane(1.0, 1.0).unwrap();
        let min_x = convexity_probe(&m, (1.0, 0.0), (1.0, 0.2)).unwrap();
        assert!(min_x > 0.0, "grushin geodesic dipped to {min_x}");
        let m = SpaceModel::sphere(1.0, 4.0).unwrap();
        let min_x = convexity_probe(&m, (0.2, 0.0), (0.2, 3.0)).unwrap();
        assert!(min_x >= 0.0);
        let min_x = convexity_probe(&m, (0.4, 0.1), (0.4, 0.1)).unwrap();
        assert_eq!(min_x, 0.4);
        assert!(convexity_probe(&m, (0.0, 0.0), (0.4, 0.1)).is_err());
    }

    #[test]
    fn grushin_dip_matches_closed_form() {
        // Grushin plane α = 1: d((0,0),(0,δ)) = √(2πδ).
        let m = SpaceModel::plane(1.0, 1.0).unwrap();
        let delta = 0.1;
        let d = singular_gap_distance(&m, delta).unwrap();
        assert_relative_eq!(d, (2.0 * PI * delta).sqrt(), max_relative = 1e-6);
    }

    #[test]
    fn dimension_exponent_reference_values() {
        let m = SpaceModel::plane(1.0, 1.0).unwrap();
        let e = dimension_exponent(&m, 1e-2).unwrap();
        assert_abs_diff_eq!(e, 2.0, epsilon = 0.1);
        let m = SpaceModel::sphere(1.0, 4.0).unwrap();
        assert!(dimension_exponent(&m, 1e-2).is_err());
        let m = SpaceModel::plane(1.0, 1.0).unwrap();
        assert!(dimension_exponent(&m, 0.7).is_err());
    }

    #[test]
    fn infinity_distances_dominate_power_law_near_singular_set() {
        use rand::Rng;
        // e^{−1/x} ≤ x^α for all x > 0 when α ≤ e, so Infinity-family
        // y-motion is never cheaper: d_inf ≥ d_plane for shared endpoints.
        let inf = SpaceModel::infinity(3.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for &alpha in &[0.5, 1.0, 2.0] {
            let plane = SpaceModel::plane(alpha, alpha).unwrap();
            for _ in 0..3 {
                let p = (rng.gen_range(0.01..0.05), 0.0);
                let q = (rng.gen_range(0.01..0.05), rng.gen_range(0.001..0.01));
                let dp = distance_bvp(&plane, p, q, 12).unwrap();
                let di = distance_bvp(&inf, p, q, 12).unwrap();
                assert!(
                    di >= dp - 1e-6,
                    "alpha={alpha}: d_inf {di} < d_plane {dp} at {p:?}->{q:?}"
                );
            }
        }
    }
}
