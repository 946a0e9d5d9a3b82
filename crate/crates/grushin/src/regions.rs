//! Exact CD(K, N) feasibility regions.
//!
//! For each model the pointwise condition `Ric_{N,V} ≥ K g` is a pair of
//! x-uniform inequalities. This module solves them exactly: the largest
//! admissible `K` (`kmax`), the feasible β-intervals at fixed `(α, N, K)`,
//! and concrete parameter witnesses or emptiness certificates for the
//! structural existence statements, together with a grid-based numeric
//! cross-validator.
//!
//! With `t = 1/(N−2)` (0 at `N = ∞`), the K-free feasibility arms are the
//! same for the three warped families:
//!
//! ```text
//! quad arm:  β − t β² ≥ α² + α      (x → 0⁺ limit of the xx-inequality)
//! mult arm:  α β     ≥ α² + α      (x → 0⁺ limit of the yy-inequality)
//! ```
//!
//! and the K-dependence separates: the trigonometric family has
//! `kmax = (α−1)² + β − α² − α`, the hyperbolic `kmax = min(−tβ², β(α−1))
//! − (α−1)²`, the power-law family caps at `kmax = 0`, and the Infinity
//! family reduces to two polynomial inequalities minimized numerically.

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{ricci_closed, ricci_lemma, EffectiveDim};
use crate::model::{Family, SpaceModel};
use crate::numerics::roots::golden_min;
use crate::{Error, Result};

/// Which of the two componentwise inequalities binds at the optimum (or
/// fails, when infeasible). `KCap` marks the power-law family's structural
/// cap `K ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    Xx,
    Yy,
    Both,
    KCap,
}

impl std::fmt::Display for Binding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Binding::Xx => "xx",
            Binding::Yy => "yy",
            Binding::Both => "both",
            Binding::KCap => "k_cap",
        })
    }
}

/// Result of a feasibility computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionResult {
    /// Whether any `K` makes `Ric_{N,V} ≥ K g` hold on the whole interior.
    pub feasible: bool,
    /// Largest admissible `K`; present iff feasible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmax: Option<f64>,
    pub binding: Binding,
    /// Whether the infimum of `min(rxx, ryy)` is attained at an interior
    /// point (false: approached only in an endpoint limit). Present iff
    /// feasible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attained: Option<bool>,
}

impl RegionResult {
    fn infeasible(binding: Binding) -> Self {
        RegionResult {
            feasible: false,
            kmax: None,
            binding,
            attained: None,
        }
    }

    fn feasible(kmax: f64, binding: Binding, attained: bool) -> Self {
        RegionResult {
            feasible: true,
            kmax: Some(kmax),
            binding,
            attained: Some(attained),
        }
    }
}

fn binding_of(xx_bad: bool, yy_bad: bool) -> Binding {
    match (xx_bad, yy_bad) {
        (true, true) => Binding::Both,
        (true, false) => Binding::Xx,
        (false, true) => Binding::Yy,
        (false, false) => Binding::Both,
    }
}

/// Validate the `(space, N)` pair exactly as the curvature module does.
fn require_admissible(space: &SpaceModel, n: EffectiveDim) -> Result<()> {
    if n == EffectiveDim::Finite(2.0) && !space.weight_free() {
        return Err(Error::Dim(format!(
            "N = 2 requires a trivial weight, but {space} has a nonconstant potential"
        )));
    }
    Ok(())
}

/// Exact largest admissible `K` for `Ric_{N,V} ≥ K g`, by closed form
/// (Plane/Sphere/Hyperbolic) or bracketed minimization (Infinity).
pub fn kmax_closed(space: &SpaceModel, n: EffectiveDim) -> Result<RegionResult> {
    require_admissible(space, n)?;
    let t = n.inv_nm2();
    let (alpha, beta) = (space.alpha(), space.beta());
    Ok(match space.family() {
        Family::Plane => {
            // rxx = cx/x², ryy = cy/x²; sign determines the x→0 / x→∞
            // behavior, and a feasible pair caps K at 0 (both → 0 at ∞).
            let cx = beta - alpha * alpha - alpha - beta * beta * t;
            let cy = alpha * beta - alpha * alpha - alpha;
            if cx >= 0.0 && cy >= 0.0 {
                // The infimum 0 is attained only if a coefficient vanishes
                // (that component is then ≡ 0).
                RegionResult::feasible(0.0, Binding::KCap, cx == 0.0 || cy == 0.0)
            } else {
                RegionResult::infeasible(binding_of(cx < 0.0, cy < 0.0))
            }
        }
        Family::Sphere => {
            // Components E_i − A_i/sin²x with A_i ≤ 0 required; both share
            // the x → π/2 infimum E_i − A_i = β + 1 − 3α.
            let a1 = alpha * alpha + alpha - beta + beta * beta * t;
            let a2 = alpha * alpha + alpha - alpha * beta;
            if a1 <= 0.0 && a2 <= 0.0 {
                let kmax = beta + 1.0 - 3.0 * alpha;
                RegionResult::feasible(kmax, Binding::Both, a1 == 0.0 || a2 == 0.0)
            } else {
                RegionResult::infeasible(binding_of(a1 > 0.0, a2 > 0.0))
            }
        }
        Family::Hyperbolic => {
            // Components −E_i − A_i/sinh²x with A_i ≤ 0 required; separate
            // x → ∞ infima −E_i.
            let a1 = alpha * alpha + alpha - beta + beta * beta * t;
            let a2 = alpha * alpha + alpha - alpha * beta;
            let e1 = (alpha - 1.0) * (alpha - 1.0) + beta * beta * t;
            let e2 = (alpha - 1.0) * (alpha - 1.0) - beta * (alpha - 1.0);
            if a1 <= 0.0 && a2 <= 0.0 {
                // +0.0 normalizes the −0.0 produced by negating a zero max.
                let kmax = -e1.max(e2) + 0.0;
                let binding = if e1 > e2 {
                    Binding::Xx
                } else if e2 > e1 {
                    Binding::Yy
                } else {
                    Binding::Both
                };
                // A component is constant (≡ −E_i) iff its A_i = 0; the
                // infimum is attained iff a binding component is constant.
                let attained = (e1 >= e2 && a1 == 0.0) || (e2 >= e1 && a2 == 0.0);
                RegionResult::feasible(kmax, binding, attained)
            } else {
                RegionResult::infeasible(binding_of(a1 > 0.0, a2 > 0.0))
            }
        }
        Family::Infinity => kmax_infinity(space, n),
    })
}

/// Infinity-family minimization: `kmax = inf_x min(p(x)/x⁶, q(x)/x⁵)` with
/// `p = (6γ−1)x² − 2x³ + βx⁴ − t(2γ+βx²)²` and `q = 2γ − x + (β−2)x²`.
fn kmax_infinity(space: &SpaceModel, n: EffectiveDim) -> RegionResult {
    let beta = space.beta();
    let gamma = space.gamma().unwrap_or(0.0);
    // Symbolic x → 0⁺ limit: finite N > 2 diverges to −∞ through the
    // dimensional term −4γ²t/x⁶; at N = ∞ the leading term is
    // (6γ−1)/x⁴ (or −2/x³ when γ = 1/6); negative N diverges to +∞.
    let diverges = match n {
        EffectiveDim::Finite(nv) if nv > 2.0 => true,
        EffectiveDim::Infinite => gamma <= 1.0 / 6.0,
        _ => false,
    };
    if diverges {
        return RegionResult::infeasible(Binding::Xx);
    }
    let min_components = |x: f64| {
        let r = ricci_closed(space, x, n).expect("interior point");
        r.rxx.min(r.ryy_over_gyy)
    };
    // Bracketed log-grid scan on [1e−6, 1e3], then golden-section
    // refinement around the best cell.
    let (lo, hi) = (1e-6f64, 1e3f64);
    let n_pts = 3000usize;
    let ratio = (hi / lo).ln() / (n_pts - 1) as f64;
    let mut best_i = 0usize;
    let mut best_v = f64::INFINITY;
    for i in 0..n_pts {
        let x = lo * ((i as f64) * ratio).exp();
        let v = min_components(x);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let bracket_lo = lo * ((best_i.saturating_sub(1) as f64) * ratio).exp();
    let bracket_hi = lo * (((best_i + 1).min(n_pts - 1) as f64) * ratio).exp();
    let x_star = golden_min(&min_components, bracket_lo, bracket_hi, 1e-12 * bracket_hi);
    let refined = min_components(x_star).min(best_v);
    // x → ∞ limit of both components is 0, so the infimum is capped at 0;
    // a strictly positive interior minimum means kmax = 0 approached at ∞.
    if refined > 0.0 {
        let binding = if beta > 0.0 { Binding::Yy } else { Binding::Both };
        RegionResult::feasible(0.0, binding, false)
    } else {
        let r = ricci_closed(space, x_star, n).expect("interior point");
        let scale = 1e-9 * (1.0 + refined.abs());
        let binding = if (r.rxx - r.ryy_over_gyy).abs() <= scale {
            Binding::Both
        } else if r.rxx < r.ryy_over_gyy {
            Binding::Xx
        } else {
            Binding::Yy
        };
        RegionResult::feasible(refined + 0.0, binding, true)
    }
}

/// Log-spaced evaluation grid covering the family's binding range:
/// `[1e−4, x_max]` with `x_max` = π/2 − 1e−4 (trigonometric), 40
/// (hyperbolic, where the components converge like e^{−2x}), 10³
/// (Infinity), 5·10³ (power-law, where they decay like 1/x²).
pub fn default_scan_grid(space: &SpaceModel, points: usize) -> Vec<f64> {
    let lo = 1e-4f64;
    let hi = match space.family() {
        Family::Sphere => std::f64::consts::FRAC_PI_2 - 1e-4,
        Family::Hyperbolic => 40.0,
        Family::Infinity => 1e3,
        Family::Plane => 5e3,
    };
    let n = points.max(2);
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * ((i as f64) * ratio).exp()).collect()
}

/// Grid minimum of `min(rxx, ryy_over_gyy)` via [`ricci_lemma`]: an upper
/// bound for `kmax` that converges to it on refined grids when feasible.
///
/// The grid must have ≥ 100 interior points and span at least `[1e−4, 10]`
/// (trigonometric family: `[1e−4, π/2 − 1e−4]`).
pub fn kmax_numeric(space: &SpaceModel, n: EffectiveDim, grid: &[f64]) -> Result<f64> {
    require_admissible(space, n)?;
    if grid.len() < 100 {
        return Err(Error::Invalid(format!(
            "grid must have at least 100 points, got {}",
            grid.len()
        )));
    }
    let lo = grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span_hi = match space.family() {
        Family::Sphere => std::f64::consts::FRAC_PI_2 - 1e-4,
        _ => 10.0,
    };
    if lo > 1e-4 * (1.0 + 1e-12) || hi < span_hi * (1.0 - 1e-12) {
        return Err(Error::Invalid(format!(
            "grid [{lo:.3e}, {hi:.3e}] must span at least [1e-4, {span_hi:.6}]"
        )));
    }
    let vals: Result<Vec<f64>> = grid
        .par_iter()
        .map(|&x| ricci_lemma(space, x, n).map(|r| r.min()))
        .collect();
    Ok(vals?
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

/// Pointwise grid check of `Ric_{N,V} ≥ K g`: true iff every grid point
/// passes. Evaluates the closed forms: the generic profile composition
/// cancels `1/x²`-scaled terms and its `O(ε/x²)` float noise would swamp
/// a `1e−9`-level comparison near the singular end.
pub fn pointwise_region_check(
    space: &SpaceModel,
    n: EffectiveDim,
    k: f64,
    grid: &[f64],
) -> Result<bool> {
    require_admissible(space, n)?;
    for &x in grid {
        if ricci_closed(space, x, n)?.min() < k {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Closed β-interval with extended-real upper endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaInterval {
    pub lo: f64,
    /// `+∞` for a half-line.
    pub hi: f64,
}

impl BetaInterval {
    pub fn contains(&self, beta: f64) -> bool {
        beta >= self.lo && beta <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn intersect(self, other: BetaInterval) -> Option<BetaInterval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Some(BetaInterval { lo, hi })
        } else {
            None
        }
    }
}

const ALL_BETA: BetaInterval = BetaInterval {
    lo: 0.0,
    hi: f64::INFINITY,
};

/// Solution set in β of the quad arm `β − t β² ≥ c` (over β ≥ 0).
fn quad_arm(t: f64, c: f64) -> Option<BetaInterval> {
    debug_assert!(c >= 0.0);
    if t == 0.0 {
        return Some(BetaInterval {
            lo: c,
            hi: f64::INFINITY,
        });
    }
    if t > 0.0 {
        // −tβ² + β − c ≥ 0: real roots require D = 1 − 4tc ≥ 0; the stable
        // root forms avoid cancellation for small tc.
        let d = 1.0 - 4.0 * t * c;
        if d < 0.0 {
            return None;
        }
        let sq = d.sqrt();
        Some(BetaInterval {
            lo: 2.0 * c / (1.0 + sq),
            hi: (1.0 + sq) / (2.0 * t),
        })
    } else {
        // |t|β² + β − c ≥ 0 for β ≥ 0: above the positive root.
        let at = -t;
        let sq = (1.0 + 4.0 * at * c).sqrt();
        Some(BetaInterval {
            lo: 2.0 * c / (1.0 + sq),
            hi: f64::INFINITY,
        })
    }
}

/// Solution set of the mult arm `α β ≥ α² + α`.
fn mult_arm(alpha: f64) -> BetaInterval {
    if alpha == 0.0 {
        ALL_BETA
    } else {
        BetaInterval {
            lo: alpha + 1.0,
            hi: f64::INFINITY,
        }
    }
}

/// Exact set of β ≥ α with `kmax_closed(space(α, β), N) ≥ K`, as a closed
/// interval (empty: `None`). The Infinity family has no β-interval form;
/// use [`feasible_beta_gamma`].
pub fn feasible_beta(
    family: Family,
    alpha: f64,
    n: EffectiveDim,
    k: f64,
) -> Result<Option<BetaInterval>> {
    if family == Family::Infinity {
        return Err(Error::Invalid(
            "feasible_beta applies to the plane/sphere/hyperbolic families; use feasible_beta_gamma".into(),
        ));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::Construction(format!(
            "alpha must be finite and nonnegative, got {alpha}"
        )));
    }
    if !k.is_finite() {
        return Err(Error::Invalid(format!("K must be finite, got {k}")));
    }
    // N = 2 admits only the trivial weight β = 0, which needs α = 0.
    if n == EffectiveDim::Finite(2.0) {
        if alpha > 0.0 {
            return Ok(None);
        }
        let space = SpaceModel::from_parts(family, 0.0, 0.0, None)?;
        let r = kmax_closed(&space, n)?;
        return Ok(match r.kmax {
            Some(km) if km >= k => Some(BetaInterval { lo: 0.0, hi: 0.0 }),
            _ => None,
        });
    }
    let t = n.inv_nm2();
    let c = alpha * alpha + alpha;
    let base = BetaInterval {
        lo: alpha,
        hi: f64::INFINITY,
    };
    let Some(arms) = quad_arm(t, c) else {
        return Ok(None);
    };
    let Some(feas) = base.intersect(arms).and_then(|i| i.intersect(mult_arm(alpha))) else {
        return Ok(None);
    };
    let with_k = match family {
        Family::Plane => {
            if k > 0.0 {
                None
            } else {
                Some(feas)
            }
        }
        Family::Sphere => feas.intersect(BetaInterval {
            lo: k + 3.0 * alpha - 1.0,
            hi: f64::INFINITY,
        }),
        Family::Hyperbolic => {
            let cc = k + (alpha - 1.0) * (alpha - 1.0);
            // Arm −tβ² ≥ cc.
            let arm_sq = if t > 0.0 {
                if cc > 0.0 {
                    None
                } else {
                    Some(BetaInterval {
                        lo: 0.0,
                        hi: (-cc / t).sqrt(),
                    })
                }
            } else if t == 0.0 {
                if cc <= 0.0 {
                    Some(ALL_BETA)
                } else {
                    None
                }
            } else if cc <= 0.0 {
                Some(ALL_BETA)
            } else {
                Some(BetaInterval {
                    lo: (cc / -t).sqrt(),
                    hi: f64::INFINITY,
                })
            };
            // Arm β(α−1) ≥ cc.
            let arm_lin = if alpha > 1.0 {
                Some(BetaInterval {
                    lo: cc / (alpha - 1.0),
                    hi: f64::INFINITY,
                })
            } else if alpha == 1.0 {
                if cc <= 0.0 {
                    Some(ALL_BETA)
                } else {
                    None
                }
            } else if cc > 0.0 {
                None
            } else {
                Some(BetaInterval {
                    lo: 0.0,
                    hi: cc / (alpha - 1.0),
                })
            };
            match (arm_sq, arm_lin) {
                (Some(a), Some(b)) => feas.intersect(a).and_then(|i| i.intersect(b)),
                _ => None,
            }
        }
        Family::Infinity => unreachable!(),
    };
    Ok(with_k)
}

/// The Infinity-family feasibility predicate at `N = ∞`, `K = 0`:
/// `min(β(6γ−1), 8(β−2)γ) ≥ 1`, returned with its margin.
pub fn feasible_beta_gamma(beta: f64, gamma: f64) -> Result<(bool, f64)> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::Invalid(format!(
            "beta must be finite and nonnegative, got {beta}"
        )));
    }
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::Invalid(format!(
            "gamma must be finite and positive, got {gamma}"
        )));
    }
    let margin = (beta * (6.0 * gamma - 1.0)).min(8.0 * (beta - 2.0) * gamma) - 1.0;
    Ok((margin >= 0.0, margin))
}

/// The structural existence/emptiness statements the region solvers certify.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TheoremStatement {
    /// Trigonometric family: for every α ≥ 0 and K > 0 some β ≥ α attains
    /// CD(K, ∞).
    HemisphereAnyK { alpha: f64, k: f64 },
    /// Trigonometric family: for α ≥ 1 and N ≥ 2 + 4α(α+1) some β > α
    /// attains CD(0, N).
    HemisphereFiniteN { alpha: f64, n: f64 },
    /// Trigonometric family: parameters feasible for CD(0, N), N ∈ (2, ∞],
    /// admit a strictly positive K (except the boundary point α=1, β=2 at
    /// N = ∞ where kmax = 0).
    HemispherePositiveK {
        alpha: f64,
        beta: f64,
        n: EffectiveDim,
    },
    /// Hyperbolic family: for α ≥ 1 and N ≥ 2 + 4α(α+1) some β > α and
    /// K < 0 attain CD(K, N).
    HyperbolicNegativeK { alpha: f64, n: f64 },
    /// Hyperbolic family: CD(0, N) fails for every admissible (α, β) and
    /// every finite N ∈ (2, ∞).
    HyperbolicNoNonnegativeK { alpha: f64, beta: f64, n: f64 },
    /// Hyperbolic family: for α ≥ 1 some β > α and N < 0 attain CD(0, N).
    HyperbolicNegativeDim { alpha: f64 },
    /// Infinity family: some (β, γ) attains CD(0, ∞).
    InfinityFlatFeasible,
    /// Infinity family: no finite N ∈ (2, ∞) admits any K at the given
    /// (β, γ).
    InfinityNoFiniteDim { beta: f64, gamma: f64, n: f64 },
}

/// Witness parameters for a positive statement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<EffectiveDim>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

/// Outcome of a statement check: concrete parameters (positive statements)
/// or a closed-form emptiness certificate (negative ones).
#[derive(Debug, Clone, PartialEq)]
pub enum WitnessOutcome {
    Parameters(WitnessParams),
    Certificate { detail: String, margin: f64 },
}

fn finite_dim(n: f64) -> Result<EffectiveDim> {
    EffectiveDim::finite(n)
}

/// Verify a statement's hypotheses and produce its witness or certificate.
pub fn theorem_witness(statement: TheoremStatement) -> Result<WitnessOutcome> {
    match statement {
        TheoremStatement::HemisphereAnyK { alpha, k } => {
            if !(alpha >= 0.0) || !(k > 0.0) || !k.is_finite() {
                return Err(Error::Statement(format!(
                    "requires alpha >= 0 and K > 0 (got alpha = {alpha}, K = {k})"
                )));
            }
            let interval = feasible_beta(Family::Sphere, alpha, EffectiveDim::Infinite, k)?
                .ok_or_else(|| {
                    Error::Statement("internal: hemisphere K-interval unexpectedly empty".into())
                })?;
            Ok(WitnessOutcome::Parameters(WitnessParams {
                beta: Some(interval.lo),
                gamma: None,
                n: Some(EffectiveDim::Infinite),
                k: Some(k),
            }))
        }
        TheoremStatement::HemisphereFiniteN { alpha, n } => {
            let threshold = 2.0 + 4.0 * alpha * (alpha + 1.0);
            if !(alpha >= 1.0) || !(n >= threshold) {
                return Err(Error::Statement(format!(
                    "requires alpha >= 1 and N >= 2 + 4a(a+1) = {threshold} (got alpha = {alpha}, N = {n})"
                )));
            }
            let dim = finite_dim(n)?;
            let interval = feasible_beta(Family::Sphere, alpha, dim, 0.0)?.ok_or_else(|| {
                Error::Statement("internal: hemisphere N-interval unexpectedly empty".into())
            })?;
            Ok(WitnessOutcome::Parameters(WitnessParams {
                beta: Some(interval.lo),
                gamma: None,
                n: Some(dim),
                k: Some(0.0),
            }))
        }
        TheoremStatement::HemispherePositiveK { alpha, beta, n } => {
            if matches!(n, EffectiveDim::Finite(v) if v <= 2.0) {
                return Err(Error::Statement(format!(
                    "requires N in (2, inf], got {n}"
                )));
            }
            let space = SpaceModel::sphere(alpha, beta)?;
            let r = kmax_closed(&space, n)?;
            match r.kmax {
                Some(km) if km > 0.0 => Ok(WitnessOutcome::Parameters(WitnessParams {
                    beta: Some(beta),
                    gamma: None,
                    n: Some(n),
                    k: Some(km),
                })),
                Some(km) => Err(Error::Statement(format!(
                    "kmax = {km} is not strictly positive at alpha = {alpha}, beta = {beta}, N = {n} \
                     (the boundary point alpha=1, beta=2, N=inf is the only feasible one with kmax = 0)"
                ))),
                None => Err(Error::Statement(format!(
                    "parameters alpha = {alpha}, beta = {beta} are not CD-feasible at N = {n}"
                ))),
            }
        }
        TheoremStatement::HyperbolicNegativeK { alpha, n } => {
            let threshold = 2.0 + 4.0 * alpha * (alpha + 1.0);
            if !(alpha >= 1.0) || !(n >= threshold) {
                return Err(Error::Statement(format!(
                    "requires alpha >= 1 and N >= 2 + 4a(a+1) = {threshold} (got alpha = {alpha}, N = {n})"
                )));
            }
            let dim = finite_dim(n)?;
            // K-free feasibility arms only; any feasible β has kmax < 0 here.
            let t = dim.inv_nm2();
            let c = alpha * alpha + alpha;
            let quad = quad_arm(t, c).ok_or_else(|| {
                Error::Statement("internal: quad arm empty above the N-threshold".into())
            })?;
            let beta = quad.lo.max(alpha + 1.0);
            let space = SpaceModel::hyperbolic(alpha, beta)?;
            let r = kmax_closed(&space, dim)?;
            let km = r.kmax.ok_or_else(|| {
                Error::Statement("internal: chosen beta unexpectedly infeasible".into())
            })?;
            Ok(WitnessOutcome::Parameters(WitnessParams {
                beta: Some(beta),
                gamma: None,
                n: Some(dim),
                k: Some(km),
            }))
        }
        TheoremStatement::HyperbolicNoNonnegativeK { alpha, beta, n } => {
            if !(n > 2.0) || !n.is_finite() {
                return Err(Error::Statement(format!(
                    "requires finite N in (2, inf), got {n}"
                )));
            }
            let space = SpaceModel::hyperbolic(alpha, beta)?;
            let r = kmax_closed(&space, finite_dim(n)?)?;
            match r.kmax {
                Some(km) if km >= 0.0 => Err(Error::Statement(format!(
                    "statement refuted: kmax = {km} >= 0 at alpha = {alpha}, beta = {beta}, N = {n}"
                ))),
                Some(km) => Ok(WitnessOutcome::Certificate {
                    detail: format!(
                        "kmax = {km} < 0: CD(0, {n}) fails although some negative K is admissible"
                    ),
                    margin: km,
                }),
                None => Ok(WitnessOutcome::Certificate {
                    detail: format!(
                        "x-uniform feasibility fails ({} inequality) for every K at alpha = {alpha}, beta = {beta}, N = {n}",
                        r.binding
                    ),
                    margin: f64::NEG_INFINITY,
                }),
            }
        }
        TheoremStatement::HyperbolicNegativeDim { alpha } => {
            if !(alpha >= 1.0) {
                return Err(Error::Statement(format!(
                    "requires alpha >= 1, got {alpha}"
                )));
            }
            // Closed-form witness: β = α² + α and N = 2 − β²/(α−1)² for
            // α > 1; the α = 1 degeneration takes β = 2, N = −2.
            let (beta, n) = if alpha > 1.0 {
                let beta = alpha * alpha + alpha;
                let d = (alpha - 1.0) * (alpha - 1.0);
                (beta, 2.0 - beta * beta / d)
            } else {
                (2.0, -2.0)
            };
            let dim = finite_dim(n)?;
            let space = SpaceModel::hyperbolic(alpha, beta)?;
            let r = kmax_closed(&space, dim)?;
            match r.kmax {
                Some(km) if km >= 0.0 => Ok(WitnessOutcome::Parameters(WitnessParams {
                    beta: Some(beta),
                    gamma: None,
                    n: Some(dim),
                    k: Some(0.0),
                })),
                _ => Err(Error::Statement(
                    "internal: closed-form negative-dimension witness failed verification".into(),
                )),
            }
        }
        TheoremStatement::InfinityFlatFeasible => {
            let (beta, gamma) = (3.0, 1.0);
            let (ok, _) = feasible_beta_gamma(beta, gamma)?;
            if !ok {
                return Err(Error::Statement(
                    "internal: reference flat-feasible point failed verification".into(),
                ));
            }
            Ok(WitnessOutcome::Parameters(WitnessParams {
                beta: Some(beta),
                gamma: Some(gamma),
                n: Some(EffectiveDim::Infinite),
                k: Some(0.0),
            }))
        }
        TheoremStatement::InfinityNoFiniteDim { beta, gamma, n } => {
            if !(n > 2.0) || !n.is_finite() {
                return Err(Error::Statement(format!(
                    "requires finite N in (2, inf), got {n}"
                )));
            }
            let space = SpaceModel::infinity(beta, gamma)?;
            let r = kmax_closed(&space, finite_dim(n)?)?;
            if r.feasible {
                return Err(Error::Statement(format!(
                    "statement refuted: feasible at beta = {beta}, gamma = {gamma}, N = {n}"
                )));
            }
            Ok(WitnessOutcome::Certificate {
                detail: format!(
                    "the dimensional term −(2γ+βx²)²/((N−2)x⁶) drives rxx to −∞ as x → 0⁺ for every finite N ∈ (2, ∞); no K is admissible at N = {n}"
                ),
                margin: f64::NEG_INFINITY,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const INF: EffectiveDim = EffectiveDim::Infinite;

    fn fin(n: f64) -> EffectiveDim {
        EffectiveDim::finite(n).unwrap()
    }

    #[test]
    fn hyperbolic_boundary_point_is_flat() {
        let m = SpaceModel::hyperbolic(1.0, 2.0).unwrap();
        let r = kmax_closed(&m, INF).unwrap();
        assert!(r.feasible);
        assert_eq!(r.kmax, Some(0.0));
        assert_eq!(r.attained, Some(true)); // all components vanish identically
    }

    #[test]
    fn sphere_threshold_point() {
        // α=1, β=4, N=10: the quad arm pinches to the single point β=4 and
        // rxx ≡ 2, so kmax = β+1−3α = 2, attained.
        let m = SpaceModel::sphere(1.0, 4.0).unwrap();
        let r = kmax_closed(&m, fin(10.0)).unwrap();
        assert!(r.feasible);
        assert_relative_eq!(r.kmax.unwrap(), 2.0);
        assert_eq!(r.attained, Some(true));
    }

    #[test]
    fn duality_at_alpha_zero() {
        let s = SpaceModel::sphere(0.0, 0.0).unwrap();
        let h = SpaceModel::hyperbolic(0.0, 0.0).unwrap();
        let n2 = fin(2.0);
        assert_eq!(kmax_closed(&s, n2).unwrap().kmax, Some(1.0));
        assert_eq!(kmax_closed(&h, n2).unwrap().kmax, Some(-1.0));
    }

    #[test]
    fn infinity_family_regimes() {
        let m = SpaceModel::infinity(3.0, 1.0).unwrap();
        // Finite N in (2, ∞): never feasible.
        let r = kmax_closed(&m, fin(7.0)).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.binding, Binding::Xx);
        // N = ∞ with γ > 1/6 and comfortable margin: feasible with kmax = 0.
        let r = kmax_closed(&m, INF).unwrap();
        assert!(r.feasible);
        assert_abs_diff_eq!(r.kmax.unwrap(), 0.0, epsilon = 1e-9);
        // γ ≤ 1/6 diverges at the singular end.
        let m = SpaceModel::infinity(3.0, 0.15).unwrap();
        assert!(!kmax_closed(&m, INF).unwrap().feasible);
        // Negative N: always feasible.
        let m = SpaceModel::infinity(1.0, 0.05).unwrap();
        let r = kmax_closed(&m, fin(-5.0)).unwrap();
        assert!(r.feasible);
    }

    #[test]
    fn plane_cap_and_infeasibility() {
        let r = kmax_closed(&SpaceModel::plane(1.0, 3.0).unwrap(), INF).unwrap();
        assert!(r.feasible);
        assert_eq!(r.kmax, Some(0.0));
        assert_eq!(r.binding, Binding::KCap);
        let r = kmax_closed(&SpaceModel::plane(1.0, 1.5).unwrap(), INF).unwrap();
        assert!(!r.feasible);
    }

    #[test]
    fn numeric_agrees_with_closed_when_feasible() {
        let cases = [
            (SpaceModel::hyperbolic(1.0, 2.0).unwrap(), INF),
            (SpaceModel::sphere(1.0, 4.0).unwrap(), fin(10.0)),
            (SpaceModel::plane(1.0, 3.0).unwrap(), INF),
            (SpaceModel::sphere(0.0, 0.0).unwrap(), fin(2.0)),
            (SpaceModel::infinity(3.0, 1.0).unwrap(), INF),
            (SpaceModel::hyperbolic(2.0, 6.0).unwrap(), fin(-34.0)),
        ];
        for (m, n) in cases {
            let closed = kmax_closed(&m, n).unwrap().kmax.unwrap();
            let grid = default_scan_grid(&m, 1000);
            let numeric = kmax_numeric(&m, n, &grid).unwrap();
            // The generic evaluator carries O(ε/x²) float noise near the
            // singular end (≈ 6e−8 at x = 1e−4), so the analytic upper
            // bound holds only to that tolerance.
            assert!(
                numeric >= closed - 1e-6,
                "numeric {numeric} under closed {closed} for {m}"
            );
            assert!(
                (numeric - closed).abs() <= 1e-5,
                "numeric {numeric} vs closed {closed} for {m}"
            );
        }
    }

    #[test]
    fn numeric_grid_validation() {
        let m = SpaceModel::plane(1.0, 3.0).unwrap();
        let short: Vec<f64> = (1..50).map(|i| i as f64 * 0.1).collect();
        assert!(kmax_numeric(&m, INF, &short).is_err());
        let narrow: Vec<f64> = (0..200).map(|i| 0.5 + i as f64 * 0.01).collect();
        assert!(kmax_numeric(&m, INF, &narrow).is_err());
    }

    #[test]
    fn feasible_beta_reference_intervals() {
        let i = feasible_beta(Family::Sphere, 1.0, fin(10.0), 0.0)
            .unwrap()
            .unwrap();
        assert_relative_eq!(i.lo, 4.0, epsilon = 1e-12);
        assert_relative_eq!(i.hi, 4.0, epsilon = 1e-12);

        let i = feasible_beta(Family::Hyperbolic, 1.0, INF, 0.0)
            .unwrap()
            .unwrap();
        assert_eq!((i.lo, i.hi), (2.0, f64::INFINITY));

        let i = feasible_beta(Family::Hyperbolic, 2.0, fin(-34.0), 0.0)
            .unwrap()
            .unwrap();
        assert!(i.contains(6.0));

        let i = feasible_beta(Family::Plane, 1.0, INF, 0.0).unwrap().unwrap();
        assert_eq!((i.lo, i.hi), (2.0, f64::INFINITY));

        assert!(feasible_beta(Family::Plane, 1.0, INF, 0.5)
            .unwrap()
            .is_none());
        assert!(feasible_beta(Family::Infinity, 0.0, INF, 0.0).is_err());
    }

    #[test]
    fn feasible_beta_members_round_trip() {
        // Every β inside a reported interval must verify through
        // kmax_closed, and points just outside must fail.
        let cases = [
            (Family::Sphere, 1.5, fin(25.0), 0.0),
            (Family::Sphere, 0.5, INF, 1.0),
            (Family::Hyperbolic, 2.0, fin(-10.0), -0.5),
            (Family::Hyperbolic, 1.0, fin(50.0), -2.0),
            (Family::Plane, 0.5, fin(12.0), 0.0),
        ];
        for (family, alpha, n, k) in cases {
            let Some(i) = feasible_beta(family, alpha, n, k).unwrap() else {
                continue;
            };
            // Interval endpoints sit exactly on arm zeros, where the
            // closed-form sign test can flip on the last ulp; probe a hair
            // inside.
            let nudge = 1e-9 * (1.0 + i.lo.abs());
            let probes = [
                i.lo + nudge,
                if i.hi.is_finite() {
                    0.5 * (i.lo + i.hi)
                } else {
                    i.lo + 1.0
                },
                if i.hi.is_finite() {
                    i.hi - nudge
                } else {
                    i.lo + 10.0
                },
            ];
            for beta in probes {
                let m = SpaceModel::from_parts(family, alpha, beta, None).unwrap();
                let r = kmax_closed(&m, n).unwrap();
                assert!(
                    r.feasible && r.kmax.unwrap() >= k - 1e-9,
                    "{family:?} a={alpha} b={beta} should be feasible at K={k}"
                );
            }
            // Just below lo (when above the α-floor) must fail.
            let below = i.lo - 1e-6;
            if below >= alpha {
                let m = SpaceModel::from_parts(family, alpha, below, None).unwrap();
                let r = kmax_closed(&m, n).unwrap();
                assert!(
                    !r.feasible || r.kmax.unwrap() < k,
                    "{family:?} a={alpha} b={below} should fail at K={k}"
                );
            }
            if i.hi.is_finite() {
                let above = i.hi + 1e-6;
                let m = SpaceModel::from_parts(family, alpha, above, None).unwrap();
                let r = kmax_closed(&m, n).unwrap();
                assert!(!r.feasible || r.kmax.unwrap() < k);
            }
        }
    }

    #[test]
    fn infinity_predicate_margins() {
        let (ok, margin) = feasible_beta_gamma(3.0, 1.0).unwrap();
        assert!(ok);
        assert_relative_eq!(margin, 7.0);
        let (ok, _) = feasible_beta_gamma(2.0, 1.0).unwrap();
        assert!(!ok);
        let (ok, _) = feasible_beta_gamma(0.0, 1.0).unwrap();
        assert!(!ok);
        assert!(feasible_beta_gamma(-1.0, 1.0).is_err());
        assert!(feasible_beta_gamma(1.0, 0.0).is_err());
    }

    #[test]
    fn witness_hemisphere_finite_n() {
        let w = theorem_witness(TheoremStatement::HemisphereFiniteN { alpha: 1.0, n: 10.0 })
            .unwrap();
        match w {
            WitnessOutcome::Parameters(p) => {
                assert_relative_eq!(p.beta.unwrap(), 4.0, epsilon = 1e-12)
            }
            _ => panic!("expected parameters"),
        }
        // Below the N-threshold the hypotheses fail.
        assert!(matches!(
            theorem_witness(TheoremStatement::HemisphereFiniteN { alpha: 1.0, n: 9.0 }),
            Err(Error::Statement(_))
        ));
    }

    #[test]
    fn witness_hemisphere_positive_k() {
        let w = theorem_witness(TheoremStatement::HemispherePositiveK {
            alpha: 1.0,
            beta: 5.0,
            n: INF,
        })
        .unwrap();
        match w {
            WitnessOutcome::Parameters(p) => assert_relative_eq!(p.k.unwrap(), 3.0),
            _ => panic!("expected parameters"),
        }
        // The flat boundary point has no strictly positive K.
        assert!(theorem_witness(TheoremStatement::HemispherePositiveK {
            alpha: 1.0,
            beta: 2.0,
            n: INF,
        })
        .is_err());
    }

    #[test]
    fn witness_hyperbolic_statements() {
        let w = theorem_witness(TheoremStatement::HyperbolicNoNonnegativeK {
            alpha: 1.5,
            beta: 5.0,
            n: 10.0,
        })
        .unwrap();
        assert!(matches!(w, WitnessOutcome::Certificate { .. }));

        let w = theorem_witness(TheoremStatement::HyperbolicNegativeDim { alpha: 2.0 }).unwrap();
        match w {
            WitnessOutcome::Parameters(p) => {
                assert_relative_eq!(p.beta.unwrap(), 6.0);
                assert_eq!(p.n.unwrap(), fin(-34.0));
            }
            _ => panic!("expected parameters"),
        }

        let w = theorem_witness(TheoremStatement::HyperbolicNegativeK { alpha: 1.0, n: 10.0 })
            .unwrap();
        match w {
            WitnessOutcome::Parameters(p) => {
                let beta = p.beta.unwrap();
                assert!(beta > 1.0);
                assert!(p.k.unwrap() < 0.0);
                let m = SpaceModel::hyperbolic(1.0, beta).unwrap();
                let r = kmax_closed(&m, fin(10.0)).unwrap();
                assert!(r.feasible);
            }
            _ => panic!("expected parameters"),
        }
    }

    #[test]
    fn witness_infinity_statements() {
        let w = theorem_witness(TheoremStatement::InfinityFlatFeasible).unwrap();
        assert!(matches!(w, WitnessOutcome::Parameters(_)));
        let w = theorem_witness(TheoremStatement::InfinityNoFiniteDim {
            beta: 3.0,
            gamma: 1.0,
            n: 7.0,
        })
        .unwrap();
        assert!(matches!(w, WitnessOutcome::Certificate { .. }));
    }

    #[test]
    fn pointwise_invariant_around_kmax() {
        let cases = [
            (SpaceModel::hyperbolic(1.0, 3.0).unwrap(), INF),
            (SpaceModel::sphere(1.0, 4.0).unwrap(), fin(10.0)),
            (SpaceModel::plane(0.0, 1.0).unwrap(), fin(5.0)),
            (SpaceModel::infinity(3.0, 1.0).unwrap(), INF),
        ];
        for (m, n) in cases {
            let r = kmax_closed(&m, n).unwrap();
            let km = r.kmax.unwrap();
            let grid = default_scan_grid(&m, 800);
            assert!(
                pointwise_region_check(&m, n, km - 1e-9, &grid).unwrap(),
                "{m} should pass just under kmax"
            );
            assert!(
                !pointwise_region_check(&m, n, km + 1e-6, &grid).unwrap(),
                "{m} should fail just above kmax"
            );
        }
    }

    #[test]
    fn kmax_monotone_in_n() {
        let m = SpaceModel::sphere(1.0, 4.0).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for n in [10.0, 20.0, 100.0] {
            let r = kmax_closed(&m, fin(n)).unwrap();
            if let Some(km) = r.kmax {
                assert!(km >= prev - 1e-12);
                prev = km;
            }
        }
        let r = kmax_closed(&m, INF).unwrap();
        assert!(r.kmax.unwrap() >= prev - 1e-12);
    }

    #[test]
    fn region_result_serialization() {
        let m = SpaceModel::hyperbolic(1.0, 2.0).unwrap();
        let r = kmax_closed(&m, INF).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"feasible":true,"kmax":0.0,"binding":"both","attained":true}"#
        );
    }
}
