//! Warped-product model spaces on the half-space.
//!
//! A model is a triple `(X, g, m)` with `X = (0, x_sup) × ℝ`, metric
//! `g = dx⊗dx + f(x)⁻² dy⊗dy`, and weighted measure `m = e^{-V(x)} vol_g`.
//! Since `vol_g = f(x)⁻¹ dx dy`, the measure has Lebesgue density
//! `w = e^{-V} / f`. Four profile families are supported:
//!
//! | family       | f(x)              | V(x)               | x_sup |
//! |--------------|-------------------|--------------------|-------|
//! | `Plane`      | x^α               | −β ln x            | ∞     |
//! | `Sphere`     | sin^α x / cos x   | −β ln sin x        | π/2   |
//! | `Hyperbolic` | sinh^α x / cosh x | −β ln sinh x       | ∞     |
//! | `Infinity`   | e^{−1/x}          | γ/x² − β ln x      | ∞     |
//!
//! The first three require `α ≥ 0` and `β ≥ α`; the last requires `β ≥ 0`
//! and `γ > 0` (its profile plays the role of an "α = ∞" degeneration and
//! has no α parameter). Coordinates below `x = 10⁻¹²` are rejected to keep
//! pointwise evaluations away from the singular boundary.

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// Smallest admissible x-coordinate for pointwise evaluation.
pub const X_MIN: f64 = 1e-12;

/// The four profile families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Plane,
    Sphere,
    Hyperbolic,
    Infinity,
}

impl Family {
    /// Lowercase name used in canonical strings and JSON.
    pub fn name(self) -> &'static str {
        match self {
            Family::Plane => "plane",
            Family::Sphere => "sphere",
            Family::Hyperbolic => "hyperbolic",
            Family::Infinity => "infinity",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plane" => Ok(Family::Plane),
            "sphere" => Ok(Family::Sphere),
            "hyperbolic" => Ok(Family::Hyperbolic),
            "infinity" => Ok(Family::Infinity),
            other => Err(Error::Construction(format!(
                "unknown family '{other}' (expected plane, sphere, hyperbolic, or infinity)"
            ))),
        }
    }
}

/// A validated model space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceModel {
    family: Family,
    alpha: f64,
    beta: f64,
    /// Only meaningful for [`Family::Infinity`]; 0 otherwise.
    gamma: f64,
}

/// Pointwise profile data: the warp `f` and weight potential `V` with their
/// first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileEval {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
    pub v: f64,
    pub dv: f64,
    pub d2v: f64,
}

fn require_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Construction(format!("{name} must be finite, got {v}")))
    }
}

impl SpaceModel {
    /// Power-law family `f = x^α`, `V = −β ln x` on `(0, ∞)`.
    pub fn plane(alpha: f64, beta: f64) -> Result<Self> {
        Self::warped(Family::Plane, alpha, beta)
    }

    /// Trigonometric family `f = sin^α x / cos x`, `V = −β ln sin x` on
    /// `(0, π/2)`.
    pub fn sphere(alpha: f64, beta: f64) -> Result<Self> {
        Self::warped(Family::Sphere, alpha, beta)
    }

    /// Hyperbolic family `f = sinh^α x / cosh x`, `V = −β ln sinh x` on
    /// `(0, ∞)`.
    pub fn hyperbolic(alpha: f64, beta: f64) -> Result<Self> {
        Self::warped(Family::Hyperbolic, alpha, beta)
    }

    fn warped(family: Family, alpha: f64, beta: f64) -> Result<Self> {
        require_finite("alpha", alpha)?;
        require_finite("beta", beta)?;
        if alpha < 0.0 {
            return Err(Error::Construction(format!(
                "alpha must be nonnegative, got {alpha}"
            )));
        }
        if beta < alpha {
            return Err(Error::Construction(format!(
                "beta must satisfy beta >= alpha, got beta = {beta} < alpha = {alpha}"
            )));
        }
        Ok(SpaceModel {
            family,
            alpha,
            beta,
            gamma: 0.0,
        })
    }

    /// Flat-to-all-orders family `f = e^{−1/x}`, `V = γ/x² − β ln x` on
    /// `(0, ∞)`; requires `β ≥ 0` and `γ > 0`.
    pub fn infinity(beta: f64, gamma: f64) -> Result<Self> {
        require_finite("beta", beta)?;
        require_finite("gamma", gamma)?;
        if beta < 0.0 {
            return Err(Error::Construction(format!(
                "beta must be nonnegative, got {beta}"
            )));
        }
        if gamma <= 0.0 {
            return Err(Error::Construction(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        Ok(SpaceModel {
            family: Family::Infinity,
            alpha: 0.0,
            beta,
            gamma,
        })
    }

    /// Build from family tag and raw parameters (γ ignored except for
    /// [`Family::Infinity`], where it is required).
    pub fn from_parts(family: Family, alpha: f64, beta: f64, gamma: Option<f64>) -> Result<Self> {
        match family {
            Family::Plane => Self::plane(alpha, beta),
            Family::Sphere => Self::sphere(alpha, beta),
            Family::Hyperbolic => Self::hyperbolic(alpha, beta),
            Family::Infinity => {
                if alpha != 0.0 {
                    return Err(Error::Construction(format!(
                        "the infinity family has no alpha parameter (got alpha = {alpha}; omit it or pass 0)"
                    )));
                }
                let gamma = gamma.ok_or_else(|| {
                    Error::Construction("the infinity family requires gamma".into())
                })?;
                Self::infinity(beta, gamma)
            }
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// γ for the Infinity family, `None` otherwise.
    pub fn gamma(&self) -> Option<f64> {
        match self.family {
            Family::Infinity => Some(self.gamma),
            _ => None,
        }
    }

    /// The open coordinate interval `(0, x_sup)`.
    pub fn domain(&self) -> (f64, f64) {
        match self.family {
            Family::Sphere => (0.0, std::f64::consts::FRAC_PI_2),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Whether the weight is trivial (`V ≡ 0`), i.e. the measure is the
    /// Riemannian volume. Holds exactly when β = 0 for the warped families;
    /// never for the Infinity family (γ > 0).
    pub fn weight_free(&self) -> bool {
        self.family != Family::Infinity && self.beta == 0.0
    }

    /// Validate an evaluation coordinate: `X_MIN ≤ x < x_sup` and finite.
    pub fn check_x(&self, x: f64) -> Result<()> {
        let (_, hi) = self.domain();
        if !x.is_finite() || x < X_MIN || x >= hi {
            return Err(Error::Domain(format!(
                "x = {x} outside [{X_MIN:e}, {hi}) for the {} family",
                self.family
            )));
        }
        Ok(())
    }

    /// Evaluate `f`, `V`, and their first two derivatives at `x`.
    pub fn profile(&self, x: f64) -> Result<ProfileEval> {
        self.check_x(x)?;
        Ok(self.profile_unchecked(x))
    }

    pub(crate) fn profile_unchecked(&self, x: f64) -> ProfileEval {
        let (alpha, beta, gamma) = (self.alpha, self.beta, self.gamma);
        match self.family {
            Family::Plane => {
                let f = x.powf(alpha);
                ProfileEval {
                    f,
                    df: alpha * x.powf(alpha - 1.0),
                    d2f: alpha * (alpha - 1.0) * x.powf(alpha - 2.0),
                    v: -beta * x.ln(),
                    dv: -beta / x,
                    d2v: beta / (x * x),
                }
            }
            Family::Sphere => {
                let (s, c) = x.sin_cos();
                let f = s.powf(alpha) / c;
                // Logarithmic derivative L = f'/f and its derivative.
                let l = alpha * c / s + s / c;
                let lp = -alpha / (s * s) + 1.0 / (c * c);
                ProfileEval {
                    f,
                    df: f * l,
                    d2f: f * (lp + l * l),
                    v: -beta * s.ln(),
                    dv: -beta * c / s,
                    d2v: beta / (s * s),
                }
            }
            Family::Hyperbolic => {
                let (s, c) = (x.sinh(), x.cosh());
                let f = s.powf(alpha) / c;
                let l = alpha * c / s - s / c;
                let lp = -alpha / (s * s) - 1.0 / (c * c);
                ProfileEval {
                    f,
                    df: f * l,
                    d2f: f * (lp + l * l),
                    v: -beta * s.ln(),
                    dv: -beta * c / s,
                    d2v: beta / (s * s),
                }
            }
            Family::Infinity => {
                let f = (-1.0 / x).exp();
                let x2 = x * x;
                let l = 1.0 / x2;
                let lp = -2.0 / (x2 * x);
                ProfileEval {
                    f,
                    df: f * l,
                    d2f: f * (lp + l * l),
                    v: gamma / x2 - beta * x.ln(),
                    dv: -2.0 * gamma / (x2 * x) - beta / x,
                    d2v: 6.0 * gamma / (x2 * x2) + beta / x2,
                }
            }
        }
    }

    /// Lebesgue density `w = e^{-V} / f` of the weighted measure, in closed
    /// form per family.
    pub fn weight_density(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        let (alpha, beta, gamma) = (self.alpha, self.beta, self.gamma);
        Ok(match self.family {
            Family::Plane => x.powf(beta - alpha),
            Family::Sphere => x.cos() * x.sin().powf(beta - alpha),
            Family::Hyperbolic => x.cosh() * x.sinh().powf(beta - alpha),
            Family::Infinity => x.powf(beta) * (-gamma / (x * x) + 1.0 / x).exp(),
        })
    }

    /// Length of the tangent vector `(dx, dy)` at footpoint `x` in the metric
    /// `g = dx⊗dx + f⁻² dy⊗dy`: `√(dx² + dy²/f²)`.
    pub fn metric_length(&self, x: f64, dx: f64, dy: f64) -> Result<f64> {
        let p = self.profile(x)?;
        Ok(dx.hypot(dy / p.f))
    }

    /// Squared warp `f(|x|)²` of the even extension across the singular line
    /// `x = 0`. Meaningful for the Hamiltonian flow, which crosses the line.
    pub(crate) fn warp_sq(&self, x: f64) -> f64 {
        let ax = x.abs();
        let (alpha, _, _) = (self.alpha, self.beta, self.gamma);
        match self.family {
            Family::Plane => ax.powf(2.0 * alpha),
            Family::Sphere => {
                let (s, c) = ax.sin_cos();
                s.powf(2.0 * alpha) / (c * c)
            }
            Family::Hyperbolic => {
                let (s, c) = (ax.sinh(), ax.cosh());
                s.powf(2.0 * alpha) / (c * c)
            }
            Family::Infinity => (-2.0 / ax).exp(),
        }
    }

    /// `(f f')(|x|) · sign(x)` for the even extension: the force term of the
    /// Hamiltonian flow. Zero by symmetry at `x = 0`.
    pub(crate) fn warp_force(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let ax = x.abs();
        let sign = x.signum();
        let alpha = self.alpha;
        sign * match self.family {
            Family::Plane => alpha * ax.powf(2.0 * alpha - 1.0),
            Family::Sphere => {
                let (s, c) = ax.sin_cos();
                (s.powf(2.0 * alpha) / (c * c)) * (alpha * c / s + s / c)
            }
            Family::Hyperbolic => {
                let (s, c) = (ax.sinh(), ax.cosh());
                (s.powf(2.0 * alpha) / (c * c)) * (alpha * c / s - s / c)
            }
            // exp(−2/x)/x² computed in log form to avoid 0·∞ at tiny x.
            Family::Infinity => (-2.0 / ax - 2.0 * ax.ln()).exp(),
        }
    }

    /// Canonical string `family:alpha=<a>,beta=<b>[,gamma=<g>]`.
    pub fn canonical(&self) -> String {
        match self.family {
            Family::Infinity => format!(
                "infinity:alpha=0,beta={},gamma={}",
                self.beta, self.gamma
            ),
            fam => format!("{}:alpha={},beta={}", fam, self.alpha, self.beta),
        }
    }
}

impl fmt::Display for SpaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl FromStr for SpaceModel {
    type Err = Error;

    /// Parse the canonical form `family:alpha=<a>,beta=<b>[,gamma=<g>]`.
    /// For the Infinity family `alpha` may be omitted (or 0); `gamma` is
    /// required there and rejected elsewhere.
    fn from_str(s: &str) -> Result<Self> {
        let (fam_str, params) = s.split_once(':').ok_or_else(|| {
            Error::Construction(format!(
                "malformed space '{s}' (expected family:alpha=...,beta=...[,gamma=...])"
            ))
        })?;
        let family: Family = fam_str.trim().parse()?;
        let mut alpha = None;
        let mut beta = None;
        let mut gamma = None;
        for item in params.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (key, value) = item.split_once('=').ok_or_else(|| {
                Error::Construction(format!("malformed parameter '{item}' in '{s}'"))
            })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::Construction(format!("invalid number '{}' in '{s}'", value.trim()))
            })?;
            let slot = match key.trim() {
                "alpha" => &mut alpha,
                "beta" => &mut beta,
                "gamma" => &mut gamma,
                other => {
                    return Err(Error::Construction(format!(
                        "unknown parameter '{other}' in '{s}'"
                    )))
                }
            };
            if slot.replace(value).is_some() {
                return Err(Error::Construction(format!(
                    "duplicate parameter '{}' in '{s}'",
                    key.trim()
                )));
            }
        }
        let beta =
            beta.ok_or_else(|| Error::Construction(format!("missing beta in '{s}'")))?;
        match family {
            Family::Infinity => SpaceModel::from_parts(family, alpha.unwrap_or(0.0), beta, gamma),
            _ => {
                if gamma.is_some() {
                    return Err(Error::Construction(format!(
                        "gamma is only valid for the infinity family (in '{s}')"
                    )));
                }
                let alpha = alpha
                    .ok_or_else(|| Error::Construction(format!("missing alpha in '{s}'")))?;
                SpaceModel::from_parts(family, alpha, beta, None)
            }
        }
    }
}

impl Serialize for SpaceModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = if self.family == Family::Infinity { 4 } else { 3 };
        let mut st = serializer.serialize_struct("SpaceModel", n)?;
        st.serialize_field("family", self.family.name())?;
        st.serialize_field("alpha", &self.alpha)?;
        st.serialize_field("beta", &self.beta)?;
        if self.family == Family::Infinity {
            st.serialize_field("gamma", &self.gamma)?;
        }
        st.end()
    }
}
