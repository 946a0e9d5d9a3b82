//! The weighted N-Ricci tensor of a warped-product model.
//!
//! For `g = dx⊗dx + f⁻² dy⊗dy` with weight potential `V`, the tensor
//! `Ric_{N,V} = Ric + Hess V − (dV ⊗ dV)/(N−2)` is diagonal in the
//! orthonormal frame `{∂x, f ∂y}`, with entries
//!
//! ```text
//! rxx = (f′/f)′ − (f′/f)² + V″ − (V′)²/(N−2)
//! ryy = (f′/f)′ − (f′/f)² − (f′/f) V′
//! ```
//!
//! (`ryy` is reported in the orthonormal frame, i.e. divided by `g_yy`, so
//! `Ric_{N,V} ≥ K g` is the scalar comparison `min(rxx, ryy) ≥ K`.) The
//! module evaluates these three independent ways — the structural lemma above
//! applied to profile data, per-family closed forms, and a finite-difference
//! oracle using only pointwise values — plus the Gauss curvature
//! `(f′/f)′ − (f′/f)²` of the unweighted metric.
//!
//! The effective dimension `N` ranges over `(−∞,0) ∪ [2,+∞]`; the dimension
//! `N = 2` (the topological dimension) is admissible only for trivial weight,
//! where the `(V′)²/(N−2)` term is absent.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::model::{Family, SpaceModel};
use crate::{Error, Result};

/// Effective dimension parameter: a finite value in `(−∞,0) ∪ [2,∞)` or the
/// distinguished `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EffectiveDim {
    Finite(f64),
    Infinite,
}

impl EffectiveDim {
    pub const INFINITE: EffectiveDim = EffectiveDim::Infinite;

    /// Validate a finite effective dimension: values in `[0, 2)` are never
    /// admissible; exactly 2 is admitted (usable only with trivial weight,
    /// which each operation checks).
    pub fn finite(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Dim(format!("dimension must be finite, got {value}")));
        }
        if value >= 0.0 && value < 2.0 {
            return Err(Error::Dim(format!(
                "dimension {value} lies in the excluded band [0, 2)"
            )));
        }
        Ok(EffectiveDim::Finite(value))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, EffectiveDim::Infinite)
    }

    /// Finite value, if any.
    pub fn value(&self) -> Option<f64> {
        match self {
            EffectiveDim::Finite(v) => Some(*v),
            EffectiveDim::Infinite => None,
        }
    }

    /// The factor `1/(N−2)` of the dimensional correction term.
    ///
    /// Returns 0 for `N = ∞` and for `N = 2`: in the latter case the term is
    /// absent from the definition, and callers must have verified `V ≡ 0`
    /// (see [`require_admissible`]).
    pub(crate) fn inv_nm2(&self) -> f64 {
        match self {
            EffectiveDim::Infinite => 0.0,
            EffectiveDim::Finite(v) if *v == 2.0 => 0.0,
            EffectiveDim::Finite(v) => 1.0 / (v - 2.0),
        }
    }
}

impl fmt::Display for EffectiveDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EffectiveDim::Finite(v) => write!(f, "{v}"),
            EffectiveDim::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for EffectiveDim {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "+inf" {
            return Ok(EffectiveDim::Infinite);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::Dim(format!("cannot parse dimension '{s}'")))?;
        if v == f64::INFINITY {
            return Ok(EffectiveDim::Infinite);
        }
        EffectiveDim::finite(v)
    }
}

impl Serialize for EffectiveDim {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            EffectiveDim::Finite(v) => serializer.serialize_f64(*v),
            EffectiveDim::Infinite => serializer.serialize_str("inf"),
        }
    }
}

/// Diagonal entries of `Ric_{N,V}` in the orthonormal frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RicciValue {
    pub rxx: f64,
    /// `Ric(Y, Y)` for the unit field `Y = f ∂y` (the `dy⊗dy` coefficient
    /// divided by `g_yy = 1/f²`).
    pub ryy_over_gyy: f64,
}

impl RicciValue {
    /// Smallest eigenvalue: `Ric_{N,V} ≥ K g` at the point iff `min ≥ K`.
    pub fn min(&self) -> f64 {
        self.rxx.min(self.ryy_over_gyy)
    }
}

/// Check that `(space, N)` is an admissible pair: `N = 2` demands trivial
/// weight (β = 0, and the Infinity family — whose γ > 0 always weights the
/// measure — is excluded entirely).
fn require_admissible(space: &SpaceModel, n: EffectiveDim) -> Result<()> {
    if n == EffectiveDim::Finite(2.0) && !space.weight_free() {
        return Err(Error::Dim(format!(
            "N = 2 requires a trivial weight, but {space} has a nonconstant potential"
        )));
    }
    Ok(())
}

/// `Ric_{N,V}` from the structural warped-product lemma, using profile
/// derivative data.
pub fn ricci_lemma(space: &SpaceModel, x: f64, n: EffectiveDim) -> Result<RicciValue> {
    require_admissible(space, n)?;
    let p = space.profile(x)?;
    let l = p.df / p.f;
    // (f'/f)' − (f'/f)² = f''/f − 2 (f'/f)².
    let base = p.d2f / p.f - 2.0 * l * l;
    Ok(RicciValue {
        rxx: base + p.d2v - p.dv * p.dv * n.inv_nm2(),
        ryy_over_gyy: base - l * p.dv,
    })
}

/// `Ric_{N,V}` from the per-family closed forms.
pub fn ricci_closed(space: &SpaceModel, x: f64, n: EffectiveDim) -> Result<RicciValue> {
    require_admissible(space, n)?;
    space.check_x(x)?;
    let t = n.inv_nm2();
    let (alpha, beta) = (space.alpha(), space.beta());
    Ok(match space.family() {
        Family::Plane => {
            let x2 = x * x;
            RicciValue {
                rxx: (beta - alpha * alpha - alpha - beta * beta * t) / x2,
                ryy_over_gyy: (alpha * beta - alpha * alpha - alpha) / x2,
            }
        }
        Family::Sphere => {
            // rxx = E1 − A1/sin²x, ryy = E2 − A2/sin²x.
            let s2 = x.sin().powi(2);
            let a1 = alpha * alpha + alpha - beta + beta * beta * t;
            let e1 = (alpha - 1.0) * (alpha - 1.0) + beta * beta * t;
            let a2 = alpha * alpha + alpha - alpha * beta;
            let e2 = (alpha - 1.0) * (alpha - 1.0) - beta * (alpha - 1.0);
            RicciValue {
                rxx: e1 - a1 / s2,
                ryy_over_gyy: e2 - a2 / s2,
            }
        }
        Family::Hyperbolic => {
            // rxx = −E1 − A1/sinh²x, ryy = −E2 − A2/sinh²x.
            let s2 = x.sinh().powi(2);
            let a1 = alpha * alpha + alpha - beta + beta * beta * t;
            let e1 = (alpha - 1.0) * (alpha - 1.0) + beta * beta * t;
            let a2 = alpha * alpha + alpha - alpha * beta;
            let e2 = (alpha - 1.0) * (alpha - 1.0) - beta * (alpha - 1.0);
            RicciValue {
                rxx: -e1 - a1 / s2,
                ryy_over_gyy: -e2 - a2 / s2,
            }
        }
        Family::Infinity => {
            let gamma = space.gamma().unwrap_or(0.0);
            let x2 = x * x;
            let x3 = x2 * x;
            let x4 = x2 * x2;
            let dim_term = 2.0 * gamma + beta * x2;
            RicciValue {
                rxx: (6.0 * gamma - 1.0) / x4 - 2.0 / x3 + beta / x2
                    - dim_term * dim_term * t / (x4 * x2),
                ryy_over_gyy: 2.0 * gamma / (x4 * x) - 1.0 / x4 + (beta - 2.0) / x3,
            }
        }
    })
}

/// `Ric_{N,V}` from central differences of `ln f` and `V` pointwise values —
/// an oracle independent of the analytic derivative formulas.
///
/// Requires `1e−6 ≤ h ≤ 1e−3` and a footpoint `x ≥ 1e−6` with `x ± 2h`
/// interior (the oracle refuses the near-singular band where the stencil
/// would underflow).
pub fn ricci_fd(space: &SpaceModel, x: f64, n: EffectiveDim, h: f64) -> Result<RicciValue> {
    require_admissible(space, n)?;
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::Invalid(format!(
            "finite-difference step h = {h} outside [1e-6, 1e-3]"
        )));
    }
    if x < 1e-6 {
        return Err(Error::Domain(format!(
            "finite-difference oracle refuses x = {x} < 1e-6"
        )));
    }
    space.check_x(x - 2.0 * h)?;
    space.check_x(x + 2.0 * h)?;
    let pm = space.profile(x - h)?;
    let p0 = space.profile(x)?;
    let pp = space.profile(x + h)?;
    let (lm, l0, lp) = (pm.f.ln(), p0.f.ln(), pp.f.ln());
    // dlf = (ln f)' = f'/f; d2lf = (ln f)'' = (f'/f)'.
    let dlf = (lp - lm) / (2.0 * h);
    let d2lf = (lp - 2.0 * l0 + lm) / (h * h);
    let dv = (pp.v - pm.v) / (2.0 * h);
    let d2v = (pp.v - 2.0 * p0.v + pm.v) / (h * h);
    let base = d2lf - dlf * dlf;
    Ok(RicciValue {
        rxx: base + d2v - dv * dv * n.inv_nm2(),
        ryy_over_gyy: base - dlf * dv,
    })
}

/// Sectional (Gauss) curvature `(f′/f)′ − (f′/f)²` of the unweighted metric.
/// Depends only on the warp profile — weight parameters are ignored.
pub fn gauss_curvature(space: &SpaceModel, x: f64) -> Result<f64> {
    let p = space.profile(x)?;
    let l = p.df / p.f;
    Ok(p.d2f / p.f - 2.0 * l * l)
}
