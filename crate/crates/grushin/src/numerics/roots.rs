//! Scalar root finding (Brent) and bracketed minimization (golden section).

use crate::{Error, Result};

/// Brent's method on a sign-changing bracket `[a, b]`.
pub(crate) fn brent(
    f: &mut impl FnMut(f64) -> Result<f64>,
    a0: f64,
    b0: f64,
    xtol: f64,
) -> Result<f64> {
    let (mut a, mut b) = (a0, b0);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::NoConvergence(format!(
            "no sign change on [{a0:.6e}, {b0:.6e}]"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.abs() > fc.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation (secant when a == c).
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else {
            tol1.copysign(xm)
        };
        fb = f(b)?;
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Err(Error::NoConvergence("root iteration budget exhausted".into()))
}

/// Golden-section minimization of a unimodal-enough `f` on `[a, b]`.
/// Returns the abscissa of the best point found.
pub(crate) fn golden_min(f: &impl Fn(f64) -> f64, a0: f64, b0: f64, xtol: f64) -> f64 {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a0, b0);
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    let m = 0.5 * (a + b);
    let fm = f(m);
    if fm <= fc && fm <= fd {
        m
    } else if fc <= fd {
        c
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn brent_finds_cosine_root() {
        let mut f = |x: f64| Ok(x.cos());
        let r = brent(&mut f, 1.0, 2.0, 1e-14).unwrap();
        assert_relative_eq!(r, std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn brent_requires_bracket() {
        let mut f = |x: f64| Ok(x * x + 1.0);
        assert!(brent(&mut f, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn golden_min_quadratic() {
        // Abscissa resolution on a quadratic bottom is √ε-limited; the
        // attained VALUE is then accurate to (Δx)², which is what callers
        // (kmax refinement) consume.
        let x = golden_min(&|x: f64| (x - 1.3) * (x - 1.3) + 2.0, 0.0, 4.0, 1e-12);
        assert_relative_eq!(x, 1.3, epsilon = 1e-6);
    }
}
