use serde::Serialize;

use super::RadialFunction;
use crate::error::{GeomError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute error estimate, never negative.
    pub est_error: f64,
}

const MAX_DEPTH: u32 = 50;

/// Adaptive Simpson quadrature of a radial function on `[a, b]`.
///
/// Sampled functions are split at their nodes first, so each piece is
/// smooth (linear) and integrates exactly.
pub fn integrate(f: &RadialFunction, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    let mut cuts = vec![a];
    cuts.extend(f.breakpoints(a, b));
    cuts.push(b);
    if cuts.len() == 2 {
        return integrate_fn(|x| f.eval(x), a, b, tol);
    }
    let total = b - a;
    let mut out = QuadratureResult { value: 0.0, est_error: 0.0 };
    for w in cuts.windows(2) {
        let share = tol * (w[1] - w[0]) / total;
        let piece = integrate_fn(|x| f.eval(x), w[0], w[1], share.max(f64::MIN_POSITIVE))?;
        out.value += piece.value;
        out.est_error += piece.est_error;
    }
    Ok(out)
}

/// Adaptive Simpson quadrature of an arbitrary closure on `[a, b]`.
///
/// The absolute budget `tol` is halved at every bisection; accepted panels
/// get the Richardson correction `(S2 - S1) / 15`.
pub fn integrate_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    if !(a <= b) || !(tol > 0.0) {
        return Err(GeomError::InvalidInput(format!(
            "integrate needs a <= b and tol > 0 (a={a}, b={b}, tol={tol})"
        )));
    }
    if a == b {
        return Ok(QuadratureResult { value: 0.0, est_error: 0.0 });
    }
    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(GeomError::NumericalDomain { location: format!("integrand at {x}"), value: y })
        }
    };
    // Four initial panels guard against symmetric integrands fooling the
    // first error estimate.
    let panels = 4;
    let h = (b - a) / panels as f64;
    let mut acc = Acc { value: 0.0, err: 0.0, hit_depth: false };
    for k in 0..panels {
        let lo = a + h * k as f64;
        let hi = if k + 1 == panels { b } else { lo + h };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (eval(lo)?, eval(mid)?, eval(hi)?);
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        step(&eval, lo, hi, flo, fmid, fhi, whole, tol / panels as f64, 0, &mut acc)?;
    }
    if acc.hit_depth && acc.err > tol {
        return Err(GeomError::QuadratureNotConverged { a, b, tol, est: acc.err });
    }
    Ok(QuadratureResult { value: acc.value, est_error: acc.err })
}

struct Acc {
    value: f64,
    err: f64,
    hit_depth: bool,
}

#[allow(clippy::too_many_arguments)]
fn step(
    eval: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    acc: &mut Acc,
) -> Result<()> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = eval(lm)?;
    let frm = eval(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let err = delta.abs() / 15.0;
    // Below this the difference is rounding noise and bisecting cannot help.
    let noise = 1e3 * f64::EPSILON * (left.abs() + right.abs());
    if err <= tol || delta.abs() <= noise || depth >= MAX_DEPTH || lm <= a || rm >= b {
        if err > tol && delta.abs() > noise {
            acc.hit_depth = true;
        }
        acc.value += left + right + delta / 15.0;
        acc.err += err;
        return Ok(());
    }
    step(eval, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, acc)?;
    step(eval, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, acc)
}
