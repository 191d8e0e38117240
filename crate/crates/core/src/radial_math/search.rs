use serde::Serialize;

use super::{hybrid_grid, RadialFunction};
use crate::error::{GeomError, Result};

/// Default finite-difference step for radial derivatives.
pub fn default_step(t: f64) -> f64 {
    (1e-4 * t.abs()).max(1e-5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeEstimate {
    pub value: f64,
    /// True when `t < step` forced a forward difference.
    pub one_sided: bool,
}

pub fn derivative(f: &RadialFunction, t: f64, step: f64) -> DerivativeEstimate {
    derivative_fn(|x| f.eval(x), t, step)
}

/// Central difference, or a second-order forward difference near the origin.
pub fn derivative_fn(f: impl Fn(f64) -> f64, t: f64, step: f64) -> DerivativeEstimate {
    if t - step >= 0.0 {
        DerivativeEstimate { value: (f(t + step) - f(t - step)) / (2.0 * step), one_sided: false }
    } else {
        let value = (-3.0 * f(t) + 4.0 * f(t + step) - f(t + 2.0 * step)) / (2.0 * step);
        DerivativeEstimate { value, one_sided: true }
    }
}

/// Golden-section minimisation on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while (b - a).abs() > tol && iter < 200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfimumResult {
    pub t: f64,
    pub value: f64,
    pub grid_min_t: f64,
    pub grid_min: f64,
    /// f is non-decreasing (up to `refine_tol`) over the last decade
    /// `[t_max / 10, t_max]` of the grid.
    pub tail_nondecreasing: bool,
    /// Largest deviation of f from `f(t_max)` over `[t_max / 2, t_max]`.
    pub tail_variation: f64,
    /// `tail_variation <= refine_tol`: the scanned range has reached the
    /// plateau, so no smaller values hide beyond it at this resolution.
    pub tail_settled: bool,
}

/// Infimum of `f` over the default hybrid grid on `[t_min, t_max]`.
pub fn infimum_on_ray(f: &RadialFunction, t_min: f64, t_max: f64, refine_tol: f64) -> Result<InfimumResult> {
    if !(t_min > 0.0 && t_max > t_min) {
        return Err(GeomError::InvalidInput(format!("bad ray [{t_min}, {t_max}]")));
    }
    let grid = hybrid_grid(t_min, t_max, 2048, t_max.min(1.0));
    infimum_on_grid(|t| f.eval(t), &grid, refine_tol)
}

/// Grid scan plus golden-section refinement in the cell pair around the
/// best node. The result never exceeds the raw grid minimum.
pub fn infimum_on_grid(f: impl Fn(f64) -> f64, grid: &[f64], refine_tol: f64) -> Result<InfimumResult> {
    if grid.len() < 2 {
        return Err(GeomError::InvalidInput("infimum scan needs at least two grid points".into()));
    }
    let values: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    for (t, v) in grid.iter().zip(&values) {
        if !v.is_finite() {
            return Err(GeomError::NumericalDomain { location: format!("f({t})"), value: *v });
        }
    }
    let (best, &grid_min) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty grid");
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let (mut t_star, mut v_star) = golden_section(&f, lo, hi, refine_tol.max(1e-12 * hi));
    if !(v_star <= grid_min) {
        t_star = grid[best];
        v_star = grid_min;
    }

    let t_max = grid[grid.len() - 1];
    let last = values[values.len() - 1];
    let decade: Vec<f64> = grid
        .iter()
        .zip(&values)
        .filter(|(t, _)| **t >= t_max / 10.0)
        .map(|(_, v)| *v)
        .collect();
    let tail_nondecreasing = decade.windows(2).all(|w| w[1] >= w[0] - refine_tol);
    let tail_variation = grid
        .iter()
        .zip(&values)
        .filter(|(t, _)| **t >= t_max / 2.0)
        .map(|(_, v)| (v - last).abs())
        .fold(0.0, f64::max);

    Ok(InfimumResult {
        t: t_star,
        value: v_star,
        grid_min_t: grid[best],
        grid_min,
        tail_nondecreasing,
        tail_variation,
        tail_settled: tail_variation <= refine_tol,
    })
}

/// Smallest `t` on the default grid over `[0, t_max]` from which `g`
/// stays at or above `threshold` on every later grid point.
///
/// The grid starts at 0; a non-finite value there (a removable singularity
/// of the caller's formula) drops that node.
pub fn first_crossing(g: &RadialFunction, threshold: f64, t_max: f64) -> Result<Option<f64>> {
    if !(t_max > 0.0) {
        return Err(GeomError::InvalidInput(format!("t_max must be positive, got {t_max}")));
    }
    let mut grid = vec![0.0];
    grid.extend(hybrid_grid((1e-3f64).min(0.5 * t_max), t_max, 2048, t_max.min(1.0)));
    if !g.eval(0.0).is_finite() {
        grid.remove(0);
    }
    first_crossing_on(|t| g.eval(t), threshold, &grid)
}

/// As [`first_crossing`] on an explicit increasing grid. The leading edge
/// between the last failing node and the next node is refined by bisection.
pub fn first_crossing_on(g: impl Fn(f64) -> f64, threshold: f64, grid: &[f64]) -> Result<Option<f64>> {
    if grid.is_empty() {
        return Ok(None);
    }
    let mut last_fail = None;
    for (i, &t) in grid.iter().enumerate() {
        let v = g(t);
        if !v.is_finite() {
            return Err(GeomError::NumericalDomain { location: format!("g({t})"), value: v });
        }
        if v < threshold {
            last_fail = Some(i);
        }
    }
    let j = match last_fail {
        None => return Ok(Some(grid[0])),
        Some(j) if j + 1 == grid.len() => return Ok(None),
        Some(j) => j,
    };
    let (mut lo, mut hi) = (grid[j], grid[j + 1]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) >= threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_identity_and_cosh() {
        let id = RadialFunction::identity();
        assert!((derivative(&id, 1.0, default_step(1.0)).value - 1.0).abs() < 1e-10);
        let cosh = RadialFunction::closed("cosh", f64::cosh);
        let d = derivative(&cosh, 1.0, default_step(1.0));
        assert!((d.value - 1.0f64.sinh()).abs() < 1e-8);
        assert!(!d.one_sided);
        assert_eq!(derivative(&RadialFunction::constant(5.0), 2.0, 1e-4).value, 0.0);
    }

    #[test]
    fn derivative_near_origin_is_one_sided() {
        let f = RadialFunction::closed("sq", |x| x * x + x);
        let d = derivative(&f, 0.0, 1e-3);
        assert!(d.one_sided);
        assert!((d.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infimum_of_constant_and_quadratic() {
        let one = RadialFunction::constant(1.0);
        let r = infimum_on_ray(&one, 0.01, 50.0, 1e-9).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.tail_nondecreasing && r.tail_settled);

        let q = RadialFunction::closed("q", |t| (t - 2.0) * (t - 2.0) + 3.0);
        let r = infimum_on_ray(&q, 0.1, 10.0, 1e-9).unwrap();
        assert!((r.t - 2.0).abs() < 1e-4);
        assert!((r.value - 3.0).abs() < 1e-9);
        assert!(r.value <= r.grid_min);
    }

    #[test]
    fn infimum_rejects_non_finite() {
        let f = RadialFunction::closed("bad", |t| if t > 5.0 { f64::NAN } else { t });
        assert!(infimum_on_ray(&f, 0.1, 10.0, 1e-9).is_err());
    }

    #[test]
    fn first_crossing_cases() {
        assert_eq!(first_crossing(&RadialFunction::constant(1.0), 0.5, 10.0).unwrap(), Some(0.0));
        let tanh = RadialFunction::closed("tanh", f64::tanh);
        assert_eq!(first_crossing(&tanh, 2.0, 10.0).unwrap(), None);
        // tanh crosses 1/2 at atanh(1/2).
        let t = first_crossing(&tanh, 0.5, 10.0).unwrap().unwrap();
        assert!((t - 0.5f64.atanh()).abs() < 1e-12);
    }

    #[test]
    fn first_crossing_with_late_dip() {
        // Above threshold early, dips below around 3, recovers afterwards.
        let g = |t: f64| if (2.9..3.1).contains(&t) { 0.0 } else { 1.0 };
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let t = first_crossing_on(g, 0.5, &grid).unwrap().unwrap();
        assert!((t - 3.1).abs() < 1e-9);
    }
}
