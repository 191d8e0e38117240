use serde::Serialize;

use crate::error::{GeomError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct InequalityMargin {
    pub name: &'static str,
    /// Smallest `rhs - lhs` over the grid, evaluated in a cancellation-free form.
    pub worst_margin: f64,
    pub worst_t: f64,
    /// Smallest `rhs - lhs` from the naive formulas, relative to `rhs`.
    /// Rounding can push this a few ulps below zero at large `t`.
    pub naive_relative_margin: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalarInequalityReport {
    pub b: f64,
    pub checks: Vec<InequalityMargin>,
    pub pass: bool,
}

/// Checks on every grid point, with `x = sqrt(-b) t` and `k = sqrt(-b)`:
///
/// * (i)   `sinh x / cosh^2 x <= 2 e^{-x}`
/// * (ii)  `1 / cosh x <= 2 e^{-x}`
/// * (iii) `k (cosh x - 1) / sinh x <= k coth x` for `t > 0`
///
/// (iii) is singular at `t = 0` (the right side diverges), so that node is
/// skipped for it.
///
/// Margins are computed from exact rearrangements with `q = e^{-2x}`:
/// (i) `2e^{-x}(3q + q^2)/(1+q)^2`, (ii) `2e^{-x} q/(1+q)`, (iii) `k / sinh x`.
/// The naive differences are reported alongside.
pub fn scalar_inequality_suite(b: f64, grid: &[f64]) -> Result<ScalarInequalityReport> {
    if !(b < 0.0) {
        return Err(GeomError::InvalidInput(format!("curvature must be negative, got {b}")));
    }
    if grid.is_empty() || grid.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(GeomError::InvalidInput("grid must be nonempty with finite t >= 0".into()));
    }
    let k = (-b).sqrt();
    let mut checks = vec![
        blank("sinh/cosh^2 <= 2exp(-x)"),
        blank("1/cosh <= 2exp(-x)"),
        blank("k(cosh-1)/sinh <= eta_b"),
    ];
    for &t in grid {
        let x = k * t;
        let e = (-x).exp();
        let q = e * e;
        let m1 = 2.0 * e * (3.0 * q + q * q) / ((1.0 + q) * (1.0 + q));
        let naive1 = rel(2.0 * e, x.sinh() / (x.cosh() * x.cosh()));
        record(&mut checks[0], t, m1, naive1);

        let m2 = 2.0 * e * q / (1.0 + q);
        let naive2 = rel(2.0 * e, 1.0 / x.cosh());
        record(&mut checks[1], t, m2, naive2);

        if t > 0.0 {
            let m3 = k / x.sinh();
            let eta = k / x.tanh();
            let naive3 = rel(eta, k * (x.cosh() - 1.0) / x.sinh());
            record(&mut checks[2], t, m3, naive3);
        }
    }
    let pass = checks.iter().all(|c| c.worst_margin >= 0.0);
    Ok(ScalarInequalityReport { b, checks, pass })
}

fn blank(name: &'static str) -> InequalityMargin {
    InequalityMargin {
        name,
        worst_margin: f64::INFINITY,
        worst_t: f64::NAN,
        naive_relative_margin: f64::INFINITY,
        points: 0,
    }
}

fn rel(rhs: f64, lhs: f64) -> f64 {
    if rhs == 0.0 {
        rhs - lhs
    } else {
        (rhs - lhs) / rhs.abs()
    }
}

fn record(m: &mut InequalityMargin, t: f64, margin: f64, naive: f64) {
    m.points += 1;
    if margin < m.worst_margin || m.worst_t.is_nan() {
        m.worst_margin = margin;
        m.worst_t = t;
    }
    m.naive_relative_margin = m.naive_relative_margin.min(naive);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        // (i) at t = 1, b = -1: sinh1/cosh^2 1 = 0.4937.. vs 2/e = 0.7358..
        let r = scalar_inequality_suite(-1.0, &[1.0]).unwrap();
        let direct = 2.0 * (-1.0f64).exp() - 1.0f64.sinh() / 1.0f64.cosh().powi(2);
        assert!((r.checks[0].worst_margin - direct).abs() < 1e-15);
        assert!((direct - 0.242_204_534_778_311_6).abs() < 1e-12);
        // (ii) at b = -4, t = 2: 1/cosh 4 vs 2e^{-4}, margin tiny but positive.
        let r = scalar_inequality_suite(-4.0, &[2.0]).unwrap();
        let direct = 2.0 * (-4.0f64).exp() - 1.0 / 4.0f64.cosh();
        assert!(r.checks[1].worst_margin > 0.0);
        assert!((r.checks[1].worst_margin - direct).abs() < 1e-15);
    }

    #[test]
    fn origin_is_skipped_for_third() {
        let r = scalar_inequality_suite(-1.0, &[0.0]).unwrap();
        assert!((r.checks[0].worst_margin - 2.0).abs() < 1e-15);
        assert_eq!(r.checks[2].points, 0);
        assert!(r.pass);
    }

    #[test]
    fn rejects_nonnegative_curvature() {
        assert!(scalar_inequality_suite(0.0, &[1.0]).is_err());
    }
}
