//! Closed forms of the hyperbolic model `H^n(b)` and of two-dimensional
//! rotationally symmetric models with a general warping function.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::radial_math::{integrate, RadialFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicAmbient {
    pub b: f64,
    pub n: usize,
}

/// Largest supported ambient dimension (vectors are stored inline).
pub const MAX_AMBIENT_DIM: usize = 7;

impl HyperbolicAmbient {
    pub fn new(b: f64, n: usize) -> Result<Self> {
        if !(b < 0.0) || !b.is_finite() {
            return Err(GeomError::InvalidInput(format!("curvature b must be negative, got {b}")));
        }
        if !(3..=MAX_AMBIENT_DIM).contains(&n) {
            return Err(GeomError::InvalidInput(format!(
                "ambient dimension must lie in 3..={MAX_AMBIENT_DIM}, got {n}"
            )));
        }
        Ok(Self { b, n })
    }

    pub fn kappa(&self) -> f64 {
        (-self.b).sqrt()
    }
}

/// `sinh(k r)/k` with `k = sqrt(-b)`.
pub fn omega_b(b: f64, r: f64) -> f64 {
    let k = (-b).sqrt();
    (k * r).sinh() / k
}

/// The hyperbolic warping function with exact derivatives.
pub fn omega_b_fn(b: f64) -> RadialFunction {
    let k = (-b).sqrt();
    RadialFunction::closed(format!("omega_b b={b}"), move |r| (k * r).sinh() / k)
        .with_derivative(move |r| (k * r).cosh())
        .with_second_derivative(move |r| k * (k * r).sinh())
}

/// `k coth(k r)`, the mean curvature of geodesic spheres in `H^n(b)`.
pub fn eta_b(b: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(GeomError::SingularRadius(r));
    }
    let k = (-b).sqrt();
    Ok(k / (k * r).tanh())
}

/// `eta_b(r) - sqrt(-b) = 2k / expm1(2kr)`, without cancellation.
pub fn eta_b_excess(b: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(GeomError::SingularRadius(r));
    }
    let k = (-b).sqrt();
    Ok(2.0 * k / (2.0 * k * r).exp_m1())
}

/// `w'(r)/w(r)`.
pub fn eta_w(w: &RadialFunction, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(GeomError::SingularRadius(r));
    }
    Ok(w.derivative_at(r) / w.eval(r))
}

/// `-w''(r)/w(r)`.
pub fn radial_curvature(w: &RadialFunction, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(GeomError::SingularRadius(r));
    }
    Ok(-w.second_derivative_at(r) / w.eval(r))
}

/// `2 pi * int_0^r w`.
pub fn ball_area_2d(w: &RadialFunction, r: f64) -> Result<f64> {
    let tol = 1e-12 * (1.0 + w.eval(r).abs() * r);
    Ok(2.0 * PI * integrate(w, 0.0, r, tol)?.value)
}

/// `2 pi w(r)`.
pub fn sphere_length_2d(w: &RadialFunction, r: f64) -> f64 {
    2.0 * PI * w.eval(r)
}

/// Area of the geodesic disc of radius `t` in `H^2(b)`,
/// `2 pi (cosh kt - 1)/(-b)`, written as `4 pi sinh^2(kt/2)/(-b)`.
pub fn hyperbolic_disc_area(b: f64, t: f64) -> f64 {
    let s = (0.5 * (-b).sqrt() * t).sinh();
    4.0 * PI * s * s / (-b)
}

/// A two-dimensional rotationally symmetric model `[0, inf) x S^1` with
/// metric `dr^2 + w(r)^2 dθ^2`.
#[derive(Debug, Clone)]
pub struct WModel {
    pub warping: RadialFunction,
    pub dimension: usize,
}

impl WModel {
    /// Checks `w(0) = 0` and `w'(0+) = 1` within `tol`.
    pub fn new(warping: RadialFunction, tol: f64) -> Result<Self> {
        let w0 = warping.eval(0.0);
        let h = 1e-5;
        let dw0 = (-3.0 * w0 + 4.0 * warping.eval(h) - warping.eval(2.0 * h)) / (2.0 * h);
        if w0.abs() > tol || (dw0 - 1.0).abs() > tol {
            return Err(GeomError::InvalidInput(format!(
                "warping must satisfy w(0)=0, w'(0)=1 (got {w0}, {dw0})"
            )));
        }
        Ok(Self { warping, dimension: 2 })
    }

    pub fn ball_area(&self, r: f64) -> Result<f64> {
        ball_area_2d(&self.warping, r)
    }

    pub fn sphere_length(&self, r: f64) -> f64 {
        sphere_length_2d(&self.warping, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_values() {
        assert_eq!(omega_b(-1.0, 0.0), 0.0);
        assert!((omega_b(-1.0, 1.0) - 1.175_201_193_643_801_4).abs() < 1e-15);
        assert!((omega_b(-4.0, 1.0) - 1.813_430_203_923_509_4).abs() < 1e-15);
    }

    #[test]
    fn eta_values() {
        let w = omega_b_fn(-1.0);
        assert!((eta_w(&w, 1.0).unwrap() - 1.313_035_285_499_331_3).abs() < 1e-14);
        assert!((eta_w(&w, 20.0).unwrap() - 1.0).abs() < 1e-8);
        assert!((eta_w(&RadialFunction::identity(), 2.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(eta_w(&w, 0.0), Err(GeomError::SingularRadius(_))));
    }

    #[test]
    fn excess_matches_naive_where_safe() {
        for &r in &[0.1, 1.0, 5.0] {
            let naive = eta_b(-1.0, r).unwrap() - 1.0;
            assert!((eta_b_excess(-1.0, r).unwrap() - naive).abs() < 1e-12);
        }
        assert!(eta_b_excess(-1.0, 50.0).unwrap() > 0.0);
    }

    #[test]
    fn curvature_values() {
        let w = omega_b_fn(-1.0);
        assert!((radial_curvature(&w, 0.3).unwrap() + 1.0).abs() < 1e-12);
        assert!((radial_curvature(&omega_b_fn(-4.0), 0.7).unwrap() + 4.0).abs() < 1e-12);
        // Numeric second derivative path.
        let w4 = RadialFunction::closed("w4", |r: f64| (2.0 * r).sinh() / 2.0);
        assert!((radial_curvature(&w4, 0.7).unwrap() + 4.0).abs() < 1e-5);
        assert_eq!(radial_curvature(&RadialFunction::identity(), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn disc_area_and_length() {
        let w = omega_b_fn(-1.0);
        let exact = 2.0 * PI * (1.0f64.cosh() - 1.0);
        assert!((ball_area_2d(&w, 1.0).unwrap() - exact).abs() < 1e-10);
        assert!((hyperbolic_disc_area(-1.0, 1.0) - exact).abs() < 1e-13);
        assert_eq!(ball_area_2d(&w, 0.0).unwrap(), 0.0);
        assert!((sphere_length_2d(&w, 1.0) - 7.384_006_872_882_645).abs() < 1e-12);
    }

    #[test]
    fn wmodel_validates_initial_conditions() {
        assert!(WModel::new(omega_b_fn(-1.0), 1e-6).is_ok());
        assert!(WModel::new(RadialFunction::closed("2r", |r| 2.0 * r), 1e-6).is_err());
    }

    #[test]
    fn ambient_validation() {
        assert!(HyperbolicAmbient::new(-1.0, 3).is_ok());
        assert!(HyperbolicAmbient::new(1.0, 3).is_err());
        assert!(HyperbolicAmbient::new(-1.0, 2).is_err());
    }
}
