use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

use crate::error::{GeomError, Result};

const CAP: usize = 8;

/// A vector of Minkowski space `R^{n,1}`, stored inline (`n + 1 <= 8`).
/// Coordinate 0 is the time coordinate.
#[derive(Clone, Copy, PartialEq)]
pub struct MinkowskiVector {
    c: [f64; CAP],
    dim: usize,
}

impl std::fmt::Debug for MinkowskiVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.coords()).finish()
    }
}

impl Serialize for MinkowskiVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl MinkowskiVector {
    /// Zero vector with `dim` coordinates.
    pub fn zero(dim: usize) -> Self {
        assert!((1..=CAP).contains(&dim), "Minkowski dimension {dim} unsupported");
        Self { c: [0.0; CAP], dim }
    }

    pub fn from_slice(coords: &[f64]) -> Self {
        let mut v = Self::zero(coords.len());
        v.c[..coords.len()].copy_from_slice(coords);
        v
    }

    /// Unit spacelike basis vector `e_i`, `1 <= i < dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.c[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    pub fn get(&self, i: usize) -> f64 {
        self.c[i]
    }

    pub fn set(&mut self, i: usize, v: f64) {
        self.c[i] = v;
    }

    /// `-x0 y0 + sum_i xi yi`.
    pub fn dot(&self, o: &Self) -> f64 {
        debug_assert_eq!(self.dim, o.dim);
        let mut s = -self.c[0] * o.c[0];
        for i in 1..self.dim {
            s += self.c[i] * o.c[i];
        }
        s
    }

    /// Length of a spacelike vector (0 for null or timelike input).
    pub fn norm(&self) -> f64 {
        self.dot(self).max(0.0).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut v = *self;
        for x in &mut v.c[..self.dim] {
            *x *= s;
        }
        v
    }

    /// `self + s * o`.
    pub fn axpy(&self, s: f64, o: &Self) -> Self {
        let mut v = *self;
        for i in 0..self.dim {
            v.c[i] += s * o.c[i];
        }
        v
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|x| x.is_finite())
    }
}

impl Add for MinkowskiVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.axpy(1.0, &o)
    }
}

impl AddAssign for MinkowskiVector {
    fn add_assign(&mut self, o: Self) {
        *self = self.axpy(1.0, &o);
    }
}

impl Sub for MinkowskiVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.axpy(-1.0, &o)
    }
}

impl Neg for MinkowskiVector {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul<MinkowskiVector> for f64 {
    type Output = MinkowskiVector;
    fn mul(self, v: MinkowskiVector) -> MinkowskiVector {
        v.scale(self)
    }
}

pub fn lorentz_inner(x: &MinkowskiVector, y: &MinkowskiVector) -> f64 {
    x.dot(y)
}

/// A point of the hyperboloid `<x, x> = 1/b`, `x0 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmbientPoint {
    coords: MinkowskiVector,
}

impl AmbientPoint {
    /// Checks the constraint to `1e-10` relative to `max(1, -b x0^2)`, the
    /// size of the terms that cancel in `<x, x>`.
    pub fn new(coords: MinkowskiVector, b: f64) -> Result<Self> {
        let x0 = coords.get(0);
        let defect = (coords.dot(&coords) - 1.0 / b).abs();
        let scale = (-b * x0 * x0).max(1.0) / (-b);
        if !(x0 > 0.0) || !(defect <= 1e-10 * scale) || !coords.is_finite() {
            return Err(GeomError::OffHyperboloid(defect));
        }
        Ok(Self { coords })
    }

    /// `(1/k)(1, 0, .., 0)`, the hyperboloid vertex.
    pub fn origin(b: f64, n: usize) -> Self {
        let mut v = MinkowskiVector::zero(n + 1);
        v.set(0, 1.0 / (-b).sqrt());
        Self { coords: v }
    }

    pub fn vector(&self) -> &MinkowskiVector {
        &self.coords
    }
}

/// Distance on the hyperboloid of curvature `b`.
///
/// Uses `d = (2/k) asinh(k |x - o| / 2)` with the Minkowski chord
/// `|x - o|`, which equals `(1/k) arccosh(b <o, x>)` without the loss of
/// precision near `o`. The arccosh argument is still validated.
pub fn geodesic_distance(o: &AmbientPoint, x: &AmbientPoint, b: f64) -> Result<f64> {
    geodesic_distance_raw(o.vector(), x.vector(), b)
}

pub(crate) fn geodesic_distance_raw(o: &MinkowskiVector, x: &MinkowskiVector, b: f64) -> Result<f64> {
    let arg = b * o.dot(x);
    if !(arg >= 1.0 - 1e-8) {
        return Err(GeomError::OffHyperboloid(arg));
    }
    let k = (-b).sqrt();
    let chord = (*x - *o).norm();
    Ok(2.0 / k * (0.5 * k * chord).asinh())
}

/// Unit tangent at `x` of the geodesic from `o`, pointing away from `o`:
/// `k (cosh(kd) x - o) / sinh(kd)`.
pub fn radial_gradient(o: &AmbientPoint, x: &AmbientPoint, b: f64) -> Result<MinkowskiVector> {
    radial_gradient_raw(o.vector(), x.vector(), b)
}

pub(crate) fn radial_gradient_raw(o: &MinkowskiVector, x: &MinkowskiVector, b: f64) -> Result<MinkowskiVector> {
    let d = geodesic_distance_raw(o, x, b)?;
    if d < 1e-8 {
        return Err(GeomError::PoleSingularity(d));
    }
    let k = (-b).sqrt();
    let kd = k * d;
    // cosh(kd) x - o, with cosh(kd) - 1 taken through sinh^2 to keep the
    // difference accurate near o.
    let s = (0.5 * kd).sinh();
    let diff = (*x - *o).axpy(2.0 * s * s, x);
    Ok(diff.scale(k / kd.sinh()))
}

/// Component of `v` tangent to the hyperboloid at `x`: `v - b <v, x> x`.
pub fn tangential(v: &MinkowskiVector, x: &MinkowskiVector, b: f64) -> MinkowskiVector {
    v.axpy(-b * v.dot(x), x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64], b: f64) -> AmbientPoint {
        AmbientPoint::new(MinkowskiVector::from_slice(c), b).unwrap()
    }

    #[test]
    fn distance_examples() {
        let o = pt(&[1.0, 0.0, 0.0, 0.0], -1.0);
        assert_eq!(geodesic_distance(&o, &o, -1.0).unwrap(), 0.0);
        let x = pt(&[1.0f64.cosh(), 1.0f64.sinh(), 0.0, 0.0], -1.0);
        assert!((geodesic_distance(&o, &x, -1.0).unwrap() - 1.0).abs() < 1e-14);
        let o4 = pt(&[0.5, 0.0, 0.0, 0.0], -4.0);
        let x4 = pt(&[0.5 * 2.0f64.cosh(), 0.5 * 2.0f64.sinh(), 0.0, 0.0], -4.0);
        assert!((geodesic_distance(&o4, &x4, -4.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gradient_example() {
        let o = pt(&[1.0, 0.0, 0.0, 0.0], -1.0);
        let x = pt(&[1.0f64.cosh(), 1.0f64.sinh(), 0.0, 0.0], -1.0);
        let g = radial_gradient(&o, &x, -1.0).unwrap();
        assert!((g.get(0) - 1.0f64.sinh()).abs() < 1e-14);
        assert!((g.get(1) - 1.0f64.cosh()).abs() < 1e-14);
        assert!((g.dot(&g) - 1.0).abs() < 1e-13);
        assert!(g.dot(x.vector()).abs() < 1e-13);
        assert!(matches!(radial_gradient(&o, &o, -1.0), Err(GeomError::PoleSingularity(_))));
    }

    #[test]
    fn off_hyperboloid_detected() {
        assert!(AmbientPoint::new(MinkowskiVector::from_slice(&[1.1, 0.0, 0.0, 0.0]), -1.0).is_err());
        // A spacelike-separated pair violates the arccosh domain.
        let o = MinkowskiVector::from_slice(&[1.0, 0.0, 0.0, 0.0]);
        let x = MinkowskiVector::from_slice(&[-1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(geodesic_distance_raw(&o, &x, -1.0), Err(GeomError::OffHyperboloid(_))));
    }
}
