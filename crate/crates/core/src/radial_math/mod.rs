//! Scalar kernel: radial functions, quadrature, differentiation, ray scans
//! and the elementary exponential bounds used by the integral estimates.

mod grid;
mod quadrature;
mod scalar;
mod search;

use std::fmt;
use std::sync::Arc;

use crate::error::{GeomError, Result};

pub use grid::{hybrid_grid, uniform_grid};
pub use quadrature::{integrate, integrate_fn, QuadratureResult};
pub use scalar::{scalar_inequality_suite, InequalityMargin, ScalarInequalityReport};
pub use search::{
    default_step, derivative, derivative_fn, first_crossing, first_crossing_on, golden_section,
    infimum_on_grid, infimum_on_ray, DerivativeEstimate, InfimumResult,
};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// How a sampled function continues past its last node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailPolicy {
    /// Keep the last sample value.
    Hold,
    /// Decay from the last sample value like `exp(-rate * (r - r_end))`.
    ExpDecay { rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialKind {
    ClosedForm,
    SampledGrid,
}

#[derive(Clone)]
enum Repr {
    Closed {
        f: ScalarFn,
        df: Option<ScalarFn>,
        d2f: Option<ScalarFn>,
    },
    Sampled(SampledGrid),
}

#[derive(Debug, Clone)]
struct SampledGrid {
    r0: f64,
    step: f64,
    values: Vec<f64>,
    tail: TailPolicy,
}

impl SampledGrid {
    fn r_end(&self) -> f64 {
        self.r0 + self.step * (self.values.len() - 1) as f64
    }

    fn eval(&self, r: f64) -> f64 {
        let n = self.values.len();
        if r <= self.r0 {
            return self.values[0];
        }
        let end = self.r_end();
        if r >= end {
            let last = self.values[n - 1];
            return match self.tail {
                TailPolicy::Hold => last,
                TailPolicy::ExpDecay { rate } => last * (-rate * (r - end)).exp(),
            };
        }
        let x = (r - self.r0) / self.step;
        let i = (x.floor() as usize).min(n - 2);
        let lambda = x - i as f64;
        self.values[i] * (1.0 - lambda) + self.values[i + 1] * lambda
    }
}

/// A scalar function of the radial coordinate `r >= 0`.
///
/// Closed-form functions may carry exact first and second derivatives;
/// sampled functions interpolate linearly on a uniform grid.
#[derive(Clone)]
pub struct RadialFunction {
    repr: Repr,
    label: String,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Closed { df, d2f, .. } => f
                .debug_struct("RadialFunction")
                .field("label", &self.label)
                .field("kind", &"closed-form")
                .field("exact_df", &df.is_some())
                .field("exact_d2f", &d2f.is_some())
                .finish(),
            Repr::Sampled(s) => f
                .debug_struct("RadialFunction")
                .field("label", &self.label)
                .field("kind", &"sampled")
                .field("r0", &s.r0)
                .field("step", &s.step)
                .field("len", &s.values.len())
                .field("tail", &s.tail)
                .finish(),
        }
    }
}

impl RadialFunction {
    pub fn closed(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            repr: Repr::Closed { f: Arc::new(f), df: None, d2f: None },
            label: label.into(),
        }
    }

    /// Attach an exact first derivative to a closed-form function.
    pub fn with_derivative(mut self, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        if let Repr::Closed { df: slot, .. } = &mut self.repr {
            *slot = Some(Arc::new(df));
        }
        self
    }

    /// Attach an exact second derivative to a closed-form function.
    pub fn with_second_derivative(mut self, d2f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        if let Repr::Closed { d2f: slot, .. } = &mut self.repr {
            *slot = Some(Arc::new(d2f));
        }
        self
    }

    pub fn constant(c: f64) -> Self {
        Self::closed(format!("constant {c}"), move |_| c)
            .with_derivative(|_| 0.0)
            .with_second_derivative(|_| 0.0)
    }

    pub fn identity() -> Self {
        Self::closed("identity", |r| r)
            .with_derivative(|_| 1.0)
            .with_second_derivative(|_| 0.0)
    }

    /// Uniformly sampled function with nodes `r0 + i * step`.
    pub fn sampled(
        label: impl Into<String>,
        r0: f64,
        step: f64,
        values: Vec<f64>,
        tail: TailPolicy,
    ) -> Result<Self> {
        if values.len() < 2 {
            return Err(GeomError::InvalidInput("sampled function needs at least two nodes".into()));
        }
        if !(step > 0.0 && step.is_finite()) || !r0.is_finite() || r0 < 0.0 {
            return Err(GeomError::InvalidInput(format!("bad sampling grid r0={r0}, step={step}")));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(GeomError::NumericalDomain {
                    location: format!("sample {i}"),
                    value: *v,
                });
            }
        }
        if let TailPolicy::ExpDecay { rate } = tail {
            if !(rate >= 0.0 && rate.is_finite()) {
                return Err(GeomError::InvalidInput(format!("bad decay rate {rate}")));
            }
        }
        Ok(Self {
            repr: Repr::Sampled(SampledGrid { r0, step, values, tail }),
            label: label.into(),
        })
    }

    /// Sample `f` on `r0, r0 + step, ..` and interpolate linearly.
    pub fn tabulate(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64,
        r0: f64,
        step: f64,
        count: usize,
        tail: TailPolicy,
    ) -> Result<Self> {
        let values = (0..count).map(|i| f(r0 + step * i as f64)).collect();
        Self::sampled(label, r0, step, values, tail)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> RadialKind {
        match self.repr {
            Repr::Closed { .. } => RadialKind::ClosedForm,
            Repr::Sampled(_) => RadialKind::SampledGrid,
        }
    }

    pub fn grid_step(&self) -> Option<f64> {
        match &self.repr {
            Repr::Sampled(s) => Some(s.step),
            Repr::Closed { .. } => None,
        }
    }

    /// Sample nodes of a sampled function, empty for closed forms.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        match &self.repr {
            Repr::Sampled(s) => s
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| (s.r0 + s.step * i as f64, *v))
                .collect(),
            Repr::Closed { .. } => Vec::new(),
        }
    }

    /// Points where a sampled function has kinks inside `(a, b)`.
    pub(crate) fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        match &self.repr {
            Repr::Sampled(s) => (0..s.values.len())
                .map(|i| s.r0 + s.step * i as f64)
                .filter(|&r| r > a && r < b)
                .collect(),
            Repr::Closed { .. } => Vec::new(),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match &self.repr {
            Repr::Closed { f, .. } => f(r),
            Repr::Sampled(s) => s.eval(r),
        }
    }

    pub fn has_exact_derivative(&self) -> bool {
        matches!(&self.repr, Repr::Closed { df: Some(_), .. })
    }

    /// First derivative: exact when attached, central difference otherwise.
    pub fn derivative_at(&self, r: f64) -> f64 {
        match &self.repr {
            Repr::Closed { df: Some(df), .. } => df(r),
            _ => derivative(self, r, default_step(r)).value,
        }
    }

    /// Second derivative: exact when attached, second difference otherwise.
    pub fn second_derivative_at(&self, r: f64) -> f64 {
        match &self.repr {
            Repr::Closed { d2f: Some(d2f), .. } => d2f(r),
            _ => {
                let h = 1e-4 * r.abs().max(1.0);
                if r >= h {
                    (self.eval(r + h) - 2.0 * self.eval(r) + self.eval(r - h)) / (h * h)
                } else {
                    (self.eval(r + 2.0 * h) - 2.0 * self.eval(r + h) + self.eval(r)) / (h * h)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_interpolates_linearly() {
        let f = RadialFunction::sampled("s", 0.0, 1.0, vec![0.0, 2.0, 4.0], TailPolicy::Hold).unwrap();
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(1.75), 3.5);
        assert_eq!(f.eval(10.0), 4.0);
        assert_eq!(f.grid_step(), Some(1.0));
        assert_eq!(f.kind(), RadialKind::SampledGrid);
    }

    #[test]
    fn exp_tail_decays_from_last_value() {
        let f = RadialFunction::sampled("s", 0.0, 1.0, vec![1.0, 2.0], TailPolicy::ExpDecay { rate: 2.0 })
            .unwrap();
        assert!((f.eval(2.0) - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn sampled_rejects_non_finite() {
        let err = RadialFunction::sampled("s", 0.0, 1.0, vec![1.0, f64::NAN], TailPolicy::Hold);
        assert!(matches!(err, Err(GeomError::NumericalDomain { .. })));
    }

    #[test]
    fn exact_derivatives_are_used() {
        let f = RadialFunction::closed("sinh", f64::sinh).with_derivative(f64::cosh);
        assert_eq!(f.derivative_at(1.0), 1.0f64.cosh());
        let g = RadialFunction::closed("sinh", f64::sinh);
        assert!((g.derivative_at(1.0) - 1.0f64.cosh()).abs() < 1e-8);
        assert!((g.second_derivative_at(1.0) - 1.0f64.sinh()).abs() < 1e-5);
    }
}
