use rayon::prelude::*;
use serde::Serialize;

use super::ball::{extract_ball, ExtrinsicBall, SegmentKind};
use super::patch::{IntegrandVector, PointData, SurfaceIntegrand, TriangulatedPatch};
use crate::error::{GeomError, Result};

/// Line integrands along the outer level curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineIntegrand {
    Length,
    /// `<A(nu, nu), grad_perp r> / |grad_S r|`.
    Transverse,
    /// `|H| / |grad_S r|`.
    NormH,
    /// `1 / |grad_S r|`, the co-area derivative of area.
    CoArea,
    GradS,
}

pub const N_LINE: usize = 5;

impl LineIntegrand {
    pub fn index(self) -> usize {
        self as usize
    }
}

fn line_integrands(d: &PointData) -> [f64; N_LINE] {
    let s = d.grad_s_norm;
    [1.0, d.a_nu_perp / s, d.norm_h / s, 1.0 / s, s]
}

/// Line integrals over the `Upper` segments. Each chord is replaced by the
/// parabola through its ends and the level point over its midpoint, and
/// integrated by Simpson's rule.
pub fn level_line_integrals(ball: &ExtrinsicBall) -> Result<[f64; N_LINE]> {
    let mut out = [0.0; N_LINE];
    for seg in ball.level_segments(SegmentKind::Upper)? {
        let (a, b) = (&ball.nodes[seg.start], &ball.nodes[seg.end]);
        let p0 = a.param;
        let p2 = b.param;
        let m = [0.5 * (p0[0] + p2[0]), 0.5 * (p0[1] + p2[1])];
        let len = seg.chord;
        let dir = [p2[1] - p0[1], -(p2[0] - p0[0])];
        let p1 = [m[0] + seg.offset * dir[0] / len, m[1] + seg.offset * dir[1] / len];
        let c0 = [-3.0 * p0[0] + 4.0 * p1[0] - p2[0], -3.0 * p0[1] + 4.0 * p1[1] - p2[1]];
        let ch = [p2[0] - p0[0], p2[1] - p0[1]];
        let c1 = [p0[0] - 4.0 * p1[0] + 3.0 * p2[0], p0[1] - 4.0 * p1[1] + 3.0 * p2[1]];
        let (da, db) = (ball.node_data(seg.start)?, ball.node_data(seg.end)?);
        let (fa, fm, fb) = (line_integrands(da), line_integrands(&seg.mid), line_integrands(db));
        let (sa, sm, sb) = (da.sq_len(c0).sqrt(), seg.mid.sq_len(ch).sqrt(), db.sq_len(c1).sqrt());
        for k in 0..N_LINE {
            out[k] += (fa[k] * sa + 4.0 * fm[k] * sm + fb[k] * sb) / 6.0;
        }
    }
    Ok(out)
}

/// One extrinsic ball of the exhaustion.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthSample {
    pub t: f64,
    pub v: f64,
    #[serde(rename = "Lb")]
    pub lb: f64,
    pub chi: i64,
    pub g: i64,
    pub c: i64,
    /// `int_{D_t} |A|^2`.
    #[serde(rename = "R")]
    pub r_a2: f64,
    /// `int_{dD_t} <A(nu, nu), grad_perp r> / |grad_S r|`.
    #[serde(rename = "I")]
    pub i_t: f64,
    #[serde(rename = "totH")]
    pub tot_h: f64,
    #[serde(rename = "totH1")]
    pub tot_h1: f64,
    /// `int_{dD_t} 1/|grad_S r|`.
    pub v_prime: f64,
    /// Three-point difference of `v` across samples.
    pub v_prime_numeric: f64,
    pub v_over_cosh: f64,
    /// `v / Vol(B_t^{b,2})`.
    pub v_over_disc: f64,
    /// The ball reaches the edge of the chart, so it is truncated.
    pub truncated: bool,
    #[serde(skip)]
    pub integrals: IntegrandVector,
    #[serde(skip)]
    pub lines: [f64; N_LINE],
}

impl GrowthSample {
    pub fn integral(&self, f: SurfaceIntegrand) -> f64 {
        self.integrals[f.index()]
    }

    pub fn line(&self, f: LineIntegrand) -> f64 {
        self.lines[f.index()]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthCurve {
    pub b: f64,
    pub samples: Vec<GrowthSample>,
    /// Requested radii with an empty ball.
    pub skipped: Vec<f64>,
}

/// Area of the pole-anchored ball of radius `t`.
pub fn ball_volume(patch: &TriangulatedPatch, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    match extract_ball(patch, t) {
        Ok(ball) => Ok(ball.surface_integrals()?[SurfaceIntegrand::Area.index()]),
        Err(GeomError::EmptyBall(_)) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// `Vol(B_t^{b,2}) = 2 pi (cosh kt - 1) / (-b)`.
pub fn model_disc_area(b: f64, t: f64) -> f64 {
    let k = (-b).sqrt();
    4.0 * std::f64::consts::PI * (0.5 * k * t).sinh().powi(2) / (-b)
}

fn sample(patch: &TriangulatedPatch, b: f64, t: f64) -> Result<Option<GrowthSample>> {
    let ball = match extract_ball(patch, t) {
        Ok(ball) => ball,
        Err(GeomError::EmptyBall(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let euler = ball.euler_data()?;
    let integrals = ball.surface_integrals()?;
    let lines = level_line_integrals(&ball)?;
    let v = integrals[SurfaceIntegrand::Area.index()];
    let k = (-b).sqrt();
    Ok(Some(GrowthSample {
        t,
        v,
        lb: lines[LineIntegrand::Length.index()],
        chi: euler.chi,
        g: euler.genus,
        c: euler.boundary_components,
        r_a2: integrals[SurfaceIntegrand::NormA2.index()],
        i_t: lines[LineIntegrand::Transverse.index()],
        tot_h: integrals[SurfaceIntegrand::NormH.index()],
        tot_h1: lines[LineIntegrand::NormH.index()],
        v_prime: lines[LineIntegrand::CoArea.index()],
        v_prime_numeric: f64::NAN,
        v_over_cosh: v / (k * t).cosh(),
        v_over_disc: v / model_disc_area(b, t),
        truncated: ball.touches_chart_boundary(),
        integrals,
        lines,
    }))
}

/// Three-point derivative on a nonuniform grid.
fn three_point(ts: &[f64], vs: &[f64], i: usize) -> f64 {
    let n = ts.len();
    let j = i.clamp(1, n - 2);
    let (t0, t1, t2) = (ts[j - 1], ts[j], ts[j + 1]);
    let (v0, v1, v2) = (vs[j - 1], vs[j], vs[j + 1]);
    let x = ts[i];
    // derivative of the Lagrange interpolant at x
    v0 * ((x - t1) + (x - t2)) / ((t0 - t1) * (t0 - t2))
        + v1 * ((x - t0) + (x - t2)) / ((t1 - t0) * (t1 - t2))
        + v2 * ((x - t0) + (x - t1)) / ((t2 - t0) * (t2 - t1))
}

/// Sample the exhaustion at every `t` in `t_list` (strictly increasing).
/// Balls are extracted in parallel; radii below the minimum of `r` are
/// skipped.
pub fn growth_curve(patch: &TriangulatedPatch, t_list: &[f64]) -> Result<GrowthCurve> {
    if t_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(GeomError::InvalidInput("sample radii must be strictly increasing".into()));
    }
    let b = patch
        .b()
        .ok_or_else(|| GeomError::InvalidInput("patch has no surface geometry".into()))?;
    let raw: Vec<Option<GrowthSample>> = t_list.par_iter().map(|&t| sample(patch, b, t)).collect::<Result<_>>()?;
    let mut skipped = vec![];
    let mut samples = vec![];
    for (t, s) in t_list.iter().zip(raw) {
        match s {
            Some(s) => samples.push(s),
            None => skipped.push(*t),
        }
    }
    if samples.len() >= 3 {
        let ts: Vec<f64> = samples.iter().map(|s| s.t).collect();
        let vs: Vec<f64> = samples.iter().map(|s| s.v).collect();
        for (i, s) in samples.iter_mut().enumerate() {
            s.v_prime_numeric = three_point(&ts, &vs, i);
        }
    }
    Ok(GrowthCurve { b, samples, skipped })
}

/// Evenly spaced radii `max * i / count`, `i = 1..=count`.
pub fn sample_radii(count: usize, max: f64) -> Vec<f64> {
    (1..=count).map(|i| max * i as f64 / count as f64).collect()
}

impl GrowthCurve {
    /// Samples whose balls are not cut by the chart edge.
    pub fn resolved(&self) -> impl Iterator<Item = &GrowthSample> {
        self.samples.iter().filter(|s| !s.truncated)
    }

    pub fn last(&self) -> Option<&GrowthSample> {
        self.samples.last()
    }

    pub fn integral_at(&self, idx: usize, f: SurfaceIntegrand) -> f64 {
        self.samples[idx].integrals[f.index()]
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}


#[cfg(test)]
mod curve_tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::extrinsic_analysis::testkit;

    #[test]
    fn geodesic_disc_growth() {
        let curve = growth_curve(testkit::disc(), &sample_radii(64, 5.8)).unwrap();
        assert_eq!(curve.len(), 64);
        for s in &curve.samples {
            let v = 2.0 * PI * (s.t.cosh() - 1.0);
            let l = 2.0 * PI * s.t.sinh();
            assert!((s.v / v - 1.0).abs() < 1e-4, "{} {}", s.t, s.v);
            assert!((s.lb / l - 1.0).abs() < 1e-4, "{} {}", s.t, s.lb);
            assert!((s.v_prime / l - 1.0).abs() < 1e-4);
            assert!((s.v_prime_numeric / s.v_prime - 1.0).abs() < 0.02);
            assert_eq!((s.r_a2, s.i_t, s.tot_h), (0.0, 0.0, 0.0));
            assert_eq!((s.chi, s.g, s.c), (1, 0, 1));
            assert!(!s.truncated);
        }
    }

    #[test]
    fn equidistant_area_is_scaled_hyperbolic_area() {
        let a: f64 = 0.4;
        let curve = growth_curve(testkit::equidistant(), &sample_radii(12, 5.8)).unwrap();
        for s in &curve.samples {
            let rho = (s.t.cosh() / a.cosh()).acosh();
            let exact = a.cosh().powi(2) * 2.0 * PI * (rho.cosh() - 1.0);
            assert!((s.v / exact - 1.0).abs() < 1e-2, "{} {} {exact}", s.t, s.v);
        }
    }

    #[test]
    fn radii_below_the_surface_are_skipped() {
        let curve = growth_curve(testkit::equidistant(), &[0.1, 0.3, 1.0, 2.0]).unwrap();
        assert_eq!(curve.skipped, vec![0.1, 0.3]);
        assert_eq!(curve.len(), 2);
    }

    #[test]
    fn graph_curve_invariants() {
        let curve = growth_curve(testkit::graph(), &sample_radii(20, 5.8)).unwrap();
        for w in curve.samples.windows(2) {
            assert!(w[1].v > w[0].v);
            assert!(w[1].r_a2 >= w[0].r_a2);
        }
        for s in &curve.samples {
            assert!(s.v_prime >= s.lb * (1.0 - 1e-12));
            assert_eq!(s.chi, 2 - 2 * s.g - s.c);
        }
    }

    #[test]
    fn radii_must_increase() {
        assert!(growth_curve(testkit::disc(), &[1.0, 0.5]).is_err());
    }
}
