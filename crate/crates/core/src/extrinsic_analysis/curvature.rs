use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::ball::{project_along, EulerData, ExtrinsicBall, SegmentKind};
use super::patch::{midpoint, PointData, SurfaceIntegrand};
use super::report::{CheckRow, VerificationReport};
use crate::error::{GeomError, Result};
use crate::immersed_surface::ParamImmersion;
use crate::model_space::eta_b;

/// Nodes with `|grad_S r|` below this are left out of pointwise checks.
pub const TANGENCY_CUTOFF: f64 = 0.05;

/// Geodesic curvature of the level curve through one boundary node.
#[derive(Debug, Clone, Serialize)]
pub struct KgSample {
    pub param: [f64; 2],
    /// From the resampled level curve.
    pub kg: f64,
    /// `(eta - 2|H| - <A(nu, nu), grad_perp r>) / |grad_S r|`.
    pub bound: f64,
    /// `(eta + 2<grad_perp r, H> - <A(nu, nu), grad_perp r>) / |grad_S r|`,
    /// which `kg` equals in constant curvature.
    pub identity: f64,
    pub grad_s_norm: f64,
}

fn g_inverse_apply(d: &PointData, w: [f64; 2]) -> [f64; 2] {
    let g = d.g;
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    [(g[1][1] * w[0] - g[0][1] * w[1]) / det, (g[0][0] * w[1] - g[1][0] * w[0]) / det]
}

/// `k_g` of the level curve `r = t` through the chart point `p`, by
/// resampling it at `p +- delta T` and taking the turning of its intrinsic
/// tangent. `None` when `|grad_S r|` is below [`TANGENCY_CUTOFF`].
pub fn geodesic_curvature_at(imm: &ParamImmersion, p: [f64; 2], t: f64) -> Result<Option<KgSample>> {
    let d = PointData::at(imm, p)?;
    level_curve_kg(imm, &d, p, t, 1e-3 * imm.scale())
}

fn level_curve_kg(imm: &ParamImmersion, d: &PointData, p: [f64; 2], t: f64, delta: f64) -> Result<Option<KgSample>> {
    if d.grad_s_norm < TANGENCY_CUTOFF {
        return Ok(None);
    }
    let grad = g_inverse_apply(d, d.dr);
    let nrm = d.sq_len(grad).sqrt();
    let nu = [grad[0] / nrm, grad[1] / nrm];
    let tan = d.rotate(nu);
    let probe = |sgn: f64| {
        let q = [p[0] + sgn * delta * tan[0], p[1] + sgn * delta * tan[1]];
        let s = project_along(imm, q, nu, t, delta);
        [q[0] + s * nu[0], q[1] + s * nu[1]]
    };
    let (cp, cm) = (probe(1.0), probe(-1.0));
    let c1 = [(cp[0] - cm[0]) / (2.0 * delta), (cp[1] - cm[1]) / (2.0 * delta)];
    let c2 = [(cp[0] - 2.0 * p[0] + cm[0]) / (delta * delta), (cp[1] - 2.0 * p[1] + cm[1]) / (delta * delta)];
    let gam = d.gamma(c1);
    let acc = [c2[0] + gam[0], c2[1] + gam[1]];
    let speed = d.sq_len(c1).sqrt();
    let kg = d.inner(acc, d.rotate(c1)) / speed.powi(3);
    let eta = eta_b(imm.b(), t)?;
    let s = d.grad_s_norm;
    Ok(Some(KgSample {
        param: p,
        kg,
        bound: (eta - 2.0 * d.norm_h - d.a_nu_perp) / s,
        identity: (eta - 2.0 * d.radial_curvature - d.a_nu_perp) / s,
        grad_s_norm: s,
    }))
}

/// Pointwise `k_g` of the outer boundary against its comparison bound,
/// at every level node with `|grad_S r| >= 0.05`.
pub fn geodesic_curvature_check(ball: &ExtrinsicBall, tolerance: f64) -> Result<VerificationReport> {
    let imm = ball
        .patch
        .immersion
        .as_ref()
        .ok_or_else(|| GeomError::InvalidInput("patch has no surface geometry".into()))?;
    let delta = 1e-3 * imm.scale();
    let mut nodes: Vec<usize> = ball
        .boundary_loops
        .iter()
        .filter(|l| l.is_level(SegmentKind::Upper))
        .flat_map(|l| l.nodes.iter().copied())
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    let short = ball.boundary_loops.iter().any(|l| l.is_level(SegmentKind::Upper) && l.len() < 16);
    let samples: Vec<Option<KgSample>> =
        nodes
            .par_iter()
            .map(|&n| level_curve_kg(imm, ball.node_data(n)?, ball.nodes[n].param, ball.t, delta))
            .collect::<Result<_>>()?;
    let excluded = samples.iter().filter(|s| s.is_none()).count();
    let samples: Vec<KgSample> = samples.into_iter().flatten().collect();
    if samples.is_empty() {
        return Err(GeomError::Inconclusive(format!(
            "all {} boundary nodes at t = {} are near-tangent",
            nodes.len(),
            ball.t
        )));
    }
    let mut checks = vec![];
    for s in &samples {
        checks.push(CheckRow::at_least("kg_bound", Some(ball.t), s.kg, s.bound, tolerance));
        checks.push(CheckRow::equal("kg_identity", Some(ball.t), s.kg, s.identity, tolerance));
    }
    let mut notes = vec![format!("{} nodes checked, {excluded} excluded as near-tangent", samples.len())];
    if short {
        notes.push("a boundary loop has fewer than 16 segments".into());
    }
    Ok(VerificationReport::from_checks("geodesic_curvature", checks, notes))
}

/// Terms of the polygonal Gauss-Bonnet formula for a ball.
#[derive(Debug, Clone, Serialize)]
pub struct GaussBonnet {
    /// `int k_g` along the chart-straight boundary segments.
    pub boundary_kg: f64,
    /// Sum of corner turning angles.
    pub turning: f64,
    /// `int K_S` over the polygonal region.
    pub curvature: f64,
    pub euler: EulerData,
    /// `boundary_kg + turning + curvature - 2 pi chi`.
    pub defect: f64,
}

pub fn gauss_bonnet(ball: &ExtrinsicBall) -> Result<GaussBonnet> {
    let imm = ball
        .patch
        .immersion
        .as_ref()
        .ok_or_else(|| GeomError::InvalidInput("patch has no surface geometry".into()))?;
    let euler = ball.euler_data()?;
    let curvature = ball.polygon_integrals()?[SurfaceIntegrand::GaussK.index()];
    let mut boundary_kg = 0.0;
    let mut turning = 0.0;
    for lp in &ball.boundary_loops {
        let n = lp.len();
        let segs: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let (a, b) = (lp.nodes[i], lp.nodes[(i + 1) % n]);
                let (pa, pb) = (ball.nodes[a].param, ball.nodes[b].param);
                let d = [pb[0] - pa[0], pb[1] - pa[1]];
                let mid = PointData::at(imm, midpoint(pa, pb))?;
                let (da, db) = (ball.node_data(a)?, ball.node_data(b)?);
                Ok((da.straight_kg_density(d) + 4.0 * mid.straight_kg_density(d) + db.straight_kg_density(d)) / 6.0)
            })
            .collect::<Result<_>>()?;
        boundary_kg += segs.iter().sum::<f64>();
        for i in 0..n {
            let (prev, cur, next) = (lp.nodes[(i + n - 1) % n], lp.nodes[i], lp.nodes[(i + 1) % n]);
            let (pp, pc, pn) = (ball.nodes[prev].param, ball.nodes[cur].param, ball.nodes[next].param);
            let din = [pc[0] - pp[0], pc[1] - pp[1]];
            let dout = [pn[0] - pc[0], pn[1] - pc[1]];
            let d = ball.node_data(cur)?;
            turning += d.inner(d.rotate(din), dout).atan2(d.inner(din, dout));
        }
    }
    let defect = boundary_kg + turning + curvature - 2.0 * PI * euler.chi as f64;
    Ok(GaussBonnet { boundary_kg, turning, curvature, euler, defect })
}

/// `|int k_g + int K_S - 2 pi chi| <= tolerance`.
pub fn gauss_bonnet_check(ball: &ExtrinsicBall, tolerance: f64) -> Result<VerificationReport> {
    let gb = gauss_bonnet(ball)?;
    let lhs = gb.boundary_kg + gb.turning + gb.curvature;
    let row = CheckRow::equal_abs("gauss_bonnet", Some(ball.t), lhs, 2.0 * PI * gb.euler.chi as f64, tolerance);
    Ok(VerificationReport::from_checks(
        "gauss_bonnet",
        vec![row],
        vec![format!(
            "kg {:.6e}, turning {:.6e}, K {:.6e}, chi {}",
            gb.boundary_kg, gb.turning, gb.curvature, gb.euler.chi
        )],
    ))
}
