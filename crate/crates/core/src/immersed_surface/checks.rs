use serde::Serialize;

use super::chart::ParamImmersion;
use super::jet::{jet_at_param, stencil, SurfaceJet};
use super::lorentz::geodesic_distance_raw;
use crate::error::{GeomError, Result};
use crate::radial_math::{RadialFunction, TailPolicy};

/// Values of an empirical envelope below this are treated as zero.
pub const ENVELOPE_NOISE_FLOOR: f64 = 1e-9;

/// `C(x) = -<grad_N r, H>`, zero at the pole.
pub fn radial_mean_curvature(jet: &SurfaceJet) -> f64 {
    match &jet.radial {
        Some(f) => -f.grad_n.dot(&jet.mean_curvature),
        None => 0.0,
    }
}

/// Relative margin `(lhs - rhs) / max(1, |lhs|, |rhs|)`.
pub fn relative_margin(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs) / lhs.abs().max(rhs.abs()).max(1.0)
}

/// Per-bin maximum of `C(x)` over all grid nodes, as a radial function.
///
/// Bins split `[0, r_max]` uniformly. The value at each node is the larger
/// of its two adjacent bins, so the piecewise linear interpolant dominates
/// every sample. Negative values are clamped to zero.
pub fn radial_envelope(imm: &ParamImmersion, bins: usize, tail: TailPolicy) -> Result<RadialFunction> {
    let g = imm.grid;
    let mut samples = Vec::with_capacity(g.nu * g.nv);
    for i in 0..g.nu {
        for j in 0..g.nv {
            let jet = jet_at_param(imm, g.node(i, j))?;
            samples.push((jet.r, radial_mean_curvature(&jet)));
        }
    }
    radial_envelope_from_samples(&samples, bins, tail)
}

/// Envelope of arbitrary `(r, C)` samples; see [`radial_envelope`].
pub fn radial_envelope_from_samples(samples: &[(f64, f64)], bins: usize, tail: TailPolicy) -> Result<RadialFunction> {
    if samples.is_empty() {
        return Err(GeomError::InvalidInput("empty surface".into()));
    }
    let bins = bins.max(1);
    let r_max = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    let r_max = if r_max > 0.0 { r_max } else { 1.0 };
    let width = r_max / bins as f64;
    let mut bin_max = vec![0.0f64; bins];
    for &(r, c) in samples {
        let k = ((r / width) as usize).min(bins - 1);
        bin_max[k] = bin_max[k].max(c);
    }
    let values = (0..=bins)
        .map(|k| {
            let left = if k > 0 { bin_max[k - 1] } else { 0.0 };
            let right = if k < bins { bin_max[k] } else { 0.0 };
            let v = left.max(right);
            if v < ENVELOPE_NOISE_FLOOR {
                0.0
            } else {
                v
            }
        })
        .collect();
    RadialFunction::sampled("envelope", 0.0, width, values, tail)
}

/// Least-squares fit of `log h = log c - rate r` over the positive nodes of
/// an envelope with `r >= r_from`. Returns `(c, rate)`.
pub fn fit_exponential_decay(h: &RadialFunction, r_from: f64) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = h
        .nodes()
        .into_iter()
        .filter(|&(r, v)| r >= r_from && v > 0.0)
        .map(|(r, v)| (r, v.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(((my - slope * mx).exp(), -slope))
}

/// Outcome of the Laplacian comparison at one chart point.
#[derive(Debug, Clone, Serialize)]
pub struct LaplacianCheck {
    pub param: [f64; 2],
    pub r: f64,
    /// `Delta^S (f o r)` from differences of the composed function.
    pub laplacian: f64,
    /// Lower bound with `<grad r, H>` replaced by `-|H|`.
    pub bound: f64,
    /// The constant-curvature identity
    /// `(f'' - f' eta)|grad_S r|^2 + 2 f' eta + 2 f' <grad_N r, H>`.
    pub identity: f64,
    /// `relative_margin(laplacian, bound)`.
    pub margin: f64,
    pub identity_defect: f64,
    /// Node lies on the outer edge of the grid.
    pub boundary: bool,
}

/// Compare `Delta^S (f o r)` with its Hessian-comparison lower bound at
/// grid node `node`. For `f = cosh(kr)` the bound is
/// `2k^2 cosh(kr) - 2k sinh(kr) |H|`.
pub fn laplacian_radial_check(imm: &ParamImmersion, f: &RadialFunction, node: (usize, usize)) -> Result<LaplacianCheck> {
    let p = imm.grid.node(node.0, node.1);
    let mut out = laplacian_radial_check_at(imm, f, p)?;
    out.boundary = imm.grid.is_boundary_node(node.0, node.1);
    Ok(out)
}

/// [`laplacian_radial_check`] at an arbitrary chart point.
pub fn laplacian_radial_check_at(imm: &ParamImmersion, f: &RadialFunction, p: [f64; 2]) -> Result<LaplacianCheck> {
    let b = imm.b();
    let k = imm.kappa();
    let jet = jet_at_param(imm, p)?;
    let o = *imm.pole.vector();
    let comp = |u: f64, v: f64| {
        let x = imm.chart(u, v);
        geodesic_distance_raw(&o, &x, b).map_or(f64::NAN, |r| f.eval(r))
    };
    let st = stencil(comp, p, imm.fd_step);
    let hess = [[st.duu, st.duv], [st.duv, st.dvv]];
    let grad = [st.du, st.dv];
    let mut lap = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut hij = hess[i][j];
            for (l, gl) in grad.iter().enumerate() {
                hij -= jet.christoffel[l][i][j] * gl;
            }
            lap += jet.g_inv[i][j] * hij;
        }
    }
    if !lap.is_finite() {
        return Err(GeomError::NumericalDomain { location: format!("laplacian at {p:?}"), value: lap });
    }
    let r = jet.r;
    let (identity, bound) = match &jet.radial {
        Some(frame) => {
            let d1 = f.derivative_at(r);
            let d2 = f.second_derivative_at(r);
            let eta = k / (k * r).tanh();
            let base = (d2 - d1 * eta) * frame.grad_s_norm.powi(2) + 2.0 * d1 * eta;
            let radial_h = frame.grad_n.dot(&jet.mean_curvature);
            (base + 2.0 * d1 * radial_h, base - 2.0 * d1.abs() * jet.norm_h)
        }
        None => {
            // At the pole f' eta -> f''(0) when f'(0) = 0, and the
            // Hessian of f o r is f''(0) g.
            let v = 2.0 * f.second_derivative_at(0.0);
            (v, v)
        }
    };
    Ok(LaplacianCheck {
        param: p,
        r,
        laplacian: lap,
        bound,
        identity,
        margin: relative_margin(lap, bound),
        identity_defect: relative_margin(lap, identity),
        boundary: false,
    })
}

/// `cosh(k r)` with exact derivatives.
pub fn cosh_radial(b: f64) -> RadialFunction {
    let k = (-b).sqrt();
    RadialFunction::closed("cosh", move |r| (k * r).cosh())
        .with_derivative(move |r| k * (k * r).sinh())
        .with_second_derivative(move |r| k * k * (k * r).cosh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison_space::{build, is_strongly_balanced};
    use crate::immersed_surface::chart::{DecayProfile, GridSpec, PoleSpec, SurfaceKind};
    use crate::immersed_surface::jet::jet_at;
    use crate::model_space::HyperbolicAmbient;
    use proptest::prelude::*;

    fn surface(kind: SurfaceKind, pole: PoleSpec, n: usize) -> ParamImmersion {
        let amb = HyperbolicAmbient::new(-1.0, 3).unwrap();
        ParamImmersion::new(amb, kind, GridSpec::polar(6.0, n, n), pole).unwrap()
    }

    fn graph() -> SurfaceKind {
        SurfaceKind::Graph { amplitude: 0.1, profile: DecayProfile::Sech { rate: 2.0 }, modulation: 0.3, frequency: 2 }
    }

    #[test]
    fn radial_mean_curvature_bounds() {
        let minimal = surface(SurfaceKind::TotallyGeodesic, PoleSpec::SurfaceCenter, 16);
        let eq = surface(SurfaceKind::Equidistant { distance: 0.5 }, PoleSpec::CoreCenter, 16);
        let t = 0.5f64.tanh();
        for i in 0..16 {
            let j = (3 * i) % 16;
            assert_eq!(radial_mean_curvature(&jet_at(&minimal, (i, j)).unwrap()), 0.0);
            let jet = jet_at(&eq, (i, j)).unwrap();
            let c = radial_mean_curvature(&jet);
            assert!(c.abs() <= t + 1e-8 && c.abs() <= jet.norm_h + 1e-8);
        }
    }

    #[test]
    fn envelopes() {
        let tail = TailPolicy::ExpDecay { rate: 2.0 };
        let h = radial_envelope(&surface(SurfaceKind::TotallyGeodesic, PoleSpec::SurfaceCenter, 24), 32, tail).unwrap();
        assert!(h.nodes().iter().all(|n| n.1 == 0.0));

        let eq = surface(SurfaceKind::Equidistant { distance: 0.5 }, PoleSpec::SurfaceCenter, 48);
        let h = radial_envelope(&eq, 32, TailPolicy::Hold).unwrap();
        let nodes = h.nodes();
        let last = nodes[nodes.len() - 1].1;
        assert!(last > 0.0 && last <= 0.5f64.tanh() + 1e-8);
        assert!((nodes[nodes.len() - 4].1 - last).abs() < 1e-2 * last);
        let space = build(-1.0, h).unwrap();
        assert!(!is_strongly_balanced(&space).balanced);
    }

    #[test]
    fn envelope_dominates_samples() {
        let imm = surface(graph(), PoleSpec::SurfaceCenter, 40);
        let h = radial_envelope(&imm, 48, TailPolicy::ExpDecay { rate: 2.0 }).unwrap();
        for i in 0..40 {
            for j in (0..40).step_by(3) {
                let jet = jet_at(&imm, (i, j)).unwrap();
                assert!(radial_mean_curvature(&jet) <= h.eval(jet.r) + ENVELOPE_NOISE_FLOOR);
            }
        }
    }

    #[test]
    fn envelope_of_decaying_samples_fits_rate() {
        let samples: Vec<(f64, f64)> = (0..400).map(|i| {
            let r = i as f64 * 0.02;
            (r, 0.3 * (-2.0 * r).exp())
        }).collect();
        let h = radial_envelope_from_samples(&samples, 80, TailPolicy::Hold).unwrap();
        let (c, rate) = fit_exponential_decay(&h, 1.0).unwrap();
        // Node values take the left neighbor bin, shifting c by one bin width.
        assert!((rate - 2.0).abs() < 1e-2, "{rate}");
        assert!(c > 0.3 && c < 0.3 * (2.0 * 0.1f64).exp() * 1.01, "{c}");
        assert!(radial_envelope_from_samples(&[], 4, TailPolicy::Hold).is_err());
    }

    #[test]
    fn laplacian_equality_on_totally_geodesic_plane() {
        let imm = surface(SurfaceKind::TotallyGeodesic, PoleSpec::SurfaceCenter, 24);
        let f = cosh_radial(-1.0);
        for i in 0..23 {
            let c = laplacian_radial_check(&imm, &f, (i, (5 * i) % 24)).unwrap();
            let expected = 2.0 * c.r.cosh();
            assert!((c.laplacian - expected).abs() / expected < 1e-3);
            assert!(c.margin.abs() <= 1e-3 && c.identity_defect.abs() <= 1e-3);
        }
        assert!(laplacian_radial_check(&imm, &f, (23, 0)).unwrap().boundary);
    }

    #[test]
    fn laplacian_constant_function() {
        let imm = surface(graph(), PoleSpec::SurfaceCenter, 8);
        let c = laplacian_radial_check_at(&imm, &RadialFunction::constant(1.0), [0.3, 0.4]).unwrap();
        assert!(c.laplacian.abs() < 1e-6 && c.bound == 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn laplacian_comparison_holds(u in -5.0f64..5.0, v in -5.0f64..5.0, dist in -0.8f64..0.8) {
            let f = cosh_radial(-1.0);
            for kind in [graph(), SurfaceKind::Equidistant { distance: dist }] {
                let imm = surface(kind, PoleSpec::SurfaceCenter, 8);
                let c = laplacian_radial_check_at(&imm, &f, [u, v]).unwrap();
                prop_assert!(c.margin >= -1e-3, "{:?}", c);
                prop_assert!(c.identity_defect.abs() <= 1e-3, "{:?}", c);
            }
        }
    }
}
