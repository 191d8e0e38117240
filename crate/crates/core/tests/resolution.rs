//! Accuracy of the triangulated totally geodesic plane at production
//! resolution, against closed-form hyperbolic disc data.

use isocomp::extrinsic_analysis::{ball_volume, growth_curve, triangulate, TriangulatedPatch};
use isocomp::immersed_surface::{GridSpec, ParamImmersion, PoleSpec, SurfaceKind};
use isocomp::model_space::HyperbolicAmbient;

fn plane(b: f64, n: usize) -> TriangulatedPatch {
    let ambient = HyperbolicAmbient::new(b, 3).unwrap();
    let radius = 6.0 / (-b).sqrt();
    let imm = ParamImmersion::new(ambient, SurfaceKind::TotallyGeodesic, GridSpec::polar(radius, n, n), PoleSpec::SurfaceCenter)
        .unwrap();
    triangulate(&imm).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn whole_chart_area_at_256() {
    let patch = plane(-1.0, 256);
    let exact = 2.0 * std::f64::consts::PI * (6.0f64.cosh() - 1.0);
    let area = ball_volume(&patch, 7.0).unwrap();
    assert!(rel(area, exact) <= 1e-3, "area {area} vs {exact}");
}

#[test]
fn unit_ball_at_256() {
    let tau = 2.0 * std::f64::consts::PI;
    for b in [-1.0f64, -4.0] {
        let k = (-b).sqrt();
        let patch = plane(b, 256);
        let curve = growth_curve(&patch, &[1.0]).unwrap();
        let s = &curve.samples[0];
        let v = tau * (k.cosh() - 1.0) / (k * k);
        let lb = tau * k.sinh() / k;
        assert!(rel(s.v, v) <= 1e-3, "b={b} v {} vs {v}", s.v);
        assert!(rel(s.lb, lb) <= 1e-3, "b={b} Lb {} vs {lb}", s.lb);
        if b == -1.0 {
            assert!(rel(s.v, 3.4127) <= 1e-3 && rel(s.lb, 7.3840) <= 1e-3, "v {} Lb {}", s.v, s.lb);
        }
    }
}
