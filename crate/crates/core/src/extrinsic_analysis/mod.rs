//! Extrinsic balls of an immersed surface: extraction from a triangulated
//! patch, topology, boundary and surface integrals, and the inequality checks
//! built on them.

mod ball;
mod checks;
mod complex;
mod curvature;
mod growth;
mod patch;
mod report;

pub use ball::{
    euler_data, extract_ball, extract_region, BallNode, BallPolygon, BoundaryLoop, EulerData, ExtrinsicBall,
    LevelSegment, NodeId, SegmentKind,
};
pub use complex::{
    annulus_fixture, disc_fixture, fixture, torus_with_hole_fixture, two_lobe_fixture, two_lobe_r, Complex,
    COMPLEX_FORMAT, FIXTURE_NAMES,
};
pub use curvature::{
    gauss_bonnet, gauss_bonnet_check, geodesic_curvature_at, geodesic_curvature_check, GaussBonnet, KgSample, TANGENCY_CUTOFF,
};
pub use patch::{triangulate, IntegrandVector, PointData, SurfaceIntegrand, TriangulatedPatch, N_SURFACE};
pub use report::{normalized, CheckRow, ReportMeta, Status, VerificationReport};
pub use checks::{
    annulus_check, annulus_suite, chern_osserman_report, coarea_check, cosh_integral_bound_check,
    divergence_chain_check, huber_check, hypothesis_gate, isoperimetric_check, lemon_check, monotonicity_checks,
    sampled_liminf, tail_change, topology_series, truncated_integrability_sanity, Anchor, ChernOsserman, Gate,
    IntegrabilitySanity, IntegrabilityTarget, Tolerances,
};
pub use growth::{
    ball_volume, growth_curve, level_line_integrals, model_disc_area, sample_radii, GrowthCurve, GrowthSample,
    LineIntegrand, N_LINE,
};

#[cfg(test)]
pub(crate) mod testkit {
    use std::sync::OnceLock;

    use super::{triangulate, TriangulatedPatch};
    use crate::immersed_surface::{DecayProfile, GridSpec, ParamImmersion, PoleSpec, SurfaceKind};
    use crate::model_space::HyperbolicAmbient;

    pub fn immersion(kind: SurfaceKind, pole: PoleSpec, n: usize) -> ParamImmersion {
        let amb = HyperbolicAmbient::new(-1.0, 3).unwrap();
        ParamImmersion::new(amb, kind, GridSpec::polar(6.0, n, n), pole).unwrap()
    }

    pub fn graph_kind() -> SurfaceKind {
        SurfaceKind::Graph { amplitude: 0.1, profile: DecayProfile::Sech { rate: 2.0 }, modulation: 0.3, frequency: 2 }
    }

    pub fn disc() -> &'static TriangulatedPatch {
        static P: OnceLock<TriangulatedPatch> = OnceLock::new();
        P.get_or_init(|| triangulate(&immersion(SurfaceKind::TotallyGeodesic, PoleSpec::SurfaceCenter, 128)).unwrap())
    }

    /// Equidistant surface at distance 0.4, pole on the core plane so that
    /// `cosh r = cosh a cosh rho`.
    pub fn equidistant() -> &'static TriangulatedPatch {
        static P: OnceLock<TriangulatedPatch> = OnceLock::new();
        P.get_or_init(|| {
            triangulate(&immersion(SurfaceKind::Equidistant { distance: 0.4 }, PoleSpec::CoreCenter, 128)).unwrap()
        })
    }

    pub fn graph() -> &'static TriangulatedPatch {
        static P: OnceLock<TriangulatedPatch> = OnceLock::new();
        P.get_or_init(|| triangulate(&immersion(graph_kind(), PoleSpec::SurfaceCenter, 128)).unwrap())
    }
}
