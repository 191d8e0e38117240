use rayon::prelude::*;
use serde_json::{json, Value};

use isocomp::comparison_space::ComparisonSpace;
use isocomp::extrinsic_analysis::{
    annulus_suite, chern_osserman_report, coarea_check, cosh_integral_bound_check, divergence_chain_check,
    extract_ball, extract_region, gauss_bonnet, geodesic_curvature_check, growth_curve, huber_check, hypothesis_gate,
    isoperimetric_check, lemon_check, monotonicity_checks, sample_radii, triangulate, truncated_integrability_sanity,
    CheckRow, Gate, GrowthCurve, IntegrabilityTarget, Tolerances, TriangulatedPatch, VerificationReport,
};
use isocomp::immersed_surface::{cosh_radial, laplacian_radial_check, GridLayout, ParamImmersion};
use isocomp::model_space::HyperbolicAmbient;
use isocomp::GeomError;

use crate::config::{RunConfig, SurfaceEntry};

/// Grid nodes per direction visited by the Laplacian suite.
pub const LAPLACIAN_NODES: usize = 64;
/// Radii between Gauss-Bonnet balls, in samples.
pub const GAUSS_BONNET_STRIDE: usize = 8;

/// A surface with its triangulation and growth curve.
pub struct SurfaceContext {
    pub entry: SurfaceEntry,
    pub patch: TriangulatedPatch,
    pub curve: GrowthCurve,
}

impl SurfaceContext {
    pub fn build(cfg: &RunConfig, entry: &SurfaceEntry) -> anyhow::Result<Self> {
        let ambient = HyperbolicAmbient::new(cfg.ambient.b, cfg.ambient.n)?;
        let imm = ParamImmersion::new(ambient, entry.kind, entry.grid, entry.pole.clone())?;
        let patch = triangulate(&imm)?;
        let curve = growth_curve(&patch, &sample_radii(cfg.t_samples.count, cfg.t_samples.max))?;
        Ok(Self { entry: entry.clone(), patch, curve })
    }

    pub fn immersion(&self) -> &ParamImmersion {
        self.patch.immersion.as_ref().expect("triangulated from an immersion")
    }

    /// `(r, C(x))` at every vertex.
    pub fn radial_samples(&self) -> Vec<(f64, f64)> {
        self.patch
            .data
            .as_deref()
            .unwrap_or_default()
            .iter()
            .map(|d| (d.r, d.radial_curvature))
            .collect()
    }

    pub fn grid_label(&self) -> String {
        let g = self.entry.grid;
        match g.layout {
            GridLayout::Polar { radius } => format!("polar radius {radius} {}x{}", g.nu, g.nv),
            GridLayout::Rect { u_max, v_max } => format!("rect {u_max}x{v_max} {}x{}", g.nu, g.nv),
        }
    }
}

/// A comparison space checked against one surface.
pub struct SpaceContext<'a> {
    pub space: &'a ComparisonSpace,
    pub gate: Gate,
}

impl<'a> SpaceContext<'a> {
    pub fn new(surface: &SurfaceContext, space: &'a ComparisonSpace, tol: &Tolerances) -> isocomp::Result<Self> {
        Ok(Self { space, gate: hypothesis_gate(&surface.patch, space, tol)? })
    }
}

fn inconclusive(suite: &str, e: impl std::fmt::Display) -> VerificationReport {
    VerificationReport::inconclusive(suite, e.to_string())
}

fn settle(suite: &str, r: isocomp::Result<VerificationReport>) -> VerificationReport {
    r.unwrap_or_else(|e| inconclusive(suite, e))
}

/// Evenly spread indices into `0..len`, always including the last.
fn spread(len: usize, stride: usize) -> Vec<usize> {
    if len == 0 {
        return vec![];
    }
    let mut out: Vec<usize> = (0..len).step_by(stride.max(1)).collect();
    if *out.last().expect("nonempty") != len - 1 {
        out.push(len - 1);
    }
    out
}

fn laplacian(surf: &SurfaceContext, tol: &Tolerances) -> VerificationReport {
    let imm = surf.immersion();
    let g = imm.grid;
    let f = cosh_radial(imm.b());
    let nodes: Vec<(usize, usize)> = spread(g.nu, g.nu.div_ceil(LAPLACIAN_NODES))
        .into_iter()
        .flat_map(|i| spread(g.nv, g.nv.div_ceil(LAPLACIAN_NODES)).into_iter().map(move |j| (i, j)))
        .collect();
    let results: Vec<_> = nodes.par_iter().map(|&n| laplacian_radial_check(imm, &f, n)).collect();
    let mut checks = vec![];
    let mut skipped = 0;
    for r in results {
        match r {
            Ok(c) => {
                checks.push(CheckRow::at_least("laplacian", Some(c.r), c.laplacian, c.bound, tol.pointwise));
                checks.push(CheckRow::equal("laplacian_identity", Some(c.r), c.laplacian, c.identity, tol.pointwise));
            }
            Err(GeomError::PoleSingularity(_)) => skipped += 1,
            Err(e) => return inconclusive("laplacian", e),
        }
    }
    let mut notes = vec![format!("f = cosh kr at {} grid nodes", nodes.len())];
    if skipped > 0 {
        notes.push(format!("{skipped} nodes at the pole skipped"));
    }
    VerificationReport::from_checks("laplacian", checks, notes)
}

/// Quartile radii of the resolved samples.
fn quartile_radii(curve: &GrowthCurve) -> Vec<f64> {
    let ts: Vec<f64> = curve.resolved().map(|s| s.t).collect();
    let n = ts.len();
    let mut idx: Vec<usize> = (1..=4).map(|q| (q * n).div_ceil(4).saturating_sub(1)).collect();
    idx.dedup();
    idx.into_iter().filter(|&i| i < n).map(|i| ts[i]).collect()
}

fn geodesic_curvature(surf: &SurfaceContext, tol: &Tolerances) -> VerificationReport {
    const SUITE: &str = "geodesic_curvature";
    let mut checks = vec![];
    let mut notes = vec![];
    for t in quartile_radii(&surf.curve) {
        let report = extract_ball(&surf.patch, t).and_then(|ball| geodesic_curvature_check(&ball, tol.pointwise));
        match report {
            Ok(r) => {
                checks.extend(r.checks);
                notes.extend(r.notes.into_iter().map(|n| format!("t = {t}: {n}")));
            }
            Err(e) => notes.push(format!("t = {t}: {e}")),
        }
    }
    if checks.is_empty() {
        return VerificationReport::inconclusive(SUITE, notes.join("; "));
    }
    VerificationReport::from_checks(SUITE, checks, notes)
}

fn gauss_bonnet_suite(surf: &SurfaceContext, tol: &Tolerances) -> (VerificationReport, Value) {
    const SUITE: &str = "gauss_bonnet";
    let ts: Vec<f64> = surf.curve.resolved().map(|s| s.t).collect();
    let mut regions: Vec<(Option<f64>, f64)> = spread(ts.len(), GAUSS_BONNET_STRIDE).into_iter().map(|i| (None, ts[i])).collect();
    if let Some(&t) = ts.last() {
        regions.push((Some(0.5 * t), t));
    }
    let results: Vec<_> = regions
        .par_iter()
        .map(|&(s, t)| extract_region(&surf.patch, s, t).and_then(|ball| gauss_bonnet(&ball)))
        .collect();
    let mut checks = vec![];
    let mut terms = vec![];
    for ((s, t), r) in regions.iter().zip(results) {
        let gb = match r {
            Ok(gb) => gb,
            Err(e) => return (inconclusive(SUITE, format!("region ({s:?}, {t}): {e}")), Value::Null),
        };
        let name = if s.is_some() { "gauss_bonnet_annulus" } else { "gauss_bonnet" };
        let lhs = gb.boundary_kg + gb.turning + gb.curvature;
        let rhs = 2.0 * std::f64::consts::PI * gb.euler.chi as f64;
        checks.push(CheckRow::equal_abs(name, Some(*t), lhs, rhs, tol.gauss_bonnet));
        terms.push(json!({ "s": s, "t": t, "terms": gb }));
    }
    if checks.is_empty() {
        return (inconclusive(SUITE, "no resolved samples"), Value::Null);
    }
    (VerificationReport::from_checks(SUITE, checks, vec![]), Value::Array(terms))
}

fn integrability(surf: &SurfaceContext, tol: &Tolerances) -> (VerificationReport, Value) {
    const SUITE: &str = "integrability";
    let mut checks = vec![];
    let mut notes = vec![];
    let mut details = vec![];
    for target in [IntegrabilityTarget::NormA2, IntegrabilityTarget::BMinusKn, IntegrabilityTarget::NormH] {
        match truncated_integrability_sanity(&surf.curve, target, tol) {
            Ok((r, s)) => {
                checks.extend(r.checks);
                notes.extend(r.notes);
                details.push(json!(s));
            }
            Err(e) => return (inconclusive(SUITE, e), Value::Null),
        }
    }
    (VerificationReport::from_checks(SUITE, checks, notes), Value::Array(details))
}

/// Run a suite that needs no comparison space. Returns the report and
/// suite-specific details.
pub fn run_surface_suite(suite: &str, surf: &SurfaceContext, tol: &Tolerances) -> (VerificationReport, Value) {
    let curve = &surf.curve;
    match suite {
        "laplacian" => (laplacian(surf, tol), Value::Null),
        "geodesic_curvature" => (geodesic_curvature(surf, tol), Value::Null),
        "gauss_bonnet" => gauss_bonnet_suite(surf, tol),
        "coarea" => (coarea_check(curve, tol), Value::Null),
        "annulus" => (settle(suite, annulus_suite(curve, tol)), Value::Null),
        "divergence_chain" => (divergence_chain_check(curve, tol), Value::Null),
        "lemon" => (settle(suite, lemon_check(curve, tol)), Value::Null),
        "huber" => (settle(suite, huber_check(&curve.topology(), surf.entry.known_chi)), Value::Null),
        "integrability" => integrability(surf, tol),
        _ => unreachable!("suite {suite} needs a space"),
    }
}

/// Run a suite against a comparison space, behind the hypothesis gate.
pub fn run_space_suite(suite: &str, surf: &SurfaceContext, sc: &SpaceContext, tol: &Tolerances) -> (VerificationReport, Value) {
    let anchor = match &sc.gate {
        Gate::Accepted(a) => a,
        Gate::Rejected(why) => return (VerificationReport::rejected(suite, why.clone()), Value::Null),
    };
    let curve = &surf.curve;
    let anchor_json = json!(anchor);
    match suite {
        "isoperimetric" => (settle(suite, isoperimetric_check(curve, sc.space, anchor, tol)), anchor_json),
        "monotonicity" => (settle(suite, monotonicity_checks(curve, sc.space, anchor, tol)), anchor_json),
        "cosh_integral" => (cosh_integral_bound_check(curve, anchor, tol), anchor_json),
        "chern_osserman" => match chern_osserman_report(curve, anchor, tol) {
            Ok((r, terms)) => (r, json!({ "anchor": anchor, "terms": terms })),
            Err(e) => (inconclusive(suite, e), anchor_json),
        },
        _ => unreachable!("suite {suite} needs no space"),
    }
}
