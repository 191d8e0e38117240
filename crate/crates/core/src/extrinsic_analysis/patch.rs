use rayon::prelude::*;
use serde::Serialize;

use super::complex::{polar_triangles, rect_triangles, Complex};
use crate::error::{GeomError, Result};
use crate::immersed_surface::{jet_at_param, GridLayout, ParamImmersion, SurfaceJet};

/// Pointwise integrands over extrinsic balls, each taken against `d sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceIntegrand {
    Area,
    NormA2,
    NormH,
    NormH2,
    GaussK,
    /// `cosh(kr)`.
    Cosh,
    /// `cosh(kr) - |H| sinh(kr)/k`.
    Divergence,
    /// `(1 + sinh^2(kr)|grad_perp r|^2 - sinh(kr)cosh(kr)|H|/k) / cosh^3(kr)`.
    Annulus,
    /// `sinh^2(kr)|grad_perp r|^2 / cosh^3(kr)`.
    Transverse,
    /// `e^{-kr} |A|^2`.
    ExpNormA2,
    /// `e^{-kr} |H|`.
    ExpNormH,
    /// `sinh(kr)/cosh^2(kr) <A(nu, nu), grad_perp r>`.
    Lemon,
    /// `b - K_N` on the tangent plane; zero in `H^n(b)`.
    BMinusKn,
    /// `e^{-kr} (b - K_N)`.
    ExpBMinusKn,
}

pub const N_SURFACE: usize = 14;

impl SurfaceIntegrand {
    pub const ALL: [SurfaceIntegrand; N_SURFACE] = [
        Self::Area,
        Self::NormA2,
        Self::NormH,
        Self::NormH2,
        Self::GaussK,
        Self::Cosh,
        Self::Divergence,
        Self::Annulus,
        Self::Transverse,
        Self::ExpNormA2,
        Self::ExpNormH,
        Self::Lemon,
        Self::BMinusKn,
        Self::ExpBMinusKn,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

pub type IntegrandVector = [f64; N_SURFACE];

/// The part of a [`SurfaceJet`] the integrals need.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PointData {
    pub param: [f64; 2],
    pub r: f64,
    pub sqrt_g: f64,
    pub g: [[f64; 2]; 2],
    pub christoffel: [[[f64; 2]; 2]; 2],
    /// Chart gradient `(d_u r, d_v r)`.
    pub dr: [f64; 2],
    pub norm_a2: f64,
    pub norm_h: f64,
    pub k_s: f64,
    pub grad_s_norm: f64,
    pub grad_perp_norm: f64,
    /// `<A(nu, nu), grad_perp r>`.
    pub a_nu_perp: f64,
    /// `C(x) = -<grad_N r, H>`.
    pub radial_curvature: f64,
}

impl PointData {
    pub fn from_jet(jet: &SurfaceJet) -> Self {
        let dr = jet.radial.map_or([0.0, 0.0], |f| {
            [f.grad_n.dot(&jet.tangent_basis[0]), f.grad_n.dot(&jet.tangent_basis[1])]
        });
        Self {
            param: jet.param,
            r: jet.r,
            sqrt_g: jet.det_g.sqrt(),
            g: jet.g,
            christoffel: jet.christoffel,
            dr,
            norm_a2: jet.norm_a2,
            norm_h: jet.norm_h,
            k_s: jet.k_s,
            grad_s_norm: jet.grad_s_norm(),
            grad_perp_norm: jet.grad_perp_norm(),
            a_nu_perp: jet.a_nu_perp(),
            radial_curvature: crate::immersed_surface::radial_mean_curvature(jet),
        }
    }

    pub fn at(imm: &ParamImmersion, p: [f64; 2]) -> Result<Self> {
        Ok(Self::from_jet(&jet_at_param(imm, p)?))
    }

    /// Integrand values, not yet multiplied by `sqrt g`.
    pub fn integrands(&self, b: f64) -> IntegrandVector {
        let k = (-b).sqrt();
        let kr = k * self.r;
        let (sh, ch) = (kr.sinh(), kr.cosh());
        let e = (-kr).exp();
        let perp2 = self.grad_perp_norm * self.grad_perp_norm;
        let mut out = [0.0; N_SURFACE];
        out[SurfaceIntegrand::Area.index()] = 1.0;
        out[SurfaceIntegrand::NormA2.index()] = self.norm_a2;
        out[SurfaceIntegrand::NormH.index()] = self.norm_h;
        out[SurfaceIntegrand::NormH2.index()] = self.norm_h * self.norm_h;
        out[SurfaceIntegrand::GaussK.index()] = self.k_s;
        out[SurfaceIntegrand::Cosh.index()] = ch;
        out[SurfaceIntegrand::Divergence.index()] = ch - self.norm_h * sh / k;
        out[SurfaceIntegrand::Annulus.index()] = (1.0 + sh * sh * perp2 - sh * ch * self.norm_h / k) / (ch * ch * ch);
        out[SurfaceIntegrand::Transverse.index()] = sh * sh * perp2 / (ch * ch * ch);
        out[SurfaceIntegrand::ExpNormA2.index()] = e * self.norm_a2;
        out[SurfaceIntegrand::ExpNormH.index()] = e * self.norm_h;
        out[SurfaceIntegrand::Lemon.index()] = sh / (ch * ch) * self.a_nu_perp;
        out
    }

    pub fn weighted(&self, b: f64) -> IntegrandVector {
        let mut v = self.integrands(b);
        for x in &mut v {
            *x *= self.sqrt_g;
        }
        v
    }

    pub fn sq_len(&self, d: [f64; 2]) -> f64 {
        self.g[0][0] * d[0] * d[0] + 2.0 * self.g[0][1] * d[0] * d[1] + self.g[1][1] * d[1] * d[1]
    }

    pub fn inner(&self, a: [f64; 2], c: [f64; 2]) -> f64 {
        self.g[0][0] * a[0] * c[0] + self.g[0][1] * (a[0] * c[1] + a[1] * c[0]) + self.g[1][1] * a[1] * c[1]
    }

    /// Rotation by +90 degrees for the chart orientation.
    pub fn rotate(&self, d: [f64; 2]) -> [f64; 2] {
        let lower = [self.g[0][0] * d[0] + self.g[0][1] * d[1], self.g[1][0] * d[0] + self.g[1][1] * d[1]];
        let s = 1.0 / self.sqrt_g;
        [-s * lower[1], s * lower[0]]
    }

    /// `Gamma(d, d)` in chart components.
    pub fn gamma(&self, d: [f64; 2]) -> [f64; 2] {
        let c = &self.christoffel;
        let q = |k: usize| c[k][0][0] * d[0] * d[0] + 2.0 * c[k][0][1] * d[0] * d[1] + c[k][1][1] * d[1] * d[1];
        [q(0), q(1)]
    }

    /// Geodesic curvature density `k_g |c'|` of the chart-straight segment
    /// with direction `d`, with respect to the left normal.
    pub fn straight_kg_density(&self, d: [f64; 2]) -> f64 {
        self.inner(self.gamma(d), self.rotate(d)) / self.sq_len(d)
    }
}

pub(crate) fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

pub(crate) fn midpoint(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

/// A triangulated surface: a [`Complex`] plus, for immersed patches, the
/// immersion and per-vertex geometry.
#[derive(Debug, Clone)]
pub struct TriangulatedPatch {
    pub complex: Complex,
    pub immersion: Option<ParamImmersion>,
    pub data: Option<Vec<PointData>>,
    /// Per-triangle integrals by the edge-midpoint rule.
    tri_integrals: Option<Vec<IntegrandVector>>,
}

impl TriangulatedPatch {
    /// Purely combinatorial patch; only topology is available.
    pub fn from_complex(complex: Complex) -> Result<Self> {
        complex.validate()?;
        Ok(Self { complex, immersion: None, data: None, tri_integrals: None })
    }

    pub fn vertex_count(&self) -> usize {
        self.complex.r.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.complex.triangles.len()
    }

    pub fn b(&self) -> Option<f64> {
        self.immersion.as_ref().map(|i| i.b())
    }

    pub(crate) fn tri_integrals(&self) -> Option<&[IntegrandVector]> {
        self.tri_integrals.as_deref()
    }

    /// Vertices on edges used by a single triangle.
    pub fn boundary_vertex_count(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = self
            .complex
            .triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        let mut on = vec![false; self.vertex_count()];
        let mut i = 0;
        while i < edges.len() {
            let mut j = i;
            while j < edges.len() && edges[j] == edges[i] {
                j += 1;
            }
            if j - i == 1 {
                on[edges[i].0] = true;
                on[edges[i].1] = true;
            }
            i = j;
        }
        on.iter().filter(|&&x| x).count()
    }

    /// Smallest `r` over the patch boundary; balls below this level do not
    /// reach the edge of the chart.
    pub fn boundary_r_min(&self) -> f64 {
        let mut count = std::collections::HashMap::new();
        for t in &self.complex.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        count
            .iter()
            .filter(|(_, &n)| n == 1)
            .flat_map(|((a, b), _)| [self.complex.r[*a], self.complex.r[*b]])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Structured triangulation of the immersion grid (two triangles per
/// cell; a fan around the center of a polar grid) with a jet per vertex.
pub fn triangulate(imm: &ParamImmersion) -> Result<TriangulatedPatch> {
    let g = imm.grid;
    let (positions, triangles) = match g.layout {
        GridLayout::Polar { .. } => {
            let mut pos = vec![[0.0, 0.0]];
            for i in 1..g.nu {
                for j in 0..g.nv {
                    pos.push(g.node(i, j));
                }
            }
            (pos, polar_triangles(g.nu - 1, g.nv, true))
        }
        GridLayout::Rect { .. } => {
            let mut pos = vec![];
            for i in 0..g.nu {
                for j in 0..g.nv {
                    pos.push(g.node(i, j));
                }
            }
            (pos, rect_triangles(g.nu, g.nv))
        }
    };
    let data: Vec<PointData> = positions.par_iter().map(|&p| PointData::at(imm, p)).collect::<Result<_>>()?;
    let b = imm.b();

    for (index, t) in triangles.iter().enumerate() {
        let pa = signed_area(positions[t[0]], positions[t[1]], positions[t[2]]);
        let area = pa * (data[t[0]].sqrt_g + data[t[1]].sqrt_g + data[t[2]].sqrt_g) / 3.0;
        if !(area > 1e-12) {
            return Err(GeomError::DegenerateCell { index, area });
        }
    }

    let mut edges: Vec<(usize, usize)> = triangles
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.par_sort_unstable();
    edges.dedup();
    let mids: Vec<IntegrandVector> = edges
        .par_iter()
        .map(|&(a, c)| PointData::at(imm, midpoint(positions[a], positions[c])).map(|d| d.weighted(b)))
        .collect::<Result<_>>()?;
    let edge_index = |a: usize, c: usize| edges.binary_search(&(a.min(c), a.max(c))).expect("edge listed");
    let tri_integrals = triangles
        .par_iter()
        .map(|t| {
            let w = signed_area(positions[t[0]], positions[t[1]], positions[t[2]]) / 3.0;
            let mut out = [0.0; N_SURFACE];
            for (a, c) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let m = &mids[edge_index(a, c)];
                for k in 0..N_SURFACE {
                    out[k] += w * m[k];
                }
            }
            out
        })
        .collect();

    let r = data.iter().map(|d| d.r).collect();
    Ok(TriangulatedPatch {
        complex: Complex { positions, r, triangles },
        immersion: Some(imm.clone()),
        data: Some(data),
        tri_integrals: Some(tri_integrals),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extrinsic_analysis::testkit;
    use crate::immersed_surface::{GridSpec, PoleSpec, SurfaceKind};
    use crate::model_space::HyperbolicAmbient;

    fn rect(u: f64, nu: usize, nv: usize) -> ParamImmersion {
        let amb = HyperbolicAmbient::new(-1.0, 3).unwrap();
        ParamImmersion::new(amb, SurfaceKind::TotallyGeodesic, GridSpec::rect(u, u, nu, nv), PoleSpec::CoreCenter).unwrap()
    }

    #[test]
    fn single_cell_gives_two_triangles() {
        let p = triangulate(&rect(1.0, 2, 2)).unwrap();
        assert_eq!(p.triangle_count(), 2);
        assert_eq!(p.vertex_count(), 4);
    }

    #[test]
    fn boundary_vertices_are_the_perimeter() {
        let p = triangulate(&rect(1.0, 7, 5)).unwrap();
        assert_eq!(p.boundary_vertex_count(), 2 * (7 + 5) - 4);
        let q = testkit::disc();
        assert_eq!(q.boundary_vertex_count(), 128);
    }

    #[test]
    fn tiny_cells_are_rejected() {
        match triangulate(&rect(1e-7, 3, 3)) {
            Err(GeomError::DegenerateCell { .. }) => {}
            other => panic!("expected a degenerate cell, got {other:?}"),
        }
    }

    #[test]
    fn whole_disc_area() {
        let p = testkit::disc();
        let total: f64 = p.tri_integrals().unwrap().iter().map(|v| v[SurfaceIntegrand::Area.index()]).sum();
        let exact = 2.0 * std::f64::consts::PI * (6f64.cosh() - 1.0);
        // the inscribed polygon misses a sliver of relative size ~ (2/3)(1 - cos(pi/128))
        let sliver = 2.0 / 3.0 * (1.0 - (std::f64::consts::PI / 128.0).cos()) * 6.0;
        assert!((total / exact - 1.0).abs() < 1.5 * sliver, "{total} vs {exact}");
    }

    #[test]
    fn integrands_on_the_geodesic_disc() {
        let p = testkit::disc();
        let d = &p.data.as_ref().unwrap()[500];
        let v = d.integrands(-1.0);
        for f in [SurfaceIntegrand::NormA2, SurfaceIntegrand::NormH, SurfaceIntegrand::Transverse, SurfaceIntegrand::Lemon] {
            assert!(v[f.index()].abs() < 1e-8, "{f:?} = {}", v[f.index()]);
        }
        assert!((v[SurfaceIntegrand::GaussK.index()] + 1.0).abs() < 1e-6);
        assert!((v[SurfaceIntegrand::Annulus.index()] - d.r.cosh().powi(-3)).abs() < 1e-8);
    }

    #[test]
    fn rotation_is_an_isometry() {
        let p = testkit::graph();
        for d in p.data.as_ref().unwrap().iter().step_by(997) {
            let x = [0.3, -1.1];
            let j = d.rotate(x);
            assert!((d.sq_len(j) / d.sq_len(x) - 1.0).abs() < 1e-10);
            assert!(d.inner(j, x).abs() < 1e-10 * d.sq_len(x));
        }
    }
}
