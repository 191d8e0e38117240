use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::patch::{midpoint, signed_area, IntegrandVector, PointData, TriangulatedPatch, N_SURFACE};
use crate::error::{GeomError, Result};
use crate::immersed_surface::{geodesic_distance, ParamImmersion};

/// A node of the clipped complex: a mesh vertex, or the point where the
/// level set `r = level` crosses a mesh edge `(a, b)`, `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NodeId {
    Mesh(usize),
    Cross { a: usize, b: usize, upper: bool },
}

#[derive(Debug, Clone, Serialize)]
pub struct BallNode {
    pub id: NodeId,
    pub param: [f64; 2],
    pub r: f64,
    #[serde(skip)]
    pub data: Option<PointData>,
}

#[derive(Debug, Clone)]
pub struct BallPolygon {
    pub triangle: usize,
    /// Counterclockwise node indices.
    pub nodes: Vec<usize>,
    /// The whole triangle lies in the ball.
    pub full: bool,
}

/// Where a boundary segment lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    /// On the outer level set `r = t`.
    Upper,
    /// On the inner level set `r = s` of an annular region.
    Lower,
    /// Along the edge of the chart.
    Chart,
}

/// Closed boundary polyline with the region on its left.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryLoop {
    pub nodes: Vec<usize>,
    /// `kinds[i]` describes the segment from `nodes[i]` to `nodes[i + 1]`.
    pub kinds: Vec<SegmentKind>,
}

impl BoundaryLoop {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_level(&self, kind: SegmentKind) -> bool {
        self.kinds.iter().all(|&k| k == kind)
    }
}

/// The pole component of `{s <= r < t}` (a ball when `s` is `None`).
#[derive(Debug, Clone)]
pub struct ExtrinsicBall<'a> {
    pub patch: &'a TriangulatedPatch,
    pub t: f64,
    pub s: Option<f64>,
    pub nodes: Vec<BallNode>,
    pub polygons: Vec<BallPolygon>,
    pub boundary_loops: Vec<BoundaryLoop>,
    /// Components of the clipped complex before selection.
    pub component_count: usize,
}

/// `(chi, g, c)` of a ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EulerData {
    pub chi: i64,
    pub genus: i64,
    pub boundary_components: i64,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Radial distance of a chart point.
pub(crate) fn r_at(imm: &ParamImmersion, p: [f64; 2]) -> f64 {
    imm.point(p[0], p[1])
        .and_then(|x| geodesic_distance(&imm.pole, &x, imm.b()))
        .unwrap_or(f64::NAN)
}

/// Root of `r(pa + lambda (pb - pa)) = level` with `r` bracketing the
/// level between the ends; linear in `r` when there is no immersion.
fn crossing_on_edge(
    imm: Option<&ParamImmersion>,
    pa: [f64; 2],
    pb: [f64; 2],
    ra: f64,
    rb: f64,
    level: f64,
) -> [f64; 2] {
    let lerp = |l: f64| [pa[0] + l * (pb[0] - pa[0]), pa[1] + l * (pb[1] - pa[1])];
    let lin = ((level - ra) / (rb - ra)).clamp(0.0, 1.0);
    let Some(imm) = imm else {
        return lerp(lin);
    };
    // Illinois regula falsi on [0, 1].
    let (mut x0, mut f0, mut x1, mut f1) = (0.0, ra - level, 1.0, rb - level);
    if f0 == 0.0 {
        return pa;
    }
    if f1 == 0.0 {
        return pb;
    }
    let mut side = 0;
    let mut x = lin;
    for _ in 0..60 {
        x = (x0 * f1 - x1 * f0) / (f1 - f0);
        let fx = r_at(imm, lerp(x)) - level;
        if !fx.is_finite() {
            return lerp(lin);
        }
        if fx.abs() < 1e-14 * (1.0 + level) || (x1 - x0).abs() < 1e-15 {
            break;
        }
        if (fx > 0.0) == (f1 > 0.0) {
            x1 = x;
            f1 = fx;
            if side == 1 {
                f0 *= 0.5;
            }
            side = 1;
        } else {
            x0 = x;
            f0 = fx;
            if side == -1 {
                f1 *= 0.5;
            }
            side = -1;
        }
    }
    lerp(x)
}

/// Polygon vertex during clipping, with the mesh edge it lies on.
#[derive(Clone, Copy)]
struct PV {
    id: NodeId,
    r: f64,
}

fn edge_of(p: NodeId, q: NodeId, tri: [usize; 3]) -> (usize, usize) {
    let verts = |n: NodeId| match n {
        NodeId::Mesh(v) => vec![v],
        NodeId::Cross { a, b, .. } => vec![a, b],
    };
    let (vp, vq) = (verts(p), verts(q));
    let mut all: Vec<usize> = vp.iter().chain(&vq).copied().collect();
    all.sort_unstable();
    all.dedup();
    if all.len() == 2 {
        return (all[0], all[1]);
    }
    // Two crossings on different edges do not share an edge; fall back to
    // the triangle edge containing both ends' vertex sets.
    for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
        if all.iter().all(|v| *v == a || *v == b) {
            return (a.min(b), a.max(b));
        }
    }
    unreachable!("clip segment not on a triangle edge")
}

fn clip(poly: Vec<PV>, level: f64, keep_below: bool, upper: bool, tri: [usize; 3]) -> Vec<PV> {
    let inside = |v: &PV| if keep_below { v.r < level } else { v.r >= level };
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let (ip, iq) = (inside(&p), inside(&q));
        if ip {
            out.push(p);
        }
        if ip != iq {
            let (a, b) = edge_of(p.id, q.id, tri);
            out.push(PV { id: NodeId::Cross { a, b, upper }, r: level });
        }
    }
    out
}

/// Pole component of the sublevel set `r < t`.
pub fn extract_ball(patch: &TriangulatedPatch, t: f64) -> Result<ExtrinsicBall<'_>> {
    extract_region(patch, None, t)
}

/// A level a hair below `level` when a vertex sits exactly on it, so that no
/// crossing coincides with a vertex. Membership of every vertex is kept:
/// the shift stays above the next lower vertex value.
fn off_vertex(r: &[f64], level: f64) -> f64 {
    if !r.contains(&level) {
        return level;
    }
    let below = r.iter().copied().filter(|&x| x < level).fold(f64::NEG_INFINITY, f64::max);
    level - (1e-9 * (1.0 + level.abs())).min(0.5 * (level - below))
}

/// Pole component of `{s <= r < t}`.
pub fn extract_region(patch: &TriangulatedPatch, s: Option<f64>, t: f64) -> Result<ExtrinsicBall<'_>> {
    let c = &patch.complex;
    let t = off_vertex(&c.r, t);
    let s = s.map(|s| off_vertex(&c.r, s));
    let lower = s.unwrap_or(f64::NEG_INFINITY);
    if !(t > lower) {
        return Err(GeomError::InvalidInput(format!("empty level range [{lower}, {t})")));
    }
    let seed = (0..c.r.len())
        .filter(|&v| c.r[v] < t && c.r[v] >= lower)
        .min_by(|&a, &b| c.r[a].total_cmp(&c.r[b]).then(a.cmp(&b)))
        .ok_or(GeomError::EmptyBall(t))?;

    let clipped: Vec<(usize, Vec<PV>, bool)> = c
        .triangles
        .par_iter()
        .enumerate()
        .filter_map(|(ti, tri)| {
            let poly: Vec<PV> = tri.iter().map(|&v| PV { id: NodeId::Mesh(v), r: c.r[v] }).collect();
            let full = poly.iter().all(|p| p.r < t && p.r >= lower);
            if full {
                return Some((ti, poly, true));
            }
            if poly.iter().all(|p| p.r >= t) || poly.iter().all(|p| p.r < lower) {
                return None;
            }
            let mut poly = clip(poly, t, true, true, *tri);
            if s.is_some() && poly.len() >= 3 {
                poly = clip(poly, lower, false, false, *tri);
            }
            (poly.len() >= 3).then_some((ti, poly, false))
        })
        .collect();

    // Index nodes.
    let mut index: HashMap<NodeId, usize> = HashMap::new();
    let mut ids: Vec<NodeId> = vec![];
    let polys: Vec<(usize, Vec<usize>, bool)> = clipped
        .into_iter()
        .map(|(ti, poly, full)| {
            let nodes = poly
                .iter()
                .map(|p| {
                    *index.entry(p.id).or_insert_with(|| {
                        ids.push(p.id);
                        ids.len() - 1
                    })
                })
                .collect();
            (ti, nodes, full)
        })
        .collect();

    let mut uf = UnionFind((0..ids.len()).collect());
    for (_, nodes, _) in &polys {
        for w in nodes.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let mut roots: Vec<usize> = (0..ids.len()).map(|i| uf.find(i)).collect();
    let component_count = {
        let mut r = roots.clone();
        r.sort_unstable();
        r.dedup();
        r.len()
    };
    let seed_root = roots[index[&NodeId::Mesh(seed)]];

    // Keep the seed component and renumber its nodes.
    let mut renum = vec![usize::MAX; ids.len()];
    let mut kept_ids = vec![];
    for (i, id) in ids.iter().enumerate() {
        if roots[i] == seed_root {
            renum[i] = kept_ids.len();
            kept_ids.push(*id);
        }
    }
    roots.clear();
    let polygons: Vec<BallPolygon> = polys
        .into_iter()
        .filter(|(_, nodes, _)| renum[nodes[0]] != usize::MAX)
        .map(|(triangle, nodes, full)| BallPolygon {
            triangle,
            nodes: nodes.iter().map(|&n| renum[n]).collect(),
            full,
        })
        .collect();

    let imm = patch.immersion.as_ref();
    let mut nodes: Vec<BallNode> = kept_ids
        .par_iter()
        .map(|&id| match id {
            NodeId::Mesh(v) => BallNode { id, param: c.positions[v], r: c.r[v], data: None },
            NodeId::Cross { a, b, upper } => {
                let level = if upper { t } else { lower };
                let param = crossing_on_edge(imm, c.positions[a], c.positions[b], c.r[a], c.r[b], level);
                BallNode { id, param, r: level, data: None }
            }
        })
        .collect();
    if let (Some(imm), Some(data)) = (imm, patch.data.as_ref()) {
        let filled: Vec<Option<PointData>> = nodes
            .par_iter()
            .map(|n| match n.id {
                NodeId::Mesh(v) => Ok(Some(data[v])),
                NodeId::Cross { .. } => PointData::at(imm, n.param).map(Some),
            })
            .collect::<Result<_>>()?;
        for (n, d) in nodes.iter_mut().zip(filled) {
            n.data = d;
        }
    }

    let boundary_loops = trace_loops(&nodes, &polygons)?;
    Ok(ExtrinsicBall { patch, t, s, nodes, polygons, boundary_loops, component_count })
}

fn trace_loops(nodes: &[BallNode], polygons: &[BallPolygon]) -> Result<Vec<BoundaryLoop>> {
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for p in polygons {
        let n = p.nodes.len();
        for i in 0..n {
            let (a, b) = (p.nodes[i], p.nodes[(i + 1) % n]);
            *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    let mut out_edges: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut directed = vec![];
    for p in polygons {
        let n = p.nodes.len();
        for i in 0..n {
            let (a, b) = (p.nodes[i], p.nodes[(i + 1) % n]);
            if count[&(a.min(b), a.max(b))] == 1 {
                out_edges.entry(a).or_default().push(b);
                directed.push((a, b));
            }
        }
    }
    directed.sort_unstable();
    for v in out_edges.values_mut() {
        v.sort_unstable();
    }
    let mut used: HashMap<(usize, usize), bool> = directed.iter().map(|&e| (e, false)).collect();
    let mut loops = vec![];
    for &(a0, b0) in &directed {
        if used[&(a0, b0)] {
            continue;
        }
        let mut lp = vec![a0];
        used.insert((a0, b0), true);
        let mut cur = b0;
        let mut guard = 0;
        while cur != a0 {
            lp.push(cur);
            let next = out_edges
                .get(&cur)
                .and_then(|v| v.iter().copied().find(|&n| !used[&(cur, n)]))
                .ok_or_else(|| GeomError::Topology("open boundary chain".into()))?;
            used.insert((cur, next), true);
            cur = next;
            guard += 1;
            if guard > directed.len() {
                return Err(GeomError::Topology("boundary loop does not close".into()));
            }
        }
        let n = lp.len();
        let kinds = (0..n)
            .map(|i| match (nodes[lp[i]].id, nodes[lp[(i + 1) % n]].id) {
                (NodeId::Cross { upper: u1, .. }, NodeId::Cross { upper: u2, .. }) if u1 == u2 => {
                    if u1 {
                        SegmentKind::Upper
                    } else {
                        SegmentKind::Lower
                    }
                }
                _ => SegmentKind::Chart,
            })
            .collect();
        loops.push(BoundaryLoop { nodes: lp, kinds });
    }
    Ok(loops)
}

impl ExtrinsicBall<'_> {
    pub fn euler_data(&self) -> Result<EulerData> {
        euler_data(self)
    }

    /// Some boundary segment runs along the chart edge, so the region is
    /// cut off by the chart rather than by the level set.
    pub fn touches_chart_boundary(&self) -> bool {
        self.boundary_loops.iter().any(|l| l.kinds.contains(&SegmentKind::Chart))
    }

    pub(crate) fn node_data(&self, i: usize) -> Result<&PointData> {
        self.nodes[i]
            .data
            .as_ref()
            .ok_or_else(|| GeomError::InvalidInput("patch has no surface geometry".into()))
    }

    fn immersion(&self) -> Result<&ParamImmersion> {
        self.patch
            .immersion
            .as_ref()
            .ok_or_else(|| GeomError::InvalidInput("patch has no surface geometry".into()))
    }

    /// Integrals over the polygonal region by the edge-midpoint rule: the
    /// precomputed values for full triangles, and a fan of triangles for
    /// each clipped polygon.
    pub fn polygon_integrals(&self) -> Result<IntegrandVector> {
        let imm = self.immersion()?;
        let b = imm.b();
        let tri = self
            .patch
            .tri_integrals()
            .ok_or_else(|| GeomError::InvalidInput("patch has no surface geometry".into()))?;
        let clipped: Vec<IntegrandVector> = self
            .polygons
            .par_iter()
            .filter(|p| !p.full)
            .map(|p| {
                let mut out = [0.0; N_SURFACE];
                let p0 = self.nodes[p.nodes[0]].param;
                for w in p.nodes[1..].windows(2) {
                    let (p1, p2) = (self.nodes[w[0]].param, self.nodes[w[1]].param);
                    let area = signed_area(p0, p1, p2) / 3.0;
                    for (x, y) in [(p0, p1), (p1, p2), (p2, p0)] {
                        let m = PointData::at(imm, midpoint(x, y))?.weighted(b);
                        for k in 0..N_SURFACE {
                            out[k] += area * m[k];
                        }
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let mut out = [0.0; N_SURFACE];
        for p in self.polygons.iter().filter(|p| p.full) {
            for k in 0..N_SURFACE {
                out[k] += tri[p.triangle][k];
            }
        }
        for c in &clipped {
            for k in 0..N_SURFACE {
                out[k] += c[k];
            }
        }
        Ok(out)
    }

    /// Level-set segments with their curved midpoints.
    pub fn level_segments(&self, kind: SegmentKind) -> Result<Vec<LevelSegment>> {
        let imm = self.immersion()?;
        let level = match kind {
            SegmentKind::Upper => self.t,
            SegmentKind::Lower => self.s.unwrap_or(f64::NAN),
            SegmentKind::Chart => return Err(GeomError::InvalidInput("chart segments have no level".into())),
        };
        let pairs: Vec<(usize, usize)> = self
            .boundary_loops
            .iter()
            .flat_map(|l| {
                let n = l.nodes.len();
                (0..n).filter(move |&i| l.kinds[i] == kind).map(move |i| (l.nodes[i], l.nodes[(i + 1) % n]))
            })
            .collect();
        pairs
            .par_iter()
            .map(|&(a, b)| {
                let (pa, pb) = (self.nodes[a].param, self.nodes[b].param);
                let d = [pb[0] - pa[0], pb[1] - pa[1]];
                let len = d[0].hypot(d[1]);
                let normal = [d[1] / len, -d[0] / len];
                let m = midpoint(pa, pb);
                let offset = project_along(imm, m, normal, level, len);
                let mid = [m[0] + offset * normal[0], m[1] + offset * normal[1]];
                Ok(LevelSegment {
                    start: a,
                    end: b,
                    offset,
                    chord: len,
                    mid: PointData::at(imm, mid)?,
                })
            })
            .collect()
    }

    /// Surface integrals over the true region: polygon integrals plus the
    /// slivers between each level chord and the level curve.
    pub fn surface_integrals(&self) -> Result<IntegrandVector> {
        let b = self.immersion()?.b();
        let mut out = self.polygon_integrals()?;
        for kind in [SegmentKind::Upper, SegmentKind::Lower] {
            if kind == SegmentKind::Lower && self.s.is_none() {
                continue;
            }
            for seg in self.level_segments(kind)? {
                let area = 2.0 / 3.0 * seg.chord * seg.offset;
                let w = seg.mid.weighted(b);
                for k in 0..N_SURFACE {
                    out[k] += area * w[k];
                }
            }
        }
        Ok(out)
    }
}

/// A chord of a level loop and the level curve over it.
#[derive(Debug, Clone)]
pub struct LevelSegment {
    pub start: usize,
    pub end: usize,
    /// Signed distance, in chart units, from the chord midpoint to the
    /// level curve along the outward chord normal.
    pub offset: f64,
    pub chord: f64,
    pub mid: PointData,
}

/// Solve `r(p + sigma n) = level` for `sigma` near 0 by secant steps.
pub(crate) fn project_along(imm: &ParamImmersion, p: [f64; 2], n: [f64; 2], level: f64, scale: f64) -> f64 {
    let f = |s: f64| r_at(imm, [p[0] + s * n[0], p[1] + s * n[1]]) - level;
    let (mut s0, mut f0) = (0.0, f(0.0));
    let mut s1 = 1e-3 * scale.max(1e-9);
    let mut f1 = f(s1);
    for _ in 0..50 {
        if f1 == f0 || !f1.is_finite() {
            break;
        }
        let s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
        s0 = s1;
        f0 = f1;
        s1 = s2;
        f1 = f(s1);
        if f1.abs() < 1e-14 * (1.0 + level.abs()) || (s1 - s0).abs() < 1e-16 * (1.0 + p[0].abs() + p[1].abs()) {
            break;
        }
    }
    if f1.is_finite() {
        s1
    } else {
        0.0
    }
}

/// `(chi, g, c)` from `V - E + F` and the boundary loops.
pub fn euler_data(ball: &ExtrinsicBall) -> Result<EulerData> {
    let mut edges: Vec<(usize, usize)> = ball
        .polygons
        .iter()
        .flat_map(|p| {
            let n = p.nodes.len();
            (0..n).map(move |i| {
                let (a, b) = (p.nodes[i], p.nodes[(i + 1) % n]);
                (a.min(b), a.max(b))
            })
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let chi = ball.nodes.len() as i64 - edges.len() as i64 + ball.polygons.len() as i64;
    let c = ball.boundary_loops.len() as i64;
    let twice_g = 2 - chi - c;
    if twice_g < 0 || twice_g % 2 != 0 {
        return Err(GeomError::Topology(format!("chi = {chi}, c = {c} give non-integral genus")));
    }
    Ok(EulerData { chi, genus: twice_g / 2, boundary_components: c })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::extrinsic_analysis::complex::{annulus_fixture, disc_fixture, torus_with_hole_fixture, two_lobe_fixture};
    use crate::extrinsic_analysis::patch::{triangulate, SurfaceIntegrand};
    use crate::extrinsic_analysis::testkit;
    use crate::immersed_surface::{PoleSpec, SurfaceKind};

    fn combinatorial(c: crate::extrinsic_analysis::Complex) -> TriangulatedPatch {
        TriangulatedPatch::from_complex(c).unwrap()
    }

    fn loop_area(ball: &ExtrinsicBall, l: &BoundaryLoop) -> f64 {
        let n = l.len();
        (0..n)
            .map(|i| {
                let (p, q) = (ball.nodes[l.nodes[i]].param, ball.nodes[l.nodes[(i + 1) % n]].param);
                0.5 * (p[0] * q[1] - p[1] * q[0])
            })
            .sum()
    }

    #[test]
    fn level_through_vertices() {
        // rings sit at rho = i/10; take t exactly at a vertex of ring 10
        let patch = triangulate(&testkit::immersion(SurfaceKind::TotallyGeodesic, PoleSpec::SurfaceCenter, 61)).unwrap();
        let t = patch.complex.r[1 + 9 * 61];
        assert!((t - 1.0).abs() < 1e-12);
        let ball = extract_ball(&patch, t).unwrap();
        assert_eq!(ball.euler_data().unwrap(), EulerData { chi: 1, genus: 0, boundary_components: 1 });
        let v = ball.surface_integrals().unwrap()[SurfaceIntegrand::Area.index()];
        let exact = 2.0 * std::f64::consts::PI * (1.0f64.cosh() - 1.0);
        assert!((v - exact).abs() < 1e-2 * exact, "{v}");
        let nudged = extract_ball(&patch, t + 1e-7).unwrap();
        let w = nudged.surface_integrals().unwrap()[SurfaceIntegrand::Area.index()];
        assert!((v - w).abs() < 1e-5, "{v} {w}");
    }

    #[test]
    fn off_vertex_keeps_membership() {
        let r = [0.0, 0.5, 1.0, 1.0 - 1e-12];
        let l = off_vertex(&r, 1.0);
        assert!(l < 1.0 && l > 1.0 - 1e-12);
        assert_eq!(off_vertex(&r, 0.7), 0.7);
    }

    #[test]
    fn fixture_topology() {
        for (c, want) in [
            (disc_fixture(), (1, 0, 1)),
            (annulus_fixture(), (0, 0, 2)),
            (torus_with_hole_fixture(), (-1, 1, 1)),
        ] {
            let p = combinatorial(c);
            let e = extract_ball(&p, 1e9).unwrap().euler_data().unwrap();
            assert_eq!((e.chi, e.genus, e.boundary_components), want);
        }
    }

    #[test]
    fn ball_above_max_r_is_the_whole_patch() {
        let p = testkit::disc();
        let ball = extract_ball(p, 100.0).unwrap();
        assert!(ball.polygons.iter().all(|q| q.full));
        assert_eq!(ball.polygons.len(), p.triangle_count());
        assert!(ball.boundary_loops.iter().all(|l| l.is_level(SegmentKind::Chart)));
        assert!(ball.touches_chart_boundary());
    }

    #[test]
    fn empty_sublevel_is_an_error() {
        let p = testkit::equidistant();
        assert!(matches!(extract_ball(p, 0.2), Err(GeomError::EmptyBall(_))));
    }

    #[test]
    fn nodes_respect_the_level() {
        let p = testkit::graph();
        let ball = extract_ball(p, 2.0).unwrap();
        let imm = p.immersion.as_ref().unwrap();
        for n in &ball.nodes {
            match n.id {
                NodeId::Mesh(_) => assert!(n.r < 2.0),
                NodeId::Cross { .. } => assert!((r_at(imm, n.param) - 2.0).abs() < 1e-10),
            }
        }
    }

    #[test]
    fn loops_wind_with_the_region_on_the_left() {
        let p = testkit::disc();
        let ball = extract_ball(p, 2.0).unwrap();
        assert_eq!(ball.boundary_loops.len(), 1);
        assert!(loop_area(&ball, &ball.boundary_loops[0]) > 0.0);
        let ring = extract_region(p, Some(1.0), 2.0).unwrap();
        let mut signs: Vec<bool> = ring.boundary_loops.iter().map(|l| loop_area(&ring, l) > 0.0).collect();
        signs.sort();
        assert_eq!(signs, vec![false, true]);
        let e = ring.euler_data().unwrap();
        assert_eq!((e.chi, e.boundary_components), (0, 2));
    }

    #[test]
    fn two_lobes_select_the_pole_component() {
        let p = combinatorial(two_lobe_fixture());
        let ball = extract_ball(&p, 0.5).unwrap();
        assert_eq!(ball.component_count, 2);
        assert!(ball.nodes.iter().all(|n| n.param[0] < 0.0));
        let counts: Vec<i64> = [0.5, 2.0, 2.6]
            .iter()
            .map(|&t| extract_ball(&p, t).unwrap().euler_data().unwrap().boundary_components)
            .collect();
        assert_eq!(counts, vec![1, 2, 1]);
    }

    #[test]
    fn geodesic_disc_at_one() {
        let p = testkit::disc();
        let ball = extract_ball(p, 1.0).unwrap();
        let v = ball.surface_integrals().unwrap()[SurfaceIntegrand::Area.index()];
        let exact = 2.0 * std::f64::consts::PI * (1f64.cosh() - 1.0);
        assert!((v / exact - 1.0).abs() < 1e-5, "{v}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn euler_relation_holds(t in 0.05f64..4.0) {
            for c in [disc_fixture(), annulus_fixture(), torus_with_hole_fixture(), two_lobe_fixture()] {
                let p = combinatorial(c);
                if let Ok(ball) = extract_ball(&p, t) {
                    let e = ball.euler_data().unwrap();
                    prop_assert_eq!(e.chi, 2 - 2 * e.genus - e.boundary_components);
                    prop_assert!(e.genus >= 0 && e.chi <= 1);
                }
            }
        }

        #[test]
        fn area_grows_with_t(t in 0.2f64..5.5, dt in 1e-3f64..0.5) {
            let p = testkit::graph();
            let a = extract_ball(p, t).unwrap().surface_integrals().unwrap()[0];
            let b = extract_ball(p, t + dt).unwrap().surface_integrals().unwrap()[0];
            prop_assert!(b > a && a > 0.0);
        }
    }
}
