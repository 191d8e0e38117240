use serde::Serialize;

use super::chart::ParamImmersion;
use super::lorentz::{geodesic_distance_raw, radial_gradient_raw, AmbientPoint, MinkowskiVector};
use crate::error::{GeomError, Result};

/// Largest codimension supported (`n <= 7`).
const MAX_NORMALS: usize = 5;

/// Radial data at a point off the pole.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RadialFrame {
    pub grad_n: MinkowskiVector,
    pub grad_s: MinkowskiVector,
    pub grad_perp: MinkowskiVector,
    /// Chart components `g^{ij} <grad_n, X_j>` of `grad_s`.
    pub grad_s_chart: [f64; 2],
    pub grad_s_norm: f64,
    pub grad_perp_norm: f64,
}

/// Pointwise geometry of a surface at one chart point.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceJet {
    pub param: [f64; 2],
    pub x: AmbientPoint,
    /// `X_u, X_v`.
    pub tangent_basis: [MinkowskiVector; 2],
    /// Flat second derivatives `X_uu, X_uv, X_vv`.
    pub second: [MinkowskiVector; 3],
    pub g: [[f64; 2]; 2],
    pub g_inv: [[f64; 2]; 2],
    pub det_g: f64,
    normals: [MinkowskiVector; MAX_NORMALS],
    /// Coefficients `(h_uu, h_uv, h_vv)` per normal.
    coeffs: [[f64; 3]; MAX_NORMALS],
    codim: usize,
    /// `H = (1/2) tr A`.
    pub mean_curvature: MinkowskiVector,
    pub norm_a2: f64,
    pub norm_h: f64,
    /// Gaussian curvature from the Gauss equation.
    pub k_s: f64,
    /// `Gamma^k_ij` indexed `[k][i][j]`.
    pub christoffel: [[[f64; 2]; 2]; 2],
    pub r: f64,
    /// `None` at the pole, where the radial gradient is undefined.
    pub radial: Option<RadialFrame>,
}

impl SurfaceJet {
    pub fn normals(&self) -> &[MinkowskiVector] {
        &self.normals[..self.codim]
    }

    /// Second fundamental form coefficients for normal `alpha`.
    pub fn coefficients(&self, alpha: usize) -> [f64; 3] {
        self.coeffs[alpha]
    }

    /// `A(d, e)` for chart vectors `d`, `e`.
    pub fn second_fundamental(&self, d: [f64; 2], e: [f64; 2]) -> MinkowskiVector {
        let mut out = MinkowskiVector::zero(self.x.vector().dim());
        for (n, h) in self.normals().iter().zip(&self.coeffs) {
            let c = h[0] * d[0] * e[0] + h[1] * (d[0] * e[1] + d[1] * e[0]) + h[2] * d[1] * e[1];
            out = out.axpy(c, n);
        }
        out
    }

    /// Push a chart vector forward: `d^i X_i`.
    pub fn push(&self, d: [f64; 2]) -> MinkowskiVector {
        self.tangent_basis[0].scale(d[0]).axpy(d[1], &self.tangent_basis[1])
    }

    /// Squared length of a chart vector.
    pub fn sq_len(&self, d: [f64; 2]) -> f64 {
        self.g[0][0] * d[0] * d[0] + 2.0 * self.g[0][1] * d[0] * d[1] + self.g[1][1] * d[1] * d[1]
    }

    /// Rotation by +90 degrees in the tangent plane, in chart components,
    /// for the orientation given by the chart order.
    pub fn rotate(&self, d: [f64; 2]) -> [f64; 2] {
        let lower = [
            self.g[0][0] * d[0] + self.g[0][1] * d[1],
            self.g[1][0] * d[0] + self.g[1][1] * d[1],
        ];
        let s = 1.0 / self.det_g.sqrt();
        [-s * lower[1], s * lower[0]]
    }

    /// `<A(nu, nu), grad_perp r>` with `nu = grad_S r / |grad_S r|`, zero at
    /// the pole (its limit on a surface through the pole).
    pub fn a_nu_perp(&self) -> f64 {
        match &self.radial {
            Some(f) if f.grad_s_norm > 0.0 => {
                let nu = [f.grad_s_chart[0] / f.grad_s_norm, f.grad_s_chart[1] / f.grad_s_norm];
                self.second_fundamental(nu, nu).dot(&f.grad_perp)
            }
            _ => 0.0,
        }
    }

    pub fn grad_perp_norm(&self) -> f64 {
        self.radial.map_or(0.0, |f| f.grad_perp_norm)
    }

    pub fn grad_s_norm(&self) -> f64 {
        self.radial.map_or(1.0, |f| f.grad_s_norm)
    }
}

/// Values and fourth-order derivatives of a vector map on a 5-point cross
/// plus diagonals.
pub(crate) struct Stencil<T> {
    pub f: T,
    pub du: T,
    pub dv: T,
    pub duu: T,
    pub duv: T,
    pub dvv: T,
}

pub(crate) trait Linear: Copy {
    fn lin(terms: &[(f64, Self)]) -> Self;
}

impl Linear for f64 {
    fn lin(terms: &[(f64, Self)]) -> Self {
        terms.iter().map(|(c, x)| c * x).sum()
    }
}

impl Linear for MinkowskiVector {
    fn lin(terms: &[(f64, Self)]) -> Self {
        let mut out = MinkowskiVector::zero(terms[0].1.dim());
        for (c, x) in terms {
            out = out.axpy(*c, x);
        }
        out
    }
}

pub(crate) fn stencil<T: Linear>(f: impl Fn(f64, f64) -> T, p: [f64; 2], s: f64) -> Stencil<T> {
    let [u, v] = p;
    let f0 = f(u, v);
    let (up1, um1, up2, um2) = (f(u + s, v), f(u - s, v), f(u + 2.0 * s, v), f(u - 2.0 * s, v));
    let (vp1, vm1, vp2, vm2) = (f(u, v + s), f(u, v - s), f(u, v + 2.0 * s), f(u, v - 2.0 * s));
    let d1 = 1.0 / (12.0 * s);
    let d2 = 1.0 / (12.0 * s * s);
    let du = T::lin(&[(-d1, up2), (8.0 * d1, up1), (-8.0 * d1, um1), (d1, um2)]);
    let dv = T::lin(&[(-d1, vp2), (8.0 * d1, vp1), (-8.0 * d1, vm1), (d1, vm2)]);
    let duu = T::lin(&[(-d2, up2), (16.0 * d2, up1), (-30.0 * d2, f0), (16.0 * d2, um1), (-d2, um2)]);
    let dvv = T::lin(&[(-d2, vp2), (16.0 * d2, vp1), (-30.0 * d2, f0), (16.0 * d2, vm1), (-d2, vm2)]);
    // Richardson on the 4-point mixed difference: (4 D(s) - D(2s)) / 3.
    let m1 = 4.0 / (3.0 * 4.0 * s * s);
    let m2 = -1.0 / (3.0 * 16.0 * s * s);
    let duv = T::lin(&[
        (m1, f(u + s, v + s)),
        (-m1, f(u + s, v - s)),
        (-m1, f(u - s, v + s)),
        (m1, f(u - s, v - s)),
        (m2, f(u + 2.0 * s, v + 2.0 * s)),
        (-m2, f(u + 2.0 * s, v - 2.0 * s)),
        (-m2, f(u - 2.0 * s, v + 2.0 * s)),
        (m2, f(u - 2.0 * s, v - 2.0 * s)),
    ]);
    Stencil { f: f0, du, dv, duu, duv, dvv }
}

fn inverse(g: [[f64; 2]; 2]) -> ([[f64; 2]; 2], f64) {
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    ([[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]], det)
}

fn det4(m: [[f64; 4]; 4]) -> f64 {
    let mut a = m;
    let mut det = 1.0;
    for c in 0..4 {
        let p = (c..4).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..4 {
            let f = a[r][c] / a[c][c];
            for k in c..4 {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

/// Jet at grid node `(i, j)`.
pub fn jet_at(imm: &ParamImmersion, node: (usize, usize)) -> Result<SurfaceJet> {
    jet_at_param(imm, imm.grid.node(node.0, node.1))
}

/// Jet at an arbitrary chart point, from fourth-order differences of the
/// chart with step `imm.fd_step`.
pub fn jet_at_param(imm: &ParamImmersion, p: [f64; 2]) -> Result<SurfaceJet> {
    let b = imm.b();
    let st = stencil(|u, v| imm.chart(u, v), p, imm.fd_step);
    let x = st.f;
    let xu = st.du;
    let xv = st.dv;
    let g = [[xu.dot(&xu), xu.dot(&xv)], [xu.dot(&xv), xv.dot(&xv)]];
    let (g_inv, det_g) = inverse(g);
    if !(det_g > 1e-10) || !det_g.is_finite() {
        return Err(GeomError::DegenerateImmersion { u: p[0], v: p[1], det: det_g });
    }
    let point = AmbientPoint::new(x, b)?;
    let second = [st.duu, st.duv, st.dvv];
    let dim = x.dim();
    let codim = dim - 3;

    // Orthonormal frame of the normal space of S inside T_x H^n.
    let project = |w: MinkowskiVector, normals: &[MinkowskiVector]| {
        let mut w = w.axpy(-b * w.dot(&x), &x);
        let a = [w.dot(&xu), w.dot(&xv)];
        let c = [g_inv[0][0] * a[0] + g_inv[0][1] * a[1], g_inv[1][0] * a[0] + g_inv[1][1] * a[1]];
        w = w.axpy(-c[0], &xu).axpy(-c[1], &xv);
        for n in normals {
            w = w.axpy(-w.dot(n), n);
        }
        w
    };
    let mut normals = [MinkowskiVector::zero(dim); MAX_NORMALS];
    for a in 0..codim {
        let best = (1..dim)
            .map(|i| project(MinkowskiVector::basis(dim, i), &normals[..a]))
            .max_by(|p, q| p.norm().total_cmp(&q.norm()))
            .expect("spatial basis nonempty");
        // A second pass removes what rounding left of the earlier directions.
        let w = project(best, &normals[..a]);
        normals[a] = w.scale(1.0 / w.norm());
    }
    if codim == 1 {
        let rows = [x.coords(), xu.coords(), xv.coords(), normals[0].coords()];
        let mut m = [[0.0; 4]; 4];
        for (r, row) in rows.iter().enumerate() {
            m[r].copy_from_slice(&row[..4]);
        }
        if det4(m) < 0.0 {
            normals[0] = -normals[0];
        }
    }

    let mut coeffs = [[0.0; 3]; MAX_NORMALS];
    let mut mean_curvature = MinkowskiVector::zero(dim);
    let mut norm_a2 = 0.0;
    let mut gauss_extra = 0.0;
    for a in 0..codim {
        let n = normals[a];
        let h = [st.duu.dot(&n), st.duv.dot(&n), st.dvv.dot(&n)];
        coeffs[a] = h;
        let hm = [[h[0], h[1]], [h[1], h[2]]];
        let trace = g_inv[0][0] * h[0] + 2.0 * g_inv[0][1] * h[1] + g_inv[1][1] * h[2];
        mean_curvature = mean_curvature.axpy(0.5 * trace, &n);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        norm_a2 += g_inv[i][k] * g_inv[j][l] * hm[i][j] * hm[k][l];
                    }
                }
            }
        }
        gauss_extra += (h[0] * h[2] - h[1] * h[1]) / det_g;
    }
    let norm_h = mean_curvature.norm();

    let mut christoffel = [[[0.0; 2]; 2]; 2];
    let xij = [[st.duu, st.duv], [st.duv, st.dvv]];
    let tangents = [xu, xv];
    for i in 0..2 {
        for j in 0..2 {
            let lower = [xij[i][j].dot(&tangents[0]), xij[i][j].dot(&tangents[1])];
            for k in 0..2 {
                christoffel[k][i][j] = g_inv[k][0] * lower[0] + g_inv[k][1] * lower[1];
            }
        }
    }

    let o = imm.pole.vector();
    let r = geodesic_distance_raw(o, &x, b)?;
    let radial = match radial_gradient_raw(o, &x, b) {
        Ok(grad_n) => {
            let a = [grad_n.dot(&xu), grad_n.dot(&xv)];
            let c = [g_inv[0][0] * a[0] + g_inv[0][1] * a[1], g_inv[1][0] * a[0] + g_inv[1][1] * a[1]];
            let grad_s = xu.scale(c[0]).axpy(c[1], &xv);
            let grad_perp = grad_n - grad_s;
            // |grad_S r|^2 = c^i a_i is exact in chart components.
            let s2 = (c[0] * a[0] + c[1] * a[1]).clamp(0.0, 1.0);
            Some(RadialFrame {
                grad_n,
                grad_s,
                grad_perp,
                grad_s_chart: c,
                grad_s_norm: s2.sqrt(),
                grad_perp_norm: (1.0 - s2).max(0.0).sqrt(),
            })
        }
        Err(GeomError::PoleSingularity(_)) => None,
        Err(e) => return Err(e),
    };

    Ok(SurfaceJet {
        param: p,
        x: point,
        tangent_basis: tangents,
        second,
        g,
        g_inv,
        det_g,
        normals,
        coeffs,
        codim,
        mean_curvature,
        norm_a2,
        norm_h,
        k_s: b + gauss_extra,
        christoffel,
        r,
        radial,
    })
}

/// Gaussian curvature from the first fundamental form alone (Brioschi
/// formula), with metric derivatives from central differences of step
/// `1e-2 / sqrt(-b)`.
pub fn intrinsic_gaussian_curvature(imm: &ParamImmersion, p: [f64; 2]) -> Result<f64> {
    let s = imm.fd_step;
    let metric = |u: f64, v: f64| -> [f64; 3] {
        let c = |du: f64, dv: f64| imm.chart(u + du, v + dv);
        let d1 = 1.0 / (12.0 * s);
        let xu = MinkowskiVector::lin(&[(-d1, c(2.0 * s, 0.0)), (8.0 * d1, c(s, 0.0)), (-8.0 * d1, c(-s, 0.0)), (d1, c(-2.0 * s, 0.0))]);
        let xv = MinkowskiVector::lin(&[(-d1, c(0.0, 2.0 * s)), (8.0 * d1, c(0.0, s)), (-8.0 * d1, c(0.0, -s)), (d1, c(0.0, -2.0 * s))]);
        [xu.dot(&xu), xu.dot(&xv), xv.dot(&xv)]
    };
    let h = 1e-2 * imm.scale();
    let [u, v] = p;
    let m0 = metric(u, v);
    let (mup, mum, mvp, mvm) = (metric(u + h, v), metric(u - h, v), metric(u, v + h), metric(u, v - h));
    let (mpp, mpm, mmp, mmm) = (metric(u + h, v + h), metric(u + h, v - h), metric(u - h, v + h), metric(u - h, v - h));
    let du = |k: usize| (mup[k] - mum[k]) / (2.0 * h);
    let dv = |k: usize| (mvp[k] - mvm[k]) / (2.0 * h);
    let (e, f, g) = (m0[0], m0[1], m0[2]);
    let (eu, ev, fu, fv, gu, gv) = (du(0), dv(0), du(1), dv(1), du(2), dv(2));
    let evv = (mvp[0] - 2.0 * e + mvm[0]) / (h * h);
    let guu = (mup[2] - 2.0 * g + mum[2]) / (h * h);
    let fuv = (mpp[1] - mpm[1] - mmp[1] + mmm[1]) / (4.0 * h * h);
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let m1 = [
        [-0.5 * evv + fuv - 0.5 * guu, 0.5 * eu, fu - 0.5 * ev],
        [fv - 0.5 * gu, e, f],
        [0.5 * gv, f, g],
    ];
    let m2 = [[0.0, 0.5 * ev, 0.5 * gu], [0.5 * ev, e, f], [0.5 * gu, f, g]];
    let w = e * g - f * f;
    if !(w > 1e-10) {
        return Err(GeomError::DegenerateImmersion { u, v, det: w });
    }
    Ok((det3(m1) - det3(m2)) / (w * w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersed_surface::chart::{DecayProfile, GridSpec, PoleSpec, SurfaceKind};
    use crate::model_space::HyperbolicAmbient;
    use proptest::prelude::*;

    fn surface(b: f64, kind: SurfaceKind, radius: f64) -> ParamImmersion {
        let amb = HyperbolicAmbient::new(b, 3).unwrap();
        ParamImmersion::new(amb, kind, GridSpec::polar(radius, 32, 32), PoleSpec::SurfaceCenter).unwrap()
    }

    fn graph(amplitude: f64) -> SurfaceKind {
        SurfaceKind::Graph { amplitude, profile: DecayProfile::Sech { rate: 2.0 }, modulation: 0.3, frequency: 2 }
    }

    #[test]
    fn totally_geodesic_is_flat_in_normal_directions() {
        let imm = surface(-1.0, SurfaceKind::TotallyGeodesic, 6.0);
        for i in 1..31 {
            let jet = jet_at(&imm, (i, 5 * i % 32)).unwrap();
            assert!(jet.norm_a2.sqrt() < 1e-5 && jet.norm_h < 1e-5);
            assert!((jet.k_s + 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn equidistant_is_umbilic() {
        let a: f64 = 0.5;
        let imm = surface(-1.0, SurfaceKind::Equidistant { distance: a }, 6.0);
        for p in [[0.0, 0.0], [1.0, 2.0], [-3.0, 4.0]] {
            let jet = jet_at_param(&imm, p).unwrap();
            assert!((jet.norm_h - a.tanh()).abs() < 1e-4, "{}", jet.norm_h);
            assert!((jet.k_s + 1.0 / a.cosh().powi(2)).abs() < 1e-4, "{}", jet.k_s);
            assert!((jet.norm_a2 - 2.0 * a.tanh().powi(2)).abs() < 1e-4);
        }
    }

    #[test]
    fn jet_identities_on_graph() {
        let imm = surface(-1.0, graph(0.1), 6.0);
        for i in 0..32 {
            let j = (7 * i) % 32;
            let jet = jet_at(&imm, (i, j)).unwrap();
            let gauss = jet.k_s - imm.b() + 0.5 * (jet.norm_a2 - 4.0 * jet.norm_h.powi(2));
            assert!(gauss.abs() < 1e-4);
            assert!(jet.norm_a2 + 1e-12 >= 2.0 * jet.norm_h.powi(2));
            let brioschi = intrinsic_gaussian_curvature(&imm, jet.param).unwrap();
            assert!((brioschi - jet.k_s).abs() < 1e-3, "{brioschi} vs {}", jet.k_s);
            if let Some(f) = jet.radial {
                assert!((f.grad_n.norm() - 1.0).abs() < 1e-6);
                assert!((f.grad_s_norm.powi(2) + f.grad_perp_norm.powi(2) - 1.0).abs() < 1e-6);
                let sum = f.grad_s + f.grad_perp - f.grad_n;
                assert!(sum.coords().iter().all(|c| c.abs() < 1e-9 * jet.x.vector().get(0)));
                assert!((f.grad_perp.norm() - f.grad_perp_norm).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn higher_codimension_matches_hypersurface() {
        let amb = HyperbolicAmbient::new(-1.0, 5).unwrap();
        let imm5 = ParamImmersion::new(amb, graph(0.1), GridSpec::polar(4.0, 8, 8), PoleSpec::SurfaceCenter).unwrap();
        let imm3 = surface(-1.0, graph(0.1), 4.0);
        let p = [0.4, -0.3];
        let (a, b) = (jet_at_param(&imm5, p).unwrap(), jet_at_param(&imm3, p).unwrap());
        assert_eq!(a.normals().len(), 3);
        assert!((a.norm_h - b.norm_h).abs() < 1e-9);
        assert!((a.k_s - b.k_s).abs() < 1e-9);
    }

    #[test]
    fn flipping_orientation_keeps_mean_curvature_vector() {
        let imm = surface(-1.0, graph(0.1), 6.0);
        let p = [0.7, 0.2];
        let a = jet_at_param(&imm, p).unwrap();
        let b = jet_at_param(&imm.flipped(), [p[1], p[0]]).unwrap();
        assert!((a.normals()[0] + b.normals()[0]).norm() < 1e-9);
        assert!((a.mean_curvature - b.mean_curvature).coords().iter().all(|c| c.abs() < 1e-9));
    }

    #[test]
    fn scaling_coherence() {
        let k = 2.0;
        for kind in [SurfaceKind::Equidistant { distance: 0.4 }, graph(0.1)] {
            let half = match kind {
                SurfaceKind::Equidistant { distance } => SurfaceKind::Equidistant { distance: distance / k },
                SurfaceKind::Graph { amplitude, profile, modulation, frequency } => {
                    SurfaceKind::Graph { amplitude: amplitude / k, profile, modulation, frequency }
                }
                other => other,
            };
            let unit = surface(-1.0, kind, 6.0);
            let scaled = surface(-k * k, half, 3.0);
            for p in [[0.3, 0.1], [1.5, -2.0]] {
                let a = jet_at_param(&unit, p).unwrap();
                let b = jet_at_param(&scaled, [p[0] / k, p[1] / k]).unwrap();
                assert!((b.r * k - a.r).abs() < 1e-4);
                assert!((b.k_s - k * k * a.k_s).abs() < 1e-4 * k * k, "{} {}", b.k_s, a.k_s);
                assert!((b.norm_a2 - k * k * a.norm_a2).abs() < 1e-4 * k * k);
                assert!((b.norm_h - k * a.norm_h).abs() < 1e-4 * k);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn jet_invariants_hold_anywhere(u in -4.0f64..4.0, v in -4.0f64..4.0, amp in 0.0f64..0.2, dist in -0.8f64..0.8) {
            for kind in [graph(amp), SurfaceKind::Equidistant { distance: dist }] {
                let imm = surface(-1.0, kind, 6.0);
                let jet = jet_at_param(&imm, [u, v]).unwrap();
                let gauss = jet.k_s - imm.b() + 0.5 * (jet.norm_a2 - 4.0 * jet.norm_h.powi(2));
                prop_assert!(gauss.abs() < 1e-4);
                prop_assert!(jet.norm_a2 + 1e-12 >= 2.0 * jet.norm_h.powi(2));
                if let Some(f) = jet.radial {
                    prop_assert!((f.grad_s_norm.powi(2) + f.grad_perp_norm.powi(2) - 1.0).abs() < 1e-6);
                    prop_assert!((f.grad_n.norm() - 1.0).abs() < 1e-6);
                }
            }
        }
    }
}
