use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{GeomError, Result};

/// Format tag on the first line of a complex file.
pub const COMPLEX_FORMAT: &str = "complex v1";

/// A triangulated surface given combinatorially, with a chart position and
/// a radial value per vertex. Triangles are listed counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Complex {
    pub positions: Vec<[f64; 2]>,
    pub r: Vec<f64>,
    pub triangles: Vec<[usize; 3]>,
}

impl Complex {
    pub fn validate(&self) -> Result<()> {
        if self.positions.len() != self.r.len() {
            return Err(GeomError::InvalidInput("positions and r differ in length".into()));
        }
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= self.r.len()) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(GeomError::Topology(format!("bad triangle {i}: {t:?}")));
            }
        }
        if self.r.iter().any(|r| !r.is_finite()) {
            return Err(GeomError::InvalidInput("non-finite r value".into()));
        }
        Ok(())
    }

    /// Plain-text form: a `# <name> complex v1` header, then `v u v r` and
    /// `f i j k` lines.
    pub fn to_text(&self, name: &str) -> String {
        let mut s = format!("# {name} {COMPLEX_FORMAT}\n");
        for (p, r) in self.positions.iter().zip(&self.r) {
            writeln!(s, "v {:?} {:?} {:?}", p[0], p[1], r).unwrap();
        }
        for t in &self.triangles {
            writeln!(s, "f {} {} {}", t[0], t[1], t[2]).unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.starts_with('#') && h.trim_end().ends_with(COMPLEX_FORMAT) => {}
            _ => return Err(GeomError::Parse { line: 1, msg: format!("expected header ending in '{COMPLEX_FORMAT}'") }),
        }
        let mut c = Complex { positions: vec![], r: vec![], triangles: vec![] };
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| GeomError::Parse { line: i + 1, msg: msg.into() };
            let mut parts = line.split_whitespace();
            let tag = parts.next().unwrap();
            let rest: Vec<&str> = parts.collect();
            if rest.len() != 3 {
                return Err(err("expected three fields"));
            }
            match tag {
                "v" => {
                    let x: Vec<f64> = rest
                        .iter()
                        .map(|s| s.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| err("bad number"))?;
                    c.positions.push([x[0], x[1]]);
                    c.r.push(x[2]);
                }
                "f" => {
                    let x: Vec<usize> = rest
                        .iter()
                        .map(|s| s.parse::<usize>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| err("bad index"))?;
                    c.triangles.push([x[0], x[1], x[2]]);
                }
                _ => return Err(err("unknown record")),
            }
        }
        c.validate()?;
        Ok(c)
    }
}

/// Triangles of a polar grid whose ring `i` holds `nv` nodes at index
/// `offset + (i - 1) nv + j`, with node 0 the center when `center` is set.
pub(crate) fn polar_triangles(rings: usize, nv: usize, center: bool) -> Vec<[usize; 3]> {
    let base = usize::from(center);
    let idx = |i: usize, j: usize| base + i * nv + (j % nv);
    let mut t = Vec::with_capacity(2 * rings * nv);
    if center {
        for j in 0..nv {
            t.push([0, idx(0, j), idx(0, j + 1)]);
        }
    }
    for i in 0..rings.saturating_sub(1) {
        for j in 0..nv {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            t.push([a, b, c]);
            t.push([a, c, d]);
        }
    }
    t
}

/// Triangles of an `nu x nv` rectangular grid with node `(i, j)` at `i nv + j`.
pub(crate) fn rect_triangles(nu: usize, nv: usize) -> Vec<[usize; 3]> {
    let idx = |i: usize, j: usize| i * nv + j;
    let mut t = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu - 1 {
        for j in 0..nv - 1 {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            t.push([a, b, c]);
            t.push([a, c, d]);
        }
    }
    t
}

fn polar_complex(radius: f64, rings: usize, nv: usize, inner: Option<f64>, r: impl Fn(f64, f64) -> f64) -> Complex {
    let mut positions = vec![];
    let center = inner.is_none();
    if center {
        positions.push([0.0, 0.0]);
    }
    let r0 = inner.unwrap_or(0.0);
    let first = usize::from(center);
    for i in 0..rings {
        let rho = r0 + (radius - r0) * (i + first) as f64 / (rings - 1 + first) as f64;
        for j in 0..nv {
            let th = 2.0 * PI * j as f64 / nv as f64;
            positions.push([rho * th.cos(), rho * th.sin()]);
        }
    }
    let rs = positions.iter().map(|p| r(p[0], p[1])).collect();
    Complex { positions, r: rs, triangles: polar_triangles(rings, nv, center) }
}

/// Flat disc of radius 1 with `r = |p|`.
pub fn disc_fixture() -> Complex {
    polar_complex(1.0, 8, 16, None, |u, v| u.hypot(v))
}

/// Flat annulus `1 <= |p| <= 2` with `r = |p|`.
pub fn annulus_fixture() -> Complex {
    polar_complex(2.0, 6, 16, Some(1.0), |u, v| u.hypot(v))
}

/// A periodic `n x n` grid (a torus) with one cell removed. Positions are
/// the unwrapped grid coordinates; `r` grows away from the removed cell so
/// that small balls are discs.
pub fn torus_with_hole_fixture() -> Complex {
    let n = 6;
    let idx = |i: usize, j: usize| (i % n) * n + (j % n);
    let mut positions = vec![];
    let mut r = vec![];
    for i in 0..n {
        for j in 0..n {
            positions.push([i as f64, j as f64]);
            let di = (i as f64 - 3.0).abs();
            let dj = (j as f64 - 3.0).abs();
            r.push(di.hypot(dj));
        }
    }
    let mut triangles = vec![];
    for i in 0..n {
        for j in 0..n {
            if (i, j) == (0, 0) {
                continue;
            }
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    Complex { positions, r, triangles }
}

/// Radial function of the two-lobe fixture: a valley at `(-1, 0)`, a second,
/// shallower valley at `(1.4, 0)`, and a hill at `(-1, 1.2)`.
pub fn two_lobe_r(u: f64, v: f64) -> f64 {
    let main = (u + 1.0).hypot(v);
    let side = (u - 1.4).hypot(v) + 0.2;
    let hill = 1.2 * (-((u + 1.0).powi(2) + (v - 1.2).powi(2)) / 0.09).exp();
    main.min(side) + hill
}

/// Rectangle `[-3.6, 4] x [-2.8, 2.8]` with [`two_lobe_r`]. Its sublevel
/// sets have two components below the saddle between the valleys, and the
/// pole component surrounds the hill (two boundary loops) for `t` between
/// the hill's rim and top.
pub fn two_lobe_fixture() -> Complex {
    let (nu, nv) = (77, 57);
    let mut positions = vec![];
    for i in 0..nu {
        for j in 0..nv {
            positions.push([-3.6 + 7.6 * i as f64 / (nu - 1) as f64, -2.8 + 5.6 * j as f64 / (nv - 1) as f64]);
        }
    }
    let r = positions.iter().map(|p| two_lobe_r(p[0], p[1])).collect();
    Complex { positions, r, triangles: rect_triangles(nu, nv) }
}

/// Names accepted by [`fixture`].
pub const FIXTURE_NAMES: [&str; 4] = ["disc", "annulus", "torus_with_hole", "two_lobe"];

pub fn fixture(name: &str) -> Option<Complex> {
    match name {
        "disc" => Some(disc_fixture()),
        "annulus" => Some(annulus_fixture()),
        "torus_with_hole" => Some(torus_with_hole_fixture()),
        "two_lobe" => Some(two_lobe_fixture()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for name in FIXTURE_NAMES {
            let c = fixture(name).unwrap();
            c.validate().unwrap();
            assert_eq!(Complex::parse(&c.to_text(name)).unwrap(), c);
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Complex::parse("v 0 0 0"), Err(GeomError::Parse { line: 1, .. })));
        let bad = format!("# x {COMPLEX_FORMAT}\nv 0 0\n");
        assert!(matches!(Complex::parse(&bad), Err(GeomError::Parse { line: 2, .. })));
        let dangling = format!("# x {COMPLEX_FORMAT}\nv 0 0 0\nf 0 1 2\n");
        assert!(matches!(Complex::parse(&dangling), Err(GeomError::Topology(_))));
    }

    #[test]
    fn brute_force_euler_counts() {
        // V - E + F straight from the triangle list.
        let chi = |c: &Complex| {
            let mut e: Vec<(usize, usize)> = c
                .triangles
                .iter()
                .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect();
            e.sort_unstable();
            e.dedup();
            c.positions.len() as i64 - e.len() as i64 + c.triangles.len() as i64
        };
        assert_eq!(chi(&disc_fixture()), 1);
        assert_eq!(chi(&annulus_fixture()), 0);
        assert_eq!(chi(&torus_with_hole_fixture()), -1);
    }
}
