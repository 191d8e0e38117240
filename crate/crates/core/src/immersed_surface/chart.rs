use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::lorentz::{AmbientPoint, MinkowskiVector};
use crate::error::{GeomError, Result};
use crate::model_space::HyperbolicAmbient;

/// Radial decay of the height function of a graph surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum DecayProfile {
    /// `sech(rate k rho)`.
    Sech { rate: f64 },
    /// `exp(-(rho/width)^2)`.
    Gaussian { width: f64 },
}

impl DecayProfile {
    fn eval(&self, kappa: f64, rho: f64) -> f64 {
        match *self {
            DecayProfile::Sech { rate } => 1.0 / (rate * kappa * rho).cosh(),
            DecayProfile::Gaussian { width } => (-(rho / width).powi(2)).exp(),
        }
    }
}

/// Built-in surfaces. All are normal graphs over the totally geodesic plane
/// `{x3 = 0}` of the hyperboloid: the point at signed distance `a(p)` along
/// the normal geodesic through the plane point with exponential
/// coordinates `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SurfaceKind {
    TotallyGeodesic,
    Equidistant { distance: f64 },
    /// Height `amplitude * profile(rho) * (1 + modulation * Re(z^frequency) / (1 + |z|^2)^{frequency/2})`
    /// with `z = k (u + iv)`.
    Graph {
        amplitude: f64,
        #[serde(flatten)]
        profile: DecayProfile,
        #[serde(default)]
        modulation: f64,
        #[serde(default)]
        frequency: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "snake_case")]
pub enum GridLayout {
    /// Nodes `rho_i = radius i/(nu - 1)`, `theta_j = 2 pi j / nv`; the
    /// angular direction is periodic and all `i = 0` nodes are the center.
    Polar { radius: f64 },
    /// Nodes on `[-u_max, u_max] x [-v_max, v_max]`.
    Rect { u_max: f64, v_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(flatten)]
    pub layout: GridLayout,
    pub nu: usize,
    pub nv: usize,
}

impl GridSpec {
    pub fn polar(radius: f64, nu: usize, nv: usize) -> Self {
        Self { layout: GridLayout::Polar { radius }, nu, nv }
    }

    pub fn rect(u_max: f64, v_max: f64, nu: usize, nv: usize) -> Self {
        Self { layout: GridLayout::Rect { u_max, v_max }, nu, nv }
    }

    /// Chart coordinates of grid node `(i, j)`.
    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        match self.layout {
            GridLayout::Polar { radius } => {
                let rho = radius * i as f64 / (self.nu - 1) as f64;
                let theta = 2.0 * PI * j as f64 / self.nv as f64;
                [rho * theta.cos(), rho * theta.sin()]
            }
            GridLayout::Rect { u_max, v_max } => [
                -u_max + 2.0 * u_max * i as f64 / (self.nu - 1) as f64,
                -v_max + 2.0 * v_max * j as f64 / (self.nv - 1) as f64,
            ],
        }
    }

    pub fn is_polar(&self) -> bool {
        matches!(self.layout, GridLayout::Polar { .. })
    }

    /// Node on the outer edge of the chart.
    pub fn is_boundary_node(&self, i: usize, j: usize) -> bool {
        match self.layout {
            GridLayout::Polar { .. } => i + 1 == self.nu,
            GridLayout::Rect { .. } => i == 0 || j == 0 || i + 1 == self.nu || j + 1 == self.nv,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self.layout {
            GridLayout::Polar { radius } => radius > 0.0 && self.nu >= 2 && self.nv >= 3,
            GridLayout::Rect { u_max, v_max } => u_max > 0.0 && v_max > 0.0 && self.nu >= 2 && self.nv >= 2,
        };
        if ok {
            Ok(())
        } else {
            Err(GeomError::InvalidInput(format!("bad grid {self:?}")))
        }
    }
}

/// Where the pole sits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleSpec {
    /// The image of the chart center.
    SurfaceCenter,
    /// The center of the core plane `{x3 = 0}`, i.e. the hyperboloid vertex.
    CoreCenter,
    Coords(Vec<f64>),
}

/// `sinh(x)/x`, exact at 0.
fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// A parametric surface in the hyperboloid model of `H^n(b)`, described
/// in exponential coordinates `(u, v)` of the core plane.
#[derive(Debug, Clone)]
pub struct ParamImmersion {
    pub ambient: HyperbolicAmbient,
    pub kind: SurfaceKind,
    pub grid: GridSpec,
    pub pole: AmbientPoint,
    /// Step of the finite-difference stencils, in chart units.
    pub fd_step: f64,
    /// Swap the chart coordinates, which reverses the orientation.
    pub swapped: bool,
}

impl ParamImmersion {
    /// Default `fd_step` is `1e-3 / sqrt(-b)`; the stencils are fourth order.
    pub fn new(ambient: HyperbolicAmbient, kind: SurfaceKind, grid: GridSpec, pole: PoleSpec) -> Result<Self> {
        grid.validate()?;
        let mut imm = Self {
            ambient,
            kind,
            grid,
            pole: AmbientPoint::origin(ambient.b, ambient.n),
            fd_step: 1e-3 / ambient.kappa(),
            swapped: false,
        };
        imm.pole = match pole {
            PoleSpec::SurfaceCenter => imm.point(0.0, 0.0)?,
            PoleSpec::CoreCenter => AmbientPoint::origin(ambient.b, ambient.n),
            PoleSpec::Coords(c) => {
                if c.len() != ambient.n + 1 {
                    return Err(GeomError::InvalidInput(format!(
                        "pole needs {} coordinates, got {}",
                        ambient.n + 1,
                        c.len()
                    )));
                }
                AmbientPoint::new(MinkowskiVector::from_slice(&c), ambient.b)?
            }
        };
        Ok(imm)
    }

    /// Same surface with the chart coordinates swapped (opposite orientation).
    pub fn flipped(&self) -> Self {
        let mut f = self.clone();
        f.swapped = !f.swapped;
        f
    }

    pub fn b(&self) -> f64 {
        self.ambient.b
    }

    pub fn kappa(&self) -> f64 {
        self.ambient.kappa()
    }

    /// Natural length unit `1/sqrt(-b)`.
    pub fn scale(&self) -> f64 {
        1.0 / self.kappa()
    }

    /// Signed height over the core plane at chart point `(u, v)`.
    pub fn height(&self, u: f64, v: f64) -> f64 {
        match self.kind {
            SurfaceKind::TotallyGeodesic => 0.0,
            SurfaceKind::Equidistant { distance } => distance,
            SurfaceKind::Graph { amplitude, profile, modulation, frequency } => {
                let k = self.kappa();
                let base = profile.eval(k, (u * u + v * v).sqrt());
                let (u, v) = (k * u, k * v);
                let rho2 = u * u + v * v;
                let wave = if modulation != 0.0 && frequency > 0 {
                    let (mut re, mut im) = (1.0, 0.0);
                    for _ in 0..frequency {
                        let nre = re * u - im * v;
                        im = re * v + im * u;
                        re = nre;
                    }
                    modulation * re / (1.0 + rho2).powf(0.5 * frequency as f64)
                } else {
                    0.0
                };
                amplitude * base * (1.0 + wave)
            }
        }
    }

    /// Chart map without the constraint check.
    pub fn chart(&self, u: f64, v: f64) -> MinkowskiVector {
        let (u, v) = if self.swapped { (v, u) } else { (u, v) };
        let k = self.kappa();
        let rho = (u * u + v * v).sqrt();
        let s = sinhc(k * rho);
        let a = self.height(u, v);
        let (ca, sa) = ((k * a).cosh(), (k * a).sinh());
        let mut x = MinkowskiVector::zero(self.ambient.n + 1);
        x.set(0, ca * (k * rho).cosh() / k);
        x.set(1, ca * s * u);
        x.set(2, ca * s * v);
        x.set(3, sa / k);
        x
    }

    pub fn point(&self, u: f64, v: f64) -> Result<AmbientPoint> {
        AmbientPoint::new(self.chart(u, v), self.ambient.b)
    }
}
