//! Surfaces in the hyperboloid model of `H^n(b)`: distances, radial
//! gradients, finite-difference jets and pointwise comparison checks.
//!
//! Sign convention: `H = (1/2) tr A` with the normal frame oriented by the
//! chart order `(u, v)`; for `n = 3` the frame `(x, X_u, X_v, N)` is
//! positively oriented in Minkowski space.

mod chart;
mod checks;
mod jet;
mod lorentz;

pub use chart::{DecayProfile, GridLayout, GridSpec, ParamImmersion, PoleSpec, SurfaceKind};
pub use checks::{
    cosh_radial, fit_exponential_decay, laplacian_radial_check, laplacian_radial_check_at, radial_envelope,
    radial_envelope_from_samples, radial_mean_curvature, relative_margin, LaplacianCheck, ENVELOPE_NOISE_FLOOR,
};
pub use jet::{intrinsic_gaussian_curvature, jet_at, jet_at_param, RadialFrame, SurfaceJet};
pub use lorentz::{
    geodesic_distance, lorentz_inner, radial_gradient, tangential, AmbientPoint, MinkowskiVector,
};
