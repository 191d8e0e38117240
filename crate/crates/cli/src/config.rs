use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use isocomp::extrinsic_analysis::Tolerances;
use isocomp::immersed_surface::{GridSpec, PoleSpec, SurfaceKind};
use isocomp::model_space::MAX_AMBIENT_DIM;

use crate::error::{CliError, CliResult};
use crate::hspec::HSpec;

/// Suite ids accepted in `suites`.
pub const SUITES: [&str; 13] = [
    "laplacian",
    "geodesic_curvature",
    "gauss_bonnet",
    "coarea",
    "isoperimetric",
    "monotonicity",
    "annulus",
    "divergence_chain",
    "lemon",
    "cosh_integral",
    "chern_osserman",
    "huber",
    "integrability",
];

/// Suites that run once per (surface, space) pair; the rest run once per
/// surface.
pub fn needs_space(suite: &str) -> bool {
    matches!(suite, "isoperimetric" | "monotonicity" | "cosh_integral" | "chern_osserman")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ambient {
    pub b: f64,
    #[serde(default = "default_n")]
    pub n: usize,
}

fn default_n() -> usize {
    3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceEntry {
    pub name: String,
    pub h: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceEntry {
    pub name: String,
    pub kind: SurfaceKind,
    pub grid: GridSpec,
    #[serde(default = "default_pole")]
    pub pole: PoleSpec,
    /// Euler characteristic of the whole surface, when known.
    #[serde(default = "default_chi")]
    pub known_chi: Option<i64>,
}

fn default_pole() -> PoleSpec {
    PoleSpec::SurfaceCenter
}

fn default_chi() -> Option<i64> {
    Some(1)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TSamples {
    pub count: usize,
    pub max: f64,
}

/// A batch run, read from TOML.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub ambient: Ambient,
    #[serde(default)]
    pub spaces: Vec<SpaceEntry>,
    #[serde(default)]
    pub surfaces: Vec<SurfaceEntry>,
    #[serde(default)]
    pub suites: Vec<String>,
    pub t_samples: TSamples,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("isocomp-out")
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> CliResult<()> {
        let b = self.ambient.b;
        if !(b < 0.0 && b.is_finite()) {
            return Err(bad(format!("ambient.b must be negative, got {b}")));
        }
        if !(3..=MAX_AMBIENT_DIM).contains(&self.ambient.n) {
            return Err(bad(format!("ambient.n must be in 3..={MAX_AMBIENT_DIM}")));
        }
        if !(self.t_samples.max > 0.0 && self.t_samples.max.is_finite()) {
            return Err(bad("t_samples.max must be positive"));
        }
        if self.t_samples.count == 0 {
            return Err(bad("t_samples.count must be positive"));
        }
        let mut seen = BTreeSet::new();
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                return Err(bad(format!("unknown suite {s:?}; known: {}", SUITES.join(", "))));
            }
            if !seen.insert(s) {
                return Err(bad(format!("suite {s:?} listed twice")));
            }
        }
        unique(self.spaces.iter().map(|s| &s.name), "space")?;
        unique(self.surfaces.iter().map(|s| &s.name), "surface")?;
        for s in &self.spaces {
            s.h.parse::<HSpec>().map_err(|e| bad(format!("space {:?}: {e}", s.name)))?;
        }
        self.tolerances()?;
        Ok(())
    }

    pub fn h_specs(&self) -> Vec<(String, HSpec)> {
        self.spaces
            .iter()
            .map(|s| (s.name.clone(), s.h.parse().expect("validated")))
            .collect()
    }

    /// Defaults with the overrides of `tolerances` applied.
    pub fn tolerances(&self) -> CliResult<Tolerances> {
        let mut map = match serde_json::to_value(Tolerances::default()) {
            Ok(serde_json::Value::Object(m)) => m,
            _ => unreachable!("tolerances serialize to a map"),
        };
        for (k, v) in &self.tolerances {
            if !map.contains_key(k) {
                let known: Vec<&String> = map.keys().collect();
                return Err(bad(format!("unknown tolerance {k:?}; known: {known:?}")));
            }
            if !(*v >= 0.0 && v.is_finite()) {
                return Err(bad(format!("tolerance {k} must be nonnegative")));
            }
            map.insert(k.clone(), serde_json::json!(v));
        }
        serde_json::from_value(serde_json::Value::Object(map)).map_err(|e| bad(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form of everything that affects
    /// results: the config without its output directory, plus the
    /// tolerance scale.
    pub fn hash(&self, tol_scale: f64) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        let canon = serde_json::json!({ "config": c, "tol_scale": tol_scale });
        hex_sha256(canon.to_string().as_bytes())
    }
}

fn unique<'a>(names: impl Iterator<Item = &'a String>, what: &str) -> CliResult<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if n.is_empty() || n.contains(['/', '\\']) || n.contains("__") {
            return Err(bad(format!("{what} name {n:?} must be nonempty, without '/' or '__'")));
        }
        if !seen.insert(n) {
            return Err(bad(format!("{what} {n:?} defined twice")));
        }
    }
    Ok(())
}

pub fn hex_sha256(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
        ambient = { b = -1.0 }
        t_samples = { count = 8, max = 2.0 }
        suites = ["coarea", "huber"]
        [[spaces]]
        name = "zero"
        h = "zero"
        [[surfaces]]
        name = "plane"
        kind = { type = "totally_geodesic" }
        grid = { layout = "polar", radius = 3.0, nu = 16, nv = 16 }
    "#;

    #[test]
    fn parses_and_fills_defaults() {
        let c = RunConfig::from_toml(BASE).unwrap();
        assert_eq!(c.ambient.n, 3);
        assert_eq!(c.surfaces[0].pole, PoleSpec::SurfaceCenter);
        assert_eq!(c.surfaces[0].known_chi, Some(1));
        assert_eq!(c.tolerances().unwrap(), Tolerances::default());
    }

    #[test]
    fn tolerance_overrides() {
        let c = RunConfig::from_toml(&format!("{BASE}\n[tolerances]\ncoarea = 0.5\n")).unwrap();
        assert_eq!(c.tolerances().unwrap().coarea, 0.5);
        assert!(RunConfig::from_toml(&format!("{BASE}\n[tolerances]\nnope = 0.5\n")).is_err());
    }

    #[test]
    fn rejects_invalid() {
        for (from, to) in [
            ("b = -1.0", "b = 1.0"),
            ("max = 2.0", "max = 0.0"),
            ("\"huber\"]", "\"hubr\"]"),
            ("h = \"zero\"", "h = \"hL\""),
            ("count = 8", "count = 0"),
        ] {
            let text = BASE.replace(from, to);
            assert!(matches!(RunConfig::from_toml(&text), Err(CliError::Config(_))), "{to}");
        }
    }

    #[test]
    fn hash_ignores_output_dir_only() {
        let a = RunConfig::from_toml(BASE).unwrap();
        let mut b = a.clone();
        b.output_dir = PathBuf::from("/elsewhere");
        assert_eq!(a.hash(1.0), b.hash(1.0));
        assert_ne!(a.hash(1.0), a.hash(2.0));
        b.t_samples.count = 9;
        assert_ne!(a.hash(1.0), b.hash(1.0));
        assert_eq!(a.hash(1.0).len(), 64);
    }

    mod props {
        use proptest::prelude::*;

        use super::*;

        proptest! {
            #[test]
            fn hash_survives_round_trip(b in -10.0f64..-0.01, count in 1usize..200, max in 0.1f64..20.0) {
                let text = BASE
                    .replace("b = -1.0", &format!("b = {b:?}"))
                    .replace("count = 8", &format!("count = {count}"))
                    .replace("max = 2.0", &format!("max = {max:?}"));
                let a = RunConfig::from_toml(&text).unwrap();
                let again = RunConfig::from_toml(&toml::to_string(&a).unwrap()).unwrap();
                prop_assert_eq!(a.hash(1.0), again.hash(1.0));
                let mut c = a.clone();
                c.t_samples.count += 1;
                prop_assert_ne!(a.hash(1.0), c.hash(1.0));
            }
        }
    }
}

