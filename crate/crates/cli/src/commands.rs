use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use isocomp::comparison_space::{build, constant_c, limit_suite, ComparisonSpace};
use isocomp::extrinsic_analysis::{
    extract_ball, fixture, triangulate, ReportMeta, Status, Tolerances, TriangulatedPatch, VerificationReport,
    FIXTURE_NAMES,
};
use isocomp::immersed_surface::ParamImmersion;
use isocomp::model_space::HyperbolicAmbient;

use crate::config::{hex_sha256, needs_space, RunConfig, SurfaceEntry};
use crate::error::{CliError, CliResult};
use crate::hspec::HSpec;
use crate::suites::{run_space_suite, run_surface_suite, SpaceContext, SurfaceContext};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Command-line overrides shared by all commands.
#[derive(Debug, Clone)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub tol_scale: f64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for Options {
    fn default() -> Self {
        Self { out: None, tol_scale: 1.0, jobs: None }
    }
}

struct Run<'a> {
    cfg: &'a RunConfig,
    out: PathBuf,
    hash: String,
    tol: Tolerances,
}

impl<'a> Run<'a> {
    fn new(cfg: &'a RunConfig, opts: &Options) -> CliResult<Self> {
        if !(opts.tol_scale > 0.0 && opts.tol_scale.is_finite()) {
            return Err(CliError::Config(format!("--tol-scale must be positive, got {}", opts.tol_scale)));
        }
        let out = opts.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
        fs::create_dir_all(&out).map_err(|e| io_err(&out, e))?;
        Ok(Self { cfg, out, hash: cfg.hash(opts.tol_scale), tol: cfg.tolerances()?.scaled(opts.tol_scale) })
    }

    fn path(&self, rel: &str) -> CliResult<PathBuf> {
        let p = self.out.join(rel);
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
        Ok(p)
    }

    fn write_json(&self, rel: &str, value: &impl Serialize) -> CliResult<()> {
        let p = self.path(rel)?;
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&p, text).map_err(|e| io_err(&p, e))
    }

    fn write_csv<R: Serialize>(&self, rel: &str, rows: impl IntoIterator<Item = R>) -> CliResult<()> {
        let p = self.path(rel)?;
        let mut w = csv::Writer::from_path(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| io_err(&p, e))
    }
}

fn io_err(p: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", p.display()))
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CliError::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Triangulate a surface without its growth curve; enough for an envelope.
fn surface_samples(cfg: &RunConfig, entry: &SurfaceEntry) -> anyhow::Result<Vec<(f64, f64)>> {
    let ambient = HyperbolicAmbient::new(cfg.ambient.b, cfg.ambient.n)?;
    let imm = ParamImmersion::new(ambient, entry.kind, entry.grid, entry.pole.clone())?;
    let patch: TriangulatedPatch = triangulate(&imm)?;
    Ok(patch.data.unwrap_or_default().iter().map(|d| (d.r, d.radial_curvature)).collect())
}

fn build_space(b: f64, spec: &HSpec, samples: Option<&[(f64, f64)]>) -> Result<ComparisonSpace, String> {
    let h = spec.build(b, samples).map_err(|e| e.to_string())?;
    build(b, h).map_err(|e| e.to_string())
}

/// A space together with the surface it was derived from, for envelopes.
fn space_key(name: &str, surface: Option<&str>) -> String {
    match surface {
        Some(s) => format!("{name}@{s}"),
        None => name.to_string(),
    }
}

fn space_json(run: &Run, key: &str, h: &str, space: &Result<ComparisonSpace, String>) -> Value {
    let base = json!({
        "name": key,
        "h": h,
        "b": run.cfg.ambient.b,
        "config_hash": run.hash,
        "tool_version": TOOL_VERSION,
    });
    let mut obj = match base {
        Value::Object(m) => m,
        _ => unreachable!(),
    };
    match space {
        Err(e) => {
            obj.insert("built".into(), json!(false));
            obj.insert("error".into(), json!(e));
        }
        Ok(s) => {
            let c = constant_c(s);
            let limits = limit_suite(s);
            obj.insert("built".into(), json!(true));
            obj.insert("balanced".into(), json!(s.balance.balanced));
            obj.insert("balance_margin".into(), json!(s.balance.margin));
            obj.insert("balance_margin_t".into(), json!(s.balance.margin_t));
            obj.insert("t0".into(), json!(s.t0));
            obj.insert("t0_h_form".into(), json!(s.t0_h_form));
            obj.insert("C".into(), json!(c.as_ref().ok().map(|c| c.value)));
            obj.insert("c_detail".into(), json!(c.as_ref().ok()));
            obj.insert("c_error".into(), json!(c.as_ref().err().map(|e| e.to_string())));
            obj.insert("ode_residual_max".into(), json!(s.ode_residual_max));
            obj.insert("q_bound_ok".into(), json!(s.q_bound_ok));
            match limits {
                Ok(l) => obj.insert("limits".into(), json!(l)),
                Err(e) => obj.insert("limits".into(), json!({ "error": e.to_string() })),
            };
        }
    }
    Value::Object(obj)
}

/// One JSON file per space under `spaces/`. Returns the exit code: 0 iff
/// every space was built.
pub fn cmd_space(cfg: &RunConfig, opts: &Options) -> CliResult<u8> {
    let run = Run::new(cfg, opts)?;
    let b = cfg.ambient.b;
    let specs = cfg.h_specs();
    let entries = with_jobs(opts.jobs, || {
        let mut out = vec![];
        for ((name, spec), raw) in specs.iter().zip(&cfg.spaces) {
            if spec.needs_surface() {
                for surf in &cfg.surfaces {
                    let space = surface_samples(cfg, surf)
                        .map_err(|e| e.to_string())
                        .and_then(|s| build_space(b, spec, Some(&s)));
                    out.push((space_key(name, Some(&surf.name)), raw.h.clone(), space));
                }
            } else {
                out.push((name.clone(), raw.h.clone(), build_space(b, spec, None)));
            }
        }
        out
    })?;
    let mut all_built = true;
    for (key, h, space) in &entries {
        all_built &= space.is_ok();
        run.write_json(&format!("spaces/{key}.json"), &space_json(&run, key, h, space))?;
    }
    Ok(if all_built { 0 } else { 1 })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ManifestEntry {
    pub surface: String,
    pub space: Option<String>,
    pub suite: String,
    pub status: String,
    pub report: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_hash: String,
    pub tolerances: Tolerances,
    pub entries: Vec<ManifestEntry>,
    pub curves: Vec<String>,
    /// SHA-256 of this manifest serialized with an empty hash.
    pub manifest_hash: String,
}

impl RunManifest {
    fn seal(mut self) -> Self {
        self.manifest_hash.clear();
        self.manifest_hash = hex_sha256(serde_json::to_string(&self).expect("serializable").as_bytes());
        self
    }

    pub fn exit_code(&self) -> u8 {
        if self.entries.iter().any(|e| e.status == Status::Fail.as_str()) {
            1
        } else {
            0
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// A surface and the spaces to check it against, ready to run.
struct Prepared {
    surface: Result<SurfaceContext, String>,
    spaces: Vec<(String, String, Result<ComparisonSpace, String>)>,
}

fn prepare(cfg: &RunConfig, shared: &[(String, String, Result<ComparisonSpace, String>)], entry: &SurfaceEntry) -> Prepared {
    let surface = SurfaceContext::build(cfg, entry).map_err(|e| format!("surface build failed: {e}"));
    let b = cfg.ambient.b;
    let spaces = cfg
        .h_specs()
        .iter()
        .zip(shared)
        .map(|((name, spec), (_, h, built))| {
            let space = if spec.needs_surface() {
                match &surface {
                    Ok(s) => build_space(b, spec, Some(&s.radial_samples())),
                    Err(e) => Err(e.clone()),
                }
            } else {
                built.clone()
            };
            (name.clone(), h.clone(), space)
        })
        .collect();
    Prepared { surface, spaces }
}

struct Cell {
    surface: usize,
    space: Option<usize>,
    suite: String,
}

struct CellResult {
    report: VerificationReport,
    details: Value,
}

fn run_cell(cell: &Cell, p: &Prepared, gates: &[Option<Result<SpaceContext, String>>], tol: &Tolerances) -> CellResult {
    let suite = cell.suite.as_str();
    let surf = match &p.surface {
        Ok(s) => s,
        Err(e) => return CellResult { report: VerificationReport::inconclusive(suite, e.clone()), details: Value::Null },
    };
    let (report, details) = match cell.space {
        None => run_surface_suite(suite, surf, tol),
        Some(k) => match gates[k].as_ref().expect("space cells have gates") {
            Ok(sc) => run_space_suite(suite, surf, sc, tol),
            Err(e) => (VerificationReport::inconclusive(suite, e.clone()), Value::Null),
        },
    };
    CellResult { report, details }
}

fn growth_csv_name(surface: &str) -> String {
    format!("curves/{surface}.csv")
}

#[derive(Serialize)]
struct SpaceRow {
    t: f64,
    h: f64,
    #[serde(rename = "W")]
    w: f64,
    #[serde(rename = "q_W")]
    q_w: f64,
    f: f64,
}

fn space_rows(cfg: &RunConfig, space: &ComparisonSpace) -> Vec<SpaceRow> {
    let n = cfg.t_samples.count;
    (0..=n)
        .filter_map(|i| {
            let t = cfg.t_samples.max * i as f64 / n as f64;
            Some(SpaceRow {
                t,
                h: space.h().eval(t),
                w: space.w(t).ok()?,
                q_w: space.q_w(t).ok()?,
                f: space.f(t).ok()?,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct QuotientRow {
    t: f64,
    v: f64,
    v_minus_v0: f64,
    quotient_model_ball: f64,
    quotient_cosh_minus_c: f64,
    quotient_cosh: f64,
    v_over_disc: f64,
}

fn quotient_rows(surf: &SurfaceContext, sc: &SpaceContext) -> Vec<QuotientRow> {
    let Some(anchor) = sc.gate.anchor() else { return vec![] };
    let k = (-surf.curve.b).sqrt();
    surf.curve
        .resolved()
        .filter(|s| s.t >= anchor.t0 && s.t > 0.0)
        .filter_map(|s| {
            let dv = s.v - anchor.v0;
            let ch = (k * s.t).cosh();
            Some(QuotientRow {
                t: s.t,
                v: s.v,
                v_minus_v0: dv,
                quotient_model_ball: dv / sc.space.ball_volume(s.t).ok()?,
                quotient_cosh_minus_c: dv / (ch - anchor.c),
                quotient_cosh: dv / ch,
                v_over_disc: s.v_over_disc,
            })
        })
        .collect()
}

/// Write growth, space and quotient curves for prepared surfaces; returns
/// the relative paths written.
fn write_curves(run: &Run, prepared: &[Prepared], gates: &[Vec<Option<Result<SpaceContext, String>>>]) -> CliResult<Vec<String>> {
    let mut written = vec![];
    let mut shared_done = std::collections::BTreeSet::new();
    for (p, g) in prepared.iter().zip(gates) {
        let Ok(surf) = &p.surface else { continue };
        let name = growth_csv_name(&surf.entry.name);
        run.write_csv(&name, &surf.curve.samples)?;
        written.push(name);
        for ((space_name, _, built), gate) in p.spaces.iter().zip(g) {
            let Ok(space) = built else { continue };
            let spec: HSpec = run.cfg.spaces.iter().find(|s| &s.name == space_name).expect("known").h.parse().expect("validated");
            let key = space_key(space_name, spec.needs_surface().then_some(surf.entry.name.as_str()));
            if shared_done.insert(key.clone()) {
                let name = format!("curves/space_{key}.csv");
                run.write_csv(&name, space_rows(run.cfg, space))?;
                written.push(name);
            }
            if let Some(Ok(sc)) = gate {
                if sc.gate.anchor().is_some() {
                    let name = format!("curves/{}__{space_name}__quotients.csv", surf.entry.name);
                    run.write_csv(&name, quotient_rows(surf, sc))?;
                    written.push(name);
                }
            }
        }
    }
    Ok(written)
}

fn shared_spaces(cfg: &RunConfig) -> Vec<(String, String, Result<ComparisonSpace, String>)> {
    cfg.h_specs()
        .into_iter()
        .zip(&cfg.spaces)
        .map(|((name, spec), raw)| {
            let space = if spec.needs_surface() { Err("per surface".into()) } else { build_space(cfg.ambient.b, &spec, None) };
            (name, raw.h.clone(), space)
        })
        .collect()
}

fn gates_for<'a>(p: &'a Prepared, tol: &Tolerances) -> Vec<Option<Result<SpaceContext<'a>, String>>> {
    p.spaces
        .par_iter()
        .map(|(_, _, built)| {
            let Ok(surf) = &p.surface else { return None };
            Some(match built {
                Ok(space) => SpaceContext::new(surf, space, tol).map_err(|e| format!("hypothesis gate failed: {e}")),
                Err(e) => Err(format!("space build failed: {e}")),
            })
        })
        .collect()
}

/// Run every (surface x space x suite) cell, write reports, curves and the
/// manifest. Returns the manifest; its exit code is 0 iff no cell failed.
pub fn cmd_verify(cfg: &RunConfig, opts: &Options) -> CliResult<RunManifest> {
    let run = Run::new(cfg, opts)?;
    let tol = run.tol;
    let (entries, curves) = with_jobs(opts.jobs, || -> CliResult<_> {
        if cfg.suites.is_empty() {
            return Ok((vec![], vec![]));
        }
        let shared = shared_spaces(cfg);
        let prepared: Vec<Prepared> = cfg.surfaces.iter().map(|e| prepare(cfg, &shared, e)).collect();
        let gates: Vec<_> = prepared.iter().map(|p| gates_for(p, &tol)).collect();
        let mut cells = vec![];
        for si in 0..cfg.surfaces.len() {
            for suite in &cfg.suites {
                if needs_space(suite) {
                    cells.extend((0..cfg.spaces.len()).map(|k| Cell { surface: si, space: Some(k), suite: suite.clone() }));
                } else {
                    cells.push(Cell { surface: si, space: None, suite: suite.clone() });
                }
            }
        }
        let results: Vec<CellResult> = cells
            .par_iter()
            .map(|c| run_cell(c, &prepared[c.surface], &gates[c.surface], &tol))
            .collect();
        let mut entries = vec![];
        for (cell, res) in cells.iter().zip(results) {
            let p = &prepared[cell.surface];
            let surface = &cfg.surfaces[cell.surface];
            let space = cell.space.map(|k| &p.spaces[k]);
            let rel = match space {
                Some((name, _, _)) => format!("reports/{}__{name}__{}.json", surface.name, cell.suite),
                None => format!("reports/{}__{}.json", surface.name, cell.suite),
            };
            let meta = ReportMeta {
                surface: surface.name.clone(),
                grid: p.surface.as_ref().map(|s| s.grid_label()).unwrap_or_default(),
                b: cfg.ambient.b,
                h: space.map(|s| s.1.clone()).unwrap_or_default(),
            };
            let report = res.report.with_meta(meta);
            let doc = json!({
                "config_hash": run.hash,
                "tool_version": TOOL_VERSION,
                "tolerances": tol,
                "space": space.map(|s| &s.0),
                "report": report,
                "details": res.details,
            });
            run.write_json(&rel, &doc)?;
            entries.push(ManifestEntry {
                surface: surface.name.clone(),
                space: space.map(|s| s.0.clone()),
                suite: cell.suite.clone(),
                status: report.status.as_str().to_string(),
                report: rel,
            });
        }
        let curves = write_curves(&run, &prepared, &gates)?;
        Ok((entries, curves))
    })??;
    let manifest = RunManifest {
        tool_version: TOOL_VERSION.into(),
        config_hash: run.hash.clone(),
        tolerances: tol,
        entries,
        curves,
        manifest_hash: String::new(),
    }
    .seal();
    run.write_json("manifest.json", &manifest)?;
    Ok(manifest)
}

/// Growth, space and quotient curves only.
pub fn cmd_curves(cfg: &RunConfig, opts: &Options) -> CliResult<Vec<String>> {
    let run = Run::new(cfg, opts)?;
    let tol = run.tol;
    with_jobs(opts.jobs, || {
        let shared = shared_spaces(cfg);
        let mut written = vec![];
        for (key, _, space) in &shared {
            if let Ok(space) = space {
                let name = format!("curves/space_{key}.csv");
                run.write_csv(&name, space_rows(cfg, space))?;
                written.push(name);
            }
        }
        let prepared: Vec<Prepared> = cfg.surfaces.iter().map(|e| prepare(cfg, &shared, e)).collect();
        let gates: Vec<_> = prepared.iter().map(|p| gates_for(p, &tol)).collect();
        for name in write_curves(&run, &prepared, &gates)? {
            if !written.contains(&name) {
                written.push(name);
            }
        }
        Ok(written)
    })?
}

/// Built-in complexes, one line each.
pub fn fixtures_list() -> String {
    let mut out = String::new();
    for name in FIXTURE_NAMES {
        let c = fixture(name).expect("known fixture");
        let topo = TriangulatedPatch::from_complex(c.clone())
            .ok()
            .and_then(|p| {
                let t = c.r.iter().copied().fold(0.0, f64::max) + 1.0;
                extract_ball(&p, t).ok()?.euler_data().ok()
            })
            .map(|e| format!("chi {} genus {} boundary {}", e.chi, e.genus, e.boundary_components))
            .unwrap_or_else(|| "topology unavailable".into());
        out.push_str(&format!(
            "{name}\t{} vertices\t{} triangles\t{topo}\n",
            c.positions.len(),
            c.triangles.len()
        ));
    }
    out
}

/// Write every built-in complex as a `.complex` text file.
pub fn fixtures_export(dir: &Path) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut out = vec![];
    for name in FIXTURE_NAMES {
        let p = dir.join(format!("{name}.complex"));
        fs::write(&p, fixture(name).expect("known fixture").to_text(name)).map_err(|e| io_err(&p, e))?;
        out.push(p);
    }
    Ok(out)
}
