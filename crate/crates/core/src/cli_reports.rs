//! Run configuration, the command verbs, and byte-stable CSV/JSON exports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Map, Number, Value};

use crate::error::Error;
use crate::exact::{ExactMatrix, ExactReal, QSqrt2};
use crate::linalg_core::{sample_splitting, sign_identity_residual, IDENTITY_TOL, MAX_CONDITION};
use crate::orbit_enum::{census, census_with_word_len, Census, GroupModel, ModelDef};
use crate::twisted_topology::{surface_row, SurfaceKind};
use crate::zeta_engine::{
    factorization_tolerance, fit_growth, fit_tail_constant, SignMode, ZetaEngine, PER_ORBIT_TOL,
};

pub const CSV_HEADER: &str = "word,T_sharp,m,T,epsilon,trace";
pub const DEFAULT_SURFACES: [&str; 7] = ["g2", "g3", "g4", "N3", "N4", "N5", "N6"];
pub const DEFAULT_FUZZ_SAMPLES: usize = 10_000;

/// Failure of a command, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config or model: exit code 2.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Config file contents; every field optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<String>,
    pub inline_model: Option<InlineModel>,
    pub t_max: Option<f64>,
    pub max_word_len: Option<usize>,
    /// `[re, im]` pairs.
    pub lambda_grid: Option<Vec<[f64; 2]>>,
    pub surfaces: Option<Vec<String>>,
    /// Debug switch: drop the orientation sign from the weights.
    #[serde(default)]
    pub untwisted: bool,
    pub sign_fuzz_samples: Option<usize>,
    pub sign_fuzz_seed: Option<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineModel {
    pub name: String,
    pub generators: Vec<char>,
    /// Entries `[a, b, c, d]` in the form `p+q*sqrt2`.
    pub matrices: Vec<[String; 4]>,
    pub relator: Option<String>,
    pub lambda_min: Option<f64>,
    pub entropy: f64,
    #[serde(default)]
    pub dirichlet: bool,
}

impl InlineModel {
    pub fn to_def(&self) -> Result<ModelDef, CliError> {
        let matrices = self
            .matrices
            .iter()
            .map(|m| {
                let e: Vec<ExactReal> =
                    m.iter().map(|s| QSqrt2::parse(s).map(ExactReal::from_base)).collect::<Result<_, _>>()?;
                Ok(ExactMatrix([e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone()]))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(ModelDef {
            name: self.name.clone(),
            generator_names: self.generators.clone(),
            matrices,
            relator: self.relator.clone(),
            lambda_min: self.lambda_min,
            entropy: self.entropy,
            dirichlet: self.dirichlet,
        })
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub per_orbit: f64,
    pub factorization_base: f64,
    pub factorization_per_orbit: f64,
    pub sign: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            per_orbit: PER_ORBIT_TOL,
            factorization_base: factorization_tolerance(0),
            factorization_per_orbit: factorization_tolerance(1) - factorization_tolerance(0),
            sign: IDENTITY_TOL,
        }
    }
}

impl Tolerances {
    pub fn factorization(&self, n: usize) -> f64 {
        self.factorization_base + n as f64 * self.factorization_per_orbit
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub t_max: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub strict: bool,
}

#[derive(Debug, Clone)]
pub enum ModelSource {
    Builtin(String),
    Inline(InlineModel),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: Option<ModelSource>,
    pub t_max: Option<f64>,
    pub max_word_len: Option<usize>,
    pub lambda_grid: Option<Vec<Complex64>>,
    pub surfaces: Vec<SurfaceKind>,
    pub untwisted: bool,
    pub fuzz_samples: usize,
    pub fuzz_seed: u64,
    pub tolerances: Tolerances,
    pub out_dir: PathBuf,
    pub strict: bool,
}

impl RunConfig {
    pub fn from_toml(text: &str, overrides: Overrides) -> Result<Self, CliError> {
        let file: FileConfig = toml::from_str(text).map_err(|e| usage(format!("config: {e}")))?;
        Self::resolve(file, overrides)
    }

    pub fn load(path: Option<&Path>, overrides: Overrides) -> Result<Self, CliError> {
        match path {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|source| CliError::Io { path: p.to_path_buf(), source })?;
                Self::from_toml(&text, overrides)
            }
            None => Self::resolve(FileConfig::default(), overrides),
        }
    }

    pub fn resolve(file: FileConfig, o: Overrides) -> Result<Self, CliError> {
        let model = match (o.model, file.model, file.inline_model) {
            (Some(name), _, _) => Some(ModelSource::Builtin(name)),
            (None, Some(_), Some(_)) => return Err(usage("config sets both `model` and `inline_model`")),
            (None, Some(name), None) => Some(ModelSource::Builtin(name)),
            (None, None, Some(inline)) => Some(ModelSource::Inline(inline)),
            (None, None, None) => None,
        };
        let t_max = o.t_max.or(file.t_max);
        if let Some(t) = t_max {
            if !(t > 0.0 && t.is_finite()) {
                return Err(usage(format!("t_max must be positive, got {t}")));
            }
        }
        let surfaces = match file.surfaces {
            Some(list) => list.iter().map(|s| SurfaceKind::parse(s)).collect::<Result<_, _>>()?,
            None => DEFAULT_SURFACES.iter().map(|s| SurfaceKind::parse(s)).collect::<Result<_, _>>()?,
        };
        Ok(RunConfig {
            model,
            t_max,
            max_word_len: file.max_word_len,
            lambda_grid: file.lambda_grid.map(|g| g.iter().map(|p| Complex64::new(p[0], p[1])).collect()),
            surfaces,
            untwisted: file.untwisted,
            fuzz_samples: file.sign_fuzz_samples.unwrap_or(DEFAULT_FUZZ_SAMPLES),
            fuzz_seed: file.sign_fuzz_seed.unwrap_or(0),
            tolerances: file.tolerances,
            out_dir: o.out_dir.or(file.out_dir).unwrap_or_else(|| PathBuf::from(".")),
            strict: o.strict,
        })
    }

    pub fn group_model(&self) -> Result<GroupModel, CliError> {
        match &self.model {
            None => Err(usage("no model given; use --model or set `model` in the config")),
            Some(ModelSource::Builtin(name)) => GroupModel::builtin(name).map_err(|e| usage(e.to_string())),
            Some(ModelSource::Inline(m)) => GroupModel::new(m.to_def()?).map_err(|e| usage(e.to_string())),
        }
    }

    fn require_t_max(&self) -> Result<f64, CliError> {
        self.t_max.ok_or_else(|| usage("no T_max given; use --tmax or set `t_max` in the config"))
    }

    /// The configured grid, or a default one above `h + 1`; every point
    /// must lie in `Im λ > h`.
    pub fn grid(&self, entropy: f64) -> Result<Vec<Complex64>, CliError> {
        let grid = self.lambda_grid.clone().unwrap_or_else(|| default_lambda_grid(entropy));
        if let Some(bad) = grid.iter().find(|l| !(l.im > entropy) || !l.re.is_finite()) {
            return Err(usage(format!("grid point {bad} is outside Im(lambda) > {entropy}")));
        }
        Ok(grid)
    }

    fn sign_mode(&self) -> SignMode {
        if self.untwisted {
            SignMode::Untwisted
        } else {
            SignMode::Twisted
        }
    }
}

pub fn default_lambda_grid(entropy: f64) -> Vec<Complex64> {
    let mut grid = Vec::new();
    for im in [entropy + 1.0, entropy + 2.0, 5.0_f64.max(entropy + 3.0), 10.0_f64.max(entropy + 4.0)] {
        for re in [0.0, 1.5, -3.0] {
            grid.push(Complex64::new(re, im));
        }
    }
    grid
}

/// What a command produced and whether it passed.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

/// Decimal with 15 significant digits, no exponent for ordinary
/// magnitudes.
pub fn sig15(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-6..=20).contains(&exponent) {
        let decimals = (14 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.14e}")
    }
}

/// JSON number with 17 significant digits; `null` when not finite.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    format!("{x:.16e}").parse::<Number>().map(Value::Number).unwrap_or(Value::Null)
}

fn complex(z: Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

pub fn orbits_csv(model: &GroupModel, c: &Census) -> String {
    let mut out = String::with_capacity(64 * (c.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for o in &c.orbits {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            o.word().render(model.generator_names()),
            sig15(o.t_sharp()),
            o.m(),
            sig15(o.t()),
            o.epsilon(),
            sig15(o.trace())
        );
    }
    out
}

pub fn warnings_text(model: &GroupModel, c: &Census) -> String {
    let mut out = String::new();
    if !c.complete {
        let _ = writeln!(out, "incomplete census: word length {} may miss orbits below T_max {}", c.max_word_len, c.t_max);
    }
    for w in &c.warnings {
        out.push_str(&w.describe(model));
        out.push('\n');
    }
    out
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf, CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    fs::write(&path, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(path)
}

fn write_json(path: PathBuf, v: &Value) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(v).expect("JSON values serialize");
    text.push('\n');
    write_file(path, &text)
}

fn build_census(cfg: &RunConfig, model: &GroupModel) -> Result<Census, CliError> {
    let t_max = cfg.require_t_max()?;
    let c = match cfg.max_word_len {
        Some(len) => census_with_word_len(model, t_max, len)?,
        None => census(model, t_max).map_err(|e| match e {
            Error::IncompleteCensus { .. } => usage(format!("{e}; set `max_word_len`")),
            other => other.into(),
        })?,
    };
    Ok(c)
}

fn strict_gate(cfg: &RunConfig, c: &Census) -> (bool, Vec<String>) {
    let warned = !c.warnings.is_empty() || !c.complete;
    if warned && cfg.strict {
        (false, vec![format!("{} census warnings under --strict", c.warnings.len())])
    } else {
        (true, Vec::new())
    }
}

pub fn cmd_orbits(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = cfg.group_model()?;
    let c = build_census(cfg, &model)?;
    let csv = write_file(cfg.out_dir.join("orbits.csv"), &orbits_csv(&model, &c))?;
    let warnings = write_file(cfg.out_dir.join("orbits.warnings"), &warnings_text(&model, &c))?;
    let (pass, notes) = strict_gate(cfg, &c);
    Ok(Outcome { files: vec![csv, warnings], pass, notes })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzSummary {
    pub samples: usize,
    pub failures: usize,
    pub max_residual: f64,
}

/// Sign identity over sampled splittings with `dim_s, dim_u ≤ 4`.
pub fn sign_fuzz(samples: usize, seed: u64, tol: f64) -> FuzzSummary {
    let mut failures = 0;
    let mut max_residual: f64 = 0.0;
    for i in 0..samples as u64 {
        let s = seed.wrapping_add(i);
        let ds = 1 + (i % 4) as usize;
        let du = 1 + (i / 4 % 4) as usize;
        let p = sample_splitting(ds, du, s);
        let ok = match sign_identity_residual(&p) {
            Ok(r) => {
                max_residual = max_residual.max(r);
                r <= tol && p.condition() <= MAX_CONDITION * (1.0 + 1e-9)
            }
            Err(_) => false,
        };
        failures += usize::from(!ok);
    }
    FuzzSummary { samples, failures, max_residual }
}

pub fn verify_report(cfg: &RunConfig, model: &GroupModel, c: &Census) -> Result<(Value, bool), CliError> {
    let engine = ZetaEngine::for_model(model).with_mode(cfg.sign_mode());
    let grid = cfg.grid(engine.entropy())?;
    let tol = cfg.tolerances;
    let per_orbit = engine.max_per_orbit_residual(c)?;
    let mut pass = per_orbit <= tol.per_orbit;
    let bound = tol.factorization(c.len());
    let mut rows = Vec::new();
    for &l in &grid {
        let r = engine.factorization_residual(c, l)?;
        pass &= r <= bound;
        rows.push(json!({ "lambda": complex(l), "residual": num(r), "tolerance": num(bound), "pass": r <= bound }));
    }
    let fuzz = sign_fuzz(cfg.fuzz_samples, cfg.fuzz_seed, tol.sign);
    pass &= fuzz.failures == 0;
    let v = json!({
        "model": model.name(),
        "t_max": num(c.t_max),
        "census_size": c.len(),
        "complete": c.complete,
        "warnings": c.warnings.len(),
        "untwisted": cfg.untwisted,
        "max_per_orbit_residual": num(per_orbit),
        "per_orbit_tolerance": num(tol.per_orbit),
        "factorization_residuals": rows,
        "sign_fuzz": {
            "samples": fuzz.samples,
            "failures": fuzz.failures,
            "max_residual": num(fuzz.max_residual),
            "tolerance": num(tol.sign),
        },
        "pass": pass,
    });
    Ok((v, pass))
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = cfg.group_model()?;
    let c = build_census(cfg, &model)?;
    let (v, mut pass) = verify_report(cfg, &model, &c)?;
    let file = write_json(cfg.out_dir.join("verify.json"), &v)?;
    let (gate, notes) = strict_gate(cfg, &c);
    pass &= gate;
    Ok(Outcome { files: vec![file], pass, notes })
}

/// Truncation levels `T_max - 4, T_max - 2, T_max` that are positive.
fn truncation_levels(t_max: f64) -> Vec<f64> {
    [t_max - 4.0, t_max - 2.0, t_max].into_iter().filter(|t| *t > 0.0).collect()
}

pub fn zeta_report(cfg: &RunConfig, model: &GroupModel, c: &Census) -> Result<Value, CliError> {
    let engine = ZetaEngine::for_model(model).with_mode(cfg.sign_mode());
    let grid = cfg.grid(engine.entropy())?;
    let mut points = Vec::new();
    for &l in &grid {
        let r = engine.log_zeta_r(c, l)?;
        let ks = (0..=2)
            .map(|k| {
                engine.log_zeta_k(c, k, l).map(|v| json!({ "k": k, "value": complex(v.value), "tail_estimate": num(v.tail_estimate) }))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let truncation = truncation_levels(c.t_max)
            .into_iter()
            .map(|t| {
                let sub = c.truncated(t);
                engine.log_zeta_r(&sub, l).map(|v| {
                    json!({ "t_max": num(t), "orbits": sub.len(), "log_zeta_r": complex(v.value), "tail_estimate": num(v.tail_estimate) })
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        points.push(json!({
            "lambda": complex(l),
            "log_zeta_r": complex(r.value),
            "tail_estimate": num(r.tail_estimate),
            "log_zeta_k": ks,
            "factorization_residual": num(engine.factorization_residual(c, l)?),
            "truncation": truncation,
        }));
    }
    let growth = match fit_growth(c) {
        Some(g) => json!({ "slope": num(g.slope), "intercept": num(g.intercept), "points": g.points }),
        None => Value::Null,
    };
    Ok(json!({
        "model": model.name(),
        "t_max": num(c.t_max),
        "census_size": c.len(),
        "entropy": num(engine.entropy()),
        "tail_constant": num(fit_tail_constant(c, engine.entropy())),
        "growth_fit": growth,
        "untwisted": cfg.untwisted,
        "points": points,
    }))
}

pub fn cmd_zeta(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = cfg.group_model()?;
    let c = build_census(cfg, &model)?;
    let v = zeta_report(cfg, &model, &c)?;
    let file = write_json(cfg.out_dir.join("zeta.json"), &v)?;
    let (pass, notes) = strict_gate(cfg, &c);
    Ok(Outcome { files: vec![file], pass, notes })
}

fn betti(b: crate::twisted_topology::Betti) -> Value {
    json!([b.b0, b.b1, b.b2])
}

pub fn topology_report(surfaces: &[SurfaceKind]) -> Result<(Value, bool), CliError> {
    let mut rows = Vec::new();
    let mut pass = true;
    for &kind in surfaces {
        let row = surface_row(kind)?;
        let mut obj = Map::new();
        obj.insert("surface".into(), json!(kind.to_string()));
        obj.insert("orientable".into(), json!(kind.is_orientable()));
        obj.insert("euler_characteristic".into(), json!(row.euler));
        obj.insert("derived_euler".into(), json!(row.derived_euler));
        obj.insert("betti_trivial".into(), betti(row.betti_trivial));
        obj.insert("betti_w1".into(), betti(row.betti_w1));
        obj.insert("gysin_b1".into(), json!(row.gysin_b1));
        let (order, status, agree) = match &row.predicted_order {
            Ok(n) => (json!(n), "ok", Value::Bool(*n == -row.derived_euler)),
            Err(Error::HypothesisViolation { chi: 0 }) => (Value::Null, "degenerate", Value::Null),
            Err(Error::HypothesisViolation { .. }) => (Value::Null, "hypothesis-violation", Value::Null),
            Err(_) => (Value::Null, "route-disagreement", Value::Bool(false)),
        };
        pass &= agree != Value::Bool(false);
        obj.insert("predicted_order".into(), order);
        obj.insert("status".into(), json!(status));
        obj.insert("route_agreement".into(), agree);
        rows.push(Value::Object(obj));
    }
    Ok((json!({ "surfaces": rows, "pass": pass }), pass))
}

pub fn cmd_topology(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (v, pass) = topology_report(&cfg.surfaces)?;
    let file = write_json(cfg.out_dir.join("topology.json"), &v)?;
    Ok(Outcome { files: vec![file], pass, notes: Vec::new() })
}

/// All four exports from one census.
pub fn cmd_report(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = cfg.group_model()?;
    let c = build_census(cfg, &model)?;
    let mut out = Outcome::default();
    out.files.push(write_file(cfg.out_dir.join("orbits.csv"), &orbits_csv(&model, &c))?);
    out.files.push(write_file(cfg.out_dir.join("orbits.warnings"), &warnings_text(&model, &c))?);
    let (verify, vpass) = verify_report(cfg, &model, &c)?;
    out.files.push(write_json(cfg.out_dir.join("verify.json"), &verify)?);
    out.files.push(write_json(cfg.out_dir.join("zeta.json"), &zeta_report(cfg, &model, &c)?)?);
    let (topo, tpass) = topology_report(&cfg.surfaces)?;
    out.files.push(write_json(cfg.out_dir.join("topology.json"), &topo)?);
    let (gate, notes) = strict_gate(cfg, &c);
    out.pass = vpass && tpass && gate;
    out.notes = notes;
    Ok(out)
}
