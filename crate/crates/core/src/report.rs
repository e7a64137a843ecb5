//! Job files, their execution and deterministic JSON/CSV output.
//!
//! A job file looks like
//!
//! ```json
//! {
//!   "job": { "kind": "hopf-spectrum", "fluxes": ["7/10", "4/5"], "window": [-2.0, 2.0] },
//!   "output": { "stem": "hopf" }
//! }
//! ```
//!
//! Floats in the emitted JSON and CSV are rounded to 15 significant digits
//! and printed in shortest round-trip form, and object keys are sorted, so
//! identical inputs give byte-identical files.

use crate::error::{Error, Result};
use crate::hopf_spectrum::{
    assemble_spectrum, circle_zero_mode_scan, kernel_dimension, Branch, HopfConfig, HopfPoint, NumericalProvider,
    ScanStatus, SpectrumTable,
};
use crate::link_geometry::{
    delta_bound, flux_distance, hopf_preimage, linking_number, seifert_frame, slope_c_k, Flux, FluxVector, KnotCurve,
    TorusCurve, TorusNormal,
};
use crate::model_operator::{
    apply_extension_action, deficiency_element, graph_norm_lower_bound, graph_norm_sq, singular_l2_norm,
    DeficiencySign, Extension, ModelTube, RadialGrid, SingularMode,
};
use crate::s2_dirac::SolverParams;
use crate::special_functions::c_alpha;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub job: Job,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub record_wall_time: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// File stem for `<stem>.json` and `<stem>.csv`; defaults to the job file stem.
    pub stem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Job {
    HopfSpectrum(HopfJob),
    CircleScan(CircleScanJob),
    ModelCheck(ModelCheckJob),
    Geometry(GeometryJob),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "default_grid")]
    pub n: usize,
    #[serde(default = "default_solver_tolerance")]
    pub tolerance: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            n: default_grid(),
            tolerance: default_solver_tolerance(),
        }
    }
}

impl From<SolverSpec> for SolverParams {
    fn from(s: SolverSpec) -> Self {
        SolverParams {
            n: s.n,
            tolerance: s.tolerance,
        }
    }
}

fn default_grid() -> usize {
    4000
}

fn default_solver_tolerance() -> f64 {
    1e-3
}

fn default_kernel_tolerance() -> f64 {
    1e-6
}

fn default_margin() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfJob {
    pub fluxes: Vec<Flux>,
    /// Fiber positions; defaults to the north and south poles.
    pub points: Option<Vec<HopfPoint>>,
    /// Spectral window; without it only the kernel is computed.
    pub window: Option<[f64; 2]>,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default = "default_kernel_tolerance")]
    pub kernel_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleScanJob {
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelCheckJob {
    #[serde(default = "default_model_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_j_max")]
    pub j_max: i64,
    #[serde(default)]
    pub seed: u64,
}

fn default_model_alphas() -> Vec<f64> {
    vec![0.25, 0.5, 0.75]
}

fn default_samples() -> usize {
    5
}

fn default_j_max() -> i64 {
    8
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusKnotSpec {
    pub latitude: f64,
    pub p: i32,
    pub q: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryJob {
    pub points: Vec<HopfPoint>,
    /// One flux per fiber, for the linking slopes.
    pub fluxes: Option<Vec<Flux>>,
    #[serde(default)]
    pub torus_knots: Vec<TorusKnotSpec>,
    #[serde(default)]
    pub flux_pairs: Vec<[Flux; 2]>,
    #[serde(default = "default_darboux_tolerance")]
    pub darboux_tolerance: f64,
}

fn default_darboux_tolerance() -> f64 {
    1e-6
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    job: Value,
    #[serde(default)]
    output: OutputSpec,
    #[serde(default)]
    record_wall_time: bool,
}

fn path_error<E>(prefix: &'static str, msg: impl Fn(&E) -> String) -> impl Fn(serde_path_to_error::Error<E>) -> Error {
    move |e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner == ".") {
            (true, _) => inner,
            (false, true) => prefix.to_string(),
            (false, false) => format!("{prefix}.{inner}"),
        };
        config_error(&path, msg(e.inner()))
    }
}

fn job_body<T: serde::de::DeserializeOwned>(body: Value) -> Result<T> {
    serde_path_to_error::deserialize(body).map_err(path_error("job", |e: &serde_json::Error| e.to_string()))
}

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

fn positive(path: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(config_error(path, format!("must be positive, got {x}")))
    }
}

fn flux_vector(path: &str, fluxes: &[Flux]) -> Result<FluxVector> {
    if fluxes.is_empty() {
        return Err(config_error(path, "flux list is empty"));
    }
    FluxVector::new(fluxes.to_vec()).map_err(|e| config_error(path, e.to_string()))
}

impl JobConfig {
    /// Parse and validate; errors carry the offending field path.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(path_error("", |e: &serde_json::Error| e.to_string()))?;
        let kind = match raw.job.get("kind") {
            Some(Value::String(k)) => k.clone(),
            _ => return Err(config_error("job.kind", "missing job kind")),
        };
        let mut body = raw.job;
        if let Value::Object(m) = &mut body {
            m.remove("kind");
        }
        let job = match kind.as_str() {
            "hopf-spectrum" => Job::HopfSpectrum(job_body(body)?),
            "circle-scan" => Job::CircleScan(job_body(body)?),
            "model-check" => Job::ModelCheck(job_body(body)?),
            "geometry" => Job::Geometry(job_body(body)?),
            other => return Err(config_error("job.kind", format!("unknown job kind `{other}`"))),
        };
        let cfg = JobConfig {
            job,
            output: raw.output,
            record_wall_time: raw.record_wall_time,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.job {
            Job::HopfSpectrum(j) => {
                flux_vector("job.fluxes", &j.fluxes)?;
                positive("job.solver.tolerance", j.solver.tolerance)?;
                positive("job.kernel_tolerance", j.kernel_tolerance)?;
                if let Some([a, b]) = j.window {
                    if !(a <= b && a.is_finite() && b.is_finite()) {
                        return Err(config_error("job.window", format!("[{a}, {b}] is not an interval")));
                    }
                }
                if let Some(p) = &j.points {
                    if p.len() != j.fluxes.len() {
                        return Err(config_error("job.points", "need one point per flux"));
                    }
                } else if j.fluxes.len() > 2 && j.window.is_some() {
                    return Err(config_error("job.points", "more than two fibers need explicit points"));
                }
            }
            Job::CircleScan(j) => {
                if j.alphas.is_empty() {
                    return Err(config_error("job.alphas", "list is empty"));
                }
                if let Some(a) = j.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
                    return Err(config_error("job.alphas", format!("{a} outside (0, 1)")));
                }
                positive("job.solver.tolerance", j.solver.tolerance)?;
                positive("job.margin", j.margin)?;
            }
            Job::ModelCheck(j) => {
                if let Some(a) = j.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
                    return Err(config_error("job.alphas", format!("{a} outside (0, 1)")));
                }
                if j.samples == 0 {
                    return Err(config_error("job.samples", "must be at least 1"));
                }
            }
            Job::Geometry(j) => {
                if j.points.is_empty() {
                    return Err(config_error("job.points", "list is empty"));
                }
                if let Some(f) = &j.fluxes {
                    flux_vector("job.fluxes", f)?;
                    if f.len() != j.points.len() {
                        return Err(config_error("job.fluxes", "need one flux per point"));
                    }
                }
                positive("job.darboux_tolerance", j.darboux_tolerance)?;
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &'static str {
        match self.job {
            Job::HopfSpectrum(_) => "hopf-spectrum",
            Job::CircleScan(_) => "circle-scan",
            Job::ModelCheck(_) => "model-check",
            Job::Geometry(_) => "geometry",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Inconclusive => 2,
            Status::Fail => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultEnvelope {
    pub kind: String,
    pub version: String,
    pub inputs: Value,
    pub results: Value,
    pub status: Status,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
    #[serde(skip)]
    pub table: Option<SpectrumTable>,
}

impl ResultEnvelope {
    pub fn to_canonical_json(&self) -> Result<String> {
        let v = serde_json::to_value(self).map_err(|e| Error::Numerical(e.to_string()))?;
        Ok(canonical_json(&v))
    }
}

/// `x` rounded to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn format_float(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&round15(x)).unwrap_or_else(|_| "null".into())
    } else {
        format!("\"{x}\"")
    }
}

/// Sorted keys, two-space indentation, floats at 15 significant digits.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                out.push_str(&n.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap_or_default()),
        Value::Array(a) => {
            if a.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(x, depth + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(m) => {
            if m.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&serde_json::to_string(k).unwrap_or_default());
                out.push_str(": ");
                write_value(&m[*k], depth + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
    }
}

/// Write the table as CSV, sorted by value then `k`.
pub fn emit_csv(table: &SpectrumTable, path: &Path) -> Result<()> {
    let mut rows = table.rows.clone();
    rows.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.k.cmp(&b.k)));
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    w.write_record(["value", "multiplicity", "branch", "k", "lambda", "error_estimate"])?;
    let opt = |x: Option<f64>| x.map(format_float).unwrap_or_default();
    for r in rows {
        let branch = match r.branch {
            Branch::Z => "Zk",
            Branch::Continuous => "continuous",
        };
        w.write_record([
            format_float(r.value),
            r.multiplicity.to_string(),
            branch.to_string(),
            r.k.to_string(),
            opt(r.lambda),
            opt(r.error_estimate),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Run a job. The result is independent of the thread count.
pub fn run_job(config: &JobConfig) -> Result<ResultEnvelope> {
    config.validate()?;
    let start = Instant::now();
    let inputs = serde_json::to_value(config).map_err(|e| Error::Numerical(e.to_string()))?;
    let mut notes = Vec::new();
    let (results, status, table) = match &config.job {
        Job::HopfSpectrum(j) => run_hopf(j, &mut notes)?,
        Job::CircleScan(j) => run_scan(j, &mut notes)?,
        Job::ModelCheck(j) => run_model_check(j, &mut notes)?,
        Job::Geometry(j) => run_geometry(j, &mut notes)?,
    };
    Ok(ResultEnvelope {
        kind: config.kind().into(),
        version: env!("CARGO_PKG_VERSION").into(),
        inputs,
        results,
        status,
        notes,
        wall_time_s: config.record_wall_time.then(|| start.elapsed().as_secs_f64()),
        table,
    })
}

type JobOutput = (Value, Status, Option<SpectrumTable>);

fn run_hopf(j: &HopfJob, notes: &mut Vec<String>) -> Result<JobOutput> {
    let fluxes = flux_vector("job.fluxes", &j.fluxes)?;
    let points = match &j.points {
        Some(p) => p.clone(),
        None => [HopfPoint::North, HopfPoint::South].into_iter().cycle().take(fluxes.len()).collect(),
    };
    let points = if j.points.is_none() && fluxes.len() > 2 {
        (0..fluxes.len())
            .map(|i| HopfPoint::Angles {
                colatitude: PI * (i as f64 + 0.5) / fluxes.len() as f64,
                longitude: 0.0,
            })
            .collect()
    } else {
        points
    };
    let cfg = HopfConfig::new(fluxes, points)?;
    let split = cfg.split();
    let provider = NumericalProvider { params: j.solver.into() };
    let kernel = kernel_dimension(&cfg, &provider, j.kernel_tolerance)?;
    let mut status = if kernel.confident { Status::Pass } else { Status::Inconclusive };
    if !kernel.confident {
        notes.push("kernel count is not certain within the S² error estimates".into());
    }
    let table = match j.window {
        Some([a, b]) => {
            let t = assemble_spectrum(&cfg, (a, b), &provider)?;
            if t.flagged {
                status = status.max(Status::Inconclusive);
                notes.push("some S² eigenvalues did not converge to the solver tolerance".into());
            }
            Some(t)
        }
        None => None,
    };
    let results = json!({
        "c": split.c,
        "m": split.m,
        "kernel_dim": kernel.count,
        "kernel_confident": kernel.confident,
        "kernel_exact": kernel.exact,
        "rows": table.as_ref().map(|t| t.rows.clone()),
        "merged": table.as_ref().map(|t| t.merged(1e-6)),
        "total_multiplicity": table.as_ref().map(|t| t.total_multiplicity()),
    });
    Ok((results, status, table))
}

fn run_scan(j: &CircleScanJob, notes: &mut Vec<String>) -> Result<JobOutput> {
    let rows = circle_zero_mode_scan(&j.alphas, j.solver.into(), j.margin)?;
    let status = rows
        .iter()
        .map(|r| match r.status {
            ScanStatus::Pass => Status::Pass,
            ScanStatus::Inconclusive => Status::Inconclusive,
            ScanStatus::Fail => Status::Fail,
        })
        .max()
        .unwrap_or(Status::Pass);
    for r in rows.iter().filter(|r| r.status != ScanStatus::Pass) {
        notes.push(format!("alpha = {}: {:?}", r.alpha, r.status));
    }
    Ok((json!({ "rows": rows }), status, None))
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    threshold: f64,
    pass: bool,
}

fn random_seq(rng: &mut ChaCha8Rng, width: i64) -> BTreeMap<i64, Complex64> {
    (-width..=width)
        .map(|m| (m, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect()
}

fn run_model_check(j: &ModelCheckJob, notes: &mut Vec<String>) -> Result<JobOutput> {
    let grid = RadialGrid::default();
    let mut rng = ChaCha8Rng::seed_from_u64(j.seed);
    let mut residual: f64 = 0.0;
    let mut norm_err: f64 = 0.0;
    let mut graph_margin = f64::INFINITY;
    for &alpha in &j.alphas {
        for sign in [DeficiencySign::PlusI, DeficiencySign::MinusI] {
            for _ in 0..j.samples {
                let tube = ModelTube::new(rng.gen_range(1.0..8.0), alpha)?;
                let f = deficiency_element(tube, random_seq(&mut rng, 3), sign)?;
                residual = residual.max(f.relative_residual(&grid)?);
            }
        }
        let bound = graph_norm_lower_bound(alpha)?;
        for ext in [Extension::Plus, Extension::Minus] {
            let mode = SingularMode::new(ModelTube::new(3.0, alpha)?, random_seq(&mut rng, 2), ext)?;
            let exact = singular_l2_norm(&mode)?;
            let quad = mode.to_function().sample(&grid).norm_sq(&grid)?;
            norm_err = norm_err.max((quad - exact).abs() / exact);
            let g = graph_norm_sq(&mode.to_function(), &grid)?;
            graph_margin = graph_margin.min(g - bound * mode.l2_sq());
        }
    }
    let mut action_err: f64 = 0.0;
    for &alpha in &j.alphas {
        for ext in [Extension::Plus, Extension::Minus] {
            for m in -j.j_max..=j.j_max {
                let lambda = BTreeMap::from([(m, Complex64::new(1.0, 0.0))]);
                let mode = SingularMode::new(ModelTube::new(2.0 * PI, alpha)?, lambda, ext)?;
                let exact = apply_extension_action(&mode).sample(&grid);
                let direct = mode.to_function().apply_dirac(&grid);
                let r = (exact.sub(&direct).norm_sq_on_grid(&grid)? / exact.norm_sq(&grid)?).sqrt();
                action_err = action_err.max(r);
            }
        }
    }
    let c_half = (c_alpha(0.5)?.value - PI / 4.0).abs();
    let checks = vec![
        Check { name: "deficiency_residual", value: residual, threshold: 1e-5, pass: residual <= 1e-5 },
        Check { name: "extension_action", value: action_err, threshold: 1e-5, pass: action_err <= 1e-5 },
        Check { name: "singular_norm", value: norm_err, threshold: 1e-5, pass: norm_err <= 1e-5 },
        Check { name: "graph_norm_margin", value: graph_margin, threshold: -1e-6, pass: graph_margin >= -1e-6 },
        Check { name: "c_alpha_half", value: c_half, threshold: 1e-8, pass: c_half <= 1e-8 },
    ];
    let status = if checks.iter().all(|c| c.pass) { Status::Pass } else { Status::Fail };
    for c in checks.iter().filter(|c| !c.pass) {
        notes.push(format!("{} = {} misses {}", c.name, c.value, c.threshold));
    }
    Ok((json!({ "checks": checks }), status, None))
}

fn run_geometry(j: &GeometryJob, notes: &mut Vec<String>) -> Result<JobOutput> {
    let curves: Vec<KnotCurve> = j.points.iter().map(|p| hopf_preimage(&p.to_s2())).collect::<Result<_>>()?;
    let n = curves.len();
    let mut link = vec![vec![0i64; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let l = linking_number(&curves[a], &curves[b])?;
            link[a][b] = l;
            link[b][a] = l;
        }
    }
    let mut status = Status::Pass;
    if link.iter().enumerate().any(|(a, row)| row.iter().enumerate().any(|(b, &l)| a != b && l != 1)) {
        status = Status::Fail;
        notes.push("Hopf fibers do not link pairwise once".into());
    }
    let mut results = Map::new();
    results.insert("linking".into(), json!(link));
    if let Some(f) = &j.fluxes {
        let alphas: Vec<f64> = f.iter().map(|a| a.to_f64()).collect();
        let slopes = (0..n).map(|k| slope_c_k(&alphas, &link, k)).collect::<Result<Vec<_>>>()?;
        results.insert("slopes".into(), json!(slopes));
    }
    let mut knots = Vec::new();
    for t in &j.torus_knots {
        let curve = Arc::new(KnotCurve::new(Arc::new(TorusCurve {
            latitude: t.latitude,
            p: t.p,
            q: t.q,
        }))?);
        let frame = seifert_frame(curve, Arc::new(TorusNormal {
            latitude: t.latitude,
            p: t.p,
            q: t.q,
        }))?;
        let residual = frame.darboux_residual(1e-3)?;
        if residual > j.darboux_tolerance {
            status = Status::Fail;
            notes.push(format!("Darboux residual {residual} for torus knot ({}, {})", t.p, t.q));
        }
        knots.push(json!({
            "p": t.p,
            "q": t.q,
            "length": frame.curve().length(),
            "max_curvature": frame.max_curvature(),
            "delta_bound": delta_bound(&frame, 0.1),
            "darboux_residual": residual,
        }));
    }
    results.insert("torus_knots".into(), json!(knots));
    let dists: Vec<Flux> = j.flux_pairs.iter().map(|[a, b]| flux_distance(*a, *b)).collect();
    results.insert("flux_distances".into(), json!(dists));
    Ok((Value::Object(results), status, None))
}

/// Write `<stem>.json` and, for spectra, `<stem>.csv` into `dir`.
pub fn write_outputs(envelope: &ResultEnvelope, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let json_path = dir.join(format!("{stem}.json"));
    std::fs::write(&json_path, envelope.to_canonical_json()?)?;
    let mut out = vec![json_path];
    if let Some(t) = &envelope.table {
        let csv_path = dir.join(format!("{stem}.csv"));
        emit_csv(t, &csv_path)?;
        out.push(csv_path);
    }
    Ok(out)
}

/// Load, run and write a job file.
pub fn execute(job_path: &Path, out_dir: &Path) -> Result<(ResultEnvelope, Vec<PathBuf>)> {
    let cfg = JobConfig::from_path(job_path)?;
    let stem = cfg.output.stem.clone().unwrap_or_else(|| {
        job_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "result".into())
    });
    let env = run_job(&cfg)?;
    let paths = write_outputs(&env, out_dir, &stem)?;
    Ok((env, paths))
}
