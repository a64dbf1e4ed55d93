//! Batch driver: reads a JSON run configuration, evaluates the requested
//! command over a set of `z` values and writes a CSV table plus a JSON
//! summary.
//!
//! Exit codes: 0 when every identity passes, 1 on a tolerance violation,
//! 2 on invalid input, 3 on a numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::{CoefficientSet, ComplexValue, PresetSpec, TableSpec};
use crate::error::{Error, Result};
use crate::fundmat::JostSet;
use crate::jost::JostLayout;
use crate::linalg::C64;
use crate::roots::compute_roots;
use crate::verify::{
    det_identity_check, eig_count, large_z_check, trace_check_with, wronskian_x_law, Circle, Identity, TraceOptions,
    VerificationReport,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "ndtrace", version, about = "Trace formula and perturbation determinant checks for higher-order differential operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandKind,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for z-sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    /// Characteristic roots at every z.
    Roots,
    /// Rescaled Jost solutions at the configured x points.
    JostDump,
    /// Normalized Wronskian and its x-law.
    Wronskian,
    /// Trace formula.
    TraceCheck,
    /// Perturbation determinant against the normalized Wronskian.
    DetCheck,
    /// Zeros of the normalized Wronskian inside contours.
    EigCount,
    /// Decay of `Δ − 1` along rays.
    LargeZ,
    /// Every command listed under `commands` in the config.
    Run,
}

impl CommandKind {
    pub fn file_stem(self) -> &'static str {
        match self {
            CommandKind::Roots => "roots",
            CommandKind::JostDump => "jost-dump",
            CommandKind::Wronskian => "wronskian",
            CommandKind::TraceCheck => "trace-check",
            CommandKind::DetCheck => "det-check",
            CommandKind::EigCount => "eig-count",
            CommandKind::LargeZ => "large-z",
            CommandKind::Run => "run",
        }
    }
}

/// Points in the `z` plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ZGrid {
    Points { points: Vec<ComplexValue> },
    /// `n_re × n_im` tensor grid, both ends included.
    Rectangle { re: [f64; 2], im: [f64; 2], n_re: usize, n_im: usize },
    /// `t·direction/|direction|` for each magnitude `t`.
    Ray { direction: ComplexValue, magnitudes: Vec<f64> },
    /// `count` equispaced points on a circle.
    Contour { center: ComplexValue, radius: f64, count: usize },
}

impl ZGrid {
    pub fn points(&self) -> Result<Vec<C64>> {
        let pts = match self {
            ZGrid::Points { points } => points.iter().map(|p| p.value()).collect(),
            ZGrid::Rectangle { re, im, n_re, n_im } => {
                if *n_re == 0 || *n_im == 0 {
                    return Err(Error::Config("rectangle needs at least one point per direction".into()));
                }
                let lin = |r: &[f64; 2], n: usize, k: usize| if n == 1 { r[0] } else { r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64 };
                let mut v = Vec::with_capacity(n_re * n_im);
                for b in 0..*n_im {
                    for a in 0..*n_re {
                        v.push(C64::new(lin(re, *n_re, a), lin(im, *n_im, b)));
                    }
                }
                v
            }
            ZGrid::Ray { direction, magnitudes } => {
                let d = direction.value();
                if d.norm() == 0.0 {
                    return Err(Error::Config("ray direction must be nonzero".into()));
                }
                magnitudes.iter().map(|t| d / d.norm() * *t).collect()
            }
            ZGrid::Contour { center, radius, count } => {
                let c = Circle { center: center.value(), radius: *radius };
                (0..*count).map(|k| c.point(2.0 * std::f64::consts::PI * k as f64 / *count as f64)).collect()
            }
        };
        Ok(pts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourSpec {
    pub center: ComplexValue,
    pub radius: f64,
    /// Expected number of enclosed eigenvalues; checked when present.
    #[serde(default)]
    pub expected: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySpec {
    pub direction: ComplexValue,
    pub magnitudes: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub trace: f64,
    pub det: f64,
    pub x_law: f64,
    /// Flag Jost solutions whose integrator error per unit length exceeds this.
    pub defect_tol: f64,
    /// Flag reports whose truncation estimate exceeds this (relative).
    pub quad_tol: f64,
    /// Initial z-differencing step; derived from `z` when absent.
    pub z_step: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { trace: 1e-5, det: 1e-4, x_law: 1e-8, defect_tol: 1e-8, quad_tol: 1e-6, z_step: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub order: usize,
    /// Preset coefficients. Exactly one of this and `coefficient_table`.
    #[serde(default)]
    pub coefficients: Option<PresetSpec>,
    /// JSON file holding one optional table per coefficient, relative to the
    /// config file.
    #[serde(default)]
    pub coefficient_table: Option<PathBuf>,
    #[serde(default)]
    pub z: Option<ZGrid>,
    #[serde(default)]
    pub x_points: Option<Vec<f64>>,
    #[serde(default)]
    pub window: Option<f64>,
    #[serde(default)]
    pub contours: Vec<ContourSpec>,
    /// Ray for `large-z`; falls back to `z` when that is a ray, then to
    /// `i·{4, 32, 256}`.
    #[serde(default)]
    pub ray: Option<RaySpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub commands: Vec<CommandKind>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!("unsupported schema_version {} (expected {SCHEMA_VERSION})", cfg.schema_version)));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        if let (Some(t), Some(dir)) = (&cfg.coefficient_table, path.parent()) {
            if t.is_relative() {
                cfg.coefficient_table = Some(dir.join(t));
            }
        }
        Ok(cfg)
    }

    /// Checks everything that does not need numerics.
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::Config("order must be at least 1".into()));
        }
        if self.coefficients.is_some() == self.coefficient_table.is_some() {
            return Err(Error::Config("give exactly one of `coefficients` and `coefficient_table`".into()));
        }
        let t = &self.tolerances;
        for (name, v) in [("trace", t.trace), ("det", t.det), ("x_law", t.x_law), ("defect_tol", t.defect_tol), ("quad_tol", t.quad_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("tolerance `{name}` must be positive")));
            }
        }
        if let Some(h) = t.z_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Config("tolerance `z_step` must be positive".into()));
            }
        }
        if let Some(w) = self.window {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Config("window must be positive".into()));
            }
        }
        if let Some(xs) = &self.x_points {
            if xs.is_empty() || xs.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config("x_points must be finite and non-empty".into()));
            }
        }
        if self.commands.contains(&CommandKind::Run) {
            return Err(Error::Config("`run` cannot be listed under commands".into()));
        }
        Ok(())
    }

    pub fn coefficient_set(&self) -> Result<CoefficientSet> {
        match (&self.coefficients, &self.coefficient_table) {
            (Some(spec), None) => CoefficientSet::preset(self.order, spec),
            (None, Some(path)) => {
                let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                let tables: Vec<Option<TableSpec>> = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                CoefficientSet::custom(self.order, &tables)
            }
            _ => Err(Error::Config("give exactly one of `coefficients` and `coefficient_table`".into())),
        }
    }

    /// The configured z values; each must pass the critical-ray floor.
    pub fn z_points(&self) -> Result<Vec<C64>> {
        let zs = match &self.z {
            Some(g) => g.points()?,
            None => return Err(Error::Config("this command needs a `z` specification".into())),
        };
        if zs.is_empty() {
            return Err(Error::Config("the z specification is empty".into()));
        }
        for &z in &zs {
            compute_roots(self.order, z)?;
        }
        Ok(zs)
    }

    fn x_points(&self) -> Vec<f64> {
        let mut xs = self.x_points.clone().unwrap_or_else(|| vec![-1.0, 0.0, 1.0]);
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }
}

/// One entry of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub identity: String,
    pub n_points: usize,
    pub max_rel_err: f64,
    pub pass: bool,
}

/// Output of one command: a CSV table and its summary entries.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: Vec<SummaryEntry>,
}

/// `re±imi` with shortest round-trip exponents, e.g. `-4e0+0e0i`.
pub fn fmt_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:e}{}{:e}i", z.re, sign, z.im.abs())
}

pub fn fmt_real(x: f64) -> String {
    format!("{x:e}")
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

fn summary_entry(identity: &str, errs: &[f64], pass: bool) -> SummaryEntry {
    SummaryEntry { identity: identity.into(), n_points: errs.len(), max_rel_err: errs.iter().copied().fold(0.0, f64::max), pass }
}

fn report_row(r: &VerificationReport) -> Vec<String> {
    vec![
        r.identity.name().into(),
        r.z.iter().map(|z| fmt_complex(*z)).collect::<Vec<_>>().join(";"),
        fmt_complex(r.lhs),
        fmt_complex(r.rhs),
        fmt_real(r.abs_err),
        fmt_real(r.rel_err),
        fmt_real(r.truncation_estimate),
        r.flags.join(";"),
    ]
}

fn report_table(identity: Identity, reports: Vec<VerificationReport>, tol: f64, quad_tol: f64) -> Table {
    let mut reports = reports;
    for r in &mut reports {
        if r.truncation_estimate > quad_tol * r.lhs.norm().max(r.rhs.norm()).max(1.0) {
            r.flags.push("truncation estimate above quad_tol".into());
        }
    }
    let errs: Vec<f64> = reports.iter().map(|r| r.rel_err).collect();
    let pass = reports.iter().all(|r| r.is_finite() && r.rel_err <= tol);
    Table {
        header: header(&["identity", "z", "lhs", "rhs", "abs_err", "rel_err", "truncation_estimate", "flags"]),
        rows: reports.iter().map(report_row).collect(),
        summary: vec![summary_entry(identity.name(), &errs, pass)],
    }
}

fn roots_table(cfg: &RunConfig) -> Result<Table> {
    let zs = cfg.z_points()?;
    let n = cfg.order;
    let mut cols = vec!["z".to_string(), "n".to_string()];
    cols.extend((0..n).map(|k| format!("root_{k}")));
    cols.push("truncation_estimate".into());
    let rows = zs
        .par_iter()
        .map(|&z| {
            let rs = compute_roots(n, z)?;
            // agreement with the companion eigenvalues as the error column
            let eig = rs.companion_eigenvalues();
            let err = rs
                .roots
                .iter()
                .map(|r| eig.iter().map(|e| (e - r).norm()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max);
            let mut row = vec![fmt_complex(z), rs.n.to_string()];
            row.extend(rs.roots.iter().map(|r| fmt_complex(*r)));
            row.push(fmt_real(err));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { header: cols, rows, summary: Vec::new() })
}

fn jost_dump_table(cfg: &RunConfig, cs: &CoefficientSet) -> Result<Table> {
    let zs = cfg.z_points()?;
    let xs = cfg.x_points();
    let n = cfg.order;
    let mut cols = header(&["z", "j", "side", "x", "anchor", "log_prefactor"]);
    cols.extend((0..n).map(|k| format!("w_{k}")));
    cols.extend(header(&["tail_deviation", "residual", "truncation_estimate", "flags"]));
    let blocks = zs
        .par_iter()
        .map(|&z| {
            let rs = compute_roots(n, z)?;
            let layout = JostLayout::new(&rs, cs)?;
            let set = JostSet::compute(&rs, cs, &layout, &xs)?;
            let mut rows = Vec::new();
            for sol in &set.solutions {
                for (i, &x) in xs.iter().enumerate() {
                    let mut row = vec![fmt_complex(z), sol.j.to_string(), sol.side.to_string(), fmt_real(x), fmt_real(sol.anchor), fmt_complex(sol.log_prefactor(i))];
                    row.extend(sol.w_samples[i].iter().map(|w| fmt_complex(*w)));
                    row.push(fmt_real(sol.tail_deviation));
                    row.push(fmt_real(sol.residual_report));
                    row.push(fmt_real(sol.tail_deviation));
                    row.push(if sol.residual_report > cfg.tolerances.defect_tol { "residual above defect_tol".into() } else { String::new() });
                    rows.push(row);
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { header: cols, rows: blocks.into_iter().flatten().collect(), summary: Vec::new() })
}

fn wronskian_table(cfg: &RunConfig, cs: &CoefficientSet) -> Result<Table> {
    let zs = cfg.z_points()?;
    let xs = cfg.x_points();
    let reports = zs.par_iter().map(|&z| wronskian_x_law(cs, z, &xs)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut errs = Vec::new();
    for (z, rep) in zs.iter().zip(&reports) {
        for (i, v) in rep.values.iter().enumerate() {
            rows.push(vec![
                fmt_complex(*z),
                fmt_real(v.x),
                fmt_complex(v.delta),
                fmt_complex(v.log_w),
                fmt_complex(v.log_w0),
                fmt_complex(rep.predicted[i]),
                fmt_real(rep.rel_err[i]),
                fmt_real(rep.rel_err[i]),
            ]);
        }
        errs.push(rep.max_rel_err());
    }
    let pass = errs.iter().all(|e| *e <= cfg.tolerances.x_law);
    Ok(Table {
        header: header(&["z", "x", "delta", "log_w", "log_w0", "predicted", "rel_err", "truncation_estimate"]),
        rows,
        summary: vec![summary_entry(Identity::WronskianXLaw.name(), &errs, pass)],
    })
}

fn eig_count_table(cfg: &RunConfig, cs: &CoefficientSet) -> Result<Table> {
    if cfg.contours.is_empty() {
        return Err(Error::Config("eig-count needs at least one entry under `contours`".into()));
    }
    let mut rows = Vec::new();
    let mut errs = Vec::new();
    let mut pass = true;
    for spec in &cfg.contours {
        let circle = Circle { center: spec.center.value(), radius: spec.radius };
        let c = eig_count(cs, &circle)?;
        let dev = (c.raw - c.count as f64).norm();
        errs.push(dev);
        if let Some(e) = spec.expected {
            pass &= e == c.count;
        }
        rows.push(vec![
            fmt_complex(circle.center),
            fmt_real(circle.radius),
            c.count.to_string(),
            spec.expected.map(|e| e.to_string()).unwrap_or_default(),
            fmt_complex(c.raw),
            fmt_complex(c.zero_sum),
            c.nodes.to_string(),
            fmt_real(c.min_abs_delta),
            fmt_real(dev),
        ]);
    }
    Ok(Table {
        header: header(&["center", "radius", "count", "expected", "raw", "zero_sum", "nodes", "min_abs_delta", "truncation_estimate"]),
        rows,
        summary: vec![summary_entry(Identity::EigCount.name(), &errs, pass)],
    })
}

fn large_z_table(cfg: &RunConfig, cs: &CoefficientSet) -> Result<Table> {
    let (direction, magnitudes) = match (&cfg.ray, &cfg.z) {
        (Some(r), _) => (r.direction.value(), r.magnitudes.clone()),
        (None, Some(ZGrid::Ray { direction, magnitudes })) => (direction.value(), magnitudes.clone()),
        _ => (C64::new(0.0, 1.0), vec![4.0, 32.0, 256.0]),
    };
    if direction.norm() == 0.0 {
        return Err(Error::Config("ray direction must be nonzero".into()));
    }
    for t in &magnitudes {
        compute_roots(cfg.order, direction / direction.norm() * *t)?;
    }
    let rep = large_z_check(cs, direction, &magnitudes)?;
    let rows = (0..rep.z.len())
        .map(|i| {
            vec![
                fmt_complex(rep.z[i]),
                fmt_complex(rep.delta[i]),
                fmt_real(rep.deviation[i]),
                fmt_real(rep.slope),
                fmt_real(rep.bound),
                fmt_real(rep.deviation[i]),
            ]
        })
        .collect();
    let worst = rep.deviation.last().copied().unwrap_or(0.0);
    Ok(Table {
        header: header(&["z", "delta", "deviation", "slope", "bound", "truncation_estimate"]),
        rows,
        summary: vec![summary_entry(Identity::LargeZ.name(), &[worst], rep.pass)],
    })
}

/// Evaluates one command.
pub fn execute(cmd: CommandKind, cfg: &RunConfig) -> Result<Table> {
    let cs = cfg.coefficient_set()?;
    if cs.order != cfg.order {
        return Err(Error::Config("coefficient order mismatch".into()));
    }
    match cmd {
        CommandKind::Roots => roots_table(cfg),
        CommandKind::JostDump => jost_dump_table(cfg, &cs),
        CommandKind::Wronskian => wronskian_table(cfg, &cs),
        CommandKind::TraceCheck => {
            let zs = cfg.z_points()?;
            let opts = TraceOptions { window: cfg.window, z_step: cfg.tolerances.z_step };
            let reports = zs.par_iter().map(|&z| trace_check_with(&cs, z, &opts)).collect::<Result<Vec<_>>>()?;
            Ok(report_table(Identity::TraceFormula, reports, cfg.tolerances.trace, cfg.tolerances.quad_tol))
        }
        CommandKind::DetCheck => {
            let zs = cfg.z_points()?;
            let reports = zs.par_iter().map(|&z| det_identity_check(&cs, z)).collect::<Result<Vec<_>>>()?;
            Ok(report_table(Identity::DetIdentity, reports, cfg.tolerances.det, cfg.tolerances.quad_tol))
        }
        CommandKind::EigCount => eig_count_table(cfg, &cs),
        CommandKind::LargeZ => large_z_table(cfg, &cs),
        CommandKind::Run => Err(Error::Config("`run` is not a table command".into())),
    }
}

pub fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.into()))?;
    w.write_record(&table.header).map_err(|e| Error::Io(e.into()))?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

/// Outcome of a CLI invocation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: Vec<SummaryEntry>,
    pub written: Vec<PathBuf>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.summary.iter().all(|e| e.pass)
    }
}

/// Runs `cmd` and writes `<command>.csv` files and `summary.json` into `out`.
pub fn run(cmd: CommandKind, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    cfg.validate()?;
    let cmds = if cmd == CommandKind::Run {
        if cfg.commands.is_empty() {
            return Err(Error::Config("`run` needs a non-empty `commands` list".into()));
        }
        cfg.commands.clone()
    } else {
        vec![cmd]
    };
    let tables = cmds.iter().map(|&c| execute(c, cfg)).collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(out)?;
    let mut written = Vec::new();
    let mut summary = Vec::new();
    for (c, t) in cmds.iter().zip(tables) {
        let path = out.join(format!("{}.csv", c.file_stem()));
        write_csv(&path, &t)?;
        written.push(path);
        summary.extend(t.summary);
    }
    let path = out.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.into()))?;
    fs::write(&path, text + "\n")?;
    written.push(path);
    Ok(Outcome { summary, written })
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_input_error() {
        2
    } else {
        3
    }
}

/// Parses `args` (including the program name) and runs; returns the exit
/// code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let Some(config) = &cli.config else {
        eprintln!("error: --config is required");
        return 2;
    };
    let cfg = match RunConfig::load(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let out = cli.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 3;
        }
    };
    match pool.install(|| run(cli.command, &cfg, &out)) {
        Ok(outcome) => {
            let mut msg = String::new();
            for e in &outcome.summary {
                let _ = writeln!(msg, "{:<16} n={:<4} max_rel_err={:.3e} {}", e.identity, e.n_points, e.max_rel_err, if e.pass { "pass" } else { "FAIL" });
            }
            print!("{msg}");
            if outcome.pass() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

