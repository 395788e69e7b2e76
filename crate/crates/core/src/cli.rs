//! Command-line front end.
//!
//! Exit codes: 0 when a check passes or a scan completes, 2 when an
//! inequality fails (the report is still written), 1 on usage or input
//! errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::branching::{
    appendix_inequality, build_branching_plans, renyi_contradiction, sweep, write_sweep_csv, BranchingScenario,
    ScenarioFile, Tripod, TripodPoint, ENSEMBLE_CELLS,
};
use crate::coefficients::{f_vol, s_vol, sigma, CurvatureParams};
use crate::curvature::{
    check_kn_convex, circle_obstruction, default_battery, eighths, random_uniform_pairs, verify_cd_infty, verify_cde,
    CurvatureReport, DEFAULT_SEED,
};
use crate::error::{Error, Result};
use crate::geometry_scan::{
    bg_boundary_check, bg_ratio_scan, classify, density_ratio_trace, density_ratio_trace_tripod, lipschitz_modulus,
    random_close_pairs, DensityRatioTrace,
};
use crate::space1d::{Space1D, SpaceDescriptor, Topology1D};
use crate::TOOL_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "curvlab", version, about = "Curvature-dimension checks on one-dimensional spaces")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Space description (JSON) or, for tripod commands, a scenario file.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long = "grid-step", global = true)]
    pub grid_step: Option<f64>,
    #[arg(long = "k", global = true, allow_hyphen_values = true)]
    pub k: Option<f64>,
    #[arg(long = "n", global = true)]
    pub n: Option<f64>,
    /// Output format; JSON by default, CSV for the coefficient table.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// (K,N)-convexity of the weight on the default triple battery.
    CheckKnConvex,
    /// Entropic curvature-dimension check on random uniform pairs.
    VerifyCde {
        #[arg(long, default_value_t = 50)]
        pairs: usize,
    },
    /// K-convexity of the entropy on random uniform pairs.
    VerifyCdInfty {
        #[arg(long, default_value_t = 50)]
        pairs: usize,
    },
    /// Violating triple around the maximum of a circle weight.
    CircleObstruction,
    /// Monotonicity of m(B_r(x))/F(r).
    BgScan {
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
    },
    /// Boundary measure bound on a list of radii.
    BgBoundary {
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
    },
    /// Trace of m(B_r(x))/r^k for decreasing r.
    DensityRatio {
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        #[arg(long, default_value_t = 1)]
        power: u32,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        /// Use the center of the tripod instead of a space.
        #[arg(long)]
        tripod: bool,
    },
    /// Lipschitz modulus of x ↦ m(B_r(x))/r against its bound.
    Lipschitz {
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        #[arg(long, default_value_t = 500)]
        pairs: usize,
    },
    /// Model space and curvature parameters of a space.
    Classify,
    /// Shannon inequality along the branching plans on the tripod.
    TripodShannon {
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// Rényi ratio along the branching plans on the tripod.
    TripodRenyi {
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// Table of σ, S and F.
    CoefficientsTable {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-1,0,1")]
        ks: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        ns: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
        ts: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        thetas: Vec<f64>,
    },
}

impl RunConfig {
    pub fn format(&self) -> Format {
        match (self.format, &self.command) {
            (Some(f), _) => f,
            (None, Command::CoefficientsTable { .. }) => Format::Csv,
            (None, _) => Format::Json,
        }
    }
}

/// Report envelope shared by every command.
#[derive(Debug, Serialize)]
pub struct Report {
    pub paper_check_id: String,
    pub params: Value,
    pub margin: f64,
    pub witness: Value,
    pub seed: u64,
    pub grid_step: Option<f64>,
    pub tool_version: String,
    pub passed: bool,
    pub detail: Value,
}

/// What a command produced.
pub enum Output {
    Report(Report),
    Csv(String),
}

struct Outcome {
    output: Output,
    exit: i32,
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs a command, writes its output and returns the exit code.
pub fn run(config: &RunConfig) -> Result<i32> {
    let outcome = execute(config)?;
    let body = render(&outcome.output, config.format())?;
    match &config.output {
        Some(path) => fs::write(path, body)?,
        None => io::stdout().write_all(body.as_bytes())?,
    }
    Ok(outcome.exit)
}

fn render(output: &Output, format: Format) -> Result<String> {
    Ok(match (output, format) {
        (Output::Csv(s), _) => s.clone(),
        (Output::Report(r), Format::Json) => serde_json::to_string_pretty(r)? + "\n",
        (Output::Report(r), Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["paper_check_id", "margin", "passed", "seed", "grid_step", "tool_version"])?;
            w.write_record([
                r.paper_check_id.clone(),
                r.margin.to_string(),
                r.passed.to_string(),
                r.seed.to_string(),
                r.grid_step.map(|g| g.to_string()).unwrap_or_default(),
                r.tool_version.clone(),
            ])?;
            String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
                .map_err(|e| Error::Schema(e.to_string()))?
        }
    })
}

fn load_space(config: &RunConfig, default: impl FnOnce() -> Result<Space1D>) -> Result<Space1D> {
    let space = match &config.input {
        Some(path) => SpaceDescriptor::from_json(&fs::read_to_string(path)?)?.build()?,
        None => default()?,
    };
    match config.grid_step {
        Some(h) => space.with_grid_step(h),
        None => Ok(space),
    }
}

fn load_scenario(config: &RunConfig) -> Result<(Tripod, BranchingScenario)> {
    let (tripod, mut s) = match &config.input {
        Some(path) => ScenarioFile::from_json(&fs::read_to_string(path)?)?.split()?,
        None => (Tripod::symmetric(1.0)?, BranchingScenario::symmetric(0.01)),
    };
    if let Some(n) = config.n {
        s.n = n;
    }
    s.validate()?;
    Ok((tripod, s))
}

fn params(config: &RunConfig, k: f64, n: f64) -> Result<CurvatureParams> {
    CurvatureParams::new(config.k.unwrap_or(k), config.n.unwrap_or(n))
}

fn unit_interval() -> Result<Space1D> {
    Space1D::flat(Topology1D::Interval { length: 1.0 }, None)
}

fn center(space: &Space1D) -> f64 {
    match space.topology() {
        Topology1D::HalfLine => 0.0,
        _ => {
            let (lo, hi) = space.domain();
            0.5 * (lo + hi)
        }
    }
}

fn report_of(id: &str, r: &CurvatureReport, seed: u64, passed: bool, detail: Value) -> Result<Report> {
    Ok(Report {
        paper_check_id: id.to_string(),
        params: json!({"K": r.k, "N": r.n}),
        margin: r.max_violation,
        witness: serde_json::to_value(&r.witness)?,
        seed,
        grid_step: Some(r.grid_step),
        tool_version: TOOL_VERSION.to_string(),
        passed,
        detail,
    })
}

fn from_curvature(id: &str, mut r: CurvatureReport, seed: u64) -> Result<Outcome> {
    r.seed = Some(seed);
    let passed = r.passed();
    let detail = serde_json::to_value(&r)?;
    Ok(Outcome { output: Output::Report(report_of(id, &r, seed, passed, detail)?), exit: if passed { 0 } else { 2 } })
}

/// Ten radii up to 40% of the working domain.
fn default_radii(space: &Space1D) -> Vec<f64> {
    (1..=10).map(|i| 0.04 * i as f64 * space.length()).collect()
}

fn execute(config: &RunConfig) -> Result<Outcome> {
    let seed = config.seed;
    match &config.command {
        Command::CheckKnConvex => {
            let space = load_space(config, unit_interval)?;
            let p = params(config, 0.0, 2.0)?;
            let plans = default_battery(&space, seed);
            let r = check_kn_convex(space.weight(), &space, p, &plans, config.tol.unwrap_or(1e-6))?;
            from_curvature("kn-convexity", r, seed)
        }
        Command::VerifyCde { pairs } => {
            let space = load_space(config, unit_interval)?;
            let p = params(config, 0.0, 2.0)?;
            let battery = random_uniform_pairs(&space, *pairs, seed)?;
            let r = verify_cde(&space, p, &battery, &eighths(), config.tol.unwrap_or(5e-4))?;
            from_curvature("entropic-cd", r, seed)
        }
        Command::VerifyCdInfty { pairs } => {
            let space = load_space(config, unit_interval)?;
            let battery = random_uniform_pairs(&space, *pairs, seed)?;
            let r = verify_cd_infty(&space, config.k.unwrap_or(0.0), &battery, &eighths(), config.tol.unwrap_or(1e-3))?;
            from_curvature("entropy-k-convexity", r, seed)
        }
        Command::CircleObstruction => {
            let space = load_space(config, || Space1D::flat(Topology1D::Circle { radius: 1.0 }, None))?;
            let p = params(config, 1.0, 2.0)?;
            let mut r = circle_obstruction(&space, p)?;
            r.seed = Some(seed);
            let found = r.max_violation > 0.0;
            let detail = serde_json::to_value(&r)?;
            Ok(Outcome {
                output: Output::Report(report_of("circle-obstruction", &r, seed, found, detail)?),
                exit: if found { 0 } else { 2 },
            })
        }
        Command::BgScan { x, radii } => {
            let space = load_space(config, unit_interval)?;
            let p = params(config, 0.0, 2.0)?;
            let radii = radii.clone().unwrap_or_else(|| default_radii(&space));
            let r = bg_ratio_scan(&space, x.unwrap_or_else(|| center(&space)), p, &radii, config.tol.unwrap_or(1e-6))?;
            from_curvature("bg-ratio", r, seed)
        }
        Command::BgBoundary { x, radii } => {
            let space = load_space(config, unit_interval)?;
            let p = params(config, 0.0, 2.0)?;
            let radii = radii.clone().unwrap_or_else(|| default_radii(&space));
            let r =
                bg_boundary_check(&space, x.unwrap_or_else(|| center(&space)), p, &radii, config.tol.unwrap_or(1e-12))?;
            from_curvature("bg-boundary", r, seed)
        }
        Command::DensityRatio { x, power, radii, tripod } => {
            let radii = radii.clone().unwrap_or_else(|| (0..7).map(|i| 0.5f64.powi(i)).collect());
            let trace = if *tripod {
                let t = match &config.input {
                    Some(path) => ScenarioFile::from_json(&fs::read_to_string(path)?)?.split()?.0,
                    None => Tripod::symmetric(1.0)?,
                };
                density_ratio_trace_tripod(&t, TripodPoint::CENTER, *power, &radii)?
            } else {
                let space = load_space(config, unit_interval)?;
                density_ratio_trace(&space, x.unwrap_or_else(|| center(&space)), *power, &radii)?
            };
            trace_outcome(config, trace, seed)
        }
        Command::Lipschitz { radius, pairs } => {
            let space = load_space(config, unit_interval)?;
            let p = params(config, 0.0, 2.0)?;
            let battery = random_close_pairs(&space, *radius, *pairs, seed);
            let est = lipschitz_modulus(&space, *radius, &battery, p)?;
            let passed = est.report.passed();
            let detail = serde_json::to_value(&est)?;
            Ok(Outcome {
                output: Output::Report(report_of("lipschitz-modulus", &est.report, seed, passed, detail)?),
                exit: if passed { 0 } else { 2 },
            })
        }
        Command::Classify => {
            let space = load_space(config, unit_interval)?;
            let search = match (config.k, config.n) {
                (None, None) => vec![
                    CurvatureParams::new(-1.0, 2.0)?,
                    CurvatureParams::new(0.0, 2.0)?,
                    CurvatureParams::new(1.0, 2.0)?,
                ],
                _ => vec![params(config, 0.0, 2.0)?],
            };
            let c = classify(&space, &search)?;
            let (params_v, margin) = match &c.verdict {
                Some(v) => (serde_json::to_value(v.kn_params)?, v.max_violation),
                None => (Value::Null, f64::NAN),
            };
            let report = Report {
                paper_check_id: "classification".into(),
                params: params_v,
                margin,
                witness: Value::Null,
                seed,
                grid_step: Some(space.grid_step()),
                tool_version: TOOL_VERSION.into(),
                passed: c.verdict.is_some(),
                detail: serde_json::to_value(&c)?,
            };
            Ok(Outcome { output: Output::Report(report), exit: 0 })
        }
        Command::TripodShannon { eps } => {
            let (tripod, s) = load_scenario(config)?;
            let eps = eps.clone().unwrap_or_else(|| vec![0.05, 0.02, 0.01, 0.005, 0.002]);
            if config.format() == Format::Csv {
                let rows = sweep(&tripod, &s, &eps, ENSEMBLE_CELLS)?;
                return csv_outcome(|w| write_sweep_csv(&rows, w), 0);
            }
            let mut rows = Vec::new();
            for &e in &eps {
                let pair = build_branching_plans(&tripod, &s.with_eps(e))?;
                rows.push(appendix_inequality(&pair, &tripod, config.k.unwrap_or(0.0))?);
            }
            let last = rows.last().ok_or_else(|| Error::Domain("empty eps list".into()))?;
            let reproduced = rows.iter().all(|r| r.rhs_negative) && !last.holds;
            let report = Report {
                paper_check_id: "branching-shannon".into(),
                params: serde_json::to_value(s)?,
                margin: last.lhs - last.rhs,
                witness: json!({"eps": last.eps}),
                seed,
                grid_step: None,
                tool_version: TOOL_VERSION.into(),
                passed: reproduced,
                detail: json!({"tripod": tripod, "sweep": rows}),
            };
            Ok(Outcome { output: Output::Report(report), exit: if reproduced { 0 } else { 2 } })
        }
        Command::TripodRenyi { eps } => {
            let (tripod, s) = load_scenario(config)?;
            let eps = eps.clone().unwrap_or_else(|| vec![0.05, 0.02, 0.01, 0.005, 0.002, 0.001]);
            if config.format() == Format::Csv {
                let rows = sweep(&tripod, &s, &eps, ENSEMBLE_CELLS)?;
                return csv_outcome(|w| write_sweep_csv(&rows, w), 0);
            }
            let mut rows = Vec::new();
            for &e in &eps {
                let pair = build_branching_plans(&tripod, &s.with_eps(e))?;
                rows.push(renyi_contradiction(&pair, &tripod, s.n)?);
            }
            let last = *rows.last().ok_or_else(|| Error::Domain("empty eps list".into()))?;
            let report = Report {
                paper_check_id: "branching-renyi".into(),
                params: serde_json::to_value(s)?,
                margin: last.ratio - last.threshold,
                witness: json!({"eps": last.eps}),
                seed,
                grid_step: None,
                tool_version: TOOL_VERSION.into(),
                passed: last.contradiction,
                detail: json!({"tripod": tripod, "trace": rows}),
            };
            Ok(Outcome { output: Output::Report(report), exit: if last.contradiction { 0 } else { 2 } })
        }
        Command::CoefficientsTable { ks, ns, ts, thetas } => coefficients_table(ks, ns, ts, thetas, config.format()),
    }
}

fn csv_outcome(write: impl FnOnce(&mut Vec<u8>) -> Result<()>, exit: i32) -> Result<Outcome> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    let s = String::from_utf8(buf).map_err(|e| Error::Schema(e.to_string()))?;
    Ok(Outcome { output: Output::Csv(s), exit })
}

fn trace_outcome(config: &RunConfig, trace: DensityRatioTrace, seed: u64) -> Result<Outcome> {
    if config.format() == Format::Csv {
        return csv_outcome(|w| trace.write_csv(w), 0);
    }
    let report = Report {
        paper_check_id: "density-ratio".into(),
        params: json!({"k": trace.k}),
        margin: trace.ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        witness: json!({"x": trace.x}),
        seed,
        grid_step: config.grid_step,
        tool_version: TOOL_VERSION.into(),
        passed: true,
        detail: serde_json::to_value(&trace)?,
    };
    Ok(Outcome { output: Output::Report(report), exit: 0 })
}

/// One row of the coefficient table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientRow {
    pub t: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub theta: f64,
    pub sigma: f64,
    /// `S_{K,N}(θ)`.
    pub s_vol: f64,
    /// `F(θ)`, empty past the conjugate radius.
    pub f_vol: Option<f64>,
}

/// Rows ordered by `K`, then `N`, `θ`, `t`.
pub fn coefficient_rows(ks: &[f64], ns: &[f64], ts: &[f64], thetas: &[f64]) -> Result<Vec<CoefficientRow>> {
    let mut rows = Vec::new();
    for &k in ks {
        for &n in ns {
            let p = CurvatureParams::new(k, n)?;
            for &theta in thetas {
                let s = s_vol(p, theta)?;
                let f = f_vol(p, theta).ok();
                for &t in ts {
                    rows.push(CoefficientRow {
                        t,
                        k,
                        n,
                        theta,
                        sigma: sigma(t, p, theta)?.to_f64(),
                        s_vol: s,
                        f_vol: f,
                    });
                }
            }
        }
    }
    Ok(rows)
}

fn coefficients_table(ks: &[f64], ns: &[f64], ts: &[f64], thetas: &[f64], format: Format) -> Result<Outcome> {
    let rows = coefficient_rows(ks, ns, ts, thetas)?;
    match format {
        Format::Csv => csv_outcome(
            |w| {
                let mut out = csv::Writer::from_writer(w);
                for r in &rows {
                    out.serialize(r)?;
                }
                out.flush()?;
                Ok(())
            },
            0,
        ),
        Format::Json => {
            let report = Report {
                paper_check_id: "coefficients-table".into(),
                params: json!({"K": ks, "N": ns}),
                margin: 0.0,
                witness: Value::Null,
                seed: 0,
                grid_step: None,
                tool_version: TOOL_VERSION.into(),
                passed: true,
                detail: serde_json::to_value(&rows)?,
            };
            Ok(Outcome { output: Output::Report(report), exit: 0 })
        }
    }
}
