//! Command-line front end: simulation campaigns, density tables,
//! sample-vs-density comparisons, ceiling scans and the self-check suite.
//!
//! Exit codes: 0 success, 1 statistical-threshold failure, 2 usage or
//! configuration error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::analytic::{
    char_function, euler_identity_check, mellin_density, DensitySeries, SeriesKind,
    ThreeAgentDensity,
};
use crate::config::{self, FileConfig, ModelOverrides, ResolvedModel};
use crate::drift;
use crate::embedded;
use crate::error::{Error, Result};
use crate::model::{ModelParams, MultiAgentConfig, RateCeiling, RateFamily, RateFunction};
use crate::pde::{self, SmoothFn};
use crate::quad;
use crate::rng;
use crate::sim::{self, RecordMode, SimConfig};
use crate::stats;
use crate::svg;

#[derive(Parser)]
#[command(
    name = "opidyn",
    version,
    about = "Continuous-time stochastic opinion dynamics: simulation and closed-form stationary densities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for replicate-parallel campaigns (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Simulate jump-diffusion paths and write them as CSV.
    Simulate(SimulateArgs),
    /// Tabulate a closed-form stationary density.
    Density(DensityArgs),
    /// Compare a sample against a closed-form stationary density.
    Compare(CompareArgs),
    /// Scan jump counts against a ladder of rate ceilings.
    Regime(RegimeArgs),
    /// Run the analytic invariant suite and print a pass/fail table.
    Selfcheck(SelfcheckArgs),
}

#[derive(Args, Clone)]
pub struct ModelFlags {
    /// TOML config file; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Rate ceiling K, or `unbounded`.
    #[arg(long)]
    pub cap: Option<String>,
    /// Interaction-rate family: c1, c2 or c3.
    #[arg(long)]
    pub family: Option<String>,
}

impl ModelFlags {
    fn resolve(&self) -> Result<(ResolvedModel, FileConfig)> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::param("config", format!("{}: {e}", path.display())))?;
                FileConfig::parse(&text)?
            }
            None => FileConfig::default(),
        };
        let overrides = ModelOverrides {
            mu: self.mu,
            sigma: self.sigma,
            theta: self.theta,
            lambda: self.lambda,
            alpha: self.alpha,
            cap: self.cap.as_deref().map(config::parse_cap).transpose()?,
            family: self.family.as_deref().map(config::parse_family).transpose()?,
        };
        Ok((config::resolve_model(&file, &overrides)?, file))
    }
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelFlags,
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
    #[arg(long, default_value_t = 10.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub replicates: u64,
    /// What to record: full, jumps-only or terminal.
    #[arg(long, default_value = "full")]
    pub record: String,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub model: ModelFlags,
    /// Series kind: auto (exponential at alpha=0, besselk otherwise),
    /// exponential, or besselk.
    #[arg(long, default_value = "auto")]
    pub kind: String,
    #[arg(long, default_value_t = -10.0)]
    pub grid_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub grid_max: f64,
    #[arg(long, default_value_t = 401)]
    pub grid_n: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub model: ModelFlags,
    /// Sample file: one value per line, or `t,x,is_jump` path CSV.
    #[arg(long, conflicts_with = "embedded")]
    pub sample: Option<PathBuf>,
    /// Draw this many exact embedded-chain samples instead of reading a file.
    #[arg(long)]
    pub embedded: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// KS threshold deciding the exit code.
    #[arg(long, default_value_t = 0.01)]
    pub ks_threshold: f64,
    /// Sup-norm grid for the characteristic-function error.
    #[arg(long, default_value_t = 5.0)]
    pub xi_max: f64,
    #[arg(long, default_value_t = 101)]
    pub xi_n: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct RegimeArgs {
    #[command(flatten)]
    pub model: ModelFlags,
    /// Comma-separated increasing rate ceilings.
    #[arg(long, default_value = "10,1e3,1e6")]
    pub caps: String,
    #[arg(long, default_value_t = 5.0)]
    pub window: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SelfcheckArgs {
    /// Skip the Monte Carlo checks, keeping the analytic ones.
    #[arg(long)]
    pub fast: bool,
    /// Perturb the density fed to the ODE residual check (the check must
    /// then fail; exercises the suite's sensitivity).
    #[arg(long)]
    pub perturb: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// Run manifest written next to every command's outputs.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub created_utc: String,
    pub seed: Option<u64>,
    pub parameters: serde_json::Value,
    pub outputs: Vec<String>,
}

impl RunManifest {
    fn new(command: &str, seed: Option<u64>, parameters: serde_json::Value) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            created_utc: chrono::Utc::now().to_rfc3339(),
            seed,
            parameters,
            outputs: Vec::new(),
        }
    }

    fn write(&self, dir: &Path) -> Result<()> {
        write_text(
            &dir.join("manifest.json"),
            &format!("{}\n", serde_json::to_string_pretty(self).unwrap()),
        )
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| Error::param("out", format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, text).map_err(|e| Error::param("out", format!("{}: {e}", path.display())))
}

/// Entry point; maps results onto the exit-code contract.
pub fn run(cli: Cli) -> i32 {
    if let Some(n) = cli.threads {
        // ordered reductions keep results identical whatever the pool size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let outcome = match cli.command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Density(a) => cmd_density(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Regime(a) => cmd_regime(&a),
        Command::Selfcheck(a) => cmd_selfcheck(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn params_json(m: &ResolvedModel) -> serde_json::Value {
    json!({
        "mu": m.params.mu,
        "sigma": m.params.sigma,
        "theta": m.params.theta,
        "lambda": m.params.lambda,
        "alpha": m.params.alpha,
        "cap": match m.params.cap { RateCeiling::Bounded(k) => json!(k), RateCeiling::Unbounded => json!("unbounded") },
        "family": m.family.to_string(),
    })
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<i32> {
    let (model, _) = args.model.resolve()?;
    if args.replicates == 0 {
        return Err(Error::param("replicates", "need at least one replicate"));
    }
    let record = match args.record.as_str() {
        "full" => RecordMode::Full,
        "jumps-only" => RecordMode::JumpsOnly,
        "terminal" => RecordMode::Terminal,
        other => {
            return Err(Error::param(
                "record",
                format!("expected full, jumps-only or terminal, got `{other}`"),
            ))
        }
    };
    let rf = RateFunction::new(model.family, &model.params)?;
    let cfg = SimConfig {
        x0: args.x0,
        horizon: args.horizon,
        step: args.step,
        seed: args.seed,
        record,
    };
    let mut manifest = RunManifest::new(
        "simulate",
        Some(args.seed),
        json!({
            "model": params_json(&model),
            "x0": args.x0, "horizon": args.horizon, "step": args.step,
            "replicates": args.replicates, "record": args.record,
        }),
    );
    let mut summaries = Vec::new();
    for r in 0..args.replicates {
        let path = sim::simulate_path_replicate(&model.params, &rf, &cfg, r)?;
        let name = format!("path_{r:04}.csv");
        if record == RecordMode::Full {
            write_text(&args.out.join(&name), &path.to_csv())?;
            manifest.outputs.push(name.clone());
        }
        summaries.push(json!({
            "replicate": r,
            "jump_count": path.jump_count,
            "terminal": path.terminal,
        }));
    }
    let summary = json!({
        "inputs": manifest.parameters,
        "replicates": summaries,
    });
    write_text(
        &args.out.join("summary.json"),
        &format!("{}\n", serde_json::to_string_pretty(&summary).unwrap()),
    )?;
    manifest.outputs.push("summary.json".into());
    manifest.write(&args.out)?;
    Ok(0)
}

fn build_series(model: &ResolvedModel, kind: &str) -> Result<DensitySeries> {
    match kind {
        "exponential" => DensitySeries::exponential(&model.params),
        "besselk" => DensitySeries::bessel(&model.params, model.params.alpha),
        "auto" => {
            if model.params.alpha == 0.0 {
                DensitySeries::exponential(&model.params)
            } else {
                DensitySeries::bessel(&model.params, model.params.alpha)
            }
        }
        other => Err(Error::param(
            "kind",
            format!("expected auto, exponential or besselk, got `{other}`"),
        )),
    }
}

pub fn cmd_density(args: &DensityArgs) -> Result<i32> {
    let (model, _) = args.model.resolve()?;
    if args.grid_n == 0 {
        return Err(Error::param("grid-n", "need at least one grid point"));
    }
    if !(args.grid_min <= args.grid_max) {
        return Err(Error::param("grid-min", "grid-min must not exceed grid-max"));
    }
    let series = build_series(&model, &args.kind)?;
    let mut csv = String::from("x,p\n");
    for i in 0..args.grid_n {
        let x = if args.grid_n == 1 {
            args.grid_min
        } else {
            args.grid_min
                + (args.grid_max - args.grid_min) * i as f64 / (args.grid_n - 1) as f64
        };
        csv.push_str(&format!("{x},{}\n", series.eval(x)));
    }
    write_text(&args.out.join("density.csv"), &csv)?;
    let normalization = series.normalization_check();
    let meta = json!({
        "model": params_json(&model),
        "kind": match series.kind { SeriesKind::Exponential => "exponential", SeriesKind::BesselK => "besselk" },
        "truncation": series.truncation,
        "term_bound": series.term_bound,
        "normalizer": series.normalizer,
        "normalization_check": normalization,
        "grid": {"min": args.grid_min, "max": args.grid_max, "n": args.grid_n},
    });
    write_text(
        &args.out.join("density_meta.json"),
        &format!("{}\n", serde_json::to_string_pretty(&meta).unwrap()),
    )?;
    let mut manifest = RunManifest::new("density", None, meta.clone());
    manifest.outputs.push("density.csv".into());
    manifest.outputs.push("density_meta.json".into());
    manifest.write(&args.out)?;
    Ok(0)
}

fn read_sample(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::param("sample", format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let cell = if fields.len() >= 2 { fields[1] } else { fields[0] };
        match cell.trim().parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 => continue, // header row
            Err(e) => {
                return Err(Error::param(
                    "sample",
                    format!("{} line {}: {e}", path.display(), i + 1),
                ))
            }
        }
    }
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(values)
}

pub fn cmd_compare(args: &CompareArgs) -> Result<i32> {
    let (model, _) = args.model.resolve()?;
    let (sample, source) = match (&args.sample, args.embedded) {
        (Some(path), None) => (read_sample(path)?, path.display().to_string()),
        (None, Some(n)) => {
            if n == 0 {
                return Err(Error::param("embedded", "need at least one sample"));
            }
            if model.params.mu != 0.0 {
                return Err(Error::param("mu", "embedded sampling requires mu = 0"));
            }
            let mut stream = rng::stream(args.seed, 0);
            let xs: Vec<f64> = (0..n)
                .map(|_| embedded::sample_stationary_c1(&model.params, 1e-8, &mut stream))
                .collect();
            (xs, format!("embedded:{n}"))
        }
        _ => {
            return Err(Error::param(
                "sample",
                "provide exactly one of --sample FILE or --embedded N",
            ))
        }
    };
    let series = build_series(&model, "auto")?;
    let cdf = stats::ReferenceCdf::from_series(&series);
    let ks = stats::ks_distance(&sample, |x| cdf.eval(x))?;
    let w1 = stats::wasserstein1(&sample, |x| cdf.eval(x))?;
    let xi_grid: Vec<f64> = (0..args.xi_n)
        .map(|i| -args.xi_max + 2.0 * args.xi_max * i as f64 / (args.xi_n.max(2) - 1) as f64)
        .collect();
    let emp = stats::empirical_cf(&sample, &xi_grid)?;
    let cf_sup_error = emp
        .iter()
        .zip(&xi_grid)
        .map(|(e, &xi)| (e - char_function(xi, &model.params)).norm())
        .fold(0.0f64, f64::max);
    let report = stats::ComparisonReport {
        ks_distance: ks,
        wasserstein1: w1,
        cf_sup_error,
        sample_count: sample.len(),
        reference: format!(
            "{:?} series, lambda={}, sigma={}, theta={}, alpha={}",
            series.kind, model.params.lambda, model.params.sigma, model.params.theta, model.params.alpha
        ),
    };
    write_text(
        &args.out.join("comparison.json"),
        &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()),
    )?;

    // overlay figure: histogram + density curve on the central range
    let span = 4.0 * series.params.sigma / (2.0 * series.params.lambda).sqrt() * 3.0;
    let bars = svg::histogram(&sample, -span, span, 80);
    let curve: Vec<(f64, f64)> = (0..=400)
        .map(|i| {
            let x = -span + 2.0 * span * i as f64 / 400.0;
            (x, series.eval(x))
        })
        .collect();
    let y_max = curve
        .iter()
        .map(|&(_, y)| y)
        .chain(bars.iter().map(|&(_, _, h)| h))
        .fold(0.0f64, f64::max);
    let mut frame = svg::Frame::new(
        (-span, span),
        (0.0, 1.1 * y_max),
        &format!("sample vs density (KS = {ks:.3e})"),
        "opinion difference",
        "density",
    );
    frame.bars(&bars, "#7f7f7f");
    frame.polyline(&curve, "#d62728", 2.0);
    write_text(&args.out.join("overlay.svg"), &frame.render())?;

    let mut manifest = RunManifest::new(
        "compare",
        Some(args.seed),
        json!({
            "model": params_json(&model),
            "source": source,
            "ks_threshold": args.ks_threshold,
            "xi_max": args.xi_max, "xi_n": args.xi_n,
        }),
    );
    manifest.outputs.push("comparison.json".into());
    manifest.outputs.push("overlay.svg".into());
    manifest.write(&args.out)?;

    println!(
        "ks = {ks:.6} (threshold {}), wasserstein1 = {w1:.6}, cf sup error = {cf_sup_error:.6}, n = {}",
        args.ks_threshold,
        sample.len()
    );
    Ok(if ks <= args.ks_threshold { 0 } else { 1 })
}

pub fn cmd_regime(args: &RegimeArgs) -> Result<i32> {
    let (model, _) = args.model.resolve()?;
    let caps: Vec<f64> = args
        .caps
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::param("caps", format!("`{s}`: {e}")))
        })
        .collect::<Result<_>>()?;
    let rows = sim::regime_scan(
        &model.params,
        model.params.alpha,
        &caps,
        args.window,
        args.step,
        args.trials,
        args.seed,
        None,
    )?;
    let mut csv = String::from("cap,mean_jumps,std_error,burst_fraction\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            r.cap, r.mean_jumps, r.std_error, r.burst_fraction
        ));
    }
    write_text(&args.out.join("regime.csv"), &csv)?;

    // line plot over log10 K
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.cap.log10(), r.mean_jumps)).collect();
    let y_max = pts.iter().map(|&(_, y)| y).fold(0.0f64, f64::max);
    let mut frame = svg::Frame::new(
        (pts.first().unwrap().0 - 0.2, pts.last().unwrap().0 + 0.2),
        (0.0, 1.15 * y_max.max(1.0)),
        &format!("jump counts vs ceiling (alpha = {})", model.params.alpha),
        "log10 K",
        "mean jumps per run",
    );
    frame.polyline(&pts, "#1f77b4", 2.0);
    frame.circles(&pts, "#1f77b4", 3.5);
    write_text(&args.out.join("regime.svg"), &frame.render())?;

    let mut manifest = RunManifest::new(
        "regime",
        Some(args.seed),
        json!({
            "model": params_json(&model),
            "caps": caps, "window": args.window, "step": args.step, "trials": args.trials,
        }),
    );
    manifest.outputs.push("regime.csv".into());
    manifest.outputs.push("regime.svg".into());
    manifest.write(&args.out)?;
    Ok(0)
}

struct CheckTable {
    rows: Vec<(String, f64, f64, bool)>,
}

impl CheckTable {
    fn new() -> Self {
        CheckTable { rows: Vec::new() }
    }

    /// Record a check that passes when `value < threshold`.
    fn check(&mut self, name: &str, value: f64, threshold: f64) {
        self.rows
            .push((name.to_string(), value, threshold, value < threshold));
    }

    fn print_and_exit_code(&self) -> i32 {
        let mut all = true;
        for (name, value, threshold, pass) in &self.rows {
            println!(
                "{} {name}: {value:.3e} (< {threshold:.1e})",
                if *pass { "PASS" } else { "FAIL" }
            );
            all &= *pass;
        }
        println!(
            "{}: {} of {} checks passed",
            if all { "OK" } else { "FAILED" },
            self.rows.iter().filter(|r| r.3).count(),
            self.rows.len()
        );
        if all {
            0
        } else {
            1
        }
    }
}

pub fn cmd_selfcheck(args: &SelfcheckArgs) -> Result<i32> {
    let params = ModelParams::new(0.0, 3.0, 2.0, 2.0, 0.0, RateCeiling::Unbounded)?;
    let mut t = CheckTable::new();

    // normalization of every closed form
    let d_exp = DensitySeries::exponential(&params)?;
    t.check(
        "normalization exponential",
        (d_exp.normalization_check() - 1.0).abs(),
        1e-6,
    );
    for alpha in [0.0, 0.5, 1.5] {
        let d = DensitySeries::bessel(&params, alpha)?;
        t.check(
            &format!("normalization besselk alpha={alpha}"),
            (d.normalization_check() - 1.0).abs(),
            1e-6,
        );
    }

    // stationary ODE residuals (optionally perturbed to prove sensitivity)
    let grid = pde::standard_grid();
    let rf_c1 = RateFunction::new(RateFamily::C1, &params)?;
    let perturb = |p: &DensitySeries, x: f64| {
        let v = p.eval(x);
        if args.perturb {
            v * (1.0 + 0.01 * x * x)
        } else {
            v
        }
    };
    let rep = pde::ode_residual(|x| perturb(&d_exp, x), &rf_c1, &params, &grid, 1e-2)?;
    t.check("ode residual exponential/c1", rep.max_rel_residual, 1e-6);
    let p05 = ModelParams::new(0.0, 3.0, 2.0, 2.0, 0.5, RateCeiling::Unbounded)?;
    let rf_c2 = RateFunction::new(RateFamily::C2, &p05)?;
    let d05 = DensitySeries::bessel(&p05, 0.5)?;
    let rep = pde::ode_residual(|x| perturb(&d05, x), &rf_c2, &p05, &grid, 1e-2)?;
    t.check("ode residual besselk/c2 alpha=0.5", rep.max_rel_residual, 1e-6);

    // alpha = 0 reduction
    let d0 = DensitySeries::bessel(&params, 0.0)?;
    let max_diff = (0..=200)
        .map(|i| {
            let x = -10.0 + 0.1 * i as f64;
            (d_exp.eval(x) - d0.eval(x)).abs()
        })
        .fold(0.0f64, f64::max);
    t.check("besselk(alpha=0) = exponential", max_diff, 1e-10);

    // Euler-type product/sum identity
    let mut worst = 0.0f64;
    for theta in [1.5, 2.0, 3.0] {
        for s in [1.0, 2.0, 3.5] {
            worst = worst.max(euler_identity_check(theta, s, 60)?.gap);
        }
    }
    t.check("euler identity", worst, 1e-12);

    // Mellin checks
    let mut worst_m1 = 0.0f64;
    for alpha in [0.0, 0.5, 1.5] {
        worst_m1 = worst_m1.max((mellin_density(1.0, &params, alpha)? - 0.5).abs());
    }
    t.check("mellin M(1) = 1/2", worst_m1, 1e-10);
    let mut worst_fe = 0.0f64;
    for alpha in [0.0, 0.5, 1.5] {
        for s in [0.5, 1.0, 1.5, 2.0] {
            let lhs = params.sigma * params.sigma * (s + alpha) * (s + 1.0 + alpha)
                * mellin_density(s + alpha, &params, alpha)?;
            let rhs = 2.0 * params.lambda * (1.0 - params.theta.powf(-(s + 1.0 + alpha)))
                * mellin_density(s + 2.0, &params, alpha)?;
            worst_fe = worst_fe.max(((lhs - rhs) / rhs).abs());
        }
    }
    t.check("mellin functional equation", worst_fe, 1e-8);
    let xmax = d05.tail_cutoff();
    let mut worst_q = 0.0f64;
    for s in [1.0, 2.0, 3.0] {
        let q = quad::integrate_geometric(|x| x.powf(s - 1.0) * d05.eval(x), 0.0, xmax, 0.125, 1e-9);
        let m = mellin_density(s, &p05, 0.5)?;
        worst_q = worst_q.max(((m - q) / q).abs());
    }
    t.check("mellin vs quadrature", worst_q, 1e-6);

    // adjointness on bump pairs
    let mut worst_adj = 0.0f64;
    for (cf, cg) in [(1.0, 0.5), (-2.0, -1.0), (0.0, 2.0), (3.0, 1.5), (-0.7, -0.2)] {
        let f = pde::Bump { center: cf, width: 1.5 };
        let g = pde::Bump { center: cg, width: 2.0 };
        let lo = (cf - 1.5).min(cg - 2.0) * 2.0 - 1.0;
        let hi = (cf + 1.5).max(cg + 2.0) * 2.0 + 1.0;
        let lhs = quad::integrate(|x| pde::generator_apply(&f, x, &params, &rf_c1) * g.value(x), lo, hi, 1e-12);
        let rhs = quad::integrate(|x| f.value(x) * pde::adjoint_apply(&g, x, &params, &rf_c1), lo, hi, 1e-12);
        worst_adj = worst_adj.max((lhs - rhs).abs());
    }
    t.check("generator/adjoint duality", worst_adj, 1e-8);

    // drift machinery
    let beta = 0.5;
    let mut worst_psi = 0.0f64;
    for s in [1.0, 1.5, 2.0] {
        let xi0 = drift::drift_xi(s, beta, 2.0, 200)?;
        let xi1 = drift::drift_xi(s + 1.0, beta, 2.0, 200)?;
        let g0 = drift::drift_gamma(s, beta, 2.0)?;
        let g1 = drift::drift_gamma(s + 1.0, beta, 2.0)?;
        let psi1 = g1 * (1.0 + xi1);
        let lhs = 1.0 / (g0 * (1.0 + xi0)) + beta;
        let rhs = (1.0 - 2.0f64.powf(-(s + 1.0))) * psi1;
        worst_psi = worst_psi.max(((lhs - rhs) / rhs).abs());
    }
    t.check("drift ratio recursion", worst_psi, 1e-8);
    let drifted = ModelParams::new(1.5, 3.0, 2.0, 2.0, 0.0, RateCeiling::Unbounded)?;
    let mut worst_dm = 0.0f64;
    for s in [1.0, 1.5, 2.0] {
        let m0 = drift::drift_mellin_unnormalized(s, &drifted)?;
        let m1 = drift::drift_mellin_unnormalized(s + 1.0, &drifted)?;
        let m2 = drift::drift_mellin_unnormalized(s + 2.0, &drifted)?;
        let lhs = drifted.sigma * drifted.sigma * s * (s + 1.0) * m0
            + 2.0 * drifted.mu * (s + 1.0) * m1;
        let rhs = 2.0 * drifted.lambda * (1.0 - drifted.theta.powf(-(s + 1.0))) * m2;
        worst_dm = worst_dm.max(((lhs - rhs) / rhs).abs());
    }
    t.check("drift mellin recurrence", worst_dm, 1e-8);

    if !args.fast {
        // embedded chain vs closed form
        let n = 200_000u64;
        let mut stream = rng::stream(args.seed, 0);
        let sample: Vec<f64> = (0..n)
            .map(|_| embedded::sample_stationary_c1(&params, 1e-8, &mut stream))
            .collect();
        let cdf = stats::ReferenceCdf::from_series(&d_exp);
        let ks = stats::ks_distance(&sample, |x| cdf.eval(x))?;
        t.check("embedded chain vs density (KS)", ks, 0.005);

        // characteristic function, product formula vs empirical
        let xi_grid: Vec<f64> = (0..=100).map(|i| -5.0 + 0.1 * i as f64).collect();
        let emp = stats::empirical_cf(&sample, &xi_grid)?;
        let sup = emp
            .iter()
            .zip(&xi_grid)
            .map(|(e, &xi)| (e - char_function(xi, &params)).norm())
            .fold(0.0f64, f64::max);
        t.check("characteristic function sup error", sup, 0.015);

        // three-agent sampler vs convolution closed form
        let p3 = ModelParams::new(0.0, 2.0, 2.0, 3.0, 0.0, RateCeiling::Unbounded)?;
        let cfg3 = MultiAgentConfig::ThreeAgent { s1: 0.0, s3: 1.0, q: 0.5 };
        let t3 = ThreeAgentDensity::new(&p3, 0.0, 1.0)?;
        let mut stream = rng::stream(args.seed, 1);
        let sample3: Vec<f64> = (0..n)
            .map(|_| embedded::sample_three_agent(&cfg3, &p3, 1e-8, &mut stream).unwrap())
            .collect();
        let ks3 = stats::ks_distance(&sample3, |x| t3.cdf(x))?;
        t.check("three-agent sampler vs convolution (KS)", ks3, 0.01);

        // first-interaction survival, constant rate: exact exponential
        let rf = RateFunction::new(RateFamily::C1, &params)?;
        let est = sim::estimate_gamma1_survival(&params, &rf, 0.0, 1.0, 1e-3, 64, args.seed)?;
        t.check(
            "survival estimate vs exp(-lambda T)",
            (est.estimate - (-params.lambda).exp()).abs(),
            1e-9,
        );
    }

    Ok(t.print_and_exit_code())
}
