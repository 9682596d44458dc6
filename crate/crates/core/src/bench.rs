//! RMSE-versus-budget sweeps, slope fits and crossover detection.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::distributions::{reference_distribution, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::estimators::{classical_mci, plan_allocation, DEFAULT_DELTA, DEFAULT_STRETCH};
use crate::estimators::{default_scale, EstimateReport, FourierQmci, RescaledQmci};
use crate::fourier::{FunctionDef, FunctionSpec};
use crate::qae::QaeMethod;
use crate::simulator::ShotSampler;

pub const CSV_HEADER: &str = "method,q,mean_estimate,rmse,queries_used,max_depth";

/// Estimators a sweep can compare.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Fourier,
    Rescaled,
    Classical,
}

impl Method {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "fourier" => Ok(Self::Fourier),
            "rescaled" => Ok(Self::Rescaled),
            "classical" => Ok(Self::Classical),
            other => Err(Error::Unknown { kind: "method", name: other.to_string() }),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Fourier => "fourier",
            Self::Rescaled => "rescaled",
            Self::Classical => "classical",
        }
    }
}

fn default_function() -> FunctionDef {
    FunctionDef::Named("identity".into())
}
fn default_methods() -> Vec<String> {
    ["fourier", "rescaled", "classical"].map(String::from).to_vec()
}
fn default_budget_min() -> f64 {
    1e2
}
fn default_budget_max() -> f64 {
    1e6
}
fn default_budget_points() -> usize {
    7
}
fn default_runs() -> usize {
    500
}
fn default_delta() -> f64 {
    DEFAULT_DELTA
}
fn default_stretch() -> f64 {
    DEFAULT_STRETCH
}
fn default_qae() -> String {
    "mle".into()
}
fn default_scale_constant() -> f64 {
    1.0
}

/// Sweep settings. Every field has a default; the built-in reference
/// distribution is used when `distribution` is absent.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub distribution: Option<PathBuf>,
    #[serde(default = "default_function")]
    pub function: FunctionDef,
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    #[serde(default = "default_budget_min")]
    pub budget_min: f64,
    #[serde(default = "default_budget_max")]
    pub budget_max: f64,
    #[serde(default = "default_budget_points")]
    pub budget_points: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_stretch")]
    pub stretch: f64,
    #[serde(default = "default_qae")]
    pub qae: String,
    #[serde(default = "default_scale_constant")]
    pub scale_constant: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub axis: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        toml::from_str("").expect("defaults deserialize")
    }
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file; relative `distribution` and `output` paths are
    /// resolved against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::from_toml_str(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.distribution, &mut cfg.output].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Geometric budget grid from `budget_min` to `budget_max`, rounded to
    /// integers.
    pub fn budgets(&self) -> Result<Vec<u64>> {
        let (lo, hi, k) = (self.budget_min, self.budget_max, self.budget_points);
        if !(lo >= 1.0) || !(hi.is_finite()) || k == 0 || (k > 1 && !(hi > lo)) {
            return Err(Error::Config(format!("invalid budget grid [{lo}, {hi}] with {k} points")));
        }
        let grid: Vec<u64> = (0..k)
            .map(|i| {
                let t = if k == 1 { 0.0 } else { i as f64 / (k - 1) as f64 };
                (lo * (hi / lo).powf(t)).round() as u64
            })
            .collect();
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("budget grid is not strictly increasing after rounding".into()));
        }
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        self.budgets()?;
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        for m in &self.methods {
            Method::from_name(m)?;
        }
        QaeMethod::from_name(&self.qae)?;
        Ok(())
    }

    pub fn load_distribution(&self) -> Result<DiscreteDistribution<f64>> {
        match &self.distribution {
            Some(path) => DiscreteDistribution::load(path),
            None => Ok(reference_distribution()),
        }
    }

    pub fn function_spec(&self, dist: &DiscreteDistribution<f64>) -> Result<FunctionSpec<f64>> {
        let s = dist.support(self.axis)?;
        self.function.resolve(s.x_l(), s.x_u())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub method: String,
    pub q: u64,
    pub mean_estimate: f64,
    pub rmse: f64,
    pub queries_used: f64,
    pub max_depth: u64,
}

/// Summary of one run, kept for budget checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunStats {
    pub estimate: f64,
    pub queries_total: u64,
    pub queries_used: u64,
    pub max_depth: u64,
    pub q0: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub oracle: f64,
    pub rows: Vec<SweepRow>,
    /// Per row, the individual runs in run order.
    pub runs: Vec<Vec<RunStats>>,
}

impl SweepReport {
    pub fn method_points(&self, method: &str) -> Vec<(f64, f64)> {
        self.rows.iter().filter(|r| r.method == method).map(|r| (r.q as f64, r.rmse)).collect()
    }

    pub fn slope(&self, method: &str) -> Result<f64> {
        fit_slope(&self.method_points(method))
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.rows)
    }
}

/// Decimal rendering with 10 significant digits.
pub fn format_sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (9 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding may carry into a new leading digit
    let digits = s.chars().filter(char::is_ascii_digit).skip_while(|&c| c == '0').count();
    if digits > 10 && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.method,
            r.q,
            format_sig10(r.mean_estimate),
            format_sig10(r.rmse),
            format_sig10(r.queries_used),
            r.max_depth
        );
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(Error::Config(format!("expected CSV header `{CSV_HEADER}`")));
    }
    let bad = |line: &str| Error::Config(format!("malformed CSV row `{line}`"));
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.trim().split(',').collect();
            if f.len() != 6 {
                return Err(bad(line));
            }
            Ok(SweepRow {
                method: f[0].to_string(),
                q: f[1].parse().map_err(|_| bad(line))?,
                mean_estimate: f[2].parse().map_err(|_| bad(line))?,
                rmse: f[3].parse().map_err(|_| bad(line))?,
                queries_used: f[4].parse().map_err(|_| bad(line))?,
                max_depth: f[5].parse().map_err(|_| bad(line))?,
            })
        })
        .collect()
}

/// Ordinary least-squares slope of `log10(rmse)` against `log10(q)`.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|&(q, r)| !(q > 0.0) || !(r > 0.0)) {
        return Err(Error::InvalidParameter("slope fit needs positive budgets and errors".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(q, r)| (q.log10(), r.log10())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("slope fit needs distinct budgets".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Crossover {
    /// First budget at which `method_a`'s RMSE drops to or below `method_b`'s.
    At {
        budget: f64,
        /// `method_a` is already at or below `method_b` at the smallest budget.
        degenerate: bool,
        /// `method_a`'s max depth at the sweep budget nearest (in log scale).
        depth: u64,
    },
    NoneInRange,
}

/// Log-log interpolated budget where `method_a`'s RMSE curve crosses below
/// `method_b`'s.
pub fn find_crossover(rows: &[SweepRow], method_a: &str, method_b: &str) -> Result<Crossover> {
    let pick = |m: &str| -> Vec<&SweepRow> { rows.iter().filter(|r| r.method == m).collect() };
    let (a, b) = (pick(method_a), pick(method_b));
    let mut pairs: Vec<(&SweepRow, &SweepRow)> =
        a.iter().filter_map(|ra| b.iter().find(|rb| rb.q == ra.q).map(|rb| (*ra, *rb))).collect();
    pairs.sort_by_key(|p| p.0.q);
    if pairs.len() < 2 {
        return Err(Error::InvalidParameter(format!("`{method_a}` and `{method_b}` need at least two common budgets")));
    }
    if pairs.iter().any(|(ra, rb)| !(ra.rmse > 0.0) || !(rb.rmse > 0.0)) {
        return Err(Error::InvalidParameter("crossover needs positive RMSE values".into()));
    }
    let gap = |(ra, rb): &(&SweepRow, &SweepRow)| ra.rmse.log10() - rb.rmse.log10();
    let depth_near = |logq: f64| {
        pairs
            .iter()
            .min_by(|x, y| {
                let dx = ((x.0.q as f64).log10() - logq).abs();
                let dy = ((y.0.q as f64).log10() - logq).abs();
                dx.total_cmp(&dy)
            })
            .map_or(0, |p| p.0.max_depth)
    };
    if gap(&pairs[0]) <= 0.0 {
        return Ok(Crossover::At { budget: pairs[0].0.q as f64, degenerate: true, depth: pairs[0].0.max_depth });
    }
    for w in pairs.windows(2) {
        let (g0, g1) = (gap(&w[0]), gap(&w[1]));
        if g1 <= 0.0 {
            let (x0, x1) = ((w[0].0.q as f64).log10(), (w[1].0.q as f64).log10());
            let x = x0 + (x1 - x0) * g0 / (g0 - g1);
            return Ok(Crossover::At { budget: 10f64.powf(x), degenerate: false, depth: depth_near(x) });
        }
    }
    Ok(Crossover::NoneInRange)
}

fn stats(r: &EstimateReport<f64>) -> RunStats {
    RunStats {
        estimate: r.estimate,
        queries_total: r.queries_total,
        queries_used: r.queries_used,
        max_depth: r.max_depth,
        q0: r.q0,
    }
}

/// Runs every (method, budget) cell `runs` times against the brute-force
/// oracle. Run `r` of method `k` at budget index `b` uses the sampler stream
/// `fork(k).fork(b).fork(r)` of `(seed, 0)`, so results do not depend on the
/// thread count.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let dist = config.load_distribution()?;
    let f = config.function_spec(&dist)?;
    let oracle = dist.expectation(config.axis, |x| f.eval(x))?;
    let budgets = config.budgets()?;
    let qae = QaeMethod::from_name(&config.qae)?;
    let root = ShotSampler::new(config.seed, 0);

    let mut rows = Vec::new();
    let mut all_runs = Vec::new();
    for (k, name) in config.methods.iter().enumerate() {
        let method = Method::from_name(name)?;
        let method_stream = root.fork(k as u64);
        let fourier = match method {
            Method::Fourier => {
                let cap = plan_allocation(config.budget_max, qae.lambda(), config.delta)?.n_max;
                Some(FourierQmci::new(&dist, config.axis, &f, config.stretch, cap)?)
            }
            _ => None,
        };
        if method == Method::Rescaled && config.function != default_function() {
            return Err(Error::Config("rescaled QMCI only estimates the mean (function = \"identity\")".into()));
        }
        for (b, &q) in budgets.iter().enumerate() {
            let cell = method_stream.fork(b as u64);
            let runs: Vec<RunStats> = match method {
                Method::Fourier => {
                    let est = fourier.as_ref().expect("prepared");
                    let q0 = est.q0_for_budget(q, qae.lambda(), config.delta)?;
                    let plan = plan_allocation(q0, qae.lambda(), config.delta)?;
                    (0..config.runs)
                        .into_par_iter()
                        .map(|r| est.run(&plan, &qae, &cell.fork(r as u64)).map(|x| stats(&x)))
                        .collect::<Result<_>>()?
                }
                Method::Rescaled => {
                    let scale = default_scale(config.scale_constant)(q);
                    let est = RescaledQmci::new(&dist, config.axis, scale)?;
                    (0..config.runs)
                        .into_par_iter()
                        .map(|r| est.run(q, &qae, &mut cell.fork(r as u64)).map(|x| stats(&x)))
                        .collect::<Result<_>>()?
                }
                Method::Classical => (0..config.runs)
                    .into_par_iter()
                    .map(|r| classical_mci(&dist, config.axis, &f, q, &mut cell.fork(r as u64)).map(|x| stats(&x)))
                    .collect::<Result<_>>()?,
            };
            rows.push(summarize(name, q, oracle, &runs));
            all_runs.push(runs);
        }
    }
    Ok(SweepReport { oracle, rows, runs: all_runs })
}

fn summarize(method: &str, q: u64, oracle: f64, runs: &[RunStats]) -> SweepRow {
    let n = runs.len() as f64;
    let mean = runs.iter().map(|r| r.estimate).sum::<f64>() / n;
    let mse = runs.iter().map(|r| (r.estimate - oracle).powi(2)).sum::<f64>() / n;
    SweepRow {
        method: method.to_string(),
        q,
        mean_estimate: mean,
        rmse: mse.sqrt(),
        queries_used: runs.iter().map(|r| r.queries_used as f64).sum::<f64>() / n,
        max_depth: runs.iter().map(|r| r.max_depth).max().unwrap_or(0),
    }
}
