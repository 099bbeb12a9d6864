//! Trials, ratio estimates and CSV experiments.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use omflp_core::adversary::{gen_gx, gen_random, gen_thm1, CostKindParam, GenParams, MetricKind};
use omflp_core::baselines::{run_no_prediction, run_per_commodity};
use omflp_core::oracle::{solve_opt_bruteforce, OracleLimits};
use omflp_core::pd::run_pd_checked;
use omflp_core::randomized::run_rand;
use omflp_core::solution::{check_feasible, evaluate_cost};
use omflp_core::{Instance, Solution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::format::parse_instance;

pub const CSV_HEADER: &str = "instance_id,algorithm,seed,alg_cost,opt_cost,opt_is_exact,ratio,n,S_size,runtime_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Pd,
    Rand,
    PerCommodity,
    NoPrediction,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Pd,
        Algorithm::Rand,
        Algorithm::PerCommodity,
        Algorithm::NoPrediction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pd => "pd",
            Algorithm::Rand => "rand",
            Algorithm::PerCommodity => "per-commodity",
            Algorithm::NoPrediction => "no-prediction",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Algorithm::Rand | Algorithm::PerCommodity)
    }
}

impl FromStr for Algorithm {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| anyhow!("unknown algorithm {s:?}"))
    }
}

/// One algorithm execution with its hard-invariant check.
#[derive(Debug, Clone)]
pub struct AlgRun {
    pub solution: Solution,
    pub cost: f64,
    /// Feasibility problems and, for `pd`, violated dual constraints.
    pub violations: Vec<String>,
}

pub fn run_algorithm(inst: &Instance, alg: Algorithm, seed: u64) -> anyhow::Result<AlgRun> {
    let mut violations = Vec::new();
    let solution = match alg {
        Algorithm::Pd => {
            let run = run_pd_checked(inst);
            violations.extend(run.violations.iter().map(|v| format!("{v:?}")));
            run.solution
        }
        Algorithm::Rand => run_rand(inst, seed)?.solution,
        Algorithm::PerCommodity => run_per_commodity(inst, seed)?,
        Algorithm::NoPrediction => run_no_prediction(inst)?,
    };
    violations.extend(check_feasible(inst, &solution).iter().map(|v| format!("{v:?}")));
    let cost = if violations.is_empty() {
        evaluate_cost(inst, &solution)?.total
    } else {
        f64::NAN
    };
    Ok(AlgRun {
        solution,
        cost,
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptSource {
    Exact(f64),
    /// `known_opt_upper_bound`; ratios against it underestimate the true one.
    Bound(f64),
}

impl OptSource {
    pub fn value(self) -> f64 {
        match self {
            OptSource::Exact(v) | OptSource::Bound(v) => v,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, OptSource::Exact(_))
    }
}

/// The oracle's optimum when the instance is within `limits`, else the
/// known upper bound.
pub fn opt_source(inst: &Instance, limits: &OracleLimits) -> anyhow::Result<OptSource> {
    match solve_opt_bruteforce(inst, limits) {
        Ok(r) => Ok(OptSource::Exact(r.cost)),
        Err(e) => inst
            .known_opt_upper_bound()
            .map(OptSource::Bound)
            .ok_or_else(|| anyhow!("no OPT source: {e}")),
    }
}

pub fn ratio(alg_cost: f64, opt_cost: f64) -> f64 {
    if opt_cost > 0.0 {
        alg_cost / opt_cost
    } else if alg_cost == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub instance_id: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub alg_cost: f64,
    pub opt_cost: f64,
    pub opt_is_exact: bool,
    pub ratio: f64,
    pub n: usize,
    pub s_size: usize,
    pub runtime_ms: Option<f64>,
    pub violations: Vec<String>,
}

pub fn run_trial(
    id: &str,
    inst: &Instance,
    opt: OptSource,
    alg: Algorithm,
    seed: u64,
    timing: bool,
) -> anyhow::Result<TrialResult> {
    let start = Instant::now();
    let run = run_algorithm(inst, alg, seed)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    Ok(TrialResult {
        instance_id: id.to_string(),
        algorithm: alg,
        seed,
        alg_cost: run.cost,
        opt_cost: opt.value(),
        opt_is_exact: opt.is_exact(),
        ratio: ratio(run.cost, opt.value()),
        n: inst.num_requests(),
        s_size: inst.num_commodities(),
        runtime_ms: timing.then_some(elapsed),
        violations: run.violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub stddev: f64,
    pub max: f64,
}

/// Mean, sample standard deviation and maximum.
pub fn stats(values: &[f64]) -> Stats {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    Stats {
        mean,
        stddev: var.sqrt(),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Seeds `base_seed + i`; deterministic algorithms run once.
pub fn trial_seeds(alg: Algorithm, trials: usize, base_seed: u64) -> Vec<u64> {
    let k = if alg.is_randomized() { trials.max(1) } else { 1 };
    (0..k as u64).map(|i| base_seed.wrapping_add(i)).collect()
}

pub fn estimate_ratio(
    inst: &Instance,
    alg: Algorithm,
    trials: usize,
    base_seed: u64,
) -> anyhow::Result<(Stats, OptSource)> {
    let opt = opt_source(inst, &OracleLimits::default())?;
    let ratios = trial_seeds(alg, trials, base_seed)
        .into_iter()
        .map(|s| run_trial("", inst, opt, alg, s, false).map(|t| t.ratio))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok((stats(&ratios), opt))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricParam {
    Line,
    Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostParam {
    Table,
    SizeBased,
    Poly,
}

/// Where an experiment's instance comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    File {
        path: PathBuf,
    },
    Thm1 {
        s: usize,
        #[serde(default)]
        seed: u64,
    },
    Gx {
        s: usize,
        x: f64,
        #[serde(default)]
        seed: u64,
    },
    Random {
        #[serde(default)]
        seed: u64,
        #[serde(default = "d_points")]
        num_points: usize,
        #[serde(default = "d_commodities")]
        num_commodities: usize,
        #[serde(default = "d_requests")]
        num_requests: usize,
        #[serde(default = "d_metric")]
        metric: MetricParam,
        #[serde(default = "d_cost")]
        cost: CostParam,
        #[serde(default)]
        max_set_size: Option<usize>,
        #[serde(default = "d_scale")]
        scale: f64,
    },
}

fn d_points() -> usize {
    GenParams::oracle_solvable().num_points
}
fn d_commodities() -> usize {
    GenParams::oracle_solvable().num_commodities
}
fn d_requests() -> usize {
    GenParams::oracle_solvable().num_requests
}
fn d_metric() -> MetricParam {
    MetricParam::Line
}
fn d_cost() -> CostParam {
    CostParam::Table
}
fn d_scale() -> f64 {
    GenParams::oracle_solvable().scale
}

impl Source {
    /// Builds the instance; relative file paths resolve against `base`.
    pub fn load(&self, base: &Path) -> anyhow::Result<Instance> {
        Ok(match self {
            Source::File { path } => {
                let p = base.join(path);
                let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                parse_instance(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            Source::Thm1 { s, seed } => gen_thm1(*s, *seed)?,
            Source::Gx { s, x, seed } => gen_gx(*s, *x, *seed)?,
            Source::Random {
                seed,
                num_points,
                num_commodities,
                num_requests,
                metric,
                cost,
                max_set_size,
                scale,
            } => {
                let params = GenParams {
                    num_points: *num_points,
                    num_commodities: *num_commodities,
                    num_requests: *num_requests,
                    metric: match metric {
                        MetricParam::Line => MetricKind::Line,
                        MetricParam::Matrix => MetricKind::Matrix,
                    },
                    cost_kind: match cost {
                        CostParam::Table => CostKindParam::Table,
                        CostParam::SizeBased => CostKindParam::SizeBased,
                        CostParam::Poly => CostKindParam::Poly,
                    },
                    max_set_size: max_set_size.unwrap_or(*num_commodities),
                    scale: *scale,
                };
                gen_random(&params, *seed)?
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub id: String,
    #[serde(flatten)]
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instances: Vec<InstanceSpec>,
    pub algorithms: Vec<String>,
    #[serde(default = "d_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Fills `runtime_ms`; off by default so output is reproducible.
    #[serde(default)]
    pub timing: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn d_trials() -> usize {
    1
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub csv: String,
    pub trials: Vec<TrialResult>,
}

impl ExperimentOutput {
    pub fn violations(&self) -> impl Iterator<Item = (&TrialResult, &String)> {
        self.trials
            .iter()
            .flat_map(|t| t.violations.iter().map(move |v| (t, v)))
    }
}

/// Worker count from `OMFLP_THREADS`, default 1.
pub fn threads_from_env() -> anyhow::Result<usize> {
    match std::env::var("OMFLP_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => bail!("OMFLP_THREADS must be a positive integer, got {v:?}"),
        },
        Err(_) => Ok(1),
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn push_row(csv: &mut String, cells: &[String]) {
    csv.push_str(&cells.join(","));
    csv.push('\n');
}

pub fn run_experiment(config: &ExperimentConfig, base: &Path, threads: usize) -> anyhow::Result<ExperimentOutput> {
    let algs = config
        .algorithms
        .iter()
        .map(|a| a.parse())
        .collect::<anyhow::Result<Vec<Algorithm>>>()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    pool.install(|| {
        let mut loaded = Vec::new();
        if !algs.is_empty() {
            for spec in &config.instances {
                let inst = spec.source.load(base).with_context(|| format!("instance {}", spec.id))?;
                let opt = opt_source(&inst, &OracleLimits::default()).with_context(|| format!("instance {}", spec.id))?;
                loaded.push((spec.id.clone(), inst, opt));
            }
        }
        let jobs: Vec<(usize, Algorithm, u64)> = (0..loaded.len())
            .flat_map(|i| {
                algs.iter().flat_map(move |&a| {
                    trial_seeds(a, config.trials, config.base_seed)
                        .into_iter()
                        .map(move |s| (i, a, s))
                })
            })
            .collect();
        let trials = jobs
            .par_iter()
            .map(|&(i, a, s)| {
                let (id, inst, opt) = &loaded[i];
                run_trial(id, inst, *opt, a, s, config.timing)
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        Ok(ExperimentOutput {
            csv: render_csv(&trials),
            trials,
        })
    })
}

/// One row per trial, then mean, stddev and max rows per (instance,
/// algorithm). Aggregate rows carry the statistic's name in `seed`.
pub fn render_csv(trials: &[TrialResult]) -> String {
    let mut csv = String::new();
    writeln!(csv, "{CSV_HEADER}").unwrap();
    let mut groups: Vec<(&str, Algorithm, Vec<&TrialResult>)> = Vec::new();
    for t in trials {
        let runtime = t.runtime_ms.map(fmt_num).unwrap_or_default();
        push_row(
            &mut csv,
            &[
                t.instance_id.clone(),
                t.algorithm.name().into(),
                t.seed.to_string(),
                fmt_num(t.alg_cost),
                fmt_num(t.opt_cost),
                t.opt_is_exact.to_string(),
                fmt_num(t.ratio),
                t.n.to_string(),
                t.s_size.to_string(),
                runtime,
            ],
        );
        match groups.last_mut() {
            Some((id, a, v)) if *id == t.instance_id && *a == t.algorithm => v.push(t),
            _ => groups.push((&t.instance_id, t.algorithm, vec![t])),
        }
    }
    for (id, alg, group) in groups {
        let first = group[0];
        let costs: Vec<f64> = group.iter().map(|t| t.alg_cost).collect();
        let ratios: Vec<f64> = group.iter().map(|t| t.ratio).collect();
        let (c, r) = (stats(&costs), stats(&ratios));
        let runtimes: Option<Vec<f64>> = group.iter().map(|t| t.runtime_ms).collect();
        let rt = runtimes.map(|v| stats(&v));
        for (label, cv, rv, tv) in [
            ("mean", c.mean, r.mean, rt.map(|s| s.mean)),
            ("stddev", c.stddev, r.stddev, rt.map(|s| s.stddev)),
            ("max", c.max, r.max, rt.map(|s| s.max)),
        ] {
            push_row(
                &mut csv,
                &[
                    id.to_string(),
                    alg.name().into(),
                    label.into(),
                    fmt_num(cv),
                    fmt_num(first.opt_cost),
                    first.opt_is_exact.to_string(),
                    fmt_num(rv),
                    first.n.to_string(),
                    first.s_size.to_string(),
                    tv.map(fmt_num).unwrap_or_default(),
                ],
            );
        }
    }
    csv
}
