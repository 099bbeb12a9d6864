use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use omflp::bench::{run_algorithm, run_experiment, threads_from_env, Algorithm, CostParam, ExperimentConfig, MetricParam, Source};
use omflp::format::{parse_instance, pd_trace_doc, rand_trace_doc, serialize_instance, SolutionDoc};
use omflp_core::cost::{check_condition1, check_subadditivity};
use omflp_core::oracle::{solve_opt_bruteforce, OracleLimits};
use omflp_core::pd::run_pd;
use omflp_core::randomized::run_rand;
use omflp_core::Instance;
use serde_json::json;

#[derive(Parser)]
#[command(name = "omflp", version, about = "Online multi-commodity facility location workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file against the model assumptions.
    Validate { instance: PathBuf },
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Exact offline optimum of a small instance.
    Opt { instance: PathBuf },
    /// Run one algorithm and print its solution.
    Run {
        #[arg(long, value_parser = parse_alg)]
        algorithm: Algorithm,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include the algorithm's event trace (pd and rand).
        #[arg(long)]
        trace: bool,
        instance: PathBuf,
    },
    /// Run an experiment config and write CSV.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Single-point lower-bound instance with g(k) = ceil(k / sqrt|S|).
    Thm1 {
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The same request sequence with g(k) = k^(x/2).
    Gx {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Random instance satisfying the cost assumptions.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        points: usize,
        #[arg(long, default_value_t = 3)]
        commodities: usize,
        #[arg(long, default_value_t = 6)]
        requests: usize,
        #[arg(long, default_value = "line", value_parser = ["line", "matrix"])]
        metric: String,
        #[arg(long, default_value = "table", value_parser = ["table", "size_based", "poly"])]
        cost: String,
        #[arg(long)]
        max_set_size: Option<usize>,
        #[arg(long, default_value_t = 3.0)]
        scale: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_alg(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: anyhow::Error| e.to_string())
}

fn load(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_instance(&text)?)
}

fn emit(text: &str, output: Option<&Path>) -> anyhow::Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn print_json(v: &serde_json::Value) {
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(v).expect("json"));
}

fn validate(path: &Path) -> anyhow::Result<ExitCode> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let inst = match parse_instance(&text) {
        Ok(i) => i,
        Err(e) => {
            print_json(&json!({"valid": false, "error": e.to_string()}));
            return Ok(ExitCode::from(1));
        }
    };
    let describe = |r: omflp_core::Result<usize>| match r {
        Ok(n) => json!(n),
        Err(e) => json!(format!("skipped: {e}")),
    };
    let c1 = check_condition1(inst.cost(), inst.metric()).map(|v| v.len());
    let sub = check_subadditivity(inst.cost(), inst.metric()).map(|v| v.len());
    let valid = matches!(c1, Ok(0)) && matches!(sub, Ok(0));
    print_json(&json!({
        "valid": valid,
        "points": inst.num_points(),
        "num_commodities": inst.num_commodities(),
        "requests": inst.num_requests(),
        "metric_violations": 0,
        "condition1_violations": describe(c1),
        "subadditivity_violations": describe(sub),
    }));
    Ok(if valid { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn generate(kind: GenKind) -> anyhow::Result<ExitCode> {
    let (source, output) = match kind {
        GenKind::Thm1 { s, seed, output } => (Source::Thm1 { s, seed }, output),
        GenKind::Gx { s, x, seed, output } => (Source::Gx { s, x, seed }, output),
        GenKind::Random {
            seed,
            points,
            commodities,
            requests,
            metric,
            cost,
            max_set_size,
            scale,
            output,
        } => (
            Source::Random {
                seed,
                num_points: points,
                num_commodities: commodities,
                num_requests: requests,
                metric: if metric == "line" { MetricParam::Line } else { MetricParam::Matrix },
                cost: match cost.as_str() {
                    "table" => CostParam::Table,
                    "size_based" => CostParam::SizeBased,
                    _ => CostParam::Poly,
                },
                max_set_size,
                scale,
            },
            output,
        ),
    };
    let inst = source.load(Path::new("."))?;
    emit(&serialize_instance(&inst), output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn opt(path: &Path) -> anyhow::Result<ExitCode> {
    let inst = load(path)?;
    match solve_opt_bruteforce(&inst, &OracleLimits::default()) {
        Ok(r) => {
            print_json(&json!({
                "status": "ok",
                "cost": r.cost,
                "nodes_explored": r.nodes_explored,
                "solution": SolutionDoc::from_solution(&inst, &r.solution),
            }));
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            print_json(&json!({"status": "refused", "reason": e.to_string()}));
            Ok(ExitCode::from(2))
        }
    }
}

fn run(alg: Algorithm, seed: u64, trace: bool, path: &Path) -> anyhow::Result<ExitCode> {
    let inst = load(path)?;
    let result = run_algorithm(&inst, alg, seed)?;
    let mut doc = json!({
        "algorithm": alg.name(),
        "seed": seed,
        "cost": result.cost,
        "violations": result.violations,
        "solution": SolutionDoc::from_solution(&inst, &result.solution),
    });
    if trace {
        doc["trace"] = match alg {
            Algorithm::Pd => serde_json::to_value(pd_trace_doc(&inst, run_pd(&inst).1.trace()))?,
            Algorithm::Rand => serde_json::to_value(rand_trace_doc(&run_rand(&inst, seed)?))?,
            _ => serde_json::Value::Null,
        };
    }
    print_json(&doc);
    Ok(if result.violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn bench(config: &Path, output: Option<PathBuf>) -> anyhow::Result<ExitCode> {
    let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", config.display()))?;
    let base = config.parent().unwrap_or(Path::new("."));
    let out = run_experiment(&cfg, base, threads_from_env()?)?;
    let target = output.or_else(|| cfg.output.as_ref().map(|p| base.join(p)));
    emit(&out.csv, target.as_deref())?;
    let mut bad = false;
    for (t, v) in out.violations() {
        eprintln!("{} {} seed {}: {v}", t.instance_id, t.algorithm.name(), t.seed);
        bad = true;
    }
    Ok(if bad { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { instance } => validate(&instance),
        Command::Gen { kind } => generate(kind),
        Command::Opt { instance } => opt(&instance),
        Command::Run {
            algorithm,
            seed,
            trace,
            instance,
        } => run(algorithm, seed, trace, &instance),
        Command::Bench { config, output } => bench(&config, output),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
