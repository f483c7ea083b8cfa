//! `holder`: compute and verify Hölder-type bound chains from the command
//! line.
//!
//! Exit codes: 0 when the verified chain holds, 2 when a chain check
//! fails, 1 on usage or domain errors.

mod record;

use std::path::Path;
use std::process;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map};

use holder_bounds::expr::{parse, Expr};
use holder_bounds::harness::{self, Case, Family, SweepConfig};
use holder_bounds::hermite_hadamard::{hh_report_with, HHInput};
use holder_bounds::holder_integral::{
    split_point_bound, verify_chain_with, ConjugateExponents, WeightPartition,
};
use holder_bounds::holder_sum::{verify_sum_chain_with, DiscreteWeightPartition, PositiveTuple};
use holder_bounds::quadrature::{Interval, QuadratureConfig};
use holder_bounds::report::ReportTol;

use record::{chain_csv, chain_results, fmt_num, hh_results, sum_results, OutputRecord};

#[derive(Parser)]
#[command(
    name = "holder",
    version,
    about = "Classical and refined Hölder bounds with chain verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integral chain: ∫|fg| <= refined <= (∫|f|^p)^(1/p) (∫|g|^q)^(1/q)
    Integral(IntegralArgs),
    /// Discrete chain over positive tuples
    Sum(SumArgs),
    /// Trapezoid-defect bounds (Dragomir vs refined)
    Hh(HhArgs),
    /// Randomized sweep over generated cases
    Sweep(SweepArgs),
}

#[derive(Args)]
struct IntegralArgs {
    /// Expression for f, e.g. "x^2" or "exp(x) * sin(x)"
    #[arg(long)]
    f: String,
    /// Expression for g
    #[arg(long)]
    g: String,
    /// Left endpoint
    #[arg(long)]
    a: f64,
    /// Right endpoint
    #[arg(long)]
    b: f64,
    /// Exponent p (q = p/(p-1))
    #[arg(long)]
    p: f64,
    /// Comma-separated weight expressions forming a partition
    #[arg(long, conflicts_with_all = ["linear", "trig"])]
    weights: Option<String>,
    /// Linear pair (b-x)/(b-a), (x-a)/(b-a) [default]
    #[arg(long, conflicts_with = "trig")]
    linear: bool,
    /// sin^2 x, cos^2 x pair
    #[arg(long)]
    trig: bool,
    /// Also evaluate the two-piece split-point bound at this lambda in [0,1]
    #[arg(long)]
    lambda: Option<f64>,
    /// Emit the JSON record instead of the table
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Emit a CSV row instead of the table
    #[arg(long)]
    csv: bool,
    /// Fixed report tolerance [default: 1e-8 * max(1, classical)]
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct SumArgs {
    /// Tuple a: inline comma-separated values or a CSV file path
    #[arg(long)]
    a: String,
    /// Tuple b: inline comma-separated values or a CSV file path
    #[arg(long)]
    b: String,
    /// Exponent p (q = p/(p-1))
    #[arg(long)]
    p: f64,
    /// CSV file with one partition row per line
    #[arg(long, conflicts_with = "linear")]
    weights: Option<String>,
    /// Index-linear rows k/n, (n-k)/n [default]
    #[arg(long)]
    linear: bool,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    /// Fixed report tolerance [default: 1e-9 * max(1, classical)]
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct HhArgs {
    /// Expression for f
    #[arg(long)]
    f: String,
    /// Expression for f', validated against f by finite differences
    #[arg(long)]
    fprime: String,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    json: bool,
    /// Fixed report tolerance [default: 1e-8 * max(1, dragomir)]
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Number of trials (>= 1)
    #[arg(long)]
    trials: u64,
    /// Seed determining every generated case
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Case family: poly, exp-trig, mixed, tuples or hh
    #[arg(long, default_value = "mixed")]
    family: Family,
    /// Write the output here instead of stdout
    #[arg(long)]
    out: Option<String>,
    /// Emit one CSV row per trial instead of the JSON summary
    #[arg(long)]
    csv: bool,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            process::exit(code);
        }
    };
    let outcome = match cli.command {
        Command::Integral(args) => run_integral(args),
        Command::Sum(args) => run_sum(args),
        Command::Hh(args) => run_hh(args),
        Command::Sweep(args) => run_sweep_cmd(args),
    };
    match outcome {
        Ok(code) => process::exit(code),
        Err(message) => {
            eprintln!("error: {message}");
            process::exit(1);
        }
    }
}

/// Default quadrature settings: stock tolerances with enough subdivision
/// budget for the kinks |f|^p introduces at zeros of user integrands.
fn quadrature() -> QuadratureConfig {
    QuadratureConfig::default().with_min_subdivisions(4000)
}

/// Report tolerance: --tol beats HOLDER_TOL beats the scaled default.
fn tol_policy(flag: Option<f64>, default_factor: f64) -> Result<ReportTol, String> {
    let fixed = match flag {
        Some(t) => Some(t),
        None => match std::env::var("HOLDER_TOL") {
            Ok(raw) => Some(
                raw.parse::<f64>()
                    .map_err(|_| format!("HOLDER_TOL is not a number: `{raw}`"))?,
            ),
            Err(_) => None,
        },
    };
    match fixed {
        Some(t) if t > 0.0 && t.is_finite() => Ok(ReportTol::fixed(t)),
        Some(t) => Err(format!(
            "report tolerance must be a positive real (got {t})"
        )),
        None => Ok(ReportTol::scaled(default_factor)),
    }
}

fn print_kv(label: &str, value: impl std::fmt::Display) {
    println!("{label:<16}{value}");
}

fn verdict_code(ok: bool) -> i32 {
    if ok {
        0
    } else {
        2
    }
}

fn run_integral(args: IntegralArgs) -> Result<i32, String> {
    let f = parse(&args.f).map_err(|e| e.to_string())?;
    let g = parse(&args.g).map_err(|e| e.to_string())?;
    let interval = Interval::new(args.a, args.b).map_err(|e| e.to_string())?;
    let exps = ConjugateExponents::from_p(args.p).map_err(|e| e.to_string())?;
    let policy = tol_policy(args.tol, 1e-8)?;

    let partition = if let Some(list) = &args.weights {
        let weights = list
            .split(',')
            .map(|w| parse(w.trim()).map_err(|e| format!("weight `{w}`: {e}")))
            .collect::<Result<Vec<Expr>, String>>()?;
        WeightPartition::new(weights, interval).map_err(|e| e.to_string())?
    } else if args.trig {
        WeightPartition::trig(interval).map_err(|e| e.to_string())?
    } else {
        WeightPartition::linear(interval).map_err(|e| e.to_string())?
    };

    let report = verify_chain_with(&f, &g, &exps, &partition, &quadrature(), &policy)
        .map_err(|e| e.to_string())?;
    let split = match args.lambda {
        Some(lambda) => Some(
            split_point_bound(&f, &g, &exps, &interval, lambda, &quadrature())
                .map_err(|e| e.to_string())?,
        ),
        None => None,
    };

    if args.json {
        let mut inputs = Map::new();
        inputs.insert("f".into(), json!(args.f));
        inputs.insert("g".into(), json!(args.g));
        inputs.insert("a".into(), json!(args.a));
        inputs.insert("b".into(), json!(args.b));
        inputs.insert("p".into(), json!(exps.p()));
        inputs.insert("q".into(), json!(exps.q()));
        // Echo --weights verbatim; otherwise show the built-in pair.
        let weights: Vec<String> = match &args.weights {
            Some(list) => list.split(',').map(|w| w.trim().to_string()).collect(),
            None => partition.weights().iter().map(|w| w.to_string()).collect(),
        };
        inputs.insert("weights".into(), json!(weights));
        if let Some(lambda) = args.lambda {
            inputs.insert("lambda".into(), json!(lambda));
        }
        let mut results = chain_results(&report);
        if let Some(split) = split {
            results["split_point"] = json!(split);
        }
        print!(
            "{}",
            OutputRecord::new("integral", inputs, results).to_json()
        );
    } else if args.csv {
        print!("{}", chain_csv("integral", (&report).into()));
    } else {
        print_kv("mode", "integral");
        print_kv("f", &args.f);
        print_kv("g", &args.g);
        print_kv(
            "interval",
            format!("[{}, {}]", fmt_num(args.a), fmt_num(args.b)),
        );
        print_kv(
            "p, q",
            format!("{}, {}", fmt_num(exps.p()), fmt_num(exps.q())),
        );
        print_kv("lhs", fmt_num(report.lhs));
        for (i, term) in report.refined_terms.iter().enumerate() {
            print_kv(&format!("refined[{i}]"), fmt_num(*term));
        }
        print_kv("refined total", fmt_num(report.refined_total));
        print_kv("classical", fmt_num(report.classical));
        print_kv("gap refined", fmt_num(report.gap_refined));
        print_kv("gap lhs", fmt_num(report.gap_lhs));
        if let Some(split) = split {
            print_kv("split point", fmt_num(split));
        }
        print_kv("tolerance", fmt_num(report.tolerance));
        print_kv("chain", if report.chain_ok { "OK" } else { "VIOLATED" });
    }
    Ok(verdict_code(report.chain_ok))
}

/// Numbers from an inline comma-separated list or from a file with
/// newline- or comma-separated values and `#` comments.
fn parse_values(arg: &str) -> Result<Vec<f64>, String> {
    let text = if Path::new(arg).exists() {
        std::fs::read_to_string(arg).map_err(|e| format!("reading {arg}: {e}"))?
    } else {
        arg.to_string()
    };
    let mut values = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for token in line.split(|c: char| c == ',' || c.is_whitespace()) {
            if token.is_empty() {
                continue;
            }
            values.push(
                token
                    .parse::<f64>()
                    .map_err(|_| format!("invalid number `{token}`"))?,
            );
        }
    }
    Ok(values)
}

fn parse_weight_rows(path: &str) -> Result<Vec<Vec<f64>>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))?;
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| format!("invalid number `{t}`"))
            })
            .collect::<Result<Vec<f64>, String>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn run_sum(args: SumArgs) -> Result<i32, String> {
    let a = PositiveTuple::new(parse_values(&args.a)?).map_err(|e| e.to_string())?;
    let b = PositiveTuple::new(parse_values(&args.b)?).map_err(|e| e.to_string())?;
    let exps = ConjugateExponents::from_p(args.p).map_err(|e| e.to_string())?;
    let policy = tol_policy(args.tol, 1e-9)?;

    let partition = if let Some(path) = &args.weights {
        DiscreteWeightPartition::new(parse_weight_rows(path)?).map_err(|e| e.to_string())?
    } else {
        DiscreteWeightPartition::linear(a.len()).map_err(|e| e.to_string())?
    };

    let report =
        verify_sum_chain_with(&a, &b, &exps, &partition, &policy).map_err(|e| e.to_string())?;

    if args.json {
        let mut inputs = Map::new();
        inputs.insert("a".into(), json!(a.values()));
        inputs.insert("b".into(), json!(b.values()));
        inputs.insert("p".into(), json!(exps.p()));
        inputs.insert("q".into(), json!(exps.q()));
        inputs.insert("rows".into(), json!(partition.rows()));
        print!(
            "{}",
            OutputRecord::new("sum", inputs, sum_results(&report)).to_json()
        );
    } else if args.csv {
        print!("{}", chain_csv("sum", (&report).into()));
    } else {
        print_kv("mode", "sum");
        print_kv("n", a.len());
        print_kv(
            "p, q",
            format!("{}, {}", fmt_num(exps.p()), fmt_num(exps.q())),
        );
        print_kv("lhs", fmt_num(report.lhs));
        for (i, term) in report.refined_terms.iter().enumerate() {
            print_kv(&format!("refined[{i}]"), fmt_num(*term));
        }
        print_kv("refined total", fmt_num(report.refined_total));
        print_kv("classical", fmt_num(report.classical));
        print_kv("gap refined", fmt_num(report.gap_refined));
        print_kv("gap lhs", fmt_num(report.gap_lhs));
        print_kv("tolerance", fmt_num(report.tolerance));
        print_kv("chain", if report.chain_ok { "OK" } else { "VIOLATED" });
    }
    Ok(verdict_code(report.chain_ok))
}

fn run_hh(args: HhArgs) -> Result<i32, String> {
    let f = parse(&args.f).map_err(|e| e.to_string())?;
    let f_prime = parse(&args.fprime).map_err(|e| e.to_string())?;
    let interval = Interval::new(args.a, args.b).map_err(|e| e.to_string())?;
    let exps = ConjugateExponents::from_p(args.p).map_err(|e| e.to_string())?;
    let policy = tol_policy(args.tol, 1e-8)?;

    let input = HHInput::new(f, f_prime, interval, exps).map_err(|e| e.to_string())?;
    let report = hh_report_with(&input, &quadrature(), &policy).map_err(|e| e.to_string())?;

    if args.json {
        let mut inputs = Map::new();
        inputs.insert("f".into(), json!(args.f));
        inputs.insert("fprime".into(), json!(args.fprime));
        inputs.insert("a".into(), json!(args.a));
        inputs.insert("b".into(), json!(args.b));
        inputs.insert("p".into(), json!(exps.p()));
        inputs.insert("q".into(), json!(exps.q()));
        print!(
            "{}",
            OutputRecord::new("hh", inputs, hh_results(&report)).to_json()
        );
    } else {
        print_kv("mode", "hh");
        print_kv("f", &args.f);
        print_kv("f'", &args.fprime);
        print_kv(
            "interval",
            format!("[{}, {}]", fmt_num(args.a), fmt_num(args.b)),
        );
        print_kv(
            "p, q",
            format!("{}, {}", fmt_num(exps.p()), fmt_num(exps.q())),
        );
        print_kv("defect", fmt_num(report.defect));
        print_kv("dragomir", fmt_num(report.dragomir));
        print_kv("refined", fmt_num(report.refined));
        print_kv(
            "convexity",
            if report.convexity_ok {
                "probe passed"
            } else {
                "unverified"
            },
        );
        print_kv(
            "ordering",
            if report.ordering_ok { "OK" } else { "VIOLATED" },
        );
    }
    Ok(verdict_code(report.ordering_ok))
}

/// One CSV row per trial, plus whether every evaluated chain held.
fn sweep_csv(config: &SweepConfig) -> (String, bool) {
    let mut all_ok = true;
    let mut rows = Vec::with_capacity(config.trials as usize);
    for trial in 0..config.trials {
        let case = config.case_for_trial(trial);
        let (kind, outcome) = match &case {
            Case::Integral {
                f,
                g,
                exps,
                partition,
            } => (
                "integral",
                verify_chain_with(f, g, exps, partition, &quadrature(), &config.report_tol)
                    .map(|r| (r.lhs, r.refined_total, r.classical, r.chain_ok))
                    .map_err(|e| e.to_string()),
            ),
            Case::Tuples {
                a,
                b,
                exps,
                partition,
            } => (
                "sum",
                verify_sum_chain_with(a, b, exps, partition, &config.report_tol)
                    .map(|r| (r.lhs, r.refined_total, r.classical, r.chain_ok))
                    .map_err(|e| e.to_string()),
            ),
            Case::Hh { input } => (
                "hh",
                hh_report_with(input, &quadrature(), &config.report_tol)
                    .map(|r| (r.defect, r.refined, r.dragomir, r.ordering_ok))
                    .map_err(|e| e.to_string()),
            ),
        };
        let row = match outcome {
            Ok((lhs, refined, classical, ok)) => {
                all_ok &= ok;
                vec![
                    trial.to_string(),
                    kind.to_string(),
                    fmt_num(lhs),
                    fmt_num(refined),
                    fmt_num(classical),
                    fmt_num(classical - refined),
                    fmt_num(refined - lhs),
                    ok.to_string(),
                ]
            }
            Err(message) => vec![
                trial.to_string(),
                kind.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("error: {}", message.replace(',', ";")),
            ],
        };
        rows.push(row);
    }
    let csv = record::csv_document(
        &[
            "trial",
            "kind",
            "lhs",
            "refined_total",
            "classical",
            "gap_refined",
            "gap_lhs",
            "ok",
        ],
        &rows,
    );
    (csv, all_ok)
}

fn run_sweep_cmd(args: SweepArgs) -> Result<i32, String> {
    let config = SweepConfig {
        trials: args.trials,
        seed: args.seed,
        family: args.family,
        ..SweepConfig::default()
    };
    config.validate().map_err(|e| e.to_string())?;

    let (payload, ok) = if args.csv {
        sweep_csv(&config)
    } else {
        let summary = harness::run_sweep(&config).map_err(|e| e.to_string())?;
        let mut inputs = Map::new();
        inputs.insert("trials".into(), json!(config.trials));
        inputs.insert("seed".into(), json!(config.seed));
        inputs.insert("family".into(), json!(config.family.to_string()));
        let ok = summary.violations.is_empty();
        let results = serde_json::to_value(&summary).map_err(|e| e.to_string())?;
        (OutputRecord::new("sweep", inputs, results).to_json(), ok)
    };

    match &args.out {
        Some(path) => {
            std::fs::write(path, payload.as_bytes()).map_err(|e| format!("writing {path}: {e}"))?;
            eprintln!("summary written to {path}");
        }
        None => print!("{payload}"),
    }
    Ok(verdict_code(ok))
}
