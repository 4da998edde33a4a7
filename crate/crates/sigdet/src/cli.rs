//! Command-line interface.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 budget exceeded,
//! 4 verification failure. The exact-evaluation budget can also be set with
//! the `SIGDET_BUDGET` environment variable.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::evaluator::{self, CostReport};
use crate::model::{self, Scenario};
use crate::solver;
use crate::strategy::{self, PresetRule, StrategyProfile};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "sigdet",
    about = "Sequential decentralized detection on sensor graphs",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expected cost of one or more strategy profiles (CSV).
    Evaluate(EvaluateArgs),
    /// Monte Carlo estimate of a profile's expected cost (CSV).
    Simulate(SimulateArgs),
    /// Best response of one sensor: value-table CSV plus structural checks.
    BestResponse(BestResponseArgs),
    /// Person-by-person improvement; prints the cost trace as CSV.
    Iterate(IterateArgs),
    /// Verify the signaling counterexample against its closed forms.
    Counterexample(CounterexampleArgs),
    /// Scenario file utilities.
    Scenario(ScenarioCmd),
}

/// Scenario source: a JSON file or the built-in counterexample preset.
#[derive(Debug, Args)]
struct ScenarioArg {
    /// Path to a scenario JSON file.
    #[arg(long, conflicts_with = "preset")]
    scenario: Option<PathBuf>,
    /// Built-in scenario preset (currently only `counterexample`).
    #[arg(long)]
    preset: Option<String>,
    /// Counterexample parameter K in (1, 2).
    #[arg(long, default_value_t = 1.5)]
    k: f64,
    /// Counterexample parameter r1 in (0, 1).
    #[arg(long, default_value_t = 0.4)]
    r1: f64,
    /// Counterexample mistake cost; defaults to 100x the worst-case
    /// operational cost.
    #[arg(long)]
    mu: Option<f64>,
}

impl ScenarioArg {
    fn load(&self) -> Result<Scenario, Failure> {
        match (&self.scenario, &self.preset) {
            (Some(path), None) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
                Ok(model::scenario_from_json(&text)?)
            }
            (None, Some(name)) if name == "counterexample" => {
                let mu = self.mu.unwrap_or_else(|| model::counterexample_default_mu(self.k));
                Ok(model::counterexample_scenario(self.k, self.r1, mu)?)
            }
            (None, Some(name)) => Err(config_err(format!("unknown scenario preset {name:?}"))),
            _ => Err(config_err("provide exactly one of --scenario or --preset")),
        }
    }
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    /// Comma-separated profile sources: preset rule names (`ex1`, `ex2`,
    /// `non_threshold`) or JSON file paths.
    #[arg(long, value_delimiter = ',', required = true)]
    profiles: Vec<String>,
    /// `exact` (default) or `mc`.
    #[arg(long, default_value = "exact")]
    method: String,
    /// Samples for `--method mc`.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// RNG seed for `--method mc`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trajectory budget for exact evaluation.
    #[arg(long)]
    budget: Option<f64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    #[arg(long)]
    profile: String,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct BestResponseArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    #[arg(long)]
    profile: String,
    /// Index of the responding sensor.
    #[arg(long)]
    sensor: usize,
    #[arg(long)]
    budget: Option<f64>,
    /// Also run the exhaustive oracle and print an equality row.
    #[arg(long)]
    oracle: bool,
    /// Append a person-by-person trace of this many rounds.
    #[arg(long)]
    iterate: Option<usize>,
    /// Tolerance for the structural checks.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Debug, Args)]
struct IterateArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    #[arg(long)]
    profile: String,
    #[arg(long, default_value_t = 10)]
    rounds: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    budget: Option<f64>,
}

#[derive(Debug, Args)]
struct CounterexampleArgs {
    /// Cost of keeping both sensors active, in (1, 2).
    #[arg(long, default_value_t = 1.5)]
    k: f64,
    /// Probability of a revealing first observation at sensor 1, in (0, 1).
    #[arg(long, default_value_t = 0.4)]
    r1: f64,
    /// Mistake cost; defaults to 100x the worst-case operational cost.
    #[arg(long)]
    mu: Option<f64>,
    /// Sweep the default (k, r1) grid and emit cost-gap plot data.
    #[arg(long)]
    grid: bool,
    /// Tolerance against the closed forms.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Debug, Args)]
struct ScenarioCmd {
    #[command(subcommand)]
    action: ScenarioAction,
}

#[derive(Debug, Subcommand)]
enum ScenarioAction {
    /// Parse and validate a scenario file.
    Validate(ScenarioArg),
}

/// A failure with its process exit code.
struct Failure {
    code: i32,
    message: String,
}

fn config_err(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_CONFIG, message: message.into() }
}

impl From<model::ModelError> for Failure {
    fn from(e: model::ModelError) -> Self {
        config_err(e.to_string())
    }
}

impl From<evaluator::EvalError> for Failure {
    fn from(e: evaluator::EvalError) -> Self {
        let code = match e {
            evaluator::EvalError::BudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_CONFIG,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<solver::SolverError> for Failure {
    fn from(e: solver::SolverError) -> Self {
        let code = match e {
            solver::SolverError::BudgetExceeded { .. }
            | solver::SolverError::Eval(evaluator::EvalError::BudgetExceeded { .. }) => EXIT_BUDGET,
            _ => EXIT_CONFIG,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Resolves a profile source: a preset rule name or a JSON file path.
fn load_profile(spec: &str, scenario: &Scenario) -> Result<StrategyProfile, Failure> {
    let name = spec.strip_prefix("preset:").unwrap_or(spec);
    if let Ok(preset) = name.parse::<PresetRule>() {
        return strategy::preset_strategies(preset, scenario)
            .map_err(|e| config_err(e.to_string()));
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| config_err(format!("cannot read profile {spec}: {e}")))?;
    strategy::profile_from_json(&text, scenario).map_err(config_err)
}

/// Runs the CLI and returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Evaluate(args) => evaluate(args),
        Command::Simulate(args) => simulate(args),
        Command::BestResponse(args) => best_response(args),
        Command::Iterate(args) => iterate(args),
        Command::Counterexample(args) => counterexample(args),
        Command::Scenario(cmd) => match cmd.action {
            ScenarioAction::Validate(arg) => {
                let s = arg.load()?;
                println!(
                    "ok: {} sensors, horizon {}, {} messages, {} edges",
                    s.sensor_count(),
                    s.horizon(),
                    s.message_alphabet(),
                    s.graph().edges().count()
                );
                Ok(())
            }
        },
    }
}

fn evaluate(args: EvaluateArgs) -> Result<(), Failure> {
    let scenario = args.scenario.load()?;
    let profiles = args
        .profiles
        .iter()
        .map(|spec| Ok((spec.clone(), load_profile(spec, &scenario)?)))
        .collect::<Result<Vec<_>, Failure>>()?;
    println!("{}", CostReport::CSV_HEADER);
    match args.method.as_str() {
        "exact" => {
            for (name, report) in evaluator::compare_profiles(&scenario, &profiles, args.budget)? {
                println!("{}", report.csv_row(&name));
            }
        }
        "mc" => {
            for (name, profile) in &profiles {
                let report =
                    evaluator::monte_carlo_cost(&scenario, profile, args.samples, args.seed)?;
                println!("{}", report.csv_row(name));
            }
        }
        other => return Err(config_err(format!("unknown method {other:?}"))),
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let scenario = args.scenario.load()?;
    let profile = load_profile(&args.profile, &scenario)?;
    let report = evaluator::monte_carlo_cost(&scenario, &profile, args.samples, args.seed)?;
    println!("{}", CostReport::CSV_HEADER);
    println!("{}", report.csv_row(&args.profile));
    Ok(())
}

fn best_response(args: BestResponseArgs) -> Result<(), Failure> {
    let scenario = args.scenario.load()?;
    if args.sensor >= scenario.sensor_count() {
        return Err(config_err(format!(
            "sensor {} out of range (N = {})",
            args.sensor,
            scenario.sensor_count()
        )));
    }
    let profile = load_profile(&args.profile, &scenario)?;
    let br = solver::best_response(&scenario, &profile, args.sensor, args.budget)?;
    let mut out = Vec::new();
    br.table
        .write_csv(scenario.message_alphabet(), &mut out)
        .map_err(|e| config_err(e.to_string()))?;
    print!("{}", String::from_utf8_lossy(&out));
    eprintln!("root value: {}", br.value);

    let mut failed = Vec::new();
    let concavity = solver::verify_concavity(&br.table, args.tol);
    if !concavity.passed() {
        failed.push(format!("concavity ({} violations)", concavity.violations.len()));
    }
    let intervals = solver::extract_intervals(&br.table, scenario.message_alphabet(), args.tol);
    if !intervals.passed() {
        failed.push(format!("intervals ({} violations)", intervals.violations.len()));
    }
    let sufficiency = solver::verify_info_state_sufficiency(
        &scenario,
        &profile,
        args.sensor,
        args.tol,
        args.budget,
    )?;
    if !sufficiency.passed() {
        failed.push(format!("sufficiency ({} violations)", sufficiency.violations.len()));
    }
    eprintln!(
        "checks: concavity {} ({} triples), intervals {} ({} groups), sufficiency {} ({} groups)",
        status(concavity.passed()),
        concavity.triples_checked,
        status(intervals.passed()),
        intervals.groups_checked,
        status(sufficiency.passed()),
        sufficiency.groups_checked,
    );

    if args.oracle {
        let (_, bf_value) =
            solver::brute_force_best_response(&scenario, &profile, args.sensor, None)?;
        println!("oracle,dp_value,bf_value,abs_diff");
        println!("oracle,{},{bf_value},{}", br.value, (br.value - bf_value).abs());
        if (br.value - bf_value).abs() > 1e-10 {
            failed.push("oracle equality".into());
        }
    }
    if let Some(rounds) = args.iterate {
        let result =
            solver::person_by_person(&scenario, &profile, rounds, 1e-12, args.budget)?;
        println!("step,expected_cost");
        for (k, cost) in result.trace.iter().enumerate() {
            println!("{k},{cost}");
        }
    }

    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFY,
            message: format!("verification failed: {}", failed.join(", ")),
        })
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn iterate(args: IterateArgs) -> Result<(), Failure> {
    let scenario = args.scenario.load()?;
    let profile = load_profile(&args.profile, &scenario)?;
    let result =
        solver::person_by_person(&scenario, &profile, args.rounds, args.tol, args.budget)?;
    println!("step,expected_cost");
    for (k, cost) in result.trace.iter().enumerate() {
        println!("{k},{cost}");
    }
    eprintln!("rounds: {}", result.rounds);
    Ok(())
}

fn counterexample(args: CounterexampleArgs) -> Result<(), Failure> {
    let points: Vec<(f64, f64)> = if args.grid {
        let ks = [1.1, 1.5, 1.9];
        let r1s = [0.1, 0.4, 0.6, 0.9];
        ks.iter()
            .flat_map(|&k| r1s.iter().map(move |&r1| (k, r1)))
            .collect()
    } else {
        vec![(args.k, args.r1)]
    };

    if args.grid {
        // Plot-ready series: cost gap (best threshold minus signaling) vs r1.
        println!("k,r1,cost_ex1,cost_ex2,cost_non_threshold,gap");
    } else {
        println!("k,r1,preset,closed_form,exact,abs_diff");
    }
    let mut failures = Vec::new();
    for (k, r1) in points {
        let mu = args.mu.unwrap_or_else(|| model::counterexample_default_mu(k));
        let scenario = model::counterexample_scenario(k, r1, mu)?;
        let cases = [
            (PresetRule::Ex1, evaluator::ex1_closed_form(k, r1)),
            (PresetRule::Ex2, evaluator::ex2_closed_form(k, r1)),
            (
                PresetRule::NonThreshold,
                evaluator::non_threshold_closed_form(k, r1),
            ),
        ];
        let mut exacts = Vec::new();
        for (preset, closed) in cases {
            let profile = strategy::preset_strategies(preset, &scenario)
                .map_err(|e| config_err(e.to_string()))?;
            let exact = evaluator::exact_expected_cost(&scenario, &profile, None)?.expected_cost;
            let diff = (exact - closed).abs();
            if !args.grid {
                println!("{k},{r1},{preset},{closed},{exact},{diff}");
            }
            if diff > args.tol {
                failures.push(format!(
                    "k={k} r1={r1} {preset}: |exact - closed form| = {diff:e}"
                ));
            }
            exacts.push(exact);
        }
        let best_threshold = exacts[0].min(exacts[1]);
        let gap = best_threshold - exacts[2];
        if args.grid {
            println!(
                "{k},{r1},{},{},{},{gap}",
                exacts[0], exacts[1], exacts[2]
            );
        }
        if r1 < 2.0 / 3.0 {
            if gap <= 0.0 {
                failures.push(format!(
                    "k={k} r1={r1}: signaling rule does not beat the threshold rules"
                ));
            } else if !args.grid {
                eprintln!("k={k} r1={r1}: non-threshold strictly better, gap {gap}");
            }
        } else if !args.grid {
            eprintln!("k={k} r1={r1}: no strict improvement required (r1 >= 2/3)");
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFY,
            message: failures.join("; "),
        })
    }
}
