use std::path::PathBuf;
use std::process::ExitCode;

use agora::io::{self, ExperimentManifest, Format, Metric, SeedList};
use agora::rates::Learnability;
use agora::sim::report::{rate_report, DEFAULT_DELTAS, DEFAULT_EPSILON_FRACTIONS};
use agora::sim::run::check_engine;
use agora::sim::EngineKind;
use agora::{Error, Result};
use clap::{Args, Parser, Subcommand};

/// Decentralized Bayesian learning experiments.
#[derive(Parser)]
#[command(name = "agora", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the cooperative rule and both baselines for every seed.
    Run(RunArgs),
    /// Print the convergence rate, centrality and sample-complexity table.
    Rates(RatesArgs),
    /// Turn a run directory into plot-ready CSVs.
    ExportPlots(ExportArgs),
    /// Check a scenario without running it.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Manifest file; command-line flags override its fields.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Seed list such as `1..50` or `3,7,9`.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_engine)]
    engine: Option<EngineKind>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Comma-separated traces to write (theta-star-belief, log-belief, mse).
    /// An empty value writes no traces.
    #[arg(long)]
    metrics: Option<String>,
    /// Comma-separated output formats (csv, json).
    #[arg(long)]
    formats: Option<String>,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Write the full report as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the text summary.
    #[arg(long)]
    json: bool,
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    /// ε values as fractions of K(Θ).
    #[arg(long, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_engine)]
    engine: Option<EngineKind>,
}

#[derive(Args)]
struct ExportArgs {
    /// Run directory written by `agora run`.
    #[arg(long)]
    traces: PathBuf,
    /// Destination directory; defaults to `<traces>/plots`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    burn_in: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_parser = parse_engine)]
    engine: Option<EngineKind>,
}

fn parse_engine(s: &str) -> std::result::Result<EngineKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_list<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<Vec<T>> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).map(str::parse).collect()
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let base = match &args.manifest {
        Some(p) => Some(ExperimentManifest::load(p)?),
        None => None,
    };
    let missing = |what: &str| Error::Config(format!("--{what} is required without a manifest"));
    let scenario = match (args.scenario, &base) {
        (Some(p), _) => p,
        (None, Some(m)) => m.scenario.clone(),
        (None, None) => return Err(missing("scenario")),
    };
    let seeds = match (args.seeds, &base) {
        (Some(s), _) => SeedList::Spec(s),
        (None, Some(m)) => m.seeds.clone(),
        (None, None) => return Err(missing("seeds")),
    };
    let out = match (args.out, &base) {
        (Some(p), _) => p,
        (None, Some(m)) => m.out.clone(),
        (None, None) => return Err(missing("out")),
    };
    let metrics = match args.metrics {
        Some(s) => Some(parse_list::<Metric>(&s)?),
        None => base.as_ref().and_then(|m| m.metrics.clone()),
    };
    let formats = match args.formats {
        Some(s) => parse_list::<Format>(&s)?,
        None => base.as_ref().map_or_else(|| vec![Format::Csv], |m| m.formats.clone()),
    };
    let manifest = ExperimentManifest {
        scenario,
        out,
        seeds,
        metrics,
        formats,
        engine: args.engine.or(base.as_ref().and_then(|m| m.engine)),
        jobs: args.jobs.or(base.as_ref().and_then(|m| m.jobs)),
    };
    let summary = io::run_experiment(&manifest)?;
    println!(
        "{}: {} seeds, {} rounds, {} agents -> {}",
        summary.scenario,
        summary.seeds.len(),
        summary.rounds,
        summary.n_agents,
        manifest.out.display()
    );
    for (name, agg) in [
        ("cooperative", &summary.aggregate.cooperative),
        ("central", &summary.aggregate.central),
        ("no-cooperation", &summary.aggregate.no_cooperation),
    ] {
        if let Some(b) = agg.mean_final_theta_star_belief {
            println!("  {name:<15} final belief on truth {b:.6}");
        }
        if let Some(m) = agg.mean_final_mse {
            println!("  {name:<15} final MSE {m:.6}");
        }
    }
    Ok(())
}

fn cmd_rates(args: RatesArgs) -> Result<()> {
    let scenario = io::load_scenario(&args.scenario)?;
    check_engine(&scenario, args.engine)?;
    let deltas = args.deltas.unwrap_or_else(|| DEFAULT_DELTAS.to_vec());
    let fractions = args.epsilons.unwrap_or_else(|| DEFAULT_EPSILON_FRACTIONS.to_vec());
    let report = rate_report(&scenario, &deltas, &fractions)?;
    if let Some(path) = &args.out {
        io::write_rate_report(path, &report)?;
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("scenario {}", scenario.name);
        println!("centrality {:?}", report.centrality);
        println!(
            "lambda_max {:.6}  spectral gap {:.6}  mixing bound {:.6}",
            report.lambda_max, report.spectral_gap, report.mixing_bound
        );
        for (i, set) in report.local_optimal_sets.iter().enumerate() {
            let labels: Vec<&str> = set.iter().map(|&t| report.parameters[t].as_str()).collect();
            println!("agent {i} optimal set {labels:?}");
        }
        if let Some(k) = &report.k_theta {
            let pair = k
                .argmin
                .map(|(a, b)| format!("({}, {})", report.parameters[a], report.parameters[b]))
                .unwrap_or_else(|| "none".into());
            println!("K(Theta) {:.8} at {pair}", k.value);
            println!("{:>8} {:>12} {:>14} vacuous", "delta", "epsilon", "rounds");
            for row in &report.sample_complexity {
                println!("{:>8} {:>12.6e} {:>14} {}", row.delta, row.epsilon, row.rounds, row.vacuous);
            }
        }
    }
    if report.learnability == Learnability::NotGloballyLearnable {
        return Err(Error::Assumption(
            "not globally learnable: the agents' optimal parameter sets do not intersect".into(),
        ));
    }
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let dest = args.out.unwrap_or_else(|| args.traces.join("plots"));
    let paths = io::export_plots(&args.traces, &dest, args.burn_in)?;
    for p in [paths.mse, paths.belief, paths.decay] {
        println!("{}", p.display());
    }
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    let scenario = io::load_scenario(&args.scenario)?;
    check_engine(&scenario, args.engine)?;
    let report = scenario.validate()?;
    for w in &report.warnings {
        log::warn!("{w}");
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn error_json(e: &Error) -> serde_json::Value {
    let mut v = serde_json::json!({
        "error": e.kind(),
        "exit_code": e.exit_code(),
        "message": e.to_string(),
    });
    if let Error::AtAgent { round, agent, .. } = e {
        v["round"] = (*round).into();
        v["agent"] = (*agent).into();
    }
    if let Error::InvalidGraph(report) = e.root() {
        v["report"] = serde_json::to_value(report).unwrap_or_default();
    }
    v
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("AGORA_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Rates(a) => cmd_rates(a),
        Command::ExportPlots(a) => cmd_export(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
