//! Experiment manifests, run artifacts on disk, and plot-ready exports.
//!
//! A run directory looks like
//!
//! ```text
//! out/
//!   scenario.toml        canonical copy of the scenario
//!   provenance.json      config hash, seeds, version, creation time
//!   summary.json         final metrics per seed and averaged over seeds
//!   seed-<s>/<mode>/<metric>.csv
//! ```
//!
//! where `<mode>` is `cooperative`, `central` or `no-cooperation`. Trace
//! CSVs have columns `round,agent,value`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::belief::BeliefSnapshot;
use crate::error::{Error, Result};
use crate::gaussian::GaussianSnapshot;
use crate::rates::{empirical_decay_rate, RateReport};
use crate::sim::run::{check_engine, run_resolved, Mode, RunTrace, TraceBeliefs};
use crate::sim::scenario::{EngineKind, Scenario, Setup};

pub const MODES: [Mode; 3] = [Mode::Cooperative, Mode::Central, Mode::NoCooperation];
pub const DEFAULT_BURN_IN: usize = 200;

/// Per-round quantities that can be written as traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Public belief on the true parameter (finite engine).
    ThetaStarBelief,
    /// Log public belief on every parameter (finite engine).
    LogBelief,
    /// Test-set MSE of the public posterior mean (Gaussian engine).
    Mse,
}

impl Metric {
    pub fn applies_to(self, engine: EngineKind) -> bool {
        match self {
            Metric::ThetaStarBelief | Metric::LogBelief => engine == EngineKind::Finite,
            Metric::Mse => engine == EngineKind::Gaussian,
        }
    }

    pub fn all_for(engine: EngineKind) -> Vec<Metric> {
        [Metric::ThetaStarBelief, Metric::LogBelief, Metric::Mse]
            .into_iter()
            .filter(|m| m.applies_to(engine))
            .collect()
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta-star-belief" => Ok(Metric::ThetaStarBelief),
            "log-belief" => Ok(Metric::LogBelief),
            "mse" => Ok(Metric::Mse),
            other => Err(Error::Config(format!("unknown metric {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    /// Full belief snapshots as JSON, one file per mode.
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown export format {other:?}"))),
        }
    }
}

/// Parses `"1..50"` (inclusive), `"1..=50"`, `"3,7,9"` or a mix such as
/// `"1..3,10"`. Seeds must be unique.
pub fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let bad = || Error::Config(format!("bad seed list {spec:?}"));
    let mut seeds = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
            if hi < lo {
                return Err(bad());
            }
            seeds.extend(lo..=hi);
        } else {
            seeds.push(part.parse().map_err(|_| bad())?);
        }
    }
    check_seeds(&seeds)?;
    Ok(seeds)
}

fn check_seeds(seeds: &[u64]) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::Config("seed list is empty".into()));
    }
    let mut seen = BTreeSet::new();
    if let Some(dup) = seeds.iter().find(|s| !seen.insert(**s)) {
        return Err(Error::Config(format!("seed {dup} is listed twice")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedList {
    Spec(String),
    List(Vec<u64>),
}

impl SeedList {
    pub fn resolve(&self) -> Result<Vec<u64>> {
        match self {
            SeedList::Spec(s) => parse_seeds(s),
            SeedList::List(v) => check_seeds(v).map(|_| v.clone()),
        }
    }
}

/// What to run and where to put it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub scenario: PathBuf,
    pub out: PathBuf,
    pub seeds: SeedList,
    /// Traces to write; every metric the engine supports when absent.
    #[serde(default)]
    pub metrics: Option<Vec<Metric>>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default)]
    pub engine: Option<EngineKind>,
    #[serde(default)]
    pub jobs: Option<usize>,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv]
}

impl ExperimentManifest {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Missing(format!("manifest {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Missing(format!("scenario {}: {e}", path.display())))?;
    Scenario::from_toml_str(&text)
}

/// Final-round values for one mode of one seed, one entry per agent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_theta_star_belief: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_mse: Option<Vec<f64>>,
    /// `‖μ − θ*‖_∞` of each agent's final posterior mean.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_mean_error_linf: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub cooperative: ModeSummary,
    pub central: ModeSummary,
    pub no_cooperation: ModeSummary,
}

/// Means over agents and seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeAggregate {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_final_theta_star_belief: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_final_mse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_final_mean_error_linf: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub cooperative: ModeAggregate,
    pub central: ModeAggregate,
    pub no_cooperation: ModeAggregate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub engine: EngineKind,
    pub n_agents: usize,
    pub rounds: usize,
    pub batch_size: usize,
    pub seeds: Vec<u64>,
    pub metrics: Vec<Metric>,
    /// Parameter labels (finite engine).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameters: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<usize>,
    pub per_seed: Vec<SeedSummary>,
    pub aggregate: Aggregate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub scenario_path: PathBuf,
    /// SHA-256 of `scenario.toml` in the run directory.
    pub scenario_sha256: String,
    pub seeds: Vec<u64>,
    pub metrics: Vec<Metric>,
    pub formats: Vec<Format>,
    pub created_unix: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Full-precision float formatting used in every CSV.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn mode_dir(mode: Mode) -> &'static str {
    mode.name()
}

fn seed_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed-{seed}"))
}

fn trace_path(out: &Path, seed: u64, mode: Mode, file: &str) -> PathBuf {
    seed_dir(out, seed).join(mode_dir(mode)).join(file)
}

fn log_belief_file(theta: usize) -> String {
    format!("log_belief_{theta}.csv")
}

fn write_matrix_csv(path: &Path, values: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["round", "agent", "value"])?;
    for (round, row) in values.iter().enumerate() {
        for (agent, v) in row.iter().enumerate() {
            w.write_record([round.to_string(), agent.to_string(), fmt_f64(*v)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a `round,agent,value` trace back into `[round][agent]` form.
pub fn read_matrix_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    if !path.exists() {
        return Err(Error::Missing(format!("trace {} does not exist", path.display())));
    }
    let mut r = csv::Reader::from_path(path)?;
    let mut out: Vec<Vec<f64>> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::Missing(format!("short row in {}", path.display())));
        let round: usize = field(0)?.parse().map_err(|_| Error::Missing(format!("bad round in {}", path.display())))?;
        let agent: usize = field(1)?.parse().map_err(|_| Error::Missing(format!("bad agent in {}", path.display())))?;
        let value: f64 = field(2)?.parse().map_err(|_| Error::Missing(format!("bad value in {}", path.display())))?;
        if round == out.len() {
            out.push(Vec::new());
        }
        if round + 1 != out.len() || agent != out[round].len() {
            return Err(Error::Missing(format!("rows out of order in {}", path.display())));
        }
        out[round].push(value);
    }
    Ok(out)
}

fn mode_summary(trace: &RunTrace, setup: &Setup) -> ModeSummary {
    let last = |m: &Option<Vec<Vec<f64>>>| m.as_ref().and_then(|v| v.last().cloned());
    let final_mean_error_linf = match (&trace.beliefs, setup) {
        (TraceBeliefs::Gaussian(s), Setup::Gaussian(g)) => s.private.last().map(|agents| {
            agents
                .iter()
                .map(|b| {
                    b.mean()
                        .iter()
                        .zip(&g.theta_star)
                        .map(|(m, t)| (m - t).abs())
                        .fold(0.0, f64::max)
                })
                .collect()
        }),
        _ => None,
    };
    ModeSummary {
        final_theta_star_belief: last(&trace.theta_star_belief),
        final_mse: last(&trace.mse),
        final_mean_error_linf,
    }
}

fn write_traces(out: &Path, trace: &RunTrace, metrics: &[Metric], formats: &[Format], setup: &Setup) -> Result<()> {
    let dir = seed_dir(out, trace.seed).join(mode_dir(trace.mode));
    fs::create_dir_all(&dir)?;
    if formats.contains(&Format::Csv) {
        for metric in metrics {
            match metric {
                Metric::ThetaStarBelief => {
                    if let Some(v) = &trace.theta_star_belief {
                        write_matrix_csv(&dir.join("theta_star_belief.csv"), v)?;
                    }
                }
                Metric::Mse => {
                    if let Some(v) = &trace.mse {
                        write_matrix_csv(&dir.join("mse.csv"), v)?;
                    }
                }
                Metric::LogBelief => {
                    if let Some(s) = trace.finite() {
                        let n_params = s.public[0][0].len();
                        for theta in 0..n_params {
                            let values: Vec<Vec<f64>> = s
                                .public
                                .iter()
                                .map(|round| round.iter().map(|b| b.log_prob(theta)).collect())
                                .collect();
                            write_matrix_csv(&dir.join(log_belief_file(theta)), &values)?;
                        }
                    }
                }
            }
        }
    }
    if formats.contains(&Format::Json) {
        let json = match (&trace.beliefs, setup) {
            (TraceBeliefs::Finite(s), Setup::Finite(f)) => {
                let conv = |rounds: &Vec<Vec<crate::belief::FiniteBelief>>| -> Vec<Vec<BeliefSnapshot>> {
                    rounds
                        .iter()
                        .map(|r| r.iter().map(|b| b.snapshot(f.params())).collect())
                        .collect()
                };
                serde_json::json!({ "public": conv(&s.public), "private": conv(&s.private) })
            }
            (TraceBeliefs::Gaussian(s), _) => {
                let conv = |rounds: &Vec<Vec<crate::gaussian::GaussianBelief>>| -> Vec<Vec<GaussianSnapshot>> {
                    rounds.iter().map(|r| r.iter().map(|b| b.snapshot()).collect()).collect()
                };
                serde_json::json!({ "public": conv(&s.public), "private": conv(&s.private) })
            }
            _ => unreachable!("trace engine matches its setup"),
        };
        fs::write(dir.join("snapshots.json"), serde_json::to_vec(&json)?)?;
    }
    Ok(())
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn aggregate(per_seed: &[SeedSummary], pick: impl Fn(&SeedSummary) -> &ModeSummary) -> ModeAggregate {
    let avg = |f: &dyn Fn(&ModeSummary) -> &Option<Vec<f64>>| {
        let all: Vec<f64> = per_seed
            .iter()
            .filter_map(|s| f(pick(s)).as_ref())
            .flat_map(|v| v.iter().copied())
            .collect();
        mean(all.into_iter())
    };
    ModeAggregate {
        mean_final_theta_star_belief: avg(&|m| &m.final_theta_star_belief),
        mean_final_mse: avg(&|m| &m.final_mse),
        mean_final_mean_error_linf: avg(&|m| &m.final_mean_error_linf),
    }
}

/// Runs the cooperative rule and both baselines for every seed, writing
/// traces, `summary.json` and `provenance.json` under `manifest.out`.
pub fn run_experiment(manifest: &ExperimentManifest) -> Result<Summary> {
    let scenario = load_scenario(&manifest.scenario)?;
    check_engine(&scenario, manifest.engine)?;
    let seeds = manifest.seeds.resolve()?;
    let engine = scenario.engine();
    let metrics: Vec<Metric> = match &manifest.metrics {
        Some(m) => {
            if let Some(bad) = m.iter().find(|m| !m.applies_to(engine)) {
                return Err(Error::Config(format!("metric {bad:?} is not produced by the {engine:?} engine")));
            }
            let set: BTreeSet<Metric> = m.iter().copied().collect();
            set.into_iter().collect()
        }
        None => Metric::all_for(engine),
    };
    let formats: Vec<Format> = manifest.formats.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let (topology, setup) = scenario.resolve()?;

    let out = &manifest.out;
    fs::create_dir_all(out)?;
    let canonical = scenario.to_toml_string()?;
    fs::write(out.join("scenario.toml"), &canonical)?;

    let one_seed = |seed: u64| -> Result<SeedSummary> {
        log::info!("seed {seed}");
        let mut modes = Vec::with_capacity(3);
        for mode in MODES {
            let trace = run_resolved(&topology, &setup, scenario.rounds, scenario.batch_size, seed, mode)?;
            write_traces(out, &trace, &metrics, &formats, &setup)?;
            modes.push(mode_summary(&trace, &setup));
        }
        let no_cooperation = modes.pop().expect("three modes");
        let central = modes.pop().expect("three modes");
        let cooperative = modes.pop().expect("three modes");
        Ok(SeedSummary {
            seed,
            cooperative,
            central,
            no_cooperation,
        })
    };

    let jobs = manifest.jobs.unwrap_or(1).max(1);
    let per_seed: Vec<SeedSummary> = if jobs == 1 {
        seeds.iter().map(|&s| one_seed(s)).collect::<Result<_>>()?
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| seeds.par_iter().map(|&s| one_seed(s)).collect::<Result<_>>())?
    };

    let (parameters, truth) = match &setup {
        Setup::Finite(f) => (Some(f.params().labels().to_vec()), Some(f.truth_index)),
        Setup::Gaussian(_) => (None, None),
    };
    let summary = Summary {
        scenario: scenario.name.clone(),
        engine,
        n_agents: topology.n_agents(),
        rounds: scenario.rounds,
        batch_size: scenario.batch_size,
        seeds: seeds.clone(),
        metrics: metrics.clone(),
        parameters,
        truth,
        aggregate: Aggregate {
            cooperative: aggregate(&per_seed, |s| &s.cooperative),
            central: aggregate(&per_seed, |s| &s.central),
            no_cooperation: aggregate(&per_seed, |s| &s.no_cooperation),
        },
        per_seed,
    };
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;

    let provenance = Provenance {
        tool: "agora".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        scenario_path: manifest.scenario.clone(),
        scenario_sha256: sha256_hex(canonical.as_bytes()),
        seeds,
        metrics,
        formats,
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    fs::write(out.join("provenance.json"), serde_json::to_string_pretty(&provenance)? + "\n")?;
    Ok(summary)
}

pub fn write_rate_report(path: &Path, report: &RateReport) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(report)? + "\n")?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Missing(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

/// Paths written by [`export_plots`].
#[derive(Clone, Debug, PartialEq)]
pub struct Exported {
    pub mse: PathBuf,
    pub belief: PathBuf,
    pub decay: PathBuf,
}

/// Turns a run directory into per-figure CSVs in `dest`:
/// `mse_vs_round.csv` and `belief_theta_star_vs_round.csv` (mean over agents
/// and seeds, one column per mode) and `decay_fit.csv` (one row per seed,
/// agent and wrong parameter). Metrics absent from the run give header-only
/// files.
pub fn export_plots(run_dir: &Path, dest: &Path, burn_in: Option<usize>) -> Result<Exported> {
    if !run_dir.is_dir() {
        return Err(Error::Missing(format!("run directory {} does not exist", run_dir.display())));
    }
    let summary: Summary = read_json(&run_dir.join("summary.json"))?;
    fs::create_dir_all(dest)?;
    let exported = Exported {
        mse: dest.join("mse_vs_round.csv"),
        belief: dest.join("belief_theta_star_vs_round.csv"),
        decay: dest.join("decay_fit.csv"),
    };
    let has = |m: Metric| summary.metrics.contains(&m);

    for (metric, file, path) in [
        (Metric::Mse, "mse.csv", &exported.mse),
        (Metric::ThetaStarBelief, "theta_star_belief.csv", &exported.belief),
    ] {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["round", "cooperative", "central", "no_cooperation"])?;
        if has(metric) {
            let mut columns = Vec::with_capacity(3);
            for mode in MODES {
                let mut sums = vec![0.0; summary.rounds + 1];
                for &seed in &summary.seeds {
                    let m = read_matrix_csv(&trace_path(run_dir, seed, mode, file))?;
                    if m.len() != summary.rounds + 1 {
                        return Err(Error::Missing(format!(
                            "trace for seed {seed} has {} rounds, expected {}",
                            m.len(),
                            summary.rounds + 1
                        )));
                    }
                    for (s, row) in sums.iter_mut().zip(&m) {
                        *s += row.iter().sum::<f64>() / row.len() as f64;
                    }
                }
                columns.push(sums.into_iter().map(|s| s / summary.seeds.len() as f64).collect::<Vec<_>>());
            }
            for round in 0..=summary.rounds {
                w.write_record([
                    round.to_string(),
                    fmt_f64(columns[0][round]),
                    fmt_f64(columns[1][round]),
                    fmt_f64(columns[2][round]),
                ])?;
            }
        }
        w.flush()?;
    }

    let mut w = csv::Writer::from_path(&exported.decay)?;
    w.write_record(["seed", "agent", "parameter", "slope", "std_error", "start", "end", "truncated"])?;
    if has(Metric::LogBelief) {
        let truth = summary
            .truth
            .ok_or_else(|| Error::Missing("summary.json has no true parameter".into()))?;
        let n_params = summary.parameters.as_ref().map_or(0, Vec::len);
        let burn_in = burn_in.unwrap_or_else(|| DEFAULT_BURN_IN.min(summary.rounds / 10));
        for &seed in &summary.seeds {
            for theta in (0..n_params).filter(|&t| t != truth) {
                let m = read_matrix_csv(&trace_path(run_dir, seed, Mode::Cooperative, &log_belief_file(theta)))?;
                for agent in 0..summary.n_agents {
                    let series: Vec<f64> = m.iter().map(|row| row[agent]).collect();
                    let fit = empirical_decay_rate(&series, burn_in)?;
                    w.write_record([
                        seed.to_string(),
                        agent.to_string(),
                        theta.to_string(),
                        fmt_f64(fit.slope),
                        fmt_f64(fit.std_error),
                        fit.start.to_string(),
                        fit.end.to_string(),
                        fit.truncated.to_string(),
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(exported)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_specs() {
        assert_eq!(parse_seeds("1..5").unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(parse_seeds("1..=3, 9").unwrap(), vec![1, 2, 3, 9]);
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert_eq!(parse_seeds("1..50").unwrap().len(), 50);
        assert!(parse_seeds("").is_err());
        assert!(parse_seeds("1..3,2").is_err());
        assert!(parse_seeds("5..1").is_err());
        assert!(parse_seeds("x").is_err());
        assert!(SeedList::List(vec![]).resolve().is_err());
    }

    #[test]
    fn floats_round_trip_through_csv_format() {
        for x in [0.1, 1.0 / 3.0, -7.25e-300, 123456789.123456789, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn manifest_accepts_list_or_range() {
        let m = ExperimentManifest::from_toml_str(
            "scenario = \"a.toml\"\nout = \"o\"\nseeds = \"1..3\"\nmetrics = [\"mse\"]\n",
        )
        .unwrap();
        assert_eq!(m.seeds.resolve().unwrap(), vec![1, 2, 3]);
        assert_eq!(m.formats, vec![Format::Csv]);
        let m = ExperimentManifest::from_toml_str("scenario = \"a.toml\"\nout = \"o\"\nseeds = [4, 2]\n").unwrap();
        assert_eq!(m.seeds.resolve().unwrap(), vec![4, 2]);
        assert_eq!(m.metrics, None);
    }

    #[test]
    fn metric_engine_compatibility() {
        assert_eq!(Metric::all_for(EngineKind::Gaussian), vec![Metric::Mse]);
        assert_eq!(
            Metric::all_for(EngineKind::Finite),
            vec![Metric::ThetaStarBelief, Metric::LogBelief]
        );
    }
}
