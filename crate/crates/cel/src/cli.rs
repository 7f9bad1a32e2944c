// SPDX-License-Identifier: Apache-2.0

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cel_core::bounds::{self, DeltaEta};
use cel_core::codes;
use cel_core::forbidden::{self, BallSpec};
use cel_core::seed;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::ExperimentFile;
use crate::output;
use crate::runner::Runner;
use crate::selftest::{self, Mutation};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "cel", version, about = "Causal adversarial erasure channel lab")]
pub struct Cli {
    /// Worker threads for simulations.
    #[arg(long, global = true, env = "CEL_JOBS")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rate curves of every bound over a grid of erasure fractions, as CSV.
    Bounds(BoundsArgs),
    /// Exact forbidden-ball size.
    Ball(BallArgs),
    /// Sample a systematic randomized code and print its diagnostics.
    Code(CodeArgs),
    /// Prune a sampled code against an erasure budget.
    Prune(PruneArgs),
    /// Run an experiment file.
    Simulate(SimulateArgs),
    /// Run the built-in checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 0.0)]
    pub p_min: f64,
    #[arg(long, default_value_t = 0.5)]
    pub p_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Slack of the finite-rate curve.
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.01)]
    pub eta: f64,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BallArgs {
    #[arg(long)]
    pub n: usize,
    /// Prefix (message) length.
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub budget: usize,
    /// First-step erasures inside the prefix.
    #[arg(long, default_value_t = 0)]
    pub q: usize,
    /// Also enumerate a random ball and compare with the formula.
    #[arg(long)]
    pub enumerate: bool,
    /// Seed of the random center used with --enumerate.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Coin bits.
    #[arg(long, default_value_t = 0)]
    pub d: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PruneArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Experiment file (JSON, schema_version 1).
    #[arg(long)]
    pub config: PathBuf,
    /// Master seed; overrides the file's master_seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV report (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON detail report; defaults to the CSV path with a .json extension.
    #[arg(long)]
    pub detail: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, value_enum, default_value_t = Mutation::None, hide = true)]
    pub mutate: Mutation,
}

/// Parses `args` and runs the command, mapping failures to exit codes.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cel: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    match cli.command {
        Command::Bounds(a) => cmd_bounds(&a),
        Command::Ball(a) => cmd_ball(&a),
        Command::Code(a) => cmd_code(&a),
        Command::Prune(a) => cmd_prune(&a),
        Command::Simulate(a) => cmd_simulate(&a, jobs),
        Command::Selftest(a) => cmd_selftest(&a),
    }
}

fn usage(e: cel_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write stdout: {e}"))),
    }
}

fn emit_json(out: Option<&Path>, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    emit(out, &text)
}

fn cmd_bounds(a: &BoundsArgs) -> Result<(), CliError> {
    let de = DeltaEta::new(a.delta, a.eta).map_err(usage)?;
    let points = bounds::emit_curves(a.p_min, a.p_max, a.step, de).map_err(usage)?;
    emit(a.out.as_deref(), &output::bounds_csv(&points))?;
    eprintln!(
        "p1 = {}  phi = {}  points = {}",
        output::f9(bounds::p1()),
        output::f9(bounds::phi_intersection()),
        points.len() / bounds::Bound::ALL.len()
    );
    Ok(())
}

fn cmd_ball(a: &BallArgs) -> Result<(), CliError> {
    let size = forbidden::ball_size(a.n, a.k, a.budget, a.q).map_err(usage)?;
    let mut record = json!({
        "n": a.n,
        "k": a.k,
        "budget": a.budget,
        "q": a.q,
        "size": size.to_string(),
        "log2_size": output::round9(forbidden::log2_big(&size)),
    });
    let mut pass = true;
    if a.enumerate {
        if a.n > forbidden::ENUMERATION_LIMIT {
            return Err(CliError::Usage(format!(
                "--enumerate needs n <= {}",
                forbidden::ENUMERATION_LIMIT
            )));
        }
        let mut rng = seed::rng_from(a.seed);
        let spec = BallSpec::random(a.n, a.k, a.budget, a.q, &mut rng).map_err(usage)?;
        let members = forbidden::ball_enumerate(&spec).map_err(usage)?;
        pass = size == members.len().into();
        record["center"] = format!("{}|{}", spec.center_prefix(), spec.center_suffix()).into();
        record["enumerated"] = members.len().into();
        record["oracle"] = if pass { "pass" } else { "fail" }.into();
        eprintln!("oracle: {}", if pass { "pass" } else { "fail" });
    }
    emit_json(None, &record)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Check("ball formula disagrees with enumeration".into()))
    }
}

fn code_header(a: &CodeArgs) -> serde_json::Value {
    json!({"n": a.n, "k": a.k, "d": a.d, "seed": a.seed})
}

fn cmd_code(a: &CodeArgs) -> Result<(), CliError> {
    let table = codes::sample_systematic_code(a.n, a.k, a.d, a.seed).map_err(usage)?;
    let mut record = code_header(a);
    record["entries"] = table.codebook().len().into();
    record["systematic"] = table.codebook().is_systematic().into();
    record["min_same_prefix_distance"] = codes::min_same_prefix_distance(table.codebook()).into();
    emit_json(a.out.as_deref(), &record)
}

fn cmd_prune(a: &PruneArgs) -> Result<(), CliError> {
    let c = &a.code;
    let table = codes::sample_systematic_code(c.n, c.k, c.d, c.seed).map_err(usage)?;
    let pruned = match codes::prune(&table, a.budget) {
        Ok(p) => p,
        Err(e @ cel_core::Error::PruningFailed { .. }) => return Err(CliError::Check(e.to_string())),
        Err(e) => return Err(usage(e)),
    };
    let mut record = code_header(c);
    record["budget"] = a.budget.into();
    record["kept_messages"] = output::bitmap_hex(1 << c.k, pruned.kept_messages().iter().copied()).into();
    record["kept_coins"] = pruned
        .kept_coins()
        .iter()
        .map(|coins| output::bitmap_hex(1 << c.d, coins.iter().copied()))
        .collect();
    record["min_same_prefix_distance"] = codes::min_same_prefix_distance(pruned.codebook()).into();
    emit_json(c.out.as_deref(), &record)?;
    eprintln!(
        "kept {} of {} messages, {} coins each",
        pruned.kept_messages().len(),
        1u64 << c.k,
        codes::kept_coin_target(c.d)
    );
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, jobs: usize) -> Result<(), CliError> {
    let file = ExperimentFile::load(&a.config)?;
    let master_seed = a
        .seed
        .or(file.master_seed)
        .ok_or_else(|| CliError::Usage("no master seed: pass --seed or set master_seed".into()))?;
    let configs: Vec<_> = file.experiments.iter().map(|e| e.to_config()).collect();
    let runner = Runner::new(jobs)?;
    let rows = runner.run_matrix(&configs, master_seed);
    emit(a.out.as_deref(), &output::report_csv(&rows))?;
    let detail = a
        .detail
        .clone()
        .or_else(|| a.out.as_ref().map(|p| p.with_extension("json")));
    if let Some(path) = detail {
        emit_json(Some(&path), &output::report_json(master_seed, &rows))?;
    }
    let failed = rows.iter().filter(|r| r.result.is_err()).count();
    eprintln!(
        "{} experiments, {failed} failed, master_seed = {master_seed}, jobs = {}",
        rows.len(),
        runner.jobs()
    );
    for row in rows.iter().filter(|r| r.result.is_err()) {
        if let Err(msg) = &row.result {
            eprintln!("  error: {msg}");
        }
    }
    Ok(())
}

fn cmd_selftest(a: &SelftestArgs) -> Result<(), CliError> {
    let groups = selftest::run(a.mutate);
    let mut out = String::new();
    for g in &groups {
        out.push_str(&format!("{} {}\n", if g.pass() { "PASS" } else { "FAIL" }, g.name));
        for c in &g.checks {
            out.push_str(&format!("  {} {}\n", if c.pass { "ok  " } else { "FAIL" }, c.name));
        }
    }
    emit(None, &out)?;
    match groups.iter().find(|g| !g.pass()) {
        None => Ok(()),
        Some(g) => Err(CliError::Check(format!(
            "selftest failed: {} / {}",
            g.name,
            g.first_failure().map_or("", |c| c.name.as_str())
        ))),
    }
}
