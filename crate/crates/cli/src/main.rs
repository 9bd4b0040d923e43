use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use paritylab::bitcore::Permutation;
use paritylab::cascade::{block_schedule, run_cascade};
use paritylab::harness::{
    load_config_file, load_fixture, render, replay, run_attack_experiment, run_session_to,
    sweep_success_rate, Depth, Fixture, Format, Profile, SweepSpec,
};
use paritylab::{BitKey, Error, SessionConfig};

#[derive(Parser)]
#[command(
    name = "paritylab",
    version,
    about = "BB84 + Cascade simulator with a passive parity-leakage attack"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the quantum exchange and QBER estimate only.
    Exchange(Common),
    /// Run Cascade on explicit keys, a fixture, or a simulated session.
    Reconcile(ReconcileArgs),
    /// Full pipeline for one seed: exchange, Cascade, sieve.
    Attack(Common),
    /// Undetected-session rate per rho over a seed range.
    Sweep(SweepArgs),
    /// Per-(rho, QBER) cells of secure-bit estimates.
    Experiment(ExperimentArgs),
    /// Check fixture files against their stated expectations.
    Replay(ReplayArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Flat TOML file whose keys are session config fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Starting parameter set: reference or desk.
    #[arg(long, default_value = "reference")]
    profile: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Interception rates, comma separated.
    #[arg(long, value_delimiter = ',')]
    rho: Vec<f64>,
    #[arg(long)]
    raw_len: Option<usize>,
    #[arg(long)]
    sample_rate: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    passes: Option<usize>,
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    max_candidates: Option<u64>,
    #[arg(long)]
    chunk_size: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    /// Write result files here instead of printing to stdout.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct ReconcileArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, requires = "bob")]
    alice: Option<String>,
    #[arg(long, requires = "alice")]
    bob: Option<String>,
    /// QBER used to size blocks when `--k1` is not given.
    #[arg(long)]
    p_est: Option<f64>,
    /// One gather order per line for passes 2 onwards, comma separated.
    #[arg(long)]
    perm_file: Option<PathBuf>,
    #[arg(long, conflicts_with_all = ["alice", "perm_file"])]
    fixture: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Half-open seed range, `start..end`.
    #[arg(long, default_value = "0..100000")]
    seeds: String,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "0..100000")]
    seeds: String,
    /// Reconciled length, `n` or inclusive `lo..hi`.
    #[arg(long)]
    target_n: Option<String>,
    #[arg(long, default_value_t = 20)]
    stop_after: usize,
    /// Collect only these QBER bins (3 decimals), comma separated.
    #[arg(long, value_delimiter = ',')]
    p_bins: Vec<f64>,
    /// Pool all QBER values of a rho into one cell.
    #[arg(long)]
    no_binning: bool,
    /// Skip the sieve; only the closed-form secure-bit estimate is reported.
    #[arg(long)]
    partial_only: bool,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(required = true)]
    fixtures: Vec<PathBuf>,
    /// Also write each fixture's transcript and candidate list here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

enum Failure {
    Mismatch,
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type CliResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Exchange(c) => exchange(&c),
        Command::Reconcile(a) => reconcile(&a),
        Command::Attack(c) => attack(&c),
        Command::Sweep(a) => sweep(&a),
        Command::Experiment(a) => experiment(&a),
        Command::Replay(a) => replay_all(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(2),
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_config_error(&e) { 3 } else { 1 })
        }
    }
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidConfig(_)
            | Error::Parse { .. }
            | Error::ScheduleMismatch { .. }
            | Error::InvalidPermutation(_)
            | Error::LengthMismatch { .. }
            | Error::ZeroQber
            | Error::Io(_)
    )
}

/// Profile, then config file, then flags.
fn session_config(c: &Common) -> Result<SessionConfig, Error> {
    let base = c.profile.parse::<Profile>()?.config();
    let mut cfg = match &c.config {
        Some(path) => load_config_file(&base, path)?,
        None => base,
    };
    if let Some(v) = c.seed {
        cfg.seed = v;
    }
    if let Some(&v) = c.rho.first() {
        cfg.rho = v;
    }
    if let Some(v) = c.raw_len {
        cfg.raw_len = v;
    }
    if let Some(v) = c.sample_rate {
        cfg.sample_rate = v;
    }
    if let Some(v) = c.threshold {
        cfg.qber_threshold = v;
    }
    if let Some(v) = c.passes {
        cfg.passes = v;
    }
    if c.k1.is_some() {
        cfg.k1 = c.k1;
    }
    if let Some(v) = c.max_candidates {
        cfg.max_candidates = v;
    }
    if let Some(v) = c.chunk_size {
        cfg.chunk_size = v;
    }
    if let Some(v) = c.workers {
        cfg.workers = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn rho_values(c: &Common, cfg: &SessionConfig) -> Vec<f64> {
    if c.rho.is_empty() {
        vec![cfg.rho]
    } else {
        c.rho.clone()
    }
}

fn format_of(c: &Common) -> Result<Format, Error> {
    c.format.parse()
}

fn extension(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Ndjson => "ndjson",
    }
}

/// Writes `text` to `dir/name`, or to stdout when no directory is set.
fn emit(dir: Option<&Path>, name: &str, text: &str) -> Result<(), Error> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(name), text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_range(s: &str) -> Result<Range<u64>, Error> {
    let bad = || Error::InvalidConfig(format!("expected a seed range `start..end`, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let start = a.trim().parse().map_err(|_| bad())?;
    let end = b.trim().parse().map_err(|_| bad())?;
    Ok(start..end)
}

fn parse_target(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::InvalidConfig(format!("expected `n` or `lo..hi`, got {s:?}"));
    match s.split_once("..") {
        Some((a, b)) => Ok((
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            Ok((n, n))
        }
    }
}

fn run_per_rho(
    c: &Common,
    depth: Depth,
) -> Result<(SessionConfig, Vec<paritylab::harness::SessionRun>), Error> {
    let cfg = session_config(c)?;
    let runs = rho_values(c, &cfg)
        .into_iter()
        .map(|rho| run_session_to(&SessionConfig { rho, ..cfg.clone() }, depth))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((cfg, runs))
}

fn exchange(c: &Common) -> CliResult {
    let format = format_of(c)?;
    let (_, runs) = run_per_rho(c, Depth::Exchange)?;
    let rows: Vec<_> = runs.into_iter().map(|r| r.outcome).collect();
    let name = format!("exchange.{}", extension(format));
    emit(c.out_dir.as_deref(), &name, &render(&rows, format)?)?;
    Ok(())
}

fn attack(c: &Common) -> CliResult {
    let format = format_of(c)?;
    let (_, runs) = run_per_rho(c, Depth::Full)?;
    let dir = c.out_dir.as_deref();
    if let Some(dir) = dir {
        for r in &runs {
            let stem = format!("seed{}_rho{:.3}", r.outcome.seed, r.outcome.rho);
            if let Some(t) = &r.transcript {
                emit(Some(dir), &format!("{stem}.transcript"), &t.to_text())?;
            }
            if let Some(s) = &r.sieve {
                emit(Some(dir), &format!("{stem}.candidates"), &s.candidates.to_text())?;
            }
        }
    }
    let rows: Vec<_> = runs.into_iter().map(|r| r.outcome).collect();
    emit(
        dir,
        &format!("outcomes.{}", extension(format)),
        &render(&rows, format)?,
    )?;
    Ok(())
}

fn read_permutations(path: &Path, n: usize) -> Result<Vec<Permutation>, Error> {
    let text = fs::read_to_string(path)?;
    let mut perms = vec![Permutation::identity(n)];
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let order = line
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
        perms.push(Permutation::new(order)?);
    }
    Ok(perms)
}

fn reconcile(a: &ReconcileArgs) -> CliResult {
    let c = &a.common;
    let (alice, bob, schedule, perms) = if let Some(path) = &a.fixture {
        let fx: Fixture = load_fixture(path)?;
        let alice = BitKey::parse(&fx.alice)?;
        let bob = BitKey::parse(&fx.bob)?;
        let n = alice.len();
        let schedule = block_schedule(0.0, n, fx.passes, Some(fx.k1))?;
        let mut perms = vec![Permutation::identity(n)];
        for order in fx.permutations {
            perms.push(Permutation::new(order)?);
        }
        (alice, bob, schedule, perms)
    } else if let (Some(alice), Some(bob)) = (&a.alice, &a.bob) {
        let cfg = session_config(c)?;
        let alice = BitKey::parse(alice)?;
        let bob = BitKey::parse(bob)?;
        let n = alice.len();
        let schedule = block_schedule(a.p_est.unwrap_or(0.0), n, cfg.passes, cfg.k1)?;
        let perms = match &a.perm_file {
            Some(path) => read_permutations(path, n)?,
            None => paritylab::harness::session_permutations(&cfg, n, cfg.passes),
        };
        (alice, bob, schedule, perms)
    } else {
        let cfg = session_config(c)?;
        let run = run_session_to(&cfg, Depth::Partial)?;
        let (Some(t), Some(bob)) = (&run.transcript, &run.reconciled_bob) else {
            return Err(Error::InvalidConfig(format!(
                "seed {} produced nothing to reconcile (detected or zero QBER)",
                cfg.seed
            ))
            .into());
        };
        emit(c.out_dir.as_deref(), "transcript.txt", &t.to_text())?;
        if let Some(dir) = c.out_dir.as_deref() {
            emit(Some(dir), "reconciled.txt", &format!("{bob}\n"))?;
        }
        return Ok(());
    };
    let (reconciled, transcript) = run_cascade(&alice, &bob, &schedule, &perms)?;
    emit(c.out_dir.as_deref(), "transcript.txt", &transcript.to_text())?;
    match c.out_dir.as_deref() {
        Some(dir) => emit(Some(dir), "reconciled.txt", &format!("{reconciled}\n"))?,
        None => println!("reconciled\t{reconciled}"),
    }
    Ok(())
}

fn sweep(a: &SweepArgs) -> CliResult {
    let c = &a.common;
    let format = format_of(c)?;
    let cfg = session_config(c)?;
    let spec = SweepSpec {
        rho_values: rho_values(c, &cfg),
        seeds: parse_range(&a.seeds)?,
        target_n: None,
        stop_after: 1,
        bin_by_qber: false,
        p_bins_milli: Vec::new(),
    };
    let rows = sweep_success_rate(&spec, &cfg, cfg.workers)?;
    emit(
        c.out_dir.as_deref(),
        &format!("success_rate.{}", extension(format)),
        &render(&rows, format)?,
    )?;
    Ok(())
}

fn experiment(a: &ExperimentArgs) -> CliResult {
    let c = &a.common;
    let format = format_of(c)?;
    let cfg = session_config(c)?;
    let spec = SweepSpec {
        rho_values: rho_values(c, &cfg),
        seeds: parse_range(&a.seeds)?,
        target_n: a.target_n.as_deref().map(parse_target).transpose()?,
        stop_after: a.stop_after,
        bin_by_qber: !a.no_binning,
        p_bins_milli: a
            .p_bins
            .iter()
            .map(|&p| paritylab::harness::qber_bin_milli(p))
            .collect(),
    };
    let depth = if a.partial_only {
        Depth::Partial
    } else {
        Depth::Full
    };
    let report = run_attack_experiment(&spec, &cfg, depth, cfg.workers)?;
    let ext = extension(format);
    match c.out_dir.as_deref() {
        Some(dir) => {
            emit(
                Some(dir),
                &format!("outcomes.{ext}"),
                &render(&report.outcomes, format)?,
            )?;
            emit(
                Some(dir),
                &format!("cells.{ext}"),
                &render(&report.cells, format)?,
            )?;
        }
        None => emit(None, "", &render(&report.cells, format)?)?,
    }
    Ok(())
}

fn replay_all(a: &ReplayArgs) -> CliResult {
    let mut failed = false;
    for path in &a.fixtures {
        let name = path.file_stem().map_or_else(
            || path.display().to_string(),
            |s| s.to_string_lossy().into_owned(),
        );
        let report = replay(&name, &load_fixture(path)?)?;
        if let Some(dir) = a.out_dir.as_deref() {
            emit(
                Some(dir),
                &format!("{name}.transcript"),
                &report.transcript.to_text(),
            )?;
            emit(
                Some(dir),
                &format!("{name}.candidates"),
                &report.candidates.to_text(),
            )?;
        }
        if report.passed() {
            println!(
                "PASS\t{name}\tleaked={}\tspace={}",
                report.transcript.leaked_count(),
                report.candidates.space()
            );
        } else {
            failed = true;
            println!("FAIL\t{name}");
            for m in &report.mismatches {
                println!("\t{}\texpected={}\tactual={}", m.field, m.expected, m.actual);
            }
        }
    }
    if failed {
        Err(Failure::Mismatch)
    } else {
        Ok(())
    }
}
