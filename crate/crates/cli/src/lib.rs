//! Command-line experiment runner for the phase-noise channel lab.
//!
//! Exit codes: 0 on success, 1 on a usage or configuration error, 2 when a
//! verification criterion fails.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use pnlab_core::analysis::{
    compare_with_equivalent_channel, lemma_convergence_table, mi_end_to_end, mi_gaussian_closed_form, mi_monte_carlo,
    snr_penalty_db, spectral_loss_estimate, SnrPenalty, SpectralLossOptions,
};
use pnlab_core::channel::{draw_frame, Constellation};
use pnlab_core::grid::{gram_matrix, identity_deviation, BasisIndex};
use pnlab_core::output::{equivalent_table, fmt_f64, lemma_table, Table};
use pnlab_core::stochastics::{mu_theta, tags, MuTheta};
use pnlab_core::verify::{self, Scale, SuiteOptions, CRITERIA};

pub use config::{load_config, Config, ConfigError, Experiment, Origin};

#[derive(Parser, Debug)]
#[command(
    name = "pnlab",
    version,
    about = "Continuous-time AWGN channel with white phase noise: experiments and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convergence of phase-noise projections under grid refinement.
    Lemma(ExperimentArgs),
    /// Welch PSD of clean and phase-noisy signals, with the spectral gain.
    Psd(ExperimentArgs),
    /// Mutual information: closed form, equivalent channel, end to end.
    Mi(ExperimentArgs),
    /// Matched-filter outputs against the equivalent discrete channel.
    Equiv(ExperimentArgs),
    /// Gram matrix of the trigonometric basis on the grid.
    Gram(ExperimentArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// `key = value` file, or a previous output file to rerun.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override any key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    sigma2: Option<String>,
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    snr_db: Option<String>,
    #[arg(long)]
    es: Option<String>,
    /// gaussian, uniform or none.
    #[arg(long)]
    phase: Option<String>,
    /// bpsk, qpsk, 16qam or gaussian.
    #[arg(long)]
    constellation: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Exponent range `lo:hi` or a list of levels `a,b,c`.
    #[arg(long)]
    ladder: Option<String>,
    /// Grid level `l` (2l samples over [-S, S)).
    #[arg(long)]
    level: Option<String>,
    #[arg(long = "n-max")]
    n_max: Option<String>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Reference trial counts (the default).
    #[arg(long, conflicts_with = "full")]
    quick: bool,
    /// Ten times the Monte Carlo trials.
    #[arg(long)]
    full: bool,
    #[arg(long, default_value_t = 2)]
    seed: u64,
    /// Directory for CSV tables and summary.txt.
    #[arg(long, default_value = "verify-out")]
    out: PathBuf,
    /// Compare the CSVs byte for byte with an earlier output directory.
    #[arg(long)]
    compare: Option<PathBuf>,
    /// Comma-separated criterion ids to run (default: all).
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
}

enum Failure {
    Config(anyhow::Error),
    Verification,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.into())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

impl From<pnlab_core::Error> for Failure {
    fn from(e: pnlab_core::Error) -> Self {
        Failure::Config(e.into())
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Lemma(a) => experiment(Experiment::Lemma, &a),
        Command::Psd(a) => experiment(Experiment::Psd, &a),
        Command::Mi(a) => experiment(Experiment::Mi, &a),
        Command::Equiv(a) => experiment(Experiment::Equiv, &a),
        Command::Gram(a) => experiment(Experiment::Gram, &a),
        Command::Verify(a) => run_verify(&a),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            1
        }
        Err(Failure::Verification) => 2,
    }
}

/// Defaults, then `--config`, then `--set`, then dedicated flags.
fn effective_config(exp: Experiment, a: &ExperimentArgs) -> Result<Config, ConfigError> {
    let mut cfg = match &a.config {
        Some(path) => load_config(path, exp)?,
        None => Config::defaults(exp),
    };
    for kv in &a.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("--set: expected KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v, Origin::Flag("--set".into()))?;
    }
    let flags = [
        ("sigma2", &a.sigma2, "--sigma2"),
        ("snr_db", &a.snr_db, "--snr-db"),
        ("es", &a.es, "--es"),
        ("phase", &a.phase, "--phase"),
        ("constellation", &a.constellation, "--constellation"),
        ("trials", &a.trials, "--trials"),
        ("seed", &a.seed, "--seed"),
        ("ladder", &a.ladder, "--ladder"),
        ("l", &a.level, "--level"),
        ("n_max", &a.n_max, "--n-max"),
    ];
    for (key, value, flag) in flags {
        if let Some(v) = value {
            cfg.set(key, v, Origin::Flag(flag.into()))?;
        }
    }
    Ok(cfg)
}

fn emit(table: &Table, out: Option<&Path>) -> anyhow::Result<()> {
    let bytes = table.to_bytes()?;
    match out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(&bytes).context("writing standard output"),
    }
}

fn experiment(exp: Experiment, a: &ExperimentArgs) -> Result<(), Failure> {
    let cfg = effective_config(exp, a)?;
    let mut table = match exp {
        Experiment::Lemma => lemma(&cfg)?,
        Experiment::Psd => psd(&cfg)?,
        Experiment::Mi => mi(&cfg)?,
        Experiment::Equiv => equiv(&cfg)?,
        Experiment::Gram => gram(&cfg)?,
    };
    table.experiment = exp.name().into();
    table.config = cfg.echo();
    for r in &table.results {
        eprintln!("{r}");
    }
    emit(&table, a.out.as_deref())?;
    Ok(())
}

fn lemma(cfg: &Config) -> Result<Table, Failure> {
    let grid = cfg.grid_at(cfg.ladder[0])?;
    let t = lemma_convergence_table(
        cfg.k,
        cfg.basis_index(),
        &pnlab_core::grid::PulseShape::rectangular(cfg.symbol_period),
        &cfg.phase_model()?,
        &grid,
        &cfg.ladder,
        cfg.trials,
        &pnlab_core::stochastics::RandomStream::root(cfg.seed),
    )?;
    Ok(lemma_table("lemma", &t))
}

fn psd(cfg: &Config) -> Result<Table, Failure> {
    let ch = cfg.channel()?;
    let opts = SpectralLossOptions {
        segments: cfg.segments,
        overlap: cfg.overlap,
        constellation: cfg.constellation()?,
        ..Default::default()
    };
    let loss = spectral_loss_estimate(&ch, cfg.trials, &opts)?;
    let mut t = Table::new("psd", &["frequency", "clean", "noisy"]);
    t.result(format!("gain = {}", fmt_f64(loss.gain)));
    t.result(format!("mu_theta_sq = {}", fmt_f64(mu_theta(&ch.phase).norm_sqr())));
    t.result(format!("floor = {}", fmt_f64(loss.floor)));
    t.result(format!("segment_length = {}", loss.noisy.segment_length));
    t.result(format!("segments = {}", loss.noisy.segments));
    t.result(format!("in_band_bins = {}", loss.in_band_bins));
    t.result(format!("floor_bins = {}", loss.floor_bins));
    for ((f, c), y) in loss
        .clean
        .frequencies
        .iter()
        .zip(&loss.clean.density)
        .zip(&loss.noisy.density)
    {
        t.push(vec![fmt_f64(*f), fmt_f64(*c), fmt_f64(*y)]);
    }
    Ok(t)
}

fn mi(cfg: &Config) -> Result<Table, Failure> {
    let ch = cfg.channel()?;
    let c = cfg.constellation()?;
    let n0 = ch.noise.n0();
    if n0 == 0.0 {
        return Err(ConfigError(format!("{}: mi needs a finite snr_db", cfg.origin("snr_db"))).into());
    }
    let mu = mu_theta(&ch.phase);
    let mut t = Table::new("mi", &["quantity", "value", "stderr", "trials", "method"]);
    let row = |t: &mut Table, name: &str, e: pnlab_core::analysis::MiEstimate| {
        t.push(vec![
            name.into(),
            fmt_f64(e.value),
            fmt_f64(e.stderr),
            e.trials.to_string(),
            e.method.as_str().into(),
        ]);
    };
    let penalty = snr_penalty_db(&ch.phase);
    t.result(match penalty {
        SnrPenalty::Finite(db) => format!("penalty_db = {}", fmt_f64(db)),
        SnrPenalty::Infinite => "penalty_db = inf".into(),
    });
    row(&mut t, "gaussian_closed_form", mi_gaussian_closed_form(ch.es, n0, mu)?);
    if let Constellation::Finite(_) = c {
        let root = ch.root_stream();
        row(
            &mut t,
            "equivalent_channel",
            mi_monte_carlo(&c, mu, ch.es, n0, cfg.trials, &root.child(1))?,
        );
        row(
            &mut t,
            "end_to_end",
            mi_end_to_end(&ch, &c, cfg.trials, &root.child(2))?,
        );
        if let SnrPenalty::Finite(_) = penalty {
            let es = ch.es * mu.norm_sqr();
            row(
                &mut t,
                "penalized_snr",
                mi_monte_carlo(&c, MuTheta::real(1.0), es, n0, cfg.trials, &root.child(3))?,
            );
        }
    }
    Ok(t)
}

fn equiv(cfg: &Config) -> Result<Table, Failure> {
    let ch = cfg.channel()?;
    let root = ch.root_stream();
    let frame = draw_frame(&cfg.constellation()?, ch.es, &ch.grid, &root.child(tags::SYMBOLS))?;
    let cmp = compare_with_equivalent_channel(&ch, &frame, cfg.trials, &root.child(1))?;
    let mut t = equivalent_table("equiv", &cmp);
    let worst_mean = cmp.iter().map(|c| c.mean_z()).fold(0.0, f64::max);
    let worst_var = cmp.iter().map(|c| c.variance_z()).fold(0.0, f64::max);
    t.result(format!("max_mean_z = {}", fmt_f64(worst_mean)));
    t.result(format!("max_variance_z = {}", fmt_f64(worst_var)));
    Ok(t)
}

fn gram(cfg: &Config) -> Result<Table, Failure> {
    let grid = cfg.grid()?;
    let indices: Vec<BasisIndex> = grid
        .slots()
        .flat_map(|m| (0..=cfg.n_max).map(move |n| BasisIndex::new(n, m)))
        .collect();
    let g = gram_matrix(&indices, &grid)?;
    let mut t = Table::new("gram", &["n_i", "m_i", "n_j", "m_j", "re", "im"]);
    t.result(format!("identity_deviation = {}", fmt_f64(identity_deviation(&g))));
    for (a, row) in indices.iter().zip(&g) {
        for (b, v) in indices.iter().zip(row) {
            t.push(vec![
                a.n.to_string(),
                a.m.to_string(),
                b.n.to_string(),
                b.m.to_string(),
                fmt_f64(v.re),
                fmt_f64(v.im),
            ]);
        }
    }
    Ok(t)
}

fn run_verify(a: &VerifyArgs) -> Result<(), Failure> {
    let opts = SuiteOptions {
        scale: if a.full { Scale::Full } else { Scale::Quick },
        seed: a.seed,
    };
    let ids: Vec<u8> = if a.only.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        a.only.clone()
    };
    println!("pnlab verify ({}, seed {})", opts.scale.as_str(), opts.seed);
    let mut criteria = Vec::new();
    for id in ids {
        let c = verify::run_criterion(id, &opts)?;
        let passed = c.checks.iter().filter(|k| k.passed).count();
        println!(
            "  {} {:<20} {}  {:>3}/{:<3} checks  {:.2} s",
            c.id,
            c.title,
            if c.passed() { "PASS" } else { "FAIL" },
            passed,
            c.checks.len(),
            c.elapsed.as_secs_f64()
        );
        for f in c.failures() {
            println!("      {}", f.summary_line());
        }
        criteria.push(c);
    }
    verify::write_outputs(&criteria, &[], &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    let mut extra = Vec::new();
    if let Some(reference) = &a.compare {
        let (check, differing) = verify::compare_outputs(reference, &a.out)
            .with_context(|| format!("comparing with {}", reference.display()))?;
        println!(
            "  8 {:<20} {}  {} differing CSV files",
            "determinism",
            if check.passed { "PASS" } else { "FAIL" },
            differing.len()
        );
        for d in &differing {
            println!("      differs: {d}");
        }
        extra.push(check);
        verify::write_outputs(&criteria, &extra, &a.out)?;
    }
    let ok = criteria.iter().all(|c| c.passed()) && extra.iter().all(|c| c.passed);
    println!(
        "{}",
        if ok {
            "all criteria passed"
        } else {
            "verification FAILED"
        }
    );
    println!("summary: {}", a.out.join("summary.txt").display());
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
