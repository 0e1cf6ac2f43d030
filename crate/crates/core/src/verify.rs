//! Acceptance suite.
//!
//! Each criterion runs at fixed sizes with streams derived from one master
//! seed, and yields named checks of the form `|measured - target| <=
//! tolerance`. For complex quantities `measured` is the distance to the
//! prediction and `target` is 0. Every criterion also carries a wall-clock
//! check against its runtime budget.
//!
//! Tables written by [`write_outputs`] depend only on the seed and scale, so
//! two runs can be compared byte for byte with [`compare_outputs`].

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use crate::analysis::{
    autocorrelation_with_stderr, compare_with_equivalent_channel, lemma_convergence_table, mi_bank_vs_matched_filter,
    mi_end_to_end, mi_gaussian_closed_form, mi_monte_carlo, power_of_two_ladder, snr_penalty_db,
    spectral_loss_estimate, SnrPenalty, SpectralLossOptions,
};
use crate::channel::{ChannelConfig, Constellation, FiniteConstellation, SymbolFrame};
use crate::grid::{BasisIndex, PulseShape, TimeGrid};
use crate::output::{equivalent_table, fmt_f64, lemma_table, Table};
use crate::stochastics::{mu_theta, sample_phase, MuTheta, NoiseLevel, PhaseNoiseModel, RandomStream};
use crate::{Error, Result};

/// Trial counts: `Quick` is the reference size, `Full` multiplies Monte Carlo
/// trial counts by 10.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Quick,
    Full,
}

impl Scale {
    pub fn factor(self) -> usize {
        match self {
            Scale::Quick => 1,
            Scale::Full => 10,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scale::Quick => "quick",
            Scale::Full => "full",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    pub scale: Scale,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            scale: Scale::Quick,
            seed: 2,
        }
    }
}

impl SuiteOptions {
    fn trials(&self, quick: usize) -> usize {
        quick * self.scale.factor()
    }

    fn config(&self) -> Vec<(String, String)> {
        vec![
            ("seed".into(), self.seed.to_string()),
            ("scale".into(), self.scale.as_str().into()),
        ]
    }

    fn stream(&self, id: u8) -> RandomStream {
        RandomStream::root(self.seed).child(id as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            target,
            tolerance,
            passed: (measured - target).abs() <= tolerance,
        }
    }

    /// `name PASS|FAIL measured target tolerance`.
    pub fn summary_line(&self) -> String {
        format!(
            "{} {} {} {} {}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            fmt_f64(self.measured),
            fmt_f64(self.target),
            fmt_f64(self.tolerance)
        )
    }
}

#[derive(Debug, Clone)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    /// `(file name, table)` pairs.
    pub tables: Vec<(String, Table)>,
    pub elapsed: Duration,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// `(id, title, runtime budget in seconds at quick scale)`.
pub const CRITERIA: [(u8, &str, f64); 7] = [
    (1, "autocorrelation", 5.0),
    (2, "spectral_loss", 20.0),
    (3, "lemma_convergence", 30.0),
    (4, "equivalent_channel", 15.0),
    (5, "high_branches", 30.0),
    (6, "penalized_snr", 60.0),
    (7, "degenerate_limits", 10.0),
];

/// Runs one criterion by id (1 to 7).
pub fn run_criterion(id: u8, opts: &SuiteOptions) -> Result<Criterion> {
    let &(_, title, budget) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::InvalidParameter(format!("no criterion {id}")))?;
    let start = Instant::now();
    let (mut checks, tables) = match id {
        1 => autocorrelation(opts)?,
        2 => spectral_loss(opts)?,
        3 => lemma(opts)?,
        4 => equivalent(opts)?,
        5 => high_branches(opts)?,
        6 => penalized_snr(opts)?,
        _ => degenerate(opts)?,
    };
    let elapsed = start.elapsed();
    checks.push(Check::new(
        format!("c{id}.runtime_s"),
        elapsed.as_secs_f64(),
        0.0,
        budget * opts.scale.factor() as f64,
    ));
    Ok(Criterion {
        id,
        title,
        checks,
        tables,
        elapsed,
    })
}

pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<Criterion>> {
    CRITERIA.iter().map(|c| run_criterion(c.0, opts)).collect()
}

/// Writes every table as `<name>.csv` and all checks to `summary.txt`.
pub fn write_outputs(criteria: &[Criterion], extra: &[Check], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for c in criteria {
        for (name, table) in &c.tables {
            table.write(&dir.join(format!("{name}.csv")))?;
        }
    }
    let mut summary = String::new();
    for check in criteria.iter().flat_map(|c| &c.checks).chain(extra) {
        summary.push_str(&check.summary_line());
        summary.push('\n');
    }
    std::fs::write(dir.join("summary.txt"), summary)?;
    Ok(())
}

fn csv_files(dir: &Path) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for entry in std::fs::read_dir(dir)? {
        let name = entry?.file_name().to_string_lossy().into_owned();
        if name.ends_with(".csv") {
            out.insert(name);
        }
    }
    Ok(out)
}

/// Byte comparison of the CSV files of two output directories.
///
/// Measured is the number of files that differ or exist on one side only.
pub fn compare_outputs(a: &Path, b: &Path) -> Result<(Check, Vec<String>)> {
    let (fa, fb) = (csv_files(a)?, csv_files(b)?);
    let mut differing = Vec::new();
    for name in fa.union(&fb) {
        let same =
            fa.contains(name) && fb.contains(name) && std::fs::read(a.join(name))? == std::fs::read(b.join(name))?;
        if !same {
            differing.push(name.clone());
        }
    }
    let check = if fa.is_empty() {
        Check {
            name: "c8.determinism".into(),
            measured: f64::NAN,
            target: 0.0,
            tolerance: 0.0,
            passed: false,
        }
    } else {
        Check::new("c8.determinism", differing.len() as f64, 0.0, 0.0)
    };
    Ok((check, differing))
}

type Outcome = Result<(Vec<Check>, Vec<(String, Table)>)>;

const SIGMA2_LOSS: [f64; 3] = [0.1, 0.5, 1.0];

fn gaussian(sigma2: f64) -> Result<PhaseNoiseModel> {
    PhaseNoiseModel::wrapped_gaussian(sigma2)
}

fn autocorrelation(o: &SuiteOptions) -> Outcome {
    const LAGS: usize = 5;
    const BATCH: usize = 1000;
    // 10^6 samples at Δ = 1; the sample count is part of the criterion and
    // does not scale.
    let grid = TimeGrid::new(500_000.0, 500_000, 1.0)?;
    let stream = o.stream(1);
    let mut config = o.config();
    config.push(("samples".into(), grid.len().to_string()));
    config.push(("batch".into(), BATCH.to_string()));
    let mut table = Table::new(
        "verify autocorrelation",
        &["sigma2", "lag", "re", "im", "stderr", "target"],
    )
    .config(config);
    let mut checks = Vec::new();
    for (c, &sigma2) in SIGMA2_LOSS.iter().enumerate() {
        let model = gaussian(sigma2)?;
        let phase = sample_phase(&model, &grid, &stream.child(c as u64));
        for e in autocorrelation_with_stderr(&phase, LAGS, BATCH)? {
            let (target, tol) = if e.lag == 0 {
                (1.0, 0.0)
            } else {
                ((-sigma2).exp(), 3.0 * e.stderr)
            };
            checks.push(Check::new(
                format!("c1.autocorr.sigma2={sigma2}.lag={}", e.lag),
                (e.value - target).norm(),
                0.0,
                tol,
            ));
            table.push(vec![
                fmt_f64(sigma2),
                e.lag.to_string(),
                fmt_f64(e.value.re),
                fmt_f64(e.value.im),
                fmt_f64(e.stderr),
                fmt_f64(target),
            ]);
        }
    }
    Ok((checks, vec![("c1_autocorrelation".into(), table)]))
}

fn spectral_loss(o: &SuiteOptions) -> Outcome {
    // l = 2^14: 32768 samples, 32 per symbol.
    let grid = TimeGrid::new(512.0, 1 << 14, 1.0)?;
    let trials = o.trials(4);
    let opts = SpectralLossOptions::default();
    let mut config = o.config();
    config.extend([
        ("S".into(), fmt_f64(grid.half_width())),
        ("l".into(), grid.level().to_string()),
        ("T".into(), fmt_f64(grid.symbol_period())),
        ("segments".into(), opts.segments.to_string()),
        ("overlap".into(), fmt_f64(opts.overlap)),
        ("trials".into(), trials.to_string()),
        ("snr_db".into(), "inf".into()),
    ]);
    let mut table = Table::new(
        "verify spectral_loss",
        &["sigma2", "gain", "target", "rel_err", "floor", "floor_predicted"],
    )
    .config(config);
    let mut checks = Vec::new();
    for &sigma2 in &SIGMA2_LOSS {
        let cfg = ChannelConfig::new(1.0, NoiseLevel::new(0.0)?, gaussian(sigma2)?, grid, o.seed)?;
        let loss = spectral_loss_estimate(&cfg, trials, &opts)?;
        let target = (-sigma2).exp();
        // Spread power (1 - e^{-σ²}) P is flat over the 1/Δ sampling band.
        let floor_predicted = (1.0 - target) * cfg.es / grid.symbol_period() * grid.spacing();
        checks.push(Check::new(
            format!("c2.gain.sigma2={sigma2}"),
            loss.gain,
            target,
            0.05 * target,
        ));
        table.push(vec![
            fmt_f64(sigma2),
            fmt_f64(loss.gain),
            fmt_f64(target),
            fmt_f64(loss.gain / target - 1.0),
            fmt_f64(loss.floor),
            fmt_f64(floor_predicted),
        ]);
    }
    Ok((checks, vec![("c2_spectral_loss".into(), table)]))
}

fn lemma(o: &SuiteOptions) -> Outcome {
    const SIGMA2: f64 = 1.0;
    let model = gaussian(SIGMA2)?;
    let grid = TimeGrid::new(2.0, 2, 1.0)?;
    let pulse = PulseShape::rectangular(1.0);
    let ladder = power_of_two_ladder(8, 16);
    let trials = o.trials(1000);
    let stream = o.stream(3);
    let mut checks = Vec::new();
    let mut tables = Vec::new();
    for (c, (k, n, m)) in [(0i64, 0usize, 0i64), (0, 1, 0), (0, 0, 1)].into_iter().enumerate() {
        let t = lemma_convergence_table(
            k,
            BasisIndex::new(n, m),
            &pulse,
            &model,
            &grid,
            &ladder,
            trials,
            &stream.child(c as u64),
        )?;
        let tag = format!("k={k}.n={n}.m={m}");
        let last = t.rows.last().expect("non-empty ladder");
        checks.push(Check::new(
            format!("c3.{tag}.mean"),
            (last.mean - t.limit).norm(),
            0.0,
            3.0 * last.stderr,
        ));
        match t.variance_slope {
            Some(slope) => checks.push(Check::new(format!("c3.{tag}.variance_slope"), slope, -1.0, 0.1)),
            // The projection is deterministic: convergence is exact at every
            // level and no slope exists.
            None => checks.push(Check::new(
                format!("c3.{tag}.variance_max"),
                t.rows.iter().map(|r| r.variance).fold(0.0, f64::max),
                0.0,
                0.0,
            )),
        }
        checks.push(Check::new(
            format!("c3.{tag}.nested_path"),
            (last.nested_path - t.limit).norm(),
            0.0,
            0.02,
        ));
        let mut config = o.config();
        config.extend([
            ("S".into(), fmt_f64(grid.half_width())),
            ("T".into(), fmt_f64(grid.symbol_period())),
            ("sigma2".into(), fmt_f64(SIGMA2)),
            ("k".into(), k.to_string()),
            ("n".into(), n.to_string()),
            ("m".into(), m.to_string()),
            ("trials".into(), trials.to_string()),
        ]);
        let table = lemma_table("verify lemma", &t).config(config);
        tables.push((format!("c3_lemma_k{k}_n{n}_m{m}"), table));
    }
    Ok((checks, tables))
}

fn equivalent(o: &SuiteOptions) -> Outcome {
    const SIGMA2: f64 = 1.0;
    const N0: f64 = 0.1;
    let grid = TimeGrid::new(2.0, 32, 1.0)?;
    let cfg = ChannelConfig::new(1.0, NoiseLevel::new(N0)?, gaussian(SIGMA2)?, grid, o.seed)?;
    let qpsk = FiniteConstellation::qpsk();
    let p = qpsk.points();
    let frame = SymbolFrame::new(*grid.slots().start(), vec![p[0], p[1], p[2], p[3]]);
    let trials = o.trials(100_000);
    let cmp = compare_with_equivalent_channel(&cfg, &frame, trials, &o.stream(4))?;

    let mut config = o.config();
    config.extend([
        ("S".into(), fmt_f64(grid.half_width())),
        ("l".into(), grid.level().to_string()),
        ("T".into(), fmt_f64(grid.symbol_period())),
        ("sigma2".into(), fmt_f64(SIGMA2)),
        ("es".into(), fmt_f64(cfg.es)),
        ("n0".into(), fmt_f64(N0)),
        ("trials".into(), trials.to_string()),
    ]);
    let table = equivalent_table("verify equivalent_channel", &cmp).config(config);
    let mut checks = Vec::new();
    for c in &cmp {
        checks.push(Check::new(
            format!("c4.slot={}.mean", c.slot),
            (c.pipeline_mean - c.oracle_mean).norm(),
            0.0,
            3.0 * c.mean_stderr,
        ));
        checks.push(Check::new(
            format!("c4.slot={}.variance", c.slot),
            c.pipeline_variance - c.residual,
            c.oracle_variance,
            3.0 * c.variance_stderr,
        ));
    }
    Ok((checks, vec![("c4_equivalent_channel".into(), table)]))
}

fn high_branches(o: &SuiteOptions) -> Outcome {
    const SIGMA2: f64 = 1.0;
    const SNR_DB: f64 = 5.0;
    const N_MAX: usize = 4;
    let grid = TimeGrid::new(2.0, 32, 1.0)?;
    let cfg = ChannelConfig::new(
        1.0,
        NoiseLevel::from_snr_db(1.0, SNR_DB)?,
        gaussian(SIGMA2)?,
        grid,
        o.seed,
    )?;
    let qpsk = Constellation::Finite(FiniteConstellation::qpsk());
    // Fitting noise in the bank's class means costs O(1/train) bits; keeping
    // train far above test holds that bias well under the paired stderr.
    let test = o.trials(20_000);
    let train = 50 * test;
    let cmp = mi_bank_vs_matched_filter(&cfg, &qpsk, N_MAX, train, test, &o.stream(5))?;

    let mut config = o.config();
    config.extend([
        ("S".into(), fmt_f64(grid.half_width())),
        ("l".into(), grid.level().to_string()),
        ("T".into(), fmt_f64(grid.symbol_period())),
        ("sigma2".into(), fmt_f64(SIGMA2)),
        ("snr_db".into(), fmt_f64(SNR_DB)),
        ("constellation".into(), "qpsk".into()),
        ("n_max".into(), N_MAX.to_string()),
        ("train".into(), train.to_string()),
        ("test".into(), test.to_string()),
    ]);
    let mut table = Table::new("verify high_branches", &["n", "point", "mean_re", "mean_im", "stderr"]).config(config);
    table.result(format!(
        "mi_matched_filter = {} +- {}",
        fmt_f64(cmp.matched_filter.value),
        fmt_f64(cmp.matched_filter.stderr)
    ));
    table.result(format!(
        "mi_bank = {} +- {}",
        fmt_f64(cmp.bank.value),
        fmt_f64(cmp.bank.stderr)
    ));
    table.result(format!(
        "difference = {} +- {}",
        fmt_f64(cmp.difference),
        fmt_f64(cmp.difference_stderr)
    ));
    let mut checks = Vec::new();
    for b in &cmp.branch_means {
        checks.push(Check::new(
            format!("c5.n={}.point={}.mean", b.n, b.point),
            b.mean.norm(),
            0.0,
            3.0 * b.stderr,
        ));
        table.push(vec![
            b.n.to_string(),
            b.point.to_string(),
            fmt_f64(b.mean.re),
            fmt_f64(b.mean.im),
            fmt_f64(b.stderr),
        ]);
    }
    checks.push(Check::new(
        "c5.bank_minus_mf",
        cmp.difference,
        0.0,
        2.0 * cmp.difference_stderr,
    ));
    Ok((checks, vec![("c5_high_branches".into(), table)]))
}

fn penalized_snr(o: &SuiteOptions) -> Outcome {
    let grid = TimeGrid::new(4.0, 1 << 12, 1.0)?;
    let e2e_trials = o.trials(16_000);
    let mc_trials = o.trials(100_000);
    let stream = o.stream(6);
    let mut config = o.config();
    config.extend([
        ("S".into(), fmt_f64(grid.half_width())),
        ("l".into(), grid.level().to_string()),
        ("T".into(), fmt_f64(grid.symbol_period())),
        ("es".into(), "1".into()),
        ("end_to_end_trials".into(), e2e_trials.to_string()),
        ("monte_carlo_trials".into(), mc_trials.to_string()),
    ]);
    let mut table = Table::new(
        "verify penalized_snr",
        &[
            "constellation",
            "snr_db",
            "sigma2",
            "penalty_db",
            "end_to_end",
            "end_to_end_stderr",
            "penalized",
            "penalized_stderr",
        ],
    )
    .config(config);
    let mut checks = Vec::new();
    let mut case = 0u64;
    for name in ["qpsk", "16qam"] {
        let c = Constellation::by_name(name)?;
        for snr_db in [0.0, 5.0, 10.0] {
            for sigma2 in [0.25, 1.0] {
                let model = gaussian(sigma2)?;
                let noise = NoiseLevel::from_snr_db(1.0, snr_db)?;
                let cfg = ChannelConfig::new(1.0, noise, model, grid, o.seed)?;
                let s = stream.child(case);
                case += 1;
                let e2e = mi_end_to_end(&cfg, &c, e2e_trials, &s.child(1))?;
                let SnrPenalty::Finite(penalty) = snr_penalty_db(&model) else {
                    unreachable!("Gaussian phase has a finite penalty")
                };
                let es_pen = 10f64.powf((snr_db - penalty) / 10.0) * noise.n0();
                let pen = mi_monte_carlo(&c, MuTheta::real(1.0), es_pen, noise.n0(), mc_trials, &s.child(2))?;
                checks.push(Check::new(
                    format!("c6.{name}.snr_db={snr_db}.sigma2={sigma2}"),
                    e2e.value,
                    pen.value,
                    2.0 * e2e.stderr.hypot(pen.stderr) + 0.02,
                ));
                table.push(vec![
                    name.into(),
                    fmt_f64(snr_db),
                    fmt_f64(sigma2),
                    fmt_f64(penalty),
                    fmt_f64(e2e.value),
                    fmt_f64(e2e.stderr),
                    fmt_f64(pen.value),
                    fmt_f64(pen.stderr),
                ]);
            }
        }
    }
    Ok((checks, vec![("c6_penalized_snr".into(), table)]))
}

fn degenerate(o: &SuiteOptions) -> Outcome {
    let mut config = o.config();
    let trials = o.trials(16_000);
    let grid = TimeGrid::new(4.0, 64, 1.0)?;
    config.extend([
        ("S".into(), fmt_f64(grid.half_width())),
        ("l".into(), grid.level().to_string()),
        ("T".into(), fmt_f64(grid.symbol_period())),
        ("es".into(), "1".into()),
        ("trials".into(), trials.to_string()),
    ]);
    let mut table = Table::new(
        "verify degenerate_limits",
        &["case", "snr_db", "value", "stderr", "target"],
    )
    .config(config);
    let mut checks = Vec::new();
    let row = |table: &mut Table, case: &str, snr_db: f64, value: f64, stderr: f64, target: f64| {
        table.push(vec![
            case.into(),
            fmt_f64(snr_db),
            fmt_f64(value),
            fmt_f64(stderr),
            fmt_f64(target),
        ]);
    };

    for snr_db in [-10.0, 0.0, 5.0, 10.0, 20.0] {
        let n0 = NoiseLevel::from_snr_db(1.0, snr_db)?.n0();
        let target = (1.0 + 1.0 / n0).log2();
        for (case, model) in [
            ("closed_form.sigma2=0", gaussian(0.0)?),
            ("closed_form.off", PhaseNoiseModel::Off),
        ] {
            let mi = mi_gaussian_closed_form(1.0, n0, mu_theta(&model))?;
            checks.push(Check::new(format!("c7.{case}.snr_db={snr_db}"), mi.value, target, 0.0));
            row(&mut table, case, snr_db, mi.value, mi.stderr, target);
        }
    }

    let stream = o.stream(7);
    let mut case_id = 0u64;
    for name in ["qpsk", "16qam"] {
        let c = Constellation::by_name(name)?;
        for snr_db in [0.0, 10.0, 20.0] {
            let cfg = ChannelConfig::new(
                1.0,
                NoiseLevel::from_snr_db(1.0, snr_db)?,
                PhaseNoiseModel::UniformCircle,
                grid,
                o.seed,
            )?;
            let mi = mi_end_to_end(&cfg, &c, trials, &stream.child(case_id))?;
            case_id += 1;
            let case = format!("uniform.{name}");
            checks.push(Check::new(
                format!("c7.{case}.snr_db={snr_db}"),
                mi.value,
                0.0,
                mi.stderr,
            ));
            row(&mut table, &case, snr_db, mi.value, mi.stderr, 0.0);
        }
    }
    Ok((checks, vec![("c7_degenerate_limits".into(), table)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_semantics() {
        assert!(Check::new("a", 1.0, 1.0, 0.0).passed);
        assert!(!Check::new("a", 1.1, 1.0, 0.05).passed);
        assert!(!Check::new("a", f64::NAN, 0.0, 1.0).passed);
        assert_eq!(Check::new("x.y", 0.5, 0.0, 1.0).summary_line(), "x.y PASS 0.5 0 1");
    }

    #[test]
    fn unknown_criterion() {
        assert!(run_criterion(9, &SuiteOptions::default()).is_err());
    }

    #[test]
    fn degenerate_criterion_passes_and_is_reproducible() {
        let o = SuiteOptions::default();
        let a = run_criterion(7, &o).unwrap();
        let b = run_criterion(7, &o).unwrap();
        assert!(
            a.failures().all(|c| c.name.ends_with("runtime_s")),
            "{:?}",
            a.failures().collect::<Vec<_>>()
        );
        assert_eq!(a.tables[0].1.to_bytes().unwrap(), b.tables[0].1.to_bytes().unwrap());
    }

    #[test]
    fn compare_detects_differences() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        std::fs::write(a.path().join("x.csv"), "1\n").unwrap();
        std::fs::write(b.path().join("x.csv"), "1\n").unwrap();
        std::fs::write(a.path().join("summary.txt"), "t 1\n").unwrap();
        let (c, _) = compare_outputs(a.path(), b.path()).unwrap();
        assert!(c.passed);
        std::fs::write(b.path().join("y.csv"), "2\n").unwrap();
        let (c, diff) = compare_outputs(a.path(), b.path()).unwrap();
        assert!(!c.passed);
        assert_eq!(diff, vec!["y.csv".to_string()]);
        let empty = tempfile::tempdir().unwrap();
        assert!(!compare_outputs(empty.path(), empty.path()).unwrap().0.passed);
    }
}
