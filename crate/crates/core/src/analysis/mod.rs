//! Numerical checks of the channel's analytic properties.

mod lemma;
mod mi;
mod psd;

pub use lemma::{lemma_convergence_table, power_of_two_ladder, LemmaRow, LemmaTable};
pub use mi::{
    mi_bank_vs_matched_filter, mi_end_to_end, mi_gaussian_closed_form, mi_monte_carlo, snr_penalty_db, BankComparison,
    BranchMean, MiEstimate, MiMethod, SnrPenalty,
};
pub use psd::{
    psd_welch, segment_length_for, spectral_loss_estimate, PsdEstimate, SpectralLoss, SpectralLossOptions, Window,
};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{apply_channel, equivalent_channel, modulate, ChannelConfig, SymbolFrame};
use crate::receiver::matched_filter_bank;
use crate::stats::{batch_means, ComplexStats, RealStats};
use crate::stochastics::mu_theta;
use crate::stochastics::RandomStream;
use crate::Result;

/// Autocorrelation estimate at one lag with a batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagEstimate {
    pub lag: usize,
    pub value: Complex64,
    pub stderr: f64,
}

/// Lags `0 ..= lags` of the `e^{jΘ}` autocorrelation with standard errors.
///
/// Neighbouring products share a phase sample, so the error is taken from
/// means of `batch` consecutive products rather than from iid formulas.
pub fn autocorrelation_with_stderr(phase: &[f64], lags: usize, batch: usize) -> Result<Vec<LagEstimate>> {
    let values = crate::stochastics::autocorrelation_estimate(phase, lags)?;
    Ok(values
        .into_iter()
        .enumerate()
        .map(|(tau, value)| {
            let n = phase.len() - tau;
            let prods: Vec<Complex64> = phase[..n]
                .iter()
                .zip(&phase[tau..])
                .map(|(a, b)| Complex64::from_polar(1.0, a - b))
                .collect();
            let (_, stderr) = batch_means(&prods, batch);
            LagEstimate {
                lag: tau,
                value,
                stderr,
            }
        })
        .collect())
}

/// Per-symbol comparison of the waveform pipeline against the equivalent channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolComparison {
    pub slot: i64,
    pub symbol: Complex64,
    pub pipeline_mean: Complex64,
    pub oracle_mean: Complex64,
    /// Standard error of `pipeline_mean - oracle_mean`.
    pub mean_stderr: f64,
    pub pipeline_variance: f64,
    /// `(1 - |μ_Θ|²)|A|² Δ/T`, the finite-grid self-noise of the matched filter.
    pub residual: f64,
    pub oracle_variance: f64,
    /// Standard error of `(pipeline_variance - residual) - oracle_variance`.
    pub variance_stderr: f64,
}

impl SymbolComparison {
    pub fn mean_z(&self) -> f64 {
        (self.pipeline_mean - self.oracle_mean).norm() / self.mean_stderr
    }

    pub fn variance_z(&self) -> f64 {
        (self.pipeline_variance - self.residual - self.oracle_variance).abs() / self.variance_stderr
    }
}

fn variance_stderr(samples: &[Complex64], mean: Complex64) -> f64 {
    let dev: RealStats = samples.iter().map(|z| (z - mean).norm_sqr()).collect();
    dev.stderr()
}

/// Runs `frame` through modulate, channel and matched filter `trials` times
/// and compares each symbol's output law with [`equivalent_channel`].
pub fn compare_with_equivalent_channel(
    cfg: &ChannelConfig,
    frame: &SymbolFrame,
    trials: usize,
    stream: &RandomStream,
) -> Result<Vec<SymbolComparison>> {
    let x = modulate(frame, &cfg.pulse, &cfg.grid)?;
    let first = cfg.grid.slots().start().to_owned();
    let offsets: Vec<usize> = frame.slots().map(|m| (m - first) as usize).collect();
    let mu = mu_theta(&cfg.phase);
    let pipe_stream = stream.child(1);
    let oracle_stream = stream.child(2);

    let runs: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let y = apply_channel(&x, cfg, &pipe_stream.child(t))?;
            let mf = matched_filter_bank(&y, &cfg.pulse, &cfg.grid)?;
            let pipe = offsets.iter().map(|&o| mf[o]).collect();
            let oracle = equivalent_channel(frame, mu, &cfg.noise, &oracle_stream.child(t));
            Ok((pipe, oracle))
        })
        .collect::<Result<_>>()?;

    let ratio = cfg.grid.spacing() / cfg.grid.symbol_period();
    Ok(frame
        .slots()
        .zip(&frame.symbols)
        .enumerate()
        .map(|(j, (slot, &a))| {
            let pipe: Vec<Complex64> = runs.iter().map(|r| r.0[j]).collect();
            let oracle: Vec<Complex64> = runs.iter().map(|r| r.1[j]).collect();
            let ps: ComplexStats = pipe.iter().copied().collect();
            let os: ComplexStats = oracle.iter().copied().collect();
            SymbolComparison {
                slot,
                symbol: a,
                pipeline_mean: ps.mean(),
                oracle_mean: os.mean(),
                mean_stderr: ps.stderr().hypot(os.stderr()),
                pipeline_variance: ps.variance(),
                residual: (1.0 - mu.norm_sqr()) * a.norm_sqr() * ratio,
                oracle_variance: os.variance(),
                variance_stderr: variance_stderr(&pipe, ps.mean()).hypot(variance_stderr(&oracle, os.mean())),
            }
        })
        .collect())
}
