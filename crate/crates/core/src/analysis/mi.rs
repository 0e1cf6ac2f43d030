//! Mutual information per symbol, in bits.
//!
//! Monte Carlo estimates average the information density
//! `log2 q(y|a) / Σ_a' P(a') q(y|a')` with the Gaussian metric
//! `q(y|a) ∝ exp(-|y - μ√Es a|² / N0)` of the equivalent channel. Trials are
//! grouped in fixed blocks with one random stream each, so results depend on
//! the seed only, not on how many threads run the blocks.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::LN_2;

use crate::channel::{apply_channel, draw_indexed_frame, modulate, ChannelConfig, Constellation, FiniteConstellation};
use crate::receiver::{matched_filter_bank, projection_bank};
use crate::stats::{ComplexStats, RealStats};
use crate::stochastics::{mu_theta, tags, ComplexNormalSequence, MuTheta, NoiseLevel, PhaseNoiseModel, RandomStream};
use crate::{Error, Result};

const BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiMethod {
    ClosedForm,
    MonteCarlo,
}

impl MiMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ClosedForm => "closed_form",
            Self::MonteCarlo => "monte_carlo",
        }
    }
}

/// A mutual information value with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiEstimate {
    /// Bits per symbol; Monte Carlo averages are clamped at 0.
    pub value: f64,
    pub stderr: f64,
    pub trials: usize,
    pub method: MiMethod,
}

impl MiEstimate {
    fn closed_form(value: f64) -> Self {
        Self {
            value,
            stderr: 0.0,
            trials: 0,
            method: MiMethod::ClosedForm,
        }
    }

    fn from_stats(s: &RealStats) -> Self {
        Self {
            value: s.mean().max(0.0),
            stderr: s.stderr(),
            trials: s.count(),
            method: MiMethod::MonteCarlo,
        }
    }
}

/// `log2(1 + |μ|² Es/N0)`: Gaussian-input capacity at the penalized SNR.
pub fn mi_gaussian_closed_form(es: f64, n0: f64, mu: MuTheta) -> Result<MiEstimate> {
    if n0 == 0.0 {
        return Err(Error::ZeroNoise);
    }
    if !(n0 > 0.0 && es >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need Es >= 0 and N0 > 0, got {es}, {n0}"
        )));
    }
    Ok(MiEstimate::closed_form((1.0 + mu.norm_sqr() * es / n0).log2()))
}

/// SNR penalty `-10 log10 |μ_Θ|²` in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrPenalty {
    Finite(f64),
    /// `μ_Θ = 0`: no SNR is left.
    Infinite,
}

pub fn snr_penalty_db(model: &PhaseNoiseModel) -> SnrPenalty {
    match model {
        PhaseNoiseModel::WrappedGaussian { sigma2 } => SnrPenalty::Finite(10.0 * sigma2 * std::f64::consts::LOG10_E),
        _ => {
            let g = mu_theta(model).norm_sqr();
            if g == 0.0 {
                SnrPenalty::Infinite
            } else {
                SnrPenalty::Finite(-10.0 * g.log10())
            }
        }
    }
}

/// Information-density evaluator for one constellation and metric.
struct Metric {
    centers: Vec<Complex64>,
    log_prior: Vec<f64>,
    inv_n0: f64,
}

impl Metric {
    fn new(c: &FiniteConstellation, mu: MuTheta, es: f64, n0: f64) -> Self {
        let gain = mu.value() * es.sqrt();
        Self {
            centers: c.points().iter().map(|x| gain * x).collect(),
            log_prior: c.probabilities().iter().map(|p| p.ln()).collect(),
            inv_n0: 1.0 / n0,
        }
    }

    /// Log-metric of every hypothesis plus an extra per-hypothesis term.
    fn density_with(&self, y: Complex64, sent: usize, extra: impl Fn(usize) -> f64) -> f64 {
        let logs: Vec<f64> = self
            .centers
            .iter()
            .enumerate()
            .map(|(i, c)| -(y - c).norm_sqr() * self.inv_n0 + extra(i))
            .collect();
        let mut max = f64::NEG_INFINITY;
        for (l, lp) in logs.iter().zip(&self.log_prior) {
            if lp.is_finite() {
                max = max.max(l + lp);
            }
        }
        let lse = max
            + logs
                .iter()
                .zip(&self.log_prior)
                .filter(|(_, lp)| lp.is_finite())
                .map(|(l, lp)| (l + lp - max).exp())
                .sum::<f64>()
                .ln();
        (logs[sent] - lse) / LN_2
    }

    fn density(&self, y: Complex64, sent: usize) -> f64 {
        self.density_with(y, sent, |_| 0.0)
    }
}

fn collect_stats(blocks: Vec<Vec<f64>>) -> RealStats {
    blocks.into_iter().flatten().collect()
}

/// Monte Carlo MI of the equivalent channel `μ√Es A + CN(0, N0)`.
///
/// With `N0 = 0` the answer is exact: `H(A)` when `μ ≠ 0`, else 0.
pub fn mi_monte_carlo(
    c: &Constellation,
    mu: MuTheta,
    es: f64,
    n0: f64,
    trials: usize,
    stream: &RandomStream,
) -> Result<MiEstimate> {
    let fc = c.finite()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    NoiseLevel::new(n0)?;
    if n0 == 0.0 {
        let h = if mu.value().norm() * es > 0.0 {
            fc.entropy_bits()
        } else {
            0.0
        };
        return Ok(MiEstimate::closed_form(h));
    }
    let metric = Metric::new(fc, mu, es, n0);
    let std = n0.sqrt();
    let blocks: Vec<Vec<f64>> = (0..trials.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let s = stream.child(b as u64);
            let mut rng = s.child(tags::SYMBOLS).rng();
            let mut noise = ComplexNormalSequence::starting_at(&s.child(tags::AWGN), 0);
            let n = BLOCK.min(trials - b * BLOCK);
            (0..n)
                .map(|_| {
                    let i = fc.sample_index(&mut rng);
                    let y = metric.centers[i] + std * noise.next_cn();
                    metric.density(y, i)
                })
                .collect()
        })
        .collect();
    Ok(MiEstimate::from_stats(&collect_stats(blocks)))
}

fn pipeline_metric(cfg: &ChannelConfig, c: &Constellation) -> Result<(FiniteConstellation, Metric)> {
    let fc = c.finite()?.clone();
    if cfg.noise.n0() == 0.0 {
        return Err(Error::ZeroNoise);
    }
    let metric = Metric::new(&fc, mu_theta(&cfg.phase), cfg.es, cfg.noise.n0());
    Ok((fc, metric))
}

/// MI through the full waveform chain: modulate, channel, matched filter.
///
/// Uses at least `trials` symbols (whole frames). The metric is that of the
/// equivalent channel, so at finite `Δ` this is a mismatched-decoding rate.
pub fn mi_end_to_end(
    cfg: &ChannelConfig,
    c: &Constellation,
    trials: usize,
    stream: &RandomStream,
) -> Result<MiEstimate> {
    let (fc, metric) = pipeline_metric(cfg, c)?;
    let frames = trials.max(1).div_ceil(cfg.grid.slot_count());
    let blocks: Vec<Vec<f64>> = (0..frames as u64)
        .into_par_iter()
        .map(|f| {
            let s = stream.child(f);
            let (frame, idx) = draw_indexed_frame(&fc, cfg.es, &cfg.grid, &s.child(tags::SYMBOLS));
            let x = modulate(&frame, &cfg.pulse, &cfg.grid)?;
            let y = apply_channel(&x, cfg, &s)?;
            let mf = matched_filter_bank(&y, &cfg.pulse, &cfg.grid)?;
            Ok(mf.iter().zip(&idx).map(|(&y, &i)| metric.density(y, i)).collect())
        })
        .collect::<Result<_>>()?;
    Ok(MiEstimate::from_stats(&collect_stats(blocks)))
}

/// Class-conditional mean of one `n > 0` branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchMean {
    pub n: usize,
    pub point: usize,
    pub mean: Complex64,
    pub stderr: f64,
}

/// Matched filter alone versus the full `(n ≤ n_max)` projection bank.
#[derive(Debug, Clone)]
pub struct BankComparison {
    pub matched_filter: MiEstimate,
    pub bank: MiEstimate,
    /// Paired mean of `i_bank - i_mf` over the test symbols.
    pub difference: f64,
    pub difference_stderr: f64,
    pub branch_means: Vec<BranchMean>,
}

/// Compares the information extracted by the matched filter with that of the
/// whole projection bank.
///
/// Branches `n ≥ 1` enter the bank metric as Gaussians whose class means and
/// pooled variance are fitted on `train` symbols; both metrics are then
/// scored on `test` fresh symbols. If the high branches carry nothing about
/// the symbol, the fitted means are pure noise and the paired difference sits
/// at zero.
pub fn mi_bank_vs_matched_filter(
    cfg: &ChannelConfig,
    c: &Constellation,
    n_max: usize,
    train: usize,
    test: usize,
    stream: &RandomStream,
) -> Result<BankComparison> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    let (fc, metric) = pipeline_metric(cfg, c)?;
    let slots = cfg.grid.slot_count();

    // (point index, branch outputs [n]) for every symbol of every frame.
    let run = |frames: usize, s: RandomStream| -> Result<Vec<(usize, Vec<Complex64>)>> {
        let blocks: Vec<Vec<(usize, Vec<Complex64>)>> = (0..frames as u64)
            .into_par_iter()
            .map(|f| {
                let s = s.child(f);
                let (frame, idx) = draw_indexed_frame(&fc, cfg.es, &cfg.grid, &s.child(tags::SYMBOLS));
                let x = modulate(&frame, &cfg.pulse, &cfg.grid)?;
                let y = apply_channel(&x, cfg, &s)?;
                let bank = projection_bank(&y, n_max, &cfg.grid)?;
                Ok(idx
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| (i, (0..=n_max).map(|n| bank[n][k]).collect()))
                    .collect())
            })
            .collect::<Result<_>>()?;
        Ok(blocks.into_iter().flatten().collect())
    };
    let train_set = run(train.max(1).div_ceil(slots), stream.child(1))?;
    let test_set = run(test.max(1).div_ceil(slots), stream.child(2))?;

    let points = fc.len();
    let mut class = vec![vec![ComplexStats::new(); points]; n_max + 1];
    for (i, out) in &train_set {
        for n in 1..=n_max {
            class[n][*i].push(out[n]);
        }
    }
    let means: Vec<Vec<Complex64>> = class.iter().map(|row| row.iter().map(|s| s.mean()).collect()).collect();
    let pooled: Vec<f64> = (0..=n_max)
        .map(|n| {
            if n == 0 {
                return 1.0;
            }
            let sum: f64 = train_set
                .iter()
                .map(|(i, out)| (out[n] - means[n][*i]).norm_sqr())
                .sum();
            sum / (train_set.len().saturating_sub(points)).max(1) as f64
        })
        .collect();
    let branch_means = (1..=n_max)
        .flat_map(|n| {
            let class = &class;
            (0..points).map(move |p| BranchMean {
                n,
                point: p,
                mean: class[n][p].mean(),
                stderr: class[n][p].stderr(),
            })
        })
        .collect();

    let mut mf = RealStats::new();
    let mut bank = RealStats::new();
    let mut diff = RealStats::new();
    for (i, out) in &test_set {
        let a = metric.density(out[0], *i);
        let b = metric.density_with(out[0], *i, |h| {
            (1..=n_max)
                .map(|n| -(out[n] - means[n][h]).norm_sqr() / pooled[n])
                .sum()
        });
        mf.push(a);
        bank.push(b);
        diff.push(b - a);
    }
    Ok(BankComparison {
        matched_filter: MiEstimate::from_stats(&mf),
        bank: MiEstimate::from_stats(&bank),
        difference: diff.mean(),
        difference_stderr: diff.stderr(),
        branch_means,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;

    fn qpsk() -> Constellation {
        Constellation::by_name("qpsk").unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let one = MuTheta::real(1.0);
        assert_eq!(mi_gaussian_closed_form(1.0, 1.0, one).unwrap().value, 1.0);
        assert_eq!(
            mi_gaussian_closed_form(10.0, 0.1, MuTheta::real(0.0)).unwrap().value,
            0.0
        );
        let mu = mu_theta(&PhaseNoiseModel::WrappedGaussian { sigma2: 1.0 });
        let v = mi_gaussian_closed_form(10.0, 1.0, mu).unwrap().value;
        assert!((v - (1.0 + 10.0 * (-1.0f64).exp()).log2()).abs() < 1e-12);
        assert!((v - 2.22614).abs() < 5e-5);
        assert_eq!(mi_gaussian_closed_form(1.0, 0.0, one), Err(Error::ZeroNoise));
        let e = mi_gaussian_closed_form(1.0, 1.0, one).unwrap();
        assert_eq!((e.stderr, e.method), (0.0, MiMethod::ClosedForm));
    }

    #[test]
    fn penalty_examples() {
        assert_eq!(
            snr_penalty_db(&PhaseNoiseModel::WrappedGaussian { sigma2: 0.0 }),
            SnrPenalty::Finite(0.0)
        );
        assert_eq!(snr_penalty_db(&PhaseNoiseModel::Off), SnrPenalty::Finite(0.0));
        match snr_penalty_db(&PhaseNoiseModel::WrappedGaussian { sigma2: 1.0 }) {
            SnrPenalty::Finite(db) => assert!((db - 4.3429).abs() < 5e-5),
            other => panic!("{other:?}"),
        }
        assert_eq!(snr_penalty_db(&PhaseNoiseModel::UniformCircle), SnrPenalty::Infinite);
        // Two routes agree: σ² log10(e) · 10 versus -10 log10 |μ|².
        let m = PhaseNoiseModel::WrappedGaussian { sigma2: 0.37 };
        let SnrPenalty::Finite(db) = snr_penalty_db(&m) else {
            panic!()
        };
        assert!((db + 10.0 * mu_theta(&m).norm_sqr().log10()).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_limits() {
        let s = RandomStream::root(1);
        let bpsk = Constellation::by_name("bpsk").unwrap();
        let hi = mi_monte_carlo(&bpsk, MuTheta::real(1.0), 1.0, 1e-3, 20_000, &s).unwrap();
        assert!((hi.value - 1.0).abs() < 1e-6, "{hi:?}");
        let exact = mi_monte_carlo(&bpsk, MuTheta::real(1.0), 1.0, 0.0, 10, &s).unwrap();
        assert_eq!((exact.value, exact.method), (1.0, MiMethod::ClosedForm));

        let zero = mi_monte_carlo(&qpsk(), MuTheta::real(0.0), 1.0, 0.5, 10_000, &s).unwrap();
        assert!(zero.value <= zero.stderr + 1e-12, "{zero:?}");
        assert!(matches!(
            mi_monte_carlo(&Constellation::Gaussian, MuTheta::real(1.0), 1.0, 1.0, 10, &s),
            Err(Error::ContinuousConstellation)
        ));
    }

    #[test]
    fn monte_carlo_bpsk_matches_quadrature() {
        // Real-valued oracle: BPSK over complex AWGN only uses the in-phase
        // component, Y = ±√(2 Es/N0) + N(0,1) in normalized units.
        // I = 1 - E[log2(1 + e^{-2 s Y})], integrated by midpoint rule.
        let snr: f64 = 1.0;
        let s = (2.0 * snr).sqrt();
        let n = 400_000;
        let (a, b) = (s - 12.0, s + 12.0);
        let h = (b - a) / n as f64;
        let expect: f64 = 1.0
            - (0..n)
                .map(|i| {
                    let y = a + (i as f64 + 0.5) * h;
                    let pdf = (-(y - s).powi(2) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
                    pdf * (-2.0 * s * y).exp().ln_1p() / LN_2
                })
                .sum::<f64>()
                * h;
        let est = mi_monte_carlo(
            &Constellation::by_name("bpsk").unwrap(),
            MuTheta::real(1.0),
            1.0,
            1.0 / snr,
            200_000,
            &RandomStream::root(2),
        )
        .unwrap();
        assert!(
            (est.value - expect).abs() < 3.0 * est.stderr,
            "{} vs {expect}",
            est.value
        );
    }

    #[test]
    fn monte_carlo_is_thread_count_independent() {
        let run = || {
            mi_monte_carlo(
                &qpsk(),
                MuTheta::real(0.8),
                1.0,
                0.5,
                3 * BLOCK + 17,
                &RandomStream::root(9),
            )
            .unwrap()
        };
        let a = run();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(a, b);
        assert_eq!(a.trials, 3 * BLOCK + 17);
    }

    #[test]
    fn monte_carlo_monotone_in_phase_variance() {
        let mut prev: Option<MiEstimate> = None;
        for sigma2 in [0.0, 0.25, 0.5, 1.0, 2.0] {
            let mu = mu_theta(&PhaseNoiseModel::WrappedGaussian { sigma2 });
            let e = mi_monte_carlo(&qpsk(), mu, 1.0, 0.25, 20_000, &RandomStream::root(4)).unwrap();
            if let Some(p) = prev {
                assert!(
                    e.value <= p.value + 2.0 * (e.stderr.hypot(p.stderr)),
                    "{sigma2}: {e:?} vs {p:?}"
                );
            }
            prev = Some(e);
        }
    }

    fn cfg(phase: PhaseNoiseModel, snr_db: f64, grid: TimeGrid) -> ChannelConfig {
        ChannelConfig::new(1.0, NoiseLevel::from_snr_db(1.0, snr_db).unwrap(), phase, grid, 3).unwrap()
    }

    #[test]
    fn end_to_end_without_phase_noise_matches_equivalent() {
        let g = TimeGrid::new(4.0, 64, 1.0).unwrap();
        let c = cfg(PhaseNoiseModel::Off, 3.0, g);
        let e2e = mi_end_to_end(&c, &qpsk(), 20_000, &RandomStream::root(5)).unwrap();
        let mc = mi_monte_carlo(
            &qpsk(),
            MuTheta::real(1.0),
            1.0,
            c.noise.n0(),
            20_000,
            &RandomStream::root(6),
        )
        .unwrap();
        assert!(
            (e2e.value - mc.value).abs() < 2.0 * e2e.stderr.hypot(mc.stderr),
            "{e2e:?} {mc:?}"
        );
        assert!(e2e.trials >= 20_000);

        let u = cfg(PhaseNoiseModel::UniformCircle, 3.0, g);
        let e = mi_end_to_end(&u, &qpsk(), 2_000, &RandomStream::root(5)).unwrap();
        assert!(e.value <= e.stderr + 1e-12);

        let quiet = ChannelConfig::new(1.0, NoiseLevel::new(0.0).unwrap(), PhaseNoiseModel::Off, g, 0).unwrap();
        assert_eq!(
            mi_end_to_end(&quiet, &qpsk(), 10, &RandomStream::root(0)),
            Err(Error::ZeroNoise)
        );
    }

    #[test]
    fn end_to_end_bounded_by_gaussian_capacity() {
        let g = TimeGrid::new(4.0, 256, 1.0).unwrap();
        let model = PhaseNoiseModel::WrappedGaussian { sigma2: 0.5 };
        let c = cfg(model, 5.0, g);
        let cap = mi_gaussian_closed_form(1.0, c.noise.n0(), mu_theta(&model)).unwrap();
        for name in ["qpsk", "16qam"] {
            let e = mi_end_to_end(
                &c,
                &Constellation::by_name(name).unwrap(),
                8_000,
                &RandomStream::root(8),
            )
            .unwrap();
            assert!(e.value <= cap.value + 2.0 * e.stderr, "{name}: {e:?} > {cap:?}");
        }
    }

    #[test]
    fn bank_adds_nothing_for_qpsk() {
        let g = TimeGrid::new(2.0, 32, 1.0).unwrap();
        let c = cfg(PhaseNoiseModel::WrappedGaussian { sigma2: 1.0 }, 5.0, g);
        let cmp = mi_bank_vs_matched_filter(&c, &qpsk(), 3, 40_000, 4_000, &RandomStream::root(10)).unwrap();
        assert!(cmp.difference.abs() < 2.0 * cmp.difference_stderr + 1e-3, "{cmp:?}");
        assert_eq!(cmp.branch_means.len(), 3 * 4);
        for b in &cmp.branch_means {
            assert!(b.mean.norm() < 3.5 * b.stderr, "{b:?}");
        }
    }
}
