//! Random processes on a grid: white phase noise, complex AWGN, and the
//! counter-addressed random streams that drive them.
//!
//! Every draw is a pure function of `(master_seed, stream_id, sample index)`.
//! A stream is a ChaCha8 keystream; Gaussian variates come from Box–Muller on
//! a fixed number of words per sample, so any sample range can be produced by
//! seeking to its word offset instead of replaying the stream from the start.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::grid::{TimeGrid, Waveform};
use crate::{Error, Result};

/// Stream tags separating the independent randomness inside one trial.
pub mod tags {
    pub const PHASE: u64 = 0x5048_4153;
    pub const AWGN: u64 = 0x4157_474e;
    pub const SYMBOLS: u64 = 0x5359_4d42;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Address of an independent random sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RandomStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }

    /// Root stream of a seed.
    pub fn root(master_seed: u64) -> Self {
        Self::new(master_seed, 0)
    }

    /// Derived stream, e.g. one per Monte Carlo trial or per purpose.
    pub fn child(&self, tag: u64) -> Self {
        Self::new(self.master_seed, splitmix64(self.stream_id ^ splitmix64(tag)))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }

    fn rng_at_word(&self, word: u128) -> ChaCha8Rng {
        let mut rng = self.rng();
        rng.set_word_pos(word);
        rng
    }
}

#[inline]
fn unit_open_closed(x: u64) -> f64 {
    // (0, 1]: safe argument for ln.
    ((x >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn unit_closed_open(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Two independent standard normals from two words-pairs (four 32-bit words).
#[inline]
fn box_muller(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1 = unit_open_closed(rng.random::<u64>());
    let u2 = unit_closed_open(rng.random::<u64>());
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (2.0 * PI * u2).sin_cos();
    (r * c, r * s)
}

/// Standard normal sequence of a stream; element `i` is half of pair `i/2`.
pub(crate) struct NormalSequence {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalSequence {
    pub(crate) fn starting_at(stream: &RandomStream, index: usize) -> Self {
        let pair = index / 2;
        let mut rng = stream.rng_at_word(4 * pair as u128);
        let spare = if index % 2 == 1 {
            Some(box_muller(&mut rng).1)
        } else {
            None
        };
        Self { rng, spare }
    }

    #[inline]
    pub(crate) fn next_normal(&mut self) -> f64 {
        match self.spare.take() {
            Some(z) => z,
            None => {
                let (a, b) = box_muller(&mut self.rng);
                self.spare = Some(b);
                a
            }
        }
    }
}

/// Circularly symmetric `CN(0, 1)` sequence; element `i` uses pair `i`.
pub(crate) struct ComplexNormalSequence {
    rng: ChaCha8Rng,
}

impl ComplexNormalSequence {
    pub(crate) fn starting_at(stream: &RandomStream, index: usize) -> Self {
        Self {
            rng: stream.rng_at_word(4 * index as u128),
        }
    }

    #[inline]
    pub(crate) fn next_cn(&mut self) -> Complex64 {
        let (a, b) = box_muller(&mut self.rng);
        Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// Marginal law of the white phase process `Θ(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseNoiseModel {
    /// Zero-mean Gaussian with variance `sigma2` (rad²), taken modulo 2π.
    WrappedGaussian { sigma2: f64 },
    /// Uniform on the circle: `μ_Θ = 0`.
    UniformCircle,
    /// No phase noise; same as `WrappedGaussian { sigma2: 0 }`.
    Off,
}

impl PhaseNoiseModel {
    pub fn wrapped_gaussian(sigma2: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "phase variance must be finite and >= 0, got {sigma2}"
            )));
        }
        Ok(Self::WrappedGaussian { sigma2 })
    }
}

/// Circular mean `μ_Θ = E[e^{jΘ}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuTheta(pub Complex64);

impl MuTheta {
    pub fn real(v: f64) -> Self {
        Self(Complex64::new(v, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }
}

/// `e^{-σ²/2}` for the Gaussian model, `0` for the uniform one.
pub fn mu_theta(model: &PhaseNoiseModel) -> MuTheta {
    match *model {
        PhaseNoiseModel::WrappedGaussian { sigma2 } => MuTheta::real((-sigma2 / 2.0).exp()),
        PhaseNoiseModel::UniformCircle => MuTheta::real(0.0),
        PhaseNoiseModel::Off => MuTheta::real(1.0),
    }
}

/// Phase samples of one stream, addressable by grid position.
pub(crate) struct PhaseSampler {
    model: PhaseNoiseModel,
    stream: RandomStream,
}

impl PhaseSampler {
    pub(crate) fn new(model: PhaseNoiseModel, stream: RandomStream) -> Self {
        Self { model, stream }
    }

    /// `Θ` at positions `start .. start + out.len()`.
    pub(crate) fn fill(&self, start: usize, out: &mut [f64]) {
        match self.model {
            PhaseNoiseModel::Off => out.fill(0.0),
            PhaseNoiseModel::WrappedGaussian { sigma2 } => {
                let sigma = sigma2.sqrt();
                let mut seq = NormalSequence::starting_at(&self.stream, start);
                out.iter_mut().for_each(|x| *x = sigma * seq.next_normal());
            }
            PhaseNoiseModel::UniformCircle => {
                let mut rng = self.stream.rng_at_word(2 * start as u128);
                out.iter_mut()
                    .for_each(|x| *x = 2.0 * PI * unit_closed_open(rng.random::<u64>()) - PI);
            }
        }
    }

    /// `e^{jΘ}` at positions `start .. start + out.len()`.
    pub(crate) fn fill_phasors(&self, start: usize, out: &mut [Complex64]) {
        if matches!(self.model, PhaseNoiseModel::Off) {
            out.fill(Complex64::new(1.0, 0.0));
            return;
        }
        let mut theta = vec![0.0; out.len()];
        self.fill(start, &mut theta);
        for (z, t) in out.iter_mut().zip(theta) {
            let (s, c) = t.sin_cos();
            *z = Complex64::new(c, s);
        }
    }
}

/// `2l` iid phase samples `Θ(t_i)`; Gaussian draws are left unwrapped.
pub fn sample_phase(model: &PhaseNoiseModel, grid: &TimeGrid, stream: &RandomStream) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    PhaseSampler::new(*model, *stream).fill(0, &mut out);
    out
}

/// AWGN level: every unit-norm projection of the noise is `CN(0, N0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseLevel {
    n0: f64,
}

impl NoiseLevel {
    pub fn new(n0: f64) -> Result<Self> {
        if !(n0.is_finite() && n0 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise level N0 must be finite and >= 0, got {n0}"
            )));
        }
        Ok(Self { n0 })
    }

    /// Level giving `Es/N0 = snr_db`; `+inf` dB means noiseless.
    pub fn from_snr_db(es: f64, snr_db: f64) -> Result<Self> {
        if snr_db == f64::INFINITY {
            return Self::new(0.0);
        }
        Self::new(es / 10f64.powf(snr_db / 10.0))
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }
}

/// Per-sample noise `CN(0, N0/Δ)` at positions `start .. start + out.len()`, added in place.
pub(crate) fn add_awgn(
    level: &NoiseLevel,
    grid: &TimeGrid,
    stream: &RandomStream,
    start: usize,
    out: &mut [Complex64],
) {
    if level.n0 == 0.0 {
        return;
    }
    let std = (level.n0 / grid.spacing()).sqrt();
    let mut seq = ComplexNormalSequence::starting_at(stream, start);
    out.iter_mut().for_each(|z| *z += std * seq.next_cn());
}

/// White noise calibrated to the projection receiver: per-sample variance
/// `N0/Δ`, so that `⟨W, φ⟩ ~ CN(0, N0)` for every unit-norm `φ`.
pub fn sample_awgn(level: &NoiseLevel, grid: &TimeGrid, stream: &RandomStream) -> Waveform {
    let mut samples = vec![Complex64::new(0.0, 0.0); grid.len()];
    add_awgn(level, grid, stream, 0, &mut samples);
    Waveform::from_parts_unchecked(*grid, samples)
}

/// Sample autocorrelation of `e^{jΘ}` at lags `0 ..= lags`:
/// the average of `e^{j(Θ_i - Θ_{i+τ})}` over all available pairs.
pub fn autocorrelation_estimate(phase: &[f64], lags: usize) -> Result<Vec<Complex64>> {
    if lags >= phase.len() {
        return Err(Error::TooManyLags { lags, len: phase.len() });
    }
    Ok((0..=lags)
        .map(|tau| {
            let n = phase.len() - tau;
            let sum: Complex64 = phase[..n]
                .iter()
                .zip(&phase[tau..])
                .map(|(a, b)| Complex64::from_polar(1.0, a - b))
                .sum();
            sum / n as f64
        })
        .collect())
}
