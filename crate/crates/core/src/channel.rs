//! Linear modulation and the continuous-time white phase noise channel.
//!
//! The waveform path is `A_m → X(t) = Σ A_m g(t - mT) → Y(t) = X(t)e^{jΘ(t)} + W(t)`.
//! [`equivalent_channel`] is the discrete-time model `Y_k = μ_Θ A_k + W_k` the
//! waveform path reduces to after matched filtering; it is kept as separate
//! code so it can serve as the oracle for the waveform path.

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;

use crate::grid::{PulseShape, TimeGrid, Waveform};
use crate::stochastics::{
    add_awgn, tags, ComplexNormalSequence, MuTheta, NoiseLevel, PhaseNoiseModel, PhaseSampler, RandomStream,
};
use crate::{Error, Result};

const PROB_TOL: f64 = 1e-9;

/// Finite symbol alphabet with unit average energy.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteConstellation {
    points: Vec<Complex64>,
    probabilities: Vec<f64>,
    cumulative: Vec<f64>,
}

impl FiniteConstellation {
    /// Validates the probabilities and rescales the points to `Σ p|x|² = 1`.
    pub fn new(points: Vec<Complex64>, probabilities: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Constellation("no points".into()));
        }
        if points.len() != probabilities.len() {
            return Err(Error::Constellation(format!(
                "{} points but {} probabilities",
                points.len(),
                probabilities.len()
            )));
        }
        if probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Constellation("probabilities must be finite and >= 0".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::Constellation(format!("probabilities sum to {total}, not 1")));
        }
        if points.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Constellation("non-finite point".into()));
        }
        let energy: f64 = points.iter().zip(&probabilities).map(|(x, p)| p * x.norm_sqr()).sum();
        if energy <= 0.0 {
            return Err(Error::Constellation("zero average energy".into()));
        }
        let scale = energy.sqrt().recip();
        let points = points.into_iter().map(|z| z * scale).collect();
        let cumulative = probabilities
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Ok(Self {
            points,
            probabilities,
            cumulative,
        })
    }

    fn uniform(points: Vec<Complex64>) -> Self {
        let n = points.len();
        Self::new(points, vec![1.0 / n as f64; n]).expect("built-in constellation")
    }

    pub fn bpsk() -> Self {
        Self::uniform(vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)])
    }

    pub fn qpsk() -> Self {
        let h = FRAC_1_SQRT_2;
        Self::uniform(vec![
            Complex64::new(h, h),
            Complex64::new(-h, h),
            Complex64::new(-h, -h),
            Complex64::new(h, -h),
        ])
    }

    /// Square 16-QAM on the odd-integer lattice.
    pub fn qam16() -> Self {
        let levels = [-3.0, -1.0, 1.0, 3.0];
        Self::uniform(
            levels
                .iter()
                .flat_map(|&i| levels.iter().map(move |&q| Complex64::new(i, q)))
                .collect(),
        )
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `H(A)` in bits.
    pub fn entropy_bits(&self) -> f64 {
        self.probabilities
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|p| -p * p.log2())
            .sum()
    }

    pub(crate) fn sample_index<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let i = self.cumulative.partition_point(|&c| c <= u);
        // Rounding can leave the last cumulative value just below 1.
        let mut i = i.min(self.points.len() - 1);
        while self.probabilities[i] == 0.0 && i > 0 {
            i -= 1;
        }
        i
    }

    /// Parses `re im prob` rows; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        let mut probs = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(v) if v.len() == 3 => {
                    points.push(Complex64::new(v[0], v[1]));
                    probs.push(v[2]);
                }
                _ => {
                    return Err(Error::Constellation(format!(
                        "line {}: expected `re im prob`, got `{line}`",
                        no + 1
                    )))
                }
            }
        }
        Self::new(points, probs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Law of the iid symbols `A_k`, normalized to unit energy.
#[derive(Debug, Clone, PartialEq)]
pub enum Constellation {
    Finite(FiniteConstellation),
    /// Circularly symmetric complex Gaussian.
    Gaussian,
}

impl Constellation {
    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Self::Finite(FiniteConstellation::bpsk())),
            "qpsk" => Ok(Self::Finite(FiniteConstellation::qpsk())),
            "16qam" | "qam16" => Ok(Self::Finite(FiniteConstellation::qam16())),
            "gaussian" => Ok(Self::Gaussian),
            other => Err(Error::Constellation(format!(
                "unknown constellation `{other}` (bpsk, qpsk, 16qam, gaussian)"
            ))),
        }
    }

    pub fn finite(&self) -> Result<&FiniteConstellation> {
        match self {
            Self::Finite(c) => Ok(c),
            Self::Gaussian => Err(Error::ContinuousConstellation),
        }
    }
}

/// Symbols occupying consecutive slots starting at `first_slot`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    pub first_slot: i64,
    pub symbols: Vec<Complex64>,
}

impl SymbolFrame {
    pub fn new(first_slot: i64, symbols: Vec<Complex64>) -> Self {
        Self { first_slot, symbols }
    }

    pub fn slots(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.symbols.len() as i64).map(move |i| self.first_slot + i)
    }
}

fn draw_n(c: &Constellation, es: f64, count: usize, stream: &RandomStream) -> Result<Vec<Complex64>> {
    if !(es.is_finite() && es >= 0.0) {
        return Err(Error::InvalidParameter(format!("symbol energy must be >= 0, got {es}")));
    }
    let amp = es.sqrt();
    Ok(match c {
        Constellation::Finite(fc) => {
            let mut rng = stream.rng();
            (0..count).map(|_| fc.points[fc.sample_index(&mut rng)] * amp).collect()
        }
        Constellation::Gaussian => {
            let mut seq = ComplexNormalSequence::starting_at(stream, 0);
            (0..count).map(|_| seq.next_cn() * amp).collect()
        }
    })
}

/// `2M + 1` iid symbols scaled to energy `es`, occupying slots `-M ..= M`.
pub fn draw_symbols(c: &Constellation, es: f64, m: usize, stream: &RandomStream) -> Result<SymbolFrame> {
    Ok(SymbolFrame::new(-(m as i64), draw_n(c, es, 2 * m + 1, stream)?))
}

/// One symbol in every slot of `grid`.
pub fn draw_frame(c: &Constellation, es: f64, grid: &TimeGrid, stream: &RandomStream) -> Result<SymbolFrame> {
    Ok(SymbolFrame::new(
        *grid.slots().start(),
        draw_n(c, es, grid.slot_count(), stream)?,
    ))
}

/// Finite-constellation frame filling `grid`, with the drawn point indices.
pub(crate) fn draw_indexed_frame(
    c: &FiniteConstellation,
    es: f64,
    grid: &TimeGrid,
    stream: &RandomStream,
) -> (SymbolFrame, Vec<usize>) {
    let mut rng = stream.rng();
    let amp = es.sqrt();
    let idx: Vec<usize> = (0..grid.slot_count()).map(|_| c.sample_index(&mut rng)).collect();
    let symbols = idx.iter().map(|&i| c.points[i] * amp).collect();
    (SymbolFrame::new(*grid.slots().start(), symbols), idx)
}

/// `X(t_i) = Σ_m A_m g(t_i - mT)`.
pub fn modulate(frame: &SymbolFrame, pulse: &PulseShape, grid: &TimeGrid) -> Result<Waveform> {
    let taps = pulse.taps(grid)?;
    let mut samples = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (slot, &a) in frame.slots().zip(&frame.symbols) {
        let start = grid.slot_start(slot)?;
        for (dst, &g) in samples[start..start + taps.len()].iter_mut().zip(&taps) {
            *dst += a * g;
        }
    }
    Ok(Waveform::from_parts_unchecked(*grid, samples))
}

/// Everything that defines one channel experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub es: f64,
    pub noise: NoiseLevel,
    pub phase: PhaseNoiseModel,
    pub pulse: PulseShape,
    pub grid: TimeGrid,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn new(es: f64, noise: NoiseLevel, phase: PhaseNoiseModel, grid: TimeGrid, seed: u64) -> Result<Self> {
        if !(es.is_finite() && es >= 0.0) {
            return Err(Error::InvalidParameter(format!("symbol energy must be >= 0, got {es}")));
        }
        Ok(Self {
            es,
            noise,
            phase,
            pulse: PulseShape::rectangular(grid.symbol_period()),
            grid,
            seed,
        })
    }

    /// `Es/N0` in dB (`+inf` when noiseless).
    pub fn snr_db(&self) -> f64 {
        10.0 * (self.es / self.noise.n0()).log10()
    }

    pub fn root_stream(&self) -> RandomStream {
        RandomStream::root(self.seed)
    }
}

/// `Y(t_i) = X(t_i) e^{jΘ(t_i)} + W(t_i)`.
///
/// `Θ` is drawn from `stream.child(PHASE)` and `W` from `stream.child(AWGN)`.
pub fn apply_channel(x: &Waveform, cfg: &ChannelConfig, stream: &RandomStream) -> Result<Waveform> {
    if *x.grid() != cfg.grid {
        return Err(Error::GridMismatch);
    }
    let mut phasors = vec![Complex64::new(0.0, 0.0); cfg.grid.len()];
    PhaseSampler::new(cfg.phase, stream.child(tags::PHASE)).fill_phasors(0, &mut phasors);
    let mut y: Vec<Complex64> = x.samples().iter().zip(&phasors).map(|(a, b)| a * b).collect();
    add_awgn(&cfg.noise, &cfg.grid, &stream.child(tags::AWGN), 0, &mut y);
    Ok(Waveform::from_parts_unchecked(cfg.grid, y))
}

/// Discrete-time equivalent: `μ A_k + CN(0, N0)` for every symbol of the frame.
pub fn equivalent_channel(
    frame: &SymbolFrame,
    mu: MuTheta,
    level: &NoiseLevel,
    stream: &RandomStream,
) -> Vec<Complex64> {
    let std = level.n0().sqrt();
    let mut noise = ComplexNormalSequence::starting_at(stream, 0);
    frame
        .symbols
        .iter()
        .map(|&a| {
            let w = noise.next_cn();
            mu.value() * a + std * w
        })
        .collect()
}
