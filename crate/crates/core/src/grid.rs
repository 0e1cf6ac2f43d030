//! Time discretization of the observation window `[-S, S)`.
//!
//! Every waveform in the crate lives on a [`TimeGrid`]: `2l` sample instants
//! `t_i = iΔ`, `i = -l … l-1`, with `Δ = S/l`. Grids are required to be
//! conforming, meaning `S/T` and `T/Δ` are both whole numbers, so symbol
//! slots `[mT, (m+1)T)` tile the window and each slot holds the same number
//! of samples. Under that constraint the trigonometric system is exactly
//! orthonormal on the grid and the rectangular pulse has exactly unit energy.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::ops::RangeInclusive;

use crate::{Error, Result};

const RATIO_TOL: f64 = 1e-9;

fn whole_ratio(ratio: &'static str, value: f64) -> Result<usize> {
    let rounded = value.round();
    if !value.is_finite() || rounded < 1.0 || (value - rounded).abs() > RATIO_TOL * rounded {
        return Err(Error::NonIntegral { ratio, value });
    }
    Ok(rounded as usize)
}

/// Uniform sampling of `[-S, S)` at refinement level `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    half_width: f64,
    level: usize,
    symbol_period: f64,
    samples_per_symbol: usize,
    half_slots: usize,
}

impl TimeGrid {
    /// Builds a conforming grid with half-width `S`, level `l` and symbol period `T`.
    pub fn new(half_width: f64, level: usize, symbol_period: f64) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "window half-width S must be positive, got {half_width}"
            )));
        }
        if !(symbol_period.is_finite() && symbol_period > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "symbol period T must be positive, got {symbol_period}"
            )));
        }
        if level == 0 {
            return Err(Error::InvalidParameter("refinement level l must be >= 1".into()));
        }
        let half_slots = whole_ratio("S/T", half_width / symbol_period)?;
        let samples_per_symbol = whole_ratio("T/Δ", symbol_period * level as f64 / half_width)?;
        Ok(Self {
            half_width,
            level,
            symbol_period,
            samples_per_symbol,
            half_slots,
        })
    }

    /// Same window and symbol period at a different refinement level.
    pub fn with_level(&self, level: usize) -> Result<Self> {
        Self::new(self.half_width, level, self.symbol_period)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn symbol_period(&self) -> f64 {
        self.symbol_period
    }

    /// Sample spacing `Δ = S/l`.
    pub fn spacing(&self) -> f64 {
        self.half_width / self.level as f64
    }

    /// Number of samples, `2l`.
    pub fn len(&self) -> usize {
        2 * self.level
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `T/Δ`.
    pub fn samples_per_symbol(&self) -> usize {
        self.samples_per_symbol
    }

    /// Time of the sample stored at position `j` (`t = (j - l)Δ`).
    pub fn time(&self, j: usize) -> f64 {
        (j as f64 - self.level as f64) * self.half_width / self.level as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |j| self.time(j))
    }

    /// Symbol slots `m` with `[mT, (m+1)T)` inside the window.
    pub fn slots(&self) -> RangeInclusive<i64> {
        let h = self.half_slots as i64;
        -h..=h - 1
    }

    pub fn slot_count(&self) -> usize {
        2 * self.half_slots
    }

    /// Storage position of the first sample of slot `m`.
    pub fn slot_start(&self, slot: i64) -> Result<usize> {
        let range = self.slots();
        if !range.contains(&slot) {
            return Err(Error::SlotOutsideWindow {
                slot,
                first: *range.start(),
                last: *range.end(),
            });
        }
        Ok(((slot + self.half_slots as i64) as usize) * self.samples_per_symbol)
    }
}

/// Complex samples of a signal on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    grid: TimeGrid,
    samples: Vec<Complex64>,
}

impl Waveform {
    pub fn new(grid: TimeGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "waveform has {} samples, grid needs {}",
                samples.len(),
                grid.len()
            )));
        }
        if let Some(i) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidParameter(format!("non-finite sample at position {i}")));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub(crate) fn from_parts_unchecked(grid: TimeGrid, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self { grid, samples }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// `Δ Σ |x_i|²`.
    pub fn energy(&self) -> f64 {
        self.grid.spacing() * self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Average of `|x_i|²` over the window.
    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    pub fn scale(&self, c: Complex64) -> Waveform {
        Waveform {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Waveform) -> Result<Waveform> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Waveform {
            grid: self.grid,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseKind {
    /// `1/√T` on `[0, T)`.
    Rectangular,
}

/// Shaping pulse `g(t)`; shifted copies `g_k(t) = g(t - kT)` are orthonormal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseShape {
    pub kind: PulseKind,
    pub symbol_period: f64,
}

impl PulseShape {
    pub fn rectangular(symbol_period: f64) -> Self {
        Self {
            kind: PulseKind::Rectangular,
            symbol_period,
        }
    }

    /// Pulse values at `pΔ`, `p = 0 … T/Δ - 1`; the pulse vanishes elsewhere.
    pub fn taps(&self, grid: &TimeGrid) -> Result<Vec<f64>> {
        if (self.symbol_period - grid.symbol_period()).abs() > RATIO_TOL * grid.symbol_period() {
            return Err(Error::InvalidParameter(format!(
                "pulse period {} differs from grid symbol period {}",
                self.symbol_period,
                grid.symbol_period()
            )));
        }
        match self.kind {
            PulseKind::Rectangular => Ok(vec![1.0 / self.symbol_period.sqrt(); grid.samples_per_symbol()]),
        }
    }
}

/// Double index `(n, m)` of the basis function `φ_n(t - mT)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub n: usize,
    pub m: i64,
}

impl BasisIndex {
    pub fn new(n: usize, m: i64) -> Self {
        Self { n, m }
    }
}

/// `φ_n(pΔ)` for the trigonometric system, `(1/√T) e^{j2πnp/(T/Δ)}`.
///
/// The phase is reduced modulo one period in integer arithmetic so that
/// equal phases produce bit-identical samples.
pub(crate) fn trig_tap(n: usize, p: usize, samples_per_symbol: usize, symbol_period: f64) -> Complex64 {
    let k = (n as u128 * p as u128 % samples_per_symbol as u128) as f64;
    Complex64::from_polar(1.0 / symbol_period.sqrt(), 2.0 * PI * k / samples_per_symbol as f64)
}

pub(crate) fn trig_taps(n: usize, grid: &TimeGrid) -> Vec<Complex64> {
    let sps = grid.samples_per_symbol();
    let t = grid.symbol_period();
    (0..sps).map(|p| trig_tap(n, p, sps, t)).collect()
}

fn place_in_slot(grid: &TimeGrid, slot: i64, taps: impl IntoIterator<Item = Complex64>) -> Result<Waveform> {
    let start = grid.slot_start(slot)?;
    let mut samples = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (dst, v) in samples[start..].iter_mut().zip(taps) {
        *dst = v;
    }
    Ok(Waveform::from_parts_unchecked(*grid, samples))
}

/// Samples of `g_k(t) = g(t - kT)`.
pub fn eval_pulse(pulse: &PulseShape, k: i64, grid: &TimeGrid) -> Result<Waveform> {
    let taps = pulse.taps(grid)?;
    place_in_slot(grid, k, taps.into_iter().map(|v| Complex64::new(v, 0.0)))
}

/// Samples of the trigonometric basis function `φ_{nm}`.
pub fn eval_basis(idx: BasisIndex, grid: &TimeGrid) -> Result<Waveform> {
    place_in_slot(grid, idx.m, trig_taps(idx.n, grid))
}

/// Riemann approximation `Δ Σ a_i b_i*` of `∫ a(t) b*(t) dt`.
pub fn inner_product(a: &Waveform, b: &Waveform) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let sum: Complex64 = a.samples.iter().zip(&b.samples).map(|(x, y)| x * y.conj()).sum();
    Ok(sum * a.grid.spacing())
}

/// Pairwise inner products of the basis functions named by `indices`.
pub fn gram_matrix(indices: &[BasisIndex], grid: &TimeGrid) -> Result<Vec<Vec<Complex64>>> {
    let basis = indices
        .iter()
        .map(|&idx| eval_basis(idx, grid))
        .collect::<Result<Vec<_>>>()?;
    basis
        .iter()
        .map(|a| basis.iter().map(|b| inner_product(a, b)).collect())
        .collect()
}

/// `max |G_ab - δ_ab|` over a square matrix.
pub fn identity_deviation(matrix: &[Vec<Complex64>]) -> f64 {
    matrix
        .iter()
        .enumerate()
        .flat_map(|(a, row)| {
            row.iter()
                .enumerate()
                .map(move |(b, z)| (z - if a == b { 1.0 } else { 0.0 }).norm())
        })
        .fold(0.0, f64::max)
}
