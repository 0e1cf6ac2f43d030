//! Projection receivers.
//!
//! [`matched_filter_bank`] correlates the received waveform with every
//! shifted pulse `g_k` (the baud-sampled matched filter). [`basis_projection`]
//! gives any single coordinate `Y_{nm}` in the trigonometric basis, and
//! [`lemma_projection`] produces one realization of `⟨g_k e^{jΘ}, φ_{nm}⟩` at a
//! given refinement, the quantity whose limit in `l` is studied by
//! [`crate::analysis::lemma_convergence_table`].

use num_complex::Complex64;

use crate::grid::{trig_taps, BasisIndex, PulseShape, TimeGrid, Waveform};
use crate::stochastics::{PhaseNoiseModel, PhaseSampler, RandomStream};
use crate::{Error, Result};

fn check_grid(y: &Waveform, grid: &TimeGrid) -> Result<()> {
    if y.grid() != grid {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `⟨Y, g_k⟩` for every slot `k` of the window, in slot order.
pub fn matched_filter_bank(y: &Waveform, pulse: &PulseShape, grid: &TimeGrid) -> Result<Vec<Complex64>> {
    check_grid(y, grid)?;
    let taps = pulse.taps(grid)?;
    let dt = grid.spacing();
    let sps = grid.samples_per_symbol();
    Ok(y.samples()
        .chunks_exact(sps)
        .map(|slot| slot.iter().zip(&taps).map(|(v, g)| v * *g).sum::<Complex64>() * dt)
        .collect())
}

/// `Y_{nm} = ⟨Y, φ_{nm}⟩`.
pub fn basis_projection(y: &Waveform, idx: BasisIndex, grid: &TimeGrid) -> Result<Complex64> {
    check_grid(y, grid)?;
    let start = grid.slot_start(idx.m)?;
    let taps = trig_taps(idx.n, grid);
    let sum: Complex64 = y.samples()[start..start + taps.len()]
        .iter()
        .zip(&taps)
        .map(|(v, phi)| v * phi.conj())
        .sum();
    Ok(sum * grid.spacing())
}

/// All coordinates `Y_{nm}` for `n = 0 ..= n_max`, indexed `[n][slot]`.
pub fn projection_bank(y: &Waveform, n_max: usize, grid: &TimeGrid) -> Result<Vec<Vec<Complex64>>> {
    check_grid(y, grid)?;
    let dt = grid.spacing();
    let sps = grid.samples_per_symbol();
    Ok((0..=n_max)
        .map(|n| {
            let taps = trig_taps(n, grid);
            y.samples()
                .chunks_exact(sps)
                .map(|slot| slot.iter().zip(&taps).map(|(v, phi)| v * phi.conj()).sum::<Complex64>() * dt)
                .collect()
        })
        .collect())
}

/// Weights `g_k(t_i) φ*_{nm}(t_i)` over the overlap of the two supports,
/// with the storage position of the first one. `None` when the supports are
/// disjoint and the projection vanishes identically.
fn lemma_weights(
    k: i64,
    idx: BasisIndex,
    pulse: &PulseShape,
    grid: &TimeGrid,
) -> Result<Option<(usize, Vec<Complex64>)>> {
    let start = grid.slot_start(k)?;
    grid.slot_start(idx.m)?;
    if k != idx.m {
        return Ok(None);
    }
    let g = pulse.taps(grid)?;
    let w = g
        .iter()
        .zip(trig_taps(idx.n, grid))
        .map(|(g, phi)| phi.conj() * *g)
        .collect();
    Ok(Some((start, w)))
}

/// One realization of `Δ Σ_i g_k(t_i) e^{jΘ(t_i)} φ*_{nm}(t_i)`.
///
/// `Θ` is the sequence `sample_phase(model, grid, stream)`; only the samples
/// where the summand can be non-zero are generated.
pub fn lemma_projection(
    k: i64,
    idx: BasisIndex,
    pulse: &PulseShape,
    model: &PhaseNoiseModel,
    grid: &TimeGrid,
    stream: &RandomStream,
) -> Result<Complex64> {
    let Some((start, weights)) = lemma_weights(k, idx, pulse, grid)? else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let mut phasors = vec![Complex64::new(0.0, 0.0); weights.len()];
    PhaseSampler::new(*model, *stream).fill_phasors(start, &mut phasors);
    let sum: Complex64 = phasors.iter().zip(&weights).map(|(e, w)| e * w).sum();
    Ok(sum * grid.spacing())
}

/// A single phase realization followed across nested refinements.
///
/// The phase is drawn once on `finest`; a coarser level `l` reuses every
/// `(L/l)`-th sample, which sits at the same instant. Returns one projection
/// per entry of `levels`; each level must divide the finest level and give a
/// conforming grid.
pub fn lemma_nested_path(
    k: i64,
    idx: BasisIndex,
    pulse: &PulseShape,
    model: &PhaseNoiseModel,
    finest: &TimeGrid,
    levels: &[usize],
    stream: &RandomStream,
) -> Result<Vec<Complex64>> {
    let Some((start, _)) = lemma_weights(k, idx, pulse, finest)? else {
        for &l in levels {
            nested_grid(finest, l)?;
        }
        return Ok(vec![Complex64::new(0.0, 0.0); levels.len()]);
    };
    let mut phasors = vec![Complex64::new(0.0, 0.0); finest.samples_per_symbol()];
    PhaseSampler::new(*model, *stream).fill_phasors(start, &mut phasors);
    levels
        .iter()
        .map(|&l| {
            let grid = nested_grid(finest, l)?;
            let stride = finest.level() / l;
            let (_, weights) = lemma_weights(k, idx, pulse, &grid)?.expect("same slots");
            let sum: Complex64 = phasors.iter().step_by(stride).zip(&weights).map(|(e, w)| e * w).sum();
            Ok(sum * grid.spacing())
        })
        .collect()
}

fn nested_grid(finest: &TimeGrid, level: usize) -> Result<TimeGrid> {
    if level == 0 || !finest.level().is_multiple_of(level) {
        return Err(Error::InvalidParameter(format!(
            "level {level} does not divide the finest level {}",
            finest.level()
        )));
    }
    finest.with_level(level)
}
