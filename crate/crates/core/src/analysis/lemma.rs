//! Convergence of phase-noise projections under grid refinement.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::grid::{eval_basis, eval_pulse, inner_product, BasisIndex, PulseShape, TimeGrid};
use crate::receiver::{lemma_nested_path, lemma_projection};
use crate::stats::{log_log_slope, ComplexStats};
use crate::stochastics::{mu_theta, PhaseNoiseModel, RandomStream};
use crate::{Error, Result};

const NESTED_TAG: u64 = 0x4e45_5354;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaRow {
    pub level: usize,
    pub mean: Complex64,
    /// Complex variance `E|P - E P|²` across trials.
    pub variance: f64,
    /// Standard error of `mean`.
    pub stderr: f64,
    /// The single nested-refinement realization at this level.
    pub nested_path: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaTable {
    pub rows: Vec<LemmaRow>,
    /// `μ_Θ ⟨g_k, φ_{nm}⟩`.
    pub limit: Complex64,
    /// Slope of `ln variance` against `ln l`; `None` when some variance is
    /// exactly zero (the projection is deterministic).
    pub variance_slope: Option<f64>,
}

/// Monte Carlo mean and variance of [`lemma_projection`] along a ladder of
/// refinement levels, plus one nested path evaluated on every level.
///
/// `grid` fixes `S` and `T`; its own level is ignored. Each level uses
/// `trials` independent phase realizations.
#[allow(clippy::too_many_arguments)]
pub fn lemma_convergence_table(
    k: i64,
    idx: BasisIndex,
    pulse: &PulseShape,
    model: &PhaseNoiseModel,
    grid: &TimeGrid,
    ladder: &[usize],
    trials: usize,
    stream: &RandomStream,
) -> Result<LemmaTable> {
    if ladder.is_empty() || ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "ladder must be non-empty and strictly increasing".into(),
        ));
    }
    if trials < 2 {
        return Err(Error::InvalidParameter(
            "at least two trials per level are needed".into(),
        ));
    }
    let finest = grid.with_level(*ladder.last().unwrap())?;
    let limit = mu_theta(model).value() * inner_product(&eval_pulse(pulse, k, &finest)?, &eval_basis(idx, &finest)?)?;
    let nested = lemma_nested_path(k, idx, pulse, model, &finest, ladder, &stream.child(NESTED_TAG))?;

    let mut rows = Vec::with_capacity(ladder.len());
    for (&level, &path) in ladder.iter().zip(&nested) {
        let g = grid.with_level(level)?;
        let level_stream = stream.child(level as u64);
        let draws: Vec<Complex64> = (0..trials as u64)
            .into_par_iter()
            .map(|t| lemma_projection(k, idx, pulse, model, &g, &level_stream.child(t)))
            .collect::<Result<_>>()?;
        let s: ComplexStats = draws.into_iter().collect();
        rows.push(LemmaRow {
            level,
            mean: s.mean(),
            variance: s.variance(),
            stderr: s.stderr(),
            nested_path: path,
        });
    }
    let variance_slope = if rows.len() >= 2 && rows.iter().all(|r| r.variance > 0.0) {
        let x: Vec<f64> = rows.iter().map(|r| r.level as f64).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.variance).collect();
        Some(log_log_slope(&x, &y))
    } else {
        None
    };
    Ok(LemmaTable {
        rows,
        limit,
        variance_slope,
    })
}

/// Levels `2^lo ..= 2^hi`.
pub fn power_of_two_ladder(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 1usize << e).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> TimeGrid {
        TimeGrid::new(2.0, 2, 1.0).unwrap()
    }

    #[test]
    fn noiseless_table_is_exact() {
        let t = lemma_convergence_table(
            0,
            BasisIndex::new(0, 0),
            &PulseShape::rectangular(1.0),
            &PhaseNoiseModel::Off,
            &base(),
            &power_of_two_ladder(2, 6),
            4,
            &RandomStream::root(0),
        )
        .unwrap();
        assert!((t.limit - 1.0).norm() < 1e-14);
        for r in &t.rows {
            assert!((r.mean - t.limit).norm() < 1e-14);
            assert_eq!(r.variance, 0.0);
            assert!((r.nested_path - t.limit).norm() < 1e-14);
        }
        assert_eq!(t.variance_slope, None);
    }

    #[test]
    fn gaussian_table_converges_at_rate_one_over_l() {
        let model = PhaseNoiseModel::WrappedGaussian { sigma2: 1.0 };
        let t = lemma_convergence_table(
            0,
            BasisIndex::new(0, 0),
            &PulseShape::rectangular(1.0),
            &model,
            &base(),
            &power_of_two_ladder(4, 10),
            2000,
            &RandomStream::root(1),
        )
        .unwrap();
        assert!((t.limit.re - (-0.5f64).exp()).abs() < 1e-14);
        let slope = t.variance_slope.unwrap();
        assert!((slope + 1.0).abs() < 0.1, "{slope}");
        let last = t.rows.last().unwrap();
        assert!((last.mean - t.limit).norm() < 3.0 * last.stderr);
        // Var = (1 - e^{-1}) Δ/T.
        for r in &t.rows {
            let want = (1.0 - (-1.0f64).exp()) * 2.0 / r.level as f64;
            assert!((r.variance / want - 1.0).abs() < 0.1, "{r:?}");
        }
    }

    #[test]
    fn bad_ladders_rejected() {
        let args = |ladder: &[usize]| {
            lemma_convergence_table(
                0,
                BasisIndex::new(0, 0),
                &PulseShape::rectangular(1.0),
                &PhaseNoiseModel::Off,
                &base(),
                ladder,
                4,
                &RandomStream::root(0),
            )
        };
        assert!(args(&[]).is_err());
        assert!(args(&[8, 4]).is_err());
        assert!(args(&[4, 6]).is_err());
    }
}
