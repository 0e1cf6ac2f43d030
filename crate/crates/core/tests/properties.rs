use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use pnlab_core::analysis::psd_welch;
use pnlab_core::channel::{apply_channel, ChannelConfig};
use pnlab_core::grid::{
    eval_pulse, gram_matrix, identity_deviation, inner_product, BasisIndex, PulseShape, TimeGrid, Waveform,
};
use pnlab_core::receiver::{matched_filter_bank, projection_bank};
use pnlab_core::stochastics::{sample_awgn, sample_phase, tags, NoiseLevel, PhaseNoiseModel, RandomStream};

/// Conforming grid: `S/T` slots per side, `sps` samples per symbol.
fn grid_strategy() -> impl Strategy<Value = TimeGrid> {
    (1usize..=4, 1usize..=24, prop_oneof![Just(0.5), Just(1.0), Just(2.0)])
        .prop_map(|(slots, sps, t)| TimeGrid::new(slots as f64 * t, slots * sps, t).unwrap())
}

fn waveform(grid: TimeGrid, parts: &[(f64, f64)]) -> Waveform {
    let samples = (0..grid.len())
        .map(|i| {
            let (re, im) = parts[i % parts.len()];
            Complex64::new(re + 0.1 * i as f64, im - 0.05 * i as f64)
        })
        .collect();
    Waveform::new(grid, samples).unwrap()
}

fn parts() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..16)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inner_product_is_conjugate_symmetric(grid in grid_strategy(), a in parts(), b in parts()) {
        let (x, y) = (waveform(grid, &a), waveform(grid, &b));
        let xy = inner_product(&x, &y).unwrap();
        let yx = inner_product(&y, &x).unwrap();
        prop_assert!((xy - yx.conj()).norm() <= 1e-12 * (1.0 + xy.norm()));
    }

    #[test]
    fn rectangular_pulse_has_unit_energy(grid in grid_strategy(), k_offset in 0usize..8) {
        let slots: Vec<i64> = grid.slots().collect();
        let k = slots[k_offset % slots.len()];
        let g = eval_pulse(&PulseShape::rectangular(grid.symbol_period()), k, &grid).unwrap();
        prop_assert!((g.energy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oversampled_basis_is_orthonormal(slots in 1usize..=3, n_max in 0usize..=4, extra in 1usize..=8) {
        let sps = 2 * n_max + extra;
        let grid = TimeGrid::new(slots as f64, slots * sps, 1.0).unwrap();
        let idx: Vec<BasisIndex> = grid
            .slots()
            .flat_map(|m| (0..=n_max).map(move |n| BasisIndex::new(n, m)))
            .collect();
        prop_assert!(identity_deviation(&gram_matrix(&idx, &grid).unwrap()) < 1e-10);
    }

    #[test]
    fn matched_filter_is_linear(
        grid in grid_strategy(),
        a in parts(),
        b in parts(),
        ca in (-3.0f64..3.0, -3.0f64..3.0),
        cb in (-3.0f64..3.0, -3.0f64..3.0),
    ) {
        let (y1, y2) = (waveform(grid, &a), waveform(grid, &b));
        let (ca, cb) = (Complex64::new(ca.0, ca.1), Complex64::new(cb.0, cb.1));
        let pulse = PulseShape::rectangular(grid.symbol_period());
        let mix = y1.scale(ca).add(&y2.scale(cb)).unwrap();
        let lhs = matched_filter_bank(&mix, &pulse, &grid).unwrap();
        let r1 = matched_filter_bank(&y1, &pulse, &grid).unwrap();
        let r2 = matched_filter_bank(&y2, &pulse, &grid).unwrap();
        for ((l, p), q) in lhs.iter().zip(&r1).zip(&r2) {
            let rhs = ca * p + cb * q;
            prop_assert!((l - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn branch_zero_is_the_matched_filter(grid in grid_strategy(), a in parts()) {
        let y = waveform(grid, &a);
        let mf = matched_filter_bank(&y, &PulseShape::rectangular(grid.symbol_period()), &grid).unwrap();
        let bank = projection_bank(&y, 0, &grid).unwrap();
        for (p, q) in mf.iter().zip(&bank[0]) {
            prop_assert!((p - q).norm() <= 1e-12 * (1.0 + p.norm()));
        }
    }

    #[test]
    fn phase_noise_is_unimodular(grid in grid_strategy(), a in parts(), sigma2 in 0.0f64..4.0, seed in any::<u64>()) {
        let x = waveform(grid, &a);
        let cfg = ChannelConfig::new(1.0, NoiseLevel::new(0.0).unwrap(), PhaseNoiseModel::wrapped_gaussian(sigma2).unwrap(), grid, seed).unwrap();
        let y = apply_channel(&x, &cfg, &cfg.root_stream()).unwrap();
        for (p, q) in x.samples().iter().zip(y.samples()) {
            prop_assert!((p.norm() - q.norm()).abs() <= 1e-12 * (1.0 + p.norm()));
        }
    }

    #[test]
    fn phase_off_is_textbook_awgn(grid in grid_strategy(), a in parts(), n0 in 0.0f64..2.0, seed in any::<u64>()) {
        let x = waveform(grid, &a);
        let noise = NoiseLevel::new(n0).unwrap();
        let cfg = ChannelConfig::new(1.0, noise, PhaseNoiseModel::Off, grid, seed).unwrap();
        let stream = cfg.root_stream().child(5);
        let y = apply_channel(&x, &cfg, &stream).unwrap();
        let w = sample_awgn(&noise, &grid, &stream.child(tags::AWGN));
        prop_assert_eq!(y, x.add(&w).unwrap());
    }

    #[test]
    fn streams_are_reproducible(seed in any::<u64>(), id in any::<u64>(), sigma2 in 0.0f64..3.0) {
        let grid = TimeGrid::new(2.0, 32, 1.0).unwrap();
        let model = PhaseNoiseModel::wrapped_gaussian(sigma2).unwrap();
        let s = RandomStream::new(seed, id);
        prop_assert_eq!(sample_phase(&model, &grid, &s), sample_phase(&model, &grid, &s));
        let other = sample_phase(&PhaseNoiseModel::UniformCircle, &grid, &s.child(1));
        prop_assert_ne!(sample_phase(&PhaseNoiseModel::UniformCircle, &grid, &s), other);
    }

    #[test]
    fn welch_satisfies_parseval(a in parts(), seg in 4usize..64, overlap in prop_oneof![Just(0.0), Just(0.25), Just(0.5), Just(0.75)]) {
        let grid = TimeGrid::new(8.0, 128, 1.0).unwrap();
        let x = waveform(grid, &a);
        let p = psd_welch(&x, seg, overlap).unwrap();
        // Oracle: mean over segments of Σ w²|x|² / Σ w², computed directly.
        let w: Vec<f64> = (0..seg).map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / seg as f64).cos())).collect();
        let w2: f64 = w.iter().map(|v| v * v).sum();
        let hop = ((seg as f64 * (1.0 - overlap)).round() as usize).max(1);
        let s = x.samples();
        let mut total = 0.0;
        let mut count = 0;
        let mut start = 0;
        while start + seg <= s.len() {
            total += s[start..start + seg].iter().zip(&w).map(|(v, wi)| wi * wi * v.norm_sqr()).sum::<f64>() / w2;
            count += 1;
            start += hop;
        }
        prop_assert_eq!(p.segments, count);
        let want = total / count as f64;
        prop_assert!((p.total_power() - want).abs() <= 1e-9 * want.max(1e-12));
    }
}
