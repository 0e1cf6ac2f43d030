//! Welch power spectral density estimates and the spectral-loss experiment.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::channel::{apply_channel, draw_frame, modulate, ChannelConfig, Constellation};
use crate::grid::Waveform;
use crate::stochastics::tags;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// Periodic Hann, `0.5 (1 - cos(2πn/N))`.
    Hann,
}

/// Two-sided PSD in `fftshift` order (most negative frequency first).
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    pub frequencies: Vec<f64>,
    pub density: Vec<f64>,
    pub segment_length: usize,
    pub overlap: f64,
    pub segments: usize,
    pub window: Window,
}

impl PsdEstimate {
    pub fn bin_width(&self) -> f64 {
        if self.frequencies.len() < 2 {
            return 0.0;
        }
        self.frequencies[1] - self.frequencies[0]
    }

    /// `∫ S(f) df` as a Riemann sum over the bins.
    pub fn total_power(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.bin_width()
    }
}

fn hop_for(segment: usize, overlap: f64) -> usize {
    ((segment as f64 * (1.0 - overlap)).round() as usize).max(1)
}

fn segment_count(len: usize, segment: usize, overlap: f64) -> usize {
    if segment > len || segment == 0 {
        return 0;
    }
    (len - segment) / hop_for(segment, overlap) + 1
}

/// Longest segment that still yields at least `segments` Welch segments.
pub fn segment_length_for(len: usize, segments: usize, overlap: f64) -> Option<usize> {
    (1..=len)
        .rev()
        .find(|&seg| segment_count(len, seg, overlap) >= segments)
}

pub(crate) fn welch(samples: &[Complex64], dt: f64, segment: usize, overlap: f64) -> Result<PsdEstimate> {
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::InvalidParameter(format!(
            "overlap must be in [0, 1), got {overlap}"
        )));
    }
    if segment > samples.len() {
        return Err(Error::SegmentTooLong {
            segment,
            len: samples.len(),
        });
    }
    if segment < 2 {
        return Err(Error::InvalidParameter("segment length must be >= 2".into()));
    }
    let n = segment;
    let hop = hop_for(n, overlap);
    let window: Vec<f64> = (0..n)
        .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / n as f64).cos()))
        .collect();
    let window_energy: f64 = window.iter().map(|w| w * w).sum();
    let fft = FftPlanner::new().plan_fft_forward(n);

    let mut acc = vec![0.0; n];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut count = 0;
    let mut start = 0;
    while start + n <= samples.len() {
        for ((b, x), w) in buf.iter_mut().zip(&samples[start..start + n]).zip(&window) {
            *b = x * *w;
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
        count += 1;
        start += hop;
    }

    let scale = dt / (window_energy * count as f64);
    let half = n / 2;
    let df = 1.0 / (n as f64 * dt);
    let frequencies = (0..n).map(|i| (i as f64 - half as f64) * df).collect();
    let density = (0..n).map(|i| acc[(i + n - half) % n] * scale).collect();
    Ok(PsdEstimate {
        frequencies,
        density,
        segment_length: n,
        overlap,
        segments: count,
        window: Window::Hann,
    })
}

/// Averaged Hann-windowed periodogram of `y`, in energy per Hz.
pub fn psd_welch(y: &Waveform, segment: usize, overlap: f64) -> Result<PsdEstimate> {
    welch(y.samples(), y.grid().spacing(), segment, overlap)
}

#[derive(Debug, Clone)]
pub struct SpectralLossOptions {
    /// Welch segments per trial.
    pub segments: usize,
    pub overlap: f64,
    pub constellation: Constellation,
    /// In-band half-width, in units of the symbol rate `1/T`.
    pub in_band: f64,
    /// Out-of-band floor region starts here, in units of `1/T`.
    pub floor_from: f64,
}

impl Default for SpectralLossOptions {
    fn default() -> Self {
        Self {
            segments: 64,
            overlap: 0.5,
            constellation: Constellation::Finite(crate::channel::FiniteConstellation::qpsk()),
            in_band: 0.5,
            floor_from: 3.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralLoss {
    /// Estimated in-band gain, converging to `|μ_Θ|² = e^{-σ²}`.
    pub gain: f64,
    /// Out-of-band level of the channel output minus the clean signal's.
    pub floor: f64,
    pub in_band_bins: usize,
    pub floor_bins: usize,
    pub clean: PsdEstimate,
    pub noisy: PsdEstimate,
}

/// Spectral gain of the phase-noisy signal relative to the clean one.
///
/// Both PSDs are averaged over `trials` independent frames. With `I` the
/// in-band mean and `O` the out-of-band mean of each, the gain is
/// `(I_noisy - O_noisy) / (I_clean - O_clean)`: the flat floor (spread phase
/// noise power plus any AWGN) cancels in the numerator, and the clean
/// signal's own sidelobes cancel in the denominator.
pub fn spectral_loss_estimate(cfg: &ChannelConfig, trials: usize, opts: &SpectralLossOptions) -> Result<SpectralLoss> {
    if trials == 0 {
        return Err(Error::InsufficientData("at least one trial is needed".into()));
    }
    if opts.segments < 8 {
        return Err(Error::InsufficientData(format!(
            "{} Welch segments; at least 8 are needed for a stable floor",
            opts.segments
        )));
    }
    let grid = cfg.grid;
    let segment = segment_length_for(grid.len(), opts.segments, opts.overlap)
        .filter(|&s| s >= 2)
        .ok_or_else(|| {
            Error::InsufficientData(format!("{} samples cannot form {} segments", grid.len(), opts.segments))
        })?;

    let root = cfg.root_stream();
    let per_trial: Vec<(PsdEstimate, PsdEstimate)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = root.child(t);
            let frame = draw_frame(&opts.constellation, cfg.es, &grid, &s.child(tags::SYMBOLS))?;
            let x = modulate(&frame, &cfg.pulse, &grid)?;
            let y = apply_channel(&x, cfg, &s)?;
            Ok((
                psd_welch(&x, segment, opts.overlap)?,
                psd_welch(&y, segment, opts.overlap)?,
            ))
        })
        .collect::<Result<_>>()?;

    let average = |pick: fn(&(PsdEstimate, PsdEstimate)) -> &PsdEstimate| {
        let mut out = pick(&per_trial[0]).clone();
        for est in per_trial[1..].iter().map(pick) {
            out.density.iter_mut().zip(&est.density).for_each(|(a, b)| *a += b);
        }
        out.density.iter_mut().for_each(|d| *d /= trials as f64);
        out.segments *= trials;
        out
    };
    let clean = average(|p| &p.0);
    let noisy = average(|p| &p.1);

    let rate = 1.0 / grid.symbol_period();
    let in_band: Vec<usize> = (0..clean.frequencies.len())
        .filter(|&i| clean.frequencies[i].abs() <= opts.in_band * rate)
        .collect();
    let out_band: Vec<usize> = (0..clean.frequencies.len())
        .filter(|&i| clean.frequencies[i].abs() >= opts.floor_from * rate)
        .collect();
    if in_band.len() < 4 || out_band.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "{} in-band and {} floor bins; need >= 4 and >= 8 (raise T/Δ or the segment length)",
            in_band.len(),
            out_band.len()
        )));
    }
    let mean_over = |d: &[f64], idx: &[usize]| idx.iter().map(|&i| d[i]).sum::<f64>() / idx.len() as f64;
    let (ic, oc) = (
        mean_over(&clean.density, &in_band),
        mean_over(&clean.density, &out_band),
    );
    let (iy, oy) = (
        mean_over(&noisy.density, &in_band),
        mean_over(&noisy.density, &out_band),
    );
    if ic - oc <= 0.0 {
        return Err(Error::InsufficientData("clean signal has no in-band excess".into()));
    }
    Ok(SpectralLoss {
        gain: (iy - oy) / (ic - oc),
        floor: oy - oc,
        in_band_bins: in_band.len(),
        floor_bins: out_band.len(),
        clean,
        noisy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;
    use crate::stochastics::{sample_awgn, NoiseLevel, PhaseNoiseModel, RandomStream};

    #[test]
    fn tone_peak_and_parseval() {
        let g = TimeGrid::new(64.0, 4096, 1.0).unwrap();
        let dt = g.spacing();
        // f0 on a bin of a 512-sample segment: 16 / (512 Δ) Hz.
        let f0 = 16.0 / (512.0 * dt);
        let x: Vec<Complex64> = g
            .times()
            .map(|t| Complex64::from_polar(1.0, 2.0 * PI * f0 * t))
            .collect();
        let w = Waveform::new(g, x).unwrap();
        let p = psd_welch(&w, 512, 0.5).unwrap();
        let peak = (0..p.density.len())
            .max_by(|&a, &b| p.density[a].total_cmp(&p.density[b]))
            .unwrap();
        assert!((p.frequencies[peak] - f0).abs() < 1e-9);
        assert!((p.total_power() - 1.0).abs() < 0.02);
        assert_eq!(p.segments, (8192 - 512) / 256 + 1);
    }

    #[test]
    fn white_noise_is_flat_at_n0() {
        let g = TimeGrid::new(256.0, 65_536, 1.0).unwrap();
        let w = sample_awgn(&NoiseLevel::new(1.0).unwrap(), &g, &RandomStream::root(3));
        let p = psd_welch(&w, 256, 0.5).unwrap();
        // Average over 8 adjacent bins and ~1000 segments: relative spread ~1%.
        for chunk in p.density.chunks(8) {
            let level = chunk.iter().sum::<f64>() / chunk.len() as f64;
            assert!((level - 1.0).abs() < 0.05, "{level}");
        }
        assert!((p.total_power() / w.mean_power() - 1.0).abs() < 0.02);
    }

    #[test]
    fn zero_input_and_errors() {
        let g = TimeGrid::new(1.0, 64, 1.0).unwrap();
        let z = Waveform::zeros(g);
        let p = psd_welch(&z, 32, 0.5).unwrap();
        assert!(p.density.iter().all(|&d| d == 0.0));
        assert!(matches!(psd_welch(&z, 129, 0.5), Err(Error::SegmentTooLong { .. })));
        assert!(psd_welch(&z, 32, 1.0).is_err());
    }

    #[test]
    fn odd_segment_frequency_axis() {
        let g = TimeGrid::new(1.0, 8, 1.0).unwrap();
        let p = psd_welch(&Waveform::zeros(g), 5, 0.0).unwrap();
        let df = 1.0 / (5.0 * g.spacing());
        let want: Vec<f64> = [-2.0, -1.0, 0.0, 1.0, 2.0].iter().map(|k| k * df).collect();
        assert_eq!(p.frequencies, want);
    }

    #[test]
    fn segment_length_search() {
        assert_eq!(segment_length_for(32_768, 64, 0.5), Some(1008));
        assert_eq!(segment_count(32_768, 1008, 0.5), 64);
        assert_eq!(segment_count(32_768, 1009, 0.5), 63);
        assert_eq!(segment_length_for(10, 64, 0.5), None);
    }

    fn loss_cfg(sigma2: f64, n0: f64) -> ChannelConfig {
        ChannelConfig::new(
            1.0,
            NoiseLevel::new(n0).unwrap(),
            PhaseNoiseModel::wrapped_gaussian(sigma2).unwrap(),
            TimeGrid::new(256.0, 8192, 1.0).unwrap(),
            5,
        )
        .unwrap()
    }

    #[test]
    fn spectral_loss_examples() {
        let opts = SpectralLossOptions::default();
        let l = spectral_loss_estimate(&loss_cfg(0.0, 0.0), 1, &opts).unwrap();
        assert!((l.gain - 1.0).abs() < 1e-12, "{}", l.gain);
        assert!(l.floor.abs() < 1e-12);

        for sigma2 in [std::f64::consts::LN_2, 1.0] {
            let l = spectral_loss_estimate(&loss_cfg(sigma2, 0.05), 4, &opts).unwrap();
            let want = (-sigma2).exp();
            assert!((l.gain / want - 1.0).abs() < 0.05, "σ²={sigma2}: {}", l.gain);
            assert!(l.floor > 0.0);
        }
    }

    #[test]
    fn spectral_loss_insufficient_data() {
        let opts = SpectralLossOptions {
            segments: 4,
            ..Default::default()
        };
        assert!(matches!(
            spectral_loss_estimate(&loss_cfg(1.0, 0.0), 1, &opts),
            Err(Error::InsufficientData(_))
        ));
        // T/Δ = 2: no room for an out-of-band floor.
        let coarse = ChannelConfig::new(
            1.0,
            NoiseLevel::new(0.0).unwrap(),
            PhaseNoiseModel::Off,
            TimeGrid::new(2048.0, 2048, 1.0).unwrap(),
            0,
        )
        .unwrap();
        let err = spectral_loss_estimate(&coarse, 1, &SpectralLossOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)), "{err}");
        assert!(spectral_loss_estimate(&loss_cfg(1.0, 0.0), 0, &SpectralLossOptions::default()).is_err());
    }
}
