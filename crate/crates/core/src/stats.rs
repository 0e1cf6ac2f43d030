//! Sample statistics used by the Monte Carlo experiments.

use num_complex::Complex64;

/// Running mean and complex variance `E|z - E z|²`.
///
/// Sums are accumulated in insertion order, so feeding the same sequence
/// always produces bit-identical results.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexStats {
    count: usize,
    mean: Complex64,
    m2: f64,
}

impl ComplexStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, z: Complex64) {
        self.count += 1;
        let delta = z - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += (delta.conj() * (z - self.mean)).re;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> Complex64 {
        self.mean
    }

    /// Unbiased complex variance; zero below two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    /// Standard error of the mean, `sqrt(var / n)`.
    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

impl FromIterator<Complex64> for ComplexStats {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = Self::new();
        iter.into_iter().for_each(|z| s.push(z));
        s
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RealStats {
    count: usize,
    mean: f64,
    m2: f64,
}

impl RealStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for RealStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        iter.into_iter().for_each(|x| s.push(x));
        s
    }
}

/// Mean and batch-means standard error of a weakly dependent sequence.
///
/// The sequence is cut into consecutive batches of `batch` values (a short
/// trailing batch is dropped from the error estimate only).
pub fn batch_means(values: &[Complex64], batch: usize) -> (Complex64, f64) {
    let batch = batch.max(1);
    let total: Complex64 = values.iter().sum();
    let mean = total / values.len().max(1) as f64;
    let batches: ComplexStats = values
        .chunks_exact(batch)
        .map(|c| c.iter().sum::<Complex64>() / batch as f64)
        .collect();
    (mean, batches.stderr())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_stats_match_two_pass() {
        let z: Vec<Complex64> = (0..50)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let s: ComplexStats = z.iter().copied().collect();
        let mean = z.iter().sum::<Complex64>() / 50.0;
        let var = z.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / 49.0;
        assert!((s.mean() - mean).norm() < 1e-14);
        assert!((s.variance() - var).abs() < 1e-13);
        assert!((s.stderr() - (var / 50.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn real_stats_constant_has_zero_variance() {
        let s: RealStats = std::iter::repeat_n(3.5, 10).collect();
        assert_eq!(s.mean(), 3.5);
        assert_eq!(s.variance(), 0.0);
    }

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.0)).collect();
        assert!((log_log_slope(&x, &y) + 1.0).abs() < 1e-12);
    }
}
