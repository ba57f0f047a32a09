//! Sampled time series, seeded stochastic generation and the statistics toolbox.
//!
//! Correlations use the biased (1/N), mean-removed estimator throughout so that
//! the Toeplitz matrices built from them are positive semidefinite.

use alloc::format;
use alloc::vec::Vec;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::math::{self, TAU};
use crate::spectral;
use crate::{Complex, Error, Result};

/// A uniformly sampled real time series.
///
/// Sample `i` sits at `t0 + i·dt`. Samples are non-empty and finite, `dt > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    dt: f64,
    t0: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, dt: f64, t0: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Shape("signal must contain at least one sample".into()));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Parameter(format!("sample interval must be > 0, got {dt}")));
        }
        if !t0.is_finite() {
            return Err(Error::Parameter("start time must be finite".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("sample {i} is not finite")));
        }
        Ok(Self { samples, dt, t0 })
    }

    /// A signal starting at `t = 0`.
    pub fn from_samples(samples: Vec<f64>, dt: f64) -> Result<Self> {
        Self::new(samples, dt, 0.0)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Time of sample `i`.
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// Same time axis, new values.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != self.samples.len() {
            return Err(Error::Shape(format!(
                "expected {} samples, got {}",
                self.samples.len(),
                samples.len()
            )));
        }
        Self::new(samples, self.dt, self.t0)
    }

    pub(crate) fn check_compatible(&self, other: &Signal) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::Shape(format!(
                "signal lengths differ: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        if math::abs(self.dt - other.dt) > 1e-12 * self.dt {
            return Err(Error::Shape(format!(
                "sample intervals differ: {} vs {}",
                self.dt, other.dt
            )));
        }
        Ok(())
    }
}

/// Distribution law for generated samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// Uniform on `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, stddev: f64 },
}

impl Distribution {
    fn validate(&self) -> Result<()> {
        match *self {
            Distribution::Uniform { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::Parameter("uniform bounds must be finite".into()));
                }
                // lo < hi, and the interval must be wide enough that lo + u·(hi − lo)
                // can produce more than one value.
                if !(lo < hi) || !(hi - lo > 4.0 * f64::EPSILON * math::abs(lo).max(math::abs(hi))) {
                    return Err(Error::Parameter(format!(
                        "uniform requires lo < hi with a non-degenerate width, got [{lo}, {hi})"
                    )));
                }
            }
            Distribution::Gaussian { mean, stddev } => {
                if !mean.is_finite() || !stddev.is_finite() || !(stddev > 0.0) {
                    return Err(Error::Parameter(format!(
                        "gaussian requires finite mean and stddev > 0, got ({mean}, {stddev})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Everything needed to reproduce a generated signal bit for bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StochasticSpec {
    pub distribution: Distribution,
    pub length: usize,
    pub dt: f64,
    pub seed: u64,
}

/// Generates a stochastic signal.
///
/// The generator is ChaCha20 (`rand_chacha`) seeded with
/// `ChaCha20Rng::seed_from_u64(seed)`. A uniform variate is
/// `(next_u64() >> 11) · 2⁻⁵³ ∈ [0, 1)`. Gaussian samples use the Box–Muller
/// transform on consecutive uniform pairs `(u1, u2)`, emitting
/// `r·cos(2πu2)` then `r·sin(2πu2)` with `r = √(−2 ln(1 − u1))`. All
/// transcendental functions come from `libm`, so output is identical across
/// platforms.
pub fn generate_stochastic(spec: &StochasticSpec) -> Result<Signal> {
    spec.distribution.validate()?;
    if spec.length == 0 {
        return Err(Error::Parameter("length must be at least 1".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut samples = Vec::with_capacity(spec.length);
    match spec.distribution {
        Distribution::Uniform { lo, hi } => {
            for _ in 0..spec.length {
                let u = unit_uniform(&mut rng);
                // Rounding can land exactly on hi for narrow intervals.
                let v = lo + u * (hi - lo);
                samples.push(if v < hi { v } else { lo });
            }
        }
        Distribution::Gaussian { mean, stddev } => {
            while samples.len() < spec.length {
                let u1 = unit_uniform(&mut rng);
                let u2 = unit_uniform(&mut rng);
                let r = math::sqrt(-2.0 * math::ln(1.0 - u1));
                let theta = TAU * u2;
                samples.push(mean + stddev * r * math::cos(theta));
                if samples.len() < spec.length {
                    samples.push(mean + stddev * r * math::sin(theta));
                }
            }
        }
    }
    Signal::new(samples, spec.dt, 0.0)
}

fn unit_uniform(rng: &mut ChaCha20Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub mean: f64,
    /// Population variance (divides by N).
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    pub rms: f64,
}

pub fn summary_stats(x: &Signal) -> SummaryStats {
    let s = x.samples();
    let n = s.len() as f64;
    let mean = s.iter().sum::<f64>() / n;
    let variance = s.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let rms = math::sqrt(math::hypot_sq(s) / n);
    let (min, max) = s
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    // Rounding in the mean can push it a hair outside [min, max] for constant input.
    let mean = mean.clamp(min, max);
    SummaryStats { mean, variance, min, max, rms }
}

/// Correlation values at lags `0..=K`, in units of the product of the signals.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationFunction {
    values: Vec<f64>,
    dt: f64,
}

impl CorrelationFunction {
    pub fn new(values: Vec<f64>, dt: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Shape("correlation needs at least lag 0".into()));
        }
        if !(dt > 0.0) {
            return Err(Error::Parameter("dt must be > 0".into()));
        }
        Ok(Self { values, dt })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Largest lag index `K`.
    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    pub fn lags(&self) -> impl Iterator<Item = usize> {
        0..self.values.len()
    }
}

/// Biased, mean-removed autocorrelation `R_xx(k)`, `k = 0..=max_lag`.
pub fn autocorrelation(x: &Signal, max_lag: usize) -> Result<CorrelationFunction> {
    cross_correlation(x, x, max_lag)
}

/// `R_xy(k) = (1/N) Σ_{i=0}^{N−1−k} (x_i − x̄)(y_{i+k} − ȳ)`.
pub fn cross_correlation(x: &Signal, y: &Signal, max_lag: usize) -> Result<CorrelationFunction> {
    x.check_compatible(y)?;
    let n = x.len();
    if max_lag >= n {
        return Err(Error::Range(format!("max_lag {max_lag} must be below the length {n}")));
    }
    let xm = demeaned(x.samples());
    let ym = demeaned(y.samples());
    let values = (0..=max_lag)
        .map(|k| xm[..n - k].iter().zip(&ym[k..]).map(|(a, b)| a * b).sum::<f64>() / n as f64)
        .collect();
    CorrelationFunction::new(values, x.dt())
}

fn demeaned(s: &[f64]) -> Vec<f64> {
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    s.iter().map(|v| v - mean).collect()
}

/// Window-free periodogram: `(f_k, |DFT(x)_k|²/N)` at `f_k = k/(N·dt)`, `k = 0..=N/2`.
pub fn periodogram(x: &Signal) -> Result<Vec<(f64, f64)>> {
    let n = x.len();
    if n < 2 {
        return Err(Error::Shape("periodogram needs at least 2 samples".into()));
    }
    let input: Vec<Complex> = x.samples().iter().map(|&v| Complex::new(v, 0.0)).collect();
    let spectrum = spectral::dft(&input, x.dt())?;
    let df = 1.0 / (n as f64 * x.dt());
    Ok(spectrum.bins()[..=n / 2]
        .iter()
        .enumerate()
        .map(|(k, b)| (k as f64 * df, b.norm_sqr() / n as f64))
        .collect())
}

/// One histogram bin `[lo, hi)` with its sample count (the last bin is closed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Equal-width histogram over `[min, max]` of the samples.
pub fn histogram(x: &Signal, bins: usize) -> Result<Vec<HistogramBin>> {
    if bins == 0 {
        return Err(Error::Parameter("histogram needs at least one bin".into()));
    }
    let stats = summary_stats(x);
    let (lo, hi) = if stats.max > stats.min {
        (stats.min, stats.max)
    } else {
        (stats.min - 0.5, stats.max + 0.5)
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = alloc::vec![0usize; bins];
    for &v in x.samples() {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            lo: lo + i as f64 * width,
            hi: if i + 1 == bins { hi } else { lo + (i + 1) as f64 * width },
            count,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sig(v: &[f64]) -> Signal {
        Signal::from_samples(v.to_vec(), 1.0).unwrap()
    }

    #[test]
    fn signal_invariants() {
        assert!(Signal::from_samples(vec![], 1.0).is_err());
        assert!(Signal::from_samples(vec![1.0], 0.0).is_err());
        assert!(Signal::from_samples(vec![f64::NAN], 1.0).is_err());
        let s = Signal::new(vec![0.0; 4], 0.5, 2.0).unwrap();
        assert_eq!(s.time(3), 3.5);
    }

    #[test]
    fn summary_of_constant_and_alternating() {
        let s = summary_stats(&sig(&[1.0, 1.0, 1.0, 1.0]));
        assert_eq!((s.mean, s.variance, s.rms), (1.0, 0.0, 1.0));
        let s = summary_stats(&sig(&[1.0, -1.0, 1.0, -1.0]));
        assert_eq!((s.mean, s.variance, s.rms), (0.0, 1.0, 1.0));
        assert_eq!((s.min, s.max), (-1.0, 1.0));
    }

    #[test]
    fn autocorrelation_of_constant_vanishes() {
        let r = autocorrelation(&sig(&[3.5; 16]), 5).unwrap();
        assert!(r.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn autocorrelation_alternating_hand_values() {
        // mean 0; R(0) = 4/4, R(1) = 3·(−1)/4
        let r = autocorrelation(&sig(&[1.0, -1.0, 1.0, -1.0]), 1).unwrap();
        assert_eq!(r.values(), &[1.0, -0.75]);
    }

    #[test]
    fn lag_out_of_range() {
        assert!(matches!(autocorrelation(&sig(&[1.0, 2.0]), 2), Err(Error::Range(_))));
    }

    #[test]
    fn cross_correlation_rejects_mismatch() {
        let a = sig(&[1.0, 2.0, 3.0]);
        let b = sig(&[1.0, 2.0]);
        assert!(matches!(cross_correlation(&a, &b, 0), Err(Error::Shape(_))));
        let c = Signal::from_samples(vec![1.0, 2.0, 3.0], 0.5).unwrap();
        assert!(matches!(cross_correlation(&a, &c, 0), Err(Error::Shape(_))));
    }

    #[test]
    fn periodogram_of_constant() {
        let p = periodogram(&sig(&[1.0, 1.0, 1.0, 1.0])).unwrap();
        assert_eq!(p.len(), 3);
        assert!((p[0].1 - 4.0).abs() < 1e-12);
        assert!(p[1].1.abs() < 1e-24 && p[2].1.abs() < 1e-24);
        assert_eq!(p[1].0, 0.25);
        assert!(periodogram(&sig(&[1.0])).is_err());
    }

    #[test]
    fn uniform_generation_range_and_rejections() {
        let spec = StochasticSpec {
            distribution: Distribution::Uniform { lo: 0.0, hi: 1.0 },
            length: 1,
            dt: 1.0,
            seed: 7,
        };
        let s = generate_stochastic(&spec).unwrap();
        assert_eq!(s.len(), 1);
        assert!((0.0..1.0).contains(&s.samples()[0]));

        let degenerate = StochasticSpec {
            distribution: Distribution::Uniform { lo: 5.0, hi: 5.0 + 1e-300 },
            ..spec
        };
        assert!(matches!(generate_stochastic(&degenerate), Err(Error::Parameter(_))));
        let bad = StochasticSpec {
            distribution: Distribution::Gaussian { mean: 0.0, stddev: 0.0 },
            ..spec
        };
        assert!(matches!(generate_stochastic(&bad), Err(Error::Parameter(_))));
    }

    #[test]
    fn generation_is_deterministic_in_seed() {
        let spec = StochasticSpec {
            distribution: Distribution::Gaussian { mean: 0.0, stddev: 1.0 },
            length: 257,
            dt: 1e-3,
            seed: 42,
        };
        let a = generate_stochastic(&spec).unwrap();
        let b = generate_stochastic(&spec).unwrap();
        assert_eq!(a, b);
        let c = generate_stochastic(&StochasticSpec { seed: 43, ..spec }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn histogram_counts_everything() {
        let h = histogram(&sig(&[0.0, 0.1, 0.5, 0.9, 1.0]), 2).unwrap();
        assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), 5);
        assert_eq!(h[1].hi, 1.0);
        let flat = histogram(&sig(&[2.0; 3]), 3).unwrap();
        assert_eq!(flat.iter().map(|b| b.count).sum::<usize>(), 3);
    }
}
