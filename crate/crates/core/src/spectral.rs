//! Discrete Fourier transforms, convolution and regularised spectral division.
//!
//! The DFT convention is `X_k = Σ_n x_n e^{−2πikn/N}` with the `1/N` on the
//! inverse. Power-of-two lengths use an iterative radix-2 FFT; every other
//! length goes through Bluestein's chirp-z reduction, so [`dft`] is exact for
//! any `N`.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::math::{self, PI};
use crate::signals::Signal;
use crate::{Complex, Error, Result};

/// DFT bins of a signal, remembering the sample interval it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    bins: Vec<Complex>,
    dt: f64,
}

impl ComplexSpectrum {
    pub fn new(bins: Vec<Complex>, dt: f64) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::Shape("spectrum must have at least one bin".into()));
        }
        if bins.iter().any(|b| !b.re.is_finite() || !b.im.is_finite()) {
            return Err(Error::Range("spectrum contains non-finite bins".into()));
        }
        Ok(Self { bins, dt })
    }

    pub fn bins(&self) -> &[Complex] {
        &self.bins
    }

    pub fn into_bins(self) -> Vec<Complex> {
        self.bins
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Forward DFT of `x`, exact for any length ≥ 1.
pub fn dft(x: &[Complex], dt: f64) -> Result<ComplexSpectrum> {
    if x.is_empty() {
        return Err(Error::Shape("dft of an empty sequence".into()));
    }
    let mut buf = x.to_vec();
    Fft::new(x.len()).forward(&mut buf);
    ComplexSpectrum::new(buf, dt)
}

/// Inverse DFT (includes the `1/N`).
pub fn idft(s: &ComplexSpectrum) -> Vec<Complex> {
    let mut buf = s.bins.clone();
    Fft::new(buf.len()).inverse(&mut buf);
    buf
}

/// A precomputed FFT of fixed length.
pub(crate) struct Fft {
    n: usize,
    kind: FftKind,
}

enum FftKind {
    Trivial,
    Radix2 { twiddles: Vec<Complex>, bitrev: Vec<usize> },
    Bluestein { chirp: Vec<Complex>, kernel: Vec<Complex>, inner: Box<Fft> },
}

impl Fft {
    pub(crate) fn new(n: usize) -> Self {
        assert!(n > 0, "fft length must be positive");
        let kind = if n == 1 {
            FftKind::Trivial
        } else if n.is_power_of_two() {
            let twiddles = (0..n / 2)
                .map(|k| {
                    let angle = -2.0 * PI * k as f64 / n as f64;
                    Complex::new(math::cos(angle), math::sin(angle))
                })
                .collect();
            let bits = n.trailing_zeros();
            let bitrev = (0..n).map(|i| i.reverse_bits() >> (usize::BITS - bits)).collect();
            FftKind::Radix2 { twiddles, bitrev }
        } else {
            let m = (2 * n - 1).next_power_of_two();
            let two_n = 2 * n as u128;
            // w_j = e^{−iπ j²/N}; j² is reduced mod 2N to keep the angle exact.
            let chirp: Vec<Complex> = (0..n)
                .map(|j| {
                    let r = (j as u128 * j as u128) % two_n;
                    let angle = -PI * r as f64 / n as f64;
                    Complex::new(math::cos(angle), math::sin(angle))
                })
                .collect();
            let mut kernel = vec![Complex::new(0.0, 0.0); m];
            kernel[0] = chirp[0].conj();
            for j in 1..n {
                kernel[j] = chirp[j].conj();
                kernel[m - j] = chirp[j].conj();
            }
            let inner = Box::new(Fft::new(m));
            inner.forward(&mut kernel);
            FftKind::Bluestein { chirp, kernel, inner }
        };
        Self { n, kind }
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    pub(crate) fn forward(&self, buf: &mut [Complex]) {
        assert_eq!(buf.len(), self.n);
        match &self.kind {
            FftKind::Trivial => {}
            FftKind::Radix2 { twiddles, bitrev } => radix2(buf, twiddles, bitrev),
            FftKind::Bluestein { chirp, kernel, inner } => {
                let m = inner.len();
                let mut work = vec![Complex::new(0.0, 0.0); m];
                for ((w, &x), &c) in work.iter_mut().zip(buf.iter()).zip(chirp) {
                    *w = x * c;
                }
                inner.forward(&mut work);
                for (w, &k) in work.iter_mut().zip(kernel) {
                    *w *= k;
                }
                inner.inverse(&mut work);
                for ((out, &w), &c) in buf.iter_mut().zip(&work).zip(chirp) {
                    *out = w * c;
                }
            }
        }
    }

    /// Inverse transform, normalised by `1/N`.
    pub(crate) fn inverse(&self, buf: &mut [Complex]) {
        for v in buf.iter_mut() {
            *v = v.conj();
        }
        self.forward(buf);
        let scale = 1.0 / self.n as f64;
        for v in buf.iter_mut() {
            *v = v.conj() * scale;
        }
    }
}

fn radix2(buf: &mut [Complex], twiddles: &[Complex], bitrev: &[usize]) {
    let n = buf.len();
    for (i, &j) in bitrev.iter().enumerate() {
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Causal discrete convolution `y_n = dt·Σ_k h_k·x_{n−k}`, truncated to `x.len()`.
///
/// The `dt` weight makes this the Riemann sum of `∫h(τ)x(t−τ)dτ`, so a kernel
/// `[1/dt]` is the identity.
pub fn convolve_direct(x: &Signal, h: &[f64]) -> Result<Signal> {
    if h.is_empty() {
        return Err(Error::Shape("convolution kernel is empty".into()));
    }
    let xs = x.samples();
    let dt = x.dt();
    let y = (0..xs.len())
        .map(|n| {
            let kmax = n.min(h.len() - 1);
            dt * (0..=kmax).map(|k| h[k] * xs[n - k]).sum::<f64>()
        })
        .collect();
    x.with_samples(y)
}

/// Same contract as [`convolve_direct`], computed as a zero-padded
/// power-of-two FFT product.
pub fn convolve_fft(x: &Signal, h: &[f64]) -> Result<Signal> {
    if h.is_empty() {
        return Err(Error::Shape("convolution kernel is empty".into()));
    }
    let n = x.len();
    let mut y = linear_convolve(x.samples(), &h[..h.len().min(n)], n);
    for v in y.iter_mut() {
        *v *= x.dt();
    }
    x.with_samples(y)
}

/// Plain linear convolution `(a * b)[0..out_len]` via a power-of-two FFT.
pub(crate) fn linear_convolve(a: &[f64], b: &[f64], out_len: usize) -> Vec<f64> {
    let full = a.len() + b.len() - 1;
    let len = full.min(out_len);
    let m = full.next_power_of_two();
    let fft = Fft::new(m);
    let mut fa = to_complex_padded(a, m);
    let mut fb = to_complex_padded(b, m);
    fft.forward(&mut fa);
    fft.forward(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    fft.inverse(&mut fa);
    let mut out: Vec<f64> = fa[..len].iter().map(|c| c.re).collect();
    out.resize(out_len, 0.0);
    out
}

pub(crate) fn to_complex_padded(a: &[f64], m: usize) -> Vec<Complex> {
    let mut v: Vec<Complex> = a.iter().map(|&r| Complex::new(r, 0.0)).collect();
    v.resize(m, Complex::new(0.0, 0.0));
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularizationKind {
    /// Denominator power clipped from below: `max(|D|², level·max|D|²)`.
    WaterLevel,
    /// Denominator power shifted: `|D|² + level·max|D|²`.
    Tikhonov,
}

/// How near-zero input spectra are kept from blowing up a division.
///
/// `level` is relative to the peak denominator power, which makes every
/// quotient equivariant under rescaling of either spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizationPolicy {
    kind: RegularizationKind,
    level: f64,
}

impl RegularizationPolicy {
    pub fn new(kind: RegularizationKind, level: f64) -> Result<Self> {
        if !level.is_finite() || level < 0.0 {
            return Err(Error::Parameter(format!("regularization level must be ≥ 0, got {level}")));
        }
        if level == 0.0 && kind == RegularizationKind::Tikhonov {
            return Err(Error::Parameter("tikhonov regularization needs a positive level".into()));
        }
        Ok(Self { kind, level })
    }

    pub fn water_level(level: f64) -> Result<Self> {
        Self::new(RegularizationKind::WaterLevel, level)
    }

    pub fn tikhonov(level: f64) -> Result<Self> {
        Self::new(RegularizationKind::Tikhonov, level)
    }

    pub fn kind(&self) -> RegularizationKind {
        self.kind
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    /// Applies the policy to a denominator power spectrum.
    pub fn regularize_power(&self, power: &[f64]) -> Vec<f64> {
        let peak = power.iter().copied().fold(0.0, f64::max);
        let floor = self.level * peak;
        match self.kind {
            RegularizationKind::WaterLevel => power.iter().map(|&p| p.max(floor)).collect(),
            RegularizationKind::Tikhonov => power.iter().map(|&p| p + floor).collect(),
        }
    }
}

impl Default for RegularizationPolicy {
    /// Water level at `1e-3`.
    fn default() -> Self {
        Self { kind: RegularizationKind::WaterLevel, level: 1e-3 }
    }
}

impl fmt::Display for RegularizationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            RegularizationKind::WaterLevel => "water",
            RegularizationKind::Tikhonov => "tikhonov",
        };
        write!(f, "{tag}:{:e}", self.level)
    }
}

/// Parses `water:<level>` or `tikhonov:<level>`.
impl FromStr for RegularizationPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, level) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected <water|tikhonov>:<level>, got '{s}'")))?;
        let level: f64 = level
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad regularization level '{level}'")))?;
        match tag.trim() {
            "water" => Self::water_level(level),
            "tikhonov" => Self::tikhonov(level),
            other => Err(Error::Parse(format!("unknown regularization '{other}'"))),
        }
    }
}

/// Regularised quotient `num / den`, bin by bin.
///
/// `H_k = num_k·conj(den_k) / P_k` where `P` is `|den|²` after the policy is
/// applied. With water level 0 and a nowhere-zero `den` this is exact division.
pub fn spectral_divide(
    num: &ComplexSpectrum,
    den: &ComplexSpectrum,
    reg: &RegularizationPolicy,
) -> Result<ComplexSpectrum> {
    if num.len() != den.len() {
        return Err(Error::Shape(format!(
            "bin counts differ: {} vs {}",
            num.len(),
            den.len()
        )));
    }
    let power: Vec<f64> = den.bins.iter().map(|d| d.norm_sqr()).collect();
    let floored = reg.regularize_power(&power);
    let mut out = Vec::with_capacity(num.len());
    for (k, ((n, d), p)) in num.bins.iter().zip(&den.bins).zip(&floored).enumerate() {
        if *p == 0.0 {
            return Err(Error::Range(format!("denominator vanishes at bin {k}")));
        }
        out.push(n * d.conj() / *p);
    }
    ComplexSpectrum::new(out, num.dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn close(a: &[Complex], b: &[Complex], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn dft_small_cases() {
        let s = dft(&[c(1.0); 4], 1.0).unwrap();
        assert!(close(s.bins(), &[c(4.0), c(0.0), c(0.0), c(0.0)], 1e-12));
        let s = dft(&[c(1.0), c(-1.0), c(1.0), c(-1.0)], 1.0).unwrap();
        assert!(close(s.bins(), &[c(0.0), c(0.0), c(4.0), c(0.0)], 1e-12));
        assert!(dft(&[], 1.0).is_err());
    }

    #[test]
    fn bluestein_handles_odd_lengths() {
        for n in [1usize, 3, 5, 6, 7, 12, 15] {
            let x: Vec<Complex> = (0..n).map(|i| Complex::new(i as f64, -(i as f64) * 0.5)).collect();
            let s = dft(&x, 1.0).unwrap();
            let back = idft(&s);
            assert!(close(&back, &x, 1e-12), "n = {n}");
        }
    }

    #[test]
    fn convolution_hand_cases() {
        let x = Signal::from_samples(vec![1.0, 1.0], 1.0).unwrap();
        let y = convolve_direct(&x, &[1.0, 1.0]).unwrap();
        assert_eq!(y.samples(), &[1.0, 2.0]);
        let x = Signal::from_samples(vec![0.3, -1.2, 4.0], 0.25).unwrap();
        let y = convolve_direct(&x, &[4.0]).unwrap();
        assert_eq!(y.samples(), x.samples());
        assert!(convolve_direct(&x, &[]).is_err());
        assert!(convolve_fft(&x, &[]).is_err());
        let z = convolve_fft(&x, &[0.0, 0.0]).unwrap();
        assert!(z.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn regularization_parsing_and_validation() {
        let r: RegularizationPolicy = "water:1e-3".parse().unwrap();
        assert_eq!(r, RegularizationPolicy::default());
        let t: RegularizationPolicy = "tikhonov:0.5".parse().unwrap();
        assert_eq!(t.kind(), RegularizationKind::Tikhonov);
        assert!("tikhonov:0".parse::<RegularizationPolicy>().is_err());
        assert!("water:-1".parse::<RegularizationPolicy>().is_err());
        assert!("median:1".parse::<RegularizationPolicy>().is_err());
        assert!(RegularizationPolicy::water_level(0.0).is_ok());
        let again: RegularizationPolicy = r.to_string().parse().unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn divide_identity_and_gain() {
        let den = ComplexSpectrum::new(vec![c(1.0), Complex::new(0.5, -2.0), c(-3.0)], 1.0).unwrap();
        let exact = RegularizationPolicy::water_level(0.0).unwrap();
        let ones = spectral_divide(&den, &den, &exact).unwrap();
        assert!(close(ones.bins(), &[c(1.0); 3], 1e-14));
        let num = ComplexSpectrum::new(den.bins().iter().map(|b| b * 2.5).collect(), 1.0).unwrap();
        let tiny = RegularizationPolicy::water_level(1e-9).unwrap();
        let g = spectral_divide(&num, &den, &tiny).unwrap();
        assert!(close(g.bins(), &[c(2.5); 3], 1e-12));
        let short = ComplexSpectrum::new(vec![c(1.0)], 1.0).unwrap();
        assert!(matches!(spectral_divide(&short, &den, &exact), Err(Error::Shape(_))));
        let zero = ComplexSpectrum::new(vec![c(0.0), c(1.0), c(1.0)], 1.0).unwrap();
        assert!(spectral_divide(&den, &zero, &exact).is_err());
    }
}
