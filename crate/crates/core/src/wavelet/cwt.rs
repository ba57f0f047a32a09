use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{MotherWavelet, ScaleGrid};
use crate::math::{self, TAU};
use crate::signals::Signal;
use crate::spectral::{to_complex_padded, Fft};
use crate::{Complex, Error, Result};

/// Coefficients `W[a_i, b_n]`; row `i` is the channel at scale `a_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSurface {
    wavelet: MotherWavelet,
    grid: ScaleGrid,
    dt: f64,
    t0: f64,
    rows: Vec<Vec<Complex>>,
}

impl CoefficientSurface {
    pub fn from_parts(wavelet: MotherWavelet, grid: ScaleGrid, dt: f64, t0: f64, rows: Vec<Vec<Complex>>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
        }
        if rows.len() != grid.count() {
            return Err(Error::Shape(format!("{} rows for {} scales", rows.len(), grid.count())));
        }
        let n = rows[0].len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("coefficient rows must be non-empty and of equal length".into()));
        }
        if rows.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Range("coefficient surface has non-finite values".into()));
        }
        Ok(Self { wavelet, grid, dt, t0, rows })
    }

    pub fn wavelet(&self) -> MotherWavelet {
        self.wavelet
    }

    pub fn grid(&self) -> &ScaleGrid {
        &self.grid
    }

    pub fn scales(&self) -> &[f64] {
        self.grid.scales()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn rows(&self) -> &[Vec<Complex>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Complex] {
        &self.rows[i]
    }

    pub fn n_scales(&self) -> usize {
        self.rows.len()
    }

    pub fn n_translations(&self) -> usize {
        self.rows[0].len()
    }

    /// Translation `b_n` in seconds.
    pub fn translation(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.dt
    }

    /// Cone-of-influence margin for row `i`, in samples: `⌈4·a_i/dt⌉`.
    pub fn coi_margin(&self, i: usize) -> usize {
        math::ceil(4.0 * self.grid.scales()[i] / self.dt) as usize
    }

    pub fn max_abs(&self) -> f64 {
        self.rows.iter().flatten().map(|&c| math::cabs(c)).fold(0.0, f64::max)
    }

    /// `|W|` per row, bit-identical on every target.
    pub fn magnitudes(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.iter().map(|&c| math::cabs(c)).collect()).collect()
    }
}

/// FFT length used for a record of `n` samples: the power of two ≥ `2n`.
pub(crate) fn padded_len(n: usize) -> usize {
    (2 * n).next_power_of_two()
}

/// Continuous wavelet transform `W[a,b] = a^{−1/2}∫x(t)ψ*((t−b)/a)dt`.
///
/// Each row is evaluated as `IFFT(FFT(x)·√a·Ψ*(aω))` on a zero-padded
/// power-of-two grid of at least `2N` points, then cut back to `N` columns.
/// The discrete coefficients approximate the integral with the `dt` weight
/// absorbed by the FFT pair, so `W` carries the units of `x·√s`.
pub fn cwt(x: &Signal, wavelet: &MotherWavelet, grid: &ScaleGrid) -> Result<CoefficientSurface> {
    check_resolvable(x, grid)?;
    let n = x.len();
    let rows = transform(x.samples(), x.dt(), wavelet, grid.scales(), padded_len(n))
        .into_iter()
        .map(|mut r| {
            r.truncate(n);
            r
        })
        .collect();
    CoefficientSurface::from_parts(*wavelet, grid.clone(), x.dt(), x.t0(), rows)
}

pub(crate) fn check_resolvable(x: &Signal, grid: &ScaleGrid) -> Result<()> {
    if x.len() < 8 {
        return Err(Error::Shape(format!("cwt needs at least 8 samples, got {}", x.len())));
    }
    let limit = 2.0 * x.dt();
    if grid.a_min() < limit * (1.0 - 1e-12) {
        return Err(Error::Resolution { scale: grid.a_min(), limit });
    }
    Ok(())
}

/// Full circular rows of length `len` (no truncation).
pub(crate) fn transform(samples: &[f64], dt: f64, wavelet: &MotherWavelet, scales: &[f64], len: usize) -> Vec<Vec<Complex>> {
    let fft = Fft::new(len);
    let mut spectrum = to_complex_padded(samples, len);
    fft.forward(&mut spectrum);
    let omegas: Vec<f64> = (0..len)
        .map(|k| {
            let k = if k <= len / 2 { k as f64 } else { k as f64 - len as f64 };
            TAU * k / (len as f64 * dt)
        })
        .collect();
    scales
        .iter()
        .map(|&a| {
            let root = math::sqrt(a);
            let mut row: Vec<Complex> = spectrum
                .iter()
                .zip(&omegas)
                .map(|(s, &w)| s * wavelet.fourier(a * w).conj() * root)
                .collect();
            fft.inverse(&mut row);
            row
        })
        .collect()
}

/// `(δj/C_δ)·Σ_i Re W[a_i,·]/√a_i`.
pub(crate) fn sum_over_scales(rows: &[Vec<Complex>], scales: &[f64], dj: f64, c_delta: f64) -> Vec<f64> {
    let n = rows[0].len();
    let mut out = vec![0.0; n];
    for (row, &a) in rows.iter().zip(scales) {
        let w = 1.0 / math::sqrt(a);
        for (o, c) in out.iter_mut().zip(row) {
            *o += c.re * w;
        }
    }
    let k = dj / c_delta;
    for o in out.iter_mut() {
        *o *= k;
    }
    out
}

/// Reconstruction constant `C_δ` for the sum-over-scales inverse.
///
/// `C_δ` is set so that the inverse reproduces a unit cosine at the
/// geometric centre of the grid, `ω_c = ω_peak/√(a_min·a_max)`:
///
/// `C_δ = (δj/2)·Σ_i Re[Ψ(a_i ω_c) + Ψ(−a_i ω_c)]`.
///
/// Wavelets whose `Ψ` is purely imaginary (odd DOG / Gauss orders) give zero
/// and are rejected, as is any grid that misses the wavelet's band.
pub fn calibrate_delta_constant(wavelet: &MotherWavelet, grid: &ScaleGrid) -> Result<f64> {
    let dj = grid
        .dj()
        .ok_or_else(|| Error::UnsupportedGrid("sum-over-scales reconstruction needs a log-spaced grid".into()))?;
    let omega_c = wavelet.peak_frequency() / math::sqrt(grid.a_min() * grid.a_max());
    let sum: f64 = grid
        .scales()
        .iter()
        .map(|&a| (wavelet.fourier(a * omega_c) + wavelet.fourier(-a * omega_c)).re)
        .sum();
    let c = dj / 2.0 * sum;
    if !(c > 1e-12) {
        return Err(Error::Calibration(format!(
            "reconstruction constant for {wavelet} is {c:e}; the wavelet or grid cannot be inverted"
        )));
    }
    Ok(c)
}

/// Inverse CWT by summation over scales (log grids only).
pub fn icwt(surface: &CoefficientSurface) -> Result<Signal> {
    let grid = surface.grid();
    let c = calibrate_delta_constant(&surface.wavelet(), grid)?;
    let dj = grid.dj().ok_or_else(|| Error::UnsupportedGrid("log-spaced grid required".into()))?;
    let x = sum_over_scales(surface.rows(), grid.scales(), dj, c);
    Signal::new(x, surface.dt(), surface.t0())
}

/// Largest `|W_delayed[a,b] − W[a,b−τ]|` over the interior of every row.
///
/// `x` is delayed by prepending `τ` zeros; the reference is `x` followed by
/// `τ` zeros, so both records have the same length and share the FFT grid.
/// Columns within `⌈4a/dt⌉` of either end are excluded.
pub fn shift_check(x: &Signal, wavelet: &MotherWavelet, grid: &ScaleGrid, tau: usize) -> Result<f64> {
    if tau >= x.len().div_ceil(4) && tau != 0 {
        return Err(Error::Range(format!("shift {tau} must be below N/4 = {}", x.len() / 4)));
    }
    let n = x.len() + tau;
    let mut delayed = vec![0.0; tau];
    delayed.extend_from_slice(x.samples());
    let mut reference = x.samples().to_vec();
    reference.resize(n, 0.0);
    let wd = cwt(&Signal::new(delayed, x.dt(), x.t0())?, wavelet, grid)?;
    let wr = cwt(&Signal::new(reference, x.dt(), x.t0())?, wavelet, grid)?;
    let mut worst: f64 = 0.0;
    for i in 0..grid.count() {
        let m = wd.coi_margin(i);
        let lo = tau + m;
        let hi = n.saturating_sub(m);
        for b in lo..hi {
            worst = worst.max(math::cabs(wd.row(i)[b] - wr.row(i)[b - tau]));
        }
    }
    Ok(worst)
}
