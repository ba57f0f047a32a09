//! ITF identification: per-channel deconvolution in the wavelet domain, the
//! Wiener–Hopf time-domain estimate, reconstruction and restore error.
//!
//! # How a channel is deconvolved
//!
//! A channel pair `(w_x, w_y)` of length `P` is treated as periodic. The ITF
//! row is the real, `n_lags`-tap `h` minimising `‖w_y − dt·h ⊛ w_x‖²`, whose
//! normal equations form a symmetric Toeplitz system built from the
//! (Hermitian-folded) spectra
//!
//! ```text
//! num_k = (Y_k X_k* + conj(Y_{−k}) X_{−k}) / 2
//! den_k = (|X_k|² + |X_{−k}|²) / 2
//! ```
//!
//! The regularisation policy replaces `den` by `D` when forming the matrix.
//! When a prior `h̄` is supplied, the right-hand side gains
//! `dt·Toeplitz(idft(D − den))·h̄`, so floored bins pull the estimate towards
//! `h̄` rather than towards zero.
//!
//! # The ITF surface
//!
//! [`identify_itf`] runs this per scale row of the CWT. A pooled estimate
//! `h̄` is first solved from the sums of all live channels' `num` and `den`,
//! which weights every frequency by the input energy the channels carry there.
//! Each row is then solved with `h̄` as its prior. A "scaling" channel holding
//! what the wavelet rows miss (`x − icwt(cwt(x))`, low frequencies mostly) is
//! deconvolved alongside them on log grids.
//!
//! Output beyond the end of the record depends on input the record does not
//! contain. The output is extended by `n_lags − 1` samples predicted from the
//! current `h̄`, and the estimate is recomputed; three passes are made.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::signals::{CorrelationFunction, Signal};
use crate::spectral::{dft, linear_convolve, spectral_divide, to_complex_padded, ComplexSpectrum, Fft, RegularizationPolicy};
use crate::toeplitz;
use crate::wavelet::{calibrate_delta_constant, check_resolvable, padded_len, MotherWavelet, ScaleGrid};
use crate::{Complex, Error, Result};

/// Channels whose input energy is below this fraction of the strongest are dead.
pub const DEAD_CHANNEL_RATIO: f64 = 1e-12;

/// Number of estimate / extend cycles in [`identify_itf`].
pub const EXTENSION_PASSES: usize = 3;

/// `min(N/4, 512)`, at least 1.
pub fn default_lags(n: usize) -> usize {
    (n / 4).clamp(1, 512)
}

/// Transfer estimate `H_a*(ω)` of one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpectrum {
    pub scale: f64,
    pub bins: ComplexSpectrum,
}

/// `spectral_divide(dft(row_y), dft(row_x), reg)` for the channel at `scale`.
pub fn channel_transfer(
    row_y: &[Complex],
    row_x: &[Complex],
    reg: &RegularizationPolicy,
    scale: f64,
    dt: f64,
) -> Result<ChannelSpectrum> {
    let bins = spectral_divide(&dft(row_y, dt)?, &dft(row_x, dt)?, reg)?;
    Ok(ChannelSpectrum { scale, bins })
}

/// Deconvolves one channel: returns `h_{a*}(τ_j)`, `j < n_lags`, in 1/s.
///
/// Rows are taken as periodic over their length; see the module docs for the
/// estimator. Rows must hold at least `2·n_lags` samples.
pub fn channel_deconvolve(
    row_y: &[Complex],
    row_x: &[Complex],
    reg: &RegularizationPolicy,
    n_lags: usize,
    dt: f64,
) -> Result<Vec<f64>> {
    if row_y.len() != row_x.len() {
        return Err(Error::Shape(format!("channel rows differ in length: {} vs {}", row_y.len(), row_x.len())));
    }
    if n_lags == 0 {
        return Err(Error::Parameter("n_lags must be at least 1".into()));
    }
    if row_x.len() < 2 * n_lags {
        return Err(Error::InsufficientData(format!(
            "channel of {} samples cannot resolve {n_lags} lags (need {})",
            row_x.len(),
            2 * n_lags
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
    }
    let p = row_x.len();
    let fft = Fft::new(p);
    let mut xf = row_x.to_vec();
    let mut yf = row_y.to_vec();
    fft.forward(&mut xf);
    fft.forward(&mut yf);
    let mut num = vec![Complex::new(0.0, 0.0); p];
    let mut den = vec![0.0; p];
    for k in 0..p {
        let m = (p - k) % p;
        num[k] = (yf[k] * xf[k].conj() + yf[m].conj() * xf[m]) * 0.5;
        den[k] = (xf[k].norm_sqr() + xf[m].norm_sqr()) * 0.5;
    }
    solve_lags(&fft, &num, &den, reg, n_lags, dt, None)
}

fn real_head(fft: &Fft, spectrum: Vec<Complex>, n: usize) -> Vec<f64> {
    let mut buf = spectrum;
    fft.inverse(&mut buf);
    buf[..n].iter().map(|c| c.re).collect()
}

fn solve_lags(
    fft: &Fft,
    num: &[Complex],
    den: &[f64],
    reg: &RegularizationPolicy,
    n_lags: usize,
    dt: f64,
    prior: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let floored = reg.regularize_power(den);
    let mut column = real_head(fft, floored.iter().map(|&d| Complex::new(d, 0.0)).collect(), n_lags);
    for c in column.iter_mut() {
        *c *= dt;
    }
    let mut rhs = real_head(fft, num.to_vec(), n_lags);
    if let Some(prior) = prior {
        let lift: Vec<Complex> = floored.iter().zip(den).map(|(d, e)| Complex::new(d - e, 0.0)).collect();
        let mut g = real_head(fft, lift, n_lags);
        for v in g.iter_mut() {
            *v *= dt;
        }
        for (r, extra) in rhs.iter_mut().zip(toeplitz::multiply(&g, prior)) {
            *r += extra;
        }
    }
    Ok(toeplitz::solve_symmetric(&column, &rhs)?.x)
}

/// Frequency responses of every channel on one FFT grid.
///
/// Row `i` of the CWT has spectrum `X_k·G_i(ω_k)` with `G_i(ω) = √a_i·Ψ*(a_i ω)`.
/// For real records the folded channel spectra are the raw cross / auto
/// spectra times `(|G_i(ω_k)|² + |G_i(−ω_k)|²)/2`.
struct ChannelBank {
    len: usize,
    fft: Fft,
    analysis: Vec<Vec<Complex>>,
    weights: Vec<Vec<f64>>,
    synthesis: Option<Synthesis>,
}

struct Synthesis {
    /// Per-row response of the inverse CWT, Re-part included.
    rows: Vec<Vec<Complex>>,
    /// `1 − Σ rows`: what the wavelet rows fail to reconstruct.
    scaling: Vec<Complex>,
    scaling_weight: Vec<f64>,
}

impl ChannelBank {
    fn new(wavelet: &MotherWavelet, grid: &ScaleGrid, dt: f64, len: usize) -> Self {
        let fft = Fft::new(len);
        let omega = |k: usize| {
            let k = if k <= len / 2 { k as f64 } else { k as f64 - len as f64 };
            math::TAU * k / (len as f64 * dt)
        };
        let neg = |k: usize| (len - k) % len;
        let analysis: Vec<Vec<Complex>> = grid
            .scales()
            .iter()
            .map(|&a| {
                let root = math::sqrt(a);
                (0..len).map(|k| wavelet.fourier(a * omega(k)).conj() * root).collect()
            })
            .collect();
        let fold = |g: &[Complex]| -> Vec<f64> { (0..len).map(|k| (g[k].norm_sqr() + g[neg(k)].norm_sqr()) * 0.5).collect() };
        let weights = analysis.iter().map(|g| fold(g)).collect();

        let synthesis = match (grid.dj(), calibrate_delta_constant(wavelet, grid)) {
            (Some(dj), Ok(c)) => {
                let rows: Vec<Vec<Complex>> = analysis
                    .iter()
                    .zip(grid.scales())
                    .map(|(g, &a)| {
                        let f = dj / (c * math::sqrt(a)) * 0.5;
                        (0..len).map(|k| (g[k] + g[neg(k)].conj()) * f).collect()
                    })
                    .collect();
                let mut scaling = vec![Complex::new(1.0, 0.0); len];
                for row in &rows {
                    for (s, q) in scaling.iter_mut().zip(row) {
                        *s -= q;
                    }
                }
                let scaling_weight = fold(&scaling);
                Some(Synthesis { rows, scaling, scaling_weight })
            }
            _ => None,
        };
        Self { len, fft, analysis, weights, synthesis }
    }

    /// Weights of every channel, wavelet rows first, then the scaling channel.
    fn channel_weights(&self) -> Vec<&[f64]> {
        let mut all: Vec<&[f64]> = self.weights.iter().map(|w| w.as_slice()).collect();
        if let Some(s) = &self.synthesis {
            all.push(&s.scaling_weight);
        }
        all
    }

    fn spectrum(&self, samples: &[f64]) -> Vec<Complex> {
        let mut s = to_complex_padded(samples, self.len);
        self.fft.forward(&mut s);
        s
    }
}

/// Estimated ITF surface `h(a_i, τ_j)` plus the pooled single-kernel estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ItfSurface {
    wavelet: MotherWavelet,
    grid: ScaleGrid,
    dt: f64,
    reg: RegularizationPolicy,
    rows: Vec<Vec<f64>>,
    dead: Vec<bool>,
    scaling: Option<Vec<f64>>,
    average: Vec<f64>,
}

impl ItfSurface {
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        wavelet: MotherWavelet,
        grid: ScaleGrid,
        dt: f64,
        reg: RegularizationPolicy,
        rows: Vec<Vec<f64>>,
        dead: Vec<bool>,
        scaling: Option<Vec<f64>>,
        average: Vec<f64>,
    ) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
        }
        if rows.len() != grid.count() || dead.len() != grid.count() {
            return Err(Error::Shape(format!(
                "{} rows and {} dead flags for {} scales",
                rows.len(),
                dead.len(),
                grid.count()
            )));
        }
        let n = average.len();
        if n == 0
            || rows.iter().any(|r| r.len() != n)
            || scaling.as_ref().is_some_and(|s| s.len() != n)
        {
            return Err(Error::Shape("ITF rows must be non-empty and share one lag axis".into()));
        }
        if rows.iter().flatten().chain(&average).chain(scaling.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::Range("ITF surface has non-finite values".into()));
        }
        Ok(Self { wavelet, grid, dt, reg, rows, dead, scaling, average })
    }

    /// Every row (and the scaling row and average) a discrete delta `1/dt`.
    pub fn delta(wavelet: MotherWavelet, grid: ScaleGrid, dt: f64, n_lags: usize) -> Result<Self> {
        let mut d = vec![0.0; n_lags.max(1)];
        d[0] = 1.0 / dt;
        let count = grid.count();
        Self::from_parts(wavelet, grid, dt, RegularizationPolicy::default(), vec![d.clone(); count], vec![false; count], Some(d.clone()), d)
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

    pub fn reg(&self) -> RegularizationPolicy {
        self.reg
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// Flags rows whose channel carried no input energy (they are all zero).
    pub fn dead(&self) -> &[bool] {
        &self.dead
    }

    /// Row for the residual channel below the wavelet band, when one was used.
    pub fn scaling(&self) -> Option<&[f64]> {
        self.scaling.as_deref()
    }

    /// Pooled estimate over all live channels.
    pub fn average(&self) -> &[f64] {
        &self.average
    }

    pub fn n_lags(&self) -> usize {
        self.average.len()
    }

    /// Lag `τ_j` in seconds.
    pub fn lag(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    /// Largest relative L² distance of a live row from the mean live row.
    pub fn row_dispersion(&self) -> f64 {
        let live: Vec<&Vec<f64>> = self.rows.iter().zip(&self.dead).filter(|(_, d)| !**d).map(|(r, _)| r).collect();
        if live.is_empty() {
            return 0.0;
        }
        let n = self.n_lags();
        let mut mean = vec![0.0; n];
        for r in &live {
            for (m, v) in mean.iter_mut().zip(r.iter()) {
                *m += v / live.len() as f64;
            }
        }
        live.iter().map(|r| math::relative_l2(r, &mean)).fold(0.0, f64::max)
    }
}

/// Identifies the ITF surface from an input / output record pair.
///
/// `x` and `y` must share length and `dt`, and `n_lags ≤ N/2`. The scaling
/// channel is only available on log grids whose wavelet can be inverted (see
/// [`calibrate_delta_constant`]); otherwise the surface has none.
pub fn identify_itf(
    x: &Signal,
    y: &Signal,
    wavelet: &MotherWavelet,
    grid: &ScaleGrid,
    reg: &RegularizationPolicy,
    n_lags: usize,
) -> Result<ItfSurface> {
    x.check_compatible(y)?;
    check_resolvable(x, grid)?;
    let n = x.len();
    if n_lags == 0 {
        return Err(Error::Parameter("n_lags must be at least 1".into()));
    }
    if n_lags > n / 2 {
        return Err(Error::InsufficientData(format!("{n_lags} lags exceed half the record length {n}")));
    }
    let dt = x.dt();
    let bank = ChannelBank::new(wavelet, grid, dt, padded_len(n));
    let weights = bank.channel_weights();
    let xf = bank.spectrum(x.samples());
    let power: Vec<f64> = xf.iter().map(|c| c.norm_sqr()).collect();

    let energies: Vec<f64> = weights.iter().map(|w| w.iter().zip(&power).map(|(a, b)| a * b).sum()).collect();
    let peak = energies.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::InsufficientData("input carries no energy in any channel".into()));
    }
    let live: Vec<bool> = energies.iter().map(|&e| e >= DEAD_CHANNEL_RATIO * peak).collect();

    let mut pooled_weight = vec![0.0; bank.len];
    for (w, _) in weights.iter().zip(&live).filter(|(_, l)| **l) {
        for (p, v) in pooled_weight.iter_mut().zip(w.iter()) {
            *p += v;
        }
    }
    let den_of = |w: &[f64]| -> Vec<f64> { w.iter().zip(&power).map(|(a, b)| a * b).collect() };
    let pooled_den = den_of(&pooled_weight);

    let mut y_ext = y.samples().to_vec();
    let mut result = None;
    for pass in 0..EXTENSION_PASSES {
        let yf = bank.spectrum(&y_ext);
        let cross: Vec<Complex> = yf.iter().zip(&xf).map(|(a, b)| a * b.conj()).collect();
        let num_of = |w: &[f64]| -> Vec<Complex> { cross.iter().zip(w).map(|(c, v)| c * *v).collect() };

        let average = solve_lags(&bank.fft, &num_of(&pooled_weight), &pooled_den, reg, n_lags, dt, None)?;
        let mut rows = Vec::with_capacity(weights.len());
        for (w, &alive) in weights.iter().zip(&live) {
            if alive {
                rows.push(solve_lags(&bank.fft, &num_of(w), &den_of(w), reg, n_lags, dt, Some(&average))?);
            } else {
                rows.push(vec![0.0; n_lags]);
            }
        }
        if pass + 1 < EXTENSION_PASSES {
            let predicted = linear_convolve(x.samples(), &average, n + n_lags - 1);
            y_ext.truncate(n);
            y_ext.extend(predicted[n..].iter().map(|v| v * dt));
        }
        result = Some((average, rows));
    }
    let (average, mut rows) = result.expect("at least one pass");
    let scaling = if bank.synthesis.is_some() { rows.pop() } else { None };
    let dead = live[..grid.count()].iter().map(|l| !l).collect();
    ItfSurface::from_parts(*wavelet, grid.clone(), dt, *reg, rows, dead, scaling, average)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WienerHopfSolution {
    pub taps: Vec<f64>,
    /// `‖T h − r‖₂ / ‖r‖₂` of the solved Toeplitz system.
    pub residual: f64,
    pub condition: f64,
}

/// Solves `Σ_k h_k·Rxx(|j−k|)·dt = Rxy(j)` for `j < n_lags`.
pub fn wiener_hopf_identify(
    rxx: &CorrelationFunction,
    rxy: &CorrelationFunction,
    n_lags: usize,
) -> Result<WienerHopfSolution> {
    if n_lags == 0 {
        return Err(Error::Parameter("n_lags must be at least 1".into()));
    }
    if rxx.values().len() < n_lags || rxy.values().len() < n_lags {
        return Err(Error::InsufficientData(format!(
            "correlations cover {} / {} lags, {n_lags} requested",
            rxx.values().len(),
            rxy.values().len()
        )));
    }
    if (rxx.dt() - rxy.dt()).abs() > 1e-12 * rxx.dt() {
        return Err(Error::Shape("correlation sample intervals differ".into()));
    }
    if !(rxx.values()[0] > 0.0) {
        return Err(Error::InsufficientData("input autocorrelation at lag 0 must be positive".into()));
    }
    let dt = rxx.dt();
    let column: Vec<f64> = rxx.values()[..n_lags].iter().map(|v| v * dt).collect();
    let s = toeplitz::solve_symmetric(&column, &rxy.values()[..n_lags])?;
    Ok(WienerHopfSolution { taps: s.x, residual: s.residual, condition: s.condition })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReconstructionMode {
    /// Every channel filtered by its own row, then inverse CWT.
    WaveletDomain,
    /// The input convolved with the pooled average.
    TimeDomain,
}

fn check_matches(x: &Signal, itf: &ItfSurface, wavelet: &MotherWavelet, grid: &ScaleGrid) -> Result<()> {
    if !grid.matches(itf.grid()) || *wavelet != itf.wavelet() {
        return Err(Error::Shape("scale grid or wavelet does not match the ITF surface".into()));
    }
    if (x.dt() - itf.dt()).abs() > 1e-12 * itf.dt() {
        return Err(Error::Shape(format!("input dt {} differs from ITF dt {}", x.dt(), itf.dt())));
    }
    Ok(())
}

/// Predicts the output for `x` from an ITF surface.
///
/// In wavelet-domain mode each row filters its own channel,
/// `Ŵ[a_i,·] = dt·h(a_i,·) ⊛ W^X[a_i,·]`, and the inverse CWT is taken; the
/// scaling row, when present, filters the residual channel and is added.
pub fn reconstruct(
    x: &Signal,
    itf: &ItfSurface,
    wavelet: &MotherWavelet,
    grid: &ScaleGrid,
    mode: ReconstructionMode,
) -> Result<Signal> {
    check_matches(x, itf, wavelet, grid)?;
    match mode {
        ReconstructionMode::TimeDomain => crate::spectral::convolve_direct(x, itf.average()),
        ReconstructionMode::WaveletDomain => {
            check_resolvable(x, grid)?;
            let n = x.len();
            let bank = ChannelBank::new(wavelet, grid, x.dt(), padded_len(n));
            let Some(synth) = bank.synthesis.as_ref() else {
                calibrate_delta_constant(wavelet, grid)?;
                return Err(Error::UnsupportedGrid("wavelet-domain reconstruction needs a log-spaced grid".into()));
            };
            let xf = bank.spectrum(x.samples());
            let mut acc = vec![Complex::new(0.0, 0.0); bank.len];
            let mut add = |h: &[f64], response: &[Complex]| {
                let hf = bank.spectrum(h);
                for ((a, hk), q) in acc.iter_mut().zip(&hf).zip(response) {
                    *a += hk * q;
                }
            };
            for (row, q) in itf.rows().iter().zip(&synth.rows) {
                add(row, q);
            }
            if let Some(s) = itf.scaling() {
                add(s, &synth.scaling);
            }
            for (a, xk) in acc.iter_mut().zip(&xf) {
                *a *= xk * x.dt();
            }
            bank.fft.inverse(&mut acc);
            x.with_samples(acc[..n].iter().map(|c| c.re).collect())
        }
    }
}

/// Relative and RMS discrepancy between a record and its reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct RestoreReport {
    /// `‖y − ŷ‖₂/‖y‖₂`; `None` when `y` is identically zero.
    pub epsilon_rel: Option<f64>,
    /// `√(Σ(y − ŷ)²/N)`.
    pub epsilon_rms: f64,
    /// Relative error per channel, when computed by [`restore_error_per_channel`].
    pub per_channel_error: Vec<f64>,
}

pub fn restore_error(y: &Signal, y_hat: &Signal) -> Result<RestoreReport> {
    y.check_compatible(y_hat)?;
    let sq: f64 = y.samples().iter().zip(y_hat.samples()).map(|(a, b)| (a - b) * (a - b)).sum();
    let norm = math::hypot_sq(y.samples());
    let epsilon_rel = if norm > 0.0 { Some(math::sqrt(sq / norm)) } else { None };
    Ok(RestoreReport {
        epsilon_rel,
        epsilon_rms: math::sqrt(sq / y.len() as f64),
        per_channel_error: Vec::new(),
    })
}

/// For each scale, `‖W^Y − dt·h_i ⊛ W^X‖₂ / ‖W^Y‖₂` over the record.
pub fn restore_error_per_channel(x: &Signal, y: &Signal, itf: &ItfSurface) -> Result<Vec<f64>> {
    x.check_compatible(y)?;
    check_matches(x, itf, &itf.wavelet(), itf.grid())?;
    check_resolvable(x, itf.grid())?;
    let n = x.len();
    let bank = ChannelBank::new(&itf.wavelet(), itf.grid(), x.dt(), padded_len(n));
    let xf = bank.spectrum(x.samples());
    let yf = bank.spectrum(y.samples());
    let mut out = Vec::with_capacity(itf.rows().len());
    for (g, h) in bank.analysis.iter().zip(itf.rows()) {
        let hf = bank.spectrum(h);
        let mut wy: Vec<Complex> = yf.iter().zip(g).map(|(a, b)| a * b).collect();
        let mut wh: Vec<Complex> = xf.iter().zip(g).zip(&hf).map(|((a, b), c)| a * b * c * x.dt()).collect();
        bank.fft.inverse(&mut wy);
        bank.fft.inverse(&mut wh);
        let diff: f64 = wy[..n].iter().zip(&wh[..n]).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = wy[..n].iter().map(|a| a.norm_sqr()).sum();
        out.push(if den > 0.0 { math::sqrt(diff / den) } else if diff == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(out)
}
