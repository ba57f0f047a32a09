use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::math::{self, PI, TAU};
use crate::{Complex, Error, Result};

/// Largest derivative / order accepted for the DOG, Gauss and Paul families.
pub const MAX_ORDER: u32 = 20;

/// Tolerance for the zero-mean and unit-energy checks done at construction.
pub const ADMISSIBILITY_TOL: f64 = 1e-6;

/// Analysing wavelet `ψ`, normalised to unit energy.
///
/// Fourier transforms use `Ψ(ω) = ∫ψ(t)e^{−iωt}dt`.
///
/// | family | `ψ(t)` | peak of `|Ψ|` |
/// |---|---|---|
/// | `Morlet{ω0}` | `c(e^{iω0t} − e^{−ω0²/2})e^{−t²/2}` | ≈ ω0 |
/// | `Dog{n}` | `−He_n(t)e^{−t²/2}/√Γ(n+½)` | √n |
/// | `Gauss{n}` | `2^{1/4}·dog_n(√2·t)`, the n-th derivative of `e^{−t²}` | √(2n) |
/// | `Paul{m}` | `∝ (1 − it)^{−(m+1)}` | m |
/// | `Shannon` | `(sin 2πt − sin πt)/(πt)` | 1.5π |
///
/// The Morlet wavelet carries the admissibility correction term, so its mean
/// is exactly zero for every `ω0`. `Dog{2}` is the Mexican hat. Shannon decays
/// like `1/t` and localises poorly in time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MotherWavelet {
    Morlet { omega0: f64 },
    Dog { order: u32 },
    Gauss { order: u32 },
    Paul { order: u32 },
    Shannon,
}

impl MotherWavelet {
    pub fn morlet(omega0: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 >= 5.0) {
            return Err(Error::Parameter(format!("morlet needs ω0 ≥ 5, got {omega0}")));
        }
        Self::Morlet { omega0 }.checked()
    }

    pub fn mexican_hat() -> Self {
        Self::Dog { order: 2 }
    }

    pub fn dog(order: u32) -> Result<Self> {
        check_order("dog", order)?;
        Self::Dog { order }.checked()
    }

    pub fn gauss(order: u32) -> Result<Self> {
        check_order("gauss", order)?;
        Self::Gauss { order }.checked()
    }

    pub fn paul(order: u32) -> Result<Self> {
        check_order("paul", order)?;
        Self::Paul { order }.checked()
    }

    pub fn shannon() -> Self {
        Self::Shannon
    }

    fn checked(self) -> Result<Self> {
        let report = self.admissibility();
        if report.mean > ADMISSIBILITY_TOL || (report.energy - 1.0).abs() > ADMISSIBILITY_TOL {
            return Err(Error::Parameter(format!(
                "{self} fails admissibility: |mean| = {:e}, energy = {}",
                report.mean, report.energy
            )));
        }
        Ok(self)
    }

    /// True when `ψ` is real-valued.
    pub fn is_real(&self) -> bool {
        matches!(self, Self::Dog { .. } | Self::Gauss { .. } | Self::Shannon)
    }

    /// Angular frequency (rad per unit of `t`) where `|Ψ|` peaks.
    pub fn peak_frequency(&self) -> f64 {
        match *self {
            Self::Morlet { omega0 } => omega0,
            Self::Dog { order } => math::sqrt(order as f64),
            Self::Gauss { order } => math::sqrt(2.0 * order as f64),
            Self::Paul { order } => order as f64,
            Self::Shannon => 1.5 * PI,
        }
    }

    /// `Ψ(ω)`.
    pub fn fourier(&self, omega: f64) -> Complex {
        match *self {
            Self::Morlet { omega0 } => {
                let c = morlet_norm(omega0);
                let kappa = math::exp(-omega0 * omega0 / 2.0);
                let d = omega - omega0;
                let v = c * math::sqrt(TAU) * (math::exp(-d * d / 2.0) - kappa * math::exp(-omega * omega / 2.0));
                Complex::new(v, 0.0)
            }
            Self::Dog { order } => dog_fourier(order, omega),
            Self::Gauss { order } => dog_fourier(order, omega / core::f64::consts::SQRT_2) / fourth_root_two(),
            Self::Paul { order } => {
                if omega <= 0.0 {
                    Complex::new(0.0, 0.0)
                } else {
                    let m = order as f64;
                    let ln_v = paul_ln_k(order) + m * math::ln(omega) - omega;
                    Complex::new(math::exp(ln_v), 0.0)
                }
            }
            Self::Shannon => {
                let w = omega.abs();
                if (PI..=2.0 * PI).contains(&w) {
                    Complex::new(1.0, 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                }
            }
        }
    }

    /// `ψ(t)`.
    pub fn psi(&self, t: f64) -> Complex {
        match *self {
            Self::Morlet { omega0 } => {
                let c = morlet_norm(omega0);
                let env = math::exp(-t * t / 2.0);
                let kappa = math::exp(-omega0 * omega0 / 2.0);
                Complex::new(c * env * (math::cos(omega0 * t) - kappa), c * env * math::sin(omega0 * t))
            }
            Self::Dog { order } => Complex::new(dog_time(order, t), 0.0),
            Self::Gauss { order } => {
                Complex::new(fourth_root_two() * dog_time(order, core::f64::consts::SQRT_2 * t), 0.0)
            }
            Self::Paul { order } => {
                // K·m!/(2π)·(1 − it)^{−(m+1)}, written in polar form.
                let m = order as f64;
                let ln_amp = paul_ln_k(order) + math::ln_gamma(m + 1.0) - math::ln(TAU)
                    - (m + 1.0) / 2.0 * math::ln(1.0 + t * t);
                let phase = (m + 1.0) * math::atan(t);
                let amp = math::exp(ln_amp);
                Complex::new(amp * math::cos(phase), amp * math::sin(phase))
            }
            Self::Shannon => {
                if t == 0.0 {
                    Complex::new(1.0, 0.0)
                } else {
                    Complex::new((math::sin(TAU * t) - math::sin(PI * t)) / (PI * t), 0.0)
                }
            }
        }
    }

    /// Zero-mean and unit-energy figures, evaluated in the frequency domain.
    ///
    /// `mean = |Ψ(0)| = |∫ψ dt|`; `energy = (1/2π)∫|Ψ|²dω = ∫|ψ|²dt` by
    /// composite Simpson quadrature over the band listed in
    /// [`MotherWavelet::energy_support`].
    pub fn admissibility(&self) -> Admissibility {
        let mean = math::cabs(self.fourier(0.0));
        let energy = match self {
            Self::Shannon => {
                2.0 * simpson(|w| self.fourier(w).norm_sqr(), PI, 2.0 * PI, 1 << 10) / TAU
            }
            _ => {
                let (lo, hi) = self.energy_support();
                simpson(|w| self.fourier(w).norm_sqr(), lo, hi, 1 << 14) / TAU
            }
        };
        Admissibility { mean, energy }
    }

    /// Frequency interval outside which `|Ψ|²` is below double precision.
    pub fn energy_support(&self) -> (f64, f64) {
        match *self {
            Self::Morlet { omega0 } => (-12.0, omega0 + 12.0),
            Self::Dog { order } => {
                let b = math::sqrt(order as f64) + 12.0;
                (-b, b)
            }
            Self::Gauss { order } => {
                let b = core::f64::consts::SQRT_2 * (math::sqrt(order as f64) + 12.0);
                (-b, b)
            }
            Self::Paul { order } => {
                let m = order as f64;
                (0.0, m + 40.0 + 10.0 * math::sqrt(m))
            }
            Self::Shannon => (-2.0 * PI, 2.0 * PI),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    /// `|∫ψ(t)dt|`.
    pub mean: f64,
    /// `∫|ψ(t)|²dt`.
    pub energy: f64,
}

fn fourth_root_two() -> f64 {
    math::sqrt(core::f64::consts::SQRT_2)
}

fn check_order(family: &str, order: u32) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::Parameter(format!("{family} order must be in 1..={MAX_ORDER}, got {order}")));
    }
    Ok(())
}

fn morlet_norm(omega0: f64) -> f64 {
    let s = 1.0 + math::exp(-omega0 * omega0) - 2.0 * math::exp(-0.75 * omega0 * omega0);
    1.0 / (math::sqrt(math::sqrt(PI)) * math::sqrt(s))
}

fn dog_norm(order: u32) -> f64 {
    1.0 / math::sqrt(math::gamma(order as f64 + 0.5))
}

/// Probabilists' Hermite polynomial `He_n(t)`.
fn hermite(order: u32, t: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, t);
    if order == 0 {
        return prev;
    }
    for k in 1..order {
        let next = t * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn dog_time(order: u32, t: f64) -> f64 {
    -hermite(order, t) * math::exp(-t * t / 2.0) * dog_norm(order)
}

fn dog_fourier(order: u32, omega: f64) -> Complex {
    // (−1)^{n+1}(iω)^n √(2π) e^{−ω²/2} / √Γ(n+½)
    let mag = math::powi(omega, order as i32) * math::sqrt(TAU) * math::exp(-omega * omega / 2.0) * dog_norm(order);
    let sign = if order % 2 == 0 { -1.0 } else { 1.0 };
    let v = sign * mag;
    match order % 4 {
        0 => Complex::new(v, 0.0),
        1 => Complex::new(0.0, v),
        2 => Complex::new(-v, 0.0),
        _ => Complex::new(0.0, -v),
    }
}

/// `ln K` with `K = √(2π·2^{2m+1}/(2m)!)`.
fn paul_ln_k(order: u32) -> f64 {
    let m = order as f64;
    0.5 * (math::ln(TAU) + (2.0 * m + 1.0) * core::f64::consts::LN_2 - math::ln_gamma(2.0 * m + 1.0))
}

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, intervals: usize) -> f64 {
    let h = (hi - lo) / intervals as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    acc * h / 3.0
}

impl fmt::Display for MotherWavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Morlet { omega0 } => write!(f, "morlet:{omega0}"),
            Self::Dog { order } => write!(f, "dog:{order}"),
            Self::Gauss { order } => write!(f, "gauss:{order}"),
            Self::Paul { order } => write!(f, "paul:{order}"),
            Self::Shannon => f.write_str("shannon"),
        }
    }
}

/// Accepts `morlet[:ω0]`, `mhat`, `dog:n`, `paul:m`, `gauss:n` and `shannon`.
impl FromStr for MotherWavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let order = |arg: Option<&str>| -> Result<u32> {
            let a = arg.ok_or_else(|| Error::Parse(format!("wavelet '{name}' needs an order")))?;
            a.parse().map_err(|_| Error::Parse(format!("bad wavelet order '{a}'")))
        };
        match (name, arg) {
            ("morlet", None) => Self::morlet(6.0),
            ("morlet", Some(a)) => {
                let w0: f64 = a.parse().map_err(|_| Error::Parse(format!("bad morlet ω0 '{a}'")))?;
                Self::morlet(w0)
            }
            ("mhat", None) => Ok(Self::mexican_hat()),
            ("dog", a) => Self::dog(order(a)?),
            ("gauss", a) => Self::gauss(order(a)?),
            ("paul", a) => Self::paul(order(a)?),
            ("shannon", None) => Ok(Self::Shannon),
            _ => Err(Error::Parse(format!("unknown wavelet '{}'", String::from(s)))),
        }
    }
}
