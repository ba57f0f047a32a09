//! Synthetic test systems: LTI blocks, static nonlinearities, Hammerstein and
//! Wiener cascades, and the four-bit ⟨αβγδ⟩ classification.
//!
//! # Model strings
//!
//! ```text
//! fo:T=<s>[,gain=<g>]                      first-order lag
//! so:wn=<rad/s>,zeta=<ζ>[,gain=<g>]        second-order resonance
//! hammerstein:<nl>|<lti>                   nl then lti
//! wiener:<nl>|<lti>                        lti then nl
//! nl := id | sat=<limit> | cubic=<c1>,<c3> | deadzone=<width>
//! ```

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::math;
use crate::signals::Signal;
use crate::spectral::{convolve_direct, convolve_fft};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lti {
    /// `h(t) = (gain/T)·e^{−t/T}`.
    FirstOrder { time_constant: f64, gain: f64 },
    /// `gain·ω_n²/(s² + 2ζω_n s + ω_n²)`.
    SecondOrder { omega_n: f64, zeta: f64, gain: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    Identity,
    /// Clamp to `[−limit, limit]`.
    Saturation { limit: f64 },
    /// `c1·x + c3·x³`.
    Cubic { c1: f64, c3: f64 },
    /// Zero inside `[−width, width]`, shifted identity outside.
    Deadzone { width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemModel {
    Lti(Lti),
    /// `y = lti(nl(x))`.
    Hammerstein { nonlinearity: Nonlinearity, lti: Lti },
    /// `y = nl(lti(x))`.
    Wiener { lti: Lti, nonlinearity: Nonlinearity },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Deterministic,
    Stochastic,
}

/// ⟨α β γ δ⟩: dynamic, stochastic, nonlinear, discrete.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemClass {
    pub alpha: bool,
    pub beta: bool,
    pub gamma: bool,
    pub delta: bool,
}

impl fmt::Display for SystemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = |v: bool| if v { 1 } else { 0 };
        write!(f, "<{}{}{}{}>", b(self.alpha), b(self.beta), b(self.gamma), b(self.delta))
    }
}

impl Lti {
    pub fn first_order(time_constant: f64, gain: f64) -> Result<Self> {
        if !(time_constant.is_finite() && time_constant > 0.0) {
            return Err(Error::Parameter(format!("time constant must be positive, got {time_constant}")));
        }
        check_finite("gain", gain)?;
        Ok(Self::FirstOrder { time_constant, gain })
    }

    pub fn second_order(omega_n: f64, zeta: f64, gain: f64) -> Result<Self> {
        if !(omega_n.is_finite() && omega_n > 0.0) {
            return Err(Error::Parameter(format!("ω_n must be positive, got {omega_n}")));
        }
        if !(zeta.is_finite() && zeta > 0.0) {
            return Err(Error::Parameter(format!("ζ must be positive, got {zeta}")));
        }
        check_finite("gain", gain)?;
        Ok(Self::SecondOrder { omega_n, zeta, gain })
    }

    /// Sampled analytic impulse response `h(k·dt)`.
    pub fn impulse_response(&self, n_lags: usize, dt: f64) -> Vec<f64> {
        (0..n_lags).map(|k| self.h(k as f64 * dt)).collect()
    }

    fn h(&self, t: f64) -> f64 {
        match *self {
            Self::FirstOrder { time_constant, gain } => gain / time_constant * math::exp(-t / time_constant),
            Self::SecondOrder { omega_n, zeta, gain } => {
                if zeta < 1.0 {
                    let root = math::sqrt(1.0 - zeta * zeta);
                    gain * omega_n / root * math::exp(-zeta * omega_n * t) * math::sin(omega_n * root * t)
                } else if zeta == 1.0 {
                    gain * omega_n * omega_n * t * math::exp(-omega_n * t)
                } else {
                    let root = math::sqrt(zeta * zeta - 1.0);
                    let slow = omega_n * (zeta - root);
                    let fast = omega_n * (zeta + root);
                    gain * omega_n / (2.0 * root) * (math::exp(-slow * t) - math::exp(-fast * t))
                }
            }
        }
    }

    /// Slowest decay rate of the impulse response, 1/s.
    fn decay_rate(&self) -> f64 {
        match *self {
            Self::FirstOrder { time_constant, .. } => 1.0 / time_constant,
            Self::SecondOrder { omega_n, zeta, .. } => {
                if zeta < 1.0 {
                    zeta * omega_n
                } else if zeta == 1.0 {
                    omega_n / 2.0
                } else {
                    omega_n * (zeta - math::sqrt(zeta * zeta - 1.0))
                }
            }
        }
    }

    fn check_discretization(&self, dt: f64) -> Result<()> {
        match *self {
            Self::FirstOrder { time_constant, .. } if dt / time_constant >= 0.5 => Err(Error::Discretization(
                format!("dt/T = {} must stay below 0.5", dt / time_constant),
            )),
            Self::SecondOrder { omega_n, .. } if omega_n * dt >= 0.5 => Err(Error::Discretization(format!(
                "ω_n·dt = {} must stay below 0.5",
                omega_n * dt
            ))),
            _ => Ok(()),
        }
    }

    fn apply(&self, x: &Signal) -> Result<Signal> {
        self.check_discretization(x.dt())?;
        // Length at which the envelope has fallen by 1e−16.
        let tail = math::ceil(37.0 / (self.decay_rate() * x.dt())) as usize + 2;
        let h = self.impulse_response(tail.min(x.len()), x.dt());
        if x.len() * h.len() > 1 << 22 {
            convolve_fft(x, &h)
        } else {
            convolve_direct(x, &h)
        }
    }
}

impl Nonlinearity {
    pub fn saturation(limit: f64) -> Result<Self> {
        if !(limit.is_finite() && limit > 0.0) {
            return Err(Error::Parameter(format!("saturation limit must be positive, got {limit}")));
        }
        Ok(Self::Saturation { limit })
    }

    pub fn cubic(c1: f64, c3: f64) -> Result<Self> {
        check_finite("c1", c1)?;
        check_finite("c3", c3)?;
        Ok(Self::Cubic { c1, c3 })
    }

    pub fn deadzone(width: f64) -> Result<Self> {
        if !(width.is_finite() && width >= 0.0) {
            return Err(Error::Parameter(format!("deadzone width must be ≥ 0, got {width}")));
        }
        Ok(Self::Deadzone { width })
    }

    pub fn eval(&self, v: f64) -> f64 {
        match *self {
            Self::Identity => v,
            Self::Saturation { limit } => v.clamp(-limit, limit),
            Self::Cubic { c1, c3 } => c1 * v + c3 * v * v * v,
            Self::Deadzone { width } => {
                if v > width {
                    v - width
                } else if v < -width {
                    v + width
                } else {
                    0.0
                }
            }
        }
    }

    fn apply(&self, x: &Signal) -> Result<Signal> {
        x.with_samples(x.samples().iter().map(|&v| self.eval(v)).collect())
    }
}

impl SystemModel {
    pub fn lti(&self) -> Lti {
        match *self {
            Self::Lti(l) | Self::Hammerstein { lti: l, .. } | Self::Wiener { lti: l, .. } => l,
        }
    }

    pub fn nonlinearity(&self) -> Nonlinearity {
        match *self {
            Self::Lti(_) => Nonlinearity::Identity,
            Self::Hammerstein { nonlinearity, .. } | Self::Wiener { nonlinearity, .. } => nonlinearity,
        }
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be finite, got {v}")))
    }
}

/// Runs `x` through the model.
///
/// LTI blocks convolve with the sampled analytic impulse response, truncated
/// once its envelope has decayed below `1e−16`. Second-order blocks need
/// `ω_n·dt < 0.5` and first-order blocks `dt/T < 0.5`.
pub fn simulate(model: &SystemModel, x: &Signal) -> Result<Signal> {
    match model {
        SystemModel::Lti(l) => l.apply(x),
        SystemModel::Hammerstein { nonlinearity, lti } => lti.apply(&nonlinearity.apply(x)?),
        SystemModel::Wiener { lti, nonlinearity } => nonlinearity.apply(&lti.apply(x)?),
    }
}

/// Impulse response of an LTI model; cascades are refused.
pub fn impulse_response(model: &SystemModel, n_lags: usize, dt: f64) -> Result<Vec<f64>> {
    match model {
        SystemModel::Lti(l) => Ok(l.impulse_response(n_lags, dt)),
        _ => Err(Error::Unsupported("impulse response is only defined for LTI models".into())),
    }
}

pub fn classify(model: &SystemModel, input: InputKind) -> SystemClass {
    SystemClass {
        alpha: true,
        beta: input == InputKind::Stochastic,
        gamma: model.nonlinearity() != Nonlinearity::Identity,
        delta: true,
    }
}

fn parse_params(body: &str) -> Result<Vec<(&str, f64)>> {
    body.split(',')
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{kv}'")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("bad number '{v}'")))?;
            Ok((k.trim(), v))
        })
        .collect()
}

impl FromStr for Lti {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected fo:... or so:..., got '{s}'")))?;
        let params = parse_params(body)?;
        let get = |name: &str, default: Option<f64>| -> Result<f64> {
            params
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| *v)
                .or(default)
                .ok_or_else(|| Error::Parse(format!("missing parameter '{name}' in '{s}'")))
        };
        let allowed: &[&str] = match kind.trim() {
            "fo" => &["T", "gain"],
            "so" => &["wn", "zeta", "gain"],
            other => return Err(Error::Parse(format!("unknown LTI block '{other}'"))),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(Error::Parse(format!("unknown parameter '{k}' in '{s}'")));
        }
        match kind.trim() {
            "fo" => Lti::first_order(get("T", None)?, get("gain", Some(1.0))?),
            _ => Lti::second_order(get("wn", None)?, get("zeta", None)?, get("gain", Some(1.0))?),
        }
    }
}

impl FromStr for Nonlinearity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "id" {
            return Ok(Self::Identity);
        }
        let (name, args) = s
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("unknown nonlinearity '{s}'")))?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|a| a.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{a}'"))))
            .collect::<Result<_>>()?;
        match (name.trim(), nums.as_slice()) {
            ("sat", [l]) => Self::saturation(*l),
            ("cubic", [c1, c3]) => Self::cubic(*c1, *c3),
            ("deadzone", [w]) => Self::deadzone(*w),
            _ => Err(Error::Parse(format!("unknown nonlinearity '{s}'"))),
        }
    }
}

impl FromStr for SystemModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let cascade = |rest: &str| -> Result<(Nonlinearity, Lti)> {
            let (nl, lti) = rest
                .split_once('|')
                .ok_or_else(|| Error::Parse(format!("expected <nonlinearity>|<lti>, got '{rest}'")))?;
            Ok((nl.parse()?, lti.parse()?))
        };
        if let Some(rest) = s.strip_prefix("hammerstein:") {
            let (nonlinearity, lti) = cascade(rest)?;
            Ok(Self::Hammerstein { nonlinearity, lti })
        } else if let Some(rest) = s.strip_prefix("wiener:") {
            let (nonlinearity, lti) = cascade(rest)?;
            Ok(Self::Wiener { lti, nonlinearity })
        } else {
            Ok(Self::Lti(s.parse()?))
        }
    }
}

impl fmt::Display for Lti {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FirstOrder { time_constant, gain } => write!(f, "fo:T={time_constant},gain={gain}"),
            Self::SecondOrder { omega_n, zeta, gain } => write!(f, "so:wn={omega_n},zeta={zeta},gain={gain}"),
        }
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => f.write_str("id"),
            Self::Saturation { limit } => write!(f, "sat={limit}"),
            Self::Cubic { c1, c3 } => write!(f, "cubic={c1},{c3}"),
            Self::Deadzone { width } => write!(f, "deadzone={width}"),
        }
    }
}

impl fmt::Display for SystemModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lti(l) => write!(f, "{l}"),
            Self::Hammerstein { nonlinearity, lti } => write!(f, "hammerstein:{nonlinearity}|{lti}"),
            Self::Wiener { lti, nonlinearity } => write!(f, "wiener:{nonlinearity}|{lti}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn first_order_closed_form() {
        let h = Lti::first_order(1.0, 1.0).unwrap().impulse_response(101, 0.01);
        assert_eq!(h[0], 1.0);
        assert!((h[100] - math::exp(-1.0)).abs() < 1e-15);
        let z = Lti::first_order(1.0, 0.0).unwrap().impulse_response(50, 0.01);
        assert!(z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn second_order_branches_are_continuous_in_zeta() {
        let dt = 1e-3;
        let crit = Lti::second_order(40.0, 1.0, 1.0).unwrap().impulse_response(200, dt);
        let under = Lti::second_order(40.0, 1.0 - 1e-7, 1.0).unwrap().impulse_response(200, dt);
        let over = Lti::second_order(40.0, 1.0 + 1e-7, 1.0).unwrap().impulse_response(200, dt);
        for k in 0..200 {
            assert!((crit[k] - under[k]).abs() < 1e-4 && (crit[k] - over[k]).abs() < 1e-4, "k = {k}");
        }
    }

    #[test]
    fn coarse_sampling_is_refused() {
        let x = Signal::from_samples(vec![1.0; 16], 0.02).unwrap();
        let so: SystemModel = "so:wn=50,zeta=0.2".parse().unwrap();
        assert!(matches!(simulate(&so, &x), Err(Error::Discretization(_))));
        let fo: SystemModel = "fo:T=0.03".parse().unwrap();
        assert!(matches!(simulate(&fo, &x), Err(Error::Discretization(_))));
    }

    #[test]
    fn classification_examples() {
        let so: SystemModel = "so:wn=50,zeta=0.2,gain=1".parse().unwrap();
        assert_eq!(classify(&so, InputKind::Deterministic).to_string(), "<1001>");
        let fo: SystemModel = "fo:T=0.05,gain=2".parse().unwrap();
        assert_eq!(classify(&fo, InputKind::Stochastic).to_string(), "<1101>");
        let ham: SystemModel = "hammerstein:cubic=1,0.5|fo:T=0.05".parse().unwrap();
        assert_eq!(classify(&ham, InputKind::Stochastic).to_string(), "<1111>");
        let plain: SystemModel = "wiener:id|so:wn=10,zeta=0.7".parse().unwrap();
        assert!(!classify(&plain, InputKind::Stochastic).gamma);
    }

    #[test]
    fn model_strings_round_trip() {
        for s in [
            "fo:T=0.05,gain=2",
            "so:wn=50,zeta=0.2,gain=1",
            "hammerstein:sat=0.8|fo:T=0.05,gain=2",
            "wiener:cubic=1,0.5|so:wn=50,zeta=0.2,gain=1",
            "hammerstein:deadzone=0.1|so:wn=5,zeta=2,gain=-1",
            "wiener:id|fo:T=1,gain=1",
        ] {
            let m: SystemModel = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        for bad in ["", "fo", "fo:gain=2", "so:wn=50", "fo:T=0.1,tau=2", "hammerstein:sat=1", "wiener:sat=-1|fo:T=1", "xx:T=1"] {
            assert!(bad.parse::<SystemModel>().is_err(), "{bad}");
        }
    }

    #[test]
    fn nonlinearities() {
        let d = Nonlinearity::deadzone(0.5).unwrap();
        assert_eq!([d.eval(0.2), d.eval(1.0), d.eval(-2.0)], [0.0, 0.5, -1.5]);
        let s = Nonlinearity::saturation(1.0).unwrap();
        assert_eq!([s.eval(0.3), s.eval(4.0), s.eval(-4.0)], [0.3, 1.0, -1.0]);
        assert_eq!(Nonlinearity::cubic(1.0, 0.5).unwrap().eval(2.0), 6.0);
        assert!(impulse_response(&SystemModel::Hammerstein { nonlinearity: s, lti: Lti::first_order(1.0, 1.0).unwrap() }, 4, 0.1).is_err());
    }
}
