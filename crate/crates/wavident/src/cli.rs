//! Batch command-line front end.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use wavident_core::identify::{
    default_lags, identify_itf, reconstruct, restore_error, ItfSurface, ReconstructionMode,
};
use wavident_core::signals::{
    autocorrelation, cross_correlation, generate_stochastic, histogram, periodogram, summary_stats, Distribution,
    Signal, StochasticSpec,
};
use wavident_core::spectral::RegularizationPolicy;
use wavident_core::systems::{simulate, SystemModel};
use wavident_core::wavelet::{cwt, MotherWavelet, ScaleGrid};

use crate::config::Config;
use crate::g17::g17;
use crate::pixmap::render_heatmap;
use crate::surface::{itf_to_string, read_surface, wcs_to_string, SurfaceFile};
use crate::{csv, FormatError};

const MODEL_HELP: &str = "\
Model mini-language (--model):
  fo:T=<s>[,gain=<g>]                first-order lag, h(t) = (g/T)·e^(-t/T)
  so:wn=<rad/s>,zeta=<z>[,gain=<g>]  second-order system, unit DC gain times g
  hammerstein:<nl>|<lti>             static nonlinearity, then the LTI block
  wiener:<nl>|<lti>                  LTI block, then static nonlinearity
  <nl> = id | sat=<limit> | cubic=<c1>,<c3> | deadzone=<width>

Config file (--config): one 'key = value' per line, '#' comments. Keys: dist, n,
dt, seed, model, wavelet, scales, reg, lags, mode, bins. Flags take precedence.

Exit status: 0 success, 1 usage or input error, 2 numerical failure.";

#[derive(Parser, Debug)]
#[command(name = "wavident", version, about = "Wavelet-channel system identification", after_help = MODEL_HELP)]
struct Cli {
    /// Flat key = value file supplying defaults for flags.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random signal CSV.
    Gen {
        /// gauss:<mean>,<stddev> or uniform:<lo>,<hi> [default: gauss:0,1]
        #[arg(long)]
        dist: Option<DistArg>,
        /// Number of samples.
        #[arg(long)]
        n: Option<usize>,
        /// Sample interval in seconds [default: 0.001]
        #[arg(long)]
        dt: Option<f64>,
        /// [default: 0]
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: Output,
    },
    /// Run a signal through a system model.
    Sim {
        input: PathBuf,
        #[arg(long)]
        model: Option<SystemModel>,
        #[command(flatten)]
        out: Output,
    },
    /// Summary statistics; with -o also ACF, CCF, periodogram and histogram CSVs.
    Stats {
        input: PathBuf,
        /// Second signal for the cross-correlation.
        other: Option<PathBuf>,
        /// Largest correlation lag.
        #[arg(long)]
        lags: Option<usize>,
        /// Histogram bins [default: 32]
        #[arg(long)]
        bins: Option<usize>,
        /// Prefix for <prefix>.acf.csv, .ccf.csv, .periodogram.csv, .histogram.csv
        #[arg(short = 'o', value_name = "PREFIX")]
        out: Option<PathBuf>,
    },
    /// Continuous wavelet transform to a wcs-v1 surface.
    Cwt {
        input: PathBuf,
        #[command(flatten)]
        transform: Transform,
        #[command(flatten)]
        out: Output,
    },
    /// Identify the ITF surface from input and output records.
    Identify {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        transform: Transform,
        /// water:<level> or tikhonov:<level> [default: water:1e-3]
        #[arg(long)]
        reg: Option<RegularizationPolicy>,
        /// ITF length in samples [default: min(N/4, 512)]
        #[arg(long)]
        lags: Option<usize>,
        /// itf-v1 surface path; the report goes to stdout.
        #[arg(short = 'o', value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Predict the output of an identified system.
    Reconstruct {
        input: PathBuf,
        surface: PathBuf,
        /// wavelet or time [default: wavelet]
        #[arg(long)]
        mode: Option<ModeArg>,
        #[command(flatten)]
        out: Output,
    },
    /// Restore error between a record and its reconstruction.
    Error { measured: PathBuf, restored: PathBuf },
    /// Render a surface to a PPM heatmap and a CSV magnitude matrix.
    Plot {
        surface: PathBuf,
        /// Image path; the matrix goes next to it with a .csv extension.
        #[arg(short = 'o', value_name = "PATH")]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Output {
    /// Output path [default: stdout]
    #[arg(short = 'o', value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Transform {
    /// morlet:<w0> | mhat | dog:<n> | paul:<m> | gauss:<n> | shannon [default: morlet:6]
    #[arg(long)]
    wavelet: Option<MotherWavelet>,
    /// <amin>:<amax>:<count>:<log|linear> [default: 2dt:max(N·dt/4, 4dt):64:log]
    #[arg(long)]
    scales: Option<ScaleGrid>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct DistArg(Distribution);

impl FromStr for DistArg {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, FormatError> {
        let bad = || FormatError::new(format!("expected gauss:<mean>,<stddev> or uniform:<lo>,<hi>, got '{s}'"));
        let (tag, params) = s.split_once(':').ok_or_else(bad)?;
        let (a, b) = params.split_once(',').ok_or_else(bad)?;
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        match tag.trim() {
            "gauss" => Ok(Self(Distribution::Gaussian { mean: a, stddev: b })),
            "uniform" => Ok(Self(Distribution::Uniform { lo: a, hi: b })),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ModeArg(ReconstructionMode);

impl FromStr for ModeArg {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, FormatError> {
        match s {
            "wavelet" => Ok(Self(ReconstructionMode::WaveletDomain)),
            "time" => Ok(Self(ReconstructionMode::TimeDomain)),
            _ => Err(FormatError::new(format!("mode is 'wavelet' or 'time', got '{s}'"))),
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(PathBuf, String),
    Io(PathBuf, std::io::Error),
    Core(wavident_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Input(p, m) => write!(f, "{}: {m}", p.display()),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl From<wavident_core::Error> for CliError {
    fn from(e: wavident_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Files to write once every computation has succeeded.
#[derive(Default)]
struct Artifacts {
    files: Vec<(PathBuf, String)>,
    stdout: String,
}

impl Artifacts {
    fn emit(&mut self, path: Option<PathBuf>, text: String) {
        match path {
            Some(p) => self.files.push((p, text)),
            None => self.stdout.push_str(&text),
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn read_signal(path: &Path) -> Result<Signal, CliError> {
    csv::read_signal(read_text(path)?.as_bytes()).map_err(|e| CliError::Input(path.to_path_buf(), e.to_string()))
}

fn read_surface_file(path: &Path) -> Result<SurfaceFile, CliError> {
    read_surface(&read_text(path)?).map_err(|e| CliError::Input(path.to_path_buf(), e.to_string()))
}

/// Runs the CLI on `args` (including the program name) and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    let result = execute(cli).and_then(|artifacts| {
        for (path, text) in &artifacts.files {
            std::fs::write(path, text).map_err(|e| CliError::Io(path.clone(), e))?;
        }
        stdout.write_all(artifacts.stdout.as_bytes()).map_err(|e| CliError::Io("<stdout>".into(), e))
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "wavident: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<Artifacts, CliError> {
    let config = match &cli.config {
        Some(path) => Config::parse(&read_text(path)?).map_err(|e| CliError::Input(path.clone(), e.to_string()))?,
        None => Config::default(),
    };
    let mut out = Artifacts::default();
    match cli.command {
        Command::Gen { dist, n, dt, seed, out: o } => {
            let dist = config.pick(dist, "dist")?.map_or(Distribution::Gaussian { mean: 0.0, stddev: 1.0 }, |d| d.0);
            let length = config.pick(n, "n")?.ok_or_else(|| CliError::Usage("gen needs --n".into()))?;
            let dt = config.pick(dt, "dt")?.unwrap_or(0.001);
            let seed = config.pick(seed, "seed")?.unwrap_or(0);
            let x = generate_stochastic(&StochasticSpec { distribution: dist, length, dt, seed })?;
            out.emit(o.out, csv::signal_to_string(&x));
        }
        Command::Sim { input, model, out: o } => {
            let model = config.pick(model, "model")?.ok_or_else(|| CliError::Usage("sim needs --model".into()))?;
            let x = read_signal(&input)?;
            out.emit(o.out, csv::signal_to_string(&simulate(&model, &x)?));
        }
        Command::Stats { input, other, lags, bins, out: prefix } => {
            let lags = config.pick(lags, "lags")?;
            let bins = config.pick(bins, "bins")?.unwrap_or(32);
            let x = read_signal(&input)?;
            let y = other.as_deref().map(read_signal).transpose()?;
            let s = summary_stats(&x);
            out.stdout = format!(
                "n={}\ndt={}\nmean={}\nvariance={}\nmin={}\nmax={}\nrms={}\n",
                x.len(), g17(x.dt()), g17(s.mean), g17(s.variance), g17(s.min), g17(s.max), g17(s.rms)
            );
            let lags = lags.unwrap_or_else(|| default_lags(x.len()).min(x.len() - 1));
            let correlation = |r: wavident_core::signals::CorrelationFunction| {
                let mut text = String::from("lag,tau,value\n");
                for (k, v) in r.lags().zip(r.values()) {
                    text.push_str(&format!("{k},{},{}\n", g17(k as f64 * r.dt()), g17(*v)));
                }
                text
            };
            let acf = correlation(autocorrelation(&x, lags)?);
            let ccf = y.as_ref().map(|y| cross_correlation(&x, y, lags)).transpose()?.map(correlation);
            let mut spectrum = String::from("f,power\n");
            for (f, p) in periodogram(&x)? {
                spectrum.push_str(&format!("{},{}\n", g17(f), g17(p)));
            }
            let mut hist = String::from("lo,hi,count\n");
            for b in histogram(&x, bins)? {
                hist.push_str(&format!("{},{},{}\n", g17(b.lo), g17(b.hi), b.count));
            }
            if let Some(prefix) = prefix {
                let path = |ext: &str| {
                    let mut p = prefix.clone().into_os_string();
                    p.push(ext);
                    PathBuf::from(p)
                };
                out.files.push((path(".acf.csv"), acf));
                if let Some(ccf) = ccf {
                    out.files.push((path(".ccf.csv"), ccf));
                }
                out.files.push((path(".periodogram.csv"), spectrum));
                out.files.push((path(".histogram.csv"), hist));
            }
        }
        Command::Cwt { input, transform, out: o } => {
            let x = read_signal(&input)?;
            let (wavelet, grid) = transform_settings(&config, transform, &x)?;
            out.emit(o.out, wcs_to_string(&cwt(&x, &wavelet, &grid)?));
        }
        Command::Identify { input, output, transform, reg, lags, out: o } => {
            let reg = config.pick(reg, "reg")?.unwrap_or_default();
            let lags = config.pick(lags, "lags")?;
            let x = read_signal(&input)?;
            let y = read_signal(&output)?;
            let (wavelet, grid) = transform_settings(&config, transform, &x)?;
            let lags = lags.unwrap_or_else(|| default_lags(x.len()));
            let itf = identify_itf(&x, &y, &wavelet, &grid, &reg, lags)?;
            out.stdout = identify_report(&x, &y, &itf)?;
            if let Some(path) = o {
                out.files.push((path, itf_to_string(&itf)));
            }
        }
        Command::Reconstruct { input, surface, mode, out: o } => {
            let mode = config.pick(mode, "mode")?.map_or(ReconstructionMode::WaveletDomain, |m| m.0);
            let x = read_signal(&input)?;
            let itf = match read_surface_file(&surface)? {
                SurfaceFile::Itf(itf) => itf,
                SurfaceFile::Coefficients(_) => {
                    return Err(CliError::Input(surface, "expected an itf-v1 surface, got wcs-v1".into()))
                }
            };
            let y_hat = reconstruct(&x, &itf, &itf.wavelet(), itf.grid(), mode)?;
            out.emit(o.out, csv::signal_to_string(&y_hat));
        }
        Command::Error { measured, restored } => {
            let report = restore_error(&read_signal(&measured)?, &read_signal(&restored)?)?;
            let rel = report.epsilon_rel.map_or_else(|| "undefined".to_string(), g17);
            out.stdout = format!("epsilon_rel={rel}\nepsilon_rms={}\n", g17(report.epsilon_rms));
        }
        Command::Plot { surface, out: image } => {
            let matrix = image.with_extension("csv");
            if matrix == image {
                return Err(CliError::Usage("plot -o must not end in .csv; the matrix is written there".into()));
            }
            let map = render_heatmap(&read_surface_file(&surface)?);
            out.files.push((image, map.ppm));
            out.files.push((matrix, map.csv));
        }
    }
    Ok(out)
}

fn transform_settings(config: &Config, t: Transform, x: &Signal) -> Result<(MotherWavelet, ScaleGrid), CliError> {
    let wavelet = match config.pick(t.wavelet, "wavelet")? {
        Some(w) => w,
        None => MotherWavelet::morlet(6.0)?,
    };
    let grid = match config.pick(t.scales, "scales")? {
        Some(g) => g,
        None => ScaleGrid::default_for(x.len(), x.dt())?,
    };
    Ok((wavelet, grid))
}

fn identify_report(x: &Signal, y: &Signal, itf: &ItfSurface) -> Result<String, CliError> {
    let dead = itf.dead().iter().filter(|&&d| d).count();
    let mut report = format!(
        "wavelet={}\nscales={}\nreg={}\nn_lags={}\ndead_channels={dead}\nscaling_channel={}\nrow_dispersion={}\n",
        itf.wavelet(),
        itf.grid(),
        itf.reg(),
        itf.n_lags(),
        if itf.scaling().is_some() { "yes" } else { "no" },
        g17(itf.row_dispersion()),
    );
    for (key, mode) in [("wavelet", ReconstructionMode::WaveletDomain), ("time", ReconstructionMode::TimeDomain)] {
        let y_hat = reconstruct(x, itf, &itf.wavelet(), itf.grid(), mode)?;
        let rel = restore_error(y, &y_hat)?.epsilon_rel.map_or_else(|| "undefined".to_string(), g17);
        report.push_str(&format!("epsilon_rel_{key}={rel}\n"));
    }
    Ok(report)
}
