//! Text surface files.
//!
//! `wcs-v1` holds a coefficient surface:
//!
//! ```text
//! wcs-v1 <wavelet> <dt> <n_scales> <n_translations>
//! <scale values>
//! <re:im pairs for scale 0>
//! ...
//! ```
//!
//! `itf-v1` uses the same header and scale line, then one row of real lags per
//! scale, followed by the keyword lines `reg <policy>`, `dead <0|1 ...>`,
//! `scaling <lags|none>` and `average <lags>`. All numbers are `%.17g`.

use std::fmt::Write as _;

use wavident_core::identify::ItfSurface;
use wavident_core::wavelet::{CoefficientSurface, MotherWavelet, ScaleGrid};
use wavident_core::Complex;

use crate::g17::g17;
use crate::FormatError;

pub const WCS_TAG: &str = "wcs-v1";
pub const ITF_TAG: &str = "itf-v1";

/// Either kind of surface file.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceFile {
    Coefficients(CoefficientSurface),
    Itf(ItfSurface),
}

impl SurfaceFile {
    pub fn scales(&self) -> &[f64] {
        match self {
            SurfaceFile::Coefficients(s) => s.scales(),
            SurfaceFile::Itf(s) => s.scales(),
        }
    }

    /// `|value|` per scale row.
    pub fn magnitudes(&self) -> Vec<Vec<f64>> {
        match self {
            SurfaceFile::Coefficients(s) => s.magnitudes(),
            SurfaceFile::Itf(s) => s.rows().iter().map(|r| r.iter().map(|v| v.abs()).collect()).collect(),
        }
    }

    /// Time of column `j`: translation for coefficients, lag for an ITF.
    pub fn column_time(&self, j: usize) -> f64 {
        match self {
            SurfaceFile::Coefficients(s) => s.translation(j),
            SurfaceFile::Itf(s) => s.lag(j),
        }
    }
}

fn join<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> String) -> String {
    items.into_iter().map(f).collect::<Vec<_>>().join(" ")
}

fn header(tag: &str, wavelet: MotherWavelet, dt: f64, rows: usize, cols: usize, scales: &[f64]) -> String {
    format!("{tag} {wavelet} {} {rows} {cols}\n{}\n", g17(dt), join(scales, |a| g17(*a)))
}

pub fn wcs_to_string(s: &CoefficientSurface) -> String {
    let mut out = header(WCS_TAG, s.wavelet(), s.dt(), s.n_scales(), s.n_translations(), s.scales());
    for row in s.rows() {
        out.push_str(&join(row, |c| format!("{}:{}", g17(c.re), g17(c.im))));
        out.push('\n');
    }
    out
}

pub fn itf_to_string(s: &ItfSurface) -> String {
    let mut out = header(ITF_TAG, s.wavelet(), s.dt(), s.grid().count(), s.n_lags(), s.scales());
    for row in s.rows() {
        out.push_str(&join(row, |v| g17(*v)));
        out.push('\n');
    }
    let _ = writeln!(out, "reg {}", s.reg());
    let _ = writeln!(out, "dead {}", join(s.dead(), |&d| u8::from(d).to_string()));
    match s.scaling() {
        Some(row) => {
            let _ = writeln!(out, "scaling {}", join(row, |v| g17(*v)));
        }
        None => out.push_str("scaling none\n"),
    }
    let _ = writeln!(out, "average {}", join(s.average(), |v| g17(*v)));
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str), FormatError> {
        self.inner
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| FormatError::new(format!("surface file ends before {what}")))
    }

    /// A line starting with `keyword`, returning the rest.
    fn keyword(&mut self, keyword: &str) -> Result<(usize, &'a str), FormatError> {
        let (n, line) = self.next(keyword)?;
        let rest = line
            .strip_prefix(keyword)
            .filter(|r| r.is_empty() || r.starts_with(' '))
            .ok_or_else(|| FormatError::new(format!("line {n}: expected '{keyword}'")))?;
        Ok((n, rest.trim()))
    }
}

fn number(tok: &str, line: usize) -> Result<f64, FormatError> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| FormatError::new(format!("line {line}: '{tok}' is not a finite number")))
}

fn reals(text: &str, len: usize, line: usize) -> Result<Vec<f64>, FormatError> {
    let v: Vec<f64> = text.split_whitespace().map(|t| number(t, line)).collect::<Result<_, _>>()?;
    if v.len() != len {
        return Err(FormatError::new(format!("line {line}: expected {len} values, got {}", v.len())));
    }
    Ok(v)
}

fn core(e: wavident_core::Error) -> FormatError {
    FormatError::new(e.to_string())
}

pub fn read_surface(text: &str) -> Result<SurfaceFile, FormatError> {
    let mut lines = Lines { inner: text.lines().enumerate() };
    let (_, head) = lines.next("the header")?;
    let fields: Vec<&str> = head.split_whitespace().collect();
    if fields.len() != 5 || (fields[0] != WCS_TAG && fields[0] != ITF_TAG) {
        return Err(FormatError::new("header must be '<wcs-v1|itf-v1> <wavelet> <dt> <n_scales> <n_columns>'"));
    }
    let wavelet: MotherWavelet = fields[1].parse().map_err(core)?;
    let dt = number(fields[2], 1)?;
    let count = |s: &str| s.parse::<usize>().map_err(|_| FormatError::new(format!("line 1: bad count '{s}'")));
    let (rows, cols) = (count(fields[3])?, count(fields[4])?);
    if cols == 0 {
        return Err(FormatError::new("line 1: surface has no columns"));
    }
    let (n, scale_line) = lines.next("the scale line")?;
    let grid = ScaleGrid::from_scales(reals(scale_line, rows, n)?).map_err(core)?;

    let surface = if fields[0] == WCS_TAG {
        let mut data = Vec::with_capacity(rows);
        for _ in 0..rows {
            let (n, line) = lines.next("all scale rows")?;
            let row: Vec<Complex> = line
                .split_whitespace()
                .map(|pair| {
                    let (re, im) = pair
                        .split_once(':')
                        .ok_or_else(|| FormatError::new(format!("line {n}: expected re:im, got '{pair}'")))?;
                    Ok(Complex::new(number(re, n)?, number(im, n)?))
                })
                .collect::<Result<_, FormatError>>()?;
            if row.len() != cols {
                return Err(FormatError::new(format!("line {n}: expected {cols} values, got {}", row.len())));
            }
            data.push(row);
        }
        SurfaceFile::Coefficients(CoefficientSurface::from_parts(wavelet, grid, dt, 0.0, data).map_err(core)?)
    } else {
        let mut data = Vec::with_capacity(rows);
        for _ in 0..rows {
            let (n, line) = lines.next("all scale rows")?;
            data.push(reals(line, cols, n)?);
        }
        let (_, reg) = lines.keyword("reg")?;
        let reg = reg.parse().map_err(core)?;
        let (n, dead) = lines.keyword("dead")?;
        let dead: Vec<bool> = dead
            .split_whitespace()
            .map(|t| match t {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(FormatError::new(format!("line {n}: dead flags are 0 or 1, got '{t}'"))),
            })
            .collect::<Result<_, _>>()?;
        let (n, scaling) = lines.keyword("scaling")?;
        let scaling = if scaling == "none" { None } else { Some(reals(scaling, cols, n)?) };
        let (n, average) = lines.keyword("average")?;
        let average = reals(average, cols, n)?;
        SurfaceFile::Itf(ItfSurface::from_parts(wavelet, grid, dt, reg, data, dead, scaling, average).map_err(core)?)
    };
    if let Some((n, extra)) = lines.inner.find(|(_, l)| !l.trim().is_empty()) {
        return Err(FormatError::new(format!("line {}: unexpected trailing content '{extra}'", n + 1)));
    }
    Ok(surface)
}
