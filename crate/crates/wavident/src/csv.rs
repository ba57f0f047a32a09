//! Signal CSV: header `t,value`, then one `%.17g,%.17g` row per sample.

use std::io::{Read, Write};

use wavident_core::signals::Signal;

use crate::g17::g17;
use crate::FormatError;

/// Relative tolerance on every sample time against `t0 + i·dt`.
pub const DT_TOLERANCE: f64 = 1e-9;

pub fn write_signal<W: Write>(mut out: W, x: &Signal) -> std::io::Result<()> {
    writeln!(out, "t,value")?;
    for (i, v) in x.samples().iter().enumerate() {
        writeln!(out, "{},{}", g17(x.time(i)), g17(*v))?;
    }
    Ok(())
}

pub fn signal_to_string(x: &Signal) -> String {
    let mut buf = Vec::new();
    write_signal(&mut buf, x).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Reads a signal, inferring `dt` from the first and last rows.
pub fn read_signal<R: Read>(input: R) -> Result<Signal, FormatError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = reader.headers().map_err(|e| FormatError::new(format!("unreadable CSV header: {e}")))?;
    if header.len() != 2 || &header[0] != "t" || &header[1] != "value" {
        return Err(FormatError::new("CSV header must be 't,value'"));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| FormatError::new(format!("line {line}: {e}")))?;
        if record.len() != 2 {
            return Err(FormatError::new(format!("line {line}: expected 2 fields, got {}", record.len())));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| FormatError::new(format!("line {line}: '{s}' is not a finite number")))
        };
        times.push(parse(&record[0])?);
        values.push(parse(&record[1])?);
    }
    if times.len() < 2 {
        return Err(FormatError::new("a signal CSV needs at least 2 samples to define dt"));
    }
    let n = times.len();
    let t0 = times[0];
    let dt = (times[n - 1] - t0) / (n - 1) as f64;
    if !(dt > 0.0) {
        return Err(FormatError::new("sample times must increase"));
    }
    for (i, &t) in times.iter().enumerate() {
        if (t - (t0 + i as f64 * dt)).abs() > DT_TOLERANCE * dt {
            return Err(FormatError::new(format!("line {}: sample time {t} breaks uniform spacing dt = {dt}", i + 2)));
        }
    }
    Signal::new(values, dt, t0).map_err(|e| FormatError::new(e.to_string()))
}
