//! Time-series CSV and binary snapshot formats.
//!
//! A snapshot is one ASCII line `CRFLOW1 <m> <N> <n_amb> <t>` followed by the
//! field values as little-endian `f64`, points in grid order (row-major over
//! `x¹, y¹, …, t`) with the component index fastest.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::field::MapField;
use crate::Report;

pub const SNAPSHOT_MAGIC: &str = "CRFLOW1";

pub const TIMESERIES_COLUMNS: [&str; 15] = [
    "step",
    "t",
    "E",
    "E_b",
    "E_0",
    "sup_e",
    "sup_e_b",
    "sup_e_0",
    "sup_tau",
    "sup_ut",
    "dissipation_residual",
    "bochner_min_residual",
    "g_bound",
    "vertical_control_ratio",
    "mean_value_ratio",
];

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad snapshot header: {0}")]
    Header(String),
    #[error("snapshot holds {got} values, header implies {want}")]
    Length { got: usize, want: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub m: usize,
    pub resolution: usize,
    pub t: f64,
    pub field: MapField<f64>,
}

pub fn write_snapshot<W: Write>(mut w: W, snap: &Snapshot) -> Result<(), FormatError> {
    writeln!(
        w,
        "{SNAPSHOT_MAGIC} {} {} {} {}",
        snap.m, snap.resolution, snap.field.n_amb, snap.t
    )?;
    let mut bytes = Vec::with_capacity(snap.field.values.len() * 8);
    for v in &snap.field.values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&bytes)?;
    Ok(())
}

pub fn read_snapshot<R: BufRead>(mut r: R) -> Result<Snapshot, FormatError> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let parts: Vec<&str> = line.trim_end_matches('\n').split(' ').collect();
    if parts.len() != 5 || parts[0] != SNAPSHOT_MAGIC {
        return Err(FormatError::Header(line.trim().to_string()));
    }
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| FormatError::Header(line.trim().to_string()))
    };
    let (m, resolution, n_amb) = (num(parts[1])?, num(parts[2])?, num(parts[3])?);
    let t: f64 = parts[4]
        .parse()
        .map_err(|_| FormatError::Header(line.trim().to_string()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let want = resolution.pow(2 * m as u32 + 1) * n_amb;
    if bytes.len() != want * 8 {
        return Err(FormatError::Length {
            got: bytes.len() / 8,
            want,
        });
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok(Snapshot {
        m,
        resolution,
        t,
        field: MapField { n_amb, values },
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write `# ` comment lines, the column header and one row per report.
pub fn write_timeseries<W: Write>(
    mut w: W,
    comments: &[String],
    reports: &[Report],
) -> io::Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "{}", TIMESERIES_COLUMNS.join(","))?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.step,
            r.t,
            r.energy,
            r.e_b,
            r.e_0,
            r.sup_e,
            r.sup_e_b,
            r.sup_e_0,
            r.sup_tau,
            r.sup_ut,
            opt(r.dissipation_residual),
            opt(r.bochner_min_residual),
            opt(r.g_bound),
            opt(r.vertical_control_ratio),
            opt(r.mean_value_ratio),
        )?;
    }
    Ok(())
}
