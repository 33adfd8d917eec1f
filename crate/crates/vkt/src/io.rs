//! Binary snapshots, diagnostics CSV, and 16-bit grayscale heatmaps.
//!
//! Snapshot layout (all little-endian): magic `VKT2`, version `u32`, grid
//! side `u32`, time `f64`, then density and both momentum components as
//! `n*n` row-major `f64`. CSV floats are written in shortest round-trip
//! form, so rewriting parsed rows reproduces the file byte for byte.

use crate::analysis::DiagRow;
use crate::error::{Error, Result};
use crate::grid::{Field, VecField};
use crate::model::State;
use std::fs;
use std::io::Write as _;
use std::path::Path;

const MAGIC: &[u8; 4] = b"VKT2";
const VERSION: u32 = 1;

/// Write a state as a binary snapshot.
pub fn write_snapshot(state: &State, path: &Path) -> Result<()> {
    let n = state.n();
    let mut buf = Vec::with_capacity(20 + 3 * 8 * n * n);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(n as u32).to_le_bytes());
    buf.extend_from_slice(&state.t.to_le_bytes());
    for field in [&state.rho, &state.m.x1, &state.m.x2] {
        for v in field.as_slice() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    fs::write(path, buf)?;
    Ok(())
}

/// Read a binary snapshot back into a state.
pub fn read_snapshot(path: &Path) -> Result<State> {
    let buf = fs::read(path)?;
    if buf.len() < 20 {
        return Err(Error::BadFormat(format!(
            "snapshot too short ({} bytes)",
            buf.len()
        )));
    }
    if &buf[0..4] != MAGIC {
        return Err(Error::BadFormat("bad snapshot magic".into()));
    }
    let version = u32::from_le_bytes(buf[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(Error::BadFormat(format!(
            "unsupported snapshot version {version}"
        )));
    }
    let n = u32::from_le_bytes(buf[8..12].try_into().unwrap()) as usize;
    if n < 8 || n % 2 != 0 || n > 1 << 16 {
        return Err(Error::BadFormat(format!("implausible grid side {n}")));
    }
    let expect = 20 + 3 * 8 * n * n;
    if buf.len() != expect {
        return Err(Error::BadFormat(format!(
            "snapshot length {} does not match grid side {n} (expected {expect})",
            buf.len()
        )));
    }
    let t = f64::from_le_bytes(buf[12..20].try_into().unwrap());
    let mut fields = Vec::with_capacity(3);
    for k in 0..3 {
        let start = 20 + k * 8 * n * n;
        let data: Vec<f64> = buf[start..start + 8 * n * n]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        fields.push(Field::from_data(n, data));
    }
    let m2 = fields.pop().unwrap();
    let m1 = fields.pop().unwrap();
    let rho = fields.pop().unwrap();
    State::new(t, rho, VecField { x1: m1, x2: m2 })
}

fn csv_header(norm_ks: &[f64], f_m: usize) -> String {
    let mut h = String::from(
        "t,mass,mom1,mom2,energy,dissipation,energy_balance,z2,y2,psi2,rho_max,rho_min",
    );
    h.push_str(&format!(",f_m{f_m}"));
    for k in norm_ks {
        h.push_str(&format!(",norm_ratio_k{k}"));
    }
    h.push_str(",rho_ut_norm");
    h
}

/// Write diagnostics rows as CSV with one row per tick.
pub fn write_diagnostics(
    rows: &[DiagRow],
    norm_ks: &[f64],
    f_m: usize,
    path: &Path,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&csv_header(norm_ks, f_m));
    out.push('\n');
    for r in rows {
        if r.norm_ratios.len() != norm_ks.len() {
            return Err(Error::BadFormat(format!(
                "row at t = {} carries {} norm ratios, header expects {}",
                r.t,
                r.norm_ratios.len(),
                norm_ks.len()
            )));
        }
        let mut cells: Vec<String> = vec![
            r.t, r.mass, r.mom1, r.mom2, r.energy, r.dissipation, r.energy_balance, r.z2, r.y2,
            r.psi2, r.rho_max, r.rho_min, r.f_m,
        ]
        .into_iter()
        .map(|v| v.to_string())
        .collect();
        cells.extend(r.norm_ratios.iter().map(|v| v.to_string()));
        cells.push(r.rho_ut_norm.to_string());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

/// Read a diagnostics CSV produced by [`write_diagnostics`].
pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagRow>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::BadFormat("empty diagnostics file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let ratio_count = cols
        .iter()
        .filter(|c| c.starts_with("norm_ratio_k"))
        .count();
    let expect_cols = 13 + ratio_count + 1;
    if cols.len() != expect_cols || !cols[12].starts_with("f_m") || cols[0] != "t" {
        return Err(Error::BadFormat(format!(
            "unrecognized diagnostics header '{header}'"
        )));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| {
                s.parse::<f64>().map_err(|_| {
                    Error::BadFormat(format!("bad float '{s}' on data line {}", lineno + 1))
                })
            })
            .collect::<Result<_>>()?;
        if vals.len() != expect_cols {
            return Err(Error::BadFormat(format!(
                "data line {} has {} columns, expected {expect_cols}",
                lineno + 1,
                vals.len()
            )));
        }
        rows.push(DiagRow {
            t: vals[0],
            mass: vals[1],
            mom1: vals[2],
            mom2: vals[3],
            energy: vals[4],
            dissipation: vals[5],
            energy_balance: vals[6],
            z2: vals[7],
            y2: vals[8],
            psi2: vals[9],
            rho_max: vals[10],
            rho_min: vals[11],
            f_m: vals[12],
            norm_ratios: vals[13..13 + ratio_count].to_vec(),
            rho_ut_norm: vals[13 + ratio_count],
        });
    }
    Ok(rows)
}

/// Write a field as a 16-bit binary PGM, mapping `range` linearly onto
/// `[0, 65535]` with clamping. Sample words are big-endian as the format
/// requires for a 65535 maxval.
pub fn emit_heatmap(f: &Field, path: &Path, range: (f64, f64)) -> Result<()> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "heatmap range must satisfy min < max, got ({lo}, {hi})"
        )));
    }
    let n = f.n();
    let mut buf = format!("P5\n{n} {n}\n65535\n").into_bytes();
    buf.reserve(2 * n * n);
    let scale = 65535.0 / (hi - lo);
    for &v in f.as_slice() {
        let t = ((v - lo) * scale).clamp(0.0, 65535.0).round() as u16;
        buf.extend_from_slice(&t.to_be_bytes());
    }
    fs::write(path, buf)?;
    Ok(())
}
