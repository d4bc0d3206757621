//! Grid file format, CSV, and SVG emission.
//!
//! The SGRD format is the toolkit's intermediate representation: a minimal
//! little-endian binary layout that round-trips bit-exactly at the stored
//! `f32` precision and fails loudly on malformed headers.
//!
//! Layout: magic `"SGRD"` (4 bytes), `u16` version (= 1), `u32` nt,
//! `u32` nx, `f64` dt, `f64` dx, `f64` t0, then `nt * nx` `f32` samples,
//! trace-major. Everything little-endian.

use crate::error::{Error, Result};
use crate::grid::Section;
use crate::sweep::SweepResult;
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

/// Magic bytes of the grid format.
pub const GRID_MAGIC: [u8; 4] = *b"SGRD";
/// Current grid format version.
pub const GRID_VERSION: u16 = 1;

/// Write a section to an SGRD file. Samples are stored at `f32` precision.
pub fn write_grid(section: &Section, path: impl AsRef<Path>) -> Result<()> {
    section.ensure_valid()?;
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    w.write_all(&GRID_MAGIC)?;
    w.write_u16::<LittleEndian>(GRID_VERSION)?;
    w.write_u32::<LittleEndian>(section.nt as u32)?;
    w.write_u32::<LittleEndian>(section.nx as u32)?;
    w.write_f64::<LittleEndian>(section.dt)?;
    w.write_f64::<LittleEndian>(section.dx)?;
    w.write_f64::<LittleEndian>(section.t0)?;
    for &s in &section.samples {
        w.write_f32::<LittleEndian>(s as f32)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a section from an SGRD file, validating magic, version, payload
/// size, and sample finiteness.
pub fn read_grid(path: impl AsRef<Path>) -> Result<Section> {
    let file = std::fs::File::open(path)?;
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != GRID_MAGIC {
        return Err(Error::BadMagic { found: magic });
    }
    let version = r.read_u16::<LittleEndian>()?;
    if version != GRID_VERSION {
        return Err(Error::UnsupportedVersion {
            found: version,
            expected: GRID_VERSION,
        });
    }
    let nt = r.read_u32::<LittleEndian>()? as usize;
    let nx = r.read_u32::<LittleEndian>()? as usize;
    let dt = r.read_f64::<LittleEndian>()?;
    let dx = r.read_f64::<LittleEndian>()?;
    let t0 = r.read_f64::<LittleEndian>()?;
    let expected = nt
        .checked_mul(nx)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::InvalidSection(format!("grid {nt}x{nx} overflows")))?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() < expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }
    let mut samples = Vec::with_capacity(nt * nx);
    for (i, chunk) in payload[..expected].chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]) as f64;
        if !v.is_finite() {
            return Err(Error::NonFiniteSample { index: i });
        }
        samples.push(v);
    }
    let section = Section::new(nt, nx, dt, dx, t0, samples)?;
    section.ensure_valid()?;
    Ok(section)
}

/// Write a sweep result as CSV: `velocity_mps,b0,b1,active_pixels`.
pub fn emit_csv(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    render_csv(result, &mut out);
    std::fs::write(path, out)?;
    Ok(())
}

/// Render the sweep CSV into a string; deterministic byte-for-byte.
pub fn render_csv(result: &SweepResult, out: &mut String) {
    out.push_str("velocity_mps,b0,b1,active_pixels\n");
    for e in &result.entries {
        out.push_str(&format!("{},{},{},{}\n", fmt_v(e.v), e.b0, e.b1, e.active_pixels));
    }
}

/// Velocities render without trailing zeros so grid values like 1500 stay
/// readable; deterministic for identical inputs.
fn fmt_v(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Write the `b1` vs velocity curve as a standalone SVG line plot with the
/// argmin marked. Hand-emitted; identical inputs give identical bytes.
pub fn emit_curve_svg(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    if result.entries.is_empty() {
        return Err(Error::InvalidParam {
            name: "result",
            reason: "cannot plot an empty sweep".into(),
        });
    }
    let svg = render_curve_svg(result);
    std::fs::write(path, svg)?;
    Ok(())
}

/// Render the SVG document for the sweep curve.
pub fn render_curve_svg(result: &SweepResult) -> String {
    let (width, height) = (640.0, 420.0);
    let (ml, mr, mt, mb) = (64.0, 24.0, 28.0, 52.0); // margins
    let plot_w = width - ml - mr;
    let plot_h = height - mt - mb;

    let v_lo = result.entries.first().unwrap().v;
    let v_hi = result.entries.last().unwrap().v;
    let v_span = (v_hi - v_lo).max(1e-9);
    let b1_max = result.entries.iter().map(|e| e.b1).max().unwrap().max(1);

    let x_of = |v: f64| ml + (v - v_lo) / v_span * plot_w;
    let y_of = |b1: usize| mt + plot_h - (b1 as f64 / b1_max as f64) * plot_h;

    let mut points = String::new();
    for e in &result.entries {
        points.push_str(&format!("{:.2},{:.2} ", x_of(e.v), y_of(e.b1)));
    }
    let argmin = result.argmin_entry();
    let (ax, ay) = (x_of(argmin.v), y_of(argmin.b1));

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // Axes.
    s.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        mt + plot_h,
        ml + plot_w,
        mt + plot_h
    ));
    s.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        mt + plot_h
    ));
    // Axis labels.
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">migration velocity (m/s)</text>\n",
        ml + plot_w / 2.0,
        height - 12.0
    ));
    s.push_str(&format!(
        "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 16 {:.2})\">B1</text>\n",
        mt + plot_h / 2.0,
        mt + plot_h / 2.0
    ));
    // Tick labels at the velocity extremes and the b1 range.
    s.push_str(&format!(
        "<text x=\"{ml}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
        mt + plot_h + 18.0,
        fmt_v(v_lo)
    ));
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
        ml + plot_w,
        mt + plot_h + 18.0,
        fmt_v(v_hi)
    ));
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">{b1_max}</text>\n",
        ml - 6.0,
        mt + 4.0
    ));
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">0</text>\n",
        ml - 6.0,
        mt + plot_h + 4.0
    ));
    // The curve itself.
    s.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n",
        points.trim_end()
    ));
    // Argmin marker and label.
    s.push_str(&format!(
        "<circle cx=\"{ax:.2}\" cy=\"{ay:.2}\" r=\"5\" fill=\"crimson\"/>\n"
    ));
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" fill=\"crimson\">min b1={} at {} m/s</text>\n",
        ax,
        (ay - 10.0).max(12.0),
        argmin.b1,
        fmt_v(argmin.v)
    ));
    s.push_str("</svg>\n");
    s
}

/// Dump a section's samples as CSV, one row per time sample, one column per
/// trace. A plain-text escape hatch for inspecting grids.
pub fn export_section_csv(section: &Section, path: impl AsRef<Path>) -> Result<()> {
    section.ensure_valid()?;
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    for it in 0..section.nt {
        for ix in 0..section.nx {
            if ix > 0 {
                w.write_all(b",")?;
            }
            write!(w, "{}", section.at(it, ix))?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
