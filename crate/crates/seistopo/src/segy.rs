//! Minimal SEG-Y rev1 import: uniform trace length, sample format codes
//! 1 (4-byte IBM float) and 5 (4-byte IEEE float), big-endian headers.
//!
//! This is an ingestion path only. The toolkit's own intermediates use the
//! SGRD format (`io` module); field records come in once through here.

use crate::error::{Error, Result};
use crate::grid::Section;
use byteorder::{BigEndian, ByteOrder};
use std::path::Path;

/// Size of the EBCDIC textual header.
const TEXT_HEADER_LEN: usize = 3200;
/// Size of the binary header.
const BINARY_HEADER_LEN: usize = 400;
/// Size of each trace header.
const TRACE_HEADER_LEN: usize = 240;

/// Byte offset (within the binary header) of the sample interval, us.
const BH_SAMPLE_INTERVAL: usize = 16;
/// Byte offset of samples per trace.
const BH_SAMPLES_PER_TRACE: usize = 20;
/// Byte offset of the data sample format code.
const BH_FORMAT_CODE: usize = 24;

/// Trace-header byte offset of the coordinate scalar.
const TH_COORD_SCALAR: usize = 70;
/// Trace-header byte offset of the CDP X coordinate.
const TH_CDP_X: usize = 180;

/// Convert an IBM System/360 hexadecimal float to f64:
/// sign bit, 7-bit base-16 exponent biased by 64, 24-bit fraction in
/// [0, 1). Value is `(-1)^s * fraction * 16^(exponent - 64)`.
pub fn ibm_to_f64(bits: u32) -> f64 {
    let fraction = (bits & 0x00ff_ffff) as f64 / (1u32 << 24) as f64;
    if fraction == 0.0 {
        return 0.0;
    }
    let sign = if bits & 0x8000_0000 != 0 { -1.0 } else { 1.0 };
    let exponent = ((bits >> 24) & 0x7f) as i32 - 64;
    sign * fraction * 16.0_f64.powi(exponent)
}

/// Details of an imported file that matter for downstream processing.
#[derive(Debug, Clone, PartialEq)]
pub struct SegyImport {
    pub section: Section,
    /// Sample format code found in the binary header (1 or 5).
    pub format_code: i16,
    /// True when dx could not be derived from trace headers and the
    /// default 1.0 m was used.
    pub dx_defaulted: bool,
}

/// Read a minimal SEG-Y rev1 file into a section.
///
/// dt comes from the binary-header sample interval; dx from the CDP X
/// coordinates of the first two traces when they are present and distinct,
/// else 1.0 m (flagged in the result).
pub fn import_segy_minimal(path: impl AsRef<Path>) -> Result<SegyImport> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < TEXT_HEADER_LEN + BINARY_HEADER_LEN {
        return Err(Error::SegyMalformed(format!(
            "file is {} bytes, shorter than the {} byte header block",
            bytes.len(),
            TEXT_HEADER_LEN + BINARY_HEADER_LEN
        )));
    }
    let binary = &bytes[TEXT_HEADER_LEN..TEXT_HEADER_LEN + BINARY_HEADER_LEN];
    let interval_us = BigEndian::read_u16(&binary[BH_SAMPLE_INTERVAL..]);
    let ns = BigEndian::read_u16(&binary[BH_SAMPLES_PER_TRACE..]) as usize;
    let format_code = BigEndian::read_i16(&binary[BH_FORMAT_CODE..]);
    if format_code != 1 && format_code != 5 {
        return Err(Error::SegyUnsupportedFormat { code: format_code });
    }
    if ns == 0 {
        return Err(Error::SegyMalformed("zero samples per trace".into()));
    }
    if interval_us == 0 {
        return Err(Error::SegyMalformed("zero sample interval".into()));
    }
    let dt = interval_us as f64 * 1e-6;

    let body = &bytes[TEXT_HEADER_LEN + BINARY_HEADER_LEN..];
    let trace_len = TRACE_HEADER_LEN + ns * 4;
    if body.is_empty() || body.len() % trace_len != 0 {
        return Err(Error::SegyMalformed(format!(
            "trace data is {} bytes, not a multiple of the {} byte trace record (uniform length required)",
            body.len(),
            trace_len
        )));
    }
    let n_traces = body.len() / trace_len;

    // dx from the CDP X of the first two traces, honoring the coordinate
    // scalar convention (negative scalar divides).
    let coord_of = |trace_idx: usize| -> f64 {
        let header = &body[trace_idx * trace_len..];
        let raw = BigEndian::read_i32(&header[TH_CDP_X..]) as f64;
        let scalar = BigEndian::read_i16(&header[TH_COORD_SCALAR..]);
        match scalar {
            0 => raw,
            s if s > 0 => raw * s as f64,
            s => raw / (-s) as f64,
        }
    };
    let (dx, dx_defaulted) = if n_traces >= 2 {
        let spacing = coord_of(1) - coord_of(0);
        if spacing.is_finite() && spacing > 0.0 {
            (spacing, false)
        } else {
            (1.0, true)
        }
    } else {
        (1.0, true)
    };

    let mut samples = Vec::with_capacity(ns * n_traces);
    for tr in 0..n_traces {
        let data = &body[tr * trace_len + TRACE_HEADER_LEN..(tr + 1) * trace_len];
        for chunk in data.chunks_exact(4) {
            let word = BigEndian::read_u32(chunk);
            let v = match format_code {
                1 => ibm_to_f64(word),
                _ => f32::from_bits(word) as f64,
            };
            if !v.is_finite() {
                return Err(Error::SegyMalformed(format!(
                    "non-finite sample in trace {tr}"
                )));
            }
            samples.push(v);
        }
    }

    let section = Section::new(ns, n_traces, dt, dx, 0.0, samples)?;
    section.ensure_valid()?;
    Ok(SegyImport {
        section,
        format_code,
        dx_defaulted,
    })
}

/// Write a section as a minimal SEG-Y rev1 file with IEEE floats
/// (format code 5). Test and fixture generator: the import path is the
/// product, this writer exists so the round trip can be exercised without
/// external data.
pub fn write_segy_minimal(section: &Section, path: impl AsRef<Path>) -> Result<()> {
    section.ensure_valid()?;
    if section.nt > u16::MAX as usize {
        return Err(Error::InvalidParam {
            name: "nt",
            reason: format!("{} samples per trace exceeds the u16 header field", section.nt),
        });
    }
    let interval_us = (section.dt * 1e6).round() as u64;
    if interval_us == 0 || interval_us > u16::MAX as u64 {
        return Err(Error::InvalidParam {
            name: "dt",
            reason: format!("{} s does not fit the microsecond header field", section.dt),
        });
    }
    let mut bytes = Vec::with_capacity(
        TEXT_HEADER_LEN
            + BINARY_HEADER_LEN
            + section.nx * (TRACE_HEADER_LEN + section.nt * 4),
    );
    bytes.resize(TEXT_HEADER_LEN, 0x40); // EBCDIC spaces
    let mut binary = [0u8; BINARY_HEADER_LEN];
    BigEndian::write_u16(&mut binary[BH_SAMPLE_INTERVAL..], interval_us as u16);
    BigEndian::write_u16(&mut binary[BH_SAMPLES_PER_TRACE..], section.nt as u16);
    BigEndian::write_i16(&mut binary[BH_FORMAT_CODE..], 5);
    bytes.extend_from_slice(&binary);
    for ix in 0..section.nx {
        let mut header = [0u8; TRACE_HEADER_LEN];
        // Centimeter coordinates: negative scalar divides on read.
        BigEndian::write_i16(&mut header[TH_COORD_SCALAR..], -100);
        BigEndian::write_i32(
            &mut header[TH_CDP_X..],
            (ix as f64 * section.dx * 100.0).round() as i32,
        );
        bytes.extend_from_slice(&header);
        for &s in section.trace(ix) {
            bytes.extend_from_slice(&(s as f32).to_be_bytes());
        }
    }
    std::fs::write(path, bytes)?;
    Ok(())
}
