//! Zero-offset synthetics: point-diffractor sections with a Ricker source.
//!
//! Each diffractor at lateral position `x_d` and depth `z_d` in a constant
//! medium of velocity `v` produces a hyperbolic event with two-way zero-offset
//! time `t(x) = (2/v) * sqrt(z_d^2 + (x - x_d)^2)`. The wavelet is evaluated
//! analytically at every sample inside its support, so responses are smooth,
//! exactly linear in the model, and deterministic.
//!
//! The canonical [`three_diffractor_demo`] is a desk-scale reconstruction:
//! its grid (512 samples x 256 traces, dt = 4 ms, dx = 10 m), diffractor
//! placement, and 25 Hz wavelet are documented repository constants, not
//! values taken from any survey.

use crate::error::{Error, Result};
use crate::grid::{Section, Trace};
use rayon::prelude::*;

/// A point scatterer: lateral position and depth in meters, unitless amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diffractor {
    pub x: f64,
    pub z: f64,
    pub amp: f64,
}

/// Point-scatterer model for synthetic generation.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffractorModel {
    pub diffractors: Vec<Diffractor>,
    /// Medium velocity, m/s.
    pub v_true: f64,
    /// Ricker peak frequency, Hz.
    pub wavelet_peak_freq: f64,
    /// Scale each contribution by 1/t (geometric spreading). Off by default:
    /// the downstream Betti analysis is threshold based and the plain
    /// kinematically correct response is the simplest adequate input.
    pub spreading: bool,
}

impl DiffractorModel {
    pub fn new(diffractors: Vec<Diffractor>, v_true: f64, wavelet_peak_freq: f64) -> Self {
        DiffractorModel {
            diffractors,
            v_true,
            wavelet_peak_freq,
            spreading: false,
        }
    }

    /// Check the model against a target grid: depths positive, lateral
    /// positions on the grid, velocity positive, wavelet below Nyquist.
    pub fn validate_against(&self, nt: usize, nx: usize, dt: f64, dx: f64) -> Result<()> {
        if !(self.v_true > 0.0) || !self.v_true.is_finite() {
            return Err(Error::InvalidParam {
                name: "v_true",
                reason: format!("must be finite and > 0, got {}", self.v_true),
            });
        }
        let nyquist = 0.5 / dt;
        if !(self.wavelet_peak_freq > 0.0) || self.wavelet_peak_freq >= nyquist {
            return Err(Error::FrequencyAboveNyquist {
                freq: self.wavelet_peak_freq,
                nyquist,
            });
        }
        let x_max = (nx - 1) as f64 * dx;
        for (i, d) in self.diffractors.iter().enumerate() {
            if !(d.z > 0.0) {
                return Err(Error::InvalidParam {
                    name: "diffractor depth",
                    reason: format!("diffractor {i} has z = {}, must be > 0", d.z),
                });
            }
            if d.x < 0.0 || d.x > x_max {
                return Err(Error::InvalidParam {
                    name: "diffractor position",
                    reason: format!(
                        "diffractor {i} at x = {} outside the grid [0, {x_max}]",
                        d.x
                    ),
                });
            }
        }
        let _ = nt;
        Ok(())
    }
}

/// Ricker wavelet value at time `t` for peak frequency `f`:
/// `(1 - 2 pi^2 f^2 t^2) * exp(-pi^2 f^2 t^2)`.
#[inline]
pub fn ricker_value(peak_freq: f64, t: f64) -> f64 {
    let u = (std::f64::consts::PI * peak_freq * t).powi(2);
    (1.0 - 2.0 * u) * (-u).exp()
}

/// Sampled Ricker wavelet at `t = k * dt` for `k` in `[-half_len, half_len]`.
/// Peak value is exactly 1 at `t = 0`. Rejects frequencies at or above the
/// Nyquist limit `1/(2 dt)`.
pub fn ricker(peak_freq: f64, dt: f64, half_len: usize) -> Result<Trace> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParam {
            name: "dt",
            reason: format!("must be > 0, got {dt}"),
        });
    }
    let nyquist = 0.5 / dt;
    if !(peak_freq > 0.0) || peak_freq >= nyquist {
        return Err(Error::FrequencyAboveNyquist {
            freq: peak_freq,
            nyquist,
        });
    }
    let n = 2 * half_len + 1;
    let samples = (0..n)
        .map(|k| {
            let t = (k as f64 - half_len as f64) * dt;
            ricker_value(peak_freq, t)
        })
        .collect();
    Ok(Trace::new(dt, samples))
}

/// Half-width of the wavelet support used when painting events, seconds.
/// At `2/f` the Ricker envelope is below 1e-17 of its peak.
fn support_half_width(peak_freq: f64) -> f64 {
    2.0 / peak_freq
}

/// Zero-offset response of a diffractor model on the given grid.
///
/// For each diffractor and each trace at lateral position `x`, the wavelet is
/// centered on the two-way time `t(x) = (2/v) * sqrt(z^2 + (x - x_d)^2)` and
/// scaled by the diffractor amplitude; contributions sum linearly. Arrivals
/// beyond the trace end are clipped silently.
pub fn diffraction_response(
    model: &DiffractorModel,
    nt: usize,
    nx: usize,
    dt: f64,
    dx: f64,
) -> Result<Section> {
    model.validate_against(nt, nx, dt, dx)?;
    let f = model.wavelet_peak_freq;
    let half_w = support_half_width(f);
    let mut section = Section::zeros(nt, nx, dt, dx);

    section
        .samples
        .par_chunks_exact_mut(nt)
        .enumerate()
        .for_each(|(ix, trace)| {
            let x = ix as f64 * dx;
            for d in &model.diffractors {
                let offset = x - d.x;
                let t_arrival = (2.0 / model.v_true) * (d.z * d.z + offset * offset).sqrt();
                let scale = if model.spreading {
                    d.amp / t_arrival.max(dt)
                } else {
                    d.amp
                };
                // Only samples inside the wavelet support contribute; the
                // rest of the trace stays exactly zero.
                let k_lo = ((t_arrival - half_w) / dt).ceil().max(0.0) as usize;
                let k_hi = (((t_arrival + half_w) / dt).floor() as isize).min(nt as isize - 1);
                if k_hi < 0 || k_lo > k_hi as usize {
                    continue;
                }
                for (off, v) in trace[k_lo..=(k_hi as usize)].iter_mut().enumerate() {
                    let t = (k_lo + off) as f64 * dt;
                    *v += scale * ricker_value(f, t - t_arrival);
                }
            }
        });
    Ok(section)
}

/// Grid constants of the canonical demo.
pub const DEMO_NT: usize = 512;
pub const DEMO_NX: usize = 256;
pub const DEMO_DT: f64 = 0.004;
pub const DEMO_DX: f64 = 10.0;
/// True medium velocity of the demo, m/s.
pub const DEMO_V_TRUE: f64 = 1500.0;
/// Demo wavelet peak frequency, Hz.
pub const DEMO_PEAK_FREQ: f64 = 25.0;

/// Diffractor placement of the demo. Depths put the apexes at 0.6 s, 1.0 s,
/// and 1.4 s; lateral positions sit on traces 64, 128, and 192.
pub const DEMO_DIFFRACTORS: [Diffractor; 3] = [
    Diffractor {
        x: 640.0,
        z: 450.0,
        amp: 1.0,
    },
    Diffractor {
        x: 1280.0,
        z: 750.0,
        amp: 1.0,
    },
    Diffractor {
        x: 1920.0,
        z: 1050.0,
        amp: 1.0,
    },
];

/// The repository's canonical three-diffractor dataset: 256 traces of 512
/// samples, dt = 4 ms, dx = 10 m, medium velocity 1500 m/s, 25 Hz wavelet.
/// Deterministic: identical output on every call.
pub fn three_diffractor_demo() -> (DiffractorModel, Section) {
    let model = DiffractorModel::new(DEMO_DIFFRACTORS.to_vec(), DEMO_V_TRUE, DEMO_PEAK_FREQ);
    let section = diffraction_response(&model, DEMO_NT, DEMO_NX, DEMO_DT, DEMO_DX)
        .expect("demo constants are valid by construction");
    (model, section)
}
