//! Core grid and trace types shared by every processing module.
//!
//! A [`Section`] is a regularly sampled 2-D seismic grid: `nt` time samples
//! per trace, `nx` traces, with sampling metadata. Samples are stored in
//! column-per-trace layout (all samples of trace 0, then trace 1, ...) so
//! per-trace operations touch contiguous memory. Amplitudes are `f64`
//! internally; the on-disk grid format stores `f32` (see the `io` module).

use crate::error::{Error, Result};

/// A regularly sampled 2-D seismic section (time x lateral position).
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    /// Samples per trace.
    pub nt: usize,
    /// Number of traces.
    pub nx: usize,
    /// Time sampling interval, seconds.
    pub dt: f64,
    /// Trace spacing, meters.
    pub dx: f64,
    /// Time of the first sample, seconds.
    pub t0: f64,
    /// Amplitudes, trace-major: `samples[ix * nt + it]`.
    pub samples: Vec<f64>,
}

impl Section {
    /// Build a section from parts. Rejects only the violations that make the
    /// value unusable as a container (`nt`/`nx` of zero); everything else is
    /// representable and reported by [`Section::validate`].
    pub fn new(nt: usize, nx: usize, dt: f64, dx: f64, t0: f64, samples: Vec<f64>) -> Result<Self> {
        if nt == 0 || nx == 0 {
            return Err(Error::InvalidSection(format!(
                "grid must be at least 1x1, got {nt}x{nx}"
            )));
        }
        Ok(Section {
            nt,
            nx,
            dt,
            dx,
            t0,
            samples,
        })
    }

    /// All-zero section with the given geometry.
    pub fn zeros(nt: usize, nx: usize, dt: f64, dx: f64) -> Self {
        Section {
            nt,
            nx,
            dt,
            dx,
            t0: 0.0,
            samples: vec![0.0; nt * nx],
        }
    }

    /// Amplitude at time index `it` of trace `ix`.
    #[inline]
    pub fn at(&self, it: usize, ix: usize) -> f64 {
        self.samples[ix * self.nt + it]
    }

    /// Mutable amplitude at time index `it` of trace `ix`.
    #[inline]
    pub fn at_mut(&mut self, it: usize, ix: usize) -> &mut f64 {
        &mut self.samples[ix * self.nt + it]
    }

    /// Samples of trace `ix`.
    #[inline]
    pub fn trace(&self, ix: usize) -> &[f64] {
        &self.samples[ix * self.nt..(ix + 1) * self.nt]
    }

    /// Mutable samples of trace `ix`.
    #[inline]
    pub fn trace_mut(&mut self, ix: usize) -> &mut [f64] {
        let nt = self.nt;
        &mut self.samples[ix * nt..(ix + 1) * nt]
    }

    /// Iterator over traces in lateral order.
    pub fn traces(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks_exact(self.nt)
    }

    /// A copy of trace `ix` with the section's sampling interval.
    pub fn trace_owned(&self, ix: usize) -> Trace {
        Trace {
            dt: self.dt,
            samples: self.trace(ix).to_vec(),
        }
    }

    /// Check every invariant and return a report of all violations found.
    /// The report is empty iff the section is valid. Never aborts.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            violations.push(Violation::NonPositiveDt(self.dt));
        }
        if !(self.dx > 0.0) || !self.dx.is_finite() {
            violations.push(Violation::NonPositiveDx(self.dx));
        }
        if !(self.t0 >= 0.0) || !self.t0.is_finite() {
            violations.push(Violation::NegativeT0(self.t0));
        }
        if self.samples.len() != self.nt * self.nx {
            violations.push(Violation::SizeMismatch {
                expected: self.nt * self.nx,
                found: self.samples.len(),
            });
        } else {
            for (flat, &s) in self.samples.iter().enumerate() {
                if !s.is_finite() {
                    violations.push(Violation::NonFiniteSample {
                        it: flat % self.nt,
                        ix: flat / self.nt,
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    /// Error out unless the section is valid; used by operations whose
    /// contract assumes a valid input.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSection(report.to_string()))
        }
    }

    /// Maximum absolute amplitude over all samples; 0 for an all-zero section.
    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, &s| m.max(s.abs()))
    }
}

/// A single trace: one column of a section.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// Time sampling interval, seconds.
    pub dt: f64,
    /// Amplitudes.
    pub samples: Vec<f64>,
}

impl Trace {
    pub fn new(dt: f64, samples: Vec<f64>) -> Self {
        Trace { dt, samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// A strictly positive migration/medium velocity in m/s.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Velocity(f64);

impl Velocity {
    pub fn new(v: f64) -> Result<Self> {
        if v.is_finite() && v > 0.0 {
            Ok(Velocity(v))
        } else {
            Err(Error::InvalidParam {
                name: "velocity",
                reason: format!("must be finite and > 0, got {v}"),
            })
        }
    }

    #[inline]
    pub fn mps(self) -> f64 {
        self.0
    }
}

/// One invariant violation found by [`Section::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveDt(f64),
    NonPositiveDx(f64),
    NegativeT0(f64),
    SizeMismatch { expected: usize, found: usize },
    NonFiniteSample { it: usize, ix: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NonPositiveDt(dt) => write!(f, "dt must be > 0, got {dt}"),
            Violation::NonPositiveDx(dx) => write!(f, "dx must be > 0, got {dx}"),
            Violation::NegativeT0(t0) => write!(f, "t0 must be finite and >= 0, got {t0}"),
            Violation::SizeMismatch { expected, found } => {
                write!(f, "expected {expected} samples (nt*nx), found {found}")
            }
            Violation::NonFiniteSample { it, ix } => {
                write!(f, "non-finite sample at (it={it}, ix={ix})")
            }
        }
    }
}

/// Outcome of validating a section: the full list of violations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_zeros_section_is_valid() {
        let s = Section::zeros(4, 4, 0.004, 10.0);
        assert!(s.validate().is_empty());
    }

    #[test]
    fn nan_sample_reported_with_index() {
        let mut s = Section::zeros(4, 4, 0.004, 10.0);
        *s.at_mut(2, 3) = f64::NAN;
        let report = s.validate();
        assert_eq!(
            report.violations,
            vec![Violation::NonFiniteSample { it: 2, ix: 3 }]
        );
    }

    #[test]
    fn zero_dt_reported() {
        let mut s = Section::zeros(4, 4, 0.004, 10.0);
        s.dt = 0.0;
        let report = s.validate();
        assert_eq!(report.violations, vec![Violation::NonPositiveDt(0.0)]);
    }

    #[test]
    fn size_mismatch_reported() {
        let mut s = Section::zeros(4, 4, 0.004, 10.0);
        s.samples.pop();
        let report = s.validate();
        assert_eq!(
            report.violations,
            vec![Violation::SizeMismatch {
                expected: 16,
                found: 15
            }]
        );
    }

    #[test]
    fn multiple_violations_all_reported() {
        let mut s = Section::zeros(3, 2, 0.004, 10.0);
        s.dt = -1.0;
        s.dx = 0.0;
        *s.at_mut(0, 0) = f64::INFINITY;
        let report = s.validate();
        assert_eq!(report.violations.len(), 3);
    }

    #[test]
    fn max_abs_zero_case() {
        assert_eq!(Section::zeros(4, 4, 0.004, 10.0).max_abs(), 0.0);
    }

    #[test]
    fn max_abs_picks_largest_magnitude() {
        let s = Section::new(3, 1, 0.004, 10.0, 0.0, vec![1.0, -3.0, 2.0]).unwrap();
        assert_eq!(s.max_abs(), 3.0);
    }

    #[test]
    fn max_abs_homogeneity() {
        let s = Section::new(3, 2, 0.004, 10.0, 0.0, vec![1.0, -3.0, 2.0, 0.5, -0.25, 2.5])
            .unwrap();
        let base = s.max_abs();
        for c in [0.5, 2.0, 7.25] {
            let mut scaled = s.clone();
            for v in &mut scaled.samples {
                *v *= c;
            }
            assert!((scaled.max_abs() - c * base).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_layout_is_contiguous_per_trace() {
        let mut s = Section::zeros(3, 2, 0.004, 10.0);
        *s.at_mut(0, 1) = 7.0;
        assert_eq!(s.trace(1), &[7.0, 0.0, 0.0]);
        assert_eq!(s.samples[3], 7.0);
    }

    #[test]
    fn velocity_rejects_non_positive() {
        assert!(Velocity::new(0.0).is_err());
        assert!(Velocity::new(-1.0).is_err());
        assert!(Velocity::new(f64::NAN).is_err());
        assert_eq!(Velocity::new(1500.0).unwrap().mps(), 1500.0);
    }

    #[test]
    fn empty_grid_rejected_at_construction() {
        assert!(Section::new(0, 4, 0.004, 10.0, 0.0, vec![]).is_err());
    }
}
