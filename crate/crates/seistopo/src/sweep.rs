//! Velocity analysis by loop counting: migrate over a velocity grid, score
//! each image by its first Betti number, and pick the velocity where the
//! interference loops bottom out.
//!
//! Each velocity is evaluated independently (migrate, optional window crop,
//! binarize, count), so the grid parallelizes cleanly; results are ordered
//! and deterministic regardless of thread count. Ties at the minimal `b1`
//! resolve to the lowest velocity: under-migration smears less than
//! over-migration, so the conservative pick is the slower one.

use crate::error::{Error, Result};
use crate::grid::{Section, Velocity};
use crate::migrate::{migrate_constant_v, MigrationParams};
use crate::topo::{betti, binarize, BettiPair};
use rayon::prelude::*;

/// Sub-rectangle of a section used for scoring, in sample/trace indices.
/// Bounds are half-open: rows `t0..t1`, columns `x0..x1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreWindow {
    pub t0: usize,
    pub t1: usize,
    pub x0: usize,
    pub x1: usize,
}

impl ScoreWindow {
    fn check(&self, section: &Section) -> Result<()> {
        if self.t0 >= self.t1
            || self.x0 >= self.x1
            || self.t1 > section.nt
            || self.x1 > section.nx
        {
            return Err(Error::InvalidParam {
                name: "window",
                reason: format!(
                    "window rows {}..{} cols {}..{} does not fit a {}x{} section",
                    self.t0, self.t1, self.x0, self.x1, section.nt, section.nx
                ),
            });
        }
        Ok(())
    }

    fn crop(&self, section: &Section) -> Section {
        let nt = self.t1 - self.t0;
        let nx = self.x1 - self.x0;
        let mut out = Section::zeros(nt, nx, section.dt, section.dx);
        out.t0 = section.t0 + self.t0 as f64 * section.dt;
        for (oix, ix) in (self.x0..self.x1).enumerate() {
            let src = &section.trace(ix)[self.t0..self.t1];
            out.trace_mut(oix).copy_from_slice(src);
        }
        out
    }
}

/// Specification of a velocity sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Lowest trial velocity, m/s.
    pub v_min: f64,
    /// Highest trial velocity, m/s.
    pub v_max: f64,
    /// Grid step, m/s.
    pub v_step: f64,
    /// Binarization fraction in (0, 1).
    pub tau: f64,
    /// Optional scoring window; full image when absent.
    pub window: Option<ScoreWindow>,
}

impl SweepSpec {
    pub fn new(v_min: f64, v_max: f64, v_step: f64, tau: f64) -> Result<Self> {
        let spec = SweepSpec {
            v_min,
            v_max,
            v_step,
            tau,
            window: None,
        };
        spec.velocities()?;
        Ok(spec)
    }

    /// The trial velocity grid `v_min, v_min + step, ..` up to `v_max`.
    pub fn velocities(&self) -> Result<Vec<f64>> {
        if !(self.v_min > 0.0) || self.v_min > self.v_max {
            return Err(Error::InvalidParam {
                name: "v_min/v_max",
                reason: format!(
                    "need 0 < v_min <= v_max, got {} and {}",
                    self.v_min, self.v_max
                ),
            });
        }
        if !(self.v_step > 0.0) {
            return Err(Error::InvalidParam {
                name: "v_step",
                reason: format!("must be > 0, got {}", self.v_step),
            });
        }
        let count = ((self.v_max - self.v_min) / self.v_step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|i| self.v_min + i as f64 * self.v_step)
            .collect())
    }
}

/// Score of one trial velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepEntry {
    /// Trial migration velocity, m/s.
    pub v: f64,
    pub b0: usize,
    pub b1: usize,
    /// Active pixels of the binarized image.
    pub active_pixels: usize,
    /// Set when the migrated (windowed) image was all zero and scoring was
    /// skipped rather than failed.
    pub degenerate: bool,
}

/// The Betti-vs-velocity curve and its argmin.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// One entry per trial velocity, sorted ascending by velocity.
    pub entries: Vec<SweepEntry>,
    /// Velocity of the minimal `b1`; ties resolve to the lowest velocity.
    pub argmin_v: f64,
    /// Binarization fraction used.
    pub tau: f64,
}

impl SweepResult {
    /// Entry at the argmin velocity.
    pub fn argmin_entry(&self) -> &SweepEntry {
        self.entries
            .iter()
            .find(|e| e.v == self.argmin_v)
            .expect("argmin velocity is always one of the entries")
    }
}

fn score_one(
    section: &Section,
    v: f64,
    tau: f64,
    window: Option<&ScoreWindow>,
) -> Result<SweepEntry> {
    let params = MigrationParams::new(Velocity::new(v)?);
    let migrated = migrate_constant_v(section, &params)?;
    let scored = match window {
        Some(w) => w.crop(&migrated),
        None => migrated,
    };
    if scored.max_abs() == 0.0 {
        return Ok(SweepEntry {
            v,
            b0: 0,
            b1: 0,
            active_pixels: 0,
            degenerate: true,
        });
    }
    let img = binarize(&scored, tau)?;
    let BettiPair { b0, b1 } = betti(&img);
    Ok(SweepEntry {
        v,
        b0,
        b1,
        active_pixels: img.active_pixels(),
        degenerate: false,
    })
}

/// Sweep the velocity grid, scoring each migrated image by `b1`.
pub fn velocity_sweep(section: &Section, spec: &SweepSpec) -> Result<SweepResult> {
    section.ensure_valid()?;
    if let Some(w) = &spec.window {
        w.check(section)?;
    }
    if !(spec.tau > 0.0 && spec.tau < 1.0) {
        return Err(Error::InvalidParam {
            name: "tau",
            reason: format!("must lie in (0, 1), got {}", spec.tau),
        });
    }
    let velocities = spec.velocities()?;
    let entries: Vec<SweepEntry> = velocities
        .par_iter()
        .map(|&v| score_one(section, v, spec.tau, spec.window.as_ref()))
        .collect::<Result<_>>()?;
    let argmin_v = entries
        .iter()
        .min_by(|a, b| (a.b1, a.v).partial_cmp(&(b.b1, b.v)).unwrap())
        .expect("velocity grid is never empty")
        .v;
    Ok(SweepResult {
        entries,
        argmin_v,
        tau: spec.tau,
    })
}

/// Migrate once at `v`, then binarize at each threshold fraction.
/// Returns `(tau, BettiPair, active_pixels)` per threshold.
pub fn threshold_sweep(
    section: &Section,
    v: Velocity,
    taus: &[f64],
) -> Result<Vec<(f64, BettiPair, usize)>> {
    section.ensure_valid()?;
    for &tau in taus {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::InvalidParam {
                name: "taus",
                reason: format!("every threshold must lie in (0, 1), got {tau}"),
            });
        }
    }
    let migrated = migrate_constant_v(section, &MigrationParams::new(v))?;
    taus.iter()
        .map(|&tau| {
            let img = binarize(&migrated, tau)?;
            let pair = betti(&img);
            Ok((tau, pair, img.active_pixels()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::three_diffractor_demo;

    fn demo_spec() -> SweepSpec {
        SweepSpec::new(500.0, 3000.0, 100.0, 0.1).unwrap()
    }

    #[test]
    fn velocity_grid_has_26_points() {
        let vs = demo_spec().velocities().unwrap();
        assert_eq!(vs.len(), 26);
        assert_eq!(vs[0], 500.0);
        assert_eq!(*vs.last().unwrap(), 3000.0);
    }

    #[test]
    fn single_velocity_grid_argmin_is_that_velocity() {
        let (_, demo) = three_diffractor_demo();
        let spec = SweepSpec {
            v_min: 1200.0,
            v_max: 1200.0,
            v_step: 100.0,
            tau: 0.1,
            window: None,
        };
        let result = velocity_sweep(&demo, &spec).unwrap();
        assert_eq!(result.entries.len(), 1);
        assert_eq!(result.argmin_v, 1200.0);
    }

    #[test]
    fn demo_sweep_recovers_true_velocity() {
        let (_, demo) = three_diffractor_demo();
        let result = velocity_sweep(&demo, &demo_spec()).unwrap();
        assert!(
            (result.argmin_v - 1500.0).abs() <= 100.0,
            "argmin {} should be 1500 +/- 100",
            result.argmin_v
        );
        // Curve shape: more loops far from the truth on both sides.
        let b1_at = |v: f64| {
            result
                .entries
                .iter()
                .find(|e| e.v == v)
                .map(|e| e.b1)
                .unwrap()
        };
        let b1_min = result.argmin_entry().b1;
        assert!(b1_at(500.0) > b1_min);
        assert!(b1_at(3000.0) > b1_min);
    }

    #[test]
    fn sweep_is_scale_invariant() {
        let (_, demo) = three_diffractor_demo();
        // Crop to a window for speed; scale invariance is exact regardless.
        let spec = SweepSpec {
            v_min: 1000.0,
            v_max: 2000.0,
            v_step: 250.0,
            tau: 0.1,
            window: Some(ScoreWindow {
                t0: 100,
                t1: 250,
                x0: 32,
                x1: 160,
            }),
        };
        let base = velocity_sweep(&demo, &spec).unwrap();
        let mut scaled = demo.clone();
        for v in &mut scaled.samples {
            *v *= 42.5;
        }
        let scaled_result = velocity_sweep(&scaled, &spec).unwrap();
        assert_eq!(base.entries, scaled_result.entries);
        assert_eq!(base.argmin_v, scaled_result.argmin_v);
    }

    #[test]
    fn sweep_entry_matches_standalone_composition() {
        let (_, demo) = three_diffractor_demo();
        let spec = SweepSpec {
            v_min: 1500.0,
            v_max: 1500.0,
            v_step: 100.0,
            tau: 0.1,
            window: None,
        };
        let swept = velocity_sweep(&demo, &spec).unwrap();
        let migrated = migrate_constant_v(
            &demo,
            &MigrationParams::new(Velocity::new(1500.0).unwrap()),
        )
        .unwrap();
        let img = binarize(&migrated, 0.1).unwrap();
        let pair = betti(&img);
        let entry = &swept.entries[0];
        assert_eq!((entry.b0, entry.b1), (pair.b0, pair.b1));
        assert_eq!(entry.active_pixels, img.active_pixels());
    }

    #[test]
    fn degenerate_window_is_flagged_not_failed() {
        // An all-zero section migrates to exactly zero: scoring records a
        // flagged zero entry instead of failing on the undefined threshold.
        let s = Section::zeros(64, 32, 0.004, 10.0);
        let spec = SweepSpec {
            v_min: 1500.0,
            v_max: 1500.0,
            v_step: 100.0,
            tau: 0.1,
            window: Some(ScoreWindow {
                t0: 0,
                t1: 4,
                x0: 0,
                x1: 4,
            }),
        };
        let result = velocity_sweep(&s, &spec).unwrap();
        assert!(result.entries[0].degenerate);
        assert_eq!(result.entries[0].b0, 0);
        assert_eq!(result.entries[0].b1, 0);
    }

    #[test]
    fn window_bounds_checked() {
        let (_, demo) = three_diffractor_demo();
        let spec = SweepSpec {
            v_min: 1500.0,
            v_max: 1500.0,
            v_step: 100.0,
            tau: 0.1,
            window: Some(ScoreWindow {
                t0: 0,
                t1: 1000,
                x0: 0,
                x1: 4,
            }),
        };
        assert!(velocity_sweep(&demo, &spec).is_err());
    }

    #[test]
    fn threshold_sweep_consistent_and_monotone() {
        let (_, demo) = three_diffractor_demo();
        let v = Velocity::new(1500.0).unwrap();
        let taus = [0.05, 0.1, 0.2];
        let curve = threshold_sweep(&demo, v, &taus).unwrap();
        assert_eq!(curve.len(), 3);
        // Active pixels shrink as the threshold rises.
        assert!(curve[0].2 >= curve[1].2);
        assert!(curve[1].2 >= curve[2].2);
        // Single-tau agreement with velocity_sweep scoring.
        let spec = SweepSpec {
            v_min: 1500.0,
            v_max: 1500.0,
            v_step: 1.0,
            tau: 0.1,
            window: None,
        };
        let swept = velocity_sweep(&demo, &spec).unwrap();
        assert_eq!(swept.entries[0].b1, curve[1].1.b1);
        assert_eq!(swept.entries[0].b0, curve[1].1.b0);
    }
}
