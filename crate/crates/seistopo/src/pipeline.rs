//! End-to-end processing pipeline: despike, velocity sweep, diffusion
//! denoise, final migration — in that fixed order, each stage individually
//! skippable.
//!
//! The sweep stage picks the migration velocity (argmin of `b1`) and hands
//! it to the final migration; when the sweep is skipped the config must
//! name a fixed velocity instead. Configuration is TOML with unknown keys
//! rejected, so a typo fails the run instead of silently applying defaults.
//! Intermediate grids, the sweep CSV, and the curve SVG are written next to
//! the report; identical config and input produce identical files.

use crate::diffuse::{diffuse_denoise, DiffusionParams};
use crate::error::{Error, Result};
use crate::grid::{Section, Velocity};
use crate::io::{emit_csv, emit_curve_svg, write_grid};
use crate::migrate::{migrate_constant_v, Interp, MigrationParams};
use crate::sweep::{velocity_sweep, ScoreWindow, SweepResult, SweepSpec};
use crate::tvl1::{despike_section, DespikeParams, SpikeEditParams};
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Despike stage configuration.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DespikeConfig {
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_k_mad")]
    pub k_mad: f64,
    /// Optional TV pass weight as a fraction of the section peak.
    #[serde(default)]
    pub tv_lambda_frac: Option<f64>,
}

fn default_window() -> usize {
    25
}
fn default_k_mad() -> f64 {
    6.0
}

/// Sweep stage configuration.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub v_min: f64,
    pub v_max: f64,
    pub v_step: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Optional scoring window `[t0, t1, x0, x1]` in sample/trace indices.
    #[serde(default)]
    pub window: Option<[usize; 4]>,
}

fn default_tau() -> f64 {
    0.1
}

/// Diffusion stage configuration.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DiffuseConfig {
    #[serde(default = "default_patch")]
    pub patch: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_t")]
    pub t: u32,
    #[serde(default = "default_r")]
    pub r: usize,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
}

fn default_patch() -> usize {
    5
}
fn default_epsilon() -> f64 {
    1.0
}
fn default_t() -> u32 {
    2
}
fn default_r() -> usize {
    32
}
fn default_max_points() -> usize {
    4096
}

/// Final migration configuration.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MigrateConfig {
    /// Fixed velocity, m/s. Required when the sweep stage is skipped;
    /// otherwise the sweep's argmin wins and this must be absent.
    #[serde(default)]
    pub velocity: Option<f64>,
    #[serde(default = "default_pad")]
    pub pad_t: u32,
    #[serde(default = "default_pad")]
    pub pad_x: u32,
    #[serde(default = "default_interp")]
    pub interp: String,
}

fn default_pad() -> u32 {
    2
}
fn default_interp() -> String {
    "sinc".into()
}

/// Full pipeline configuration. Stage order is fixed
/// (despike -> sweep -> diffuse -> migrate); absent tables are skipped.
#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub despike: Option<DespikeConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub diffuse: Option<DiffuseConfig>,
    #[serde(default)]
    pub migrate: Option<MigrateConfig>,
}

impl PipelineConfig {
    /// Parse from TOML text, rejecting unknown keys.
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: PipelineConfig =
            toml::from_str(text).map_err(|e| Error::BadConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.despike.is_none()
            && self.sweep.is_none()
            && self.diffuse.is_none()
            && self.migrate.is_none()
        {
            return Err(Error::BadConfig(
                "all stages skipped; nothing to run".into(),
            ));
        }
        if let Some(m) = &self.migrate {
            match (&self.sweep, m.velocity) {
                (None, None) => {
                    return Err(Error::BadConfig(
                        "final migration needs either a sweep stage or a fixed `velocity`".into(),
                    ))
                }
                (Some(_), Some(_)) => {
                    return Err(Error::BadConfig(
                        "`migrate.velocity` conflicts with the sweep stage; the sweep picks the velocity".into(),
                    ))
                }
                _ => {}
            }
            if m.interp != "sinc" && m.interp != "linear" {
                return Err(Error::BadConfig(format!(
                    "unknown interpolation `{}` (use \"sinc\" or \"linear\")",
                    m.interp
                )));
            }
        }
        Ok(())
    }
}

/// What one pipeline run did: per-stage parameter echoes, the selected
/// velocity, and every file written.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    /// Human-readable per-stage lines, in execution order.
    pub stages: Vec<String>,
    /// Velocity used by the final migration, when one ran.
    pub selected_velocity: Option<f64>,
    /// Argmin from the sweep stage, when it ran.
    pub sweep_argmin: Option<f64>,
    /// Files written, in creation order.
    pub outputs: Vec<PathBuf>,
}

impl PipelineReport {
    /// Rendered report text. Output files appear by name only, so identical
    /// runs into different directories produce identical reports.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for line in &self.stages {
            s.push_str(line);
            s.push('\n');
        }
        if let Some(v) = self.selected_velocity {
            s.push_str(&format!("selected velocity: {v} m/s\n"));
        }
        for p in &self.outputs {
            let name = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string());
            s.push_str(&format!("wrote {name}\n"));
        }
        s
    }
}

/// Run the enabled stages in order on `input`, writing intermediates and
/// reports into `out_dir`. Any stage failure aborts with the stage name;
/// files already written stay on disk.
pub fn run_pipeline(
    config: &PipelineConfig,
    input: &Section,
    out_dir: impl AsRef<Path>,
) -> Result<(PipelineReport, Section)> {
    config.validate()?;
    input.ensure_valid().map_err(|e| e.in_stage("input"))?;
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::from(e).in_stage("output dir"))?;

    let mut report = PipelineReport {
        stages: Vec::new(),
        selected_velocity: None,
        sweep_argmin: None,
        outputs: Vec::new(),
    };
    let mut current = input.clone();

    if let Some(cfg) = &config.despike {
        let params = DespikeParams {
            edit: SpikeEditParams::new(cfg.window, cfg.k_mad).map_err(|e| e.in_stage("despike"))?,
            tv_lambda_frac: cfg.tv_lambda_frac,
        };
        current = despike_section(&current, &params).map_err(|e| e.in_stage("despike"))?;
        let path = out_dir.join("despiked.sgrd");
        write_grid(&current, &path).map_err(|e| e.in_stage("despike"))?;
        report.stages.push(format!(
            "despike: window={} k_mad={} tv_lambda_frac={:?}",
            cfg.window, cfg.k_mad, cfg.tv_lambda_frac
        ));
        report.outputs.push(path);
    }

    let mut sweep_result: Option<SweepResult> = None;
    if let Some(cfg) = &config.sweep {
        let spec = SweepSpec {
            v_min: cfg.v_min,
            v_max: cfg.v_max,
            v_step: cfg.v_step,
            tau: cfg.tau,
            window: cfg.window.map(|[t0, t1, x0, x1]| ScoreWindow { t0, t1, x0, x1 }),
        };
        let result = velocity_sweep(&current, &spec).map_err(|e| e.in_stage("sweep"))?;
        let csv_path = out_dir.join("sweep.csv");
        emit_csv(&result, &csv_path).map_err(|e| e.in_stage("sweep"))?;
        let svg_path = out_dir.join("sweep.svg");
        emit_curve_svg(&result, &svg_path).map_err(|e| e.in_stage("sweep"))?;
        report.stages.push(format!(
            "sweep: {}..{} step {} tau={} -> argmin {} m/s (b1={})",
            cfg.v_min,
            cfg.v_max,
            cfg.v_step,
            cfg.tau,
            result.argmin_v,
            result.argmin_entry().b1
        ));
        report.sweep_argmin = Some(result.argmin_v);
        report.outputs.push(csv_path);
        report.outputs.push(svg_path);
        sweep_result = Some(result);
    }

    if let Some(cfg) = &config.diffuse {
        let params = DiffusionParams {
            patch: cfg.patch,
            epsilon: cfg.epsilon,
            t: cfg.t,
            r: cfg.r,
            max_points: cfg.max_points,
        };
        current = diffuse_denoise(&current, &params).map_err(|e| e.in_stage("diffuse"))?;
        let path = out_dir.join("diffused.sgrd");
        write_grid(&current, &path).map_err(|e| e.in_stage("diffuse"))?;
        report.stages.push(format!(
            "diffuse: patch={} epsilon={} t={} r={} max_points={}",
            cfg.patch, cfg.epsilon, cfg.t, cfg.r, cfg.max_points
        ));
        report.outputs.push(path);
    }

    if let Some(cfg) = &config.migrate {
        let v = match (&sweep_result, cfg.velocity) {
            (Some(r), None) => r.argmin_v,
            (None, Some(v)) => v,
            // validate() has excluded the other combinations.
            _ => unreachable!("config validation enforces sweep xor velocity"),
        };
        let params = MigrationParams {
            v: Velocity::new(v).map_err(|e| e.in_stage("migrate"))?,
            pad_t: cfg.pad_t,
            pad_x: cfg.pad_x,
            interp: if cfg.interp == "linear" {
                Interp::Linear
            } else {
                Interp::Sinc
            },
        };
        current = migrate_constant_v(&current, &params).map_err(|e| e.in_stage("migrate"))?;
        let path = out_dir.join("migrated.sgrd");
        write_grid(&current, &path).map_err(|e| e.in_stage("migrate"))?;
        report.stages.push(format!(
            "migrate: v={v} pad_t={} pad_x={} interp={}",
            cfg.pad_t, cfg.pad_x, cfg.interp
        ));
        report.selected_velocity = Some(v);
        report.outputs.push(path);
    }

    let report_path = out_dir.join("report.txt");
    std::fs::write(&report_path, report.render()).map_err(|e| Error::from(e).in_stage("report"))?;
    report.outputs.push(report_path);
    Ok((report, current))
}
