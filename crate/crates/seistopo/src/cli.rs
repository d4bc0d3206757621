//! Command-line interface of the `seistopo` binary.
//!
//! One thin dispatcher over the library: every subcommand parses arguments,
//! calls the corresponding module, and reports results on stdout. Errors go
//! to stderr with the failing stage or file named, and the process exits
//! nonzero. `--threads 1` is the determinism reference; any thread count
//! produces byte-identical outputs.

use crate::diffuse::{diffuse_denoise, DiffusionParams};
use crate::error::{Error, Result};
use crate::grid::Velocity;
use crate::io::{
    emit_csv, emit_curve_svg, export_section_csv, read_grid, write_grid,
};
use crate::migrate::{migrate_constant_v, semigroup_panels, Interp, MigrationParams};
use crate::pipeline::{run_pipeline, PipelineConfig};
use crate::segy::import_segy_minimal;
use crate::sweep::{velocity_sweep, ScoreWindow, SweepSpec};
use crate::synth::three_diffractor_demo;
use crate::topo::{betti, binarize};
use crate::tvl1::{despike_section, DespikeParams, SpikeEditParams};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "seistopo",
    version,
    about = "Seismic imaging toolkit: TV despiking, semigroup migration, Betti-number velocity analysis, diffusion denoising"
)]
struct Cli {
    /// Input file (SGRD grid unless the subcommand says otherwise).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file or directory, depending on the subcommand.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker thread count. 1 is the determinism reference; any N gives
    /// identical results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the canonical three-diffractor synthetic to --output.
    Synth(SynthArgs),
    /// Despike --input with the median/MAD + interpolation preset.
    Despike(DespikeArgs),
    /// Migrate --input at a fixed velocity.
    Migrate(MigrateArgs),
    /// Write the cascade panel sequence A^0 u .. A^(n-1) u into --output/.
    Panels(PanelsArgs),
    /// Binarize --input and print "label,b0,b1".
    Betti(BettiArgs),
    /// Velocity sweep: CSV (--output) and SVG curve (--svg) with argmin.
    Sweep(SweepArgs),
    /// Diffusion-map denoise --input.
    Diffuse(DiffuseArgs),
    /// Run the staged pipeline from a TOML config into --output/.
    Pipeline(PipelineArgs),
    /// Import a minimal SEG-Y rev1 file (formats 1 and 5) as an SGRD grid.
    ImportSegy,
    /// Dump an SGRD grid as plain CSV (rows = time samples).
    ExportCsv,
}

#[derive(Args)]
struct SynthArgs {
    /// Inject a spike of 10x the peak amplitude at "t_index,x_index".
    #[arg(long, value_name = "IT,IX")]
    spike: Option<String>,
}

#[derive(Args)]
struct DespikeArgs {
    /// Detection window length (odd).
    #[arg(long, default_value_t = 25)]
    window: usize,
    /// MAD threshold multiplier.
    #[arg(long, default_value_t = 6.0)]
    k_mad: f64,
    /// Optional TV pass weight as a fraction of the section peak.
    #[arg(long)]
    tv_lambda_frac: Option<f64>,
}

#[derive(Args)]
struct MigrateArgs {
    /// Migration velocity, m/s.
    #[arg(long)]
    velocity: f64,
    #[arg(long, default_value_t = 2)]
    pad_t: u32,
    #[arg(long, default_value_t = 2)]
    pad_x: u32,
    /// Frequency interpolation: "sinc" or "linear".
    #[arg(long, default_value = "sinc")]
    interp: String,
}

#[derive(Args)]
struct PanelsArgs {
    /// Base velocity of the cascade, m/s.
    #[arg(long, default_value_t = 500.0)]
    base_v: f64,
    /// Panel count including panel 0 (the input).
    #[arg(long, default_value_t = 26)]
    count: usize,
}

#[derive(Args)]
struct BettiArgs {
    /// Binarization fraction in (0, 1).
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    /// Row label; defaults to the input file stem.
    #[arg(long)]
    label: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 500.0)]
    v_min: f64,
    #[arg(long, default_value_t = 3000.0)]
    v_max: f64,
    #[arg(long, default_value_t = 100.0)]
    v_step: f64,
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    /// Scoring window "t0,t1,x0,x1" (half-open sample/trace bounds).
    #[arg(long, value_name = "T0,T1,X0,X1")]
    window: Option<String>,
    /// Also write the b1-vs-velocity curve as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct DiffuseArgs {
    #[arg(long, default_value_t = 5)]
    patch: usize,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 2)]
    t: u32,
    #[arg(long, default_value_t = 32)]
    r: usize,
    #[arg(long, default_value_t = 4096)]
    max_points: usize,
}

#[derive(Args)]
struct PipelineArgs {
    /// TOML pipeline configuration.
    #[arg(long)]
    config: PathBuf,
}

/// Parse and run the process arguments; returns the exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be >= 1");
            return 1;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return 1;
        }
    }
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn require_input(cli: &Cli) -> Result<PathBuf> {
    cli.input.clone().ok_or_else(|| Error::InvalidParam {
        name: "--input",
        reason: "this subcommand reads a file; pass --input <path>".into(),
    })
}

fn require_output(cli: &Cli) -> Result<PathBuf> {
    cli.output.clone().ok_or_else(|| Error::InvalidParam {
        name: "--output",
        reason: "this subcommand writes a file; pass --output <path>".into(),
    })
}

fn parse_indices<const N: usize>(text: &str, what: &'static str) -> Result<[usize; N]> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidParam {
            name: what,
            reason: format!("expected {N} comma-separated indices: {e}"),
        })?;
    parts.try_into().map_err(|_| Error::InvalidParam {
        name: what,
        reason: format!("expected exactly {N} comma-separated indices"),
    })
}

fn dispatch(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Synth(args) => {
            let output = require_output(&cli)?;
            let (_, mut section) = three_diffractor_demo();
            if let Some(spec) = &args.spike {
                let [it, ix] = parse_indices::<2>(spec, "--spike")?;
                if it >= section.nt || ix >= section.nx {
                    return Err(Error::InvalidParam {
                        name: "--spike",
                        reason: format!(
                            "({it}, {ix}) outside the {}x{} demo grid",
                            section.nt, section.nx
                        ),
                    });
                }
                let spike = 10.0 * section.max_abs();
                *section.at_mut(it, ix) = spike;
                println!("injected spike {spike} at (t={it}, x={ix})");
            }
            write_grid(&section, &output)?;
            println!(
                "wrote {} ({}x{} samples, dt={} s, dx={} m)",
                output.display(),
                section.nt,
                section.nx,
                section.dt,
                section.dx
            );
            Ok(())
        }
        Command::Despike(args) => {
            let input = require_input(&cli)?;
            let output = require_output(&cli)?;
            let section = read_grid(&input)?;
            let params = DespikeParams {
                edit: SpikeEditParams::new(args.window, args.k_mad)?,
                tv_lambda_frac: args.tv_lambda_frac,
            };
            let cleaned = despike_section(&section, &params)?;
            write_grid(&cleaned, &output)?;
            println!("wrote {}", output.display());
            Ok(())
        }
        Command::Migrate(args) => {
            let input = require_input(&cli)?;
            let output = require_output(&cli)?;
            let section = read_grid(&input)?;
            let params = MigrationParams {
                v: Velocity::new(args.velocity)?,
                pad_t: args.pad_t,
                pad_x: args.pad_x,
                interp: parse_interp(&args.interp)?,
            };
            let migrated = migrate_constant_v(&section, &params)?;
            write_grid(&migrated, &output)?;
            println!("wrote {} (v = {} m/s)", output.display(), args.velocity);
            Ok(())
        }
        Command::Panels(args) => {
            let input = require_input(&cli)?;
            let out_dir = require_output(&cli)?;
            let section = read_grid(&input)?;
            let seq = semigroup_panels(&section, Velocity::new(args.base_v)?, args.count)?;
            std::fs::create_dir_all(&out_dir)?;
            for (k, panel) in seq.panels.iter().enumerate() {
                let path = out_dir.join(format!("panel_{k:03}.sgrd"));
                write_grid(panel, &path)?;
            }
            println!(
                "wrote {} panels (base velocity {} m/s) into {}",
                seq.count(),
                args.base_v,
                out_dir.display()
            );
            Ok(())
        }
        Command::Betti(args) => {
            let input = require_input(&cli)?;
            let section = read_grid(&input)?;
            let img = binarize(&section, args.tau)?;
            let pair = betti(&img);
            let label = args.label.clone().unwrap_or_else(|| {
                input
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "section".into())
            });
            let row = format!("{label},{},{}", pair.b0, pair.b1);
            println!("{row}");
            if let Some(output) = &cli.output {
                std::fs::write(output, format!("{row}\n"))?;
            }
            Ok(())
        }
        Command::Sweep(args) => {
            let input = require_input(&cli)?;
            let output = require_output(&cli)?;
            let section = read_grid(&input)?;
            let window = match &args.window {
                Some(text) => {
                    let [t0, t1, x0, x1] = parse_indices::<4>(text, "--window")?;
                    Some(ScoreWindow { t0, t1, x0, x1 })
                }
                None => None,
            };
            let spec = SweepSpec {
                v_min: args.v_min,
                v_max: args.v_max,
                v_step: args.v_step,
                tau: args.tau,
                window,
            };
            let result = velocity_sweep(&section, &spec)?;
            emit_csv(&result, &output)?;
            println!(
                "argmin b1 = {} at {} m/s; wrote {}",
                result.argmin_entry().b1,
                result.argmin_v,
                output.display()
            );
            if let Some(svg) = &args.svg {
                emit_curve_svg(&result, svg)?;
                println!("wrote {}", svg.display());
            }
            Ok(())
        }
        Command::Diffuse(args) => {
            let input = require_input(&cli)?;
            let output = require_output(&cli)?;
            let section = read_grid(&input)?;
            let params = DiffusionParams {
                patch: args.patch,
                epsilon: args.epsilon,
                t: args.t,
                r: args.r,
                max_points: args.max_points,
            };
            let denoised = diffuse_denoise(&section, &params)?;
            write_grid(&denoised, &output)?;
            println!("wrote {}", output.display());
            Ok(())
        }
        Command::Pipeline(args) => {
            let input = require_input(&cli)?;
            let out_dir = require_output(&cli)?;
            let text = std::fs::read_to_string(&args.config)?;
            let config = PipelineConfig::from_toml(&text)?;
            let section = read_grid(&input)?;
            let (report, _) = run_pipeline(&config, &section, &out_dir)?;
            print!("{}", report.render());
            Ok(())
        }
        Command::ImportSegy => {
            let input = require_input(&cli)?;
            let output = require_output(&cli)?;
            let import = import_segy_minimal(&input)?;
            if import.dx_defaulted {
                eprintln!("warning: no usable trace coordinates; defaulting dx to 1.0 m");
            }
            write_grid(&import.section, &output)?;
            println!(
                "imported {} traces x {} samples (format code {}); wrote {}",
                import.section.nx,
                import.section.nt,
                import.format_code,
                output.display()
            );
            Ok(())
        }
        Command::ExportCsv => {
            let input = require_input(&cli)?;
            let output = require_output(&cli)?;
            let section = read_grid(&input)?;
            export_section_csv(&section, &output)?;
            println!("wrote {}", output.display());
            Ok(())
        }
    }
}

fn parse_interp(text: &str) -> Result<Interp> {
    match text {
        "sinc" => Ok(Interp::Sinc),
        "linear" => Ok(Interp::Linear),
        other => Err(Error::InvalidParam {
            name: "--interp",
            reason: format!("unknown interpolation `{other}` (use \"sinc\" or \"linear\")"),
        }),
    }
}
