//! The full velocity analysis: migrate the synthetic over 500..3000 m/s,
//! count loops at every trial velocity, and plot the curve whose minimum
//! sits at the true model velocity.
//!
//! ```bash
//! cargo run --release --example velocity_scan
//! ```

use seistopo::io::{emit_csv, emit_curve_svg};
use seistopo::sweep::{velocity_sweep, SweepSpec};
use seistopo::synth::three_diffractor_demo;

fn main() -> seistopo::Result<()> {
    let (model, section) = three_diffractor_demo();
    let spec = SweepSpec::new(500.0, 3000.0, 100.0, 0.1)?;
    let result = velocity_sweep(&section, &spec)?;

    println!("velocity  b0    b1  active");
    for e in &result.entries {
        let marker = if e.v == result.argmin_v { "  <- min" } else { "" };
        println!("{:8} {:3} {:5} {:7}{marker}", e.v, e.b0, e.b1, e.active_pixels);
    }
    println!(
        "\nargmin b1 at {} m/s (true model velocity: {} m/s)",
        result.argmin_v, model.v_true
    );

    let out_dir = std::path::Path::new("target/examples/velocity_scan");
    std::fs::create_dir_all(out_dir)?;
    let csv = out_dir.join("sweep.csv");
    let svg = out_dir.join("sweep.svg");
    emit_csv(&result, &csv)?;
    emit_curve_svg(&result, &svg)?;
    println!("wrote {} and {}", csv.display(), svg.display());
    Ok(())
}
