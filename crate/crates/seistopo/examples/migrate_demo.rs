//! Migrate the three-diffractor synthetic at its true velocity and watch
//! the hyperbolas collapse onto the apexes.
//!
//! ```bash
//! cargo run --release --example migrate_demo
//! ```

use seistopo::grid::Velocity;
use seistopo::io::write_grid;
use seistopo::migrate::{migrate_constant_v, MigrationParams};
use seistopo::synth::three_diffractor_demo;

fn main() -> seistopo::Result<()> {
    let (model, section) = three_diffractor_demo();
    let params = MigrationParams::new(Velocity::new(model.v_true)?);
    let migrated = migrate_constant_v(&section, &params)?;

    let total: f64 = migrated.samples.iter().map(|v| v * v).sum();
    let mut inside = 0.0;
    for d in &model.diffractors {
        let it0 = (2.0 * d.z / model.v_true / section.dt).round() as isize;
        let ix0 = (d.x / section.dx).round() as isize;
        // 11x11 window around each apex.
        for it in it0 - 5..=it0 + 5 {
            for ix in ix0 - 5..=ix0 + 5 {
                inside += migrated.at(it as usize, ix as usize).powi(2);
            }
        }
        // Where did the strongest sample land?
        let mut best = (0.0_f64, 0isize, 0isize);
        for it in (it0 - 20).max(0)..(it0 + 20).min(section.nt as isize) {
            for ix in (ix0 - 20).max(0)..(ix0 + 20).min(section.nx as isize) {
                let v = migrated.at(it as usize, ix as usize).abs();
                if v > best.0 {
                    best = (v, it, ix);
                }
            }
        }
        println!(
            "apex ({it0:3}, {ix0:3}): peak {:.3} at ({}, {}), offset ({}, {}) samples",
            best.0,
            best.1,
            best.2,
            best.1 - it0,
            best.2 - ix0
        );
    }
    println!(
        "energy inside the three 11x11 apex windows: {:.1}%",
        100.0 * inside / total
    );

    let out_dir = std::path::Path::new("target/examples/migrate_demo");
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join("migrated_1500.sgrd");
    write_grid(&migrated, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
