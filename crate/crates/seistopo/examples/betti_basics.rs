//! Betti numbers of binary images: hand-built shapes first, then the
//! synthetic before and after migration.
//!
//! ```bash
//! cargo run --release --example betti_basics
//! ```

use seistopo::grid::Velocity;
use seistopo::migrate::{migrate_constant_v, MigrationParams};
use seistopo::synth::three_diffractor_demo;
use seistopo::topo::{betti, betti_oracle, binarize, cubical_counts, BinaryImage};

fn show(name: &str, img: &BinaryImage) {
    let counts = cubical_counts(img);
    let pair = betti(img);
    let exact = betti_oracle(img).expect("desk scale");
    assert_eq!(pair, exact);
    println!(
        "{name:12} V={:3} E={:3} F={:3}  chi={:2}  b0={} b1={}",
        counts.v,
        counts.e,
        counts.f,
        counts.euler(),
        pair.b0,
        pair.b1
    );
}

fn main() -> seistopo::Result<()> {
    show("single pixel", &BinaryImage::from_fn(1, 1, |_, _| true));
    show("full 3x3", &BinaryImage::from_fn(3, 3, |_, _| true));
    show("ring", &BinaryImage::from_fn(3, 3, |r, c| !(r == 1 && c == 1)));
    show(
        "diagonal",
        &BinaryImage::from_fn(2, 2, |r, c| r == c),
    );
    show(
        "two islands",
        &BinaryImage::from_fn(3, 5, |_, c| c == 0 || c == 4),
    );

    // The same counting on seismic images: interference loops vanish when
    // the migration velocity is right.
    let (_, section) = three_diffractor_demo();
    let raw = binarize(&section, 0.1)?;
    let raw_pair = betti(&raw);
    println!(
        "\nunmigrated demo  (tau 0.1): b0={} b1={} over {} active pixels",
        raw_pair.b0,
        raw_pair.b1,
        raw.active_pixels()
    );
    for v in [1000.0, 1500.0, 2500.0] {
        let migrated = migrate_constant_v(
            &section,
            &MigrationParams::new(Velocity::new(v)?),
        )?;
        let img = binarize(&migrated, 0.1)?;
        let pair = betti(&img);
        println!(
            "migrated {v:6.0} m/s (tau 0.1): b0={} b1={} over {} active pixels",
            pair.b0,
            pair.b1,
            img.active_pixels()
        );
    }
    Ok(())
}
