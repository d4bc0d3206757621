//! SEG-Y ingestion: write a small rev1 fixture, read it back, and show the
//! IBM hexadecimal float conversion the format is famous for.
//!
//! ```bash
//! cargo run --release --example segy_import
//! ```

use seistopo::grid::Section;
use seistopo::segy::{ibm_to_f64, import_segy_minimal, write_segy_minimal};

fn main() -> seistopo::Result<()> {
    // IBM System/360 hex floats: sign, base-16 exponent biased by 64,
    // 24-bit fraction.
    for (bits, label) in [
        (0x4264_0000u32, "0x42640000"),
        (0x4110_0000, "0x41100000"),
        (0xC276_A000, "0xC276A000"),
    ] {
        println!("{label} -> {}", ibm_to_f64(bits));
    }

    let mut section = Section::zeros(64, 24, 0.002, 12.5);
    for (i, v) in section.samples.iter_mut().enumerate() {
        *v = ((i % 64) as f64 * 0.3).sin() * ((i / 64) as f64 + 1.0);
    }

    let out_dir = std::path::Path::new("target/examples/segy_import");
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join("fixture.segy");
    write_segy_minimal(&section, &path)?;
    let import = import_segy_minimal(&path)?;
    println!(
        "\nimported {}: {} traces x {} samples, dt = {} s, dx = {} m (format code {})",
        path.display(),
        import.section.nx,
        import.section.nt,
        import.section.dt,
        import.section.dx,
        import.format_code
    );
    let worst = import
        .section
        .samples
        .iter()
        .zip(&section.samples)
        .map(|(a, b)| (a - *b as f32 as f64).abs())
        .fold(0.0_f64, f64::max);
    println!("round-trip deviation at f32 precision: {worst:.1e}");
    Ok(())
}
