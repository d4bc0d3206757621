//! Diffusion-map denoising on a noisy window of the synthetic: build the
//! patch-graph Markov operator, inspect its spectrum, and reconstruct the
//! amplitudes from the damped leading eigenfunctions.
//!
//! ```bash
//! cargo run --release --example diffusion_smoothing
//! ```

use seistopo::diffuse::{build_operator, diffuse_denoise, semigroup_check, DiffusionParams};
use seistopo::grid::Section;
use seistopo::synth::three_diffractor_demo;

/// Deterministic Gaussian noise (xorshift + Box-Muller).
fn gaussian_noise(count: usize, sigma: f64, mut state: u64) -> Vec<f64> {
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..count)
        .map(|_| {
            let u1: f64 = next().max(1e-12);
            let u2: f64 = next();
            sigma * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        })
        .collect()
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

fn main() -> seistopo::Result<()> {
    let (_, demo) = three_diffractor_demo();

    // A 48x48 window over a hyperbola flank.
    let (t0, x0, n) = (160usize, 80usize, 48usize);
    let mut clean = Section::zeros(n, n, demo.dt, demo.dx);
    for ix in 0..n {
        for it in 0..n {
            *clean.at_mut(it, ix) = demo.at(t0 + it, x0 + ix);
        }
    }
    let clean_rms = rms(&clean.samples);
    let mut noisy = clean.clone();
    for (s, e) in noisy
        .samples
        .iter_mut()
        .zip(gaussian_noise(n * n, 0.2 * clean_rms, 0x9e3779b97f4a7c15))
    {
        *s += e;
    }

    let params = DiffusionParams {
        patch: 5,
        epsilon: 8.0,
        t: 2,
        r: 32,
        max_points: 4096,
    };
    let op = build_operator(&noisy, &params)?;
    println!(
        "operator: {} nodes (stride {}), top eigenvalues:",
        op.node_count(),
        op.stride
    );
    for (i, v) in op.eigenvalues.iter().take(8).enumerate() {
        println!("  lambda_{i} = {v:.6}");
    }

    let denoised = diffuse_denoise(&noisy, &params)?;
    let err = |a: &Section| {
        rms(&a
            .samples
            .iter()
            .zip(&clean.samples)
            .map(|(x, y)| x - y)
            .collect::<Vec<_>>())
    };
    println!("rms error vs clean: noisy {:.5} -> denoised {:.5}", err(&noisy), err(&denoised));

    // The semigroup in action on a small operator: M^2 M^3 = M^5.
    let mut small = Section::zeros(8, 8, demo.dt, demo.dx);
    for ix in 0..8 {
        for it in 0..8 {
            *small.at_mut(it, ix) = demo.at(140 + it, 60 + ix);
        }
    }
    let small_op = build_operator(
        &small,
        &DiffusionParams {
            patch: 3,
            ..params
        },
    )?;
    println!(
        "semigroup deviation |M^2 M^3 - M^5| on 64 nodes: {:.2e}",
        semigroup_check(&small_op, 2, 3)?
    );
    Ok(())
}
