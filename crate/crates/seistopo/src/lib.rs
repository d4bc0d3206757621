//! Seismic imaging toolkit built around three complementary norms:
//!
//! * **L1** ([`tvl1`]) — per-trace total-variation despiking: detect and
//!   repair spikes, or solve the exact 1-D TV problem to strip singular
//!   events while leaving flat, geologic signal untouched.
//! * **L0** ([`topo`], [`sweep`]) — topological velocity analysis: migrate
//!   over a velocity grid, binarize each image, and count Betti numbers of
//!   the resulting cubical complex. Under-migrated and over-migrated images
//!   are riddled with interference loops; the loop count `b1` bottoms out at
//!   the true medium velocity.
//! * **L2** ([`diffuse`]) — diffusion-map denoising: a Markov operator over
//!   patch affinities whose eigenfunctions adapt to the data geometry
//!   instead of imposing sinusoids; powers of the operator form the
//!   diffusion semigroup used to damp noise.
//!
//! The [`migrate`] module provides the constant-velocity f-k migration the
//! sweep is built on. Cascaded constant-velocity migrations compose by
//! adding squared velocities, so a k-fold cascade at base velocity `v`
//! equals one migration at `v * sqrt(k)` — the semigroup structure that
//! makes panel sequences and residual sweeps cheap.
//!
//! [`synth`] generates the zero-offset diffractor synthetics used
//! throughout the tests and examples, and [`io`]/[`pipeline`]/[`cli`] cover
//! grid files, SEG-Y import, CSV/SVG emission, and the end-to-end
//! despike -> sweep -> denoise -> migrate pipeline behind the `seistopo`
//! binary.

// `!(x > 0.0)` style guards are deliberate: unlike `x <= 0.0` they also
// catch NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diffuse;
pub mod error;
pub mod grid;
pub mod io;
pub mod migrate;
pub mod pipeline;
pub mod segy;
pub mod sweep;
pub mod synth;
pub mod topo;
pub mod tvl1;

pub use error::{Error, Result};
pub use grid::{Section, Trace, ValidationReport, Velocity};
