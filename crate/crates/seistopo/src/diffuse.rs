//! Diffusion-map denoising: a Markov operator over patch affinities whose
//! powers form the diffusion semigroup.
//!
//! Pixels (deterministically stride-subsampled to at most `max_points`)
//! become graph nodes carrying their local amplitude patch. Affinities are
//! Gaussian in patch distance with the bandwidth tied to the median nonzero
//! squared distance, sparsified to k-nearest neighbors, symmetrized, and
//! row-normalized into a Markov operator. Spectral truncation of the
//! symmetric conjugate `D^{-1/2} W D^{-1/2}` yields eigenfunctions adapted
//! to the data geometry; damping their coefficients by `eigenvalue^t`
//! applies the t-step semigroup without forming operator powers.
//!
//! Everything is deterministic: stride subsampling instead of random
//! sampling, cosine-seeded subspace iteration, fixed sign conventions.

use crate::error::{Error, Result};
use crate::grid::Section;
use rayon::prelude::*;

/// Neighbors kept per node when sparsifying the affinity matrix.
const KNN: usize = 32;

/// Parameters of the diffusion operator and denoiser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams {
    /// Odd patch side length in samples.
    pub patch: usize,
    /// Kernel bandwidth as a multiple of the median nonzero squared
    /// patch distance.
    pub epsilon: f64,
    /// Diffusion time: coefficients are damped by `eigenvalue^t`.
    pub t: u32,
    /// Retained eigenfunction count.
    pub r: usize,
    /// Cap on graph nodes; pixels are stride-subsampled down to this.
    pub max_points: usize,
}

impl Default for DiffusionParams {
    fn default() -> Self {
        DiffusionParams {
            patch: 5,
            epsilon: 1.0,
            t: 2,
            r: 32,
            max_points: 4096,
        }
    }
}

impl DiffusionParams {
    fn check(&self) -> Result<()> {
        if self.patch < 3 || self.patch.is_multiple_of(2) {
            return Err(Error::InvalidParam {
                name: "patch",
                reason: format!("must be an odd integer >= 3, got {}", self.patch),
            });
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParam {
                name: "epsilon",
                reason: format!("must be > 0, got {}", self.epsilon),
            });
        }
        if self.r < 1 {
            return Err(Error::InvalidParam {
                name: "r",
                reason: "must be >= 1".into(),
            });
        }
        if self.max_points < 1 {
            return Err(Error::InvalidParam {
                name: "max_points",
                reason: "must be >= 1".into(),
            });
        }
        Ok(())
    }
}

/// Row-stochastic Markov operator over patch-graph nodes with its leading
/// spectral data.
#[derive(Debug, Clone)]
pub struct DiffusionOperator {
    /// Node pixel coordinates `(it, ix)` in subsampling order.
    pub nodes: Vec<(usize, usize)>,
    /// Sparse Markov rows: `(column, probability)`, each row summing to 1.
    pub markov: Vec<Vec<(u32, f64)>>,
    /// Leading eigenvalues of the Markov operator, non-increasing.
    pub eigenvalues: Vec<f64>,
    /// Right eigenvectors of the Markov operator (unit L2 norm); the
    /// leading one is constant for a connected graph.
    pub eigenfunctions: Vec<Vec<f64>>,
    /// Orthonormal eigenvectors of the symmetric conjugate, used for
    /// projection.
    sym_eigvecs: Vec<Vec<f64>>,
    /// Square roots of the node degrees (the conjugation weights).
    sqrt_degree: Vec<f64>,
    /// Subsampling stride used to pick the nodes.
    pub stride: usize,
}

impl DiffusionOperator {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Row sums of the Markov matrix; 1 within 1e-10 by construction.
    pub fn row_sums(&self) -> Vec<f64> {
        self.markov
            .iter()
            .map(|row| row.iter().map(|&(_, w)| w).sum())
            .collect()
    }

    /// Dense Markov matrix (row-major); for desk-scale checks.
    fn dense_markov(&self) -> Vec<f64> {
        let n = self.node_count();
        let mut m = vec![0.0; n * n];
        for (i, row) in self.markov.iter().enumerate() {
            for &(j, w) in row {
                m[i * n + j as usize] = w;
            }
        }
        m
    }
}

/// Extract the patch vector centered on `(it, ix)` with clamped borders.
fn patch_vector(section: &Section, it: usize, ix: usize, patch: usize, out: &mut Vec<f64>) {
    let half = (patch / 2) as isize;
    out.clear();
    for dx in -half..=half {
        let cx = (ix as isize + dx).clamp(0, section.nx as isize - 1) as usize;
        let trace = section.trace(cx);
        for dt in -half..=half {
            let ct = (it as isize + dt).clamp(0, section.nt as isize - 1) as usize;
            out.push(trace[ct]);
        }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Build the diffusion operator of a section.
///
/// Rejects sections smaller than the patch and sections whose patches are
/// all identical (the kernel bandwidth is undefined).
pub fn build_operator(section: &Section, params: &DiffusionParams) -> Result<DiffusionOperator> {
    section.ensure_valid()?;
    params.check()?;
    if section.nt < params.patch || section.nx < params.patch {
        return Err(Error::InvalidParam {
            name: "patch",
            reason: format!(
                "patch {} does not fit a {}x{} section",
                params.patch, section.nt, section.nx
            ),
        });
    }

    // Deterministic stride subsampling on the pixel grid.
    let total = section.nt * section.nx;
    let mut stride = ((total as f64 / params.max_points as f64).sqrt().ceil() as usize).max(1);
    let count_at = |s: usize| section.nt.div_ceil(s) * section.nx.div_ceil(s);
    while count_at(stride) > params.max_points {
        stride += 1;
    }
    let mut nodes = Vec::with_capacity(count_at(stride));
    for ix in (0..section.nx).step_by(stride) {
        for it in (0..section.nt).step_by(stride) {
            nodes.push((it, ix));
        }
    }
    let n = nodes.len();

    let patches: Vec<Vec<f64>> = nodes
        .par_iter()
        .map(|&(it, ix)| {
            let mut p = Vec::with_capacity(params.patch * params.patch);
            patch_vector(section, it, ix, params.patch, &mut p);
            p
        })
        .collect();

    // k-nearest neighbors per node by squared patch distance. Ties break on
    // the lower index, keeping the graph deterministic.
    let k = KNN.min(n.saturating_sub(1));
    let neighbor_lists: Vec<Vec<(u32, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut dists: Vec<(u32, f64)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (j as u32, squared_distance(&patches[i], &patches[j])))
                .collect();
            dists.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
            dists.truncate(k);
            dists
        })
        .collect();

    // Bandwidth from the median nonzero retained distance.
    let mut nonzero: Vec<f64> = neighbor_lists
        .iter()
        .flatten()
        .map(|&(_, d)| d)
        .filter(|&d| d > 0.0)
        .collect();
    if nonzero.is_empty() {
        return Err(Error::DegeneratePatches);
    }
    nonzero.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = nonzero[nonzero.len() / 2];
    let bandwidth = params.epsilon * median;

    // Symmetrized sparse affinities with unit self-loops.
    let mut weights: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for (i, list) in neighbor_lists.iter().enumerate() {
        for &(j, d2) in list {
            let w = (-d2 / bandwidth).exp();
            weights[i].push((j, w));
            weights[j as usize].push((i as u32, w));
        }
    }
    let mut affinity: Vec<Vec<(u32, f64)>> = Vec::with_capacity(n);
    for (i, mut row) in weights.into_iter().enumerate() {
        row.push((i as u32, 1.0)); // self-loop
        row.sort_by_key(|&(j, _)| j);
        row.dedup_by(|a, b| a.0 == b.0);
        affinity.push(row);
    }

    let degrees: Vec<f64> = affinity
        .iter()
        .map(|row| row.iter().map(|&(_, w)| w).sum())
        .collect();
    let sqrt_degree: Vec<f64> = degrees.iter().map(|d| d.sqrt()).collect();

    let markov: Vec<Vec<(u32, f64)>> = affinity
        .iter()
        .zip(&degrees)
        .map(|(row, &d)| row.iter().map(|&(j, w)| (j, w / d)).collect())
        .collect();

    // Symmetric conjugate S = D^{-1/2} W D^{-1/2}, sparse.
    let sym: Vec<Vec<(u32, f64)>> = affinity
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .map(|&(j, w)| (j, w / (sqrt_degree[i] * sqrt_degree[j as usize])))
                .collect()
        })
        .collect();

    let r = params.r.min(n);
    let (eigenvalues, sym_eigvecs) = top_eigenpairs(&sym, n, r);

    // Right eigenvectors of M: psi = D^{-1/2} v, unit-normalized with a
    // deterministic sign.
    let eigenfunctions: Vec<Vec<f64>> = sym_eigvecs
        .iter()
        .map(|v| {
            let mut psi: Vec<f64> = v
                .iter()
                .zip(&sqrt_degree)
                .map(|(vi, sd)| vi / sd)
                .collect();
            let norm = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                for x in &mut psi {
                    *x /= norm;
                }
            }
            fix_sign(&mut psi);
            psi
        })
        .collect();

    Ok(DiffusionOperator {
        nodes,
        markov,
        eigenvalues,
        eigenfunctions,
        sym_eigvecs,
        sqrt_degree,
        stride,
    })
}

fn fix_sign(v: &mut [f64]) {
    let mut idx = 0;
    let mut best = 0.0;
    for (i, &x) in v.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

fn sparse_matvec(m: &[Vec<(u32, f64)>], x: &[f64], out: &mut [f64]) {
    out.par_iter_mut().enumerate().for_each(|(i, o)| {
        *o = m[i].iter().map(|&(j, w)| w * x[j as usize]).sum();
    });
}

/// Modified Gram-Schmidt orthonormalization of the vectors in `basis`.
fn orthonormalize(basis: &mut [Vec<f64>]) {
    for i in 0..basis.len() {
        for j in 0..i {
            let dot: f64 = basis[i].iter().zip(&basis[j]).map(|(a, b)| a * b).sum();
            let (head, tail) = basis.split_at_mut(i);
            for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                *a -= dot * b;
            }
        }
        let norm: f64 = basis[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            for x in &mut basis[i] {
                *x /= norm;
            }
        }
    }
}

/// Jacobi eigenvalue iteration for a small dense symmetric matrix
/// (row-major). Returns eigenvalues descending with their eigenvectors.
fn jacobi_symmetric(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    for _ in 0..100 {
        let mut off = 0.0_f64;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(a[i * n + j].abs());
            }
        }
        if off < 1e-15 {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                let apr = a[p * n + r];
                if apr.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let arr = a[r * n + r];
                let theta = 0.5 * (arr - app) / apr;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akr = a[k * n + r];
                    a[k * n + p] = c * akp - s * akr;
                    a[k * n + r] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let ark = a[r * n + k];
                    a[p * n + k] = c * apk - s * ark;
                    a[r * n + k] = s * apk + c * ark;
                }
                for k in 0..n {
                    let qkp = q[k * n + p];
                    let qkr = q[k * n + r];
                    q[k * n + p] = c * qkp - s * qkr;
                    q[k * n + r] = s * qkp + c * qkr;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].partial_cmp(&a[i * n + i]).unwrap());
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|row| q[row * n + col]).collect())
        .collect();
    (values, vectors)
}

/// Leading `r` algebraic eigenpairs of a sparse symmetric matrix by
/// orthogonal iteration with Rayleigh-Ritz refinement. Deterministic
/// cosine-seeded start. The power step runs on `(S + I)/2`, mapping the
/// spectrum into `[0, 1]` so magnitude order equals algebraic order.
fn top_eigenpairs(sym: &[Vec<(u32, f64)>], n: usize, r: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let r = r.min(n);
    let mut basis: Vec<Vec<f64>> = (0..r)
        .map(|j| {
            (0..n)
                .map(|i| {
                    ((j + 1) as f64 * (i as f64 + 0.5) * std::f64::consts::PI / n as f64).cos()
                })
                .collect()
        })
        .collect();
    orthonormalize(&mut basis);

    let mut scratch = vec![0.0; n];
    let mut prev_values: Vec<f64> = vec![f64::INFINITY; r];
    let mut values = vec![0.0; r];
    for _round in 0..400 {
        // A few power steps on (S + I)/2 per Ritz round.
        for _ in 0..3 {
            for vec in basis.iter_mut() {
                sparse_matvec(sym, vec, &mut scratch);
                for (v, s) in vec.iter_mut().zip(&scratch) {
                    *v = 0.5 * (*v + *s);
                }
            }
            orthonormalize(&mut basis);
        }

        // Rayleigh-Ritz on S restricted to the basis.
        let s_basis: Vec<Vec<f64>> = basis
            .iter()
            .map(|v| {
                let mut sv = vec![0.0; n];
                sparse_matvec(sym, v, &mut sv);
                sv
            })
            .collect();
        let mut small = vec![0.0; r * r];
        for i in 0..r {
            for j in i..r {
                let dot: f64 = basis[i].iter().zip(&s_basis[j]).map(|(a, b)| a * b).sum();
                small[i * r + j] = dot;
                small[j * r + i] = dot;
            }
        }
        let (ritz_values, ritz_vectors) = jacobi_symmetric(&mut small, r);
        // Rotate the basis into the Ritz directions.
        let mut rotated: Vec<Vec<f64>> = vec![vec![0.0; n]; r];
        for (col, rv) in ritz_vectors.iter().enumerate() {
            for (coeff, bvec) in rv.iter().zip(&basis) {
                if coeff.abs() < 1e-300 {
                    continue;
                }
                for (o, b) in rotated[col].iter_mut().zip(bvec) {
                    *o += coeff * b;
                }
            }
        }
        basis = rotated;
        values = ritz_values;

        let drift = values
            .iter()
            .zip(&prev_values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        if drift < 1e-14 {
            break;
        }
        prev_values = values.clone();
    }
    (values, basis)
}

/// Project the section's amplitudes onto the top-r eigenfunctions with
/// coefficients damped by `eigenvalue^t`, reconstructing non-node pixels
/// from their nearest node.
///
/// A constant section is returned unchanged: it is the fixed point of the
/// diffusion semigroup, short-circuited here because the operator itself
/// cannot be built from identical patches.
pub fn diffuse_denoise(section: &Section, params: &DiffusionParams) -> Result<Section> {
    section.ensure_valid()?;
    params.check()?;
    let first = section.samples.first().copied().unwrap_or(0.0);
    if section.samples.iter().all(|&v| v == first) {
        return Ok(section.clone());
    }
    let op = build_operator(section, params)?;
    let n = op.node_count();

    // Amplitudes at the nodes, conjugated into the symmetric basis.
    let a: Vec<f64> = op
        .nodes
        .iter()
        .map(|&(it, ix)| section.at(it, ix))
        .collect();
    let b: Vec<f64> = a.iter().zip(&op.sqrt_degree).map(|(x, sd)| x * sd).collect();

    // Damped spectral reconstruction.
    let mut b_hat = vec![0.0; n];
    for (value, vector) in op.eigenvalues.iter().zip(&op.sym_eigvecs) {
        let coeff: f64 = vector.iter().zip(&b).map(|(v, x)| v * x).sum();
        let damped = coeff * value.powi(params.t as i32);
        if damped == 0.0 {
            continue;
        }
        for (o, v) in b_hat.iter_mut().zip(vector) {
            *o += damped * v;
        }
    }
    let a_hat: Vec<f64> = b_hat
        .iter()
        .zip(&op.sqrt_degree)
        .map(|(x, sd)| x / sd)
        .collect();

    // Paint the output grid: node pixels take their reconstructed value,
    // the rest copy their nearest node on the stride grid.
    let stride = op.stride;
    let rows = section.nt.div_ceil(stride);
    let nearest_cell = |i: usize, n_cells: usize| -> usize {
        ((i as f64 / stride as f64).round() as usize).min(n_cells - 1)
    };
    let t_cells = rows;
    let x_cells = section.nx.div_ceil(stride);
    let mut out = section.clone();
    for ix in 0..section.nx {
        let cx = nearest_cell(ix, x_cells);
        for it in 0..section.nt {
            let ct = nearest_cell(it, t_cells);
            *out.at_mut(it, ix) = a_hat[cx * rows + ct];
        }
    }
    Ok(out)
}

/// Node cap for the dense semigroup check.
pub const DENSE_CHECK_CAP: usize = 512;

/// Max-norm of `M^s M^t - M^(s+t)`, computed densely. Desk scale only.
pub fn semigroup_check(op: &DiffusionOperator, s: u32, t: u32) -> Result<f64> {
    let n = op.node_count();
    if n > DENSE_CHECK_CAP {
        return Err(Error::DenseCheckCap {
            nodes: n,
            cap: DENSE_CHECK_CAP,
        });
    }
    let m = op.dense_markov();
    let identity = || {
        let mut i_mat = vec![0.0; n * n];
        for i in 0..n {
            i_mat[i * n + i] = 1.0;
        }
        i_mat
    };
    let matmul = |a: &[f64], b: &[f64]| {
        let mut c = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = a[i * n + k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    c[i * n + j] += aik * b[k * n + j];
                }
            }
        }
        c
    };
    let power = |p: u32| {
        let mut acc = identity();
        for _ in 0..p {
            acc = matmul(&acc, &m);
        }
        acc
    };
    let ms = power(s);
    let mt = power(t);
    let mst = power(s + t);
    let product = matmul(&ms, &mt);
    let deviation = product
        .iter()
        .zip(&mst)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    Ok(deviation)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Section with two constant plateaus: patch clusters are internally
    /// identical, separated by the straddle band at the jump.
    fn two_plateau_section() -> Section {
        let mut s = Section::zeros(8, 8, 0.004, 10.0);
        for ix in 4..8 {
            for it in 0..8 {
                *s.at_mut(it, ix) = 10.0;
            }
        }
        s
    }

    fn wavy_section(nt: usize, nx: usize) -> Section {
        let mut s = Section::zeros(nt, nx, 0.004, 10.0);
        for ix in 0..nx {
            for it in 0..nt {
                *s.at_mut(it, ix) = (it as f64 * 0.35).sin() * (ix as f64 * 0.2).cos()
                    + 0.1 * (it as f64 * 0.05).cos();
            }
        }
        s
    }

    #[test]
    fn rows_sum_to_one() {
        let s = wavy_section(16, 12);
        let op = build_operator(&s, &DiffusionParams::default()).unwrap();
        for sum in op.row_sums() {
            assert!((sum - 1.0).abs() < 1e-10, "row sum {sum}");
        }
    }

    #[test]
    fn leading_eigenpair_is_one_and_constant() {
        let s = wavy_section(16, 12);
        let op = build_operator(&s, &DiffusionParams::default()).unwrap();
        assert!((op.eigenvalues[0] - 1.0).abs() < 1e-10);
        let psi = &op.eigenfunctions[0];
        let mean = psi.iter().sum::<f64>() / psi.len() as f64;
        for &v in psi {
            assert!(
                (v - mean).abs() <= 1e-8 * mean.abs().max(1e-30),
                "leading eigenfunction not constant: {v} vs mean {mean}"
            );
        }
    }

    #[test]
    fn eigenvalues_sorted_and_bounded() {
        let s = wavy_section(20, 10);
        let params = DiffusionParams {
            r: 8,
            ..DiffusionParams::default()
        };
        let op = build_operator(&s, &params).unwrap();
        for pair in op.eigenvalues.windows(2) {
            assert!(pair[0] >= pair[1] - 1e-12);
        }
        for &v in &op.eigenvalues {
            assert!((-1.0 - 1e-10..=1.0 + 1e-10).contains(&v));
        }
    }

    #[test]
    fn two_clusters_give_second_eigenvalue_near_one() {
        let s = two_plateau_section();
        let params = DiffusionParams {
            patch: 3,
            epsilon: 0.02, // kills cross-cluster affinities
            r: 4,
            ..DiffusionParams::default()
        };
        let op = build_operator(&s, &params).unwrap();
        assert!((op.eigenvalues[0] - 1.0).abs() < 1e-10);
        assert!(
            (op.eigenvalues[1] - 1.0).abs() < 1e-6,
            "second eigenvalue {} should be within 1e-6 of 1",
            op.eigenvalues[1]
        );
    }

    #[test]
    fn eigenpairs_match_dense_oracle() {
        // Dense decomposition via nalgebra on the same symmetric conjugate,
        // compared eigenvalue by eigenvalue and by subspace angle.
        let s = wavy_section(8, 8); // 64 nodes
        let params = DiffusionParams {
            patch: 3,
            r: 6,
            ..DiffusionParams::default()
        };
        let op = build_operator(&s, &params).unwrap();
        let n = op.node_count();
        assert_eq!(n, 64);

        // Rebuild S densely from markov and degrees: S = D^{1/2} M D^{-1/2}.
        let mut dense = nalgebra::DMatrix::<f64>::zeros(n, n);
        for (i, row) in op.markov.iter().enumerate() {
            for &(j, w) in row {
                dense[(i, j as usize)] = w * op.sqrt_degree[i] / op.sqrt_degree[j as usize];
            }
        }
        let eig = nalgebra::SymmetricEigen::new(dense);
        let mut oracle: Vec<(f64, Vec<f64>)> = (0..n)
            .map(|k| {
                (
                    eig.eigenvalues[k],
                    eig.eigenvectors.column(k).iter().copied().collect(),
                )
            })
            .collect();
        oracle.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

        for (k, (mine, (expected, _))) in op.eigenvalues.iter().zip(&oracle).enumerate() {
            assert!(
                (mine - expected).abs() < 1e-6,
                "eigenvalue {k}: {mine} vs oracle {expected}"
            );
        }

        // Principal-angle check between the two top-r subspaces.
        let r = params.r;
        let mut overlap = nalgebra::DMatrix::<f64>::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                overlap[(i, j)] = op.sym_eigvecs[i]
                    .iter()
                    .zip(&oracle[j].1)
                    .map(|(a, b)| a * b)
                    .sum();
            }
        }
        let svd = overlap.svd(false, false);
        let min_singular = svd
            .singular_values
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v));
        let angle = min_singular.min(1.0).acos();
        assert!(angle < 1e-4, "subspace angle {angle}");
    }

    #[test]
    fn complete_basis_zero_time_reconstructs_input() {
        let s = wavy_section(8, 6);
        let params = DiffusionParams {
            patch: 3,
            epsilon: 1.0,
            t: 0,
            r: 48, // node count
            max_points: 4096,
        };
        let out = diffuse_denoise(&s, &params).unwrap();
        for (a, b) in out.samples.iter().zip(&s.samples) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn constant_section_unchanged() {
        let mut s = Section::zeros(8, 8, 0.004, 10.0);
        for v in &mut s.samples {
            *v = 3.25;
        }
        for (t, r) in [(0u32, 1usize), (3, 4)] {
            let params = DiffusionParams {
                patch: 3,
                epsilon: 1.0,
                t,
                r,
                max_points: 4096,
            };
            let out = diffuse_denoise(&s, &params).unwrap();
            assert_eq!(out.samples, s.samples);
        }
    }

    #[test]
    fn degenerate_patches_rejected() {
        let mut s = Section::zeros(8, 8, 0.004, 10.0);
        for v in &mut s.samples {
            *v = 1.0;
        }
        assert!(matches!(
            build_operator(&s, &DiffusionParams::default()),
            Err(Error::DegeneratePatches)
        ));
    }

    #[test]
    fn energy_contracts_on_nodes_for_positive_time() {
        let s = wavy_section(12, 12);
        let params = DiffusionParams {
            patch: 3,
            r: 16,
            t: 1,
            ..DiffusionParams::default()
        };
        let op = build_operator(&s, &params).unwrap();
        let out = diffuse_denoise(&s, &params).unwrap();
        let energy = |sec: &Section| -> f64 {
            op.nodes
                .iter()
                .map(|&(it, ix)| sec.at(it, ix).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        assert!(energy(&out) <= energy(&s) + 1e-8);
    }

    #[test]
    fn semigroup_identity_at_zero_steps() {
        let s = wavy_section(8, 8);
        let params = DiffusionParams {
            patch: 3,
            ..DiffusionParams::default()
        };
        let op = build_operator(&s, &params).unwrap();
        assert_eq!(semigroup_check(&op, 0, 3).unwrap(), 0.0);
    }

    #[test]
    fn semigroup_products_associate() {
        let s = wavy_section(8, 8);
        let params = DiffusionParams {
            patch: 3,
            ..DiffusionParams::default()
        };
        let op = build_operator(&s, &params).unwrap();
        assert!(semigroup_check(&op, 1, 1).unwrap() <= 1e-10);
        assert!(semigroup_check(&op, 2, 3).unwrap() <= 1e-8);
    }

    #[test]
    fn markov_powers_stay_row_stochastic() {
        let s = wavy_section(8, 8);
        let params = DiffusionParams {
            patch: 3,
            ..DiffusionParams::default()
        };
        let op = build_operator(&s, &params).unwrap();
        let n = op.node_count();
        let m = op.dense_markov();
        let mut acc = m.clone();
        for _ in 1..8 {
            let mut next = vec![0.0; n * n];
            for i in 0..n {
                for k in 0..n {
                    let aik = acc[i * n + k];
                    for j in 0..n {
                        next[i * n + j] += aik * m[k * n + j];
                    }
                }
            }
            acc = next;
        }
        for i in 0..n {
            let sum: f64 = acc[i * n..(i + 1) * n].iter().sum();
            assert!(
                (sum - 1.0).abs() < 1e-8,
                "row {i} sums to {sum} after 8 steps"
            );
        }
    }

    #[test]
    fn patch_too_large_rejected() {
        let s = wavy_section(4, 4);
        let params = DiffusionParams {
            patch: 5,
            ..DiffusionParams::default()
        };
        assert!(build_operator(&s, &params).is_err());
    }

    #[test]
    fn subsampling_respects_max_points() {
        let s = wavy_section(40, 40);
        let params = DiffusionParams {
            patch: 3,
            max_points: 100,
            ..DiffusionParams::default()
        };
        let op = build_operator(&s, &params).unwrap();
        assert!(op.node_count() <= 100);
        assert!(op.stride >= 4);
    }

    #[test]
    fn dense_check_cap_enforced() {
        let s = wavy_section(40, 40);
        let params = DiffusionParams {
            r: 1,
            ..DiffusionParams::default()
        };
        let op = build_operator(&s, &params).unwrap();
        assert!(op.node_count() > DENSE_CHECK_CAP);
        assert!(matches!(
            semigroup_check(&op, 1, 1),
            Err(Error::DenseCheckCap { .. })
        ));
    }
}
