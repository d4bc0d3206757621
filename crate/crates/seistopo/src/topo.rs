//! Betti numbers of thresholded sections via 2-D cubical complexes.
//!
//! A binary image is read as a union of closed unit squares, one per active
//! pixel. Squares sharing an edge or a corner vertex intersect, so the
//! complex connects 8-neighbor pixels — corner-sharing pixels ARE connected,
//! which is the consequence of the closed-square reading (not the usual
//! 4-connectivity intuition for open pixels).
//!
//! `b0` is computed by union-find over 8-neighbor adjacency; `b1` follows
//! from the Euler identity `b0 - b1 = V - E + F` with the cell counts taken
//! over the union (shared cells counted once). [`betti_oracle`] recomputes
//! both numbers from GF(2) boundary-matrix ranks and exists purely to check
//! the fast path.

use crate::error::{Error, Result};
use crate::grid::Section;

/// A thresholded section: `true` marks active pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryImage {
    /// Time samples of the source grid.
    pub rows: usize,
    /// Traces of the source grid.
    pub cols: usize,
    /// Row-major pixel mask: `bits[r * cols + c]`.
    pub bits: Vec<bool>,
    /// Absolute amplitude cut that produced the mask.
    pub threshold_used: f64,
}

impl BinaryImage {
    pub fn new(rows: usize, cols: usize, bits: Vec<bool>, threshold_used: f64) -> Self {
        assert_eq!(bits.len(), rows * cols, "mask size must match dimensions");
        BinaryImage {
            rows,
            cols,
            bits,
            threshold_used,
        }
    }

    /// Build directly from a pixel predicate; handy in tests.
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut bits = vec![false; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                bits[r * cols + c] = f(r, c);
            }
        }
        BinaryImage::new(rows, cols, bits, 0.0)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.cols + c]
    }

    /// Number of active pixels.
    pub fn active_pixels(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }
}

/// Cell counts of the union of active closed unit squares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CubicalCounts {
    /// Distinct vertices.
    pub v: usize,
    /// Distinct edges.
    pub e: usize,
    /// Faces (active pixels).
    pub f: usize,
}

impl CubicalCounts {
    /// Euler characteristic `V - E + F`.
    pub fn euler(&self) -> i64 {
        self.v as i64 - self.e as i64 + self.f as i64
    }
}

/// Connected components and independent loops of a binarized section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BettiPair {
    pub b0: usize,
    pub b1: usize,
}

/// Threshold a section at `tau * max_abs(section)`, `tau` in (0, 1).
/// A pixel is active iff its absolute amplitude is at or above the cut, so
/// positive rescaling of the section leaves the mask unchanged.
pub fn binarize(section: &Section, tau: f64) -> Result<BinaryImage> {
    section.ensure_valid()?;
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidParam {
            name: "tau",
            reason: format!("must lie in (0, 1), got {tau}"),
        });
    }
    let peak = section.max_abs();
    if peak == 0.0 {
        return Err(Error::ZeroAmplitude);
    }
    let cut = tau * peak;
    let rows = section.nt;
    let cols = section.nx;
    let mut bits = vec![false; rows * cols];
    for c in 0..cols {
        let trace = section.trace(c);
        for r in 0..rows {
            if trace[r].abs() >= cut {
                bits[r * cols + c] = true;
            }
        }
    }
    Ok(BinaryImage::new(rows, cols, bits, cut))
}

/// Count the distinct vertices, edges, and faces of the union of active
/// closed unit squares. Shared cells are counted once.
pub fn cubical_counts(img: &BinaryImage) -> CubicalCounts {
    let (rows, cols) = (img.rows, img.cols);
    // Vertex grid is (rows+1) x (cols+1); horizontal edges live on the
    // (rows+1) vertex rows, vertical edges on the (cols+1) vertex columns.
    let mut vertices = vec![false; (rows + 1) * (cols + 1)];
    let mut h_edges = vec![false; (rows + 1) * cols];
    let mut v_edges = vec![false; rows * (cols + 1)];
    let mut faces = 0usize;
    for r in 0..rows {
        for c in 0..cols {
            if !img.get(r, c) {
                continue;
            }
            faces += 1;
            vertices[r * (cols + 1) + c] = true;
            vertices[r * (cols + 1) + c + 1] = true;
            vertices[(r + 1) * (cols + 1) + c] = true;
            vertices[(r + 1) * (cols + 1) + c + 1] = true;
            h_edges[r * cols + c] = true;
            h_edges[(r + 1) * cols + c] = true;
            v_edges[r * (cols + 1) + c] = true;
            v_edges[r * (cols + 1) + c + 1] = true;
        }
    }
    CubicalCounts {
        v: vertices.iter().filter(|&&b| b).count(),
        e: h_edges.iter().filter(|&&b| b).count() + v_edges.iter().filter(|&&b| b).count(),
        f: faces,
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, i: u32) -> u32 {
        let mut root = i;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        // Path compression.
        let mut cur = i;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[rb as usize] = ra;
        }
    }
}

/// Betti numbers of the cubical complex: `b0` by union-find over 8-neighbor
/// pixel adjacency (equivalent to connectivity of the closed-square union),
/// `b1` from the Euler identity. The identity is asserted in-line: a
/// negative loop count would mean the counts and the connectivity disagree.
pub fn betti(img: &BinaryImage) -> BettiPair {
    let (rows, cols) = (img.rows, img.cols);
    let mut uf = UnionFind::new(rows * cols);
    let mut active = 0usize;
    for r in 0..rows {
        for c in 0..cols {
            if !img.get(r, c) {
                continue;
            }
            active += 1;
            let id = (r * cols + c) as u32;
            // Union with already-visited neighbors: W, NW, N, NE.
            if c > 0 && img.get(r, c - 1) {
                uf.union(id, id - 1);
            }
            if r > 0 {
                let above = id - cols as u32;
                if c > 0 && img.get(r - 1, c - 1) {
                    uf.union(id, above - 1);
                }
                if img.get(r - 1, c) {
                    uf.union(id, above);
                }
                if c + 1 < cols && img.get(r - 1, c + 1) {
                    uf.union(id, above + 1);
                }
            }
        }
    }
    let mut b0 = 0usize;
    for r in 0..rows {
        for c in 0..cols {
            let id = (r * cols + c) as u32;
            if img.get(r, c) && uf.find(id) == id {
                b0 += 1;
            }
        }
    }
    let counts = cubical_counts(img);
    debug_assert_eq!(counts.f, active);
    let chi = counts.euler();
    let b1 = b0 as i64 - chi;
    assert!(
        b1 >= 0,
        "Euler identity violated: b0 = {b0}, chi = {chi} (V={}, E={}, F={})",
        counts.v,
        counts.e,
        counts.f
    );
    BettiPair {
        b0,
        b1: b1 as usize,
    }
}

/// Pixel cap for the exact GF(2) oracle.
pub const ORACLE_PIXEL_CAP: usize = 4096;

/// Exact Betti numbers from GF(2) boundary-matrix ranks:
/// `b0 = #V - rank d1`, `b1 = #E - rank d1 - rank d2`. Desk scale only.
pub fn betti_oracle(img: &BinaryImage) -> Result<BettiPair> {
    let pixels = img.rows * img.cols;
    if pixels > ORACLE_PIXEL_CAP {
        return Err(Error::OracleSizeCap {
            pixels,
            cap: ORACLE_PIXEL_CAP,
        });
    }
    let (rows, cols) = (img.rows, img.cols);

    // Enumerate the cells of the union, assigning dense indices.
    let mut vertex_id = vec![usize::MAX; (rows + 1) * (cols + 1)];
    let mut h_edge_id = vec![usize::MAX; (rows + 1) * cols];
    let mut v_edge_id = vec![usize::MAX; rows * (cols + 1)];
    let mut n_vertices = 0usize;
    let mut n_edges = 0usize;
    let mut faces = Vec::new();

    let touch_vertex = |ids: &mut Vec<usize>, idx: usize, n: &mut usize| {
        if ids[idx] == usize::MAX {
            ids[idx] = *n;
            *n += 1;
        }
    };

    for r in 0..rows {
        for c in 0..cols {
            if !img.get(r, c) {
                continue;
            }
            for (vr, vc) in [(r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)] {
                touch_vertex(&mut vertex_id, vr * (cols + 1) + vc, &mut n_vertices);
            }
            for idx in [r * cols + c, (r + 1) * cols + c] {
                if h_edge_id[idx] == usize::MAX {
                    h_edge_id[idx] = n_edges;
                    n_edges += 1;
                }
            }
            for idx in [r * (cols + 1) + c, r * (cols + 1) + c + 1] {
                if v_edge_id[idx] == usize::MAX {
                    v_edge_id[idx] = n_edges;
                    n_edges += 1;
                }
            }
            faces.push((r, c));
        }
    }

    // d1: one GF(2) row per edge over the vertex basis.
    let vwords = n_vertices.div_ceil(64);
    let mut d1: Vec<Vec<u64>> = Vec::with_capacity(n_edges);
    d1.resize(n_edges, vec![0u64; vwords]);
    let set_bit = |row: &mut [u64], bit: usize| row[bit / 64] |= 1u64 << (bit % 64);
    for r in 0..=rows {
        for c in 0..cols {
            let id = h_edge_id[r * cols + c];
            if id != usize::MAX {
                let a = vertex_id[r * (cols + 1) + c];
                let b = vertex_id[r * (cols + 1) + c + 1];
                set_bit(&mut d1[id], a);
                set_bit(&mut d1[id], b);
            }
        }
    }
    for r in 0..rows {
        for c in 0..=cols {
            let id = v_edge_id[r * (cols + 1) + c];
            if id != usize::MAX {
                let a = vertex_id[r * (cols + 1) + c];
                let b = vertex_id[(r + 1) * (cols + 1) + c];
                set_bit(&mut d1[id], a);
                set_bit(&mut d1[id], b);
            }
        }
    }

    // d2: one GF(2) row per face over the edge basis.
    let ewords = n_edges.div_ceil(64);
    let mut d2: Vec<Vec<u64>> = Vec::with_capacity(faces.len());
    d2.resize(faces.len(), vec![0u64; ewords]);
    for (row, &(r, c)) in faces.iter().enumerate() {
        for edge in [
            h_edge_id[r * cols + c],
            h_edge_id[(r + 1) * cols + c],
            v_edge_id[r * (cols + 1) + c],
            v_edge_id[r * (cols + 1) + c + 1],
        ] {
            set_bit(&mut d2[row], edge);
        }
    }

    let rank_d1 = gf2_rank(&mut d1, n_vertices);
    let rank_d2 = gf2_rank(&mut d2, n_edges);
    let b0 = n_vertices - rank_d1;
    let b1 = n_edges - rank_d1 - rank_d2;
    Ok(BettiPair { b0, b1 })
}

/// Rank of a GF(2) matrix given as bitset rows.
fn gf2_rank(rows: &mut [Vec<u64>], n_cols: usize) -> usize {
    let mut rank = 0usize;
    for col in 0..n_cols {
        let word = col / 64;
        let mask = 1u64 << (col % 64);
        // Find a pivot row at or below `rank` with this column set.
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][word] & mask != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (pivot_row, rest) = {
            let (head, tail) = rows.split_at_mut(rank + 1);
            (&head[rank], tail)
        };
        for row in rest.iter_mut() {
            if row[word] & mask != 0 {
                for (w, p) in row.iter_mut().zip(pivot_row.iter()) {
                    *w ^= p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img_from_rows(rows: &[&[u8]]) -> BinaryImage {
        let r = rows.len();
        let c = rows[0].len();
        BinaryImage::from_fn(r, c, |i, j| rows[i][j] != 0)
    }

    #[test]
    fn empty_image_counts_and_betti() {
        let img = BinaryImage::from_fn(3, 3, |_, _| false);
        assert_eq!(cubical_counts(&img), CubicalCounts { v: 0, e: 0, f: 0 });
        assert_eq!(betti(&img), BettiPair { b0: 0, b1: 0 });
        assert_eq!(betti_oracle(&img).unwrap(), BettiPair { b0: 0, b1: 0 });
    }

    #[test]
    fn single_pixel_cells() {
        let img = BinaryImage::from_fn(1, 1, |_, _| true);
        assert_eq!(cubical_counts(&img), CubicalCounts { v: 4, e: 4, f: 1 });
        assert_eq!(betti(&img), BettiPair { b0: 1, b1: 0 });
        assert_eq!(betti_oracle(&img).unwrap(), BettiPair { b0: 1, b1: 0 });
    }

    #[test]
    fn ring_cells_and_loop() {
        // 3x3 with the center off: chi = 0, one component, one loop.
        let img = img_from_rows(&[&[1, 1, 1], &[1, 0, 1], &[1, 1, 1]]);
        let counts = cubical_counts(&img);
        assert_eq!(counts, CubicalCounts { v: 16, e: 24, f: 8 });
        assert_eq!(counts.euler(), 0);
        assert_eq!(betti(&img), BettiPair { b0: 1, b1: 1 });
        assert_eq!(betti_oracle(&img).unwrap(), BettiPair { b0: 1, b1: 1 });
    }

    #[test]
    fn full_rectangles_are_contractible() {
        for (r, c) in [(1, 5), (4, 4), (3, 7)] {
            let img = BinaryImage::from_fn(r, c, |_, _| true);
            assert_eq!(betti(&img), BettiPair { b0: 1, b1: 0 });
        }
    }

    #[test]
    fn corner_sharing_pixels_are_connected() {
        // Two diagonal pixels share one vertex: a single component in the
        // closed-square complex. V = 7 (shared corner counted once).
        let img = img_from_rows(&[&[1, 0], &[0, 1]]);
        let counts = cubical_counts(&img);
        assert_eq!(counts, CubicalCounts { v: 7, e: 8, f: 2 });
        assert_eq!(betti(&img), BettiPair { b0: 1, b1: 0 });
        assert_eq!(betti_oracle(&img).unwrap(), BettiPair { b0: 1, b1: 0 });
    }

    #[test]
    fn isolated_pixel_increments_b0_only() {
        let base = img_from_rows(&[&[1, 1, 0, 0], &[1, 1, 0, 0], &[0, 0, 0, 0]]);
        let plus = img_from_rows(&[&[1, 1, 0, 0], &[1, 1, 0, 0], &[0, 0, 0, 1]]);
        let a = betti(&base);
        let b = betti(&plus);
        assert_eq!(b.b0, a.b0 + 1);
        assert_eq!(b.b1, a.b1);
    }

    #[test]
    fn single_pixel_oracle_ranks() {
        // 4 vertices, 4 edges, 1 face: rank d1 = 3, rank d2 = 1.
        let img = BinaryImage::from_fn(1, 1, |_, _| true);
        let pair = betti_oracle(&img).unwrap();
        assert_eq!(pair, BettiPair { b0: 1, b1: 0 });
    }

    #[test]
    fn exhaustive_3x3_oracle_equivalence() {
        for mask in 0u16..512 {
            let img = BinaryImage::from_fn(3, 3, |r, c| mask & (1 << (r * 3 + c)) != 0);
            let fast = betti(&img);
            let exact = betti_oracle(&img).unwrap();
            assert_eq!(fast, exact, "mask {mask:#011b}");
        }
    }

    #[test]
    fn random_8x8_oracle_equivalence() {
        // Deterministic xorshift over 600 dense-ish random images.
        let mut state = 0x853c49e6748fea9b_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for case in 0..600 {
            let bits = next();
            let img = BinaryImage::from_fn(8, 8, |r, c| bits & (1 << (r * 8 + c)) != 0);
            let fast = betti(&img);
            let exact = betti_oracle(&img).unwrap();
            assert_eq!(fast, exact, "case {case}: bits {bits:#066b}");
            // Euler identity cross-check on the fast path.
            let counts = cubical_counts(&img);
            assert_eq!(fast.b0 as i64 - fast.b1 as i64, counts.euler());
        }
    }

    #[test]
    fn oracle_respects_size_cap() {
        let img = BinaryImage::from_fn(65, 64, |_, _| false);
        assert!(matches!(
            betti_oracle(&img),
            Err(Error::OracleSizeCap { .. })
        ));
    }

    #[test]
    fn binarize_thresholds_relative_to_peak() {
        let mut s = Section::zeros(4, 4, 0.004, 10.0);
        *s.at_mut(1, 1) = 10.0;
        *s.at_mut(2, 2) = -6.0;
        *s.at_mut(3, 3) = 0.5;
        let img = binarize(&s, 0.5).unwrap();
        assert_eq!(img.active_pixels(), 2); // 10 and -6 pass the 5.0 cut
        assert!(img.get(1, 1));
        assert!(img.get(2, 2));
        // Scaling the section does not change the mask.
        let mut scaled = s.clone();
        for v in &mut scaled.samples {
            *v *= 137.0;
        }
        let img2 = binarize(&scaled, 0.5).unwrap();
        assert_eq!(img.bits, img2.bits);
    }

    #[test]
    fn binarize_tau_near_one_keeps_only_peak() {
        let mut s = Section::zeros(4, 4, 0.004, 10.0);
        *s.at_mut(1, 1) = 10.0;
        *s.at_mut(2, 2) = -9.99;
        let img = binarize(&s, 0.9999).unwrap();
        assert_eq!(img.active_pixels(), 1);
        assert!(img.get(1, 1));
    }

    #[test]
    fn binarize_rejects_all_zero() {
        let s = Section::zeros(4, 4, 0.004, 10.0);
        assert!(matches!(binarize(&s, 0.1), Err(Error::ZeroAmplitude)));
    }

    #[test]
    fn binarize_rejects_bad_tau() {
        let mut s = Section::zeros(4, 4, 0.004, 10.0);
        *s.at_mut(0, 0) = 1.0;
        assert!(binarize(&s, 0.0).is_err());
        assert!(binarize(&s, 1.0).is_err());
        assert!(binarize(&s, -0.3).is_err());
    }
}
