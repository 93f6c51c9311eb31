//! Hilbert-curve numbering of the dyadic cubes of `(0,1)^d`.
//!
//! The generator is Skilling's transpose algorithm (Gray-code decoding
//! followed by the reflect/rotate correction). Any ordering that passes
//! [`check_face_adjacency`] and [`check_prefix_nesting`] is acceptable to the
//! rest of the crate; the generator is only one such ordering.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SnumError};

/// Upper bound on `2^{dk}` so the tables stay in memory.
pub const MAX_CUBES: usize = 1 << 24;

/// `{x ∈ Q : 2^level x - coords ∈ Q}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: u32,
    pub coords: Vec<u32>,
}

impl DyadicCube {
    pub fn new(level: u32, coords: Vec<u32>) -> Result<Self> {
        if level > 30 || coords.iter().any(|&c| (c as u64) >= (1u64 << level)) {
            return Err(SnumError::Domain(format!(
                "coordinates {coords:?} out of range for level {level}"
            )));
        }
        Ok(Self { level, coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn side(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn volume(&self) -> f64 {
        self.side().powi(self.dim() as i32)
    }

    pub fn lower(&self) -> Vec<f64> {
        let s = self.side();
        self.coords.iter().map(|&c| c as f64 * s).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        let s = self.side();
        self.coords.iter().map(|&c| (c as f64 + 0.5) * s).collect()
    }

    /// Ancestor at a coarser `level`.
    pub fn ancestor(&self, level: u32) -> DyadicCube {
        debug_assert!(level <= self.level);
        let shift = self.level - level;
        DyadicCube { level, coords: self.coords.iter().map(|&c| c >> shift).collect() }
    }

    /// Whether the closed cube contains the point.
    pub fn contains_point(&self, x: &[f64]) -> bool {
        let s = self.side();
        self.coords
            .iter()
            .zip(x)
            .all(|(&c, &xi)| xi >= c as f64 * s && xi <= (c as f64 + 1.0) * s)
    }

    pub fn is_face_adjacent(&self, other: &DyadicCube) -> bool {
        if self.level != other.level || self.dim() != other.dim() {
            return false;
        }
        let mut diff = 0;
        for (&a, &b) in self.coords.iter().zip(&other.coords) {
            match a.abs_diff(b) {
                0 => {}
                1 => diff += 1,
                _ => return false,
            }
        }
        diff == 1
    }
}

/// A numbering `{1, …, 2^{dk}} → 𝒬_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertOrdering {
    dim: usize,
    order: u32,
    index_to_cube: Vec<DyadicCube>,
    cube_to_index: Vec<usize>,
}

fn cube_count(dim: usize, order: u32) -> Result<usize> {
    let bits = dim as u64 * order as u64;
    if dim == 0 || order == 0 {
        return Err(SnumError::Domain("need dim >= 1 and order >= 1".into()));
    }
    if bits >= 63 || (1usize << bits) > MAX_CUBES || order > 30 {
        return Err(SnumError::Capacity(format!("2^({dim}*{order}) cubes exceed the table capacity")));
    }
    Ok(1usize << bits)
}

/// Skilling's inverse transform: transposed Hilbert index to axes.
fn transpose_to_axes(x: &mut [u32], bits: u32) {
    let n = x.len();
    let big_n: u32 = 2 << (bits - 1);
    let t = x[n - 1] >> 1;
    for i in (1..n).rev() {
        x[i] ^= x[i - 1];
    }
    x[0] ^= t;
    let mut q: u32 = 2;
    while q != big_n {
        let p = q - 1;
        for i in (0..n).rev() {
            if x[i] & q != 0 {
                x[0] ^= p;
            } else {
                let t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
        q <<= 1;
    }
}

fn index_to_transpose(h: usize, dim: usize, bits: u32) -> Vec<u32> {
    let mut x = vec![0u32; dim];
    let mut pos = dim as u32 * bits;
    for j in (0..bits).rev() {
        for xi in x.iter_mut() {
            pos -= 1;
            if (h >> pos) & 1 == 1 {
                *xi |= 1 << j;
            }
        }
    }
    x
}

impl HilbertOrdering {
    /// Builds an ordering from an explicit cube sequence (used for custom or
    /// deliberately broken orderings). Must be a bijection onto `𝒬_order`.
    pub fn from_cubes(dim: usize, order: u32, cubes: Vec<DyadicCube>) -> Result<Self> {
        let n = cube_count(dim, order)?;
        if cubes.len() != n {
            return Err(SnumError::DimensionMismatch(format!("expected {n} cubes, got {}", cubes.len())));
        }
        let mut cube_to_index = vec![usize::MAX; n];
        for (i, c) in cubes.iter().enumerate() {
            if c.level != order || c.dim() != dim {
                return Err(SnumError::Domain(format!("cube {c:?} not in generation {order}")));
            }
            let flat = flat_index(&c.coords, order);
            if cube_to_index[flat] != usize::MAX {
                return Err(SnumError::Domain(format!("cube {c:?} listed twice")));
            }
            cube_to_index[flat] = i;
        }
        Ok(Self { dim, order, index_to_cube: cubes, cube_to_index })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.index_to_cube.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_to_cube.is_empty()
    }

    /// Cube with 1-based label `index`.
    pub fn cube(&self, index: usize) -> Result<&DyadicCube> {
        if index == 0 || index > self.len() {
            return Err(SnumError::IndexOutOfRange(format!("label {index} not in 1..={}", self.len())));
        }
        Ok(&self.index_to_cube[index - 1])
    }

    /// 1-based label of a level-`order` cube.
    pub fn index_of(&self, coords: &[u32]) -> Result<usize> {
        if coords.len() != self.dim || coords.iter().any(|&c| (c as u64) >= (1u64 << self.order)) {
            return Err(SnumError::IndexOutOfRange(format!("{coords:?}")));
        }
        Ok(self.cube_to_index[flat_index(coords, self.order)] + 1)
    }

    /// Cubes in label order (position `i` holds label `i + 1`).
    pub fn cubes(&self) -> &[DyadicCube] {
        &self.index_to_cube
    }

    /// Level-`level` ancestors listed in order of first visit.
    pub fn induced_order(&self, level: u32) -> Vec<DyadicCube> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for c in &self.index_to_cube {
            let a = c.ancestor(level);
            if seen.insert(a.clone()) {
                out.push(a);
            }
        }
        out
    }

    /// Index-to-coordinates table as CSV (`index,x0,x1,...`).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index");
        for a in 0..self.dim {
            s.push_str(&format!(",x{a}"));
        }
        s.push('\n');
        for (i, c) in self.index_to_cube.iter().enumerate() {
            s.push_str(&(i + 1).to_string());
            for x in &c.coords {
                s.push_str(&format!(",{x}"));
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dim,
            "order": self.order,
            "index_origin": 1,
            "cubes": self.index_to_cube.iter().map(|c| &c.coords).collect::<Vec<_>>(),
        })
    }
}

fn flat_index(coords: &[u32], order: u32) -> usize {
    coords.iter().fold(0usize, |acc, &c| (acc << order) | c as usize)
}

/// The canonical Hilbert ordering of `𝒬_k` in dimension `d`.
/// `d = 1` is the left-to-right scan.
pub fn hilbert_order(d: usize, k: u32) -> Result<HilbertOrdering> {
    let n = cube_count(d, k)?;
    let cubes = (0..n)
        .map(|h| {
            let coords = if d == 1 {
                vec![h as u32]
            } else {
                let mut x = index_to_transpose(h, d, k);
                transpose_to_axes(&mut x, k);
                x
            };
            DyadicCube { level: k, coords }
        })
        .collect();
    HilbertOrdering::from_cubes(d, k, cubes)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdjacencyReport {
    pub ok: bool,
    /// 1-based label `i` such that cubes `i` and `i + 1` do not share a face.
    pub first_violation: Option<usize>,
}

pub fn check_face_adjacency(o: &HilbertOrdering) -> AdjacencyReport {
    let first_violation = o
        .index_to_cube
        .windows(2)
        .position(|w| !w[0].is_face_adjacent(&w[1]))
        .map(|i| i + 1);
    AdjacencyReport { ok: first_violation.is_none(), first_violation }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestingReport {
    pub ok: bool,
    pub first_violation: Option<DyadicCube>,
}

/// Every coarser cube (levels `1..k`) must have its descendants on one
/// contiguous block of labels.
pub fn check_prefix_nesting(o: &HilbertOrdering) -> NestingReport {
    for level in 1..o.order {
        let mut finished = HashSet::new();
        let mut current: Option<DyadicCube> = None;
        for c in &o.index_to_cube {
            let a = c.ancestor(level);
            if current.as_ref() != Some(&a) {
                if finished.contains(&a) {
                    return NestingReport { ok: false, first_violation: Some(a) };
                }
                if let Some(prev) = current.take() {
                    finished.insert(prev);
                }
                current = Some(a);
            }
        }
    }
    NestingReport { ok: true, first_violation: None }
}

/// Whether `a` is the image of `b` under a symmetry of the cube (axis
/// permutation combined with reflections), applied cube-wise.
pub fn equal_up_to_symmetry(a: &[DyadicCube], b: &[DyadicCube]) -> bool {
    if a.len() != b.len() || a.is_empty() {
        return a.len() == b.len();
    }
    let d = a[0].dim();
    let level = a[0].level;
    let top = (1u32 << level) - 1;
    let perms = {
        let mut out = Vec::new();
        let mut p: Vec<usize> = (0..d).collect();
        permute(&mut p, 0, &mut out);
        out
    };
    for perm in &perms {
        for flips in 0..(1u32 << d) {
            let ok = a.iter().zip(b).all(|(ca, cb)| {
                (0..d).all(|i| {
                    let src = cb.coords[perm[i]];
                    let img = if flips >> i & 1 == 1 { top - src } else { src };
                    img == ca.coords[i]
                })
            });
            if ok {
                return true;
            }
        }
    }
    false
}

fn permute(p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == p.len() {
        out.push(p.clone());
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, out);
        p.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row_major(d: usize, k: u32) -> HilbertOrdering {
        let n = 1usize << (d as u32 * k);
        let cubes = (0..n)
            .map(|h| {
                let coords = (0..d).rev().map(|a| ((h >> (a as u32 * k)) & ((1 << k) - 1)) as u32).collect();
                DyadicCube { level: k, coords }
            })
            .collect();
        HilbertOrdering::from_cubes(d, k, cubes).unwrap()
    }

    fn serpentine(k: u32) -> HilbertOrdering {
        let side = 1u32 << k;
        let mut cubes = Vec::new();
        for r in 0..side {
            for c in 0..side {
                let c = if r % 2 == 0 { c } else { side - 1 - c };
                cubes.push(DyadicCube { level: k, coords: vec![r, c] });
            }
        }
        HilbertOrdering::from_cubes(2, k, cubes).unwrap()
    }

    #[test]
    fn one_dimensional_is_identity_scan() {
        let o = hilbert_order(1, 2).unwrap();
        let xs: Vec<u32> = o.cubes().iter().map(|c| c.coords[0]).collect();
        assert_eq!(xs, vec![0, 1, 2, 3]);
    }

    #[test]
    fn first_order_square_is_a_u() {
        let o = hilbert_order(2, 1).unwrap();
        let xs: Vec<Vec<u32>> = o.cubes().iter().map(|c| c.coords.clone()).collect();
        assert_eq!(xs, vec![vec![0, 0], vec![0, 1], vec![1, 1], vec![1, 0]]);
        assert!(check_face_adjacency(&o).ok);
    }

    #[test]
    fn row_major_breaks_adjacency_at_wrap() {
        let r = check_face_adjacency(&row_major(2, 1));
        assert!(!r.ok);
        assert_eq!(r.first_violation, Some(2));
    }

    #[test]
    fn serpentine_breaks_nesting() {
        let o = serpentine(2);
        assert!(check_face_adjacency(&o).ok);
        let r = check_prefix_nesting(&o);
        assert!(!r.ok);
        assert!(r.first_violation.is_some());
    }

    #[test]
    fn order_one_always_nested() {
        assert!(check_prefix_nesting(&row_major(2, 1)).ok);
        assert!(check_prefix_nesting(&row_major(3, 1)).ok);
    }

    #[test]
    fn checks_pass_for_generated_curves() {
        for (d, k) in [(2, 3), (2, 4), (3, 3), (4, 2)] {
            let o = hilbert_order(d, k).unwrap();
            assert!(check_face_adjacency(&o).ok, "adjacency d={d} k={k}");
            assert!(check_prefix_nesting(&o).ok, "nesting d={d} k={k}");
        }
    }

    #[test]
    fn bijectivity_exhaustive() {
        for (d, kmax) in [(2usize, 5u32), (3, 3)] {
            for k in 1..=kmax {
                let o = hilbert_order(d, k).unwrap();
                for i in 1..=o.len() {
                    assert_eq!(o.index_of(&o.cube(i).unwrap().coords).unwrap(), i);
                }
            }
        }
    }

    #[test]
    fn self_similar_up_to_symmetry() {
        for (d, kmax) in [(2usize, 5u32), (3, 3)] {
            for k in 2..=kmax {
                let fine = hilbert_order(d, k).unwrap();
                let coarse = hilbert_order(d, k - 1).unwrap();
                assert!(equal_up_to_symmetry(&fine.induced_order(k - 1), coarse.cubes()), "d={d} k={k}");
            }
        }
    }

    #[test]
    fn consecutive_centres_are_one_side_apart() {
        let o = hilbert_order(2, 4).unwrap();
        for w in o.cubes().windows(2) {
            let (a, b) = (w[0].center(), w[1].center());
            let dist: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            assert_eq!(dist, 1.0 / 16.0);
        }
    }

    #[test]
    fn capacity_and_labels() {
        assert!(matches!(hilbert_order(8, 4), Err(SnumError::Capacity(_))));
        let o = hilbert_order(2, 1).unwrap();
        assert!(o.cube(0).is_err());
        assert!(o.cube(5).is_err());
        assert!(o.index_of(&[2, 0]).is_err());
    }

    #[test]
    fn from_cubes_rejects_duplicates() {
        let c = DyadicCube { level: 1, coords: vec![0, 0] };
        assert!(HilbertOrdering::from_cubes(2, 1, vec![c.clone(), c.clone(), c.clone(), c]).is_err());
    }
}
