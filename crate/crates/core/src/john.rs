//! Segment domains `Ω_ij` along a Hilbert ordering and constructive John
//! certificates for them.
//!
//! A segment domain is split into maximal dyadic blocks along the curve.
//! Because the ordering is prefix-nested, the blocks are exactly the aligned
//! label ranges of a segment-tree decomposition: block sides grow up to a run
//! of largest blocks and then shrink. The John curve of a point walks from
//! its block towards the middle block of the largest run, through block
//! centres, and through the centre of the shared face whenever it steps from
//! a smaller block into a larger one.
//!
//! With `M = 2^d - 1`, `α = M - 1/2 + √d` and `K = α + M - 1/2`, the path
//! length from `x` to the first centre reached on a level of side `s` is at
//! most `α s`, and on every segment the distance to the boundary is controlled
//! by the side of the blocks the segment lies in. The worst case is the
//! segment leaving a face centre into a larger block, which gives
//!
//! ```text
//! C_J(d) = 2K(1 + √d) + √d,
//! ```
//!
//! independent of `i`, `j` and the curve order.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SnumError};
use crate::grid::GridFunction;
use crate::hilbert::{check_prefix_nesting, DyadicCube, HilbertOrdering};
use crate::lorentz::{lorentz_norm, LorentzParams};

/// `Ω_ij = ⋃_{l=i}^{j} Q_l`, labels 1-based and inclusive.
#[derive(Debug, Clone)]
pub struct CubeUnion {
    ordering: Arc<HilbertOrdering>,
    i: usize,
    j: usize,
}

/// A maximal dyadic cube of the decomposition, with its label range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub cube: DyadicCube,
    pub first_label: usize,
    pub last_label: usize,
}

pub fn segment_domain(ordering: Arc<HilbertOrdering>, i: usize, j: usize) -> Result<CubeUnion> {
    if i == 0 || i > j || j > ordering.len() {
        return Err(SnumError::IndexOutOfRange(format!(
            "need 1 <= i <= j <= {}, got i = {i}, j = {j}",
            ordering.len()
        )));
    }
    Ok(CubeUnion { ordering, i, j })
}

fn dist_point_box(x: &[f64], lo: &[f64], side: f64) -> f64 {
    x.iter()
        .zip(lo)
        .map(|(&xi, &l)| {
            let d = (l - xi).max(xi - (l + side)).max(0.0);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

impl CubeUnion {
    pub fn ordering(&self) -> &Arc<HilbertOrdering> {
        &self.ordering
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.ordering.dim()
    }

    pub fn level(&self) -> u32 {
        self.ordering.order()
    }

    pub fn cells(&self) -> &[DyadicCube] {
        &self.ordering.cubes()[self.i - 1..self.j]
    }

    pub fn cell_count(&self) -> usize {
        self.j - self.i + 1
    }

    pub fn volume(&self) -> f64 {
        self.cell_count() as f64 * self.cells()[0].volume()
    }

    pub fn contains_cell(&self, coords: &[u32]) -> bool {
        self.ordering
            .index_of(coords)
            .map(|l| l >= self.i && l <= self.j)
            .unwrap_or(false)
    }

    /// Exact distance from `x` to `∂Ω`, zero when `x ∉ Ω`.
    ///
    /// `ℝ^d \ Ω` is the union of the closed level-`k` cells outside `Ω` and
    /// the complement of `Q`; cells are scanned in windows of growing radius
    /// until no unscanned cell can be closer.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        let k = self.level();
        let per_side = 1i64 << k;
        let s = 1.0 / per_side as f64;
        let d = self.dim();
        let mut best = x.iter().map(|&xi| xi.min(1.0 - xi)).fold(f64::INFINITY, f64::min);
        if best <= 0.0 {
            return 0.0;
        }
        let home: Vec<i64> = x.iter().map(|&xi| ((xi / s).floor() as i64).clamp(0, per_side - 1)).collect();
        let mut radius = 1i64;
        loop {
            let lo: Vec<i64> = home.iter().map(|&c| (c - radius).max(0)).collect();
            let hi: Vec<i64> = home.iter().map(|&c| (c + radius).min(per_side - 1)).collect();
            let mut idx = lo.clone();
            'scan: loop {
                let coords: Vec<u32> = idx.iter().map(|&c| c as u32).collect();
                if !self.contains_cell(&coords) {
                    let lower: Vec<f64> = idx.iter().map(|&c| c as f64 * s).collect();
                    best = best.min(dist_point_box(x, &lower, s));
                }
                let mut a = 0;
                loop {
                    if a == d {
                        break 'scan;
                    }
                    idx[a] += 1;
                    if idx[a] <= hi[a] {
                        break;
                    }
                    idx[a] = lo[a];
                    a += 1;
                }
            }
            let covers_all = lo.iter().all(|&l| l == 0) && hi.iter().all(|&h| h == per_side - 1);
            if best <= radius as f64 * s || covers_all {
                return best;
            }
            radius *= 2;
        }
    }

    /// Open-set membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.boundary_distance(x) > 0.0
    }

    /// Connectivity of the cells under face adjacency.
    pub fn is_connected(&self) -> bool {
        let cells = self.cells();
        let mut seen = vec![false; cells.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(c) = stack.pop() {
            for (o, other) in cells.iter().enumerate() {
                if !seen[o] && cells[c].is_face_adjacent(other) {
                    seen[o] = true;
                    stack.push(o);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Maximal dyadic blocks in curve order. Requires a prefix-nested ordering.
    pub fn decomposition(&self) -> Result<Vec<Block>> {
        let nest = check_prefix_nesting(&self.ordering);
        if !nest.ok {
            return Err(SnumError::Inapplicable(format!(
                "ordering is not prefix-nested (coarse cube {:?} visited twice)",
                nest.first_violation
            )));
        }
        let d = self.dim() as u32;
        let k = self.level();
        let (mut pos, end) = (self.i - 1, self.j - 1);
        let mut out = Vec::new();
        while pos <= end {
            let mut t = 0u32;
            while t < k {
                let size = 1usize << (d * (t + 1));
                if pos % size == 0 && pos + size - 1 <= end {
                    t += 1;
                } else {
                    break;
                }
            }
            let size = 1usize << (d * t);
            let cube = self.ordering.cubes()[pos].ancestor(k - t);
            out.push(Block { cube, first_label: pos + 1, last_label: pos + size });
            pos += size;
        }
        Ok(out)
    }

    /// Cell of `Ω` whose closure contains `x` (lowest label wins on shared faces).
    fn cell_label_of(&self, x: &[f64]) -> Option<usize> {
        let k = self.level();
        let per_side = 1i64 << k;
        let s = 1.0 / per_side as f64;
        let home: Vec<i64> = x.iter().map(|&xi| (xi / s).floor() as i64).collect();
        let d = self.dim();
        let mut best: Option<usize> = None;
        for corner in 0..(1usize << d) {
            let coords: Option<Vec<u32>> = (0..d)
                .map(|a| {
                    let c = home[a] - ((corner >> a) & 1) as i64;
                    (0..per_side).contains(&c).then_some(c as u32)
                })
                .collect();
            let Some(coords) = coords else { continue };
            let cube = DyadicCube { level: k, coords: coords.clone() };
            if !cube.contains_point(x) {
                continue;
            }
            if let Ok(l) = self.ordering.index_of(&coords) {
                if l >= self.i && l <= self.j {
                    best = Some(best.map_or(l, |b: usize| b.min(l)));
                }
            }
        }
        best
    }
}

/// Uniform constant `C_J(d)` of the construction.
pub fn uniform_john_constant(d: usize) -> f64 {
    let sd = (d as f64).sqrt();
    let m = (1u64 << d) as f64 - 1.0;
    let alpha = m - 0.5 + sd;
    let k = alpha + m - 0.5;
    2.0 * k * (1.0 + sd) + sd
}

/// A John curve rule for one segment domain.
#[derive(Debug, Clone, Serialize)]
pub struct JohnCertificate {
    /// The central point `x₀`.
    pub center: Vec<f64>,
    /// `C_J ≥ 1` claimed by the certificate.
    pub constant: f64,
    /// Sharper constant for this particular block structure (`√d` for a single block).
    pub local_constant: f64,
    pub blocks: Vec<Block>,
    /// Position of the central block in `blocks`.
    pub top_block: usize,
    /// Run lengths `m_1, m_2, …` walking forward / backward from the central block.
    pub runs_forward: Vec<usize>,
    pub runs_backward: Vec<usize>,
}

fn run_lengths(levels: impl Iterator<Item = u32>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut last = None;
    for l in levels {
        if Some(l) == last {
            *out.last_mut().unwrap() += 1;
        } else {
            out.push(1);
            last = Some(l);
        }
    }
    out
}

impl JohnCertificate {
    /// Polyline from `x` to the central point, through block centres and the
    /// centres of shared faces.
    pub fn curve(&self, omega: &CubeUnion, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let label = omega
            .cell_label_of(x)
            .ok_or_else(|| SnumError::Domain(format!("point {x:?} is not in the domain")))?;
        let mut q = self
            .blocks
            .partition_point(|b| b.last_label < label);
        let mut pts = vec![x.to_vec(), self.blocks[q].cube.center()];
        while q != self.top_block {
            let next = if q > self.top_block { q - 1 } else { q + 1 };
            let (cur, nxt) = (&self.blocks[q].cube, &self.blocks[next].cube);
            if cur.level != nxt.level {
                pts.push(shared_face_center(cur, nxt)?);
            }
            pts.push(nxt.center());
            q = next;
        }
        Ok(pts)
    }
}

/// Centre of the smaller cube's face lying on the common face of two
/// touching dyadic cubes.
fn shared_face_center(a: &DyadicCube, b: &DyadicCube) -> Result<Vec<f64>> {
    let (small, big) = if a.level >= b.level { (a, b) } else { (b, a) };
    let (sl, ss) = (small.lower(), small.side());
    let (bl, bs) = (big.lower(), big.side());
    let mut c = small.center();
    let mut axis = None;
    for ax in 0..a.dim() {
        if (sl[ax] + ss - bl[ax]).abs() < 1e-15 {
            axis = Some((ax, bl[ax]));
        } else if (bl[ax] + bs - sl[ax]).abs() < 1e-15 {
            axis = Some((ax, sl[ax]));
        }
    }
    let (ax, plane) = axis.ok_or_else(|| {
        SnumError::Construction(format!("blocks {a:?} and {b:?} do not share a face"))
    })?;
    c[ax] = plane;
    Ok(c)
}

/// Builds the certificate of the constructive proof for `Ω_ij`.
pub fn john_bound_constructive(omega: &CubeUnion) -> Result<JohnCertificate> {
    let blocks = omega.decomposition()?;
    let top_level = blocks.iter().map(|b| b.cube.level).min().unwrap();
    let first = blocks.iter().position(|b| b.cube.level == top_level).unwrap();
    let last = blocks.iter().rposition(|b| b.cube.level == top_level).unwrap();
    if blocks[first..=last].iter().any(|b| b.cube.level != top_level) {
        return Err(SnumError::Inapplicable("largest blocks do not form a single run".into()));
    }
    let top_block = first + (last - first) / 2;
    let runs_forward = run_lengths(blocks[top_block..].iter().map(|b| b.cube.level));
    let runs_backward = run_lengths(blocks[..=top_block].iter().rev().map(|b| b.cube.level));
    let d = omega.dim();
    let constant = uniform_john_constant(d);
    let local_constant = if blocks.len() == 1 { (d as f64).sqrt() } else { constant };
    Ok(JohnCertificate {
        center: blocks[top_block].cube.center(),
        constant,
        local_constant,
        blocks,
        top_block,
        runs_forward,
        runs_backward,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct JohnVerification {
    pub passed: bool,
    pub worst_ratio: f64,
    pub evaluations: usize,
    pub start_points: usize,
    pub worst_start: Vec<f64>,
}

const SEGMENT_STEPS: usize = 8;

fn ratios_along(omega: &CubeUnion, cert: &JohnCertificate, x: &[f64]) -> Result<(f64, usize)> {
    let pts = cert.curve(omega, x)?;
    let sd = (omega.dim() as f64).sqrt();
    let w_star = 1.0 / (1.0 + sd);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for seg in pts.windows(2) {
        let dir = sub(&seg[1], &seg[0]);
        let mut taus: Vec<f64> = (1..=SEGMENT_STEPS).map(|s| s as f64 / SEGMENT_STEPS as f64).collect();
        // near-worst parameter on segments leaving a face centre
        taus.push(w_star * 0.25);
        taus.push(w_star * 0.05);
        for tau in taus {
            let p: Vec<f64> = seg[0].iter().zip(&dir).map(|(a, b)| a + tau * b).collect();
            let dist = omega.boundary_distance(&p);
            if dist <= 0.0 {
                return Err(SnumError::CertificateInvalid(format!("polyline leaves the domain at {p:?}")));
            }
            worst = worst.max(norm(&sub(x, &p)) / dist);
            count += 1;
        }
    }
    Ok((worst, count))
}

/// Samples start points (all cell centres, then uniform random interior
/// points) and curve parameters until `samples` evaluations are reached, and
/// reports the largest `|x - γ(t)| / dist(γ(t), ∂Ω)`.
pub fn verify_john_certificate(
    omega: &CubeUnion,
    cert: &JohnCertificate,
    samples: usize,
    seed: u64,
) -> Result<JohnVerification> {
    if samples == 0 {
        return Err(SnumError::Precondition("need at least one sample".into()));
    }
    let mut starts: Vec<Vec<f64>> = omega.cells().iter().map(DyadicCube::center).collect();
    let per_start_estimate = {
        let (_, c) = ratios_along(omega, cert, &starts[0])?;
        c.max(1)
    };
    let wanted_starts = samples.div_ceil(per_start_estimate).max(starts.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = omega.cells();
    while starts.len() < wanted_starts {
        let c = &cells[rng.gen_range(0..cells.len())];
        let (lo, s) = (c.lower(), c.side());
        starts.push(lo.iter().map(|&l| l + s * rng.gen_range(1e-6..1.0 - 1e-6)).collect());
    }
    let results: Vec<(f64, usize, usize)> = starts
        .par_iter()
        .enumerate()
        .map(|(idx, x)| ratios_along(omega, cert, x).map(|(w, c)| (w, c, idx)))
        .collect::<Result<_>>()?;
    let evaluations = results.iter().map(|r| r.1).sum();
    let (worst_ratio, _, worst_idx) = results
        .iter()
        .copied()
        .fold((0.0, 0, 0), |acc, r| if r.0 > acc.0 { r } else { acc });
    Ok(JohnVerification {
        passed: worst_ratio <= cert.constant,
        worst_ratio,
        evaluations,
        start_points: starts.len(),
        worst_start: starts[worst_idx].clone(),
    })
}

/// `ω_d`, the volume of the unit ball.
pub fn unit_ball_volume(d: usize) -> f64 {
    // Γ(d/2 + 1) via the half-integer recursion
    let mut gamma = if d.is_multiple_of(2) { 1.0 } else { std::f64::consts::PI.sqrt() / 2.0 };
    let mut x = if d.is_multiple_of(2) { 1.0 } else { 1.5 };
    while x < d as f64 / 2.0 + 1.0 - 1e-9 {
        gamma *= x;
        x += 1.0;
    }
    std::f64::consts::PI.powf(d as f64 / 2.0) / gamma
}

/// Oscillation constant of a single cube (any convex set of diameter
/// `√d·side` and volume `side^d`): `osc ≤ C ‖∇u‖_{d,1}` with
/// `C = 2 d^{d/2-1} ω_d^{1-1/d}`, from the convex-domain potential estimate
/// and the rearrangement bound `∫_E |x-z|^{1-d} dz ≤ d ω_d^{1-1/d} |E|^{1/d}`.
pub fn cube_oscillation_constant(d: usize) -> f64 {
    let df = d as f64;
    2.0 * df.powf(df / 2.0 - 1.0) * unit_ball_volume(d).powf(1.0 - 1.0 / df)
}

/// Oscillation constant of a segment domain, chained over its `L` blocks:
/// `osc(Ω) ≤ Σ osc(block) ≤ C_cube L^{1/d'} ‖∇u χ_Ω‖_{d,1}`.
pub fn segment_oscillation_constant(d: usize, blocks: usize) -> f64 {
    let conj_inv = 1.0 - 1.0 / d as f64;
    cube_oscillation_constant(d) * (blocks as f64).powf(conj_inv)
}

#[derive(Debug, Clone, Serialize)]
pub struct OscillationReport {
    pub oscillation: f64,
    pub gradient_norm: f64,
    pub constant: f64,
    pub holds: bool,
}

impl OscillationReport {
    pub fn slack(&self) -> f64 {
        self.constant * self.gradient_norm - self.oscillation
    }
}

/// Map from grid cells of `u` to membership in `Ω`; the grid must refine the cubes of `Ω`.
pub fn cell_membership<'a>(omega: &'a CubeUnion, u: &GridFunction) -> Result<impl Fn(&[usize]) -> bool + 'a> {
    let per = 1usize << omega.level();
    let n = u.cells_per_side();
    if u.dim() != omega.dim() {
        return Err(SnumError::DimensionMismatch("grid and domain dimensions differ".into()));
    }
    if !n.is_multiple_of(per) {
        return Err(SnumError::DimensionMismatch(format!(
            "grid with {n} cells per side is not nested in level-{} cubes",
            omega.level()
        )));
    }
    let ratio = n / per;
    Ok(move |cell: &[usize]| {
        let coords: Vec<u32> = cell.iter().map(|&c| (c / ratio) as u32).collect();
        omega.contains_cell(&coords)
    })
}

/// Checks `sup_{x,y∈Ω} |u(x) - u(y)| ≤ C ‖∇u χ_Ω‖_{d,1}` for one grid function.
pub fn oscillation_check(omega: &CubeUnion, u: &GridFunction) -> Result<OscillationReport> {
    let blocks = omega.decomposition()?;
    let member = cell_membership(omega, u)?;
    let oscillation = u.oscillation_where(&member);
    let gradient_norm = lorentz_norm(&u.gradient_data_where(&member), LorentzParams::critical(u.dim()));
    let constant = segment_oscillation_constant(u.dim(), blocks.len());
    Ok(OscillationReport {
        oscillation,
        gradient_norm,
        constant,
        holds: oscillation <= constant * gradient_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{pyramid, GridSpec};
    use crate::hilbert::hilbert_order;

    fn ord(d: usize, k: u32) -> Arc<HilbertOrdering> {
        Arc::new(hilbert_order(d, k).unwrap())
    }

    #[test]
    fn single_cube_distance() {
        let o = ord(2, 3);
        let om = segment_domain(o.clone(), 5, 5).unwrap();
        let c = om.cells()[0].center();
        assert_eq!(om.boundary_distance(&c), 1.0 / 16.0);
        let full = segment_domain(o, 1, 64).unwrap();
        assert_eq!(full.boundary_distance(&[0.5, 0.5]), 0.5);
    }

    #[test]
    fn index_errors() {
        let o = ord(2, 2);
        assert!(segment_domain(o.clone(), 0, 3).is_err());
        assert!(segment_domain(o.clone(), 4, 3).is_err());
        assert!(segment_domain(o, 1, 17).is_err());
    }

    #[test]
    fn l_shaped_union_connected() {
        let o = ord(2, 2);
        let om = segment_domain(o, 2, 5).unwrap();
        assert_eq!(om.cell_count(), 4);
        assert!(om.is_connected());
    }

    #[test]
    fn decomposition_covers_labels() {
        let o = ord(2, 4);
        for (i, j) in [(1, 256), (3, 200), (17, 18), (100, 100)] {
            let om = segment_domain(o.clone(), i, j).unwrap();
            let blocks = om.decomposition().unwrap();
            assert_eq!(blocks[0].first_label, i);
            assert_eq!(blocks.last().unwrap().last_label, j);
            for w in blocks.windows(2) {
                assert_eq!(w[0].last_label + 1, w[1].first_label);
            }
        }
        let full = segment_domain(o, 1, 256).unwrap();
        assert_eq!(full.decomposition().unwrap().len(), 1);
    }

    #[test]
    fn single_cube_certificate_is_sqrt_d() {
        let o = ord(2, 3);
        let om = segment_domain(o.clone(), 7, 7).unwrap();
        let cert = john_bound_constructive(&om).unwrap();
        assert_eq!(cert.local_constant, 2f64.sqrt());
        let v = verify_john_certificate(&om, &cert, 2000, 1).unwrap();
        assert!(v.worst_ratio <= cert.local_constant + 1e-12);
        let full = john_bound_constructive(&segment_domain(o, 1, 64).unwrap()).unwrap();
        assert_eq!(full.local_constant, cert.local_constant);
        assert_eq!(full.center, vec![0.5, 0.5]);
    }

    #[test]
    fn wrong_constant_fails() {
        let o = ord(2, 2);
        let om = segment_domain(o, 2, 5).unwrap();
        let mut cert = john_bound_constructive(&om).unwrap();
        cert.constant = 1.0;
        let v = verify_john_certificate(&om, &cert, 2000, 3).unwrap();
        assert!(!v.passed);
        assert!(v.worst_ratio > 1.0);
    }

    #[test]
    fn run_length_bounds_exhaustive() {
        let d = 2;
        for k in 1..=4 {
            let o = ord(d, k);
            for i in 1..=o.len() {
                for j in i..=o.len() {
                    let cert = john_bound_constructive(&segment_domain(o.clone(), i, j).unwrap()).unwrap();
                    for runs in [&cert.runs_forward, &cert.runs_backward] {
                        assert!(runs[0] <= 2 * ((1 << d) - 2), "m1 {runs:?} at ({i},{j}) k={k}");
                        assert!(runs[1..].iter().all(|&m| m < (1 << d)), "{runs:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn non_nested_ordering_rejected() {
        let side = 4u32;
        let mut cubes = Vec::new();
        for r in 0..side {
            for c in 0..side {
                let c = if r % 2 == 0 { c } else { side - 1 - c };
                cubes.push(DyadicCube { level: 2, coords: vec![r, c] });
            }
        }
        let o = Arc::new(HilbertOrdering::from_cubes(2, 2, cubes).unwrap());
        let om = segment_domain(o, 1, 6).unwrap();
        assert!(matches!(john_bound_constructive(&om), Err(SnumError::Inapplicable(_))));
    }

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn oscillation_constant_and_hat() {
        let o = ord(2, 2);
        let om = segment_domain(o.clone(), 1, 16).unwrap();
        let spec = GridSpec::new(2, 8).unwrap();
        let u = GridFunction::from_fn(spec, false, |_| 1.0);
        let r = oscillation_check(&om, &u).unwrap();
        assert_eq!(r.oscillation, 0.0);
        assert!(r.holds);
        // pyramid of half-width 2h = 1/4 in the cell block [0,1/2]^2: osc = 1/4, ‖∇u‖ = 2·(1/2)
        let hat = pyramid(spec, &[2, 2], 2).unwrap();
        let r = oscillation_check(&om, &hat).unwrap();
        assert!((r.oscillation - 0.25).abs() < 1e-15);
        assert!((r.gradient_norm - 1.0).abs() < 1e-12);
        assert!(r.holds);
        let coarse = GridFunction::zeros(GridSpec::new(2, 2).unwrap());
        assert!(oscillation_check(&om, &coarse).is_err());
    }
}
