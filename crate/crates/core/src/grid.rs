//! Continuous piecewise-linear functions on uniform grids over `Q = (0,1)^d`.
//!
//! Each cell is split into `d!` simplices by the reflected Kuhn rule: in a
//! cell with lower corner index `a`, local coordinates along axes with odd
//! `a_i` are mirrored, and the simplices are the sets where the mirrored
//! coordinates follow a fixed order. The interpolant of the nodal values is
//! affine on every simplex, so `|∇u|` is exactly piecewise constant and all
//! norms below are exact. The triangulation is symmetric under reflection
//! through even nodes, which makes the pyramids `(r - |x - c|_∞)_+` centred
//! at even nodes exact grid functions with `|∇u| = χ`.

use serde_json::{json, Value};

use crate::error::{Result, SnumError};
use crate::lorentz::{lorentz_norm, LorentzParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    pub dim: usize,
    pub cells_per_side: usize,
}

impl GridSpec {
    pub fn new(dim: usize, cells_per_side: usize) -> Result<Self> {
        if dim == 0 || cells_per_side == 0 {
            return Err(SnumError::Domain("grid needs dim >= 1 and cells_per_side >= 1".into()));
        }
        let nodes = (cells_per_side + 1)
            .checked_pow(dim as u32)
            .filter(|&n| n <= 1 << 26)
            .ok_or_else(|| SnumError::Capacity("grid too large".into()))?;
        let _ = nodes;
        Ok(Self { dim, cells_per_side })
    }

    pub fn node_count(&self) -> usize {
        (self.cells_per_side + 1).pow(self.dim as u32)
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_side.pow(self.dim as u32)
    }

    pub fn h(&self) -> f64 {
        1.0 / self.cells_per_side as f64
    }

    pub fn node_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * (self.cells_per_side + 1) + i)
    }

    pub fn node_coords(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for a in (0..self.dim).rev() {
            out[a] = flat % (self.cells_per_side + 1);
            flat /= self.cells_per_side + 1;
        }
        out
    }

    pub fn cell_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.cells_per_side + i)
    }

    pub fn cell_coords(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for a in (0..self.dim).rev() {
            out[a] = flat % self.cells_per_side;
            flat /= self.cells_per_side;
        }
        out
    }

    pub fn is_boundary_node(&self, idx: &[usize]) -> bool {
        idx.iter().any(|&i| i == 0 || i == self.cells_per_side)
    }
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; d], &mut out);
    out
}

fn factorial(d: usize) -> f64 {
    (1..=d).map(|i| i as f64).product()
}

/// Nodal values on a uniform grid, row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    nodal_values: Vec<f64>,
    boundary_zero: bool,
}

impl GridFunction {
    pub fn new(spec: GridSpec, nodal_values: Vec<f64>, boundary_zero: bool) -> Result<Self> {
        if nodal_values.len() != spec.node_count() {
            return Err(SnumError::DimensionMismatch(format!(
                "expected {} nodal values, got {}",
                spec.node_count(),
                nodal_values.len()
            )));
        }
        let u = Self { spec, nodal_values, boundary_zero };
        if boundary_zero {
            for i in 0..spec.node_count() {
                if spec.is_boundary_node(&spec.node_coords(i)) && u.nodal_values[i] != 0.0 {
                    return Err(SnumError::Domain(format!(
                        "boundary_zero grid function has nonzero value at node {:?}",
                        spec.node_coords(i)
                    )));
                }
            }
        }
        Ok(u)
    }

    /// Samples `f` at the nodes; with `boundary_zero` the boundary nodes are forced to 0.
    pub fn from_fn(spec: GridSpec, boundary_zero: bool, f: impl Fn(&[f64]) -> f64) -> Self {
        let h = spec.h();
        let vals = (0..spec.node_count())
            .map(|i| {
                let idx = spec.node_coords(i);
                if boundary_zero && spec.is_boundary_node(&idx) {
                    0.0
                } else {
                    let x: Vec<f64> = idx.iter().map(|&k| k as f64 * h).collect();
                    f(&x)
                }
            })
            .collect();
        Self { spec, nodal_values: vals, boundary_zero }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, nodal_values: vec![0.0; spec.node_count()], boundary_zero: true }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn cells_per_side(&self) -> usize {
        self.spec.cells_per_side
    }

    pub fn boundary_zero(&self) -> bool {
        self.boundary_zero
    }

    pub fn nodal_values(&self) -> &[f64] {
        &self.nodal_values
    }

    pub fn value_at_node(&self, idx: &[usize]) -> f64 {
        self.nodal_values[self.spec.node_index(idx)]
    }

    /// `a·self + b·other` on the same grid.
    pub fn axpby(&self, a: f64, other: &GridFunction, b: f64) -> Result<GridFunction> {
        if self.spec != other.spec {
            return Err(SnumError::DimensionMismatch("grids differ".into()));
        }
        Ok(GridFunction {
            spec: self.spec,
            nodal_values: self
                .nodal_values
                .iter()
                .zip(&other.nodal_values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            boundary_zero: self.boundary_zero && other.boundary_zero,
        })
    }

    pub fn linear_combination(spec: GridSpec, coeffs: &[f64], basis: &[GridFunction]) -> Result<GridFunction> {
        let mut vals = vec![0.0; spec.node_count()];
        let mut bz = true;
        for (c, b) in coeffs.iter().zip(basis) {
            if b.spec != spec {
                return Err(SnumError::DimensionMismatch("basis grid differs".into()));
            }
            bz &= b.boundary_zero;
            for (v, x) in vals.iter_mut().zip(&b.nodal_values) {
                *v += c * x;
            }
        }
        Ok(GridFunction { spec, nodal_values: vals, boundary_zero: bz })
    }

    /// `|∇u|` on every simplex of one cell: `d!` values, each on volume `h^d/d!`.
    pub fn cell_gradient_norms(&self, cell: &[usize]) -> Vec<f64> {
        let d = self.spec.dim;
        let h = self.spec.h();
        let base: Vec<usize> = cell.iter().map(|&a| a + (a & 1)).collect();
        let mut out = Vec::with_capacity(factorial(d) as usize);
        for perm in permutations(d) {
            let mut node = base.clone();
            let mut prev = self.value_at_node(&node);
            let mut sq = 0.0;
            for &axis in &perm {
                if cell[axis] & 1 == 1 {
                    node[axis] -= 1;
                } else {
                    node[axis] += 1;
                }
                let cur = self.value_at_node(&node);
                let g = (cur - prev) / h;
                sq += g * g;
                prev = cur;
            }
            out.push(sq.sqrt());
        }
        out
    }

    /// `(|∇u|, volume)` pairs over the cells accepted by `keep`.
    pub fn gradient_data_where(&self, keep: impl Fn(&[usize]) -> bool) -> Vec<(f64, f64)> {
        let d = self.spec.dim;
        let vol = self.spec.h().powi(d as i32) / factorial(d);
        let mut out = Vec::new();
        for c in 0..self.spec.cell_count() {
            let cell = self.spec.cell_coords(c);
            if keep(&cell) {
                out.extend(self.cell_gradient_norms(&cell).into_iter().map(|g| (g, vol)));
            }
        }
        out
    }

    pub fn gradient_data(&self) -> Vec<(f64, f64)> {
        self.gradient_data_where(|_| true)
    }

    /// Exact sup norm: a piecewise-linear interpolant attains its max at a node.
    pub fn sup_norm(&self) -> f64 {
        self.nodal_values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sup - inf` of `u` over the closure of the cells accepted by `keep`.
    pub fn oscillation_where(&self, keep: impl Fn(&[usize]) -> bool) -> f64 {
        let d = self.spec.dim;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for c in 0..self.spec.cell_count() {
            let cell = self.spec.cell_coords(c);
            if !keep(&cell) {
                continue;
            }
            for corner in 0..(1usize << d) {
                let node: Vec<usize> = (0..d).map(|a| cell[a] + ((corner >> a) & 1)).collect();
                let v = self.value_at_node(&node);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if hi < lo {
            0.0
        } else {
            hi - lo
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "grid",
            "dim": self.spec.dim,
            "cells_per_side": self.spec.cells_per_side,
            "boundary_zero": self.boundary_zero,
            "nodal_values": self.nodal_values,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let get_usize = |k: &str| {
            v.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| SnumError::Serialization(format!("missing `{k}`")))
        };
        let spec = GridSpec::new(get_usize("dim")?, get_usize("cells_per_side")?)?;
        let bz = v.get("boundary_zero").and_then(Value::as_bool).unwrap_or(false);
        let vals: Vec<f64> = v
            .get("nodal_values")
            .and_then(Value::as_array)
            .ok_or_else(|| SnumError::Serialization("missing `nodal_values`".into()))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| SnumError::Serialization("bad nodal value".into())))
            .collect::<Result<_>>()?;
        Self::new(spec, vals, bz)
    }
}

/// `‖∇u‖_X` for `X = L^{p,q}(Q)`; `declared` must match the grid of `u`.
pub fn grid_gradient_lorentz_norm(u: &GridFunction, declared: GridSpec, params: LorentzParams) -> Result<f64> {
    if u.spec != declared {
        return Err(SnumError::DimensionMismatch(format!(
            "function lives on {:?}, declared grid is {:?}",
            u.spec, declared
        )));
    }
    Ok(lorentz_norm(&u.gradient_data(), params))
}

/// Pyramid `(half - |x - c|_∞)_+` around the node `center`, with half-width
/// `half` grid cells. Exact on the reflected Kuhn grid when `center` has even
/// coordinates and the support stays inside the closed cube.
pub fn pyramid(spec: GridSpec, center: &[usize], half: usize) -> Result<GridFunction> {
    if center.len() != spec.dim {
        return Err(SnumError::DimensionMismatch("center has wrong dimension".into()));
    }
    if center.iter().any(|&c| c % 2 == 1) {
        return Err(SnumError::Construction("pyramid centre must be an even node".into()));
    }
    if center.iter().any(|&c| c < half || c + half > spec.cells_per_side) {
        return Err(SnumError::Construction("pyramid support leaves the cube".into()));
    }
    let h = spec.h();
    let vals = (0..spec.node_count())
        .map(|i| {
            let idx = spec.node_coords(i);
            let dist = idx
                .iter()
                .zip(center)
                .map(|(&a, &c)| a.abs_diff(c))
                .max()
                .unwrap_or(0);
            half.saturating_sub(dist) as f64 * h
        })
        .collect();
    GridFunction::new(spec, vals, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_has_unit_gradient() {
        let spec = GridSpec::new(2, 8).unwrap();
        let u = GridFunction::from_fn(spec, false, |x| x[0]);
        for (g, _) in u.gradient_data() {
            assert!((g - 1.0).abs() < 1e-12);
        }
        let n = grid_gradient_lorentz_norm(&u, spec, LorentzParams::new(2.0, 2.0).unwrap()).unwrap();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_has_zero_gradient() {
        let spec = GridSpec::new(3, 4).unwrap();
        let u = GridFunction::from_fn(spec, false, |_| 3.5);
        let n = grid_gradient_lorentz_norm(&u, spec, LorentzParams::critical(3)).unwrap();
        assert_eq!(n, 0.0);
    }

    #[test]
    fn pyramid_gradient_is_indicator() {
        for d in 2..=3 {
            let spec = GridSpec::new(d, 8).unwrap();
            let c = vec![4; d];
            let u = pyramid(spec, &c, 2).unwrap();
            let mut support = 0.0;
            for (g, v) in u.gradient_data() {
                assert!(g.abs() < 1e-12 || (g - 1.0).abs() < 1e-12, "gradient {g}");
                if g > 0.5 {
                    support += v;
                }
            }
            // support is the cube of side 4h = 1/2
            assert!((support - 0.5f64.powi(d as i32)).abs() < 1e-12);
            let n = grid_gradient_lorentz_norm(&u, spec, LorentzParams::critical(d)).unwrap();
            assert!((n - d as f64 * 0.5).abs() < 1e-12);
            assert!((u.sup_norm() - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn pyramid_rejects_odd_centre() {
        let spec = GridSpec::new(2, 8).unwrap();
        assert!(pyramid(spec, &[3, 4], 2).is_err());
        assert!(pyramid(spec, &[2, 4], 4).is_err());
    }

    #[test]
    fn boundary_zero_enforced() {
        let spec = GridSpec::new(2, 2).unwrap();
        let mut vals = vec![0.0; 9];
        vals[4] = 1.0;
        assert!(GridFunction::new(spec, vals.clone(), true).is_ok());
        vals[0] = 1.0;
        assert!(GridFunction::new(spec, vals, true).is_err());
    }

    #[test]
    fn sup_norm_of_nodal_values() {
        let spec = GridSpec::new(1, 3).unwrap();
        let u = GridFunction::new(spec, vec![0.0, 1.0, -2.0, 0.0], true).unwrap();
        assert_eq!(u.sup_norm(), 2.0);
        assert_eq!(GridFunction::zeros(spec).sup_norm(), 0.0);
    }

    #[test]
    fn declared_grid_mismatch() {
        let spec = GridSpec::new(2, 4).unwrap();
        let u = GridFunction::zeros(spec);
        let other = GridSpec::new(2, 8).unwrap();
        assert!(grid_gradient_lorentz_norm(&u, other, LorentzParams::critical(2)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let spec = GridSpec::new(2, 3).unwrap();
        let u = GridFunction::from_fn(spec, true, |x| x[0] * x[1]);
        assert_eq!(GridFunction::from_json(&u.to_json()).unwrap(), u);
    }
}
