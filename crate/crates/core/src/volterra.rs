//! The Volterra operator `Vf(t) = ∫₀ᵗ f` acting on step functions.
//!
//! `Vf` of a step function is continuous and piecewise linear with nodes at
//! the breakpoints of `f`, so sup norms and oscillations are read off the node
//! values exactly.

use serde::Serialize;

use crate::error::{Result, SnumError};
use crate::scalar::{q, Exact, Scalar};
use crate::step::{MeanZeroTag, StepFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct VolterraCurve<S: Scalar> {
    breakpoints: Vec<S>,
    node_values: Vec<S>,
    slopes: Vec<S>,
}

impl<S: Scalar> VolterraCurve<S> {
    pub fn breakpoints(&self) -> &[S] {
        &self.breakpoints
    }

    pub fn node_values(&self) -> &[S] {
        &self.node_values
    }

    /// `Vf(t)` by linear interpolation between nodes.
    pub fn eval(&self, t: &S) -> S {
        let bps = &self.breakpoints;
        if *t <= bps[0] {
            return self.node_values[0].clone();
        }
        let last = bps.len() - 1;
        if *t >= bps[last] {
            return self.node_values[last].clone();
        }
        let i = match bps.binary_search_by(|b| b.partial_cmp(t).unwrap()) {
            Ok(i) => return self.node_values[i].clone(),
            Err(i) => i - 1,
        };
        self.node_values[i].clone() + self.slopes[i].clone() * (t.clone() - bps[i].clone())
    }

    pub fn sup_norm(&self) -> S {
        self.node_values
            .iter()
            .fold(S::zero(), |m, v| if v.abs() > m { v.abs() } else { m })
    }

    pub fn max(&self) -> S {
        self.node_values.iter().skip(1).fold(self.node_values[0].clone(), |m, v| {
            if *v > m {
                v.clone()
            } else {
                m
            }
        })
    }

    pub fn min(&self) -> S {
        self.node_values.iter().skip(1).fold(self.node_values[0].clone(), |m, v| {
            if *v < m {
                v.clone()
            } else {
                m
            }
        })
    }

    pub fn oscillation(&self) -> S {
        self.max() - self.min()
    }

    /// Midrange `(max + min)/2`, the best constant approximant in sup norm.
    pub fn midrange(&self) -> S {
        (self.max() + self.min()) / S::from_ratio(2, 1)
    }

    /// `inf_c ‖Vf - c‖_∞ = (max - min)/2`.
    pub fn distance_to_constants(&self) -> S {
        self.oscillation() / S::from_ratio(2, 1)
    }

    /// The derivative of the curve, which recovers `f`.
    pub fn slope_function(&self) -> StepFunction<S> {
        StepFunction::new(self.breakpoints.clone(), self.slopes.clone())
            .expect("breakpoints inherited from a valid step function")
    }

    pub fn to_f64(&self) -> VolterraCurve<f64> {
        VolterraCurve {
            breakpoints: self.breakpoints.iter().map(Scalar::to_f64_lossy).collect(),
            node_values: self.node_values.iter().map(Scalar::to_f64_lossy).collect(),
            slopes: self.slopes.iter().map(Scalar::to_f64_lossy).collect(),
        }
    }
}

pub fn volterra_apply<S: Scalar>(f: &StepFunction<S>) -> VolterraCurve<S> {
    let mut nodes = Vec::with_capacity(f.piece_count() + 1);
    let mut acc = S::zero();
    nodes.push(acc.clone());
    for (a, b, v) in f.pieces() {
        acc = acc + v.clone() * (b.clone() - a.clone());
        nodes.push(acc.clone());
    }
    VolterraCurve {
        breakpoints: f.breakpoints().to_vec(),
        node_values: nodes,
        slopes: f.values().to_vec(),
    }
}

/// `f - ∫f`, an element of `L¹₀`.
pub fn mean_zero_project<S: Scalar>(f: &StepFunction<S>) -> StepFunction<S> {
    let m = f.integral();
    StepFunction::new(
        f.breakpoints().to_vec(),
        f.values().iter().map(|v| v.clone() - m.clone()).collect(),
    )
    .expect("same breakpoints")
}

/// `(N/2)(χ_{cell a} - χ_{cell b})` on the uniform `N`-grid: unit `L¹` norm, mean zero.
pub fn dipole(n_cells: usize, a: usize, b: usize) -> Result<StepFunction<Exact>> {
    if a >= n_cells || b >= n_cells || a == b {
        return Err(SnumError::Domain(format!("dipole cells ({a}, {b}) invalid for N = {n_cells}")));
    }
    let mut v = vec![q(0, 1); n_cells];
    v[a] = q(n_cells as i64, 2);
    v[b] = q(-(n_cells as i64), 2);
    StepFunction::uniform(v)
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorNormResult {
    pub cells: usize,
    /// `"1/2"` style exact value.
    pub value_exact: String,
    pub value: f64,
    pub vertices_checked: usize,
    pub witness: serde_json::Value,
}

/// `sup { ‖Vf‖_∞ : f mean-zero step on the uniform N-grid, ‖f‖₁ = 1 }`.
///
/// `‖Vf‖_∞` is convex in `f`, so the sup over the polytope
/// `{Σ f_i = 0, Σ |f_i|/N ≤ 1}` is attained at a vertex; the vertices are the
/// dipoles `(N/2)(e_a - e_b)`. They are enumerated with integer arithmetic
/// (`2·Vf` at a node is a partial sum of `±1`), and the maximizer is replayed
/// in exact rationals as the witness.
pub fn operator_norm_discrete(n_cells: usize) -> Result<OperatorNormResult> {
    if n_cells < 2 {
        return Err(SnumError::Precondition("mean-zero functions need at least two cells".into()));
    }
    let mut best = (0i64, 0usize, 1usize);
    let mut checked = 0;
    for a in 0..n_cells {
        for b in 0..n_cells {
            if a == b {
                continue;
            }
            checked += 1;
            let mut partial = 0i64;
            let mut peak = 0i64;
            for i in 0..n_cells {
                partial += (i == a) as i64 - (i == b) as i64;
                peak = peak.max(partial.abs());
            }
            if peak > best.0 {
                best = (peak, a, b);
            }
        }
    }
    let witness = dipole(n_cells, best.1, best.2)?;
    let vf = volterra_apply(&witness);
    let value = vf.sup_norm();
    if value.clone() * q(2, 1) != q(best.0, 1) {
        return Err(SnumError::CertificateInvalid("exact replay disagrees with vertex scan".into()));
    }
    Ok(OperatorNormResult {
        cells: n_cells,
        value_exact: value.to_json_string(),
        value: value.to_f64_lossy(),
        vertices_checked: checked,
        witness: witness.to_json(),
    })
}

/// Same supremum over nonnegative `f` without the mean-zero constraint;
/// the vertices are `N·e_a` and `Vf(1) = 1`.
pub fn operator_norm_positive_cone(n_cells: usize) -> Result<Exact> {
    if n_cells < 1 {
        return Err(SnumError::Precondition("need at least one cell".into()));
    }
    let mut best = q(0, 1);
    for a in 0..n_cells {
        let mut v = vec![q(0, 1); n_cells];
        v[a] = q(n_cells as i64, 1);
        let s = volterra_apply(&StepFunction::uniform(v)?).sup_norm();
        if s > best {
            best = s;
        }
    }
    Ok(best)
}

/// `|Vf(u) - Vf(v)| ≤ ‖f‖₁/2` for mean-zero `f`; returns the oscillation and the bound.
pub fn oscillation_bound<S: Scalar>(f: &StepFunction<S>, tag: MeanZeroTag) -> Result<(S, S)> {
    tag.check(f)?;
    let osc = volterra_apply(f).oscillation();
    Ok((osc, f.l1_norm() / S::from_ratio(2, 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::pow2;

    #[test]
    fn tent_from_dipole() {
        let f = StepFunction::uniform_ratios(&[2, -2], 1).unwrap();
        let vf = volterra_apply(&f);
        assert_eq!(vf.sup_norm(), q(1, 1));
        assert_eq!(vf.eval(&q(1, 2)), q(1, 1));
        assert_eq!(vf.eval(&q(1, 4)), q(1, 2));
        assert_eq!(vf.node_values().last().unwrap(), &q(0, 1));
    }

    #[test]
    fn zero_maps_to_zero() {
        let vf = volterra_apply(&StepFunction::<Exact>::zero());
        assert_eq!(vf.sup_norm(), q(0, 1));
    }

    #[test]
    fn f3_family_values() {
        let k = 3;
        let f = StepFunction::new(
            vec![q(0, 1), pow2(-k - 1), pow2(-k), q(1, 1) - pow2(-k), q(1, 1) - pow2(-k - 1), q(1, 1)],
            vec![q(0, 1), pow2(k), q(0, 1), -pow2(k), q(0, 1)],
        )
        .unwrap();
        let vf = volterra_apply(&f);
        assert_eq!(vf.eval(&q(0, 1)), q(0, 1));
        assert_eq!(vf.eval(&pow2(-k)), q(1, 2));
    }

    #[test]
    fn slopes_recover_f() {
        let f = StepFunction::uniform_ratios(&[3, -1, 0, -2], 5).unwrap();
        assert_eq!(volterra_apply(&f).slope_function(), f);
    }

    #[test]
    fn operator_norm_small_grids() {
        for n in [2, 3, 16] {
            let r = operator_norm_discrete(n).unwrap();
            assert_eq!(r.value_exact, "1/2");
        }
        assert!(operator_norm_discrete(1).is_err());
        assert_eq!(operator_norm_positive_cone(7).unwrap(), q(1, 1));
    }

    #[test]
    fn dipole_witness_normalized() {
        let f = dipole(2, 0, 1).unwrap();
        assert_eq!(f.l1_norm(), q(1, 1));
        assert_eq!(f.integral(), q(0, 1));
        assert_eq!(volterra_apply(&f).sup_norm(), q(1, 2));
    }

    #[test]
    fn mean_zero_projection() {
        let one = StepFunction::<Exact>::constant(q(1, 1));
        assert_eq!(mean_zero_project(&one).canonicalize(), StepFunction::constant(q(0, 1)));
        let half = StepFunction::indicator(q(0, 1), q(1, 2), q(1, 1)).unwrap();
        let p = mean_zero_project(&half);
        assert_eq!(p.values(), &[q(1, 2), q(-1, 2)]);
        assert!(MeanZeroTag::EXACT.admits(&p));
    }

    #[test]
    fn distance_to_constants_of_tent() {
        let f = dipole(1024, 0, 1).unwrap();
        let d = volterra_apply(&f).distance_to_constants();
        assert!(d <= q(1, 4));
        assert!(d >= q(1, 4) - q(1, 1024));
    }
}
