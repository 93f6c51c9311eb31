//! Small linear programs on top of `minilp`.

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};

use crate::error::{Result, SnumError};

fn lp_error(e: minilp::Error) -> SnumError {
    SnumError::Construction(format!("linear program failed: {e}"))
}

/// Discrete Chebyshev distance `min_c max_t |target(t) - Σ c_i basis_i(t)|`,
/// with the minimizing coefficients.
pub fn chebyshev_distance(target: &[f64], basis: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    if basis.iter().any(|b| b.len() != target.len()) {
        return Err(SnumError::DimensionMismatch("basis and target sampled at different points".into()));
    }
    if basis.is_empty() {
        let sup = target.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        return Ok((sup, Vec::new()));
    }
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let coeffs: Vec<_> = basis.iter().map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let s = lp.add_var(1.0, (0.0, f64::INFINITY));
    for (t, &y) in target.iter().enumerate() {
        for sign in [1.0, -1.0] {
            // sign·(Σ c_i b_i(t) - y) ≤ s
            let mut e = LinearExpr::empty();
            for (c, b) in coeffs.iter().zip(basis) {
                e.add(*c, sign * b[t]);
            }
            e.add(s, -1.0);
            lp.add_constraint(e, ComparisonOp::Le, sign * y);
        }
    }
    let sol = lp.solve().map_err(lp_error)?;
    Ok((sol.objective(), coeffs.iter().map(|c| *sol.var_value(*c)).collect()))
}

/// Maximizes `objective · c` subject to `|row · c| ≤ 1` for every row.
pub fn maximize_in_slab_polytope(rows: &[Vec<f64>], objective: &[f64]) -> Result<Vec<f64>> {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = objective
        .iter()
        .map(|&o| lp.add_var(o, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for row in rows {
        let mut e = LinearExpr::empty();
        for (v, &a) in vars.iter().zip(row) {
            e.add(*v, a);
        }
        lp.add_constraint(e.clone(), ComparisonOp::Le, 1.0);
        lp.add_constraint(e, ComparisonOp::Ge, -1.0);
    }
    let sol = lp.solve().map_err(lp_error)?;
    Ok(vars.iter().map(|v| *sol.var_value(*v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_to_constants_is_half_range() {
        let target = [0.0, 0.5, 0.5, 0.0, 0.25];
        let (d, c) = chebyshev_distance(&target, &[vec![1.0; 5]]).unwrap();
        assert!((d - 0.25).abs() < 1e-12);
        assert!((c[0] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn exact_fit_has_zero_distance() {
        let xs: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let target: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let (d, _) = chebyshev_distance(&target, &[vec![1.0; 6], xs]).unwrap();
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn slab_maximum_at_vertex() {
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let c = maximize_in_slab_polytope(&rows, &[1.0, -2.0]).unwrap();
        assert_eq!(c, vec![1.0, -1.0]);
    }
}
