//! Alternating elements of finite-dimensional subspaces of `ℓ∞_N`.
//!
//! Given `n` vectors `e_1, …, e_n ∈ ℝ^N` and indices `t_1 < … < t_n`, the
//! interpolation conditions `g(t_j) = (-1)^j` determine `g ∈ span{e_i}`
//! uniquely whenever the `n × n` matrix `[e_i(t_j)]` is invertible, so the
//! minimax problem over each index set reduces to one LU solve followed by a
//! sup-norm evaluation. Singular index sets are skipped.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SnumError};

/// Index sets are enumerated exhaustively up to this many.
pub const EXHAUSTIVE_LIMIT: u128 = 100_000;

const INTERPOLATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct ZigzagWitness {
    /// Coefficients of `g` in the supplied vectors.
    pub coefficients: Vec<f64>,
    /// `g` at all `N` points.
    pub values: Vec<f64>,
    /// 0-based alternation indices, strictly increasing.
    pub indices: Vec<usize>,
    pub sup_norm_value: f64,
    /// `sup_norm_value ≤ 1 + ε`.
    pub within_tolerance: bool,
    pub exhaustive: bool,
    pub index_sets_evaluated: usize,
}

#[derive(Debug, Clone)]
pub struct ZigzagSearch {
    pub epsilon: f64,
    pub seed: u64,
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Enumerate every index set when there are at most this many.
    pub exhaustive_limit: u128,
}

impl Default for ZigzagSearch {
    fn default() -> Self {
        Self { epsilon: 0.05, seed: 0, restarts: 500, max_sweeps: 50, exhaustive_limit: EXHAUSTIVE_LIMIT }
    }
}

struct Problem<'a> {
    vectors: &'a [Vec<f64>],
    n: usize,
    len: usize,
}

impl Problem<'_> {
    /// `(coefficients, values, sup)` for one index set, `None` if singular.
    fn solve(&self, idx: &[usize]) -> Option<(Vec<f64>, Vec<f64>, f64)> {
        let n = self.n;
        let m = DMatrix::from_fn(n, n, |j, i| self.vectors[i][idx[j]]);
        let rhs = DVector::from_fn(n, |j, _| if j % 2 == 0 { -1.0 } else { 1.0 });
        let c = m.lu().solve(&rhs)?;
        let values: Vec<f64> = (0..self.len)
            .map(|t| (0..n).map(|i| c[i] * self.vectors[i][t]).sum())
            .collect();
        for (j, &t) in idx.iter().enumerate() {
            if (values[t] - rhs[j]).abs() > INTERPOLATION_TOL || !values[t].is_finite() {
                return None;
            }
        }
        let sup = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        Some((c.iter().copied().collect(), values, sup))
    }

    fn sup(&self, idx: &[usize]) -> f64 {
        self.solve(idx).map_or(f64::INFINITY, |s| s.2)
    }
}

fn binomial(n: usize, k: usize, cap: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap.saturating_mul(1000) {
            return acc;
        }
    }
    acc
}

fn next_combination(idx: &mut [usize], len: usize) -> bool {
    let n = idx.len();
    for p in (0..n).rev() {
        if idx[p] < len - n + p {
            idx[p] += 1;
            for q in p + 1..n {
                idx[q] = idx[q - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Finds `g ∈ span(vectors)` and `t_1 < … < t_n` with `g(t_j) = (-1)^j` and
/// small `‖g‖_∞`.
///
/// The returned witness always satisfies the interpolation conditions;
/// `within_tolerance` records whether `‖g‖_∞ ≤ 1 + ε` was reached.
pub fn zigzag_find(vectors: &[Vec<f64>], search: &ZigzagSearch) -> Result<ZigzagWitness> {
    let n = vectors.len();
    if n == 0 {
        return Err(SnumError::Precondition("zigzag needs a nonzero subspace".into()));
    }
    let len = vectors[0].len();
    if vectors.iter().any(|v| v.len() != len) {
        return Err(SnumError::DimensionMismatch("vectors of different lengths".into()));
    }
    if n > len {
        return Err(SnumError::Precondition(format!("dimension {n} exceeds the {len} sample points")));
    }
    let problem = Problem { vectors, n, len };
    let (best_idx, evaluated, exhaustive) = if binomial(len, n, search.exhaustive_limit) <= search.exhaustive_limit {
        let (idx, count) = exhaustive_search(&problem);
        (idx, count, true)
    } else {
        let (idx, count) = exchange_search(&problem, search);
        (idx, count, false)
    };
    let idx = best_idx.ok_or_else(|| SnumError::DegenerateBasis("every index set is singular".into()))?;
    let (coefficients, values, sup) = problem.solve(&idx).expect("best index set is regular");
    Ok(ZigzagWitness {
        coefficients,
        values,
        indices: idx,
        sup_norm_value: sup,
        within_tolerance: sup <= 1.0 + search.epsilon,
        exhaustive,
        index_sets_evaluated: evaluated,
    })
}

fn exhaustive_search(problem: &Problem<'_>) -> (Option<Vec<usize>>, usize) {
    let mut sets = Vec::new();
    let mut idx: Vec<usize> = (0..problem.n).collect();
    loop {
        sets.push(idx.clone());
        if !next_combination(&mut idx, problem.len) {
            break;
        }
    }
    let sups: Vec<f64> = sets.par_iter().map(|s| problem.sup(s)).collect();
    // first minimum in lexicographic order
    let mut best: Option<usize> = None;
    for (i, &s) in sups.iter().enumerate() {
        if s.is_finite() && best.is_none_or(|b| s < sups[b]) {
            best = Some(i);
        }
    }
    (best.map(|b| sets[b].clone()), sets.len())
}

/// Coordinate exchange: repeatedly move one index to the position between
/// its neighbours that lowers the minimax value most, then try swapping the
/// peak of `|g|` into the set; from evenly spaced and random starts.
fn exchange_search(problem: &Problem<'_>, search: &ZigzagSearch) -> (Option<Vec<usize>>, usize) {
    let (n, len) = (problem.n, problem.len);
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut evaluated = 0usize;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for restart in 0..=search.restarts {
        let mut idx: Vec<usize> = if restart == 0 {
            (0..n).map(|j| ((2 * j + 1) * len) / (2 * n)).collect()
        } else {
            let mut pool: Vec<usize> = (0..len).collect();
            for i in 0..n {
                let r = rng.gen_range(i..len);
                pool.swap(i, r);
            }
            let mut s = pool[..n].to_vec();
            s.sort_unstable();
            s
        };
        let mut cur = problem.sup(&idx);
        evaluated += 1;
        for _ in 0..search.max_sweeps {
            let mut improved = false;
            for p in 0..n {
                let lo = if p == 0 { 0 } else { idx[p - 1] + 1 };
                let hi = if p + 1 == n { len } else { idx[p + 1] };
                let candidates: Vec<(f64, usize)> = (lo..hi)
                    .into_par_iter()
                    .map(|t| {
                        let mut trial = idx.clone();
                        trial[p] = t;
                        (problem.sup(&trial), t)
                    })
                    .collect();
                evaluated += candidates.len();
                if let Some(&(s, t)) = candidates
                    .iter()
                    .filter(|c| c.0.is_finite())
                    .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)))
                {
                    if s < cur {
                        cur = s;
                        idx[p] = t;
                        improved = true;
                    }
                }
            }
            // Remez-type exchange: bring the point of largest |g| into the set
            if let Some((_, values, _)) = problem.solve(&idx) {
                let peak = (0..len).fold(0, |b, t| if values[t].abs() > values[b].abs() { t } else { b });
                if !idx.contains(&peak) {
                    let mut trials: Vec<Vec<usize>> = (0..n)
                        .map(|p| {
                            let mut trial = idx.clone();
                            trial[p] = peak;
                            trial.sort_unstable();
                            trial
                        })
                        .collect();
                    trials.dedup();
                    let scored: Vec<(f64, Vec<usize>)> =
                        trials.into_par_iter().map(|t| (problem.sup(&t), t)).collect();
                    evaluated += scored.len();
                    if let Some((s, t)) = scored
                        .into_iter()
                        .filter(|c| c.0.is_finite())
                        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)))
                    {
                        if s < cur {
                            cur = s;
                            idx = t;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }
        if cur.is_finite() && best.as_ref().is_none_or(|b| (cur, &idx) < (b.0, &b.1)) {
            best = Some((cur, idx));
        }
        if best.as_ref().is_some_and(|b| b.0 <= 1.0 + search.epsilon) {
            break;
        }
    }
    (best.map(|b| b.1), evaluated)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chebyshev_like(n: usize, len: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                (0..len)
                    .map(|t| {
                        let x = -1.0 + 2.0 * t as f64 / (len - 1) as f64;
                        (i as f64 * x.acos()).cos()
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn one_dimensional() {
        let e = vec![vec![0.5, -2.0, 1.0, 0.0]];
        let w = zigzag_find(&e, &ZigzagSearch::default()).unwrap();
        assert_eq!(w.indices, vec![1]);
        assert_eq!(w.values, [-0.25, 1.0, -0.5, 0.0].iter().map(|v| -v).collect::<Vec<_>>());
        assert_eq!(w.sup_norm_value, 1.0);
    }

    #[test]
    fn two_chebyshev_vectors_on_16_nodes() {
        let e = chebyshev_like(2, 16);
        let w = zigzag_find(&e, &ZigzagSearch::default()).unwrap();
        assert!(w.exhaustive);
        assert_eq!(w.index_sets_evaluated, 120);
        assert!(w.sup_norm_value <= 1.0 + 1e-6);
        assert!((w.values[w.indices[0]] + 1.0).abs() < 1e-12);
        assert!((w.values[w.indices[1]] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn heuristic_branch_reaches_tolerance() {
        let e = chebyshev_like(5, 200);
        let w = zigzag_find(&e, &ZigzagSearch::default()).unwrap();
        assert!(!w.exhaustive);
        assert!(w.within_tolerance, "sup {}", w.sup_norm_value);
        for (j, &t) in w.indices.iter().enumerate() {
            let want = if j % 2 == 0 { -1.0 } else { 1.0 };
            assert!((w.values[t] - want).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(zigzag_find(&[], &ZigzagSearch::default()).is_err());
        let e = vec![vec![1.0], vec![2.0]];
        assert!(zigzag_find(&e, &ZigzagSearch::default()).is_err());
        let zero = vec![vec![0.0; 5]];
        assert!(matches!(zigzag_find(&zero, &ZigzagSearch::default()), Err(SnumError::DegenerateBasis(_))));
    }
}
