//! Isomorphism, Bernstein and Approximation numbers of `V: L¹₀ → C`.

use nalgebra::{DMatrix, DVector};
use num_traits::{FromPrimitive, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{solve_exact, witness_json, FactorizationWitness, Kind, Operator, SNumberBound, Status, StepSubspace};
use crate::error::{Result, SnumError};
use crate::lp::maximize_in_slab_polytope;
use crate::scalar::{decimal, q, Exact, Mode, Scalar};
use crate::step::StepFunction;
use crate::zigzag::{zigzag_find, ZigzagSearch};

/// `Vf` at the grid nodes `0, 1/N, …, 1` for cell values of `f`.
pub fn volterra_nodes(cell_values: &[Exact]) -> Vec<Exact> {
    let n = cell_values.len() as i64;
    let mut acc = Exact::zero();
    let mut out = vec![acc.clone()];
    for v in cell_values {
        acc += v.clone() / q(n, 1);
        out.push(acc.clone());
    }
    out
}

fn sup_abs(v: &[Exact]) -> Exact {
    v.iter().fold(Exact::zero(), |m, x| if x.abs() > m { x.abs() } else { m })
}

fn l1_cells(v: &[Exact]) -> Exact {
    v.iter().fold(Exact::zero(), |acc, x| acc + x.abs()) / q(v.len() as i64, 1)
}

/// `B(e_k) = 2n(χ_{I_{2k-1}} - χ_{I_{2k}})` on `N` cells, `I_l = [(l-1)/2n, l/2n]`.
pub fn isomorphism_synthesis(n: usize, cells: usize) -> Result<Vec<StepFunction<Exact>>> {
    if n == 0 || !cells.is_multiple_of(2 * n) {
        return Err(SnumError::Precondition(format!(
            "N = {cells} must be a positive multiple of 2n = {}",
            2 * n
        )));
    }
    let width = cells / (2 * n);
    (0..n)
        .map(|k| {
            let mut v = vec![q(0, 1); cells];
            for t in 0..width {
                v[2 * k * width + t] = q(2 * n as i64, 1);
                v[(2 * k + 1) * width + t] = q(-2 * n as i64, 1);
            }
            StepFunction::uniform(v)
        })
        .collect()
}

/// `i_n ≥ 1/(‖A‖‖B‖) = 1/(2n)` from evaluation at `(2k-1)/(2n)` and the dipoles above.
pub fn isomorphism_lower_1d(n: usize, cells: usize) -> Result<(SNumberBound, FactorizationWitness)> {
    let synth = isomorphism_synthesis(n, cells)?;
    let points: Vec<Exact> = (1..=n).map(|k| q(2 * k as i64 - 1, 2 * n as i64)).collect();
    let mut identity = true;
    for (k, b) in synth.iter().enumerate() {
        let vb = crate::volterra::volterra_apply(b);
        for (j, x) in points.iter().enumerate() {
            let want = if j == k { q(1, 1) } else { q(0, 1) };
            identity &= vb.eval(x) == want;
        }
        identity &= b.integral().is_zero();
    }
    if !identity {
        return Err(SnumError::CertificateInvalid("A V B is not the identity".into()));
    }
    // ‖A‖ = 1 (point evaluations); ‖B y‖₁ = 2‖y‖₁ ≤ 2n‖y‖∞ with equality at y = (1,…,1)
    let norm_a = q(1, 1);
    let all_ones = synth.iter().fold(StepFunction::constant(q(0, 1)), |acc, b| acc.add(b));
    let norm_b = all_ones.l1_norm();
    if norm_b != q(2 * n as i64, 1) {
        return Err(SnumError::CertificateInvalid(format!("‖B(1,…,1)‖₁ = {norm_b}, expected 2n")));
    }
    let lower = q(1, 1) / (norm_a.clone() * norm_b.clone());
    let witness = FactorizationWitness {
        points: points.iter().map(|p| vec![p.to_f64_lossy()]).collect(),
        synthesis: synth.iter().map(StepFunction::to_json).collect(),
        norm_a: norm_a.to_f64_lossy(),
        norm_b: norm_b.to_f64_lossy(),
        norm_a_exact: Some(norm_a.to_json_string()),
        norm_b_exact: Some(norm_b.to_json_string()),
        identity_verified: true,
    };
    let bound = SNumberBound::new(
        Kind::Isomorphism,
        n,
        lower.to_f64_lossy(),
        f64::INFINITY,
        Status::Certified,
        Mode::Exact,
        Operator::Volterra,
        "1/(2n)",
        json!({ "cells": cells, "factorization": witness_json(&witness) }),
    )?
    .with_exact(Some(&lower), None);
    Ok((bound, witness))
}

/// The span of the synthesis dipoles as a subspace.
pub fn isomorphism_subspace(n: usize, cells: usize) -> Result<StepSubspace> {
    StepSubspace::new(cells, isomorphism_synthesis(n, cells)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct BernsteinChain {
    pub indices: Vec<usize>,
    pub coefficients: Vec<String>,
    pub zigzag_sup: f64,
    /// `|g(t_1)| + Σ|g(t_{j+1}) - g(t_j)| + |g(t_n)|`, a lower bound for `‖h‖₁`.
    pub telescoping: String,
    pub l1_norm: String,
    pub vh_sup: String,
    /// `‖Vh‖_∞ / ‖h‖₁`, an upper bound for the Bernstein ratio of `E`.
    pub subspace_ratio: String,
    pub epsilon: f64,
    pub exhaustive: bool,
    pub index_sets_evaluated: usize,
}

/// Upper bound `(1+ε)/(2n)` for `b_n`, checked on the subspace `E`: finds
/// `h ∈ E` whose primitive alternates at `n` nodes and verifies
/// `‖Vh‖_∞ ≤ 1 + ε`, `‖h‖₁ ≥ 2n` exactly.
pub fn bernstein_upper_1d(e: &StepSubspace, search: &ZigzagSearch) -> Result<(SNumberBound, BernsteinChain)> {
    if !e.is_mean_zero() {
        return Err(SnumError::Precondition("subspace must consist of mean-zero functions".into()));
    }
    let n = e.dim();
    let nodes: Vec<Vec<Exact>> = e.cell_values().iter().map(|v| volterra_nodes(v)).collect();
    let vectors: Vec<Vec<f64>> = nodes
        .iter()
        .map(|v| v[1..v.len() - 1].iter().map(Scalar::to_f64_lossy).collect())
        .collect();
    let z = zigzag_find(&vectors, search)?;
    let coeffs: Vec<Exact> = z
        .coefficients
        .iter()
        .map(|&c| Exact::from_f64(c).ok_or_else(|| SnumError::Construction("non-finite coefficient".into())))
        .collect::<Result<_>>()?;
    let h = e.combine(&coeffs);
    let vh = volterra_nodes(&h);
    let l1 = l1_cells(&h);
    let sup = sup_abs(&vh);
    // node t_j (0-based among interior nodes) is grid node t_j + 1
    let mut tele = Exact::zero();
    let mut prev = vh[0].clone();
    for &t in &z.indices {
        tele += (vh[t + 1].clone() - prev).abs();
        prev = vh[t + 1].clone();
    }
    tele += (vh[vh.len() - 1].clone() - prev).abs();
    if tele > l1 {
        return Err(SnumError::CertificateInvalid("telescoping sum exceeds ‖h‖₁".into()));
    }
    let ratio = sup.clone() / l1.clone();
    let eps = decimal(search.epsilon).ok_or_else(|| SnumError::Precondition("ε must be finite".into()))?;
    let target = (q(1, 1) + eps) / q(2 * n as i64, 1);
    let ok = z.within_tolerance && sup.clone() / tele.clone() <= target;
    let chain = BernsteinChain {
        indices: z.indices.clone(),
        coefficients: coeffs.iter().map(Scalar::to_json_string).collect(),
        zigzag_sup: z.sup_norm_value,
        telescoping: tele.to_json_string(),
        l1_norm: l1.to_json_string(),
        vh_sup: sup.to_json_string(),
        subspace_ratio: ratio.to_json_string(),
        epsilon: search.epsilon,
        exhaustive: z.exhaustive,
        index_sets_evaluated: z.index_sets_evaluated,
    };
    let (upper, status) = if ok {
        (target.clone(), Status::Certified)
    } else {
        (ratio.clone(), Status::Inconclusive)
    };
    let bound = SNumberBound::new(
        Kind::Bernstein,
        n,
        0.0,
        upper.to_f64_lossy(),
        status,
        Mode::Exact,
        Operator::Volterra,
        "1/(2n)",
        json!({ "cells": e.cells(), "chain": witness_json(&chain) }),
    )?
    .with_exact(None, Some(&upper));
    Ok((bound, chain))
}

#[derive(Debug, Clone, Serialize)]
pub struct SphereMinimum {
    /// `inf_{f ∈ E, ‖f‖₁ = 1} ‖Vf‖_∞`.
    pub value: f64,
    pub value_exact: Option<String>,
    pub exact_enumeration: bool,
    pub vertices_checked: usize,
    pub minimizer_cells: Vec<String>,
}

/// Largest dimension handled by exact vertex enumeration.
pub const EXACT_SPHERE_DIM: usize = 3;

/// `inf ‖Vf‖_∞` over the `L¹` sphere of `E` as `1 / max{‖f‖₁ : ‖Vf‖_∞ ≤ 1}`.
///
/// The maximum of the convex `‖f‖₁` over the polytope `{|Vf(t)| ≤ 1 at the nodes}`
/// sits at a vertex; for `dim E ≤ 3` all vertices are enumerated and the
/// best one is replayed exactly. Larger subspaces use LP sign iteration from
/// random starts, which only gives an upper estimate of the infimum.
pub fn bernstein_lower(e: &StepSubspace, seed: u64) -> Result<(SNumberBound, SphereMinimum)> {
    let n = e.dim();
    let nodes: Vec<Vec<Exact>> = e.cell_values().iter().map(|v| volterra_nodes(v)).collect();
    let interior = e.cells() - 1;
    if interior == 0 {
        return Err(SnumError::DegenerateBasis("a one-cell grid has no interior nodes".into()));
    }
    let rows: Vec<Vec<f64>> = (1..=interior)
        .map(|t| nodes.iter().map(|v| v[t].to_f64_lossy()).collect())
        .collect();
    let cells_f: Vec<Vec<f64>> = e
        .cell_values()
        .iter()
        .map(|v| v.iter().map(Scalar::to_f64_lossy).collect())
        .collect();
    let l1 = |c: &[f64]| -> f64 {
        (0..e.cells())
            .map(|t| c.iter().zip(&cells_f).map(|(a, v)| a * v[t]).sum::<f64>().abs())
            .sum::<f64>()
            / e.cells() as f64
    };
    let feasible = |c: &[f64], tol: f64| rows.iter().all(|r| r.iter().zip(c).map(|(a, b)| a * b).sum::<f64>().abs() <= 1.0 + tol);
    let (result, status) = if n <= EXACT_SPHERE_DIM {
        let mut combos = Vec::new();
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            combos.push(idx.clone());
            let mut p = n;
            let mut advanced = false;
            while p > 0 {
                p -= 1;
                if idx[p] < interior - n + p {
                    idx[p] += 1;
                    for r in p + 1..n {
                        idx[r] = idx[r - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced || n > interior {
                break;
            }
        }
        let sign_patterns: Vec<Vec<f64>> = (0..1usize << (n - 1))
            .map(|m| (0..n).map(|j| if j > 0 && (m >> (j - 1)) & 1 == 1 { -1.0 } else { 1.0 }).collect())
            .collect();
        let candidates: Vec<(f64, Vec<usize>, Vec<f64>)> = combos
            .par_iter()
            .flat_map_iter(|set| {
                let m = DMatrix::from_fn(n, n, |j, i| rows[set[j]][i]);
                let lu = m.lu();
                sign_patterns
                    .iter()
                    .filter_map(|s| {
                        let c = lu.solve(&DVector::from_column_slice(s))?;
                        let c: Vec<f64> = c.iter().copied().collect();
                        feasible(&c, 1e-9).then(|| (l1(&c), set.clone(), s.clone()))
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let checked = combos.len() * sign_patterns.len();
        let best = candidates.iter().map(|c| c.0).fold(0.0f64, f64::max);
        if best <= 0.0 {
            return Err(SnumError::DegenerateBasis("no bounded vertex found".into()));
        }
        // exact replay of every near-optimal vertex
        let mut exact_best: Option<(Exact, Vec<Exact>)> = None;
        for (_, set, signs) in candidates.iter().filter(|c| c.0 >= best * (1.0 - 1e-9)) {
            let m: Vec<Vec<Exact>> = set.iter().map(|&t| nodes.iter().map(|v| v[t + 1].clone()).collect()).collect();
            let rhs: Vec<Exact> = signs.iter().map(|&s| q(s as i64, 1)).collect();
            let Some(c) = solve_exact(m, rhs) else { continue };
            let f = e.combine(&c);
            let vf = volterra_nodes(&f);
            if sup_abs(&vf) > q(1, 1) {
                continue;
            }
            let norm = l1_cells(&f);
            if exact_best.as_ref().is_none_or(|b| norm > b.0) {
                exact_best = Some((norm, f));
            }
        }
        let (norm, f) = exact_best
            .ok_or_else(|| SnumError::CertificateInvalid("no vertex survived exact replay".into()))?;
        let value = q(1, 1) / norm.clone();
        (
            SphereMinimum {
                value: value.to_f64_lossy(),
                value_exact: Some(value.to_json_string()),
                exact_enumeration: true,
                vertices_checked: checked,
                minimizer_cells: f.iter().map(|x| (x.clone() / norm.clone()).to_json_string()).collect(),
            },
            Status::Certified,
        )
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = (0.0f64, vec![0.0; n]);
        let mut solved = 0;
        for _ in 0..32 {
            let mut sigma: Vec<f64> = (0..e.cells()).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
            let mut last = -1.0;
            for _ in 0..50 {
                let obj: Vec<f64> = cells_f.iter().map(|v| v.iter().zip(&sigma).map(|(a, s)| a * s).sum()).collect();
                let c = maximize_in_slab_polytope(&rows, &obj)?;
                solved += 1;
                let val = l1(&c);
                if val > best.0 && feasible(&c, 1e-9) {
                    best = (val, c.clone());
                }
                if val <= last + 1e-12 {
                    break;
                }
                last = val;
                for (t, s) in sigma.iter_mut().enumerate() {
                    let ft: f64 = c.iter().zip(&cells_f).map(|(a, v)| a * v[t]).sum();
                    if ft != 0.0 {
                        *s = ft.signum();
                    }
                }
            }
        }
        if best.0 <= 0.0 {
            return Err(SnumError::DegenerateBasis("sphere search found no feasible point".into()));
        }
        (
            SphereMinimum {
                value: 1.0 / best.0,
                value_exact: None,
                exact_enumeration: false,
                vertices_checked: solved,
                minimizer_cells: Vec::new(),
            },
            Status::Heuristic,
        )
    };
    let bound = SNumberBound::new(
        Kind::Bernstein,
        n,
        result.value,
        f64::INFINITY,
        status,
        if status == Status::Certified { Mode::Exact } else { Mode::Float },
        Operator::Volterra,
        "1/(2n)",
        json!({ "cells": e.cells(), "sphere": witness_json(&result) }),
    )?;
    let bound = SNumberBound { lower_exact: result.value_exact.clone(), ..bound };
    Ok((bound, result))
}

/// `a_n ≤ ‖V‖ = 1/2`, approximating by the zero operator.
pub fn approximation_upper(n: usize) -> Result<SNumberBound> {
    let half = q(1, 2);
    Ok(SNumberBound::new(
        Kind::Approximation,
        n,
        f64::NEG_INFINITY,
        0.5,
        Status::Certified,
        Mode::Exact,
        Operator::Volterra,
        "1/2",
        json!({ "approximant": "zero operator", "operator_norm": "1/2" }),
    )?
    .with_exact(None, Some(&half)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volterra::dipole;

    #[test]
    fn isomorphism_examples() {
        let (b, w) = isomorphism_lower_1d(1, 2).unwrap();
        assert_eq!(b.lower_exact.as_deref(), Some("1/2"));
        assert!(w.identity_verified);
        let (b, w) = isomorphism_lower_1d(3, 24).unwrap();
        assert_eq!(b.lower_exact.as_deref(), Some("1/6"));
        assert_eq!(w.synthesis.len(), 3);
        let (b, _) = isomorphism_lower_1d(10, 40).unwrap();
        assert_eq!(b.lower_exact.as_deref(), Some("1/20"));
        assert!(isomorphism_lower_1d(3, 16).is_err());
    }

    #[test]
    fn sphere_minimum_examples() {
        let e = isomorphism_subspace(2, 8).unwrap();
        let (b, s) = bernstein_lower(&e, 0).unwrap();
        assert_eq!(s.value_exact.as_deref(), Some("1/4"));
        assert!(b.is_certified());
        let single = StepSubspace::new(16, vec![dipole(16, 3, 9).unwrap()]).unwrap();
        let (_, s) = bernstein_lower(&single, 0).unwrap();
        assert_eq!(s.value_exact.as_deref(), Some("1/2"));
    }

    #[test]
    fn bernstein_upper_on_interval_subspace() {
        let e = isomorphism_subspace(2, 8).unwrap();
        let (b, chain) = bernstein_upper_1d(&e, &ZigzagSearch::default()).unwrap();
        assert!(b.is_certified());
        assert!(b.upper <= 1.05 / 4.0 + 1e-15);
        let ratio: f64 = {
            let (n, d) = chain.subspace_ratio.split_once('/').unwrap_or((&chain.subspace_ratio, "1"));
            n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap()
        };
        assert!((0.25 - 1e-12..=1.05 / 4.0).contains(&ratio));
    }

    #[test]
    fn bernstein_upper_single_dipole() {
        let e = StepSubspace::new(8, vec![dipole(8, 0, 5).unwrap()]).unwrap();
        let (b, _) = bernstein_upper_1d(&e, &ZigzagSearch::default()).unwrap();
        assert!(b.is_certified());
        assert!(b.upper <= 1.05 / 2.0);
    }

    #[test]
    fn non_mean_zero_rejected() {
        let e = StepSubspace::new(4, vec![StepFunction::constant(q(1, 1))]).unwrap();
        assert!(bernstein_upper_1d(&e, &ZigzagSearch::default()).is_err());
    }

    #[test]
    fn approximation_anchor() {
        assert_eq!(approximation_upper(5).unwrap().upper, 0.5);
    }
}
