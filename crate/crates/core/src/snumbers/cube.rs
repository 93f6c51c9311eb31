//! Isomorphism and Bernstein numbers of the embedding `V¹₀L^{d,1}(Q) → C(Q)`
//! on grid functions.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::{witness_json, FactorizationWitness, GridSubspace, Kind, Operator, SNumberBound, Status};
use crate::error::{Result, SnumError};
use crate::grid::{pyramid, GridFunction, GridSpec};
use crate::hilbert::{hilbert_order, HilbertOrdering};
use crate::john::{cell_membership, segment_domain, segment_oscillation_constant};
use crate::lorentz::{lorentz_norm, LorentzParams};
use crate::scalar::{q, Mode};
use crate::zigzag::{zigzag_find, ZigzagSearch};

const REL_TOL: f64 = 1e-12;

/// `m^d` pyramids `(r - |x - x_k|_∞)_+` with `r = 1/(2m)` tiling `Q`, on a
/// grid with `cells_per_side` a multiple of `4m` (so every apex is an even node).
pub fn hat_functions(d: usize, m: usize, cells_per_side: usize) -> Result<(GridSpec, Vec<GridFunction>)> {
    if d < 1 || m < 1 {
        return Err(SnumError::Domain(format!("need d >= 1 and m >= 1, got d = {d}, m = {m}")));
    }
    if !cells_per_side.is_multiple_of(4 * m) {
        return Err(SnumError::Construction(format!(
            "{cells_per_side} cells per side cannot centre {m} disjoint balls per axis on even nodes"
        )));
    }
    let spec = GridSpec::new(d, cells_per_side)?;
    let half = cells_per_side / (2 * m);
    let count = m.pow(d as u32);
    let mut hats = Vec::with_capacity(count);
    for flat in 0..count {
        let mut rest = flat;
        let mut center = vec![0; d];
        for a in (0..d).rev() {
            center[a] = (2 * (rest % m) + 1) * half;
            rest /= m;
        }
        hats.push(pyramid(spec, &center, half)?);
    }
    Ok((spec, hats))
}

fn apex(u: &GridFunction) -> (Vec<usize>, f64) {
    let vals = u.nodal_values();
    let (i, v) = vals
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    (u.spec().node_coords(i), v)
}

/// `i_n ≥ r/‖χ_Q‖_X = n^{-1/d}/(2‖χ_Q‖_X)` for `n = m^d`, from evaluation at the
/// apexes and `B(y) = Σ y_k u_k / r`.
pub fn isomorphism_lower_ddim(
    d: usize,
    m: usize,
    params: LorentzParams,
    cells_per_side: Option<usize>,
    seed: u64,
) -> Result<(SNumberBound, FactorizationWitness)> {
    if d < 2 {
        return Err(SnumError::Precondition("the cube embedding needs d >= 2".into()));
    }
    let cells = cells_per_side.unwrap_or(4 * m);
    let (spec, hats) = hat_functions(d, m, cells)?;
    let n = hats.len();
    let apexes: Vec<(Vec<usize>, f64)> = hats.iter().map(apex).collect();
    let mut identity = true;
    for (k, u) in hats.iter().enumerate() {
        for (j, (node, _)) in apexes.iter().enumerate() {
            let got = u.value_at_node(node) / apexes[k].1;
            identity &= got == if j == k { 1.0 } else { 0.0 };
        }
    }
    if !identity {
        return Err(SnumError::CertificateInvalid("A B is not the identity on the apexes".into()));
    }
    let r = apexes[0].1;
    let chi_q = params.indicator_norm(1.0);
    let norm_b = chi_q / r;
    let synth = |y: &[f64]| -> Result<GridFunction> {
        let coeffs: Vec<f64> = y.iter().map(|v| v / r).collect();
        GridFunction::linear_combination(spec, &coeffs, &hats)
    };
    // |∇B(y)| ≤ ‖y‖_∞/r on Q, so ‖∇B(y)‖_X ≤ ‖y‖_∞ ‖χ_Q‖_X / r
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes: Vec<Vec<f64>> = vec![vec![1.0; n]];
    for _ in 0..4 {
        probes.push((0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect());
    }
    let mut worst_ratio = 0.0f64;
    for y in &probes {
        let sup_y = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let g = lorentz_norm(&synth(y)?.gradient_data(), params);
        worst_ratio = worst_ratio.max(g / (sup_y * norm_b));
    }
    if worst_ratio > 1.0 + REL_TOL {
        return Err(SnumError::CertificateInvalid(format!("‖∇B y‖ exceeds the claimed norm by {worst_ratio}")));
    }
    let lower = r / chi_q;
    let lower_exact = (params.q() == 1.0 && params.p().fract() == 0.0)
        .then(|| q(1, 2 * m as i64 * params.p() as i64));
    let h = spec.h();
    let witness = FactorizationWitness {
        points: apexes.iter().map(|(node, _)| node.iter().map(|&i| i as f64 * h).collect()).collect(),
        synthesis: hats.iter().map(GridFunction::to_json).collect(),
        norm_a: 1.0,
        norm_b,
        norm_a_exact: Some("1".into()),
        norm_b_exact: None,
        identity_verified: true,
    };
    let bound = SNumberBound::new(
        Kind::Isomorphism,
        n,
        lower,
        f64::INFINITY,
        Status::Certified,
        Mode::Float,
        Operator::Cube { dim: d },
        "n^{-1/d}/(2 ||chi_Q||)",
        json!({
            "m": m,
            "radius": r,
            "cells_per_side": cells,
            "chi_q_norm": chi_q,
            "norm_probe_max_ratio": worst_ratio,
            "points": witness.points,
        }),
    )?
    .with_exact(lower_exact.as_ref(), None);
    Ok((bound, witness))
}

/// `inf ‖u‖_∞/‖∇u‖_X` over the span of the hats; by the lattice property of
/// `X` the infimum is attained at `y = (1, …, 1)`.
pub fn hat_subspace_bernstein_ratio(d: usize, m: usize, params: LorentzParams) -> Result<SNumberBound> {
    let (spec, hats) = hat_functions(d, m, 4 * m)?;
    let r = apex(&hats[0]).1;
    let ones = vec![1.0 / r; hats.len()];
    let u = GridFunction::linear_combination(spec, &ones, &hats)?;
    let ratio = u.sup_norm() / lorentz_norm(&u.gradient_data(), params);
    SNumberBound::new(
        Kind::Bernstein,
        hats.len(),
        ratio,
        f64::INFINITY,
        Status::Certified,
        Mode::Float,
        Operator::Cube { dim: d },
        "n^{-1/d}/(2 ||chi_Q||)",
        json!({ "subspace": "hats", "m": m, "ratio": ratio }),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct CubeChainLink {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CubeChain {
    pub curve_order: u32,
    pub labels: Vec<usize>,
    pub zigzag_sup: f64,
    pub alternation: f64,
    pub oscillations: Vec<f64>,
    pub gradient_norms: Vec<f64>,
    pub constants: Vec<f64>,
    pub gradient_norm: f64,
    pub sup_norm: f64,
    /// `‖v‖_∞ / ‖∇v‖_{d,1}` for the alternating element.
    pub direct_ratio: f64,
    /// `‖v‖_∞ 2^{1/d} (Σ C_j^{d'})^{1/d'} / Σ|v(x_{l_{j+1}}) - v(x_{l_j})|`.
    pub chain_bound: f64,
    pub links: Vec<CubeChainLink>,
}

fn link(name: &str, lhs: f64, rhs: f64) -> CubeChainLink {
    CubeChainLink { name: name.into(), lhs, rhs, holds: lhs <= rhs * (1.0 + REL_TOL) + REL_TOL }
}

/// Values of `u` at the centres of the level-`k` cubes, in curve order.
fn centre_values(u: &GridFunction, ordering: &HilbertOrdering) -> Vec<f64> {
    let ratio = u.cells_per_side() >> ordering.order();
    ordering
        .cubes()
        .iter()
        .map(|c| {
            if ratio.is_multiple_of(2) {
                let node: Vec<usize> = c.coords.iter().map(|&x| x as usize * ratio + ratio / 2).collect();
                u.value_at_node(&node)
            } else {
                // centre of a single grid cell: midpoint of the diagonal shared by its simplices
                let cell: Vec<usize> = c.coords.iter().map(|&x| x as usize * ratio + ratio / 2).collect();
                let base: Vec<usize> = cell.iter().map(|&a| a + (a & 1)).collect();
                let far: Vec<usize> = cell.iter().map(|&a| a + 1 - (a & 1)).collect();
                0.5 * (u.value_at_node(&base) + u.value_at_node(&far))
            }
        })
        .collect()
}

/// Bernstein ratio bound for a subspace of grid functions through alternation
/// along a Hilbert curve of order `k`: every link of
///
/// ```text
/// Σ|Δv| ≤ Σ osc(v; Ω_j) ≤ Σ C_j ‖∇v χ_{Ω_j}‖ ≤ (Σ C_j^{d'})^{1/d'} (Σ ‖∇v χ_{Ω_j}‖^d)^{1/d}
///       ≤ (Σ C_j^{d'})^{1/d'} 2^{1/d} ‖∇v‖
/// ```
///
/// is evaluated and logged.
pub fn bernstein_upper_ddim(e: &GridSubspace, k: u32, search: &ZigzagSearch) -> Result<(SNumberBound, CubeChain)> {
    let spec = e.spec();
    let d = spec.dim;
    if !spec.cells_per_side.is_multiple_of(1usize << k) {
        return Err(SnumError::DimensionMismatch(format!(
            "{} cells per side is not a multiple of 2^{k}",
            spec.cells_per_side
        )));
    }
    let ordering = Arc::new(hilbert_order(d, k)?);
    let params = LorentzParams::critical(d);
    let vectors: Vec<Vec<f64>> = e.basis().iter().map(|u| centre_values(u, &ordering)).collect();
    let z = zigzag_find(&vectors, search)?;
    let v = GridFunction::linear_combination(spec, &z.coefficients, e.basis())?;
    let n = e.dim();
    let sup = v.sup_norm();
    let grad = lorentz_norm(&v.gradient_data(), params);
    if grad == 0.0 {
        return Err(SnumError::DegenerateBasis("alternating element has zero gradient".into()));
    }
    let direct = sup / grad;
    let mut chain = CubeChain {
        curve_order: k,
        labels: z.indices.iter().map(|l| l + 1).collect(),
        zigzag_sup: z.sup_norm_value,
        alternation: 0.0,
        oscillations: Vec::new(),
        gradient_norms: Vec::new(),
        constants: Vec::new(),
        gradient_norm: grad,
        sup_norm: sup,
        direct_ratio: direct,
        chain_bound: direct,
        links: Vec::new(),
    };
    if n >= 2 {
        let labels = &chain.labels;
        for w in labels.windows(2) {
            let omega = segment_domain(ordering.clone(), w[0], w[1])?;
            let member = cell_membership(&omega, &v)?;
            chain.oscillations.push(v.oscillation_where(&member));
            chain.gradient_norms.push(lorentz_norm(&v.gradient_data_where(&member), params));
            chain.constants.push(segment_oscillation_constant(d, omega.decomposition()?.len()));
        }
        chain.alternation = z.indices.windows(2).map(|w| (z.values[w[1]] - z.values[w[0]]).abs()).sum();
        let df = d as f64;
        let dp = df / (df - 1.0);
        let osc_sum: f64 = chain.oscillations.iter().sum();
        let weighted: f64 = chain.constants.iter().zip(&chain.gradient_norms).map(|(c, a)| c * a).sum();
        let c_norm = chain.constants.iter().map(|c| c.powf(dp)).sum::<f64>().powf(1.0 / dp);
        let a_pow: Vec<f64> = chain.gradient_norms.iter().map(|a| a.powf(df)).collect();
        let a_norm = a_pow.iter().sum::<f64>().powf(1.0 / df);
        let mut links = vec![
            link("alternation <= sum osc", chain.alternation, osc_sum),
            link("sum osc <= sum C_j a_j", osc_sum, weighted),
        ];
        for (j, ((o, c), a)) in chain.oscillations.iter().zip(&chain.constants).zip(&chain.gradient_norms).enumerate() {
            links.push(link(&format!("osc_{} <= C_{0} a_{0}", j + 1), *o, c * a));
        }
        links.push(link("Holder", weighted, c_norm * a_norm));
        for parity in 0..2 {
            let s: f64 = a_pow.iter().skip(parity).step_by(2).sum();
            links.push(link(&format!("superadditivity (parity {parity})"), s, grad.powf(df)));
        }
        links.push(link("overlap", a_pow.iter().sum(), 2.0 * grad.powf(df)));
        chain.chain_bound = sup * 2f64.powf(1.0 / df) * c_norm / chain.alternation;
        links.push(link("direct ratio <= chain bound", direct, chain.chain_bound));
        chain.links = links;
    }
    let holds = chain.links.iter().all(|l| l.holds);
    let status = if holds && z.within_tolerance { Status::Certified } else { Status::Inconclusive };
    let bound = SNumberBound::new(
        Kind::Bernstein,
        n,
        0.0,
        chain.chain_bound,
        status,
        Mode::Float,
        Operator::Cube { dim: d },
        "C n^{-1/d}",
        json!({ "chain": witness_json(&chain) }),
    )?
    .for_subspace();
    Ok((bound, chain))
}

/// Random boundary-zero grid functions, for probing the chain on generic subspaces.
pub fn random_grid_subspace(spec: GridSpec, dim: usize, seed: u64) -> Result<GridSubspace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = (0..dim)
        .map(|_| {
            let vals: Vec<f64> = (0..spec.node_count())
                .map(|i| {
                    if spec.is_boundary_node(&spec.node_coords(i)) {
                        0.0
                    } else {
                        rng.gen_range(-1.0..1.0)
                    }
                })
                .collect();
            GridFunction::new(spec, vals, true)
        })
        .collect::<Result<Vec<_>>>()?;
    GridSubspace::new(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isomorphism_examples() {
        let p2 = LorentzParams::critical(2);
        let (b, w) = isomorphism_lower_ddim(2, 2, p2, None, 0).unwrap();
        assert_eq!(b.lower, 0.125);
        assert_eq!(b.lower_exact.as_deref(), Some("1/8"));
        assert!(w.identity_verified);
        let (b, _) = isomorphism_lower_ddim(3, 1, LorentzParams::critical(3), None, 0).unwrap();
        assert!((b.lower - 1.0 / 6.0).abs() < 1e-15);
        for (m, n) in [(1, 1), (2, 4), (4, 16), (8, 64)] {
            let (b, _) = isomorphism_lower_ddim(2, m, p2, None, 0).unwrap();
            assert_eq!(b.n, n);
            assert_eq!(b.lower * (n as f64).sqrt(), 0.25);
        }
        assert!(hat_functions(2, 3, 8).is_err());
    }

    #[test]
    fn hat_ratio_matches_lower() {
        for m in [1, 2, 4] {
            let b = hat_subspace_bernstein_ratio(2, m, LorentzParams::critical(2)).unwrap();
            assert!((b.lower * m as f64 - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn chain_on_hat_subspace() {
        let (_, hats) = hat_functions(2, 2, 16).unwrap();
        let e = GridSubspace::new(hats).unwrap();
        let (b, chain) = bernstein_upper_ddim(&e, 2, &ZigzagSearch::default()).unwrap();
        assert!(b.is_certified(), "{:?}", chain.links);
        assert!(chain.direct_ratio >= 0.125 - 1e-12);
        assert!(chain.direct_ratio <= b.upper);
    }

    #[test]
    fn chain_on_random_subspace() {
        let spec = GridSpec::new(2, 32).unwrap();
        let e = random_grid_subspace(spec, 3, 11).unwrap();
        let (_, chain) = bernstein_upper_ddim(&e, 4, &ZigzagSearch::default()).unwrap();
        for l in &chain.links {
            assert!(l.holds, "{l:?}");
        }
    }

    #[test]
    fn curve_grid_mismatch() {
        let spec = GridSpec::new(2, 12).unwrap();
        let e = random_grid_subspace(spec, 2, 1).unwrap();
        assert!(bernstein_upper_ddim(&e, 3, &ZigzagSearch::default()).is_err());
    }
}
