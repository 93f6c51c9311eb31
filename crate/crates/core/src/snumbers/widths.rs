//! Gelfand and Kolmogorov numbers of `V: L¹₀ → C`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::{witness_json, Kind, Operator, SNumberBound, Status};
use crate::error::{Result, SnumError};
use crate::lp::chebyshev_distance;
use crate::scalar::{pow2, q, Exact, Mode, Scalar};
use crate::step::{MeanZeroTag, StepFunction};
use crate::volterra::{dipole, volterra_apply, VolterraCurve};

#[derive(Debug, Clone, Serialize)]
pub struct GelfandWitness {
    /// Mean-zero, unit `L¹` norm, supported where every functional is nearly constant.
    pub f: serde_json::Value,
    pub split_point: String,
    pub vf_at_split: String,
    /// `|∫ f g_k|` for every functional.
    pub pairings: Vec<String>,
    pub cell_measure: String,
    /// `‖Vf‖_∞ - max_k |∫ f g_k|`, a lower bound for every admissible `ρ`.
    pub rho_bound: String,
    #[serde(skip)]
    pub rho_exact: Exact,
    #[serde(skip)]
    pub function: StepFunction<Exact>,
}

fn floor_div(v: &Exact, w: &Exact) -> BigInt {
    (v.clone() / w.clone()).floor().to_integer()
}

/// Builds `f` with `Vf(x) = 1/2`, `‖f‖₁ = 1` and `|∫ f g_k| < ε/2` for the
/// given functionals: their values are binned with width `ε`, the largest
/// common bin `Ω` is split at its measure median `x`, and
/// `f = χ_{Ω∩(0,x)}/|Ω| - χ_{Ω∩(x,1)}/|Ω|`.
pub fn gelfand_lower_adversary(functionals: &[StepFunction<Exact>], eps: &Exact) -> Result<GelfandWitness> {
    if !eps.is_positive() {
        return Err(SnumError::Domain("quantization step must be positive".into()));
    }
    let mut bps: Vec<Exact> = vec![q(0, 1), q(1, 1)];
    for g in functionals {
        bps.extend(g.breakpoints().iter().cloned());
    }
    bps.sort();
    bps.dedup();
    // signed values are binned so that g_k varies by less than ε on Ω
    let mut groups: Vec<(Exact, Vec<(Exact, Exact)>)> = Vec::new();
    let mut lookup: HashMap<Vec<BigInt>, usize> = HashMap::new();
    for w in bps.windows(2) {
        let key: Vec<BigInt> = functionals.iter().map(|g| floor_div(&g.eval(&w[0]), eps)).collect();
        let len = w[1].clone() - w[0].clone();
        let slot = *lookup.entry(key).or_insert_with(|| {
            groups.push((Exact::zero(), Vec::new()));
            groups.len() - 1
        });
        groups[slot].0 += len;
        groups[slot].1.push((w[0].clone(), w[1].clone()));
    }
    let best = groups
        .iter()
        .enumerate()
        .fold(None::<usize>, |b, (i, g)| match b {
            Some(j) if groups[j].0 >= g.0 => Some(j),
            _ => Some(i),
        })
        .ok_or_else(|| SnumError::Construction("no cells".into()))?;
    let (measure, intervals) = &groups[best];
    if !measure.is_positive() {
        return Err(SnumError::Construction("no common cell has positive measure".into()));
    }
    let half = measure.clone() / q(2, 1);
    let mut acc = Exact::zero();
    let mut x = None;
    for (a, b) in intervals {
        let len = b.clone() - a.clone();
        if acc.clone() + len.clone() >= half {
            x = Some(a.clone() + (half.clone() - acc.clone()));
            break;
        }
        acc += len;
    }
    let x = x.expect("half the measure is reached");
    let height = q(1, 1) / measure.clone();
    let mut breaks = vec![q(0, 1)];
    let mut values = Vec::new();
    let push = |a: Exact, b: Exact, v: Exact, breaks: &mut Vec<Exact>, values: &mut Vec<Exact>| {
        if a >= b {
            return;
        }
        if *breaks.last().unwrap() < a {
            values.push(Exact::zero());
            breaks.push(a.clone());
        }
        values.push(v);
        breaks.push(b);
    };
    for (a, b) in intervals {
        if *b <= x {
            push(a.clone(), b.clone(), height.clone(), &mut breaks, &mut values);
        } else if *a >= x {
            push(a.clone(), b.clone(), -height.clone(), &mut breaks, &mut values);
        } else {
            push(a.clone(), x.clone(), height.clone(), &mut breaks, &mut values);
            push(x.clone(), b.clone(), -height.clone(), &mut breaks, &mut values);
        }
    }
    if *breaks.last().unwrap() < q(1, 1) {
        values.push(Exact::zero());
        breaks.push(q(1, 1));
    }
    let f = StepFunction::new(breaks, values)?.canonicalize();
    let vf = volterra_apply(&f);
    let vx = vf.eval(&x);
    let pairings: Vec<Exact> = functionals.iter().map(|g| f.inner(g).abs()).collect();
    let worst = pairings.iter().cloned().fold(Exact::zero(), |m, p| if p > m { p } else { m });
    if vx != q(1, 2) || f.l1_norm() != q(1, 1) || !f.integral().is_zero() || worst >= eps.clone() {
        return Err(SnumError::CertificateInvalid(format!(
            "Vf(x) = {vx}, ‖f‖₁ = {}, max pairing {worst}",
            f.l1_norm()
        )));
    }
    let rho = vf.sup_norm() - worst;
    Ok(GelfandWitness {
        f: f.to_json(),
        split_point: x.to_json_string(),
        vf_at_split: vx.to_json_string(),
        pairings: pairings.iter().map(Scalar::to_json_string).collect(),
        cell_measure: measure.to_json_string(),
        rho_bound: rho.to_json_string(),
        rho_exact: rho,
        function: f,
    })
}

/// Families of functionals `g_1, …, g_m` tried against the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GelfandAdversary {
    /// Random values on a uniform grid.
    RandomStep { cells: usize, seed: u64 },
    /// `g_k = χ_{[0, k/(m+1))}`, so `∫ f g_k = Vf(k/(m+1))`.
    NodeEvaluation,
    /// `cos(2πkx)` sampled at cell midpoints.
    FourierLike { cells: usize },
}

impl GelfandAdversary {
    pub fn name(&self) -> &'static str {
        match self {
            GelfandAdversary::RandomStep { .. } => "random-step",
            GelfandAdversary::NodeEvaluation => "node-evaluation",
            GelfandAdversary::FourierLike { .. } => "fourier",
        }
    }

    pub fn functionals(&self, m: usize) -> Result<Vec<StepFunction<Exact>>> {
        match *self {
            GelfandAdversary::RandomStep { cells, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..m)
                    .map(|_| StepFunction::uniform((0..cells).map(|_| q(rng.gen_range(-1000..=1000), 1000)).collect()))
                    .collect()
            }
            GelfandAdversary::NodeEvaluation => (1..=m)
                .map(|k| StepFunction::indicator(q(0, 1), q(k as i64, m as i64 + 1), q(1, 1)))
                .collect(),
            GelfandAdversary::FourierLike { cells } => (1..=m)
                .map(|k| {
                    StepFunction::uniform(
                        (0..cells)
                            .map(|t| {
                                let x = (t as f64 + 0.5) / cells as f64;
                                let v = (2.0 * std::f64::consts::PI * k as f64 * x).cos();
                                q((v * 1e6).round() as i64, 1_000_000)
                            })
                            .collect(),
                    )
                })
                .collect(),
        }
    }
}

/// `c_n ≥ 1/2 - ε` against `n - 1` functionals from each adversary, and `c_n ≤ a_n ≤ 1/2`.
pub fn gelfand_lower(n: usize, eps: &Exact, adversaries: &[GelfandAdversary]) -> Result<SNumberBound> {
    if n == 0 {
        return Err(SnumError::Domain("s-number index starts at 1".into()));
    }
    let mut lower: Option<Exact> = None;
    let mut runs = Vec::new();
    for adv in adversaries {
        let w = gelfand_lower_adversary(&adv.functionals(n - 1)?, eps)?;
        if lower.as_ref().is_none_or(|l| w.rho_exact < *l) {
            lower = Some(w.rho_exact.clone());
        }
        runs.push(json!({ "adversary": adv.name(), "witness": witness_json(&w) }));
    }
    let lower = lower.unwrap_or_else(|| q(1, 2));
    let half = q(1, 2);
    Ok(SNumberBound::new(
        Kind::Gelfand,
        n,
        lower.to_f64_lossy(),
        0.5,
        Status::Certified,
        Mode::Exact,
        Operator::Volterra,
        "1/2",
        json!({ "epsilon": eps.to_json_string(), "functionals": n - 1, "runs": runs }),
    )?
    .with_exact(Some(&lower), Some(&half)))
}

/// `inf_c ‖Vf - c‖_∞` and the bound `‖f‖₁/4` for mean-zero `f`.
pub fn constant_distance_certificate(f: &StepFunction<Exact>) -> Result<(Exact, Exact)> {
    MeanZeroTag::EXACT.check(f)?;
    let dist = volterra_apply(f).distance_to_constants();
    let bound = f.l1_norm() / q(4, 1);
    if dist > bound {
        return Err(SnumError::CertificateInvalid(format!("distance {dist} exceeds ‖f‖₁/4 = {bound}")));
    }
    Ok((dist, bound))
}

/// `d_n ≤ 1/4` for `n ≥ 2`: against the constants, `dist(Vf, ℝ) = osc(Vf)/2 ≤ ‖f‖₁/4`.
/// The supremum is probed over dipoles of the uniform `N`-grid.
pub fn kolmogorov_upper_1d(n: usize, cells: usize) -> Result<SNumberBound> {
    if n < 2 {
        return Err(SnumError::Precondition("d_1 = ‖V‖ is handled by the operator norm".into()));
    }
    if cells < 2 {
        return Err(SnumError::Precondition("need at least two cells".into()));
    }
    // 2·Vf at the nodes of a dipole is a partial sum of ±1
    let stride = (cells / 64).max(1);
    let mut best = (-1i64, 0usize, 1usize);
    let mut probed = 0;
    for a in (0..cells).step_by(stride) {
        for b in (0..cells).step_by(stride) {
            if a == b {
                continue;
            }
            probed += 1;
            let (mut s, mut hi, mut lo) = (0i64, 0i64, 0i64);
            for t in 0..cells {
                s += (t == a) as i64 - (t == b) as i64;
                hi = hi.max(s);
                lo = lo.min(s);
            }
            if hi - lo > best.0 {
                best = (hi - lo, a, b);
            }
        }
    }
    let f = dipole(cells, best.1, best.2)?;
    let (dist, bound) = constant_distance_certificate(&f)?;
    let quarter = q(1, 4);
    Ok(SNumberBound::new(
        Kind::Kolmogorov,
        n,
        f64::NEG_INFINITY,
        0.25,
        Status::Certified,
        Mode::Exact,
        Operator::Volterra,
        "1/4",
        json!({
            "subspace": "constants",
            "dipoles_probed": probed,
            "attaining_dipole": [best.1, best.2],
            "attained_distance": dist.to_json_string(),
            "bound": bound.to_json_string(),
        }),
    )?
    .with_exact(None, Some(&quarter)))
}

/// Largest `k` for which `f_k` is built exactly.
pub const KOLMOGOROV_MAX_K: u32 = 60;

/// `f_k = 2^k(χ_{(2^{-k-1}, 2^{-k})} - χ_{(1-2^{-k}, 1-2^{-k-1})})`.
pub fn kolmogorov_family(k: u32) -> Result<StepFunction<Exact>> {
    if !(2..=KOLMOGOROV_MAX_K).contains(&k) {
        return Err(SnumError::Capacity(format!("k = {k} outside 2..={KOLMOGOROV_MAX_K}")));
    }
    let k = k as i32;
    let one = q(1, 1);
    StepFunction::new(
        vec![q(0, 1), pow2(-k - 1), pow2(-k), one.clone() - pow2(-k), one.clone() - pow2(-k - 1), one],
        vec![q(0, 1), pow2(k), q(0, 1), -pow2(k), q(0, 1)],
    )
}

/// Candidate subspaces `N` with `dim N < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KolmogorovAdversary {
    Constants,
    /// Polynomials of degree `< n - 1`, in the Chebyshev basis on `[0, 1]`.
    Polynomials,
    /// `span{Vg_1, …, Vg_{n-1}}` for random step functions `g_j`.
    RandomVImages { cells: usize, seed: u64 },
}

impl KolmogorovAdversary {
    pub fn name(&self) -> &'static str {
        match self {
            KolmogorovAdversary::Constants => "constants",
            KolmogorovAdversary::Polynomials => "polynomials",
            KolmogorovAdversary::RandomVImages { .. } => "random-v-images",
        }
    }

    /// Basis of the subspace sampled at `xs`.
    pub fn basis(&self, n: usize, xs: &[f64]) -> Result<Vec<Vec<f64>>> {
        Ok(match *self {
            KolmogorovAdversary::Constants => vec![vec![1.0; xs.len()]],
            KolmogorovAdversary::Polynomials => (0..n - 1)
                .map(|j| xs.iter().map(|&x| (j as f64 * (2.0 * x - 1.0).clamp(-1.0, 1.0).acos()).cos()).collect())
                .collect(),
            KolmogorovAdversary::RandomVImages { cells, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n - 1)
                    .map(|_| {
                        let g = StepFunction::uniform((0..cells).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
                        let vg = volterra_apply(&g);
                        Ok(xs.iter().map(|x| vg.eval(x)).collect())
                    })
                    .collect::<Result<_>>()?
            }
        })
    }
}

fn sample_points(k_max: u32) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..=512).map(|i| i as f64 / 512.0).collect();
    for j in 1..=k_max as i32 + 2 {
        let p = 2f64.powi(-j);
        xs.extend([p, 1.0 - p, 1.5 * p, 1.0 - 1.5 * p]);
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    xs
}

/// Slack subtracted from LP optima before they are reported as lower bounds.
pub const LP_SLACK: f64 = 1e-9;

/// `d_n ≥ 1/4 - δ` against each adversary: for every candidate `N`,
/// `sup_k dist(Vf_k, N)` is bounded below by the discrete Chebyshev distance
/// on a finite sample, which can only be smaller than the true distance.
pub fn kolmogorov_lower_witness(n: usize, k_max: u32, adversaries: &[KolmogorovAdversary]) -> Result<SNumberBound> {
    if n < 2 {
        return Err(SnumError::Precondition("d_1 = ‖V‖ is handled by the operator norm".into()));
    }
    if k_max < 2 {
        return Err(SnumError::Precondition("k_max must be at least 2".into()));
    }
    if k_max > KOLMOGOROV_MAX_K {
        return Err(SnumError::Capacity(format!("k_max = {k_max} exceeds the exact budget {KOLMOGOROV_MAX_K}")));
    }
    let xs = sample_points(k_max);
    let curves: Vec<VolterraCurve<Exact>> = (2..=k_max)
        .map(|k| {
            let f = kolmogorov_family(k)?;
            let vf = volterra_apply(&f);
            if f.l1_norm() != q(1, 1) || vf.eval(&q(0, 1)) != q(0, 1) || vf.eval(&pow2(-(k as i32))) != q(1, 2) {
                return Err(SnumError::CertificateInvalid(format!("f_{k} fails its normalization")));
            }
            Ok(vf)
        })
        .collect::<Result<_>>()?;
    let targets: Vec<Vec<f64>> = curves
        .iter()
        .map(|c| {
            let c = c.to_f64();
            xs.iter().map(|x| c.eval(x)).collect()
        })
        .collect();
    let mut lower = f64::INFINITY;
    let mut runs = Vec::new();
    for adv in adversaries {
        let basis = adv.basis(n, &xs)?;
        let mut best = (f64::NEG_INFINITY, 0u32);
        // the family is ordered by increasing sharpness; scan from the sharpest
        for k in (2..=k_max).rev() {
            let (d, _) = chebyshev_distance(&targets[k as usize - 2], &basis)?;
            if d > best.0 {
                best = (d, k);
            }
            if best.0 >= 0.25 - LP_SLACK {
                break;
            }
        }
        let certified = best.0 - LP_SLACK;
        lower = lower.min(certified);
        runs.push(json!({ "adversary": adv.name(), "dim": basis.len(), "best_k": best.1, "distance": certified }));
    }
    if adversaries.is_empty() {
        lower = f64::NEG_INFINITY;
    }
    SNumberBound::new(
        Kind::Kolmogorov,
        n,
        lower,
        f64::INFINITY,
        Status::Certified,
        Mode::Float,
        Operator::Volterra,
        "1/4",
        json!({ "k_max": k_max, "samples": xs.len(), "runs": runs }),
    )
}

/// The adversaries shipped with the tool.
pub fn default_kolmogorov_adversaries(seed: u64) -> Vec<KolmogorovAdversary> {
    vec![
        KolmogorovAdversary::Constants,
        KolmogorovAdversary::Polynomials,
        KolmogorovAdversary::RandomVImages { cells: 64, seed },
    ]
}

pub fn default_gelfand_adversaries(cells: usize, seed: u64) -> Vec<GelfandAdversary> {
    vec![
        GelfandAdversary::RandomStep { cells, seed },
        GelfandAdversary::NodeEvaluation,
        GelfandAdversary::FourierLike { cells },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_functionals_gives_half() {
        let w = gelfand_lower_adversary(&[], &q(1, 1000)).unwrap();
        assert_eq!(w.rho_bound, "1/2");
        assert_eq!(w.split_point, "1/2");
    }

    #[test]
    fn constant_functional_pairs_to_zero() {
        let w = gelfand_lower_adversary(&[StepFunction::constant(q(3, 1))], &q(1, 1000)).unwrap();
        assert_eq!(w.pairings, vec!["0".to_string()]);
    }

    #[test]
    fn random_functionals() {
        let gs = GelfandAdversary::RandomStep { cells: 256, seed: 5 }.functionals(4).unwrap();
        let w = gelfand_lower_adversary(&gs, &q(1, 1000)).unwrap();
        assert!(w.rho_exact >= q(1, 2) - q(1, 1000));
        assert_eq!(w.vf_at_split, "1/2");
    }

    #[test]
    fn sign_changing_functional() {
        let g = StepFunction::uniform_ratios(&[-1, 1], 1).unwrap();
        let w = gelfand_lower_adversary(&[g], &q(1, 10)).unwrap();
        assert_eq!(w.pairings, vec!["0".to_string()]);
    }

    #[test]
    fn kolmogorov_upper_examples() {
        let b = kolmogorov_upper_1d(2, 1024).unwrap();
        assert_eq!(b.upper_exact.as_deref(), Some("1/4"));
        assert!(kolmogorov_upper_1d(1, 16).is_err());
        let f = dipole(1024, 0, 1).unwrap();
        let (d, _) = constant_distance_certificate(&f).unwrap();
        assert!(d >= q(1, 4) - q(1, 1024) && d <= q(1, 4));
        let pos = StepFunction::constant(q(1, 1));
        assert!(constant_distance_certificate(&pos).is_err());
    }

    #[test]
    fn family_normalization() {
        for k in [2, 10, 60] {
            let f = kolmogorov_family(k).unwrap();
            assert_eq!(f.l1_norm(), q(1, 1));
            assert_eq!(volterra_apply(&f).eval(&pow2(-(k as i32))), q(1, 2));
        }
        assert!(kolmogorov_family(61).is_err());
        assert!(kolmogorov_family(1).is_err());
    }

    #[test]
    fn kolmogorov_lower_against_constants() {
        let b = kolmogorov_lower_witness(2, 10, &[KolmogorovAdversary::Constants]).unwrap();
        assert!(b.lower >= 0.25 - 1e-3);
        assert!(kolmogorov_lower_witness(1, 10, &[]).is_err());
        assert!(kolmogorov_lower_witness(2, 61, &[]).is_err());
    }

    #[test]
    fn kolmogorov_lower_all_adversaries() {
        for n in [2, 5, 10] {
            let b = kolmogorov_lower_witness(n, 40, &default_kolmogorov_adversaries(7)).unwrap();
            assert!(b.lower >= 0.25 - 1e-3, "n = {n}: {}", b.witness);
        }
    }
}
