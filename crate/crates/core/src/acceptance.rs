//! The acceptance suite: ten numbered criteria with pinned tolerances and
//! runtime budgets, shared by the `acceptance` test target and `snum selftest`.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::grid::GridSpec;
use crate::hilbert::{check_face_adjacency, check_prefix_nesting, hilbert_order, HilbertOrdering};
use crate::john::{john_bound_constructive, segment_domain, uniform_john_constant, verify_john_certificate};
use crate::lorentz::{distribution_function, lorentz_norm, lp_norm, LorentzParams};
use crate::scalar::{q, Exact, Mode, Scalar};
use crate::snumbers::*;
use crate::step::StepFunction;
use crate::volterra::{operator_norm_discrete, volterra_apply};
use crate::zigzag::ZigzagSearch;

#[derive(Debug, Clone)]
pub struct AcceptanceConfig {
    pub mode: Mode,
    /// Absolute tolerance for comparisons in float mode; exact mode compares rationals.
    pub float_tolerance: f64,
    pub seed: u64,
    /// Replace one Hilbert table by a corrupted copy.
    pub corrupt_hilbert: bool,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self { mode: Mode::Exact, float_tolerance: 1e-12, seed: 2024, corrupt_hilbert: false }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2}. {} ({:.2}s / {:.0}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.budget_seconds,
            self.detail
        )
    }
}

fn timed(
    id: u32,
    name: &'static str,
    budget: Duration,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> CriterionResult {
    let start = Instant::now();
    let (ok, detail) = body().unwrap_or_else(|e| (false, format!("error: {e}")));
    let elapsed = start.elapsed();
    let in_budget = elapsed <= budget;
    let detail = if in_budget { detail } else { format!("{detail}; over runtime budget") };
    CriterionResult {
        id,
        name,
        passed: ok && in_budget,
        detail,
        seconds: elapsed.as_secs_f64(),
        budget_seconds: budget.as_secs_f64(),
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

/// Random mean-zero step functions with integer cell values, as a subspace.
pub fn random_mean_zero_subspace(cells: usize, dim: usize, rng: &mut impl Rng) -> Result<StepSubspace> {
    loop {
        let vals: Vec<Vec<Exact>> = (0..dim)
            .map(|_| {
                let raw: Vec<i64> = (0..cells).map(|_| rng.gen_range(-50..=50)).collect();
                let mean = q(raw.iter().sum::<i64>(), cells as i64);
                raw.iter().map(|&v| q(v, 1) - mean.clone()).collect()
            })
            .collect();
        if let Ok(e) = StepSubspace::from_cell_values(cells, vals) {
            return Ok(e);
        }
    }
}

fn criterion_1(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(1, "isomorphism lower bound i_n = 1/(2n), n = 1..10", secs(1), || {
        let mut bad = Vec::new();
        for n in 1..=10 {
            let cells = 16 * n;
            let (b, w) = isomorphism_lower_1d(n, cells)?;
            let ok = match cfg.mode {
                Mode::Exact => b.lower_exact.as_deref() == Some(q(1, 2 * n as i64).to_json_string().as_str()),
                Mode::Float => (b.lower - 0.5 / n as f64).abs() <= cfg.float_tolerance,
            };
            if !ok || !w.identity_verified {
                bad.push(n);
            }
        }
        Ok((bad.is_empty(), format!("N = 16n, mode {}, mismatches at n = {bad:?}", cfg.mode)))
    })
}

fn criterion_2(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(2, "Bernstein upper b_n <= 1.05/(2n), 20 random subspaces per n, N = 64", secs(120), || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let search = ZigzagSearch { epsilon: 0.05, seed: cfg.seed, ..ZigzagSearch::default() };
        let mut worst: f64 = 0.0;
        let mut failures = 0;
        let mut pinned = true;
        for n in 1..=5 {
            let (iso, _) = isomorphism_lower_1d(n, 64 - 64 % (2 * n))?;
            for _ in 0..20 {
                let e = random_mean_zero_subspace(64, n, &mut rng)?;
                let (b, _) = bernstein_upper_1d(&e, &search)?;
                let target = 1.05 / (2.0 * n as f64);
                if !b.is_certified() || b.upper > target {
                    failures += 1;
                }
                worst = worst.max(b.upper * 2.0 * n as f64);
                pinned &= iso.lower <= b.upper && b.upper <= 1.05 * iso.lower + 1e-15;
            }
        }
        Ok((
            failures == 0 && pinned,
            format!("100 subspaces, {failures} uncertified, max 2n·upper = {worst:.6}, pinned within 1.05: {pinned}"),
        ))
    })
}

fn criterion_3(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(3, "Gelfand c_n >= 0.499 and a_n <= 0.5, n <= 10", secs(30), || {
        let eps = q(1, 1000);
        let mut min_rho = q(1, 2);
        for n in 1..=10usize {
            let m = (n - 1).min(4);
            for t in 0..20u64 {
                let adv = GelfandAdversary::RandomStep { cells: 256, seed: cfg.seed + 100 * n as u64 + t };
                let w = gelfand_lower_adversary(&adv.functionals(m)?, &eps)?;
                if w.rho_exact < min_rho {
                    min_rho = w.rho_exact.clone();
                }
            }
            let b = gelfand_lower(n, &eps, &default_gelfand_adversaries(256, cfg.seed))?;
            if b.lower < min_rho.to_f64_lossy() {
                min_rho = Exact::from_float(b.lower).unwrap_or_else(|| q(0, 1));
            }
            if approximation_upper(n)?.upper > 0.5 {
                return Ok((false, format!("a_{n} upper exceeds 1/2")));
            }
        }
        let ok = min_rho >= q(499, 1000);
        Ok((ok, format!("min certified rho = {} ({:.6})", min_rho.to_json_string(), min_rho.to_f64_lossy())))
    })
}

fn criterion_4(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(4, "Kolmogorov d_n in [0.249, 0.25], 2 <= n <= 5", secs(60), || {
        let mut lows = Vec::new();
        let mut uppers_ok = true;
        for n in 2..=5 {
            let up = kolmogorov_upper_1d(n, 256)?;
            uppers_ok &= up.upper_exact.as_deref() == Some("1/4");
            let lo = kolmogorov_lower_witness(n, 10, &default_kolmogorov_adversaries(cfg.seed))?;
            lows.push(lo.lower);
        }
        let min = lows.iter().copied().fold(f64::INFINITY, f64::min);
        Ok((
            uppers_ok && min >= 0.249,
            format!("upper = 1/4 exactly: {uppers_ok}; min lower over n and adversaries = {min:.6}"),
        ))
    })
}

fn criterion_5(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(5, "operator norm of V on mean-zero steps = 1/2", secs(1), || {
        let mut vals = Vec::new();
        for n in [2, 16, 256] {
            let r = operator_norm_discrete(n)?;
            let ok = match cfg.mode {
                Mode::Exact => r.value_exact == "1/2",
                Mode::Float => (r.value - 0.5).abs() <= cfg.float_tolerance,
            };
            vals.push((n, r.value_exact, ok));
        }
        let ok = vals.iter().all(|v| v.2);
        Ok((ok, format!("{:?}", vals.iter().map(|v| (v.0, v.1.clone())).collect::<Vec<_>>())))
    })
}

/// Swaps two consecutive labels of a Hilbert table.
pub fn corrupted_ordering(d: usize, k: u32) -> Result<HilbertOrdering> {
    let o = hilbert_order(d, k)?;
    let mut cubes = o.cubes().to_vec();
    let mid = cubes.len() / 2;
    cubes.swap(1, mid);
    HilbertOrdering::from_cubes(d, k, cubes)
}

fn criterion_6(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(6, "Hilbert face adjacency and prefix nesting", secs(30), || {
        let mut failed = Vec::new();
        let cases = (1..=6).map(|k| (2, k)).chain((1..=3).map(|k| (3, k)));
        for (d, k) in cases {
            let o = if cfg.corrupt_hilbert && (d, k) == (2, 3) { corrupted_ordering(d, k)? } else { hilbert_order(d, k)? };
            if !check_face_adjacency(&o).ok {
                failed.push(format!("check_face_adjacency(d={d}, k={k})"));
            }
            if !check_prefix_nesting(&o).ok {
                failed.push(format!("check_prefix_nesting(d={d}, k={k})"));
            }
        }
        let detail = if failed.is_empty() { "9 tables".to_string() } else { format!("failed: {}", failed.join(", ")) };
        Ok((failed.is_empty(), detail))
    })
}

fn criterion_7(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(7, "uniform John constants on segment domains", secs(180), || {
        let samples = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut constants = Vec::new();
        let mut checked = 0usize;
        let mut worst: f64 = 0.0;
        let mut failures = 0usize;
        for k in 3..=5u32 {
            let o = Arc::new(hilbert_order(2, k)?);
            let len = o.len();
            let pairs: Vec<(usize, usize)> = if k == 3 {
                (1..=len).flat_map(|i| (i..=len).map(move |j| (i, j))).collect()
            } else {
                (0..500)
                    .map(|_| {
                        let a = rng.gen_range(1..=len);
                        let b = rng.gen_range(1..=len);
                        (a.min(b), a.max(b))
                    })
                    .collect()
            };
            for (i, j) in pairs {
                let omega = segment_domain(o.clone(), i, j)?;
                let cert = john_bound_constructive(&omega)?;
                let v = verify_john_certificate(&omega, &cert, samples, cfg.seed ^ (i as u64 * 7919 + j as u64))?;
                if !constants.contains(&cert.constant) {
                    constants.push(cert.constant);
                }
                worst = worst.max(v.worst_ratio);
                failures += !v.passed as usize;
                checked += 1;
            }
        }
        let single = constants.len() == 1 && constants[0] == uniform_john_constant(2);
        Ok((
            single && failures == 0,
            format!(
                "{checked} domains, constants {constants:?}, worst |x-γ|/dist = {worst:.4}, {failures} failed verifications"
            ),
        ))
    })
}

fn criterion_8(_cfg: &AcceptanceConfig) -> CriterionResult {
    timed(8, "cube scaling: i_n·n^{1/2} = 1/4 and stable hat ratios, d = 2", secs(120), || {
        let params = LorentzParams::critical(2);
        let mut exact = true;
        let mut ratios = Vec::new();
        for (m, n) in [(1usize, 1usize), (2, 4), (4, 16), (8, 64)] {
            let (b, w) = isomorphism_lower_ddim(2, m, params, None, 0)?;
            exact &= b.n == n && b.lower * (n as f64).sqrt() == 0.25 && w.identity_verified;
            let h = hat_subspace_bernstein_ratio(2, m, params)?;
            ratios.push(h.lower * (n as f64).sqrt());
        }
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        Ok((exact && hi < 4.0 * lo, format!("i_n·√n exact: {exact}; hat ratio·√n in [{lo:.6}, {hi:.6}]")))
    })
}

fn criterion_9(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(9, "Bernstein chain on random 3-dim subspaces, 32×32 grid, k = 4", secs(120), || {
        let spec = GridSpec::new(2, 32)?;
        let search = ZigzagSearch { seed: cfg.seed, ..ZigzagSearch::default() };
        let mut min_slack = f64::INFINITY;
        let mut broken = Vec::new();
        for t in 0..10 {
            let e = random_grid_subspace(spec, 3, cfg.seed + t)?;
            let (_, chain) = bernstein_upper_ddim(&e, 4, &search)?;
            for l in &chain.links {
                min_slack = min_slack.min(l.rhs - l.lhs);
                if !l.holds {
                    broken.push(format!("#{t}: {}", l.name));
                }
            }
        }
        Ok((broken.is_empty(), format!("min slack {min_slack:.3e}; broken links {broken:?}")))
    })
}

fn random_level_data(rng: &mut impl Rng) -> Vec<(f64, f64)> {
    let pieces = rng.gen_range(1..12);
    (0..pieces).map(|_| (rng.gen_range(-5.0..5.0), rng.gen_range(0.0..1.0) / pieces as f64)).collect()
}

fn criterion_10(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(10, "property suites and chain consistency", secs(60), || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut notes = Vec::new();
        // superadditivity Σ‖fχ_{A_i}‖^p ≤ ‖f‖^p for q ≤ p
        let mut lorsum_ok = true;
        for _ in 0..1000 {
            let p = rng.gen_range(1.0..5.0);
            let params = LorentzParams::new(p, rng.gen_range(1.0..=p))?;
            let data = random_level_data(&mut rng);
            let parts = rng.gen_range(1..=data.len());
            let mut groups = vec![Vec::new(); parts];
            for &piece in &data {
                groups[rng.gen_range(0..parts)].push(piece);
            }
            let whole = lorentz_norm(&data, params).powf(p);
            let sum: f64 = groups.iter().map(|g| lorentz_norm(g, params).powf(p)).sum();
            lorsum_ok &= sum <= whole + 1e-9 * whole.max(1.0);
        }
        notes.push(format!("superadditivity {lorsum_ok}"));
        let mut lpp_ok = true;
        for _ in 0..1000 {
            let p = rng.gen_range(1.0..6.0);
            let data = random_level_data(&mut rng);
            let a = lorentz_norm(&data, LorentzParams::new(p, p)?);
            let b = lp_norm(&data, p);
            lpp_ok &= (a - b).abs() <= 1e-10 * b.max(f64::MIN_POSITIVE);
            let t = rng.gen_range(0.0..5.0);
            lpp_ok &= distribution_function(&data, t)? >= distribution_function(&data, t + 0.5)?;
        }
        notes.push(format!("L^(p,p) = L^p {lpp_ok}"));
        let mut osc_ok = true;
        for _ in 0..1000 {
            let cells = rng.gen_range(2..40);
            let raw: Vec<i64> = (0..cells).map(|_| rng.gen_range(-20..=20)).collect();
            let mean = q(raw.iter().sum::<i64>(), cells as i64);
            let f = StepFunction::uniform(raw.iter().map(|&v| q(v, 1) - mean.clone()).collect())?;
            let l1 = f.l1_norm();
            if l1 == q(0, 1) {
                continue;
            }
            let unit = f.scale(&(q(1, 1) / l1));
            osc_ok &= volterra_apply(&unit).oscillation() <= q(1, 2);
        }
        notes.push(format!("Volterra oscillation <= 1/2 {osc_ok}"));
        let bounds = chain_bounds(cfg)?;
        let report = snumber_axiom_suite(&bounds);
        notes.push(format!("chain over {} bounds ({} checks) {}", bounds.len(), report.checks, report.passed));
        Ok((lorsum_ok && lpp_ok && osc_ok && report.passed, notes.join("; ")))
    })
}

/// A representative set of bounds from every estimator.
pub fn chain_bounds(cfg: &AcceptanceConfig) -> Result<Vec<SNumberBound>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    let eps = q(1, 1000);
    for n in 1..=6 {
        out.push(isomorphism_lower_1d(n, 120)?.0);
        out.push(approximation_upper(n)?);
        out.push(gelfand_lower(n, &eps, &default_gelfand_adversaries(64, cfg.seed))?);
        if n >= 2 {
            out.push(kolmogorov_upper_1d(n, 64)?);
            out.push(kolmogorov_lower_witness(n, 12, &default_kolmogorov_adversaries(cfg.seed))?);
        }
        let e = random_mean_zero_subspace(32, n, &mut rng)?;
        out.push(bernstein_upper_1d(&e, &ZigzagSearch { seed: cfg.seed, ..ZigzagSearch::default() })?.0);
        if n <= 3 {
            out.push(bernstein_lower(&isomorphism_subspace(n, 12)?, cfg.seed)?.0);
        }
    }
    let params = LorentzParams::critical(2);
    for m in [1, 2, 4] {
        out.push(isomorphism_lower_ddim(2, m, params, None, cfg.seed)?.0);
        out.push(hat_subspace_bernstein_ratio(2, m, params)?);
    }
    Ok(out)
}

pub const CRITERIA: [fn(&AcceptanceConfig) -> CriterionResult; 10] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
];

pub fn run_acceptance(cfg: &AcceptanceConfig) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|c| c(cfg)).collect()
}

/// Runs the criteria with the given 1-based ids, in the given order.
pub fn run_selected(cfg: &AcceptanceConfig, ids: &[usize]) -> Vec<CriterionResult> {
    ids.iter().filter_map(|&i| CRITERIA.get(i.wrapping_sub(1))).map(|c| c(cfg)).collect()
}
