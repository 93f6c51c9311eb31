use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use snum_core::acceptance::{random_mean_zero_subspace, run_acceptance, run_selected, AcceptanceConfig, CRITERIA};
use snum_core::grid::GridSpec;
use snum_core::hilbert::{check_face_adjacency, check_prefix_nesting, hilbert_order};
use snum_core::john::{john_bound_constructive, segment_domain, verify_john_certificate};
use snum_core::lorentz::LorentzParams;
use snum_core::scalar::{q, Mode};
use snum_core::snumbers::*;
use snum_core::volterra::operator_norm_discrete;
use snum_core::zigzag::ZigzagSearch;

use crate::output::{print_table, write_bounds, write_json};
use crate::{CubeArgs, Failure, HilbertArgs, JohnArgs, SelftestArgs, VolterraArgs};

type Rows = Result<Vec<SNumberBound>, Failure>;

fn parse_kinds(s: &str) -> Result<Vec<Kind>, Failure> {
    let mut kinds = Vec::new();
    for k in s.split(',').map(str::trim).filter(|k| !k.is_empty()) {
        let k = Kind::parse(k).map_err(|_| Failure::Usage(format!("unknown kind `{k}` (expected a,c,d,b,i)")))?;
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    if kinds.is_empty() {
        return Err(Failure::Usage("no kinds given".into()));
    }
    Ok(kinds)
}

/// `‖V‖ = 1/2` as the first Kolmogorov number.
fn norm_row(grid: usize) -> Result<SNumberBound, Failure> {
    let r = operator_norm_discrete(grid.max(2))?;
    let half = q(1, 2);
    Ok(SNumberBound::new(
        Kind::Kolmogorov,
        1,
        r.value,
        r.value,
        Status::Certified,
        Mode::Exact,
        Operator::Volterra,
        "‖V‖ = 1/2",
        json!({ "operator_norm": r }),
    )?
    .with_exact(Some(&half), Some(&half)))
}

fn volterra_task(a: &VolterraArgs, kind: Kind, n: usize) -> Rows {
    let seed = a.seed.wrapping_add(n as u64);
    let grid = a.grid;
    Ok(match kind {
        Kind::Isomorphism => vec![isomorphism_lower_1d(n, grid)?.0],
        Kind::Approximation => vec![approximation_upper(n)?],
        Kind::Gelfand => {
            let eps = q(1, a.gelfand_denominator);
            vec![gelfand_lower(n, &eps, &default_gelfand_adversaries(grid, seed))?]
        }
        Kind::Kolmogorov if n == 1 => vec![norm_row(grid)?],
        Kind::Kolmogorov => vec![
            kolmogorov_lower_witness(n, a.k_max, &default_kolmogorov_adversaries(seed))?,
            kolmogorov_upper_1d(n, grid)?,
        ],
        Kind::Bernstein => {
            let mut rows = Vec::new();
            if n <= EXACT_SPHERE_DIM {
                // the sphere minimum of the 2n-interval subspace does not depend on refinement
                rows.push(bernstein_lower(&isomorphism_subspace(n, 2 * n)?, seed)?.0);
            }
            if n < grid {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let e = random_mean_zero_subspace(grid, n, &mut rng)?;
                let search = ZigzagSearch { epsilon: a.epsilon, seed, ..ZigzagSearch::default() };
                rows.push(bernstein_upper_1d(&e, &search)?.0);
            }
            rows
        }
    })
}

fn to_float(mut b: SNumberBound) -> SNumberBound {
    b.mode = Mode::Float;
    b.lower_exact = None;
    b.upper_exact = None;
    b
}

fn finish(out: &std::path::Path, command: &str, config: &impl serde::Serialize, rows: Vec<SNumberBound>, log_log: bool) -> Result<(), Failure> {
    let axioms = snumber_axiom_suite(&rows);
    write_bounds(out, command, config, &rows, &axioms, log_log)?;
    print_table(&rows);
    println!("results written to {}", out.display());
    if axioms.passed {
        Ok(())
    } else {
        Err(Failure::Violation(format!("certified bounds are inconsistent:\n  {}", axioms.violations.join("\n  "))))
    }
}

pub fn volterra(a: &VolterraArgs) -> Result<(), Failure> {
    let kinds = parse_kinds(&a.kinds)?;
    if a.grid < 2 {
        return Err(Failure::Usage("--grid must be at least 2".into()));
    }
    if !(a.epsilon > 0.0) {
        return Err(Failure::Usage("--epsilon must be positive".into()));
    }
    if a.gelfand_denominator < 1 {
        return Err(Failure::Usage("--gelfand-denominator must be positive".into()));
    }
    if kinds.contains(&Kind::Isomorphism) {
        if let Some(n) = a.n.0.iter().find(|&&n| !a.grid.is_multiple_of(2 * n)) {
            return Err(Failure::Usage(format!("grid N = {} is not a multiple of 2n = {}", a.grid, 2 * n)));
        }
    }
    let tasks: Vec<(Kind, usize)> = a.n.0.iter().flat_map(|&n| kinds.iter().map(move |&k| (k, n))).collect();
    let results: Vec<Rows> = tasks.par_iter().map(|&(k, n)| volterra_task(a, k, n)).collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    if matches!(a.mode, crate::ModeArg::Float) {
        rows = rows.into_iter().map(to_float).collect();
    }
    finish(&a.out, "volterra", a, rows, false)
}

fn parse_space(s: Option<&str>, d: usize) -> Result<LorentzParams, Failure> {
    let Some(s) = s else { return Ok(LorentzParams::critical(d)) };
    let (p, q) = s
        .split_once(',')
        .ok_or_else(|| Failure::Usage(format!("--space expects `p,q`, got `{s}`")))?;
    let parse = |t: &str| -> Result<f64, Failure> {
        match t.trim() {
            "d" => Ok(d as f64),
            "inf" => Ok(f64::INFINITY),
            v => v.parse().map_err(|_| Failure::Usage(format!("bad exponent `{v}`"))),
        }
    };
    Ok(LorentzParams::new(parse(p)?, parse(q)?)?)
}

fn cube_task(a: &CubeArgs, params: LorentzParams, m: usize) -> Rows {
    let d = a.dim;
    let seed = a.seed.wrapping_add(m as u64);
    let mut rows = vec![
        isomorphism_lower_ddim(d, m, params, None, seed)?.0,
        hat_subspace_bernstein_ratio(d, m, params)?,
    ];
    let n = m.pow(d as u32);
    let side = 2usize << a.curve_order;
    let centres = 1usize << (d as u32 * a.curve_order);
    if n <= centres {
        let spec = GridSpec::new(d, side)?;
        let e = random_grid_subspace(spec, n, seed)?;
        let search = ZigzagSearch { seed, ..ZigzagSearch::default() };
        rows.push(bernstein_upper_ddim(&e, a.curve_order, &search)?.0);
    } else {
        eprintln!("note: n = {n} exceeds the {centres} curve cells at order {}; no Bernstein upper row", a.curve_order);
    }
    Ok(rows)
}

pub fn cube(a: &CubeArgs) -> Result<(), Failure> {
    if a.dim < 2 {
        return Err(Failure::Usage("--dim must be at least 2 (use `volterra` for d = 1)".into()));
    }
    if a.curve_order == 0 {
        return Err(Failure::Usage("--curve-order must be at least 1".into()));
    }
    let params = parse_space(a.space.as_deref(), a.dim)?;
    let results: Vec<Rows> = a.m.0.par_iter().map(|&m| cube_task(a, params, m)).collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    finish(&a.out, "cube", a, rows, true)
}

pub fn hilbert(a: &HilbertArgs) -> Result<(), Failure> {
    let o = hilbert_order(a.dim, a.order)?;
    println!("Hilbert ordering: d = {}, k = {}, {} cubes", a.dim, a.order, o.len());
    if let Some(out) = &a.out {
        std::fs::create_dir_all(out)?;
        std::fs::write(out.join("hilbert.csv"), o.to_csv())?;
        write_json(&out.join("hilbert.json"), &o.to_json())?;
    }
    if !a.check {
        return Ok(());
    }
    let mut failed = Vec::new();
    let adj = check_face_adjacency(&o);
    println!("check_face_adjacency: {}", if adj.ok { "ok" } else { "FAILED" });
    if !adj.ok {
        failed.push(format!("check_face_adjacency at {:?}", adj.first_violation));
    }
    let nest = check_prefix_nesting(&o);
    println!("check_prefix_nesting: {}", if nest.ok { "ok" } else { "FAILED" });
    if !nest.ok {
        failed.push(format!("check_prefix_nesting at {:?}", nest.first_violation));
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation(failed.join("; ")))
    }
}

pub fn john(a: &JohnArgs) -> Result<(), Failure> {
    let o = Arc::new(hilbert_order(a.dim, a.order)?);
    let len = o.len();
    let pairs: Vec<(usize, usize)> = if let Some(s) = &a.segment {
        let (i, j) = s
            .split_once(',')
            .and_then(|(i, j)| Some((i.trim().parse().ok()?, j.trim().parse().ok()?)))
            .ok_or_else(|| Failure::Usage(format!("--segment expects `i,j`, got `{s}`")))?;
        vec![(i, j)]
    } else if a.pairs.is_none() && len * (len + 1) / 2 <= 5000 {
        (1..=len).flat_map(|i| (i..=len).map(move |j| (i, j))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        (0..a.pairs.unwrap_or(500))
            .map(|_| {
                let (x, y) = (rng.gen_range(1..=len), rng.gen_range(1..=len));
                (x.min(y), x.max(y))
            })
            .collect()
    };
    let results: Vec<Result<serde_json::Value, Failure>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let omega = segment_domain(o.clone(), i, j)?;
            let cert = john_bound_constructive(&omega)?;
            let seed = a.seed ^ ((i as u64) << 32 | j as u64);
            let v = verify_john_certificate(&omega, &cert, a.samples, seed)?;
            Ok(json!({
                "i": i,
                "j": j,
                "blocks": cert.blocks.len(),
                "constant": cert.constant,
                "local_constant": cert.local_constant,
                "worst_ratio": v.worst_ratio,
                "evaluations": v.evaluations,
                "passed": v.passed,
            }))
        })
        .collect();
    let mut domains = Vec::new();
    for r in results {
        domains.push(r?);
    }
    let worst = domains.iter().filter_map(|d| d["worst_ratio"].as_f64()).fold(0.0, f64::max);
    let failed: Vec<String> = domains
        .iter()
        .filter(|d| d["passed"] == json!(false))
        .map(|d| format!("({}, {})", d["i"], d["j"]))
        .collect();
    let constant = domains.first().map(|d| d["constant"].clone()).unwrap_or(json!(null));
    let uniform = domains.iter().all(|d| d["constant"] == constant);
    std::fs::create_dir_all(&a.out)?;
    write_json(
        &a.out.join("john.json"),
        &json!({ "config": a, "constant": constant, "uniform": uniform, "worst_ratio": worst, "domains": domains }),
    )?;
    println!(
        "{} segment domains, John constant {constant} (uniform: {uniform}), worst observed ratio {worst:.4}",
        domains.len()
    );
    if failed.is_empty() && uniform {
        Ok(())
    } else {
        Err(Failure::Violation(format!("John certificate failed on {}", failed.join(", "))))
    }
}

pub fn selftest(a: &SelftestArgs) -> Result<(), Failure> {
    let cfg = AcceptanceConfig {
        mode: a.mode.into(),
        float_tolerance: a.tolerance,
        seed: a.seed,
        corrupt_hilbert: a.inject_fault.is_some(),
    };
    println!("selftest: mode {}, tolerance {:e}, seed {}", cfg.mode, cfg.float_tolerance, cfg.seed);
    let results = match &a.criteria {
        Some(ids) => {
            if let Some(bad) = ids.0.iter().find(|&&i| i > CRITERIA.len()) {
                return Err(Failure::Usage(format!("there is no criterion {bad}")));
            }
            run_selected(&cfg, &ids.0)
        }
        None => run_acceptance(&cfg),
    };
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| format!("{}: {}", r.id, r.detail)).collect();
    println!("{} passed, {} failed", results.len() - failed.len(), failed.len());
    if let Some(path) = &a.json {
        write_json(path, &json!({ "mode": cfg.mode, "seed": cfg.seed, "criteria": results }))?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation(failed.join("; ")))
    }
}
