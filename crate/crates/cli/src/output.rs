//! Result files. `results.json` is canonical; `summary.csv` and the plot
//! data are projections of it.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use snum_core::snumbers::{AxiomReport, SNumberBound, Scope};

use crate::Failure;

fn fmt_bound(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

fn witness_file(b: &SNumberBound, i: usize) -> String {
    format!("witnesses/{:02}_{}_{}.json", i, b.kind.symbol(), b.n)
}

pub fn write_json(path: &Path, v: &Value) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Internal(e.to_string()))?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

/// Writes `results.json`, `summary.csv`, one witness file per row and `plot.dat`.
pub fn write_bounds(
    out: &Path,
    command: &str,
    config: &impl Serialize,
    rows: &[SNumberBound],
    axioms: &AxiomReport,
    log_log: bool,
) -> Result<(), Failure> {
    fs::create_dir_all(out.join("witnesses"))?;
    let mut json_rows = Vec::new();
    let mut csv = csv::Writer::from_path(out.join("summary.csv")).map_err(|e| Failure::Internal(e.to_string()))?;
    csv.write_record(["kind", "n", "lower", "upper", "status", "witness_path"])
        .map_err(|e| Failure::Internal(e.to_string()))?;
    for (i, b) in rows.iter().enumerate() {
        let path = witness_file(b, i);
        write_json(&out.join(&path), &b.witness)?;
        let mut row = serde_json::to_value(b).map_err(|e| Failure::Internal(e.to_string()))?;
        if let Value::Object(m) = &mut row {
            m.remove("witness");
            m.insert("witness_path".into(), json!(path));
        }
        json_rows.push(row);
        csv.write_record([
            b.kind.symbol().to_string(),
            b.n.to_string(),
            b.lower_exact.clone().unwrap_or_else(|| fmt_bound(b.lower)),
            b.upper_exact.clone().unwrap_or_else(|| fmt_bound(b.upper)),
            b.status.to_string(),
            path,
        ])
        .map_err(|e| Failure::Internal(e.to_string()))?;
    }
    csv.flush()?;
    let doc = json!({
        "command": command,
        "config": config,
        "rows": json_rows,
        "axioms": axioms,
    });
    write_json(&out.join("results.json"), &doc)?;

    let mut plot = String::from(if log_log {
        "# kind n log_n lower upper log_lower log_upper\n"
    } else {
        "# kind n lower upper\n"
    });
    for b in rows {
        if log_log {
            let ln = |v: f64| if v > 0.0 && v.is_finite() { format!("{}", v.ln()) } else { "nan".into() };
            plot += &format!(
                "{} {} {} {} {} {} {}\n",
                b.kind.symbol(),
                b.n,
                (b.n as f64).ln(),
                fmt_bound(b.lower),
                fmt_bound(b.upper),
                ln(b.lower),
                ln(b.upper)
            );
        } else {
            plot += &format!("{} {} {} {}\n", b.kind.symbol(), b.n, fmt_bound(b.lower), fmt_bound(b.upper));
        }
    }
    fs::write(out.join("plot.dat"), plot)?;
    Ok(())
}

pub fn print_table(rows: &[SNumberBound]) {
    println!("{:<4} {:>4} {:>22} {:>22}  {:<12} {:<8} anchor", "kind", "n", "lower", "upper", "status", "scope");
    for b in rows {
        let lo = b.lower_exact.clone().unwrap_or_else(|| fmt_bound(b.lower));
        let up = b.upper_exact.clone().unwrap_or_else(|| fmt_bound(b.upper));
        let scope = match b.scope {
            Scope::Operator => "operator",
            Scope::Subspace => "subspace",
        };
        println!("{:<4} {:>4} {:>22} {:>22}  {:<12} {:<8} {}", b.kind.symbol(), b.n, lo, up, b.status.to_string(), scope, b.anchor);
    }
}
