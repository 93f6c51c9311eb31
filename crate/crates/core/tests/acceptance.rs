use snum_core::acceptance::{run_acceptance, AcceptanceConfig};

fn main() {
    let results = run_acceptance(&AcceptanceConfig::default());
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
