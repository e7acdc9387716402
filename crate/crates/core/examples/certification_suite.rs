//! Runs a small certification suite from an inline config and prints the
//! per-theorem summary. Pass `--json` for the full report.

use hhbounds::config::SuiteConfig;
use hhbounds::verify::run_suite;
use hhbounds::Result;

const SUITE: &str = "
suite_id  = example
seed      = 2024
theorems  = classic, thm3, thm4, thm5, thm6, cor2hp1
systems   = linear; exp; power(0.5,2)
functions = convex:softmax:3; perturbed:quadratic:0.005
specimens = 2
pairs     = 4
error     = measured:17
";

fn main() -> Result<()> {
    let config: SuiteConfig = SUITE.parse()?;
    let report = run_suite(&config)?;
    if std::env::args().any(|a| a == "--json") {
        println!("{}", report.to_json());
        return Ok(());
    }
    println!("{} cells, {} failures", report.summary.total_cells, report.summary.total_failures);
    for (theorem, s) in &report.summary.per_theorem {
        println!("{theorem:<14} count {:>3}  worst margin {:>12.3e}  failures {}", s.count, s.worst_margin.unwrap_or(f64::NAN), s.failures);
    }
    Ok(())
}
