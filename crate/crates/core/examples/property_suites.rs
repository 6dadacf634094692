//! Runs the randomized property batteries from library code.
//!
//! cargo run --release --example property_suites -- 20

use decometry::verify::{run_suite, Suite};

fn main() -> decometry::Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    for report in run_suite(Suite::All, samples, 2024)? {
        println!("[{}] {}", report.suite, if report.passed() { "ok" } else { "FAILED" });
        for prop in &report.properties {
            println!("  {prop}");
        }
    }
    Ok(())
}
