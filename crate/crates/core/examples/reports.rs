//! Running commands through the report layer: canonical JSON, CSV rows and
//! the comparison hash that ignores wall time.

use egeom::cli::run_with_threads;
use egeom::config::Budget;
use egeom::report::{serialize_report, Format};
use serde_json::json;

fn main() -> egeom::Result<()> {
    let params = json!({"n": 4, "samples": 5, "seed": 3});
    let one = run_with_threads("haar-gme", &params, Budget::default(), Some(1))?;
    let many = run_with_threads("haar-gme", &params, Budget::default(), Some(4))?;
    println!("hash with 1 thread : {}", one.comparison_hash);
    println!("hash with 4 threads: {}", many.comparison_hash);

    let csv = serialize_report(&one, Format::Csv)?;
    print!("\n{}", String::from_utf8_lossy(&csv));

    let threshold = run_with_threads("theorem2-threshold", &json!({"n": 11}), Budget::default(), None)?;
    println!("\n{}", String::from_utf8_lossy(&serialize_report(&threshold, Format::Json)?));
    Ok(())
}
