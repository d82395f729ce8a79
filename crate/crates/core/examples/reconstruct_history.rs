//! Backfill the years before a mine's first audited statement and print the
//! audit trail for one of them.
//!
//! cargo run --example reconstruct_history

use std::path::PathBuf;

use resource_rent::data_model::{load_market_series, load_mine_dataset};
use resource_rent::reconstruction::{reconstruct_mine, DEFAULT_BASELINE_WINDOW};
use resource_rent::valuation::annual_cash_flow;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/synthetic");
    let market = load_market_series(dir.join("market.csv"))?;
    let mine = load_mine_dataset(dir.join("mines/norte.csv"))?.dataset;

    let rebuilt = reconstruct_mine(&mine, &market, DEFAULT_BASELINE_WINDOW)?;
    let stats = rebuilt.baseline.expect("norte has physical-only years");
    println!(
        "baseline {:?}: unit cost {:.3e} M USD/t, admin ratio {:.4}, non-operating {:.3}",
        stats.baseline_years, stats.avg_unit_cost, stats.gav_ratio, stats.avg_nonoperating
    );

    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "year", "revenue", "op cost", "pretax", "flow"
    );
    for r in &rebuilt.records {
        println!(
            "{:>6} {:>10.2} {:>10.2} {:>10.2} {:>10.2}{}",
            r.year,
            r.revenue,
            r.operating_cost,
            r.pretax_result,
            annual_cash_flow(r),
            if r.reconstructed { "  *" } else { "" }
        );
    }

    println!("\naudit for {}:", mine.opening_year);
    for entry in rebuilt.audit.iter().filter(|e| e.year == mine.opening_year) {
        println!(
            "  {:<22} {:>10.3}  {}",
            entry.field, entry.output, entry.inputs
        );
    }
    Ok(())
}
