//! Load a mine file and the market series, then run validation.
//!
//! cargo run --example ingest_validate

use std::path::PathBuf;

use resource_rent::data_model::{load_market_series, load_mine_dataset, validate_dataset};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/synthetic");
    let market = load_market_series(dir.join("market.csv"))?;
    let (first, last) = market.span().expect("non-empty market");
    println!("market {first}..={last}, fund rate {}", market.fund_rate);

    let loaded = load_mine_dataset(dir.join("mines/norte.csv"))?;
    let mine = &loaded.dataset;
    println!(
        "{}: opened {}, statements from {}, {} reported years, {} physical-only years",
        mine.mine_id,
        mine.opening_year,
        mine.first_reported_year,
        mine.records.len(),
        mine.physical.len()
    );

    let report = validate_dataset(mine, &market);
    println!(
        "errors: {}, warnings: {}",
        report.errors.len(),
        report.warnings.len()
    );

    let mut broken = mine.clone();
    broken.records[0].production = -5.0;
    for issue in validate_dataset(&broken, &market).errors {
        println!("  {issue}");
    }
    Ok(())
}
