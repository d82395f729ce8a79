//! Spread national exploration spend over the mines that opened shortly
//! after it, then capitalize each share to the opening year.
//!
//! cargo run --example exploration_imputation

use std::path::PathBuf;

use resource_rent::data_model::{load_market_series, load_mine_dataset};
use resource_rent::reconstruction::{exploration_with_failures, impute_exploration};
use resource_rent::valuation::Rate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/synthetic");
    let market = load_market_series(dir.join("market.csv"))?;
    let cohort: Vec<_> = ["candela", "norte", "tesoro"]
        .iter()
        .map(|id| load_mine_dataset(dir.join(format!("mines/{id}.csv"))).map(|l| l.dataset))
        .collect::<Result<_, _>>()?;

    let imputation = impute_exploration(&market, &cohort, Rate::new(0.1216899)?);
    println!(
        "private spend 1984-1999: {:.2}",
        imputation.total_private_spend
    );
    println!(
        "dropped (no eligible mine): {:.2}",
        imputation.unallocated_spend
    );
    for (mine, value) in &imputation.allocated {
        println!("  {mine:<8} capitalized exploration {value:>9.2}");
    }
    for w in &imputation.warnings {
        println!("  warning: {w}");
    }

    println!("\nspend year 1988 split:");
    for (mine, amount) in imputation.allocations_for_year(1988) {
        println!("  {mine:<8} {amount:.3}");
    }

    // Two successful deposits out of five campaigns at 12 each.
    println!(
        "\nwith failed campaigns: {}",
        exploration_with_failures(12.0, 2, 5)
    );
    Ok(())
}
