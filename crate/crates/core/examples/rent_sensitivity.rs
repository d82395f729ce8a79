//! Rent trajectories for the synthetic cohort under two discount rates, with
//! the summary table and one plot series.
//!
//! cargo run --example rent_sensitivity

use std::path::PathBuf;

use resource_rent::data_model::{load_market_series, load_mine_dataset};
use resource_rent::rent_analysis::{
    plot_data_csv, sensitivity_report, AnalysisConfig, RateScenario,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/synthetic");
    let market = load_market_series(dir.join("market.csv"))?;
    let cohort: Vec<_> = ["candela", "norte", "tesoro"]
        .iter()
        .map(|id| load_mine_dataset(dir.join(format!("mines/{id}.csv"))).map(|l| l.dataset))
        .collect::<Result<_, _>>()?;

    let scenarios = [RateScenario::base(), RateScenario::conservative()];
    let report = sensitivity_report(&cohort, &market, &scenarios, &AnalysisConfig::default())?;
    print!("{}", report.to_csv());

    for analysis in &report.analyses {
        for m in &analysis.mines {
            println!(
                "{:<8} @ {:<12} I0 {:>8.2} (capital {:.2} + exploration {:.2}), shortfall {:.2}",
                m.mine_id,
                analysis.scenario.label,
                m.investment.total,
                m.investment.extraction,
                m.investment.exploration,
                m.series.shortfall()
            );
        }
    }

    let norte = report.analyses[0]
        .mines
        .iter()
        .find(|m| m.mine_id == "norte")
        .expect("fixture mine");
    println!("\n{} trajectory at the base rate:", norte.mine_id);
    print!("{}", plot_data_csv(&norte.series));
    Ok(())
}
