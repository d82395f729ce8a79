//! Step a concession year by year, show how a voluntary payment stretches it
//! and what the state owes if it expropriates midway.
//!
//! cargo run --example concession_lifecycle

use resource_rent::concession_sim::{
    expropriate, expropriation_indemnity, step_concession, ConcessionState, Status,
};
use resource_rent::valuation::Rate;

fn run(label: &str, target: f64, rate: Rate, revenue: f64, tax: f64) {
    let mut state = ConcessionState::new(target, rate).expect("valid target");
    while state.status == Status::Active {
        state = step_concession(state, revenue, tax).expect("active");
        let e = state.log.last().expect("stepped");
        println!(
            "  {label} year {}: counted {:.2}, pv {:.4}, accrued {:.4}, owed {:.4}",
            e.year,
            e.counted_revenue,
            e.counted_pv,
            e.accrued_pv,
            expropriation_indemnity(&state).at_start
        );
    }
    println!("  {label} expired after {} years\n", state.current_year);
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rate = Rate::new(0.10)?;
    run("untaxed", 20.0, rate, 11.0, 0.0);
    run("taxed", 20.0, rate, 11.0, 5.0);

    let mut state = ConcessionState::new(100.0, rate)?;
    for _ in 0..3 {
        state = step_concession(state, 15.0, 0.0)?;
    }
    let (state, indemnity) = expropriate(state)?;
    println!(
        "expropriated in year {}: owed {:.4} at start, {:.4} at the expropriation date ({:?})",
        state.current_year, indemnity.at_start, indemnity.at_expropriation, state.status
    );
    Ok(())
}
