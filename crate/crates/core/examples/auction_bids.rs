//! Equilibrium bids for three firms facing the same revenue path, and the
//! auction that follows.
//!
//! cargo run --example auction_bids

use resource_rent::concession_sim::{auction_from_bidders, equilibrium_bid, Bidder};
use resource_rent::valuation::Rate;

fn bidder(id: &str, investment: f64, own: f64, revenue: &[f64]) -> Bidder {
    Bidder {
        id: id.into(),
        investment,
        cost_of_capital: Rate::new(own).expect("rate"),
        expected_revenue: revenue.to_vec(),
        reported_operating_costs: vec![],
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let revenue = vec![180.0; 25];
    let announced = Rate::new(0.12)?;
    let bidders = [
        bidder("efficient", 900.0, 0.12, &revenue),
        bidder("inefficient", 1100.0, 0.12, &revenue),
        bidder("risky", 900.0, 0.15, &revenue),
    ];

    let report = auction_from_bidders(&bidders, announced)?;
    for b in &report.bidders {
        match b.bid {
            Some(bid) => println!(
                "{:<12} bids {:>9.3}, expects to stop in year {}",
                b.bidder_id, bid.vpi, bid.expected_stop_year
            ),
            None => println!(
                "{:<12} cannot bid: {}",
                b.bidder_id,
                b.error.as_deref().unwrap_or("")
            ),
        }
    }
    println!(
        "winner: {} at {:.3}",
        report.outcome.winner, report.outcome.vpi
    );

    // Reported operating costs play no part in the bid.
    let padded = Bidder {
        reported_operating_costs: vec![500.0; 25],
        ..bidders[0].clone()
    };
    assert_eq!(
        equilibrium_bid(&bidders[0], announced)?,
        equilibrium_bid(&padded, announced)?
    );
    println!("padding costs leaves the efficient bid unchanged");
    Ok(())
}
