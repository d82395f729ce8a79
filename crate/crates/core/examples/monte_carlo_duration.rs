//! Concession length under random copper prices, with and without a
//! voluntary revenue share paid to the state.
//!
//! cargo run --example monte_carlo_duration

use std::collections::BTreeMap;

use resource_rent::concession_sim::{
    generate_price_path, run_replications, PricePathParams, TaxPolicy,
};
use resource_rent::valuation::Rate;

fn histogram(durations: impl Iterator<Item = Option<u32>>) -> BTreeMap<String, usize> {
    let mut h = BTreeMap::new();
    for d in durations {
        let key = d.map_or_else(|| "open".to_string(), |y| format!("{y:>3}"));
        *h.entry(key).or_insert(0) += 1;
    }
    h
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PricePathParams {
        initial_price: 4000.0,
        drift: 0.01,
        volatility: 0.25,
        horizon: 60,
        seed: 42,
    };
    let first = generate_price_path(&params)?;
    println!(
        "first five prices: {:?}",
        first[..5].iter().map(|p| p.round()).collect::<Vec<_>>()
    );

    let rate = Rate::new(0.08)?;
    let plain = run_replications(2500.0, &params, 150_000.0, rate, &TaxPolicy::None, 200)?;
    let taxed = run_replications(
        2500.0,
        &params,
        150_000.0,
        rate,
        &TaxPolicy::Share { fraction: 0.2 },
        200,
    )?;

    println!("\nduration  untaxed  taxed");
    let (a, b) = (
        histogram(plain.iter().map(|r| r.duration)),
        histogram(taxed.iter().map(|r| r.duration)),
    );
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    for k in keys {
        println!(
            "{k:>8}  {:>7}  {:>5}",
            a.get(k).unwrap_or(&0),
            b.get(k).unwrap_or(&0)
        );
    }
    Ok(())
}
