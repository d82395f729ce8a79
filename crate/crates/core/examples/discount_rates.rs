//! Cost of capital from risk-free rate, beta, equity premium and country risk.
//!
//! cargo run --example discount_rates

use resource_rent::data_model::DiscountSpec;
use resource_rent::valuation::discount_rate;

fn main() {
    for name in ["base", "conservative"] {
        let spec = DiscountSpec::preset(name).expect("shipped preset");
        let r = discount_rate(&spec);
        println!(
            "{name:>12}: rf {:.4} + beta {:.2} x erp {:.5} + country {:.4} = {:.5}",
            spec.risk_free,
            spec.beta,
            spec.equity_premium,
            spec.country_risk,
            r.value()
        );
    }

    let custom = DiscountSpec::new(0.045, 1.2, 0.05, 0.02).expect("nonnegative inputs");
    println!("{:>12}: {:.5}", "custom", discount_rate(&custom).value());

    match DiscountSpec::new(0.05, -1.0, 0.05, 0.0) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
}
