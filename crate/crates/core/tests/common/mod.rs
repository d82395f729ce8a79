//! Brute-force oracles used by the integration and acceptance suites.
//!
//! Nothing here calls the library's computation paths: sums are rebuilt from
//! scratch for every year and growth factors are repeated multiplications.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use resource_rent::data_model::{load_market_series, load_mine_dataset, MarketSeries, MineDataset};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/synthetic")
}

pub fn load_fixture() -> (Vec<MineDataset>, MarketSeries) {
    let dir = fixture_dir();
    let market = load_market_series(dir.join("market.csv")).unwrap();
    let mut paths: Vec<_> = std::fs::read_dir(dir.join("mines"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    let cohort = paths
        .iter()
        .map(|p| load_mine_dataset(p).unwrap().dataset)
        .collect();
    (cohort, market)
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// `(1 + r)^n` by repeated multiplication (division for negative n).
pub fn pow_loop(r: f64, n: i32) -> f64 {
    let mut f = 1.0;
    for _ in 0..n.abs() {
        f *= 1.0 + r;
    }
    if n < 0 {
        1.0 / f
    } else {
        f
    }
}

#[derive(Debug, Clone)]
pub struct OracleMine {
    pub mine_id: String,
    pub exploration: f64,
    pub investment: f64,
    /// (year, nominal cash flow)
    pub flows: Vec<(i32, f64)>,
    /// (year, rvp)
    pub rvp: Vec<(i32, f64)>,
    pub momento_x: Option<i32>,
    pub rent_pv: f64,
    pub rent_forward: f64,
}

fn avg(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Whole pipeline, recomputed naively: baseline averages, reconstructed
/// years, exploration proration and capitalization, cumulative discounted
/// sums and forward compounding.
pub fn oracle_pipeline(
    cohort: &[MineDataset],
    market: &MarketSeries,
    rate: f64,
    fund_rate: f64,
    valuation_year: i32,
) -> Vec<OracleMine> {
    // Exploration: 2/3 of GDP share, 1984..=1999, mines opening 0..5 years later.
    let mut exploration: BTreeMap<String, f64> = BTreeMap::new();
    let mean_prod = |m: &MineDataset| {
        let mut all: Vec<f64> = m.records.iter().map(|r| r.production).collect();
        all.extend(m.physical.iter().map(|p| p.production));
        avg(&all)
    };
    for t in 1984..=1999 {
        let Some(entry) = market.years.get(&t) else {
            continue;
        };
        let private = entry.gdp * entry.exploration_spend_pct_gdp * 2.0 / 3.0;
        let eligible: Vec<&MineDataset> = cohort
            .iter()
            .filter(|m| m.opening_year - 5 <= t && t <= m.opening_year)
            .collect();
        let total: f64 = eligible.iter().map(|m| mean_prod(m)).sum();
        for m in eligible {
            let share = private * mean_prod(m) / total;
            *exploration.entry(m.mine_id.clone()).or_default() +=
                share * pow_loop(rate, m.opening_year - t);
        }
    }

    cohort
        .iter()
        .map(|m| {
            let base: Vec<_> = m
                .records
                .iter()
                .filter(|r| (2001..=2005).contains(&r.year))
                .collect();
            let unit = avg(&base
                .iter()
                .filter(|r| r.production > 0.0)
                .map(|r| r.operating_cost / r.production)
                .collect::<Vec<_>>());
            let gav = avg(&base
                .iter()
                .map(|r| r.admin_sales_expense / r.operating_cost)
                .collect::<Vec<_>>());
            let nonop = avg(&base
                .iter()
                .map(|r| r.pretax_result - (r.revenue - r.operating_cost - r.admin_sales_expense))
                .collect::<Vec<_>>());
            let fa = avg(&base
                .iter()
                .map(|r| r.fixed_asset_additions)
                .collect::<Vec<_>>());
            let dep = avg(&base
                .iter()
                .map(|r| r.depreciation_amortization)
                .collect::<Vec<_>>());
            let loans = avg(&base.iter().map(|r| r.net_loan_payments).collect::<Vec<_>>());

            let mut flows: Vec<(i32, f64)> = Vec::new();
            for p in &m.physical {
                let price = market.years[&p.year].copper_price;
                let revenue = (price * p.production / 1e6).min(price * p.exports / 1e6);
                let oc = unit * p.production;
                let pretax = revenue - oc - gav * oc + nonop;
                let tax = if m.escondida_tax_rule {
                    p.taxes_paid.unwrap_or(0.0)
                } else {
                    0.0
                };
                flows.push((p.year, pretax + dep - tax - fa - loans));
            }
            for r in &m.records {
                flows.push((
                    r.year,
                    r.pretax_result + r.depreciation_amortization
                        - r.capital_paid_increase
                        - r.taxes_paid
                        - r.fixed_asset_additions
                        - r.net_loan_payments,
                ));
            }
            flows.sort_by_key(|f| f.0);

            let explo = exploration.get(&m.mine_id).copied().unwrap_or(0.0);
            let investment = m.capital_paid_first_year + explo;
            let rvp: Vec<(i32, f64)> = flows
                .iter()
                .map(|&(year, _)| {
                    let cumulative: f64 = flows
                        .iter()
                        .filter(|(y, _)| *y <= year)
                        .map(|&(y, f)| f / pow_loop(rate, y - m.opening_year))
                        .sum();
                    (year, cumulative - investment)
                })
                .collect();
            let momento_x = rvp.iter().find(|(_, v)| *v > 1e-9).map(|(y, _)| *y);
            let rent_pv = rvp.last().map_or(0.0, |(_, v)| v.max(0.0));
            let rent_forward = match momento_x {
                None => 0.0,
                Some(x) => flows
                    .iter()
                    .filter(|(y, _)| *y > x)
                    .map(|&(y, f)| f * pow_loop(fund_rate, valuation_year - y))
                    .sum(),
            };
            OracleMine {
                mine_id: m.mine_id.clone(),
                exploration: explo,
                investment,
                flows,
                rvp,
                momento_x,
                rent_pv,
                rent_forward,
            }
        })
        .collect()
}

/// Smallest VPI by enumerating the year in which the bidder's value crosses
/// its investment and solving the partial final year in closed form.
pub fn brute_force_bid(revenue: &[f64], investment: f64, announced: f64, own: f64) -> Option<f64> {
    let mut firm = 0.0;
    let mut accrued = 0.0;
    for (i, &r) in revenue.iter().enumerate() {
        let t = i as i32 + 1;
        let own_pv = r / pow_loop(own, t);
        let ann_pv = r / pow_loop(announced, t);
        if firm + own_pv >= investment && own_pv > 0.0 {
            let theta = (investment - firm) / own_pv;
            return Some(accrued + theta * ann_pv);
        }
        firm += own_pv;
        accrued += ann_pv;
    }
    None
}
