mod common;

use proptest::prelude::*;

use resource_rent::concession_sim::{
    equilibrium_bid, expropriation_indemnity, run_auction, step_concession, Bid, Bidder,
    ConcessionState, Status,
};
use resource_rent::data_model::{
    parse_mine_dataset, validate_mine, write_mine_dataset, DiscountSpec, MarketSeries, MarketYear,
    MineDataset, MineYearRecord, PhysicalYear,
};
use resource_rent::reconstruction::{
    compute_baseline_stats, exploration_with_failures, impute_exploration, reconstruct_mine,
    DEFAULT_BASELINE_WINDOW,
};
use resource_rent::rent_analysis::{rvp_series, sensitivity_report, AnalysisConfig, RateScenario};
use resource_rent::valuation::{
    annual_cash_flow, discount_rate, present_value, CashFlowSeries, InitialInvestment, Rate,
};

use common::{close, load_fixture, pow_loop};

fn rate(v: f64) -> Rate {
    Rate::new(v).unwrap()
}

fn money() -> impl Strategy<Value = f64> {
    -5000.0..5000.0f64
}

fn record(year: i32) -> impl Strategy<Value = MineYearRecord> {
    (prop::array::uniform9(money()), 0.0..1.0e6f64, 0.0..1.0e6f64).prop_map(
        move |(m, production, exports)| MineYearRecord {
            year,
            revenue: m[0],
            operating_cost: m[1],
            admin_sales_expense: m[2],
            pretax_result: m[3],
            depreciation_amortization: m[4],
            capital_paid_increase: m[5],
            taxes_paid: m[6],
            fixed_asset_additions: m[7],
            net_loan_payments: m[8],
            production,
            exports,
            reconstructed: false,
        },
    )
}

fn physical(year: i32) -> impl Strategy<Value = PhysicalYear> {
    (
        0.0..1.0e6f64,
        0.0..1.0e6f64,
        prop::option::of(0.0..500.0f64),
    )
        .prop_map(move |(production, exports, taxes_paid)| PhysicalYear {
            year,
            production,
            exports,
            taxes_paid,
        })
}

/// A dataset satisfying every structural invariant.
fn mine() -> impl Strategy<Value = MineDataset> {
    (
        1984..2000i32,
        0..6i32,
        1..10i32,
        1.0..5000.0f64,
        any::<bool>(),
        "[a-z]{1,8}",
    )
        .prop_flat_map(|(opening, n_phys, n_rec, capital, rule, id)| {
            let first = opening + n_phys;
            let phys: Vec<_> = (opening..first).map(physical).collect();
            let recs: Vec<_> = (first..first + n_rec).map(record).collect();
            (phys, recs).prop_map(move |(physical, records)| MineDataset {
                mine_id: id.clone(),
                opening_year: opening,
                first_reported_year: first,
                capital_paid_first_year: capital,
                escondida_tax_rule: rule,
                records,
                physical,
            })
        })
}

/// Datasets that may break invariants: duplicate years, negative tonnage,
/// out-of-range years.
fn messy_mine() -> impl Strategy<Value = MineDataset> {
    (
        mine(),
        prop::collection::vec((1980..2016i32, -10.0..1.0e6f64), 0..6),
    )
        .prop_map(|(mut m, extra)| {
            for (year, production) in extra {
                let mut r = MineYearRecord::zeroed(year);
                r.production = production;
                r.exports = production;
                m.records.push(r);
            }
            m
        })
}

fn flows() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-500.0..500.0f64, 1..30)
}

fn nonneg_flows() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..500.0f64, 1..30)
}

fn market_for(years: std::ops::RangeInclusive<i32>, price: f64) -> MarketSeries {
    MarketSeries::new(years.map(|year| MarketYear {
        year,
        copper_price: price,
        gdp: 20_000.0 + 500.0 * f64::from(year - 1984),
        exploration_spend_pct_gdp: 0.002,
    }))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn mine_file_round_trips(m in mine()) {
        let text = write_mine_dataset(&m);
        let loaded = parse_mine_dataset(&text, "roundtrip").unwrap();
        prop_assert_eq!(loaded.dataset, m);
    }

    #[test]
    fn validation_ignores_record_order(
        (m, recs, phys) in messy_mine().prop_flat_map(|m| {
            let recs = Just(m.records.clone()).prop_shuffle();
            let phys = Just(m.physical.clone()).prop_shuffle();
            (Just(m), recs, phys)
        })
    ) {
        let shuffled = MineDataset { records: recs, physical: phys, ..m.clone() };
        prop_assert_eq!(validate_mine(&m), validate_mine(&shuffled));
    }

    #[test]
    fn discount_rate_increases_in_each_input(
        rf in 0.0..0.2f64, beta in 0.01..3.0f64, erp in 0.001..0.1f64, country in 0.0..0.1f64,
        bump in 1e-4..0.5f64,
    ) {
        let r = |a, b, c, d| discount_rate(&DiscountSpec::new(a, b, c, d).unwrap()).value();
        let base = r(rf, beta, erp, country);
        prop_assert!(r(rf + bump, beta, erp, country) > base);
        prop_assert!(r(rf, beta + bump, erp, country) > base);
        prop_assert!(r(rf, beta, erp + bump, country) > base);
        prop_assert!(r(rf, beta, erp, country + bump) > base);
    }

    #[test]
    fn annual_cash_flow_is_linear(rec in record(2003), a in -10.0..10.0f64) {
        let scaled = MineYearRecord {
            revenue: a * rec.revenue,
            operating_cost: a * rec.operating_cost,
            admin_sales_expense: a * rec.admin_sales_expense,
            pretax_result: a * rec.pretax_result,
            depreciation_amortization: a * rec.depreciation_amortization,
            capital_paid_increase: a * rec.capital_paid_increase,
            taxes_paid: a * rec.taxes_paid,
            fixed_asset_additions: a * rec.fixed_asset_additions,
            net_loan_payments: a * rec.net_loan_payments,
            ..rec
        };
        let scale = rec.money_fields_abs_sum().max(1.0) * a.abs().max(1.0);
        prop_assert!((annual_cash_flow(&scaled) - a * annual_cash_flow(&rec)).abs() <= 1e-12 * scale);
    }

    #[test]
    fn present_value_falls_with_rate(f in nonneg_flows(), r1 in 0.0..0.6f64, r2 in 0.0..0.6f64) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let s = CashFlowSeries::from_annual(1990, &f);
        let (a, b) = (present_value(&s, rate(lo)), present_value(&s, rate(hi)));
        prop_assert!(b <= a + 1e-12 * a.abs().max(1.0));
        let sum: f64 = f.iter().sum();
        prop_assert!(close(present_value(&s, rate(0.0)), sum, 1e-12));
    }

    #[test]
    fn present_value_is_additive(f in flows(), split in 0usize..30, r in 0.0..0.4f64) {
        let split = split.min(f.len());
        let all = CashFlowSeries::from_annual(1990, &f);
        let head: Vec<_> = all.flows()[..split].to_vec();
        let tail: Vec<_> = all.flows()[split..].to_vec();
        let pv_head = present_value(&CashFlowSeries::new(1990, head).unwrap(), rate(r));
        let pv_tail = present_value(&CashFlowSeries::new(1990, tail).unwrap(), rate(r));
        let total = present_value(&all, rate(r));
        let scale: f64 = f.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        prop_assert!((pv_head + pv_tail - total).abs() <= 1e-12 * scale);
    }

    #[test]
    fn rvp_matches_brute_force(f in flows(), i0 in 1.0..3000.0f64, r in 0.0..0.4f64) {
        let s = rvp_series("m", &CashFlowSeries::from_annual(1995, &f), &InitialInvestment::new(i0, 0.0).unwrap(), rate(r));
        prop_assert_eq!(s.points.len(), f.len());
        for (k, p) in s.points.iter().enumerate() {
            let mut cumulative = 0.0;
            for (j, x) in f.iter().enumerate().take(k + 1) {
                cumulative += x / pow_loop(r, j as i32 + 1);
            }
            let scale = f.iter().map(|x| x.abs()).sum::<f64>() + i0;
            prop_assert!((p.rvp - (cumulative - i0)).abs() <= 1e-9 * scale);
        }
        let first = s.points.iter().find(|p| p.rvp > 1e-9).map(|p| p.year);
        prop_assert_eq!(s.momento_x, first);
    }

    #[test]
    fn rvp_steps_are_discounted_flows(f in flows(), i0 in 1.0..3000.0f64, r in 0.0..0.4f64) {
        let series = CashFlowSeries::from_annual(1995, &f);
        let s = rvp_series("m", &series, &InitialInvestment::new(i0, 0.0).unwrap(), rate(r));
        let discounted: Vec<f64> = series.discounted(rate(r)).map(|(_, v)| v).collect();
        let mut prev = -i0;
        for (p, d) in s.points.iter().zip(&discounted) {
            prop_assert!(close(p.rvp - prev, *d, 1e-9));
            prev = p.rvp;
        }
    }

    #[test]
    fn rent_pv_reconciles_with_present_value(f in flows(), i0 in 1.0..3000.0f64, r in 0.0..0.4f64) {
        let series = CashFlowSeries::from_annual(1995, &f);
        let s = rvp_series("m", &series, &InitialInvestment::new(i0, 0.0).unwrap(), rate(r));
        let last = s.final_rvp().unwrap();
        prop_assert!(s.rent_pv >= 0.0);
        prop_assert_eq!(s.rent_pv, last.max(0.0));
        let net = present_value(&series, rate(r)) - i0;
        prop_assert!(close(s.rent_pv - s.shortfall(), net, 1e-9));
    }

    #[test]
    fn later_flows_lower_rvp(f in prop::collection::vec(0.01..500.0f64, 1..29), i0 in 1.0..3000.0f64, r in 0.001..0.4f64) {
        let inv = InitialInvestment::new(i0, 0.0).unwrap();
        let now = rvp_series("m", &CashFlowSeries::from_annual(1995, &f), &inv, rate(r));
        let shifted: Vec<(i32, f64)> = f.iter().enumerate().map(|(i, x)| (1997 + i as i32, *x)).collect();
        let later = rvp_series("m", &CashFlowSeries::new(1995, shifted).unwrap(), &inv, rate(r));
        for p in &later.points {
            let earlier = now.points.iter().find(|q| q.year == p.year).map_or_else(
                || now.points.last().unwrap().rvp,
                |q| q.rvp,
            );
            prop_assert!(p.rvp <= earlier + 1e-9 * earlier.abs().max(1.0));
        }
    }

    #[test]
    fn reconstructed_revenue_is_capped(
        price in 500.0..9000.0f64,
        tonnage in prop::collection::vec((0.0..1.0e6f64, 0.0..1.0e6f64), 1..6),
        base in prop::collection::vec((1000.0..3000.0f64, 200.0..800.0f64, 1.0e5..1.0e6f64), 5),
    ) {
        let opening = 2001 - tonnage.len() as i32;
        let physical = tonnage.iter().enumerate().map(|(i, &(production, exports))| PhysicalYear {
            year: opening + i as i32, production, exports, taxes_paid: None,
        }).collect();
        let records = base.iter().enumerate().map(|(i, &(revenue, cost, production))| MineYearRecord {
            revenue,
            operating_cost: cost,
            admin_sales_expense: 0.05 * cost,
            pretax_result: revenue - 1.05 * cost + 3.0,
            production,
            exports: production,
            ..MineYearRecord::zeroed(2001 + i as i32)
        }).collect();
        let m = MineDataset {
            mine_id: "m".into(),
            opening_year: opening,
            first_reported_year: 2001,
            capital_paid_first_year: 100.0,
            escondida_tax_rule: false,
            records,
            physical,
        };
        let market = market_for(1984..=2012, price);
        let rebuilt = reconstruct_mine(&m, &market, DEFAULT_BASELINE_WINDOW).unwrap();
        for r in rebuilt.records.iter().filter(|r| r.reconstructed) {
            prop_assert!(r.revenue <= price * r.production / 1e6 + 1e-9);
            prop_assert!(r.revenue <= price * r.exports / 1e6 + 1e-9);
            prop_assert_eq!(r.capital_paid_increase, 0.0);
            prop_assert_eq!(r.taxes_paid, 0.0);
        }
        let stats = compute_baseline_stats(&m.records, DEFAULT_BASELINE_WINDOW).unwrap();
        prop_assert!(stats.avg_unit_cost > 0.0);
    }

    #[test]
    fn doubling_production_keeps_allocations(
        openings in prop::collection::vec((1984..2000i32, 1.0e4..1.0e6f64), 1..6),
        r in 0.0..0.3f64,
    ) {
        let cohort: Vec<MineDataset> = openings.iter().enumerate().map(|(i, &(opening, production))| MineDataset {
            mine_id: format!("m{i}"),
            opening_year: opening,
            first_reported_year: opening,
            capital_paid_first_year: 10.0,
            escondida_tax_rule: false,
            records: vec![MineYearRecord { production, exports: production, ..MineYearRecord::zeroed(opening) }],
            physical: vec![],
        }).collect();
        let doubled: Vec<MineDataset> = cohort.iter().map(|m| MineDataset {
            records: m.records.iter().map(|r| MineYearRecord { production: 2.0 * r.production, ..*r }).collect(),
            ..m.clone()
        }).collect();
        let market = market_for(1984..=2012, 1500.0);
        let a = impute_exploration(&market, &cohort, rate(r));
        let b = impute_exploration(&market, &doubled, rate(r));
        for (id, v) in &a.allocated {
            prop_assert!(close(*v, b.allocated[id], 1e-9));
        }
        let spent: f64 = a.allocations.iter().map(|s| s.amount).sum();
        prop_assert!(close(spent + a.unallocated_spend, a.total_private_spend, 1e-9));
    }

    #[test]
    fn campaign_equivalence_chain(per_campaign in 0.1..100.0f64, n in 1u32..20, extra in 0u32..40) {
        let total_campaigns = n + extra;
        // Allocating total cohort spend over successful deposits...
        let cohort_total = per_campaign * f64::from(total_campaigns);
        let per_deposit_total = cohort_total / f64::from(n);
        // ...equals the per-deposit spend grossed up by T/n.
        let chained = exploration_with_failures(per_campaign, n, total_campaigns);
        prop_assert!(close(per_deposit_total, chained, 1e-9));
    }

    #[test]
    fn concession_overshoot_and_telescoping(
        revenue in prop::collection::vec(0.0..50.0f64, 1..40),
        target in 1.0..300.0f64,
        r in 0.0..0.3f64,
    ) {
        let mut st = ConcessionState::new(target, rate(r)).unwrap();
        let mut last_indemnity = expropriation_indemnity(&st).at_start;
        prop_assert_eq!(last_indemnity, target);
        let mut counted = 0.0;
        for &g in &revenue {
            if st.status != Status::Active { break; }
            let before = st.accrued_pv;
            st = step_concession(st, g, 0.0).unwrap();
            let entry = *st.log.last().unwrap();
            prop_assert!(st.accrued_pv >= before);
            counted += entry.counted_pv;
            if st.status == Status::Active {
                let ind = expropriation_indemnity(&st).at_start;
                prop_assert!(close(ind, target - counted, 1e-12));
                prop_assert!(ind <= last_indemnity);
                last_indemnity = ind;
            } else {
                prop_assert!(st.accrued_pv >= target);
                prop_assert!(st.accrued_pv < target + entry.counted_pv);
            }
        }
    }

    #[test]
    fn padding_reported_costs_leaves_bid_unchanged(
        path in prop::collection::vec(1.0..100.0f64, 3..25),
        frac in 0.05..0.9f64,
        announced in 0.0..0.2f64,
        own in 0.0..0.2f64,
        padding in prop::collection::vec(0.0..1.0e4f64, 0..25),
    ) {
        let own_pv: f64 = path.iter().enumerate().map(|(i, x)| x / (1.0 + own).powi(i as i32 + 1)).sum();
        let ann_pv: f64 = path.iter().enumerate().map(|(i, x)| x / (1.0 + announced).powi(i as i32 + 1)).sum();
        let bidder = Bidder {
            id: "b".into(),
            investment: frac * own_pv.min(ann_pv),
            cost_of_capital: rate(own),
            expected_revenue: path,
            reported_operating_costs: vec![],
        };
        let padded = Bidder { reported_operating_costs: padding, ..bidder.clone() };
        prop_assert_eq!(
            equilibrium_bid(&bidder, rate(announced)).unwrap(),
            equilibrium_bid(&padded, rate(announced)).unwrap()
        );
    }

    #[test]
    fn cheapest_bidder_wins(
        path in prop::collection::vec(1.0..100.0f64, 3..25),
        fracs in prop::collection::vec(0.05..0.9f64, 2..6),
        r in 0.0..0.2f64,
    ) {
        let pv: f64 = path.iter().enumerate().map(|(i, x)| x / (1.0 + r).powi(i as i32 + 1)).sum();
        let bids: Vec<Bid> = fracs.iter().enumerate().map(|(i, f)| {
            let b = Bidder {
                id: format!("b{i}"),
                investment: f * pv,
                cost_of_capital: rate(r),
                expected_revenue: path.clone(),
                reported_operating_costs: vec![],
            };
            Bid { bidder_id: b.id.clone(), vpi: equilibrium_bid(&b, rate(r)).unwrap().vpi }
        }).collect();
        let outcome = run_auction(&bids).unwrap();
        let min = fracs.iter().cloned().fold(f64::INFINITY, f64::min);
        let winner: usize = outcome.winner.trim_start_matches('b').parse().unwrap();
        prop_assert!(fracs[winner] <= min * (1.0 + 1e-9));
    }
}

trait AbsSum {
    fn money_fields_abs_sum(&self) -> f64;
}

impl AbsSum for MineYearRecord {
    fn money_fields_abs_sum(&self) -> f64 {
        [
            self.pretax_result,
            self.depreciation_amortization,
            self.capital_paid_increase,
            self.taxes_paid,
            self.fixed_asset_additions,
            self.net_loan_payments,
        ]
        .iter()
        .map(|v| v.abs())
        .sum()
    }
}

#[test]
fn stricter_rate_never_brings_momento_x_forward() {
    let (cohort, market) = load_fixture();
    let report = sensitivity_report(
        &cohort,
        &market,
        &[RateScenario::base(), RateScenario::conservative()],
        &AnalysisConfig::default(),
    )
    .unwrap();
    for row in &report.rows {
        let base = row.columns[0]
            .momento_x
            .expect("fixture pays back at the base rate");
        if let Some(cons) = row.columns[1].momento_x {
            assert!(cons >= base, "{}: {cons} < {base}", row.mine_id);
        }
    }
}

#[test]
fn identical_specs_give_identical_columns() {
    let (cohort, market) = load_fixture();
    let report = sensitivity_report(
        &cohort,
        &market,
        &[
            RateScenario::base(),
            RateScenario::from_spec("again", DiscountSpec::base()),
        ],
        &AnalysisConfig::default(),
    )
    .unwrap();
    for row in &report.rows {
        let (a, b) = (&row.columns[0], &row.columns[1]);
        assert_eq!(
            (a.momento_x, a.rent_pv, a.rent_forward),
            (b.momento_x, b.rent_pv, b.rent_forward)
        );
    }
}
