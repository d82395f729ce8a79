//! Backfilling of pre-statement mine-years and imputation of exploration
//! investment across the cohort of mines that opened after the spend.
//!
//! Tonnages are always observed inputs; only the financial lines are rebuilt.
//! Every rebuilt field leaves an [`AuditEntry`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data_model::{MarketSeries, MineDataset, MineYearRecord, Year};
use crate::error::ReconstructionError;
use crate::valuation::Rate;

/// Revenue is price (USD/t) times tonnes; money is kept in millions.
pub const USD_PER_MILLION: f64 = 1.0e6;

pub const DEFAULT_BASELINE_WINDOW: (Year, Year) = (2001, 2005);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineStats {
    /// Million USD per tonne produced.
    pub avg_unit_cost: f64,
    /// Admin/sales expense over operating cost.
    pub gav_ratio: f64,
    pub avg_nonoperating: f64,
    pub avg_fixed_asset_additions: f64,
    pub avg_dep_amort: f64,
    pub avg_net_loan_payments: f64,
    pub baseline_years: (Year, Year),
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Averages over the reported years inside `window`. Unit cost only counts
/// years with positive production; the GAV ratio only years with non-zero
/// operating cost.
pub fn compute_baseline_stats(
    records: &[MineYearRecord],
    window: (Year, Year),
) -> Result<BaselineStats, ReconstructionError> {
    let in_window: Vec<&MineYearRecord> = records
        .iter()
        .filter(|r| (window.0..=window.1).contains(&r.year))
        .collect();
    let unavailable = ReconstructionError::BaselineUnavailable {
        start: window.0,
        end: window.1,
    };
    let avg_unit_cost = mean(
        in_window
            .iter()
            .filter(|r| r.production > 0.0)
            .map(|r| r.operating_cost / r.production),
    )
    .ok_or(unavailable)?;
    if avg_unit_cost <= 0.0 || !avg_unit_cost.is_finite() {
        return Err(ReconstructionError::NonPositiveUnitCost(avg_unit_cost));
    }
    let gav_ratio = mean(
        in_window
            .iter()
            .filter(|r| r.operating_cost != 0.0)
            .map(|r| r.admin_sales_expense / r.operating_cost),
    )
    .unwrap_or(0.0);
    let avg = |f: fn(&MineYearRecord) -> f64| mean(in_window.iter().map(|r| f(r))).unwrap_or(0.0);

    Ok(BaselineStats {
        avg_unit_cost,
        gav_ratio,
        avg_nonoperating: avg(|r| r.nonoperating_result()),
        avg_fixed_asset_additions: avg(|r| r.fixed_asset_additions),
        avg_dep_amort: avg(|r| r.depreciation_amortization),
        avg_net_loan_payments: avg(|r| r.net_loan_payments),
        baseline_years: window,
    })
}

/// One line of the reconstruction audit log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub mine_id: String,
    pub year: Year,
    pub field: &'static str,
    pub rule: &'static str,
    pub inputs: String,
    pub output: f64,
}

impl fmt::Display for AuditEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} = {} [{}; {}]",
            self.mine_id, self.year, self.field, self.output, self.rule, self.inputs
        )
    }
}

/// Rebuilds the financial lines of one pre-statement year.
pub fn reconstruct_year(
    mine: &MineDataset,
    year: Year,
    market: &MarketSeries,
    baseline: &BaselineStats,
) -> Result<(MineYearRecord, Vec<AuditEntry>), ReconstructionError> {
    if year >= mine.first_reported_year {
        return Err(ReconstructionError::WouldOverwrite {
            mine_id: mine.mine_id.clone(),
            year,
            first_reported: mine.first_reported_year,
        });
    }
    let price = market
        .price(year)
        .ok_or(ReconstructionError::MissingMarketYear(year))?;
    let physical =
        mine.physical_year(year)
            .ok_or_else(|| ReconstructionError::MissingPhysical {
                mine_id: mine.mine_id.clone(),
                year,
            })?;

    let by_production = price * physical.production / USD_PER_MILLION;
    let by_exports = price * physical.exports / USD_PER_MILLION;
    let revenue = by_production.min(by_exports);
    let operating_cost = baseline.avg_unit_cost * physical.production;
    let admin_sales_expense = baseline.gav_ratio * operating_cost;
    let operating_result = revenue - operating_cost - admin_sales_expense;
    let pretax_result = operating_result + baseline.avg_nonoperating;
    let taxes_paid = match (mine.escondida_tax_rule, physical.taxes_paid) {
        (true, Some(t)) => t,
        _ => 0.0,
    };

    let record = MineYearRecord {
        year,
        revenue,
        operating_cost,
        admin_sales_expense,
        pretax_result,
        depreciation_amortization: baseline.avg_dep_amort,
        capital_paid_increase: 0.0,
        taxes_paid,
        fixed_asset_additions: baseline.avg_fixed_asset_additions,
        net_loan_payments: baseline.avg_net_loan_payments,
        production: physical.production,
        exports: physical.exports,
        reconstructed: true,
    };

    let (b0, b1) = baseline.baseline_years;
    let entry = |field, rule, inputs: String, output| AuditEntry {
        mine_id: mine.mine_id.clone(),
        year,
        field,
        rule,
        inputs,
        output,
    };
    let audit = vec![
        entry(
            "revenue",
            "min(price*production, price*exports)",
            format!(
                "price={price};production={};exports={}",
                physical.production, physical.exports
            ),
            revenue,
        ),
        entry(
            "operating_cost",
            "baseline unit cost * production",
            format!(
                "avg_unit_cost={};production={};baseline={b0}-{b1}",
                baseline.avg_unit_cost, physical.production
            ),
            operating_cost,
        ),
        entry(
            "admin_sales_expense",
            "baseline GAV ratio * operating cost",
            format!(
                "gav_ratio={};operating_cost={operating_cost}",
                baseline.gav_ratio
            ),
            admin_sales_expense,
        ),
        entry(
            "pretax_result",
            "operating result + baseline non-operating result",
            format!(
                "operating_result={operating_result};avg_nonoperating={}",
                baseline.avg_nonoperating
            ),
            pretax_result,
        ),
        entry(
            "dep_amort",
            "baseline average",
            format!("baseline={b0}-{b1}"),
            baseline.avg_dep_amort,
        ),
        entry(
            "fixed_asset_additions",
            "baseline average",
            format!("baseline={b0}-{b1}"),
            baseline.avg_fixed_asset_additions,
        ),
        entry(
            "net_loan_payments",
            "baseline average",
            format!("baseline={b0}-{b1}"),
            baseline.avg_net_loan_payments,
        ),
        entry(
            "taxes_paid",
            if taxes_paid != 0.0 || (mine.escondida_tax_rule && physical.taxes_paid.is_some()) {
                "explicit figure kept (Escondida rule)"
            } else {
                "assumed zero"
            },
            format!(
                "escondida_tax_rule={};explicit={}",
                mine.escondida_tax_rule,
                physical
                    .taxes_paid
                    .map_or("none".to_string(), |t| t.to_string())
            ),
            taxes_paid,
        ),
    ];
    Ok((record, audit))
}

/// A mine with every physical-only year rebuilt and merged with its
/// reported records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructedMine {
    pub mine_id: String,
    pub records: Vec<MineYearRecord>,
    pub baseline: Option<BaselineStats>,
    pub audit: Vec<AuditEntry>,
}

pub fn reconstruct_mine(
    mine: &MineDataset,
    market: &MarketSeries,
    baseline_window: (Year, Year),
) -> Result<ReconstructedMine, ReconstructionError> {
    let targets: Vec<Year> = mine
        .physical
        .iter()
        .map(|p| p.year)
        .filter(|&y| y < mine.first_reported_year)
        .collect();
    let mut records = mine.records.clone();
    let mut audit = Vec::new();
    let mut baseline = None;
    if !targets.is_empty() {
        let stats = compute_baseline_stats(&mine.records, baseline_window)?;
        for year in targets {
            let (record, entries) = reconstruct_year(mine, year, market, &stats)?;
            records.push(record);
            audit.extend(entries);
        }
        baseline = Some(stats);
    }
    records.sort_by_key(|r| r.year);
    Ok(ReconstructedMine {
        mine_id: mine.mine_id.clone(),
        records,
        baseline,
        audit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImputationConfig {
    /// Years whose national exploration spend is distributed.
    pub spend_window: (Year, Year),
    /// A mine is eligible for spend made 0..=N years before it opened.
    pub cohort_window_years: i32,
    /// Private share of national exploration spend.
    pub private_share: f64,
}

impl Default for ImputationConfig {
    fn default() -> Self {
        Self {
            spend_window: (1984, 1999),
            cohort_window_years: 5,
            private_share: 2.0 / 3.0,
        }
    }
}

/// One spend-year share handed to one mine, before capitalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpendAllocation {
    pub spend_year: Year,
    pub mine_id: String,
    pub amount: f64,
    /// `amount` carried forward to the mine's opening year.
    pub capitalized: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExplorationImputation {
    /// Capitalized exploration investment per mine, valued at its opening year.
    pub allocated: BTreeMap<String, f64>,
    pub allocations: Vec<SpendAllocation>,
    pub cohort_window_years: i32,
    /// Private spend summed over the spend window, uncapitalized.
    pub total_private_spend: f64,
    /// Private spend of years with no eligible mine.
    pub unallocated_spend: f64,
    pub successful_campaigns: Option<u32>,
    pub total_campaigns: Option<u32>,
    /// Total over successful campaigns, when both counts are known.
    pub probability_inverse: Option<f64>,
    pub warnings: Vec<String>,
}

impl ExplorationImputation {
    pub fn with_campaign_counts(mut self, successful: u32, total: u32) -> Self {
        self.successful_campaigns = Some(successful);
        self.total_campaigns = Some(total);
        self.probability_inverse =
            (successful > 0).then(|| f64::from(total) / f64::from(successful));
        self
    }

    /// Uncapitalized allocations of one spend year, keyed by mine.
    pub fn allocations_for_year(&self, year: Year) -> BTreeMap<&str, f64> {
        self.allocations
            .iter()
            .filter(|a| a.spend_year == year)
            .map(|a| (a.mine_id.as_str(), a.amount))
            .collect()
    }
}

/// Exploration investment of one deposit scaled by the inverse discovery
/// probability: `spend_per_deposit * total_campaigns / successful_campaigns`.
pub fn exploration_with_failures(spend_per_deposit: f64, successful: u32, total: u32) -> f64 {
    spend_per_deposit * f64::from(total) / f64::from(successful)
}

pub fn impute_exploration(
    market: &MarketSeries,
    cohort: &[MineDataset],
    r: Rate,
) -> ExplorationImputation {
    impute_exploration_with(market, cohort, r, &ImputationConfig::default())
}

/// Distributes the private share of each spend year's national exploration
/// spend over the mines opening 0..=N years later, pro rata to mean
/// production, then capitalizes each share to the mine's opening year at `r`.
pub fn impute_exploration_with(
    market: &MarketSeries,
    cohort: &[MineDataset],
    r: Rate,
    config: &ImputationConfig,
) -> ExplorationImputation {
    let mut out = ExplorationImputation {
        cohort_window_years: config.cohort_window_years,
        allocated: cohort.iter().map(|m| (m.mine_id.clone(), 0.0)).collect(),
        ..Default::default()
    };
    let means: Vec<f64> = cohort.iter().map(MineDataset::mean_production).collect();

    for t in config.spend_window.0..=config.spend_window.1 {
        let Some(entry) = market.get(t) else {
            out.warnings.push(format!(
                "exploration spend year {t} missing from market series"
            ));
            continue;
        };
        let private = config.private_share * entry.exploration_spend();
        out.total_private_spend += private;

        let eligible: Vec<usize> = cohort
            .iter()
            .enumerate()
            .filter(|(_, m)| {
                m.opening_year - config.cohort_window_years <= t && t <= m.opening_year
            })
            .map(|(i, _)| i)
            .collect();
        let weight: f64 = eligible.iter().map(|&i| means[i]).sum();
        if eligible.is_empty() || weight <= 0.0 {
            out.unallocated_spend += private;
            out.warnings.push(format!(
                "exploration spend year {t}: no eligible mine; {private} left unallocated"
            ));
            continue;
        }
        for &i in &eligible {
            let mine = &cohort[i];
            let amount = private * means[i] / weight;
            let capitalized = amount * r.growth_factor(mine.opening_year - t);
            *out.allocated.entry(mine.mine_id.clone()).or_default() += capitalized;
            out.allocations.push(SpendAllocation {
                spend_year: t,
                mine_id: mine.mine_id.clone(),
                amount,
                capitalized,
            });
        }
    }
    out
}
