//! Present-value rent trajectories.
//!
//! For each year the trajectory holds the cumulative discounted cash flow
//! since opening less the initial investment. The first year it turns strictly
//! positive ("momento x") is when the investment has been repaid in present
//! value; everything after it is rent kept by the operator.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data_model::{DiscountSpec, MarketSeries, MineDataset, Year};
use crate::error::{Error, ValuationError};
use crate::reconstruction::{
    impute_exploration_with, reconstruct_mine, AuditEntry, ImputationConfig, ReconstructedMine,
    DEFAULT_BASELINE_WINDOW,
};
use crate::valuation::{
    discount_rate, initial_investment, CashFlowSeries, InitialInvestment, Rate,
};

/// Payback must exceed zero by more than this (million USD) to count.
pub const MOMENTO_X_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_VALUATION_YEAR: Year = 2012;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RvpPoint {
    pub year: Year,
    pub rvp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RvpSeries {
    pub mine_id: String,
    pub rate: Rate,
    pub initial_investment: f64,
    pub points: Vec<RvpPoint>,
    pub momento_x: Option<Year>,
    /// Final rent in present value at the mine's opening year, floored at 0.
    pub rent_pv: f64,
    /// Nominal post-payback flows compounded to `valuation_year`.
    pub rent_forward: f64,
    pub valuation_year: Year,
}

impl RvpSeries {
    pub fn final_rvp(&self) -> Option<f64> {
        self.points.last().map(|p| p.rvp)
    }

    /// How far the final trajectory value falls short of zero (0 if it does not).
    pub fn shortfall(&self) -> f64 {
        self.final_rvp().map_or(0.0, |v| (-v).max(0.0))
    }
}

/// Builds the trajectory and detects momento x. `rent_forward` is left at
/// zero; see [`rent_forward_value`].
pub fn rvp_series(
    mine_id: &str,
    flows: &CashFlowSeries,
    investment: &InitialInvestment,
    r: Rate,
) -> RvpSeries {
    let mut cumulative = 0.0;
    let points: Vec<RvpPoint> = flows
        .discounted(r)
        .map(|(year, pv)| {
            cumulative += pv;
            RvpPoint {
                year,
                rvp: cumulative - investment.total,
            }
        })
        .collect();
    let momento = first_positive(&points);
    let rent_pv = points.last().map_or(0.0, |p| p.rvp.max(0.0));
    RvpSeries {
        mine_id: mine_id.to_string(),
        rate: r,
        initial_investment: investment.total,
        points,
        momento_x: momento,
        rent_pv,
        rent_forward: 0.0,
        valuation_year: DEFAULT_VALUATION_YEAR,
    }
}

fn first_positive(points: &[RvpPoint]) -> Option<Year> {
    points
        .iter()
        .find(|p| p.rvp > MOMENTO_X_TOLERANCE)
        .map(|p| p.year)
}

/// First year the trajectory is strictly positive; exact payback does not count.
pub fn momento_x(series: &RvpSeries) -> Option<Year> {
    first_positive(&series.points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardValue {
    pub value: f64,
    pub note: Option<String>,
}

/// Nominal flows strictly after `x`, compounded at the fund rate to the
/// valuation year. When `x` is the final flow year nothing is compounded.
pub fn rent_forward_value(
    flows: &CashFlowSeries,
    x: Option<Year>,
    fund_rate: Rate,
    valuation_year: Year,
) -> Result<ForwardValue, ValuationError> {
    if let Some(last) = flows.last_year() {
        if valuation_year < last {
            return Err(ValuationError::ValuationBeforeLastFlow {
                valuation_year,
                last_flow_year: last,
            });
        }
    }
    let Some(x) = x else {
        return Ok(ForwardValue {
            value: 0.0,
            note: Some("no rent appropriated".to_string()),
        });
    };
    let value = flows
        .flows()
        .iter()
        .filter(|(year, _)| *year > x)
        .map(|&(year, flow)| flow * fund_rate.growth_factor(valuation_year - year))
        .sum();
    let note = (flows.last_year() == Some(x))
        .then(|| "payback in final year; no later flows to value".to_string());
    Ok(ForwardValue { value, note })
}

/// A labelled discount rate, e.g. `base` at 12.169%.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateScenario {
    pub label: String,
    pub rate: Rate,
    pub spec: Option<DiscountSpec>,
}

impl RateScenario {
    pub fn from_spec(label: impl Into<String>, spec: DiscountSpec) -> Self {
        Self {
            label: label.into(),
            rate: discount_rate(&spec),
            spec: Some(spec),
        }
    }

    pub fn literal(label: impl Into<String>, rate: Rate) -> Self {
        Self {
            label: label.into(),
            rate,
            spec: None,
        }
    }

    pub fn base() -> Self {
        Self::from_spec("base", DiscountSpec::base())
    }

    pub fn conservative() -> Self {
        Self::from_spec("conservative", DiscountSpec::conservative())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub valuation_year: Year,
    pub baseline_window: (Year, Year),
    pub imputation: ImputationConfig,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            valuation_year: DEFAULT_VALUATION_YEAR,
            baseline_window: DEFAULT_BASELINE_WINDOW,
            imputation: ImputationConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MineAnalysis {
    pub mine_id: String,
    pub investment: InitialInvestment,
    pub flows: CashFlowSeries,
    pub series: RvpSeries,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohortAnalysis {
    pub scenario: RateScenario,
    pub mines: Vec<MineAnalysis>,
    pub warnings: Vec<String>,
}

/// Rebuilds every mine's missing years. Independent of the discount rate.
pub fn reconstruct_cohort(
    cohort: &[MineDataset],
    market: &MarketSeries,
    config: &AnalysisConfig,
) -> Result<Vec<ReconstructedMine>, Error> {
    cohort
        .iter()
        .map(|m| reconstruct_mine(m, market, config.baseline_window).map_err(Error::from))
        .collect()
}

/// Runs exploration imputation, initial investment, the trajectory and the
/// forward value for every mine under one rate.
pub fn analyze_cohort(
    cohort: &[MineDataset],
    rebuilt: &[ReconstructedMine],
    market: &MarketSeries,
    scenario: &RateScenario,
    config: &AnalysisConfig,
) -> Result<CohortAnalysis, Error> {
    let exploration = impute_exploration_with(market, cohort, scenario.rate, &config.imputation);
    let fund_rate = Rate::new(market.fund_rate)?;
    let mut warnings = exploration.warnings.clone();
    let mut mines = Vec::with_capacity(cohort.len());
    for (mine, rebuilt) in cohort.iter().zip(rebuilt) {
        let (investment, warn) = initial_investment(mine, &exploration)?;
        warnings.extend(warn);
        let flows = CashFlowSeries::from_records(mine.opening_year, &rebuilt.records)?;
        let mut series = rvp_series(&mine.mine_id, &flows, &investment, scenario.rate);
        let forward =
            rent_forward_value(&flows, series.momento_x, fund_rate, config.valuation_year)?;
        series.rent_forward = forward.value;
        series.valuation_year = config.valuation_year;
        mines.push(MineAnalysis {
            mine_id: mine.mine_id.clone(),
            investment,
            flows,
            series,
            notes: forward.note.into_iter().collect(),
        });
    }
    Ok(CohortAnalysis {
        scenario: scenario.clone(),
        mines,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateColumns {
    pub label: String,
    pub rate: f64,
    pub momento_x: Option<Year>,
    pub rent_pv: f64,
    pub rent_forward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub mine_id: String,
    pub columns: Vec<RateColumns>,
}

/// Momento x, rent at opening-year PV and rent at the valuation year, side by
/// side for each rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub valuation_year: Year,
    pub rows: Vec<SummaryRow>,
    pub analyses: Vec<CohortAnalysis>,
    pub audit: Vec<AuditEntry>,
}

/// Full pipeline under each scenario. Two scenarios give the usual
/// base/stressed comparison; any non-empty list works.
pub fn sensitivity_report(
    cohort: &[MineDataset],
    market: &MarketSeries,
    scenarios: &[RateScenario],
    config: &AnalysisConfig,
) -> Result<SensitivityReport, Error> {
    let rebuilt = reconstruct_cohort(cohort, market, config)?;
    let analyses = scenarios
        .iter()
        .map(|s| analyze_cohort(cohort, &rebuilt, market, s, config))
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows: BTreeMap<usize, SummaryRow> = BTreeMap::new();
    for analysis in &analyses {
        for (i, m) in analysis.mines.iter().enumerate() {
            rows.entry(i)
                .or_insert_with(|| SummaryRow {
                    mine_id: m.mine_id.clone(),
                    columns: Vec::new(),
                })
                .columns
                .push(RateColumns {
                    label: analysis.scenario.label.clone(),
                    rate: analysis.scenario.rate.value(),
                    momento_x: m.series.momento_x,
                    rent_pv: m.series.rent_pv,
                    rent_forward: m.series.rent_forward,
                });
        }
    }
    Ok(SensitivityReport {
        valuation_year: config.valuation_year,
        rows: rows.into_values().collect(),
        analyses,
        audit: rebuilt.into_iter().flat_map(|r| r.audit).collect(),
    })
}

impl SensitivityReport {
    /// Delimited-text table. Absent momento x is written as `—`.
    pub fn to_csv(&self) -> String {
        let labels: Vec<&str> = self
            .rows
            .first()
            .map(|r| r.columns.iter().map(|c| c.label.as_str()).collect())
            .unwrap_or_default();
        let mut header = vec!["mine".to_string()];
        header.extend(labels.iter().map(|l| format!("momento_x_{l}")));
        header.extend(labels.iter().map(|l| format!("rent_pv_t0_{l}")));
        header.extend(
            labels
                .iter()
                .map(|l| format!("rent_{}_{l}", self.valuation_year)),
        );
        let mut out = header.join(",");
        out.push('\n');
        for row in &self.rows {
            let mut cells = vec![row.mine_id.clone()];
            cells.extend(
                row.columns
                    .iter()
                    .map(|c| c.momento_x.map_or("—".to_string(), |y| y.to_string())),
            );
            cells.extend(row.columns.iter().map(|c| format!("{:.4}", c.rent_pv)));
            cells.extend(row.columns.iter().map(|c| format!("{:.4}", c.rent_forward)));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Summary<'a> {
            valuation_year: Year,
            rent_pv_reference: &'static str,
            rows: &'a [SummaryRow],
        }
        serde_json::to_string_pretty(&Summary {
            valuation_year: self.valuation_year,
            rent_pv_reference: "each mine's opening year",
            rows: &self.rows,
        })
        .expect("summary serializes")
    }
}

/// Two-column `year,rvp` plot data.
pub fn plot_data_csv(series: &RvpSeries) -> String {
    let mut out = String::from("year,rvp\n");
    for p in &series.points {
        out.push_str(&format!("{},{}\n", p.year, p.rvp));
    }
    out
}
