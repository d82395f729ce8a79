//! Discount rate, annual project cash flow, initial investment and discounting.
//!
//! Rates are nominal annual fractions. Flows are end-of-year and discounted
//! with exponent `year - base_year`.

use serde::{Deserialize, Serialize};

use crate::data_model::{DiscountSpec, MineDataset, MineYearRecord, Year};
use crate::error::ValuationError;
use crate::reconstruction::ExplorationImputation;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rate(f64);

impl Rate {
    pub fn new(value: f64) -> Result<Self, ValuationError> {
        if value.is_finite() && value > -1.0 {
            Ok(Self(value))
        } else {
            Err(ValuationError::InvalidRate(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `(1 + r)^-periods`
    pub fn discount_factor(self, periods: i32) -> f64 {
        (1.0 + self.0).powi(-periods)
    }

    /// `(1 + r)^periods`
    pub fn growth_factor(self, periods: i32) -> f64 {
        (1.0 + self.0).powi(periods)
    }
}

/// `risk_free + beta * equity_premium + country_risk`
pub fn discount_rate(spec: &DiscountSpec) -> Rate {
    Rate(spec.risk_free + spec.beta * spec.equity_premium + spec.country_risk)
}

/// Project cash flow for one year: pre-tax result plus D&A, less paid-in
/// capital increases, taxes, fixed-asset additions and net loan payments.
pub fn annual_cash_flow(record: &MineYearRecord) -> f64 {
    record.pretax_result + record.depreciation_amortization
        - record.capital_paid_increase
        - record.taxes_paid
        - record.fixed_asset_additions
        - record.net_loan_payments
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CashFlowSeries {
    base_year: Year,
    flows: Vec<(Year, f64)>,
}

impl CashFlowSeries {
    pub fn new(base_year: Year, flows: Vec<(Year, f64)>) -> Result<Self, ValuationError> {
        let increasing = flows.windows(2).all(|w| w[0].0 < w[1].0);
        let after_base = flows.first().is_none_or(|(y, _)| *y >= base_year);
        if increasing && after_base {
            Ok(Self { base_year, flows })
        } else {
            Err(ValuationError::InvalidSeries { base_year })
        }
    }

    /// Flows for consecutive years `base_year + 1, base_year + 2, ...`.
    pub fn from_annual(base_year: Year, amounts: &[f64]) -> Self {
        Self {
            base_year,
            flows: amounts
                .iter()
                .enumerate()
                .map(|(i, &a)| (base_year + 1 + i as Year, a))
                .collect(),
        }
    }

    /// Cash flows of a mine's records, with t=0 at the opening year.
    pub fn from_records(
        base_year: Year,
        records: &[MineYearRecord],
    ) -> Result<Self, ValuationError> {
        Self::new(
            base_year,
            records
                .iter()
                .map(|r| (r.year, annual_cash_flow(r)))
                .collect(),
        )
    }

    pub fn base_year(&self) -> Year {
        self.base_year
    }

    pub fn flows(&self) -> &[(Year, f64)] {
        &self.flows
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    pub fn last_year(&self) -> Option<Year> {
        self.flows.last().map(|(y, _)| *y)
    }

    /// Each flow discounted to the base year, in order.
    pub fn discounted(&self, r: Rate) -> impl Iterator<Item = (Year, f64)> + '_ {
        self.flows
            .iter()
            .map(move |&(y, f)| (y, f * r.discount_factor(y - self.base_year)))
    }
}

pub fn present_value(series: &CashFlowSeries, r: Rate) -> f64 {
    series.discounted(r).map(|(_, v)| v).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialInvestment {
    pub extraction: f64,
    pub exploration: f64,
    pub total: f64,
}

impl InitialInvestment {
    pub fn new(extraction: f64, exploration: f64) -> Result<Self, ValuationError> {
        let total = extraction + exploration;
        if total.is_finite() && total > 0.0 {
            Ok(Self {
                extraction,
                exploration,
                total,
            })
        } else {
            Err(ValuationError::NonPositiveInvestment(total))
        }
    }
}

/// Paid-in capital of the first statement plus the mine's capitalized
/// exploration share. Returns a warning when the imputation has no entry for
/// the mine (its exploration is then taken as zero).
pub fn initial_investment(
    mine: &MineDataset,
    exploration: &ExplorationImputation,
) -> Result<(InitialInvestment, Option<String>), ValuationError> {
    let (explo, warning) = match exploration.allocated.get(&mine.mine_id) {
        Some(v) => (*v, None),
        None => (
            0.0,
            Some(format!(
                "{}: no exploration imputation entry; exploration taken as 0",
                mine.mine_id
            )),
        ),
    };
    Ok((
        InitialInvestment::new(mine.capital_paid_first_year, explo)?,
        warning,
    ))
}
