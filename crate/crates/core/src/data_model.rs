//! Domain types for mine and market inputs, plus file ingestion and validation.
//!
//! Money is millions of nominal USD throughout. Physical quantities are tonnes
//! of fine copper. Years are calendar integers and every flow is treated as an
//! end-of-year amount.
//!
//! A mine file is a `key=value` metadata block followed by a comma-separated
//! table:
//!
//! ```text
//! mine_id=escondida
//! opening_year=1991
//! capital_paid_first_year=1200
//! escondida_tax_rule=true
//! year,revenue,operating_cost,admin_sales_expense,pretax_result,dep_amort,capital_paid_increase,taxes_paid,fixed_asset_additions,net_loan_payments,production_t,exports_t
//! 1991,,,,,,,,,,320000,310000
//! 2001,1500,700,40,650,120,0,90,200,30,900000,880000
//! ```
//!
//! Rows whose financial columns are blank carry physical data only; they feed
//! the reconstruction module. `taxes_paid` may still be filled on such rows
//! (used when `escondida_tax_rule` is set).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::DataError;

pub type Year = i32;

/// Earliest and latest calendar years a mine record may carry.
pub const RECORD_YEAR_RANGE: (Year, Year) = (1984, 2012);

/// Default annual return of the stabilization fund used to compound
/// appropriated flows forward.
pub const DEFAULT_FUND_RATE: f64 = 0.0507;

pub const MINE_COLUMNS: [&str; 12] = [
    "year",
    "revenue",
    "operating_cost",
    "admin_sales_expense",
    "pretax_result",
    "dep_amort",
    "capital_paid_increase",
    "taxes_paid",
    "fixed_asset_additions",
    "net_loan_payments",
    "production_t",
    "exports_t",
];

pub const MARKET_COLUMNS: [&str; 4] = [
    "year",
    "copper_price_usd_per_t",
    "gdp_usd_m",
    "exploration_pct_gdp",
];

/// One mine-year of financial line items plus physical output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MineYearRecord {
    pub year: Year,
    pub revenue: f64,
    pub operating_cost: f64,
    pub admin_sales_expense: f64,
    pub pretax_result: f64,
    pub depreciation_amortization: f64,
    pub capital_paid_increase: f64,
    pub taxes_paid: f64,
    pub fixed_asset_additions: f64,
    pub net_loan_payments: f64,
    /// Tonnes of fine copper produced.
    pub production: f64,
    /// Tonnes of fine copper exported.
    pub exports: f64,
    /// Set when the record was produced by the reconstruction rules.
    pub reconstructed: bool,
}

impl MineYearRecord {
    /// A record with every money field zero.
    pub fn zeroed(year: Year) -> Self {
        Self {
            year,
            revenue: 0.0,
            operating_cost: 0.0,
            admin_sales_expense: 0.0,
            pretax_result: 0.0,
            depreciation_amortization: 0.0,
            capital_paid_increase: 0.0,
            taxes_paid: 0.0,
            fixed_asset_additions: 0.0,
            net_loan_payments: 0.0,
            production: 0.0,
            exports: 0.0,
            reconstructed: false,
        }
    }

    /// Operating result: revenue less operating cost and admin/sales expense.
    pub fn operating_result(&self) -> f64 {
        self.revenue - self.operating_cost - self.admin_sales_expense
    }

    /// Non-operating result implied by the pre-tax line.
    pub fn nonoperating_result(&self) -> f64 {
        self.pretax_result - self.operating_result()
    }

    pub(crate) fn money_fields(&self) -> [(&'static str, f64); 9] {
        [
            ("revenue", self.revenue),
            ("operating_cost", self.operating_cost),
            ("admin_sales_expense", self.admin_sales_expense),
            ("pretax_result", self.pretax_result),
            ("dep_amort", self.depreciation_amortization),
            ("capital_paid_increase", self.capital_paid_increase),
            ("taxes_paid", self.taxes_paid),
            ("fixed_asset_additions", self.fixed_asset_additions),
            ("net_loan_payments", self.net_loan_payments),
        ]
    }
}

/// Physical-only year: tonnages observed, financial statements unavailable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalYear {
    pub year: Year,
    pub production: f64,
    pub exports: f64,
    /// Explicit tax payment, honoured only under the Escondida tax rule.
    pub taxes_paid: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MineDataset {
    pub mine_id: String,
    pub opening_year: Year,
    pub first_reported_year: Year,
    /// Paid-in capital from the earliest available statement.
    pub capital_paid_first_year: f64,
    /// Keep explicit pre-reporting tax figures instead of zeroing them.
    pub escondida_tax_rule: bool,
    /// Years with audited statements, sorted by year.
    pub records: Vec<MineYearRecord>,
    /// Years with tonnages only, sorted by year.
    pub physical: Vec<PhysicalYear>,
}

impl MineDataset {
    /// Arithmetic mean of annual production over every year the dataset knows.
    pub fn mean_production(&self) -> f64 {
        let values: Vec<f64> = self
            .records
            .iter()
            .map(|r| r.production)
            .chain(self.physical.iter().map(|p| p.production))
            .collect();
        if values.is_empty() {
            0.0
        } else {
            values.iter().sum::<f64>() / values.len() as f64
        }
    }

    pub fn physical_year(&self, year: Year) -> Option<&PhysicalYear> {
        self.physical.iter().find(|p| p.year == year)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketYear {
    pub year: Year,
    /// Nominal USD per tonne.
    pub copper_price: f64,
    /// Nominal GDP, million USD.
    pub gdp: f64,
    /// National exploration spend as a fraction of GDP.
    pub exploration_spend_pct_gdp: f64,
}

impl MarketYear {
    /// National exploration spend in million USD.
    pub fn exploration_spend(&self) -> f64 {
        self.gdp * self.exploration_spend_pct_gdp
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketSeries {
    pub years: BTreeMap<Year, MarketYear>,
    pub fund_rate: f64,
}

impl MarketSeries {
    pub fn new(entries: impl IntoIterator<Item = MarketYear>) -> Self {
        Self {
            years: entries.into_iter().map(|e| (e.year, e)).collect(),
            fund_rate: DEFAULT_FUND_RATE,
        }
    }

    pub fn get(&self, year: Year) -> Option<&MarketYear> {
        self.years.get(&year)
    }

    pub fn price(&self, year: Year) -> Option<f64> {
        self.get(year).map(|m| m.copper_price)
    }

    pub fn span(&self) -> Option<(Year, Year)> {
        let first = *self.years.keys().next()?;
        let last = *self.years.keys().next_back()?;
        Some((first, last))
    }
}

/// CAPM plus sovereign-risk inputs for the discount rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscountSpec {
    pub risk_free: f64,
    pub beta: f64,
    pub equity_premium: f64,
    pub country_risk: f64,
}

impl DiscountSpec {
    pub fn new(
        risk_free: f64,
        beta: f64,
        equity_premium: f64,
        country_risk: f64,
    ) -> Result<Self, DataError> {
        let spec = Self {
            risk_free,
            beta,
            equity_premium,
            country_risk,
        };
        for (name, v) in [
            ("risk_free", risk_free),
            ("beta", beta),
            ("equity_premium", equity_premium),
            ("country_risk", country_risk),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(DataError::InvalidParameter(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(spec)
    }

    /// Base case: rf 6.9%, beta 0.91, equity premium 3.889%, country risk 1.73%.
    pub const fn base() -> Self {
        Self {
            risk_free: 0.069,
            beta: 0.91,
            equity_premium: 0.03889,
            country_risk: 0.0173,
        }
    }

    /// Stressed case: beta 2 and the 411 bp sovereign spread.
    pub const fn conservative() -> Self {
        Self {
            risk_free: 0.069,
            beta: 2.0,
            equity_premium: 0.03889,
            country_risk: 0.0411,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "base" => Some(Self::base()),
            "conservative" => Some(Self::conservative()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Locator {
    Mine { mine_id: String },
    MineYear { mine_id: String, year: Year },
    Market,
    MarketYear { year: Year },
}

impl fmt::Display for Locator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locator::Mine { mine_id } => write!(f, "mine {mine_id}"),
            Locator::MineYear { mine_id, year } => write!(f, "mine {mine_id} year {year}"),
            Locator::Market => write!(f, "market"),
            Locator::MarketYear { year } => write!(f, "market year {year}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Issue {
    pub locator: Locator,
    pub rule: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: [{}] {}", self.locator, self.rule, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty() && self.warnings.is_empty()
    }

    fn error(&mut self, locator: Locator, rule: &str, message: impl Into<String>) {
        self.errors.push(Issue {
            locator,
            rule: rule.to_string(),
            message: message.into(),
        });
    }

    fn warn(&mut self, locator: Locator, rule: &str, message: impl Into<String>) {
        self.warnings.push(Issue {
            locator,
            rule: rule.to_string(),
            message: message.into(),
        });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.errors.extend(other.errors);
        self.warnings.extend(other.warnings);
    }
}

/// A loaded mine file together with any non-fatal notes raised while reading it.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedMine {
    pub dataset: MineDataset,
    pub warnings: Vec<String>,
}

pub fn load_mine_dataset(path: impl AsRef<Path>) -> Result<LoadedMine, DataError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_mine_dataset(&text, &path.display().to_string())
}

/// Parses mine-file text. `origin` is only used in error messages.
pub fn parse_mine_dataset(text: &str, origin: &str) -> Result<LoadedMine, DataError> {
    let parse_err = |line: usize, message: String| DataError::Parse {
        origin: origin.to_string(),
        line,
        message,
    };

    let mut meta: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut table_start = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with("year,") || line == "year" {
            table_start = Some(idx);
            break;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(idx + 1, format!("expected key=value, got `{line}`")))?;
        meta.insert(key.trim().to_string(), (idx + 1, value.trim().to_string()));
    }
    let table_start =
        table_start.ok_or_else(|| parse_err(text.lines().count(), "missing header row".into()))?;

    let meta_str = |key: &str| -> Result<(usize, String), DataError> {
        meta.get(key).cloned().ok_or_else(|| DataError::Schema {
            origin: origin.to_string(),
            message: format!("missing metadata key `{key}`"),
        })
    };
    let (_, mine_id) = meta_str("mine_id")?;
    let (line, v) = meta_str("opening_year")?;
    let opening_year: Year = v
        .parse()
        .map_err(|_| parse_err(line, format!("opening_year `{v}` is not an integer")))?;
    let (line, v) = meta_str("capital_paid_first_year")?;
    let capital_paid_first_year: f64 = v.parse().map_err(|_| {
        parse_err(
            line,
            format!("capital_paid_first_year `{v}` is not numeric"),
        )
    })?;
    let escondida_tax_rule = match meta.get("escondida_tax_rule") {
        None => false,
        Some((line, v)) => v
            .parse()
            .map_err(|_| parse_err(*line, format!("escondida_tax_rule `{v}` is not a boolean")))?,
    };
    let explicit_first_reported = match meta.get("first_reported_year") {
        None => None,
        Some((line, v)) => Some(v.parse::<Year>().map_err(|_| {
            parse_err(
                *line,
                format!("first_reported_year `{v}` is not an integer"),
            )
        })?),
    };

    let body: String = text
        .lines()
        .skip(table_start)
        .collect::<Vec<_>>()
        .join("\n");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| parse_err(table_start + 1, e.to_string()))?
        .clone();
    if headers.iter().ne(MINE_COLUMNS.iter().copied()) {
        return Err(DataError::Schema {
            origin: origin.to_string(),
            message: format!(
                "header must be exactly `{}`, got `{}`",
                MINE_COLUMNS.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut records = Vec::new();
    let mut physical = Vec::new();
    let mut seen: BTreeMap<Year, usize> = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| parse_err(table_start + 1, e.to_string()))?;
        let line = table_start + row.position().map_or(1, |p| p.line() as usize);
        if row.len() != MINE_COLUMNS.len() {
            return Err(parse_err(
                line,
                format!(
                    "expected {} columns, found {}",
                    MINE_COLUMNS.len(),
                    row.len()
                ),
            ));
        }
        let field = |i: usize| -> Result<Option<f64>, DataError> {
            let cell = &row[i];
            if cell.is_empty() {
                return Ok(None);
            }
            cell.parse::<f64>().map(Some).map_err(|_| {
                parse_err(
                    line,
                    format!("column `{}`: `{cell}` is not numeric", MINE_COLUMNS[i]),
                )
            })
        };
        let year: Year = row[0].parse().map_err(|_| {
            parse_err(
                line,
                format!("column `year`: `{}` is not an integer", &row[0]),
            )
        })?;
        if let Some(prev) = seen.insert(year, line) {
            return Err(DataError::DuplicateYear {
                origin: origin.to_string(),
                year,
                line,
                first_line: prev,
            });
        }
        let production = field(10)?
            .ok_or_else(|| parse_err(line, "column `production_t` is required".into()))?;
        let exports = field(11)?.unwrap_or(production);

        let money: Vec<Option<f64>> = (1..=9).map(field).collect::<Result<_, _>>()?;
        let tax_idx = 6; // taxes_paid within the money slice
        let filled = money.iter().filter(|m| m.is_some()).count();
        let physical_only = money
            .iter()
            .enumerate()
            .all(|(i, m)| m.is_none() || i == tax_idx);
        if physical_only {
            physical.push(PhysicalYear {
                year,
                production,
                exports,
                taxes_paid: money[tax_idx],
            });
        } else if filled == money.len() {
            let m: Vec<f64> = money.into_iter().map(Option::unwrap).collect();
            records.push(MineYearRecord {
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
            });
        } else {
            return Err(parse_err(
                line,
                "financial columns must be all filled or all blank (taxes_paid excepted)".into(),
            ));
        }
    }
    records.sort_by_key(|r| r.year);
    physical.sort_by_key(|p| p.year);

    let mut warnings = Vec::new();
    if records.is_empty() {
        warnings.push(format!("{mine_id}: no history; reconstruction required"));
    }
    let first_reported_year = explicit_first_reported
        .or_else(|| records.first().map(|r| r.year))
        .unwrap_or_else(|| {
            physical
                .last()
                .map_or(opening_year, |p| p.year + 1)
                .max(opening_year)
        });

    Ok(LoadedMine {
        dataset: MineDataset {
            mine_id,
            opening_year,
            first_reported_year,
            capital_paid_first_year,
            escondida_tax_rule,
            records,
            physical,
        },
        warnings,
    })
}

/// Renders a dataset in the mine-file layout. Loading the output yields the
/// same dataset.
pub fn write_mine_dataset(mine: &MineDataset) -> String {
    let mut out = String::new();
    out.push_str(&format!("mine_id={}\n", mine.mine_id));
    out.push_str(&format!("opening_year={}\n", mine.opening_year));
    out.push_str(&format!(
        "first_reported_year={}\n",
        mine.first_reported_year
    ));
    out.push_str(&format!(
        "capital_paid_first_year={}\n",
        mine.capital_paid_first_year
    ));
    out.push_str(&format!("escondida_tax_rule={}\n", mine.escondida_tax_rule));
    out.push_str(&MINE_COLUMNS.join(","));
    out.push('\n');

    let mut rows: Vec<(Year, String)> = Vec::new();
    for p in &mine.physical {
        let tax = p.taxes_paid.map(|t| t.to_string()).unwrap_or_default();
        rows.push((
            p.year,
            format!("{},,,,,,,{},,,{},{}", p.year, tax, p.production, p.exports),
        ));
    }
    for r in &mine.records {
        rows.push((
            r.year,
            format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.year,
                r.revenue,
                r.operating_cost,
                r.admin_sales_expense,
                r.pretax_result,
                r.depreciation_amortization,
                r.capital_paid_increase,
                r.taxes_paid,
                r.fixed_asset_additions,
                r.net_loan_payments,
                r.production,
                r.exports
            ),
        ));
    }
    rows.sort_by_key(|(y, _)| *y);
    for (_, row) in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

pub fn load_market_series(path: impl AsRef<Path>) -> Result<MarketSeries, DataError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_market_series(&text, &path.display().to_string())
}

pub fn parse_market_series(text: &str, origin: &str) -> Result<MarketSeries, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| DataError::Parse {
            origin: origin.to_string(),
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.iter().ne(MARKET_COLUMNS.iter().copied()) {
        return Err(DataError::Schema {
            origin: origin.to_string(),
            message: format!("header must be exactly `{}`", MARKET_COLUMNS.join(",")),
        });
    }
    let mut years = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| DataError::Parse {
            origin: origin.to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let parse_err = |message: String| DataError::Parse {
            origin: origin.to_string(),
            line,
            message,
        };
        if row.len() != MARKET_COLUMNS.len() {
            return Err(parse_err(format!(
                "expected {} columns, found {}",
                MARKET_COLUMNS.len(),
                row.len()
            )));
        }
        let num = |i: usize| -> Result<f64, DataError> {
            row[i].parse::<f64>().map_err(|_| {
                parse_err(format!(
                    "column `{}`: `{}` is not numeric",
                    MARKET_COLUMNS[i], &row[i]
                ))
            })
        };
        let year: Year = row[0]
            .parse()
            .map_err(|_| parse_err(format!("column `year`: `{}` is not an integer", &row[0])))?;
        let entry = MarketYear {
            year,
            copper_price: num(1)?,
            gdp: num(2)?,
            exploration_spend_pct_gdp: num(3)?,
        };
        if years.insert(year, entry).is_some() {
            return Err(DataError::DuplicateYear {
                origin: origin.to_string(),
                year,
                line,
                first_line: 0,
            });
        }
    }
    Ok(MarketSeries {
        years,
        fund_rate: DEFAULT_FUND_RATE,
    })
}

/// Checks every invariant on a mine/market pair. Issues are keyed by year, so
/// the outcome does not depend on the order records are stored in.
pub fn validate_dataset(mine: &MineDataset, market: &MarketSeries) -> ValidationReport {
    let mut report = validate_mine(mine);
    report.merge(validate_market(market));

    // Years the reconstruction rules will need prices for.
    for p in &mine.physical {
        if p.year < mine.first_reported_year && market.get(p.year).is_none() {
            report.error(
                Locator::MarketYear { year: p.year },
                "market_coverage",
                format!(
                    "market does not cover {} needed to reconstruct {}",
                    p.year, mine.mine_id
                ),
            );
        }
    }
    report.errors.sort();
    report.warnings.sort();
    report
}

pub fn validate_mine(mine: &MineDataset) -> ValidationReport {
    let mut report = ValidationReport::default();
    let at_mine = || Locator::Mine {
        mine_id: mine.mine_id.clone(),
    };
    let at_year = |year| Locator::MineYear {
        mine_id: mine.mine_id.clone(),
        year,
    };

    if mine.first_reported_year < mine.opening_year {
        report.error(
            at_mine(),
            "first_reported_after_opening",
            format!(
                "first reported year {} precedes opening year {}",
                mine.first_reported_year, mine.opening_year
            ),
        );
    }
    if !(mine.capital_paid_first_year.is_finite() && mine.capital_paid_first_year > 0.0) {
        report.error(
            at_mine(),
            "positive_capital_paid",
            format!(
                "capital_paid_first_year must be > 0, got {}",
                mine.capital_paid_first_year
            ),
        );
    }
    if mine.records.is_empty() {
        report.warn(
            at_mine(),
            "no_history",
            "no history; reconstruction required",
        );
    }

    let mut records = mine.records.clone();
    records.sort_by_key(|r| r.year);
    let mut years = BTreeSet::new();
    for r in &records {
        if !years.insert(r.year) {
            report.error(at_year(r.year), "unique_year", "duplicate year");
        }
    }
    for p in &mine.physical {
        if !years.insert(p.year) {
            report.error(at_year(p.year), "unique_year", "duplicate year");
        }
        if p.year >= mine.first_reported_year {
            report.error(
                at_year(p.year),
                "physical_before_reporting",
                "physical-only row at or after the first reported year",
            );
        }
    }

    let (lo, hi) = RECORD_YEAR_RANGE;
    let physical = mine
        .physical
        .iter()
        .map(|p| (p.year, p.production, p.exports));
    let reported = records.iter().map(|r| (r.year, r.production, r.exports));
    for (year, production, exports) in reported.chain(physical) {
        if !(lo..=hi).contains(&year) {
            report.error(
                at_year(year),
                "year_range",
                format!("year outside [{lo}, {hi}]"),
            );
        }
        if year < mine.opening_year {
            report.error(
                at_year(year),
                "after_opening",
                "year precedes the opening year",
            );
        }
        if !(production.is_finite() && production >= 0.0) {
            report.error(
                at_year(year),
                "nonnegative_production",
                format!("production must be >= 0, got {production}"),
            );
        }
        if !(exports.is_finite() && exports >= 0.0) {
            report.error(
                at_year(year),
                "nonnegative_exports",
                format!("exports must be >= 0, got {exports}"),
            );
        }
        if exports > production * 1.1 && production >= 0.0 {
            report.warn(
                at_year(year),
                "exports_exceed_production",
                "exports exceed production by more than 10% (possible inventory draw-down)",
            );
        }
    }
    for r in &records {
        for (name, v) in r.money_fields() {
            if !v.is_finite() {
                report.error(
                    at_year(r.year),
                    "finite_money",
                    format!("{name} is not finite"),
                );
            }
        }
    }
    for p in &mine.physical {
        if let Some(t) = p.taxes_paid {
            if !t.is_finite() {
                report.error(at_year(p.year), "finite_money", "taxes_paid is not finite");
            }
        }
    }
    report.errors.sort();
    report.warnings.sort();
    report
}

pub fn validate_market(market: &MarketSeries) -> ValidationReport {
    let mut report = ValidationReport::default();
    if !(market.fund_rate.is_finite() && market.fund_rate > -1.0) {
        report.error(
            Locator::Market,
            "fund_rate",
            "fund rate must be finite and > -1",
        );
    }
    let Some((first, last)) = market.span() else {
        report.error(Locator::Market, "market_nonempty", "market series is empty");
        return report;
    };
    for year in first..=last {
        if !market.years.contains_key(&year) {
            report.error(
                Locator::MarketYear { year },
                "market_contiguous",
                format!("non-contiguous market coverage: {year} missing"),
            );
        }
    }
    for (&year, m) in &market.years {
        let at = Locator::MarketYear { year };
        if !(m.copper_price.is_finite() && m.copper_price > 0.0) {
            report.error(at.clone(), "positive_price", "copper price must be > 0");
        }
        if !(m.gdp.is_finite() && m.gdp >= 0.0) {
            report.error(at.clone(), "nonnegative_gdp", "gdp must be finite and >= 0");
        }
        if !(0.0..1.0).contains(&m.exploration_spend_pct_gdp) {
            report.error(
                at,
                "exploration_fraction",
                "exploration share of GDP must lie in [0, 1)",
            );
        }
    }
    report
}
