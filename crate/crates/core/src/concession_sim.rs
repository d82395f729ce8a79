//! Least-present-value-of-revenue concessions.
//!
//! The state announces a discount rate. Bidders offer the present value of
//! revenue (VPI) they require; the lowest offer wins and operates the resource
//! until its counted revenue, discounted at the announced rate, reaches the
//! offer. The term therefore stretches when prices are low and shrinks when
//! they are high. A voluntary tax reduces counted revenue one for one, and the
//! indemnity owed on expropriation is the part of the VPI not yet collected.
//!
//! Settlement is annual: the whole final year counts, so the collected PV can
//! overshoot the target by at most that year's contribution.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::ConcessionError;
use crate::reconstruction::USD_PER_MILLION;
use crate::valuation::Rate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bidder {
    pub id: String,
    /// Up-front investment, million USD.
    pub investment: f64,
    /// The bidder's own discount rate, carrying all of its risk.
    pub cost_of_capital: Rate,
    /// Forecast counted revenue for operating years 1, 2, ...
    pub expected_revenue: Vec<f64>,
    /// Reported operating costs. Not an input to the bid.
    #[serde(default)]
    pub reported_operating_costs: Vec<f64>,
}

impl Bidder {
    fn check(&self) -> Result<(), ConcessionError> {
        let bad = |why: &str| {
            Err(ConcessionError::InvalidBidder(
                self.id.clone(),
                why.to_string(),
            ))
        };
        if !(self.investment.is_finite() && self.investment > 0.0) {
            return bad("investment must be positive");
        }
        if self.expected_revenue.is_empty() {
            return bad("empty revenue path");
        }
        if self
            .expected_revenue
            .iter()
            .any(|r| !r.is_finite() || *r < 0.0)
        {
            return bad("revenue path must be finite and non-negative");
        }
        Ok(())
    }
}

/// PV at `own` of the revenue collected until the announced-rate PV reaches
/// `target`, with the final year cut at the exact point the target is met.
pub fn prorated_prefix_value(revenue: &[f64], announced: Rate, own: Rate, target: f64) -> f64 {
    let mut accrued = 0.0;
    let mut value = 0.0;
    for (i, &r) in revenue.iter().enumerate() {
        let period = i as i32 + 1;
        let counted = r * announced.discount_factor(period);
        let own_pv = r * own.discount_factor(period);
        if accrued + counted >= target {
            let fraction = if counted > 0.0 {
                ((target - accrued) / counted).clamp(0.0, 1.0)
            } else {
                0.0
            };
            return value + fraction * own_pv;
        }
        accrued += counted;
        value += own_pv;
    }
    value
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumBid {
    pub vpi: f64,
    /// Operating year in which the forecast path reaches the bid.
    pub expected_stop_year: u32,
}

const BID_RELATIVE_TOLERANCE: f64 = 1e-12;

/// The smallest VPI whose collection repays the bidder's investment in PV at
/// its own cost of capital, found by bisection. The firm's value is
/// non-decreasing in the VPI because the stopping point only moves later.
/// When the bidder's rate equals the announced rate the answer is the
/// investment itself.
pub fn equilibrium_bid(
    bidder: &Bidder,
    announced: Rate,
) -> Result<EquilibriumBid, ConcessionError> {
    bidder.check()?;
    let rev = &bidder.expected_revenue;
    let own = bidder.cost_of_capital;
    let total: f64 = rev
        .iter()
        .enumerate()
        .map(|(i, r)| r * announced.discount_factor(i as i32 + 1))
        .sum();
    let feasible = |v: f64| prorated_prefix_value(rev, announced, own, v) >= bidder.investment;
    if !feasible(total) {
        return Err(ConcessionError::NoBid(bidder.id.clone()));
    }
    let (mut lo, mut hi) = (0.0_f64, total);
    for _ in 0..200 {
        if hi - lo <= BID_RELATIVE_TOLERANCE * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(EquilibriumBid {
        vpi: hi,
        expected_stop_year: stop_year(rev, announced, hi),
    })
}

fn stop_year(revenue: &[f64], announced: Rate, target: f64) -> u32 {
    let slack = 1e-9 * target.abs().max(1.0);
    let mut accrued = 0.0;
    for (i, r) in revenue.iter().enumerate() {
        accrued += r * announced.discount_factor(i as i32 + 1);
        if accrued >= target - slack {
            return i as u32 + 1;
        }
    }
    revenue.len() as u32
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bid {
    pub bidder_id: String,
    pub vpi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionOutcome {
    pub winner: String,
    pub vpi: f64,
}

/// Lowest VPI wins; ties go to the lexicographically smallest bidder id.
pub fn run_auction(bids: &[Bid]) -> Result<AuctionOutcome, ConcessionError> {
    bids.iter()
        .min_by(|a, b| {
            a.vpi
                .total_cmp(&b.vpi)
                .then_with(|| a.bidder_id.cmp(&b.bidder_id))
        })
        .map(|b| AuctionOutcome {
            winner: b.bidder_id.clone(),
            vpi: b.vpi,
        })
        .ok_or(ConcessionError::EmptyAuction)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BidderResult {
    pub bidder_id: String,
    pub bid: Option<EquilibriumBid>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuctionReport {
    pub announced_rate: f64,
    pub bidders: Vec<BidderResult>,
    pub outcome: AuctionOutcome,
}

/// Equilibrium bid for every bidder, then the auction over those that can bid.
pub fn auction_from_bidders(
    bidders: &[Bidder],
    announced: Rate,
) -> Result<AuctionReport, ConcessionError> {
    let mut results = Vec::with_capacity(bidders.len());
    let mut bids = Vec::new();
    for b in bidders {
        match equilibrium_bid(b, announced) {
            Ok(eb) => {
                bids.push(Bid {
                    bidder_id: b.id.clone(),
                    vpi: eb.vpi,
                });
                results.push(BidderResult {
                    bidder_id: b.id.clone(),
                    bid: Some(eb),
                    error: None,
                });
            }
            Err(e) => results.push(BidderResult {
                bidder_id: b.id.clone(),
                bid: None,
                error: Some(e.to_string()),
            }),
        }
    }
    let outcome = run_auction(&bids)?;
    Ok(AuctionReport {
        announced_rate: announced.value(),
        bidders: results,
        outcome,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Active,
    Expired,
    Expropriated,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Active => "active",
            Status::Expired => "expired",
            Status::Expropriated => "expropriated",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevenueLogEntry {
    /// Operating year, 1-based.
    pub year: u32,
    pub gross_revenue: f64,
    pub voluntary_tax: f64,
    pub counted_revenue: f64,
    /// Counted revenue discounted to the concession start.
    pub counted_pv: f64,
    pub accrued_pv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcessionState {
    pub vpi_target: f64,
    pub announced_rate: Rate,
    /// Completed operating years.
    pub current_year: u32,
    pub accrued_pv: f64,
    pub log: Vec<RevenueLogEntry>,
    pub status: Status,
}

impl ConcessionState {
    pub fn new(vpi_target: f64, announced_rate: Rate) -> Result<Self, ConcessionError> {
        if !(vpi_target.is_finite() && vpi_target > 0.0) {
            return Err(ConcessionError::InvalidTarget(vpi_target));
        }
        Ok(Self {
            vpi_target,
            announced_rate,
            current_year: 0,
            accrued_pv: 0.0,
            log: Vec::new(),
            status: Status::Active,
        })
    }
}

/// Advances one operating year.
pub fn step_concession(
    mut state: ConcessionState,
    gross_revenue: f64,
    voluntary_tax: f64,
) -> Result<ConcessionState, ConcessionError> {
    if state.status != Status::Active {
        return Err(ConcessionError::NotActive(state.status.as_str()));
    }
    if !(gross_revenue.is_finite() && gross_revenue >= 0.0) {
        return Err(ConcessionError::InvalidRevenue(gross_revenue));
    }
    if !(voluntary_tax.is_finite() && (0.0..=gross_revenue).contains(&voluntary_tax)) {
        return Err(ConcessionError::InvalidTax {
            gross: gross_revenue,
            tax: voluntary_tax,
        });
    }
    let counted = gross_revenue - voluntary_tax;
    let year = state.current_year + 1;
    let counted_pv = counted * state.announced_rate.discount_factor(year as i32);
    state.accrued_pv += counted_pv;
    state.current_year = year;
    state.log.push(RevenueLogEntry {
        year,
        gross_revenue,
        voluntary_tax,
        counted_revenue: counted,
        counted_pv,
        accrued_pv: state.accrued_pv,
    });
    if state.accrued_pv >= state.vpi_target {
        state.status = Status::Expired;
    }
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Indemnity {
    /// Uncollected VPI, in PV at the concession start.
    pub at_start: f64,
    /// The same amount carried to the expropriation date.
    pub at_expropriation: f64,
}

/// VPI not yet collected. Zero once the concession has expired.
pub fn expropriation_indemnity(state: &ConcessionState) -> Indemnity {
    if state.status == Status::Expired {
        return Indemnity {
            at_start: 0.0,
            at_expropriation: 0.0,
        };
    }
    let at_start = state.vpi_target - state.accrued_pv;
    Indemnity {
        at_start,
        at_expropriation: at_start
            * state
                .announced_rate
                .growth_factor(state.current_year as i32),
    }
}

/// Ends an active concession by expropriation.
pub fn expropriate(
    mut state: ConcessionState,
) -> Result<(ConcessionState, Indemnity), ConcessionError> {
    if state.status != Status::Active {
        return Err(ConcessionError::NotActive(state.status.as_str()));
    }
    let indemnity = expropriation_indemnity(&state);
    state.status = Status::Expropriated;
    Ok((state, indemnity))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricePathParams {
    /// USD per tonne at t = 0.
    pub initial_price: f64,
    pub drift: f64,
    pub volatility: f64,
    pub horizon: u32,
    pub seed: u64,
}

/// Annual geometric Brownian motion prices for years 1..=horizon (the initial
/// price is year 0 and is not included). Same seed, same path.
pub fn generate_price_path(params: &PricePathParams) -> Result<Vec<f64>, ConcessionError> {
    let invalid = |why: &str| Err(ConcessionError::InvalidPriceParams(why.to_string()));
    if !(params.initial_price.is_finite() && params.initial_price > 0.0) {
        return invalid("initial_price must be positive");
    }
    if !(params.volatility.is_finite() && params.volatility >= 0.0) {
        return invalid("volatility must be non-negative");
    }
    if !params.drift.is_finite() {
        return invalid("drift must be finite");
    }
    if params.horizon < 1 {
        return invalid("horizon must be at least one year");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mu = params.drift - 0.5 * params.volatility * params.volatility;
    let mut log_price = params.initial_price.ln();
    Ok((0..params.horizon)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            log_price += mu + params.volatility * z;
            log_price.exp()
        })
        .collect())
}

/// Per-year voluntary tax, capped at gross revenue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TaxPolicy {
    #[default]
    None,
    /// Same amount (million USD) every year.
    Fixed { amount: f64 },
    /// Fraction of gross revenue.
    Share { fraction: f64 },
    /// Explicit amounts for years 1, 2, ...; zero after the list ends.
    Schedule { amounts: Vec<f64> },
}

impl TaxPolicy {
    pub fn tax_for(&self, year: u32, gross: f64) -> f64 {
        let raw = match self {
            TaxPolicy::None => 0.0,
            TaxPolicy::Fixed { amount } => *amount,
            TaxPolicy::Share { fraction } => fraction * gross,
            TaxPolicy::Schedule { amounts } => {
                amounts.get(year as usize - 1).copied().unwrap_or(0.0)
            }
        };
        raw.clamp(0.0, gross)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearOutcome {
    pub year: u32,
    pub price: f64,
    pub entry: RevenueLogEntry,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcessionOutcome {
    /// Years until expiry; `None` if the path ran out first.
    pub duration: Option<u32>,
    pub years: Vec<YearOutcome>,
    pub final_state: ConcessionState,
    pub warnings: Vec<String>,
}

/// Runs a concession over a price path with revenue `price * quantity`
/// (converted to million USD).
pub fn simulate_concession(
    vpi: f64,
    prices: &[f64],
    quantity_per_year: f64,
    announced_rate: Rate,
    tax_policy: &TaxPolicy,
) -> Result<ConcessionOutcome, ConcessionError> {
    let revenue: Vec<f64> = prices
        .iter()
        .map(|p| p * quantity_per_year / USD_PER_MILLION)
        .collect();
    simulate_revenue(vpi, prices, &revenue, announced_rate, tax_policy)
}

fn simulate_revenue(
    vpi: f64,
    prices: &[f64],
    revenue: &[f64],
    announced_rate: Rate,
    tax_policy: &TaxPolicy,
) -> Result<ConcessionOutcome, ConcessionError> {
    let mut state = ConcessionState::new(vpi, announced_rate)?;
    let mut years = Vec::new();
    for (i, (&price, &gross)) in prices.iter().zip(revenue).enumerate() {
        let year = i as u32 + 1;
        let tax = tax_policy.tax_for(year, gross);
        state = step_concession(state, gross, tax)?;
        years.push(YearOutcome {
            year,
            price,
            entry: *state.log.last().expect("stepped"),
            status: state.status,
        });
        if state.status == Status::Expired {
            break;
        }
    }
    let mut warnings = Vec::new();
    let duration = if state.status == Status::Expired {
        Some(state.current_year)
    } else {
        warnings.push(format!(
            "concession still active after {} years: accrued PV {} of target {}",
            state.current_year, state.accrued_pv, state.vpi_target
        ));
        None
    };
    Ok(ConcessionOutcome {
        duration,
        years,
        final_state: state,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Replication {
    pub index: u32,
    pub seed: u64,
    pub duration: Option<u32>,
}

/// Independent replications; replication `i` uses seed `params.seed + i`.
pub fn run_replications(
    vpi: f64,
    params: &PricePathParams,
    quantity_per_year: f64,
    announced_rate: Rate,
    tax_policy: &TaxPolicy,
    count: u32,
) -> Result<Vec<Replication>, ConcessionError> {
    (0..count)
        .map(|index| {
            let seed = params.seed.wrapping_add(u64::from(index));
            let path = generate_price_path(&PricePathParams { seed, ..*params })?;
            let outcome =
                simulate_concession(vpi, &path, quantity_per_year, announced_rate, tax_policy)?;
            Ok(Replication {
                index,
                seed,
                duration: outcome.duration,
            })
        })
        .collect()
}
