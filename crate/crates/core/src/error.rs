use thiserror::Error;

use crate::data_model::Year;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("{origin}: {message}")]
    Schema { origin: String, message: String },
    #[error("{origin}:{line}: duplicate year {year} (first seen on line {first_line})")]
    DuplicateYear {
        origin: String,
        year: Year,
        line: usize,
        first_line: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum ReconstructionError {
    #[error("no usable baseline year in {start}..={end} (need production > 0)")]
    BaselineUnavailable { start: Year, end: Year },
    #[error("baseline unit cost must be positive, got {0}")]
    NonPositiveUnitCost(f64),
    #[error("{mine_id}: refusing to reconstruct {year}; statements exist from {first_reported}")]
    WouldOverwrite {
        mine_id: String,
        year: Year,
        first_reported: Year,
    },
    #[error("market series does not cover {0}")]
    MissingMarketYear(Year),
    #[error("{mine_id}: no production/exports supplied for {year}")]
    MissingPhysical { mine_id: String, year: Year },
}

#[derive(Debug, Error, PartialEq)]
pub enum ValuationError {
    #[error("rate must be finite and > -1, got {0}")]
    InvalidRate(f64),
    #[error("cash-flow years must be strictly increasing and not precede base year {base_year}")]
    InvalidSeries { base_year: Year },
    #[error("initial investment must be positive, got {0}")]
    NonPositiveInvestment(f64),
    #[error("valuation year {valuation_year} precedes last flow year {last_flow_year}")]
    ValuationBeforeLastFlow {
        valuation_year: Year,
        last_flow_year: Year,
    },
}

#[derive(Debug, Error, PartialEq)]
pub enum ConcessionError {
    #[error("concession is {0}; only active concessions can be stepped")]
    NotActive(&'static str),
    #[error("voluntary tax {tax} must lie in [0, gross revenue {gross}]")]
    InvalidTax { gross: f64, tax: f64 },
    #[error("gross revenue must be finite and non-negative, got {0}")]
    InvalidRevenue(f64),
    #[error("VPI target must be finite and positive, got {0}")]
    InvalidTarget(f64),
    #[error("bidder {0}: revenue path cannot repay the investment; no bid")]
    NoBid(String),
    #[error("bidder {0}: invalid bidder ({1})")]
    InvalidBidder(String, String),
    #[error("auction failed: no bids")]
    EmptyAuction,
    #[error("invalid price path parameters: {0}")]
    InvalidPriceParams(String),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

/// Top-level error for pipelines that cross module boundaries.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Reconstruction(#[from] ReconstructionError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Concession(#[from] ConcessionError),
    #[error("validation failed:\n{0}")]
    Validation(String),
}
