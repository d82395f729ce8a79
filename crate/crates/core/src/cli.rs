//! Command-line front end. The binary only forwards `std::env::args` here.
//!
//! Exit status: 0 on success, 1 when inputs fail parsing or validation, 2 on
//! I/O failures. Every artifact lands under `--out`, and fixed inputs (and
//! seed) always produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::concession_sim::{
    auction_from_bidders, generate_price_path, run_replications, simulate_concession, Bidder,
    ConcessionOutcome, PricePathParams, TaxPolicy,
};
use crate::data_model::{
    load_market_series, load_mine_dataset, validate_dataset, write_mine_dataset, DiscountSpec,
    MarketSeries, MineDataset, MineYearRecord, Year,
};
use crate::error::{DataError, Error};
use crate::reconstruction::{reconstruct_mine, AuditEntry};
use crate::rent_analysis::{
    plot_data_csv, sensitivity_report, AnalysisConfig, RateScenario, DEFAULT_VALUATION_YEAR,
};
use crate::valuation::Rate;

#[derive(Debug, Parser)]
#[command(
    name = "resource-rent",
    version,
    about = "Mining rent analysis and LPVR concession simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rent trajectories, momento x and the per-rate summary table.
    Analyze(AnalyzeArgs),
    /// Backfill pre-statement years and write the completed mine files.
    Reconstruct(ReconstructArgs),
    /// Run a concession scenario (optionally with Monte Carlo replications).
    SimulateConcession(ScenarioArgs),
    /// Equilibrium bids and the winning VPI for a scenario's bidders.
    Auction(ScenarioArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Table,
    #[value(alias = "json-like")]
    Json,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub mines: PathBuf,
    #[arg(long)]
    pub market: PathBuf,
    /// `base`, `conservative`, or a literal annual rate such as 0.1236.
    /// Repeatable or comma-separated. Defaults to both presets.
    #[arg(long, value_delimiter = ',')]
    pub rate: Vec<String>,
    /// Custom CAPM inputs; all four must be given together.
    #[arg(long)]
    pub rf: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub erp: Option<f64>,
    #[arg(long)]
    pub country: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_VALUATION_YEAR)]
    pub valuation_year: Year,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "table,json")]
    pub format: Vec<OutputFormat>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub mines: PathBuf,
    #[arg(long)]
    pub market: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the scenario's price-path seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the scenario's replication count.
    #[arg(long)]
    pub replications: Option<u32>,
    #[arg(long, value_delimiter = ',', default_value = "table,json")]
    pub format: Vec<OutputFormat>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Data(d) => d.into(),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<crate::error::ConcessionError> for CliError {
    fn from(e: crate::error::ConcessionError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

/// What a command wrote, plus warnings worth showing the user.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub artifacts: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            for a in &summary.artifacts {
                println!("wrote {}", a.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<RunSummary, CliError> {
    match command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::SimulateConcession(a) => cmd_simulate_concession(a),
        Command::Auction(a) => cmd_auction(a),
    }
}

struct Writer {
    out: PathBuf,
    summary: RunSummary,
}

impl Writer {
    fn new(out: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
        Ok(Self {
            out: out.to_path_buf(),
            summary: RunSummary::default(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.summary.artifacts.push(path);
        Ok(())
    }
}

fn load_cohort(dir: &Path) -> Result<(Vec<MineDataset>, Vec<String>), CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Invalid(format!(
            "{}: no mine datasets found",
            dir.display()
        )));
    }
    let mut cohort = Vec::new();
    let mut warnings = Vec::new();
    for p in paths {
        let loaded = load_mine_dataset(&p)?;
        warnings.extend(loaded.warnings);
        cohort.push(loaded.dataset);
    }
    let mut ids: Vec<&str> = cohort.iter().map(|m| m.mine_id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::Invalid(format!(
            "mine id `{}` appears twice",
            w[0]
        )));
    }
    Ok((cohort, warnings))
}

fn validate_cohort(cohort: &[MineDataset], market: &MarketSeries) -> Result<Vec<String>, CliError> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    for m in cohort {
        let report = validate_dataset(m, market);
        errors.extend(report.errors.iter().map(ToString::to_string));
        warnings.extend(report.warnings.iter().map(ToString::to_string));
    }
    errors.sort();
    errors.dedup();
    if errors.is_empty() {
        Ok(warnings)
    } else {
        Err(CliError::Invalid(format!(
            "validation failed:\n  {}",
            errors.join("\n  ")
        )))
    }
}

fn scenarios(args: &AnalyzeArgs) -> Result<Vec<RateScenario>, CliError> {
    let mut out = Vec::new();
    for r in &args.rate {
        let scenario = match r.as_str() {
            "base" => RateScenario::base(),
            "conservative" => RateScenario::conservative(),
            literal => {
                let v: f64 = literal.parse().map_err(|_| {
                    CliError::Invalid(format!(
                        "--rate `{literal}`: expected base, conservative or a number"
                    ))
                })?;
                let rate = Rate::new(v).map_err(|e| CliError::Invalid(e.to_string()))?;
                RateScenario::literal(format!("r{literal}"), rate)
            }
        };
        out.push(scenario);
    }
    match (args.rf, args.beta, args.erp, args.country) {
        (None, None, None, None) => {}
        (Some(rf), Some(beta), Some(erp), Some(country)) => {
            let spec = DiscountSpec::new(rf, beta, erp, country)?;
            out.push(RateScenario::from_spec("custom", spec));
        }
        _ => {
            return Err(CliError::Invalid(
                "--rf, --beta, --erp and --country must be given together".into(),
            ))
        }
    }
    if out.is_empty() {
        out = vec![RateScenario::base(), RateScenario::conservative()];
    }
    let mut labels: Vec<&str> = out.iter().map(|s| s.label.as_str()).collect();
    labels.sort_unstable();
    labels.dedup();
    if labels.len() != out.len() {
        return Err(CliError::Invalid("duplicate rate scenario".into()));
    }
    Ok(out)
}

fn audit_csv(audit: &[AuditEntry]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["mine_id", "year", "field", "rule", "inputs", "output"])
        .expect("in-memory write");
    for e in audit {
        w.write_record([
            e.mine_id.as_str(),
            &e.year.to_string(),
            e.field,
            e.rule,
            &e.inputs,
            &e.output.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn manifest(command: &str, inputs: serde_json::Value, parameters: serde_json::Value) -> String {
    let doc = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "inputs": inputs,
        "parameters": parameters,
    });
    serde_json::to_string_pretty(&doc).expect("manifest serializes") + "\n"
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<RunSummary, CliError> {
    let scenarios = scenarios(args)?;
    let market = load_market_series(&args.market)?;
    let (cohort, mut warnings) = load_cohort(&args.mines)?;
    warnings.extend(validate_cohort(&cohort, &market)?);

    let config = AnalysisConfig {
        valuation_year: args.valuation_year,
        ..AnalysisConfig::default()
    };
    let report = sensitivity_report(&cohort, &market, &scenarios, &config)?;

    let mut w = Writer::new(&args.out)?;
    for analysis in &report.analyses {
        warnings.extend(analysis.warnings.iter().cloned());
        for m in &analysis.mines {
            w.write(
                &format!("{}_rvp_{}.csv", m.mine_id, analysis.scenario.label),
                &plot_data_csv(&m.series),
            )?;
        }
    }
    if args.format.contains(&OutputFormat::Table) {
        w.write("summary_cuadro1.csv", &report.to_csv())?;
    }
    if args.format.contains(&OutputFormat::Json) {
        w.write("summary_cuadro1.json", &(report.to_json() + "\n"))?;
    }
    w.write("reconstruction_audit.csv", &audit_csv(&report.audit))?;
    w.write(
        "run_manifest.json",
        &manifest(
            "analyze",
            json!({
                "mines": args.mines.display().to_string(),
                "market": args.market.display().to_string(),
                "mine_ids": cohort.iter().map(|m| m.mine_id.as_str()).collect::<Vec<_>>(),
            }),
            json!({
                "scenarios": scenarios,
                "valuation_year": config.valuation_year,
                "fund_rate": market.fund_rate,
                "baseline_window": config.baseline_window,
                "imputation": config.imputation,
                "format": args.format,
            }),
        ),
    )?;
    w.summary.warnings = warnings;
    Ok(w.summary)
}

pub fn cmd_reconstruct(args: &ReconstructArgs) -> Result<RunSummary, CliError> {
    let market = load_market_series(&args.market)?;
    let (cohort, mut warnings) = load_cohort(&args.mines)?;
    warnings.extend(validate_cohort(&cohort, &market)?);
    let config = AnalysisConfig::default();

    let mut w = Writer::new(&args.out)?;
    let mut audit = Vec::new();
    for mine in &cohort {
        let rebuilt = reconstruct_mine(mine, &market, config.baseline_window)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", mine.mine_id)))?;
        let completed = MineDataset {
            records: rebuilt
                .records
                .iter()
                .map(|r| MineYearRecord {
                    reconstructed: false,
                    ..*r
                })
                .collect(),
            physical: Vec::new(),
            ..mine.clone()
        };
        w.write(
            &format!("{}_reconstructed.csv", mine.mine_id),
            &write_mine_dataset(&completed),
        )?;
        audit.extend(rebuilt.audit);
    }
    w.write("reconstruction_audit.csv", &audit_csv(&audit))?;
    w.write(
        "run_manifest.json",
        &manifest(
            "reconstruct",
            json!({
                "mines": args.mines.display().to_string(),
                "market": args.market.display().to_string(),
            }),
            json!({ "baseline_window": config.baseline_window }),
        ),
    )?;
    w.summary.warnings = warnings;
    Ok(w.summary)
}

/// Price input of a scenario: an explicit per-year path or GBM parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriceSpec {
    Explicit { path: Vec<f64> },
    Generated(PricePathParams),
}

/// Scenario file (TOML).
///
/// ```toml
/// announced_rate = 0.10
/// quantity_t = 100000
/// vpi = 30.0            # omit to take the auction's winning VPI
/// replications = 100    # Monte Carlo runs, GBM prices only
///
/// [price]
/// initial_price = 3000
/// drift = 0.0
/// volatility = 0.25
/// horizon = 40
/// seed = 42
///
/// [tax]
/// kind = "fixed"
/// amount = 5.0
///
/// [[bidders]]
/// id = "A"
/// investment = 900
/// cost_of_capital = 0.12
/// expected_revenue = [150, 150, 150]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub announced_rate: f64,
    #[serde(default)]
    pub quantity_t: Option<f64>,
    #[serde(default)]
    pub vpi: Option<f64>,
    #[serde(default)]
    pub replications: u32,
    #[serde(default)]
    pub price: Option<PriceSpec>,
    #[serde(default)]
    pub tax: TaxPolicy,
    #[serde(default)]
    pub bidders: Vec<Bidder>,
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn announced(s: &Scenario) -> Result<Rate, CliError> {
    Rate::new(s.announced_rate).map_err(|e| CliError::Invalid(format!("announced_rate: {e}")))
}

fn check_bidders(s: &Scenario) -> Result<(), CliError> {
    for b in &s.bidders {
        Rate::new(b.cost_of_capital.value())
            .map_err(|e| CliError::Invalid(format!("bidder {}: cost_of_capital: {e}", b.id)))?;
    }
    Ok(())
}

fn fmt_opt(v: Option<u32>) -> String {
    v.map(|d| d.to_string()).unwrap_or_default()
}

fn outcome_csv(outcome: &ConcessionOutcome) -> String {
    let mut out = String::from(
        "year,price,gross_revenue,voluntary_tax,counted_revenue,counted_pv,accrued_pv,indemnity_pv,status\n",
    );
    let target = outcome.final_state.vpi_target;
    for y in &outcome.years {
        let e = &y.entry;
        let indemnity = if y.status == crate::concession_sim::Status::Expired {
            0.0
        } else {
            target - e.accrued_pv
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            y.year,
            y.price,
            e.gross_revenue,
            e.voluntary_tax,
            e.counted_revenue,
            e.counted_pv,
            e.accrued_pv,
            indemnity,
            y.status
        ));
    }
    out
}

pub fn cmd_simulate_concession(args: &ScenarioArgs) -> Result<RunSummary, CliError> {
    let scenario = load_scenario(&args.scenario)?;
    check_bidders(&scenario)?;
    let rate = announced(&scenario)?;
    let quantity = scenario
        .quantity_t
        .ok_or_else(|| CliError::Invalid("scenario: `quantity_t` is required".into()))?;
    let mut warnings = Vec::new();

    let mut auction = None;
    let vpi = match (scenario.vpi, scenario.bidders.is_empty()) {
        (Some(v), _) => v,
        (None, false) => {
            let report = auction_from_bidders(&scenario.bidders, rate)?;
            let v = report.outcome.vpi;
            auction = Some(report);
            v
        }
        (None, true) => {
            return Err(CliError::Invalid(
                "scenario: give `vpi` or at least one bidder".into(),
            ))
        }
    };

    let mut params = None;
    let prices = match &scenario.price {
        Some(PriceSpec::Explicit { path }) => path.clone(),
        Some(PriceSpec::Generated(p)) => {
            let p = PricePathParams {
                seed: args.seed.unwrap_or(p.seed),
                ..*p
            };
            params = Some(p);
            generate_price_path(&p)?
        }
        None => return Err(CliError::Invalid("scenario: `[price]` is required".into())),
    };
    let outcome = simulate_concession(vpi, &prices, quantity, rate, &scenario.tax)?;
    warnings.extend(outcome.warnings.iter().cloned());

    let replications = args.replications.unwrap_or(scenario.replications);
    let mut w = Writer::new(&args.out)?;
    if args.format.contains(&OutputFormat::Table) {
        w.write("concession_outcome.csv", &outcome_csv(&outcome))?;
    }
    if args.format.contains(&OutputFormat::Json) {
        let doc = json!({
            "vpi": vpi,
            "announced_rate": rate.value(),
            "duration": outcome.duration,
            "status": outcome.final_state.status,
            "accrued_pv": outcome.final_state.accrued_pv,
            "auction": auction,
            "years": outcome.years,
            "warnings": outcome.warnings,
        });
        w.write(
            "concession_outcome.json",
            &(serde_json::to_string_pretty(&doc).expect("serializes") + "\n"),
        )?;
    }
    if replications > 0 {
        let Some(p) = params else {
            return Err(CliError::Invalid(
                "replications need generated prices (`[price]` with GBM parameters)".into(),
            ));
        };
        let reps = run_replications(vpi, &p, quantity, rate, &scenario.tax, replications)?;
        let mut csv = String::from("replication,seed,duration\n");
        for r in &reps {
            csv.push_str(&format!("{},{},{}\n", r.index, r.seed, fmt_opt(r.duration)));
        }
        let unfinished = reps.iter().filter(|r| r.duration.is_none()).count();
        if unfinished > 0 {
            warnings.push(format!(
                "{unfinished} of {replications} replications did not expire within the horizon"
            ));
        }
        w.write("duration_histogram.csv", &csv)?;
    }
    w.write(
        "run_manifest.json",
        &manifest(
            "simulate-concession",
            json!({ "scenario": args.scenario.display().to_string() }),
            json!({
                "vpi": vpi,
                "announced_rate": rate.value(),
                "quantity_t": quantity,
                "price": params,
                "seed": params.map(|p| p.seed),
                "replications": replications,
                "tax": scenario.tax,
                "format": args.format,
            }),
        ),
    )?;
    w.summary.warnings = warnings;
    Ok(w.summary)
}

pub fn cmd_auction(args: &ScenarioArgs) -> Result<RunSummary, CliError> {
    let scenario = load_scenario(&args.scenario)?;
    check_bidders(&scenario)?;
    let rate = announced(&scenario)?;
    let report = auction_from_bidders(&scenario.bidders, rate)?;

    let mut w = Writer::new(&args.out)?;
    if args.format.contains(&OutputFormat::Table) {
        let mut csv = String::from("bidder,vpi,expected_stop_year,winner,note\n");
        for b in &report.bidders {
            let won = b.bidder_id == report.outcome.winner;
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                b.bidder_id,
                b.bid.map(|x| x.vpi.to_string()).unwrap_or_default(),
                fmt_opt(b.bid.map(|x| x.expected_stop_year)),
                won,
                b.error.as_deref().unwrap_or("").replace(',', ";")
            ));
        }
        w.write("auction_result.csv", &csv)?;
    }
    if args.format.contains(&OutputFormat::Json) {
        w.write(
            "auction_result.json",
            &(serde_json::to_string_pretty(&report).expect("serializes") + "\n"),
        )?;
    }
    w.write(
        "run_manifest.json",
        &manifest(
            "auction",
            json!({ "scenario": args.scenario.display().to_string() }),
            json!({ "announced_rate": rate.value(), "bidders": scenario.bidders.len() }),
        ),
    )?;
    Ok(w.summary)
}
