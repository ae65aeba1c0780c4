//! One scenario run bundled into a single serializable report: the market
//! sweep, the affordability table, a demand/supply gap summary at both ends
//! of the range, and the headline affordability figures.

use serde::{Deserialize, Serialize};

use crate::annuity::MetricsRow;
use crate::error::Error;
use crate::market::{market_gap, MarketPoint, DEFAULT_GAP_EPSILON};
use crate::scenario::Scenario;

/// Demand/supply comparison at one end of the duration range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEndpoint {
    pub duration_years: u32,
    pub demand: f64,
    pub supply_loans: f64,
    /// demand - supply_loans (positive means shortage).
    pub difference: f64,
    /// demand / supply_loans.
    pub ratio: f64,
    pub balanced: bool,
}

/// Gap at the shortest and longest durations of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub shortest: GapEndpoint,
    pub longest: GapEndpoint,
    /// Tolerance (in loans) under which an endpoint counts as balanced.
    pub epsilon: f64,
}

/// The numbers someone skimming the report should walk away with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Headline {
    pub min_duration_years: u32,
    pub max_duration_years: u32,
    /// Payment at the shortest duration, euros/month.
    pub payment_at_min: f64,
    /// Payment at the longest duration, euros/month.
    pub payment_at_max: f64,
    /// Total-cost increase of the longest over the shortest duration, percent.
    pub cost_increase_pct: f64,
}

/// Full outcome of one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// The scenario exactly as run; re-running a report from this echo
    /// reproduces the report.
    pub scenario: Scenario,
    pub market: Vec<MarketPoint>,
    pub metrics: Vec<MetricsRow>,
    pub gap: GapSummary,
    pub headline: Headline,
}

fn gap_endpoint(point: &MarketPoint, epsilon: f64) -> Result<GapEndpoint, Error> {
    let gap = market_gap(point, epsilon)?;
    Ok(GapEndpoint {
        duration_years: point.duration_years,
        demand: point.demand,
        supply_loans: point.supply_loans,
        difference: gap.difference,
        ratio: gap.ratio,
        balanced: gap.balanced,
    })
}

/// Run a scenario end to end.
pub fn build_report(scenario: &Scenario) -> Result<Report, Error> {
    scenario.validate()?;
    let market = scenario.sweep()?;
    let metrics = scenario.metrics_table()?;

    let first_point = market
        .first()
        .expect("validated range yields at least one row");
    let last_point = market
        .last()
        .expect("validated range yields at least one row");
    let gap = GapSummary {
        shortest: gap_endpoint(first_point, DEFAULT_GAP_EPSILON)?,
        longest: gap_endpoint(last_point, DEFAULT_GAP_EPSILON)?,
        epsilon: DEFAULT_GAP_EPSILON,
    };

    let first_row = metrics
        .first()
        .expect("validated range yields at least one row");
    let last_row = metrics
        .last()
        .expect("validated range yields at least one row");
    let headline = Headline {
        min_duration_years: first_row.duration_years,
        max_duration_years: last_row.duration_years,
        payment_at_min: first_row.monthly_payment,
        payment_at_max: last_row.monthly_payment,
        cost_increase_pct: last_row.relative_increase,
    };

    Ok(Report {
        scenario: scenario.clone(),
        market,
        metrics,
        gap,
        headline,
    })
}
