//! Scenario configuration: everything one run needs, as a built-in preset or
//! a JSON document.
//!
//! The JSON schema mirrors [`Scenario`] field for field — one canonical
//! spelling, unknown keys rejected. A minimal document looks like:
//!
//! ```json
//! {
//!   "name": "my-scenario",
//!   "household": { "annual_income": 50000.0, "contribution_rate": 0.30 },
//!   "loan_rate": 0.039,
//!   "property_price": 190680.0,
//!   "macro": { "gdp": 2779000.0, "price_index": 128.9,
//!              "inflation": 0.039, "market_rate": 0.035 },
//!   "demand_coeffs": { "alpha": 20000.0, "beta_income": 0.001,
//!                      "beta_rate": -160000.0, "beta_price": -0.0025,
//!                      "beta_term": 3000.0, "c": 0.1 },
//!   "supply_coeffs": { "alpha": 641.777, "beta_rate": -50.0,
//!                      "beta_gdp": 0.0025, "beta_index": 30.0,
//!                      "beta_inflation": 100.0, "beta_demand": 0.01,
//!                      "beta_term": 22.0 },
//!   "weights": { "w1": 0.25, "w2": 0.25, "w3": 0.25, "w4": 0.25,
//!                "max_term_months": 720 },
//!   "year_range": { "start_year": 20, "end_year": 60, "step_years": 1 }
//! }
//! ```
//!
//! `monthly_income_override` and `paper_compat` are optional and default to
//! absent/false.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::annuity::{build_metrics_table, HouseholdProfile, MetricsRow, RiskWeights};
use crate::error::Error;
use crate::market::{
    sweep_market, DemandCoefficients, MacroIndicators, MarketPoint, SupplyCoefficients,
};
use crate::YearRange;

/// Names of the built-in scenarios, in the order `preset` resolves them.
pub const PRESET_NAMES: [&str; 4] = [
    "paper-baseline",
    "paper-annexe1",
    "paper-text",
    "paper-alt-n60",
];

/// Full description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub household: HouseholdProfile,
    /// Contract rate of the loans in the affordability table.
    pub loan_rate: f64,
    /// Price of the property being financed, euros.
    pub property_price: f64,
    /// Macro environment; also carries the market-wide rate both curves use.
    #[serde(rename = "macro")]
    pub macro_indicators: MacroIndicators,
    pub demand_coeffs: DemandCoefficients,
    pub supply_coeffs: SupplyCoefficients,
    pub weights: RiskWeights,
    pub year_range: YearRange,
    /// Fixes the income in the debt-ratio column instead of
    /// `household.annual_income / 12`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monthly_income_override: Option<f64>,
    /// Replay the originally published sweep arithmetic, transcription slips
    /// included (see the market module).
    #[serde(default)]
    pub paper_compat: bool,
}

impl Scenario {
    /// Resolve a built-in scenario by name.
    pub fn preset(name: &str) -> Result<Self, Error> {
        match name {
            "paper-baseline" => Ok(preset_baseline()),
            "paper-annexe1" => Ok(preset_annexe1()),
            "paper-text" => Ok(preset_text()),
            "paper-alt-n60" => Ok(preset_alt_n60()),
            other => Err(Error::UnknownPreset(
                other.to_string(),
                PRESET_NAMES.join(", "),
            )),
        }
    }

    /// Parse and validate a scenario from JSON text. Syntax errors carry
    /// serde's line/column position; semantic errors name the field.
    pub fn from_json_str(text: &str) -> Result<Self, Error> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Load and validate a scenario from a JSON file.
    pub fn from_path(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Scenario(msg) => Error::Scenario(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Check every cross-field invariant. Serde already guarantees the shape;
    /// this guarantees the numbers make sense together.
    pub fn validate(&self) -> Result<(), Error> {
        if self.name.trim().is_empty() {
            return Err(Error::invalid("name must not be empty"));
        }
        self.household.validate()?;
        if !(self.loan_rate.is_finite() && (0.0..1.0).contains(&self.loan_rate)) {
            return Err(Error::invalid(format!(
                "loan_rate must lie within [0, 1), got {}",
                self.loan_rate
            )));
        }
        if !(self.property_price.is_finite() && self.property_price > 0.0) {
            return Err(Error::invalid(format!(
                "property_price must be > 0, got {}",
                self.property_price
            )));
        }
        self.macro_indicators.validate()?;
        self.demand_coeffs.validate()?;
        self.supply_coeffs.validate()?;
        self.weights.validate()?;
        self.year_range.validate()?;
        if let Some(income) = self.monthly_income_override {
            if !(income.is_finite() && income > 0.0) {
                return Err(Error::invalid(format!(
                    "monthly_income_override must be > 0, got {income}"
                )));
            }
        }
        if self.year_range.end_year * 12 > self.weights.max_term_months {
            return Err(Error::invalid(format!(
                "year_range.end_year {} needs {} months but weights.max_term_months is {}",
                self.year_range.end_year,
                self.year_range.end_year * 12,
                self.weights.max_term_months
            )));
        }
        Ok(())
    }

    /// Market sweep over this scenario's duration range.
    pub fn sweep(&self) -> Result<Vec<MarketPoint>, Error> {
        sweep_market(
            &self.demand_coeffs,
            &self.supply_coeffs,
            &self.macro_indicators,
            &self.household,
            self.property_price,
            self.year_range,
            self.paper_compat,
        )
    }

    /// Affordability table over this scenario's duration range.
    pub fn metrics_table(&self) -> Result<Vec<MetricsRow>, Error> {
        build_metrics_table(
            &self.household,
            self.loan_rate,
            self.property_price,
            self.year_range,
            &self.weights,
            self.monthly_income_override,
        )
    }
}

/// Shared base of the built-in scenarios: the 2024 French market the
/// coefficients were fitted on — 190,680 € median transaction, 30 % down
/// payment, 50,000 € household income, rates at 3.5 % market / 3.9 % contract.
fn preset_base(name: &str) -> Scenario {
    Scenario {
        name: name.to_string(),
        household: HouseholdProfile {
            annual_income: 50_000.0,
            contribution_rate: 0.30,
        },
        loan_rate: 0.039,
        property_price: 190_680.0,
        macro_indicators: MacroIndicators::baseline(),
        demand_coeffs: DemandCoefficients::baseline(),
        supply_coeffs: SupplyCoefficients::baseline(),
        weights: RiskWeights::default(),
        year_range: YearRange {
            start_year: 20,
            end_year: 60,
            step_years: 1,
        },
        monthly_income_override: None,
        paper_compat: false,
    }
}

/// Market-focused sweep in 5-year steps, as originally tabulated.
fn preset_baseline() -> Scenario {
    Scenario {
        year_range: YearRange {
            start_year: 20,
            end_year: 60,
            step_years: 5,
        },
        ..preset_base("paper-baseline")
    }
}

/// Reproduces the reference affordability table year by year. The debt-ratio
/// column of that table is consistent with a fixed 4,053.00 €/month income
/// (not the 4,166.67 implied by the 50,000 € household), hence the override.
fn preset_annexe1() -> Scenario {
    Scenario {
        monthly_income_override: Some(4053.00),
        ..preset_base("paper-annexe1")
    }
}

/// The running-text variant: the affordability table at the 3.5 % market
/// rate instead of the 3.9 % contract rate.
fn preset_text() -> Scenario {
    Scenario {
        loan_rate: 0.035,
        ..preset_base("paper-text")
    }
}

/// Alternate demand fit (stronger term and income effects) evaluated at the
/// 60-year point only.
fn preset_alt_n60() -> Scenario {
    Scenario {
        demand_coeffs: DemandCoefficients::alternate(),
        year_range: YearRange {
            start_year: 60,
            end_year: 60,
            step_years: 1,
        },
        ..preset_base("paper-alt-n60")
    }
}
