//! Linear demand/supply model of the mortgage market under stretched
//! amortization periods.
//!
//! Demand counts households asking for a loan:
//!
//! ```text
//! D = alpha + b_income*Y + b_rate*r + b_price*P + b_term*N + c
//! ```
//!
//! Supply is bank lending capacity in millions of euros:
//!
//! ```text
//! S = alpha + b_rate*r + b_gdp*GDP + b_index*IN + b_inflation*pi + b_demand*D + b_term*N
//! ```
//!
//! and is converted into a number of financeable loans by dividing by the
//! financed price of one transaction. Both curves grow with the term N, but
//! demand grows much faster: under the baseline coefficients the
//! demand-to-supply ratio widens from about 4.07 at 20 years to about 5.92 at
//! 60 years. Longer terms deepen the shortage instead of closing it.

use serde::{Deserialize, Serialize};

pub use crate::annuity::discounted_price;
use crate::annuity::HouseholdProfile;
use crate::error::Error;
use crate::YearRange;

/// Coefficients of the linear demand curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandCoefficients {
    pub alpha: f64,
    /// Per euro of annual household income.
    pub beta_income: f64,
    /// Per unit of market rate (a fraction, so the term is beta * 0.035).
    pub beta_rate: f64,
    /// Per euro of property price.
    pub beta_price: f64,
    /// Per month of loan term.
    pub beta_term: f64,
    /// Residual intercept adjustment.
    pub c: f64,
}

impl DemandCoefficients {
    /// Baseline fit: rate and price push demand down, income and term pull it
    /// up, term strongly so (+3,000 loans per extra month offered).
    pub fn baseline() -> Self {
        DemandCoefficients {
            alpha: 20_000.0,
            beta_income: 0.001,
            beta_rate: -160_000.0,
            beta_price: -0.0025,
            beta_term: 3_000.0,
            c: 0.1,
        }
    }

    /// Alternate fit with a heavier term effect (+5,000 loans per month) and
    /// stronger income sensitivity; used to probe how conclusions depend on
    /// the coefficient choice.
    pub fn alternate() -> Self {
        DemandCoefficients {
            alpha: 24_000.0,
            beta_income: 0.005,
            beta_rate: -128_000.0,
            beta_price: -0.0010,
            beta_term: 5_000.0,
            c: 0.1,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta_income", self.beta_income),
            ("beta_rate", self.beta_rate),
            ("beta_price", self.beta_price),
            ("beta_term", self.beta_term),
            ("c", self.c),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!(
                    "demand_coeffs.{name} must be finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Coefficients of the linear supply curve, in millions of euros.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupplyCoefficients {
    pub alpha: f64,
    /// Per unit of market rate.
    pub beta_rate: f64,
    /// Per million euros of GDP.
    pub beta_gdp: f64,
    /// Per point of the property price index.
    pub beta_index: f64,
    /// Per unit of inflation (a fraction).
    pub beta_inflation: f64,
    /// Per demanded loan.
    pub beta_demand: f64,
    /// Per month of loan term.
    pub beta_term: f64,
}

impl SupplyCoefficients {
    pub fn baseline() -> Self {
        SupplyCoefficients {
            alpha: 641.777,
            beta_rate: -50.0,
            beta_gdp: 0.0025,
            beta_index: 30.0,
            beta_inflation: 100.0,
            beta_demand: 0.01,
            beta_term: 22.0,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta_rate", self.beta_rate),
            ("beta_gdp", self.beta_gdp),
            ("beta_index", self.beta_index),
            ("beta_inflation", self.beta_inflation),
            ("beta_demand", self.beta_demand),
            ("beta_term", self.beta_term),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!(
                    "supply_coeffs.{name} must be finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Macro environment the supply curve reacts to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacroIndicators {
    /// Nominal GDP, millions of euros.
    pub gdp: f64,
    /// Property price index level.
    pub price_index: f64,
    /// Annual inflation as a fraction.
    pub inflation: f64,
    /// Market-wide average mortgage rate as a fraction; feeds both curves.
    pub market_rate: f64,
}

impl MacroIndicators {
    /// French 2024 environment the baseline coefficients were fitted on.
    pub fn baseline() -> Self {
        MacroIndicators {
            gdp: 2_779_000.0,
            price_index: 128.9,
            inflation: 0.039,
            market_rate: 0.035,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.gdp.is_finite() && self.gdp > 0.0) {
            return Err(Error::invalid(format!(
                "macro.gdp must be > 0, got {}",
                self.gdp
            )));
        }
        if !(self.price_index.is_finite() && self.price_index > 0.0) {
            return Err(Error::invalid(format!(
                "macro.price_index must be > 0, got {}",
                self.price_index
            )));
        }
        if !self.inflation.is_finite() {
            return Err(Error::invalid(format!(
                "macro.inflation must be finite, got {}",
                self.inflation
            )));
        }
        if !(self.market_rate.is_finite() && (0.0..1.0).contains(&self.market_rate)) {
            return Err(Error::invalid(format!(
                "macro.market_rate must lie within [0, 1), got {}",
                self.market_rate
            )));
        }
        Ok(())
    }
}

/// Demanded loans at one point of the curve.
pub fn demand(
    coeffs: &DemandCoefficients,
    annual_income: f64,
    market_rate: f64,
    property_price: f64,
    term_months: u32,
) -> f64 {
    coeffs.alpha
        + coeffs.beta_income * annual_income
        + coeffs.beta_rate * market_rate
        + coeffs.beta_price * property_price
        + coeffs.beta_term * f64::from(term_months)
        + coeffs.c
}

/// Lending capacity in millions of euros at one point of the curve.
pub fn supply_raw(
    coeffs: &SupplyCoefficients,
    indicators: &MacroIndicators,
    demand_loans: f64,
    term_months: u32,
) -> f64 {
    coeffs.alpha
        + coeffs.beta_rate * indicators.market_rate
        + coeffs.beta_gdp * indicators.gdp
        + coeffs.beta_index * indicators.price_index
        + coeffs.beta_inflation * indicators.inflation
        + coeffs.beta_demand * demand_loans
        + coeffs.beta_term * f64::from(term_months)
}

/// Convert capacity (millions of euros) into financeable loans at the given
/// financed price per transaction.
pub fn supply_loans(supply_raw_millions: f64, discounted_price: f64) -> Result<f64, Error> {
    if !(discounted_price.is_finite() && discounted_price > 0.0) {
        return Err(Error::invalid(format!(
            "discounted_price must be > 0, got {discounted_price}"
        )));
    }
    Ok(supply_raw_millions * 1.0e6 / discounted_price)
}

/// One duration step of a market sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketPoint {
    pub duration_years: u32,
    pub term_months: u32,
    /// Demanded loans.
    pub demand: f64,
    /// Lending capacity, millions of euros.
    pub supply_raw: f64,
    /// Capacity converted into financeable loans.
    pub supply_loans: f64,
    /// Change vs the previous sweep row, percent; None on the first row.
    pub demand_step_variation: Option<f64>,
    /// Change vs the previous sweep row, percent; None on the first row.
    pub supply_step_variation: Option<f64>,
    /// demand / supply_loans: how many households compete for one loan.
    pub gap_ratio: f64,
}

/// Demand value fed into the supply curve in compat mode.
///
/// The originally published sweep carried two transcription slips in the
/// demand column its supply figures were computed from: the 20-year supply
/// row used D = 733,949 (24.4 below the curve), the 60-year row used
/// D = 2,173,923 (50.4 below), and the rows between fade the 20-year slip out
/// linearly. Compat mode replays exactly that arithmetic so those published
/// figures stay reproducible to the cent; the *reported* demand column is
/// always the self-consistent curve value.
fn compat_demand_feed(self_consistent: f64, term_months: u32) -> f64 {
    const OFFSET_AT_240: f64 = 24.4;
    const OFFSET_AT_720: f64 = 50.4;
    if term_months == 720 {
        self_consistent - OFFSET_AT_720
    } else {
        self_consistent - OFFSET_AT_240 * (720.0 - f64::from(term_months)) / 480.0
    }
}

/// Sweep both curves across a duration range.
///
/// With `paper_compat` set, the demand value *fed into the supply curve*
/// follows the published sweep's arithmetic (see [`compat_demand_feed`]);
/// everything else, including the reported demand column, is identical.
#[allow(clippy::too_many_arguments)]
pub fn sweep_market(
    demand_coeffs: &DemandCoefficients,
    supply_coeffs: &SupplyCoefficients,
    indicators: &MacroIndicators,
    profile: &HouseholdProfile,
    property_price: f64,
    years: YearRange,
    paper_compat: bool,
) -> Result<Vec<MarketPoint>, Error> {
    demand_coeffs.validate()?;
    supply_coeffs.validate()?;
    indicators.validate()?;
    profile.validate()?;
    years.validate()?;
    let price_per_loan = discounted_price(property_price, profile.contribution_rate)?;

    let mut points = Vec::with_capacity(years.len());
    let mut previous: Option<(f64, f64)> = None;
    for year in years.years() {
        let term_months = year * 12;
        let d = demand(
            demand_coeffs,
            profile.annual_income,
            indicators.market_rate,
            property_price,
            term_months,
        );
        let d_fed = if paper_compat {
            compat_demand_feed(d, term_months)
        } else {
            d
        };
        let s_raw = supply_raw(supply_coeffs, indicators, d_fed, term_months);
        let s_loans = supply_loans(s_raw, price_per_loan)?;
        if s_loans <= 0.0 {
            return Err(Error::invalid(format!(
                "supply_loans is {s_loans} at {year} years; the demand/supply ratio is undefined"
            )));
        }
        let (d_var, s_var) = match previous {
            Some((d_prev, s_prev)) => (step_variation(d_prev, d), step_variation(s_prev, s_loans)),
            None => (None, None),
        };
        previous = Some((d, s_loans));
        points.push(MarketPoint {
            duration_years: year,
            term_months,
            demand: d,
            supply_raw: s_raw,
            supply_loans: s_loans,
            demand_step_variation: d_var,
            supply_step_variation: s_var,
            gap_ratio: d / s_loans,
        });
    }
    Ok(points)
}

/// Step-over-step change in percent, `(x_k - x_{k-1}) / x_{k-1} * 100`;
/// None when the previous value is zero.
fn step_variation(previous: f64, current: f64) -> Option<f64> {
    if previous == 0.0 {
        return None;
    }
    Some((current - previous) / previous * 100.0)
}

/// Demand/supply comparison at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketGap {
    /// demand - supply_loans (positive means shortage).
    pub difference: f64,
    /// demand / supply_loans.
    pub ratio: f64,
    /// Whether |difference| fits within the tolerance the caller passed.
    pub balanced: bool,
}

/// Tolerance below which a market point counts as balanced, in loans.
pub const DEFAULT_GAP_EPSILON: f64 = 1.0;

/// Compare demand against financeable supply at one point.
pub fn market_gap(point: &MarketPoint, epsilon: f64) -> Result<MarketGap, Error> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::invalid(format!(
            "epsilon must be >= 0, got {epsilon}"
        )));
    }
    if point.supply_loans == 0.0 {
        return Err(Error::invalid(
            "supply_loans is zero; the demand/supply ratio is undefined",
        ));
    }
    let difference = point.demand - point.supply_loans;
    Ok(MarketGap {
        difference,
        ratio: point.demand / point.supply_loans,
        balanced: difference.abs() <= epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
        assert!(
            (actual - expected).abs() <= tol,
            "{what}: got {actual}, expected {expected} within {tol}"
        );
    }

    fn baseline_profile() -> HouseholdProfile {
        HouseholdProfile::new(50_000.0, 0.30).unwrap()
    }

    #[test]
    fn demand_reference_points() {
        let c = DemandCoefficients::baseline();
        let d240 = demand(&c, 50_000.0, 0.035, 190_680.0, 240);
        let d720 = demand(&c, 50_000.0, 0.035, 190_680.0, 720);
        assert_close(d240, 733_973.40, 0.01, "D(240)");
        assert_close(d720, 2_173_973.40, 0.01, "D(720)");
    }

    #[test]
    fn alternate_demand_reference_point() {
        let c = DemandCoefficients::alternate();
        let d = demand(&c, 50_000.0, 0.035, 190_680.0, 720);
        assert_close(d, 3_619_579.42, 0.01, "alternate D(720)");
    }

    #[test]
    fn supply_reference_points() {
        let c = SupplyCoefficients::baseline();
        let m = MacroIndicators::baseline();
        // Fed with the published demand inputs these land on the published
        // capacity figures to the thousandth of a million.
        assert_close(
            supply_raw(&c, &m, 733_949.0, 240),
            24_077.917,
            1e-3,
            "S_raw(240)",
        );
        assert_close(
            supply_raw(&c, &m, 2_173_923.0, 720),
            49_037.657,
            1e-3,
            "S_raw(720)",
        );
        // Fed with the self-consistent demand the 20-year point lands 0.244
        // million higher (0.01 per demanded loan * 24.4 loans).
        assert_close(
            supply_raw(&c, &m, 733_973.40, 240),
            24_078.161,
            1e-3,
            "S_raw(240) self",
        );
    }

    #[test]
    fn supply_loans_is_direct_division() {
        let loans = supply_loans(24_077.917, 133_476.0).unwrap();
        assert_close(loans, 180_391.358_7, 1e-3, "loans(240)");
        let loans = supply_loans(49_037.657, 133_476.0).unwrap();
        assert_close(loans, 367_389.320_9, 1e-3, "loans(720)");
        assert!(supply_loans(1.0, 0.0).is_err());
        assert!(supply_loans(1.0, -5.0).is_err());
    }

    #[test]
    fn sweep_matches_pointwise_recomputation() {
        let years = YearRange::new(20, 60, 5).unwrap();
        let points = sweep_market(
            &DemandCoefficients::baseline(),
            &SupplyCoefficients::baseline(),
            &MacroIndicators::baseline(),
            &baseline_profile(),
            190_680.0,
            years,
            false,
        )
        .unwrap();
        assert_eq!(points.len(), 9);
        for p in &points {
            let d = demand(
                &DemandCoefficients::baseline(),
                50_000.0,
                0.035,
                190_680.0,
                p.term_months,
            );
            let s_raw = supply_raw(
                &SupplyCoefficients::baseline(),
                &MacroIndicators::baseline(),
                d,
                p.term_months,
            );
            assert_eq!(p.demand, d);
            assert_eq!(p.supply_raw, s_raw);
            assert_eq!(p.supply_loans, supply_loans(s_raw, 133_476.0).unwrap());
        }
    }

    #[test]
    fn sweep_demand_column_is_identical_with_and_without_compat() {
        let years = YearRange::new(20, 60, 5).unwrap();
        let run = |compat| {
            sweep_market(
                &DemandCoefficients::baseline(),
                &SupplyCoefficients::baseline(),
                &MacroIndicators::baseline(),
                &baseline_profile(),
                190_680.0,
                years,
                compat,
            )
            .unwrap()
        };
        for (a, b) in run(false).iter().zip(run(true).iter()) {
            assert_eq!(a.demand, b.demand);
            assert!(a.supply_raw >= b.supply_raw, "compat feeds a lower demand");
        }
    }

    #[test]
    fn compat_sweep_reproduces_published_anchors() {
        let years = YearRange::new(20, 60, 5).unwrap();
        let points = sweep_market(
            &DemandCoefficients::baseline(),
            &SupplyCoefficients::baseline(),
            &MacroIndicators::baseline(),
            &baseline_profile(),
            190_680.0,
            years,
            true,
        )
        .unwrap();
        assert_close(points[0].supply_raw, 24_077.917, 1e-3, "compat S_raw(240)");
        assert_close(points[8].supply_raw, 49_037.657, 1e-3, "compat S_raw(720)");
        assert_close(
            points[0].supply_loans,
            180_391.36,
            0.01,
            "compat loans(240)",
        );
    }

    #[test]
    fn step_variations_match_published_sweep() {
        let years = YearRange::new(20, 60, 5).unwrap();
        let points = sweep_market(
            &DemandCoefficients::baseline(),
            &SupplyCoefficients::baseline(),
            &MacroIndicators::baseline(),
            &baseline_profile(),
            190_680.0,
            years,
            true,
        )
        .unwrap();
        assert_eq!(points[0].demand_step_variation, None);
        assert_eq!(points[0].supply_step_variation, None);
        assert_close(
            points[1].demand_step_variation.unwrap(),
            24.52,
            0.01,
            "Var D at 25y",
        );
        assert_close(
            points[1].supply_step_variation.unwrap(),
            12.96,
            0.01,
            "Var S at 25y",
        );
        assert_close(
            points[8].demand_step_variation.unwrap(),
            9.03,
            0.01,
            "Var D at 60y",
        );
        assert_close(
            points[8].supply_step_variation.unwrap(),
            6.79,
            0.01,
            "Var S at 60y",
        );
    }

    #[test]
    fn gap_widens_with_longer_terms() {
        let years = YearRange::new(20, 60, 1).unwrap();
        let points = sweep_market(
            &DemandCoefficients::baseline(),
            &SupplyCoefficients::baseline(),
            &MacroIndicators::baseline(),
            &baseline_profile(),
            190_680.0,
            years,
            false,
        )
        .unwrap();
        assert_close(points[0].gap_ratio, 4.0687, 1e-3, "gap ratio at 20y");
        assert_close(points[40].gap_ratio, 5.9173, 1e-3, "gap ratio at 60y");
        for pair in points.windows(2) {
            assert!(
                pair[1].gap_ratio > pair[0].gap_ratio,
                "ratio must widen: {} -> {}",
                pair[0].gap_ratio,
                pair[1].gap_ratio
            );
        }
    }

    #[test]
    fn market_gap_reference_point() {
        let years = YearRange::new(20, 20, 1).unwrap();
        let points = sweep_market(
            &DemandCoefficients::baseline(),
            &SupplyCoefficients::baseline(),
            &MacroIndicators::baseline(),
            &baseline_profile(),
            190_680.0,
            years,
            true,
        )
        .unwrap();
        let gap = market_gap(&points[0], DEFAULT_GAP_EPSILON).unwrap();
        assert_close(gap.difference, 553_582.0, 1.0, "shortage at 20y");
        assert!(!gap.balanced);
        assert!(gap.ratio > 4.0);
    }

    #[test]
    fn market_gap_balanced_when_curves_meet() {
        let point = MarketPoint {
            duration_years: 20,
            term_months: 240,
            demand: 1000.0,
            supply_raw: 133.476,
            supply_loans: 1000.0,
            demand_step_variation: None,
            supply_step_variation: None,
            gap_ratio: 1.0,
        };
        let gap = market_gap(&point, 1.0).unwrap();
        assert!(gap.balanced);
        assert_eq!(gap.difference, 0.0);
        assert_eq!(gap.ratio, 1.0);

        let zero_supply = MarketPoint {
            supply_loans: 0.0,
            ..point
        };
        assert!(market_gap(&zero_supply, 1.0).is_err());
        assert!(market_gap(&point, -1.0).is_err());
    }

    #[test]
    fn zeroed_coefficient_makes_its_input_irrelevant() {
        let mut c = DemandCoefficients::baseline();
        c.beta_income = 0.0;
        let low = demand(&c, 10_000.0, 0.035, 190_680.0, 240);
        let high = demand(&c, 900_000.0, 0.035, 190_680.0, 240);
        assert_eq!(low, high);
    }

    #[test]
    fn validation_rejects_non_finite_inputs() {
        let mut c = DemandCoefficients::baseline();
        c.beta_term = f64::NAN;
        assert!(c.validate().is_err());

        let mut s = SupplyCoefficients::baseline();
        s.beta_demand = f64::INFINITY;
        assert!(s.validate().is_err());

        let mut m = MacroIndicators::baseline();
        m.gdp = -1.0;
        assert!(m.validate().is_err());
        m = MacroIndicators::baseline();
        m.market_rate = 1.0;
        assert!(m.validate().is_err());
    }
}
