//! Fixed-rate annuity (constant-payment) loan mathematics.
//!
//! The periodic payment of a fully amortizing loan follows the closed form
//!
//! ```text
//! M = P * i / (1 - (1 + i)^-N),    i = r / n
//! ```
//!
//! with principal `P`, nominal annual rate `r`, `n` payments per year and `N`
//! total payments. As `N` grows the payment decays toward the interest floor
//! `P * i` while the total repaid `E = M * N` keeps climbing: at 3.9 % on
//! 133,476 € the move from 240 to 720 monthly payments cuts the payment by
//! 40 % (801.82 -> 480.23) but raises the total repaid by 79.7 %.
//!
//! [`LoanTerms::amortization_schedule`] simulates the balance recursion
//! `b_{t+1} = b_t * (1 + i) - M` period by period. It is the independent
//! oracle for the closed form: a correct payment drives the final balance to
//! zero (within a cent), and the tests hold the two implementations to that.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::YearRange;

/// Below this per-period rate a loan is treated as interest-free and the
/// payment is the straight split `P / N` (the closed form degenerates to 0/0
/// at i = 0 and loses all precision just above it).
pub const ZERO_RATE_EPS: f64 = 1e-12;

/// A fully amortizing fixed-rate loan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoanTerms {
    /// Amount borrowed, in euros.
    pub principal: f64,
    /// Nominal annual rate as a fraction (0.039 = 3.9 %).
    pub annual_rate: f64,
    /// Payments per year (12 for monthly).
    pub payments_per_year: u32,
    /// Total number of payments over the life of the loan.
    pub term_months: u32,
}

impl LoanTerms {
    pub fn new(
        principal: f64,
        annual_rate: f64,
        payments_per_year: u32,
        term_months: u32,
    ) -> Result<Self, Error> {
        if !(principal.is_finite() && principal > 0.0) {
            return Err(Error::invalid(format!(
                "principal must be > 0, got {principal}"
            )));
        }
        if !(annual_rate.is_finite() && annual_rate >= 0.0) {
            return Err(Error::invalid(format!(
                "annual_rate must be >= 0, got {annual_rate}"
            )));
        }
        if payments_per_year == 0 {
            return Err(Error::invalid("payments_per_year must be >= 1"));
        }
        if term_months == 0 {
            return Err(Error::invalid("term_months must be >= 1"));
        }
        Ok(LoanTerms {
            principal,
            annual_rate,
            payments_per_year,
            term_months,
        })
    }

    /// Monthly-payment loan over `term_months` payments.
    pub fn monthly(principal: f64, annual_rate: f64, term_months: u32) -> Result<Self, Error> {
        Self::new(principal, annual_rate, 12, term_months)
    }

    /// Per-period rate i = r / n.
    pub fn rate_per_period(&self) -> f64 {
        self.annual_rate / f64::from(self.payments_per_year)
    }

    /// Constant periodic payment via the closed form, with the interest-free
    /// branch below [`ZERO_RATE_EPS`].
    pub fn monthly_payment(&self) -> f64 {
        let i = self.rate_per_period();
        let n = f64::from(self.term_months);
        if i < ZERO_RATE_EPS {
            return self.principal / n;
        }
        self.principal * i / (1.0 - (1.0 + i).powf(-n))
    }

    /// Interest floor `P * i`: the payment approaches but never reaches it as
    /// the term grows, which is why ever-longer loans stop helping.
    pub fn payment_floor(&self) -> f64 {
        self.principal * self.rate_per_period()
    }

    /// Simulate the repayment period by period.
    ///
    /// Each period accrues interest on the open balance, then applies the
    /// constant payment; the entries record the interest/principal split and
    /// the balance left after the payment. For a correct payment the final
    /// balance lands on zero within fractions of a cent.
    pub fn amortization_schedule(&self) -> Vec<SchedulePeriod> {
        let m = self.monthly_payment();
        let i = self.rate_per_period();
        // The balance is kept as an unevaluated sum `hi + lo`. Every period
        // multiplies the outstanding balance by (1 + i), so each period's
        // rounding error is amplified by the growth still to come; over a
        // 960-month, high-rate loan a bare f64 update drifts by several cents.
        // Capturing the exact product and sum errors (TwoProduct via fma,
        // TwoSum) keeps the closing balance as accurate as the payment itself.
        let mut hi = self.principal;
        let mut lo = 0.0_f64;
        let mut schedule = Vec::with_capacity(self.term_months as usize);
        for period in 1..=self.term_months {
            let interest_hi = hi * i;
            let interest_err = hi.mul_add(i, -interest_hi) + lo * i;
            let interest = interest_hi + interest_err;
            let principal_paid = m - interest;
            // hi + interest_hi - m, with every rounding error folded into lo.
            let (s1, e1) = two_sum(hi, interest_hi);
            let (s2, e2) = two_sum(s1, -m);
            let t = lo + interest_err + e1 + e2;
            hi = s2 + t;
            lo = (s2 - hi) + t;
            schedule.push(SchedulePeriod {
                period,
                interest,
                principal: principal_paid,
                balance: hi,
            });
        }
        schedule
    }
}

/// Error-free sum: returns `(fl(a + b), err)` with `a + b == fl(a + b) + err`
/// exactly (Knuth's TwoSum, valid for any magnitudes).
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bv = s - a;
    let av = s - bv;
    (s, (a - av) + (b - bv))
}

/// One period of a simulated repayment schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchedulePeriod {
    /// 1-based payment number.
    pub period: u32,
    /// Interest accrued this period (`balance * i`).
    pub interest: f64,
    /// Principal repaid this period (payment minus interest).
    pub principal: f64,
    /// Balance remaining after the payment.
    pub balance: f64,
}

/// Total amount repaid over the life of the loan: `E = M * N`.
pub fn total_debt(monthly_payment: f64, term_months: u32) -> f64 {
    monthly_payment * f64::from(term_months)
}

/// Increase of a total cost over a reference total, in percent:
/// `A = (E - E_ref) / E_ref * 100`.
pub fn relative_cost_increase(total_debt: f64, reference_debt: f64) -> Result<f64, Error> {
    if !(reference_debt.is_finite() && reference_debt > 0.0) {
        return Err(Error::invalid(format!(
            "reference_debt must be > 0, got {reference_debt}"
        )));
    }
    Ok((total_debt - reference_debt) / reference_debt * 100.0)
}

/// Share of monthly income consumed by the payment: `R_d = M / Y_monthly`.
pub fn debt_ratio(monthly_payment: f64, monthly_income: f64) -> Result<f64, Error> {
    if !(monthly_income.is_finite() && monthly_income > 0.0) {
        return Err(Error::invalid(format!(
            "monthly_income must be > 0, got {monthly_income}"
        )));
    }
    Ok(monthly_payment / monthly_income)
}

/// How many times one month of income covers the payment: `C_r = 1 / R_d`.
pub fn repayment_capacity(debt_ratio: f64) -> Result<f64, Error> {
    if !(debt_ratio.is_finite() && debt_ratio > 0.0) {
        return Err(Error::invalid(format!(
            "debt_ratio must be > 0, got {debt_ratio}"
        )));
    }
    Ok(1.0 / debt_ratio)
}

/// A household shopping for a mortgage: gross annual income and the share of
/// the property price it pays up front.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HouseholdProfile {
    /// Gross annual income, euros.
    pub annual_income: f64,
    /// Down-payment share of the property price, within [0, 1).
    pub contribution_rate: f64,
}

impl HouseholdProfile {
    pub fn new(annual_income: f64, contribution_rate: f64) -> Result<Self, Error> {
        let profile = HouseholdProfile {
            annual_income,
            contribution_rate,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.annual_income.is_finite() && self.annual_income > 0.0) {
            return Err(Error::invalid(format!(
                "household.annual_income must be > 0, got {}",
                self.annual_income
            )));
        }
        if !(self.contribution_rate.is_finite() && (0.0..1.0).contains(&self.contribution_rate)) {
            return Err(Error::invalid(format!(
                "household.contribution_rate must lie within [0, 1), got {}",
                self.contribution_rate
            )));
        }
        Ok(())
    }

    pub fn monthly_income(&self) -> f64 {
        self.annual_income / 12.0
    }
}

/// Part of the property price left to finance after the down payment:
/// `P_financed = price * (1 - contribution_rate)`.
pub fn discounted_price(property_price: f64, contribution_rate: f64) -> Result<f64, Error> {
    if !(property_price.is_finite() && property_price > 0.0) {
        return Err(Error::invalid(format!(
            "property_price must be > 0, got {property_price}"
        )));
    }
    if !(contribution_rate.is_finite() && (0.0..1.0).contains(&contribution_rate)) {
        return Err(Error::invalid(format!(
            "contribution_rate must lie within [0, 1), got {contribution_rate}"
        )));
    }
    Ok(property_price * (1.0 - contribution_rate))
}

/// Weights of the composite risk index
/// `I_r = w1*R_d + w2*A + w3*C_r + w4*(N / max_term_months)`.
///
/// The four terms stay on their natural scales (R_d around 0.12-0.20, A in
/// percent, C_r around 5-8.5, N/max <= 1), so with equal weights the cost
/// increase dominates at long horizons — that asymmetry is the point of the
/// index, not an accident to normalize away.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskWeights {
    /// Weight of the debt-ratio term.
    pub w1: f64,
    /// Weight of the relative-cost-increase term.
    pub w2: f64,
    /// Weight of the repayment-capacity term.
    pub w3: f64,
    /// Weight of the normalized-duration term.
    pub w4: f64,
    /// Longest term considered; normalizes N into [0, 1].
    pub max_term_months: u32,
}

impl RiskWeights {
    pub fn new(w1: f64, w2: f64, w3: f64, w4: f64, max_term_months: u32) -> Result<Self, Error> {
        let weights = RiskWeights {
            w1,
            w2,
            w3,
            w4,
            max_term_months,
        };
        weights.validate()?;
        Ok(weights)
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (name, w) in [
            ("w1", self.w1),
            ("w2", self.w2),
            ("w3", self.w3),
            ("w4", self.w4),
        ] {
            if !w.is_finite() {
                return Err(Error::invalid(format!(
                    "weights.{name} must be finite, got {w}"
                )));
            }
        }
        if self.max_term_months == 0 {
            return Err(Error::invalid("weights.max_term_months must be >= 1"));
        }
        Ok(())
    }
}

impl Default for RiskWeights {
    /// Equal quarter weights, durations normalized against 60 years of
    /// monthly payments.
    fn default() -> Self {
        RiskWeights {
            w1: 0.25,
            w2: 0.25,
            w3: 0.25,
            w4: 0.25,
            max_term_months: 720,
        }
    }
}

/// Composite risk index `I_r = w1*R_d + w2*A + w3*C_r + w4*(N / max)`.
pub fn risk_index(
    debt_ratio: f64,
    cost_increase: f64,
    capacity: f64,
    term_months: u32,
    weights: &RiskWeights,
) -> Result<f64, Error> {
    weights.validate()?;
    if term_months > weights.max_term_months {
        return Err(Error::invalid(format!(
            "term_months {} exceeds weights.max_term_months {}",
            term_months, weights.max_term_months
        )));
    }
    let normalized_term = f64::from(term_months) / f64::from(weights.max_term_months);
    Ok(weights.w1 * debt_ratio
        + weights.w2 * cost_increase
        + weights.w3 * capacity
        + weights.w4 * normalized_term)
}

/// One duration's worth of affordability metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsRow {
    pub duration_years: u32,
    /// Constant payment M, euros per month.
    pub monthly_payment: f64,
    /// Total repaid E = M * N, euros.
    pub total_debt: f64,
    /// Cost increase vs the table's shortest duration, percent.
    pub relative_increase: f64,
    /// Payment as a share of monthly income.
    pub debt_ratio: f64,
    /// Months of payments one month of income covers (1 / debt_ratio).
    pub repayment_capacity: f64,
    /// Composite risk index.
    pub risk_index: f64,
}

/// Build the affordability table across a duration range.
///
/// The financed principal is `property_price * (1 - contribution_rate)`; the
/// relative increase column is measured against the shortest duration in the
/// range. `monthly_income_override`, when given, replaces the household's
/// `annual_income / 12` in the debt-ratio column only — payments are a
/// function of the loan, not of who takes it.
pub fn build_metrics_table(
    profile: &HouseholdProfile,
    loan_rate: f64,
    property_price: f64,
    years: YearRange,
    weights: &RiskWeights,
    monthly_income_override: Option<f64>,
) -> Result<Vec<MetricsRow>, Error> {
    profile.validate()?;
    years.validate()?;
    weights.validate()?;
    if let Some(income) = monthly_income_override {
        if !(income.is_finite() && income > 0.0) {
            return Err(Error::invalid(format!(
                "monthly_income_override must be > 0, got {income}"
            )));
        }
    }
    let principal = discounted_price(property_price, profile.contribution_rate)?;
    let monthly_income = monthly_income_override.unwrap_or_else(|| profile.monthly_income());

    let mut reference_debt = None;
    let mut rows = Vec::with_capacity(years.len());
    for year in years.years() {
        let term_months = year * 12;
        let terms = LoanTerms::monthly(principal, loan_rate, term_months)?;
        let m = terms.monthly_payment();
        let e = total_debt(m, term_months);
        let e_ref = *reference_debt.get_or_insert(e);
        let a = relative_cost_increase(e, e_ref)?;
        let rd = debt_ratio(m, monthly_income)?;
        let cr = repayment_capacity(rd)?;
        let ir = risk_index(rd, a, cr, term_months, weights)?;
        rows.push(MetricsRow {
            duration_years: year,
            monthly_payment: m,
            total_debt: e,
            relative_increase: a,
            debt_ratio: rd,
            repayment_capacity: cr,
            risk_index: ir,
        });
    }
    Ok(rows)
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

    // 190,680 € price less a 30 % down payment.
    const PRINCIPAL: f64 = 133_476.0;

    #[test]
    fn payment_matches_reference_at_20_and_60_years() {
        let m240 = LoanTerms::monthly(PRINCIPAL, 0.039, 240)
            .unwrap()
            .monthly_payment();
        let m720 = LoanTerms::monthly(PRINCIPAL, 0.039, 720)
            .unwrap()
            .monthly_payment();
        assert_close(m240, 801.8224, 5e-4, "M(240)");
        assert_close(m720, 480.2325, 5e-4, "M(720)");
    }

    #[test]
    fn payment_at_lower_rate_agrees_with_schedule_oracle() {
        // Frozen from the schedule simulation: the payment that drives the
        // 240-period balance at 3.5 % to zero.
        let terms = LoanTerms::monthly(PRINCIPAL, 0.035, 240).unwrap();
        let m = terms.monthly_payment();
        assert_close(m, 774.1070331751116, 1e-9, "M(240) at 3.5 %");
        let final_balance = terms.amortization_schedule().last().unwrap().balance;
        assert!(final_balance.abs() < 1e-6, "oracle balance {final_balance}");
    }

    #[test]
    fn zero_rate_payment_is_straight_principal_split() {
        let m = LoanTerms::monthly(PRINCIPAL, 0.0, 240)
            .unwrap()
            .monthly_payment();
        assert_close(m, 556.15, 1e-9, "M at 0 %");
        assert_eq!(m, PRINCIPAL / 240.0);
    }

    #[test]
    fn payment_stays_above_interest_floor() {
        for term in [240u32, 480, 720, 960] {
            let terms = LoanTerms::monthly(PRINCIPAL, 0.039, term).unwrap();
            let floor = terms.payment_floor();
            assert!(
                terms.monthly_payment() > floor,
                "M({term}) fell to the floor {floor}"
            );
        }
    }

    #[test]
    fn schedule_zeroes_out_and_splits_add_up() {
        let terms = LoanTerms::monthly(PRINCIPAL, 0.039, 240).unwrap();
        let schedule = terms.amortization_schedule();
        assert_eq!(schedule.len(), 240);
        assert!(schedule.last().unwrap().balance.abs() < 0.01);

        let paid: f64 = schedule.iter().map(|p| p.interest + p.principal).sum();
        let e = total_debt(terms.monthly_payment(), 240);
        assert_close(paid, e, 0.01, "sum of schedule payments vs E");
    }

    #[test]
    fn schedule_stays_accurate_at_the_extreme_corner() {
        // 10M euros at 19.9% over 960 months: the annuity factor is ~4.7e8,
        // so one ulp of payment rounding alone moves the closing balance by
        // over a cent. The compensated recursion leaves exactly that floor —
        // anything materially larger would mean the recursion itself drifts.
        let terms = LoanTerms::monthly(1.0e7, 0.199, 960).unwrap();
        let schedule = terms.amortization_schedule();
        assert!(
            schedule.last().unwrap().balance.abs() < 0.0125,
            "corner balance {}",
            schedule.last().unwrap().balance
        );
    }

    #[test]
    fn one_period_loan_repays_principal_plus_one_interest() {
        let terms = LoanTerms::monthly(100.0, 0.12, 1).unwrap();
        assert_close(terms.monthly_payment(), 101.0, 1e-9, "single payment");
        let schedule = terms.amortization_schedule();
        assert_eq!(schedule.len(), 1);
        assert_close(schedule[0].interest, 1.0, 1e-9, "interest");
        assert_close(schedule[0].principal, 100.0, 1e-9, "principal");
    }

    #[test]
    fn total_debt_reference_values() {
        let m240 = LoanTerms::monthly(PRINCIPAL, 0.039, 240)
            .unwrap()
            .monthly_payment();
        let m720 = LoanTerms::monthly(PRINCIPAL, 0.039, 720)
            .unwrap()
            .monthly_payment();
        assert_close(total_debt(m240, 240), 192_437.4, 0.1, "E(240)");
        assert_close(total_debt(m720, 720), 345_767.4, 0.1, "E(720)");
    }

    #[test]
    fn cost_increase_reference_values() {
        assert_eq!(relative_cost_increase(192_437.4, 192_437.4).unwrap(), 0.0);
        let a = relative_cost_increase(345_767.414, 192_437.366).unwrap();
        assert_close(a, 79.677898, 1e-4, "A(720)");
        assert!(relative_cost_increase(1.0, 0.0).is_err());
        assert!(relative_cost_increase(1.0, -5.0).is_err());
    }

    #[test]
    fn debt_ratio_and_capacity_reference_values() {
        let rd = debt_ratio(801.8224, 4052.99).unwrap();
        assert_close(rd, 0.1978343, 1e-6, "R_d(240)");
        let cr = repayment_capacity(rd).unwrap();
        assert_close(cr, 5.054736, 1e-4, "C_r(240)");
        assert!(debt_ratio(800.0, 0.0).is_err());
        assert!(repayment_capacity(0.0).is_err());
        assert!(repayment_capacity(-1.0).is_err());
    }

    #[test]
    fn risk_index_reference_values() {
        let w = RiskWeights::default();
        let ir20 = risk_index(0.1978343, 0.0, 5.054736, 240, &w).unwrap();
        assert_close(ir20, 1.396476, 1e-5, "I_r(240)");
        let ir30 = risk_index(0.1553328, 17.774937, 6.437790, 360, &w).unwrap();
        assert_close(ir30, 6.217015, 1e-5, "I_r(360)");
    }

    #[test]
    fn risk_index_rejects_terms_beyond_cap() {
        let w = RiskWeights::default();
        assert!(risk_index(0.2, 0.0, 5.0, 721, &w).is_err());
        assert!(risk_index(0.2, 0.0, 5.0, 720, &w).is_ok());
    }

    #[test]
    fn risk_index_scales_linearly_in_weights() {
        let w = RiskWeights::default();
        let doubled = RiskWeights::new(0.5, 0.5, 0.5, 0.5, 720).unwrap();
        let base = risk_index(0.15, 30.0, 6.5, 480, &w).unwrap();
        let twice = risk_index(0.15, 30.0, 6.5, 480, &doubled).unwrap();
        assert_eq!(twice, 2.0 * base);
    }

    #[test]
    fn loan_terms_reject_nonsense() {
        assert!(LoanTerms::monthly(0.0, 0.039, 240).is_err());
        assert!(LoanTerms::monthly(-1.0, 0.039, 240).is_err());
        assert!(LoanTerms::monthly(1000.0, -0.01, 240).is_err());
        assert!(LoanTerms::monthly(1000.0, f64::NAN, 240).is_err());
        assert!(LoanTerms::monthly(1000.0, 0.039, 0).is_err());
        assert!(LoanTerms::new(1000.0, 0.039, 0, 240).is_err());
    }

    #[test]
    fn household_profile_bounds() {
        assert!(HouseholdProfile::new(50_000.0, 0.30).is_ok());
        assert!(HouseholdProfile::new(0.0, 0.30).is_err());
        assert!(HouseholdProfile::new(50_000.0, 1.0).is_err());
        assert!(HouseholdProfile::new(50_000.0, -0.1).is_err());
    }

    #[test]
    fn discounted_price_reference_value() {
        assert_eq!(discounted_price(190_680.0, 0.30).unwrap(), PRINCIPAL);
        assert!(discounted_price(0.0, 0.30).is_err());
        assert!(discounted_price(190_680.0, 1.0).is_err());
    }

    #[test]
    fn metrics_table_shape_and_reference_row() {
        let profile = HouseholdProfile::new(50_000.0, 0.30).unwrap();
        let years = YearRange::new(20, 60, 1).unwrap();
        let rows = build_metrics_table(
            &profile,
            0.039,
            190_680.0,
            years,
            &RiskWeights::default(),
            Some(4053.00),
        )
        .unwrap();
        assert_eq!(rows.len(), 41);
        assert_eq!(rows[0].duration_years, 20);
        assert_eq!(rows[0].relative_increase, 0.0);
        assert_close(rows[0].monthly_payment, 801.8224, 5e-4, "row 20 M");
        assert_close(rows[40].risk_index, 22.309012, 1e-5, "row 60 I_r");
        // The increase column is monotone: longer loans always cost more.
        for pair in rows.windows(2) {
            assert!(pair[1].relative_increase > pair[0].relative_increase);
        }
    }

    #[test]
    fn metrics_table_single_year_has_zero_increase() {
        let profile = HouseholdProfile::new(50_000.0, 0.30).unwrap();
        let years = YearRange::new(20, 20, 1).unwrap();
        let rows = build_metrics_table(
            &profile,
            0.039,
            190_680.0,
            years,
            &RiskWeights::default(),
            None,
        )
        .unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].relative_increase, 0.0);
    }

    #[test]
    fn metrics_table_without_override_uses_household_income() {
        let profile = HouseholdProfile::new(50_000.0, 0.30).unwrap();
        let years = YearRange::new(20, 20, 1).unwrap();
        let rows = build_metrics_table(
            &profile,
            0.039,
            190_680.0,
            years,
            &RiskWeights::default(),
            None,
        )
        .unwrap();
        let expected = rows[0].monthly_payment / (50_000.0 / 12.0);
        assert_eq!(rows[0].debt_ratio, expected);
    }

    #[test]
    fn metrics_table_rejects_bad_override() {
        let profile = HouseholdProfile::new(50_000.0, 0.30).unwrap();
        let years = YearRange::new(20, 21, 1).unwrap();
        let err = build_metrics_table(
            &profile,
            0.039,
            190_680.0,
            years,
            &RiskWeights::default(),
            Some(0.0),
        );
        assert!(err.is_err());
    }
}
