//! Recovering the parameters a reference table was generated from.
//!
//! Three independent fits:
//!
//! * the risk-index weights, by least squares over the rows (the index is
//!   linear in its weights, so on clean data the fit is exact; on a printed
//!   table the 4-to-7-decimal rounding shows up as a residual of ~1e-6).
//!   The solve goes through Householder QR on the regressor matrix rather
//!   than the normal equations: the regressor columns are strongly correlated
//!   (the cost-increase and duration columns track each other, as do the two
//!   ratio columns), so forming X'X squares a ~2e5 condition number past 1e10
//!   and caps recovery accuracy near 1e-7 — QR keeps round-trips at ~1e-11;
//! * the monthly income behind the debt-ratio column, since `R_d = M / Y_m`
//!   makes every row an estimate `M / R_d`;
//! * the contract rate behind the payment column, by bisecting the closed
//!   form on the shortest-duration row and scoring the result against every
//!   other row.

use serde::{Deserialize, Serialize};

use crate::annuity::{LoanTerms, MetricsRow, RiskWeights};
use crate::error::Error;

/// Conditioning threshold above which a weight fit is flagged as
/// ill-conditioned and its result should be treated with suspicion.
pub const CONDITION_WARN_THRESHOLD: f64 = 1e8;

/// Result of the least-squares weight fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightFit {
    pub weights: RiskWeights,
    /// Largest |predicted - actual| risk index across the rows.
    pub max_residual: f64,
    /// Cheap conditioning estimate: ratio of the extreme |R| diagonals of the
    /// QR factorization. Compare against [`CONDITION_WARN_THRESHOLD`].
    pub condition: f64,
}

impl WeightFit {
    pub fn ill_conditioned(&self) -> bool {
        self.condition > CONDITION_WARN_THRESHOLD
    }
}

/// Fit the four risk-index weights to a table by least squares.
///
/// Solves the overdetermined system of regressors `[R_d, A, C_r, N/max]`
/// against the risk-index column via Householder QR. Rows must span at least
/// four durations with linearly independent regressors.
pub fn fit_risk_weights(rows: &[MetricsRow], max_term_months: u32) -> Result<WeightFit, Error> {
    if rows.len() < 4 {
        return Err(Error::Calibration(format!(
            "need at least 4 rows to fit 4 weights, got {}",
            rows.len()
        )));
    }
    if max_term_months == 0 {
        return Err(Error::invalid("max_term_months must be >= 1"));
    }
    let max_term = f64::from(max_term_months);
    let regressors: Vec<[f64; 4]> = rows
        .iter()
        .map(|r| {
            [
                r.debt_ratio,
                r.relative_increase,
                r.repayment_capacity,
                f64::from(r.duration_years) * 12.0 / max_term,
            ]
        })
        .collect();
    for (x, row) in regressors.iter().zip(rows) {
        if x.iter().any(|v| !v.is_finite()) || !row.risk_index.is_finite() {
            return Err(Error::Calibration(format!(
                "non-finite regressor at {} years",
                row.duration_years
            )));
        }
    }
    let targets: Vec<f64> = rows.iter().map(|r| r.risk_index).collect();

    let (solution, condition) = qr_least_squares(&regressors, &targets)?;
    let weights = RiskWeights::new(
        solution[0],
        solution[1],
        solution[2],
        solution[3],
        max_term_months,
    )?;

    let max_residual = regressors
        .iter()
        .zip(rows)
        .map(|(x, row)| {
            let predicted =
                solution[0] * x[0] + solution[1] * x[1] + solution[2] * x[2] + solution[3] * x[3];
            (predicted - row.risk_index).abs()
        })
        .fold(0.0f64, f64::max);

    Ok(WeightFit {
        weights,
        max_residual,
        condition,
    })
}

/// Least squares for a tall m x 4 system via Householder QR.
///
/// Returns the minimizer and the ratio of extreme |R| diagonals as a cheap
/// conditioning estimate. A column whose reduced norm collapses relative to
/// the largest column norm means linearly dependent regressors.
fn qr_least_squares(matrix: &[[f64; 4]], rhs: &[f64]) -> Result<([f64; 4], f64), Error> {
    let m = matrix.len();
    debug_assert!(m >= 4 && rhs.len() == m);
    let mut a: Vec<[f64; 4]> = matrix.to_vec();
    let mut b: Vec<f64> = rhs.to_vec();

    let largest_column_norm = (0..4)
        .map(|j| matrix.iter().map(|row| row[j] * row[j]).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    if largest_column_norm == 0.0 {
        return Err(Error::Calibration("all regressors are zero".into()));
    }
    let rank_tolerance = 1e-12 * largest_column_norm;

    let mut r_diag = [0.0f64; 4];
    for k in 0..4 {
        // Reflect column k below the diagonal onto e_k (LINPACK convention:
        // the Householder vector v ends up stored in the column, v[k] >= 1).
        let mut norm = a[k..].iter().map(|row| row[k] * row[k]).sum::<f64>().sqrt();
        if norm <= rank_tolerance {
            return Err(Error::Calibration(
                "regressor columns are linearly dependent; the weights are not identifiable".into(),
            ));
        }
        if a[k][k] < 0.0 {
            norm = -norm;
        }
        for row in a[k..].iter_mut() {
            row[k] /= norm;
        }
        a[k][k] += 1.0;
        for j in k + 1..4 {
            let dot: f64 = a[k..].iter().map(|row| row[k] * row[j]).sum();
            let t = -dot / a[k][k];
            for row in a[k..].iter_mut() {
                row[j] += t * row[k];
            }
        }
        let dot: f64 = a[k..].iter().zip(&b[k..]).map(|(row, v)| row[k] * v).sum();
        let t = -dot / a[k][k];
        for (row, v) in a[k..].iter().zip(b[k..].iter_mut()) {
            *v += t * row[k];
        }
        r_diag[k] = -norm;
    }

    let mut x = [0.0f64; 4];
    for k in (0..4).rev() {
        let mut sum = b[k];
        for j in k + 1..4 {
            sum -= a[k][j] * x[j];
        }
        x[k] = sum / r_diag[k];
    }

    let largest = r_diag.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
    let smallest = r_diag.iter().fold(f64::INFINITY, |acc, r| acc.min(r.abs()));
    Ok((x, largest / smallest))
}

/// Income estimate recovered from the debt-ratio column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncomeEstimate {
    /// Mean of the per-row estimates `M / R_d`, euros per month.
    pub mean: f64,
    /// Max minus min of the per-row estimates; near zero when the table
    /// really was generated from one income.
    pub spread: f64,
}

/// Recover the monthly income behind the debt-ratio column.
pub fn infer_monthly_income(rows: &[MetricsRow]) -> Result<IncomeEstimate, Error> {
    if rows.is_empty() {
        return Err(Error::Calibration(
            "cannot infer income from an empty table".into(),
        ));
    }
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for row in rows {
        if !(row.debt_ratio.is_finite() && row.debt_ratio > 0.0) {
            return Err(Error::Calibration(format!(
                "debt_ratio must be > 0 to imply an income, got {} at {} years",
                row.debt_ratio, row.duration_years
            )));
        }
        let estimate = row.monthly_payment / row.debt_ratio;
        sum += estimate;
        min = min.min(estimate);
        max = max.max(estimate);
    }
    Ok(IncomeEstimate {
        mean: sum / rows.len() as f64,
        spread: max - min,
    })
}

/// Rate estimate recovered from the payment column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    /// Annual rate as a fraction.
    pub rate: f64,
    /// Largest |closed-form payment - table payment| across all rows at the
    /// recovered rate.
    pub max_payment_residual: f64,
}

/// Recover the contract rate behind the payment column.
///
/// Bisects the closed form on the shortest-duration row until the bracket
/// collapses below 1e-10, then scores the recovered rate against every row.
/// The payment is strictly increasing in the rate, so a bracket whose
/// endpoints straddle the target payment pins the rate uniquely.
pub fn infer_loan_rate(
    rows: &[MetricsRow],
    principal: f64,
    bracket: (f64, f64),
) -> Result<RateEstimate, Error> {
    if rows.is_empty() {
        return Err(Error::Calibration(
            "cannot infer a rate from an empty table".into(),
        ));
    }
    if !(principal.is_finite() && principal > 0.0) {
        return Err(Error::invalid(format!(
            "principal must be > 0, got {principal}"
        )));
    }
    let (mut lo, mut hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
        return Err(Error::invalid(format!(
            "rate bracket must satisfy 0 <= lo < hi, got ({lo}, {hi})"
        )));
    }

    let anchor = &rows[0];
    let term_months = anchor
        .duration_years
        .checked_mul(12)
        .ok_or_else(|| Error::invalid("duration overflows a month count"))?;
    let payment_at = |rate: f64| -> Result<f64, Error> {
        Ok(LoanTerms::monthly(principal, rate, term_months)?.monthly_payment())
    };

    let target = anchor.monthly_payment;
    let f_lo = payment_at(lo)? - target;
    let f_hi = payment_at(hi)? - target;
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(Error::Calibration(format!(
            "bracket ({lo}, {hi}) does not straddle the {}-year payment {target}",
            anchor.duration_years
        )));
    }

    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if payment_at(mid)? - target <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rate = 0.5 * (lo + hi);

    let mut max_payment_residual = 0.0f64;
    for row in rows {
        let months = row
            .duration_years
            .checked_mul(12)
            .ok_or_else(|| Error::invalid("duration overflows a month count"))?;
        let predicted = LoanTerms::monthly(principal, rate, months)?.monthly_payment();
        max_payment_residual = max_payment_residual.max((predicted - row.monthly_payment).abs());
    }
    Ok(RateEstimate {
        rate,
        max_payment_residual,
    })
}

/// Everything the `calibrate` command reports for one table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub weights: WeightFit,
    pub income: IncomeEstimate,
    pub rate: RateEstimate,
}

/// Default search bracket for the contract rate: anything from 0.1 % to 20 %.
pub const DEFAULT_RATE_BRACKET: (f64, f64) = (0.001, 0.20);

/// Run all three fits against one table.
pub fn calibrate_table(
    rows: &[MetricsRow],
    principal: f64,
    bracket: (f64, f64),
    max_term_months: u32,
) -> Result<CalibrationReport, Error> {
    Ok(CalibrationReport {
        weights: fit_risk_weights(rows, max_term_months)?,
        income: infer_monthly_income(rows)?,
        rate: infer_loan_rate(rows, principal, bracket)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annuity::{build_metrics_table, HouseholdProfile};
    use crate::YearRange;

    fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
        assert!(
            (actual - expected).abs() <= tol,
            "{what}: got {actual}, expected {expected} within {tol}"
        );
    }

    /// Full-precision table generated from known parameters.
    fn synthetic_table(weights: &RiskWeights) -> Vec<MetricsRow> {
        let profile = HouseholdProfile::new(50_000.0, 0.30).unwrap();
        let years = YearRange::new(20, 60, 1).unwrap();
        build_metrics_table(&profile, 0.039, 190_680.0, years, weights, Some(4053.0)).unwrap()
    }

    #[test]
    fn weight_fit_recovers_known_weights_exactly() {
        let truth = RiskWeights::new(0.1, 0.2, 0.3, 0.4, 720).unwrap();
        let rows = synthetic_table(&truth);
        let fit = fit_risk_weights(&rows, 720).unwrap();
        assert_close(fit.weights.w1, 0.1, 1e-9, "w1");
        assert_close(fit.weights.w2, 0.2, 1e-9, "w2");
        assert_close(fit.weights.w3, 0.3, 1e-9, "w3");
        assert_close(fit.weights.w4, 0.4, 1e-9, "w4");
        assert!(fit.max_residual < 1e-9, "residual {}", fit.max_residual);
        assert!(!fit.ill_conditioned(), "condition {}", fit.condition);
    }

    #[test]
    fn weight_fit_recovers_exactly_from_four_rows() {
        let truth = RiskWeights::new(0.25, 0.25, 0.25, 0.25, 720).unwrap();
        let rows = synthetic_table(&truth);
        // Durations 20, 30, 40, 60 only: exactly determined system.
        let subset: Vec<MetricsRow> = rows
            .iter()
            .filter(|r| matches!(r.duration_years, 20 | 30 | 40 | 60))
            .copied()
            .collect();
        assert_eq!(subset.len(), 4);
        let fit = fit_risk_weights(&subset, 720).unwrap();
        for (name, w) in [
            ("w1", fit.weights.w1),
            ("w2", fit.weights.w2),
            ("w3", fit.weights.w3),
            ("w4", fit.weights.w4),
        ] {
            assert_close(w, 0.25, 1e-8, name);
        }
    }

    #[test]
    fn weight_fit_rejects_degenerate_rows() {
        let row = MetricsRow {
            duration_years: 20,
            monthly_payment: 800.0,
            total_debt: 192_000.0,
            relative_increase: 0.0,
            debt_ratio: 0.2,
            repayment_capacity: 5.0,
            risk_index: 1.4,
        };
        // Four byte-identical rows: the regressor matrix has rank 1.
        let rows = vec![row; 4];
        let err = fit_risk_weights(&rows, 720).unwrap_err();
        assert!(matches!(err, Error::Calibration(_)), "{err}");
    }

    #[test]
    fn weight_fit_needs_four_rows() {
        let rows = synthetic_table(&RiskWeights::default());
        assert!(fit_risk_weights(&rows[..3], 720).is_err());
        assert!(fit_risk_weights(&rows[..4], 720).is_ok());
    }

    #[test]
    fn income_fit_recovers_known_income() {
        let rows = synthetic_table(&RiskWeights::default());
        let estimate = infer_monthly_income(&rows).unwrap();
        assert_close(estimate.mean, 4053.0, 1e-9, "income mean");
        assert!(estimate.spread < 1e-9, "spread {}", estimate.spread);
    }

    #[test]
    fn income_fit_single_row_has_zero_spread() {
        let rows = synthetic_table(&RiskWeights::default());
        let estimate = infer_monthly_income(&rows[..1]).unwrap();
        assert_close(
            estimate.mean,
            rows[0].monthly_payment / rows[0].debt_ratio,
            1e-12,
            "mean",
        );
        assert_eq!(estimate.spread, 0.0);
    }

    #[test]
    fn income_fit_rejects_non_positive_ratio() {
        let mut rows = synthetic_table(&RiskWeights::default());
        rows[5].debt_ratio = 0.0;
        assert!(infer_monthly_income(&rows).is_err());
        assert!(infer_monthly_income(&[]).is_err());
    }

    #[test]
    fn rate_fit_recovers_known_rate() {
        let rows = synthetic_table(&RiskWeights::default());
        let estimate = infer_loan_rate(&rows, 133_476.0, DEFAULT_RATE_BRACKET).unwrap();
        assert_close(estimate.rate, 0.039, 1e-9, "rate");
        assert!(
            estimate.max_payment_residual < 1e-4,
            "residual {}",
            estimate.max_payment_residual
        );
    }

    #[test]
    fn rate_fit_rejects_bad_brackets() {
        let rows = synthetic_table(&RiskWeights::default());
        // Bracket entirely above the true 3.9 %: no sign change.
        assert!(infer_loan_rate(&rows, 133_476.0, (0.05, 0.20)).is_err());
        // Bracket entirely below.
        assert!(infer_loan_rate(&rows, 133_476.0, (0.001, 0.02)).is_err());
        // Malformed bracket.
        assert!(infer_loan_rate(&rows, 133_476.0, (0.2, 0.1)).is_err());
        assert!(infer_loan_rate(&rows, 0.0, DEFAULT_RATE_BRACKET).is_err());
        assert!(infer_loan_rate(&[], 133_476.0, DEFAULT_RATE_BRACKET).is_err());
    }

    #[test]
    fn calibrate_table_bundles_all_three_fits() {
        let rows = synthetic_table(&RiskWeights::default());
        let report = calibrate_table(&rows, 133_476.0, DEFAULT_RATE_BRACKET, 720).unwrap();
        assert_close(report.weights.weights.w1, 0.25, 1e-9, "w1");
        assert_close(report.income.mean, 4053.0, 1e-9, "income");
        assert_close(report.rate.rate, 0.039, 1e-9, "rate");
    }
}
