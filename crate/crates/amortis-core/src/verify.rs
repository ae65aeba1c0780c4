//! Column-by-column comparison of a computed metrics table against a
//! reference table.
//!
//! Tolerances are absolute and per column, mirroring the precision the
//! reference table is printed at: a payment is trusted to a twentieth of a
//! cent, the ratio columns to their last printed digit. A table passes when
//! every row passes every column.

use serde::{Deserialize, Serialize};

use crate::annuity::MetricsRow;
use crate::error::Error;

/// Per-column absolute tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnTolerances {
    pub monthly_payment: f64,
    pub total_debt: f64,
    pub relative_increase: f64,
    pub debt_ratio: f64,
    pub repayment_capacity: f64,
    pub risk_index: f64,
}

impl Default for ColumnTolerances {
    /// Half a unit in the last printed place of each reference column, give
    /// or take: 0.0005 on payments, 0.1 on totals, 1e-4 on the increase,
    /// 1e-6 / 1e-5 / 1e-5 on the three index columns.
    fn default() -> Self {
        ColumnTolerances {
            monthly_payment: 5e-4,
            total_debt: 0.1,
            relative_increase: 1e-4,
            debt_ratio: 1e-6,
            repayment_capacity: 1e-5,
            risk_index: 1e-5,
        }
    }
}

/// Worst error observed in one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnCheck {
    pub column: String,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Verdict for one duration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowCheck {
    pub duration_years: u32,
    pub pass: bool,
    /// Names of the columns out of tolerance in this row; empty when passing.
    pub failed_columns: Vec<String>,
}

/// Full comparison outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub columns: Vec<ColumnCheck>,
    pub rows: Vec<RowCheck>,
    pub overall_pass: bool,
    /// Whether the computed table came from a compat-mode run; echoed so a
    /// report is interpretable on its own.
    pub paper_compat: bool,
}

const COLUMN_NAMES: [&str; 6] = [
    "Monthly_Payment",
    "Total_Debt",
    "Relative_Increase",
    "Debt_Ratio",
    "Repayment_Capacity",
    "Risk_Index",
];

fn column_values(row: &MetricsRow) -> [f64; 6] {
    [
        row.monthly_payment,
        row.total_debt,
        row.relative_increase,
        row.debt_ratio,
        row.repayment_capacity,
        row.risk_index,
    ]
}

/// Compare `computed` against `golden` under the given tolerances.
///
/// The tables must have the same durations in the same order; anything else
/// is a shape error, not a failed verification.
pub fn verify_golden(
    computed: &[MetricsRow],
    golden: &[MetricsRow],
    tolerances: &ColumnTolerances,
    paper_compat: bool,
) -> Result<VerificationReport, Error> {
    if computed.len() != golden.len() {
        return Err(Error::invalid(format!(
            "row count mismatch: computed {} rows, reference {}",
            computed.len(),
            golden.len()
        )));
    }
    if computed.is_empty() {
        return Err(Error::invalid("cannot verify empty tables"));
    }
    for (c, g) in computed.iter().zip(golden) {
        if c.duration_years != g.duration_years {
            return Err(Error::invalid(format!(
                "duration mismatch: computed {} years where reference has {}",
                c.duration_years, g.duration_years
            )));
        }
    }

    let limits = [
        tolerances.monthly_payment,
        tolerances.total_debt,
        tolerances.relative_increase,
        tolerances.debt_ratio,
        tolerances.repayment_capacity,
        tolerances.risk_index,
    ];

    let mut max_errors = [0.0f64; 6];
    let mut rows = Vec::with_capacity(computed.len());
    for (c, g) in computed.iter().zip(golden) {
        let cv = column_values(c);
        let gv = column_values(g);
        let mut failed_columns = Vec::new();
        for k in 0..6 {
            let err = (cv[k] - gv[k]).abs();
            max_errors[k] = max_errors[k].max(err);
            // NaN must count as a failure, so test for "within" and negate.
            let within = err <= limits[k];
            if !within {
                failed_columns.push(COLUMN_NAMES[k].to_string());
            }
        }
        rows.push(RowCheck {
            duration_years: c.duration_years,
            pass: failed_columns.is_empty(),
            failed_columns,
        });
    }

    let columns: Vec<ColumnCheck> = (0..6)
        .map(|k| ColumnCheck {
            column: COLUMN_NAMES[k].to_string(),
            max_abs_error: max_errors[k],
            tolerance: limits[k],
            pass: max_errors[k] <= limits[k],
        })
        .collect();
    let overall_pass = rows.iter().all(|r| r.pass);
    Ok(VerificationReport {
        columns,
        rows,
        overall_pass,
        paper_compat,
    })
}
