//! The committed reference table and its strict CSV format.
//!
//! Format: UTF-8, comma-separated, no quoting, a header row that must read
//! exactly [`GOLDEN_HEADER`], then one row per duration with a strictly
//! increasing integer duration column and six finite decimal columns. The
//! 41-row table shipped with the crate ([`GoldenTable::embedded`]) covers 20
//! through 60 years at a 3.9 % contract rate and is the ground truth the
//! `verify` and `calibrate` paths run against.

use std::path::Path;

use crate::annuity::MetricsRow;
use crate::error::Error;

/// Exact header line of a reference-table CSV.
pub const GOLDEN_HEADER: &str =
    "Duration,Monthly_Payment,Total_Debt,Relative_Increase,Debt_Ratio,Repayment_Capacity,Risk_Index";

const EMBEDDED_CSV: &str = include_str!("../data/annexe1.csv");

/// A reference metrics table plus a note of where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenTable {
    rows: Vec<MetricsRow>,
    /// Human-readable provenance ("embedded annexe1.csv", a file path, ...).
    pub source: String,
}

impl GoldenTable {
    /// The reference table shipped with the crate: 41 rows, 20..=60 years.
    pub fn embedded() -> Self {
        Self::parse_csv(EMBEDDED_CSV, "embedded annexe1.csv")
            .expect("embedded reference table is valid")
    }

    /// Parse a reference table from CSV text. `source` is recorded verbatim
    /// for error messages and reports.
    pub fn parse_csv(text: &str, source: &str) -> Result<Self, Error> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty input, expected a header row".into(),
        })?;
        if header.trim_end_matches('\r') != GOLDEN_HEADER {
            return Err(Error::Parse {
                line: 1,
                message: format!("header must read exactly `{GOLDEN_HEADER}`"),
            });
        }

        let mut rows: Vec<MetricsRow> = Vec::new();
        for (index, raw_line) in lines {
            let line_no = index + 1;
            let line = raw_line.trim_end_matches('\r');
            if line.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "blank line inside the table".into(),
                });
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 7 fields, got {}", fields.len()),
                });
            }
            let duration_years: u32 = fields[0].parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("field Duration: invalid integer `{}`", fields[0]),
            })?;
            let mut numbers = [0.0f64; 6];
            const COLUMNS: [&str; 6] = [
                "Monthly_Payment",
                "Total_Debt",
                "Relative_Increase",
                "Debt_Ratio",
                "Repayment_Capacity",
                "Risk_Index",
            ];
            for (slot, (field, column)) in numbers.iter_mut().zip(fields[1..].iter().zip(COLUMNS)) {
                let value: f64 = field.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("field {column}: invalid number `{field}`"),
                })?;
                if !value.is_finite() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("field {column}: non-finite value `{field}`"),
                    });
                }
                *slot = value;
            }
            if let Some(last) = rows.last() {
                if duration_years <= last.duration_years {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!(
                            "durations must increase strictly: {} after {}",
                            duration_years, last.duration_years
                        ),
                    });
                }
            }
            rows.push(MetricsRow {
                duration_years,
                monthly_payment: numbers[0],
                total_debt: numbers[1],
                relative_increase: numbers[2],
                debt_ratio: numbers[3],
                repayment_capacity: numbers[4],
                risk_index: numbers[5],
            });
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 1,
                message: "table has a header but no data rows".into(),
            });
        }
        Ok(GoldenTable {
            rows,
            source: source.to_string(),
        })
    }

    /// Load a reference table from a CSV file.
    pub fn from_path(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_csv(&text, &path.display().to_string())
    }

    pub fn rows(&self) -> &[MetricsRow] {
        &self.rows
    }
}
