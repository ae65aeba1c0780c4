//! Deterministic renderers and atomic file output.
//!
//! CSV columns are printed at the reference table's precision (payments to 4
//! decimals, totals to 1, ratios to 6-7), so rendering the embedded reference
//! table reproduces its bytes exactly. JSON keeps full `f64` precision via
//! serde's shortest-round-trip formatting. Neither renderer consults clocks,
//! locales or maps with unstable ordering: the same data always produces the
//! same bytes.
//!
//! [`write_atomic`] writes a temp file next to the target and renames it into
//! place, so a crash mid-write never leaves a half-written table behind.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::annuity::MetricsRow;
use crate::calibrate::CalibrationReport;
use crate::golden::GOLDEN_HEADER;
use crate::market::MarketPoint;
use crate::verify::VerificationReport;

/// Output format of the rendered tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Render an affordability table; header and precision match the embedded
/// reference CSV byte for byte.
pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(GOLDEN_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{:.4},{:.1},{:.6},{:.7},{:.6},{:.6}",
            r.duration_years,
            r.monthly_payment,
            r.total_debt,
            r.relative_increase,
            r.debt_ratio,
            r.repayment_capacity,
            r.risk_index
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Header of the market-sweep CSV.
pub const SWEEP_HEADER: &str =
    "Years,N,D,Variation_D_Pct,S_Raw_Millions,S_Loans,Variation_S_Pct,Gap_Ratio";

fn optional_pct(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.2}"),
        None => String::new(),
    }
}

/// Render a market sweep. Variations are blank on the first row.
pub fn sweep_csv(points: &[MarketPoint]) -> String {
    let mut out = String::with_capacity(64 * (points.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for p in points {
        writeln!(
            out,
            "{},{},{:.2},{},{:.3},{:.2},{},{:.6}",
            p.duration_years,
            p.term_months,
            p.demand,
            optional_pct(p.demand_step_variation),
            p.supply_raw,
            p.supply_loans,
            optional_pct(p.supply_step_variation),
            p.gap_ratio
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Render a verification outcome as a per-column CSV.
pub fn verification_csv(report: &VerificationReport) -> String {
    let mut out = String::from("Column,Max_Abs_Error,Tolerance,Pass\n");
    for c in &report.columns {
        writeln!(
            out,
            "{},{:e},{:e},{}",
            c.column, c.max_abs_error, c.tolerance, c.pass
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Render a calibration outcome as parameter/value rows.
pub fn calibration_csv(report: &CalibrationReport) -> String {
    let mut out = String::from("Parameter,Value\n");
    let mut kv = |k: &str, v: String| {
        out.push_str(k);
        out.push(',');
        out.push_str(&v);
        out.push('\n');
    };
    kv("w1", format!("{:.6}", report.weights.weights.w1));
    kv("w2", format!("{:.6}", report.weights.weights.w2));
    kv("w3", format!("{:.6}", report.weights.weights.w3));
    kv("w4", format!("{:.6}", report.weights.weights.w4));
    kv(
        "weight_max_residual",
        format!("{:e}", report.weights.max_residual),
    );
    kv(
        "weight_fit_condition",
        format!("{:.1}", report.weights.condition),
    );
    kv(
        "implied_monthly_income",
        format!("{:.2}", report.income.mean),
    );
    kv("income_spread", format!("{:e}", report.income.spread));
    kv("implied_rate", format!("{:.6}", report.rate.rate));
    kv(
        "rate_max_payment_residual",
        format!("{:e}", report.rate.max_payment_residual),
    );
    out
}

/// Pretty JSON with a trailing newline; works for any report type.
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize cleanly");
    text.push('\n');
    text
}

/// Write `contents` to `path` atomically: the bytes land in a `.tmp` sibling
/// first and are renamed into place, so readers never observe a torn file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".tmp");
    let tmp_path = path.with_file_name(tmp_name);
    std::fs::write(&tmp_path, contents)?;
    std::fs::rename(&tmp_path, path)?;
    Ok(())
}
