//! `amortis`: run mortgage-duration scenarios from the command line.
//!
//! Five subcommands cover the library's surface:
//!
//! * `sweep` — demand/supply market curves across the duration range;
//! * `table` — the affordability metrics table;
//! * `verify` — computed table against the committed reference table, exit 1
//!   when a column drifts out of tolerance;
//! * `calibrate` — recover the index weights, the income and the contract
//!   rate behind the reference table;
//! * `report` — one bundle with market, metrics, gap and headline summaries.
//!
//! Scenarios come from `--preset <name>` or `--scenario <file.json>`. Output
//! goes to stdout, or into `--out <dir>` (written atomically); `--format`
//! picks CSV or JSON and `--plot` adds two-column data files plus
//! self-contained SVG charts. Exit codes: 0 success or verification pass,
//! 1 verification failure, 2 invalid input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amortis_core::annuity::{discounted_price, MetricsRow};
use amortis_core::calibrate::{calibrate_table, DEFAULT_RATE_BRACKET};
use amortis_core::emit;
use amortis_core::golden::GoldenTable;
use amortis_core::market::MarketPoint;
use amortis_core::plot::{data_file, svg_line_chart, Series};
use amortis_core::report::{build_report, Report};
use amortis_core::scenario::Scenario;
use amortis_core::verify::{verify_golden, ColumnTolerances};
use amortis_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "amortis",
    version,
    about = "Household mortgage-duration scenario runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the demand and supply curves across the duration range
    Sweep(RunArgs),
    /// Build the affordability metrics table
    Table(RunArgs),
    /// Check the computed table against the committed reference table
    Verify(RunArgs),
    /// Recover the parameters behind the committed reference table
    Calibrate(RunArgs),
    /// Run the full scenario and bundle market, metrics and summaries
    Report(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file to run
    #[arg(long, value_name = "path", conflicts_with = "preset")]
    scenario: Option<PathBuf>,
    /// Built-in scenario: paper-baseline, paper-annexe1, paper-text or paper-alt-n60
    #[arg(long, value_name = "name")]
    preset: Option<String>,
    /// Output format (csv by default; report defaults to json)
    #[arg(long, value_enum, value_name = "fmt")]
    format: Option<FormatArg>,
    /// Write outputs into this directory instead of stdout (created if missing)
    #[arg(long, value_name = "dir")]
    out: Option<PathBuf>,
    /// Also write plot data files and SVG charts (needs --out)
    #[arg(long)]
    plot: bool,
    /// Replay the originally published sweep arithmetic, transcription slips included
    #[arg(long)]
    paper_compat: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let (args, default_preset, default_format) = match &cli.command {
        Command::Sweep(a) | Command::Table(a) => (a, "paper-baseline", FormatArg::Csv),
        Command::Verify(a) | Command::Calibrate(a) => (a, "paper-annexe1", FormatArg::Csv),
        Command::Report(a) => (a, "paper-baseline", FormatArg::Json),
    };
    let scenario = load_scenario(args, default_preset)?;
    let format = args.format.unwrap_or(default_format);

    if args.plot {
        if args.out.is_none() {
            return Err(Error::InvalidInput(
                "--plot writes files; pass --out <dir>".into(),
            ));
        }
        if matches!(cli.command, Command::Verify(_) | Command::Calibrate(_)) {
            return Err(Error::InvalidInput(
                "verify and calibrate produce no plot series".into(),
            ));
        }
    }
    let out = Output::prepare(args.out.as_deref())?;

    match &cli.command {
        Command::Sweep(_) => cmd_sweep(&scenario, format, &out, args.plot),
        Command::Table(_) => cmd_table(&scenario, format, &out, args.plot),
        Command::Verify(_) => cmd_verify(&scenario, format, &out),
        Command::Calibrate(_) => cmd_calibrate(&scenario, format, &out),
        Command::Report(_) => cmd_report(&scenario, format, &out, args.plot),
    }
}

/// Resolve the scenario from the flags; `--paper-compat` forces replay mode
/// on regardless of what the scenario file says.
fn load_scenario(args: &RunArgs, default_preset: &str) -> Result<Scenario, Error> {
    let mut scenario = match (&args.scenario, &args.preset) {
        (Some(path), _) => Scenario::from_path(path)?,
        (None, Some(name)) => Scenario::preset(name)?,
        (None, None) => Scenario::preset(default_preset)?,
    };
    if args.paper_compat {
        scenario.paper_compat = true;
    }
    Ok(scenario)
}

/// Where rendered documents land: files under a directory, or stdout.
struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    fn prepare(dir: Option<&Path>) -> Result<Self, Error> {
        if let Some(dir) = dir {
            std::fs::create_dir_all(dir)?;
        }
        Ok(Output {
            dir: dir.map(Path::to_path_buf),
        })
    }

    /// Write `contents` under the output directory (atomically), or print
    /// them when no directory was requested.
    fn deliver(&self, file_name: &str, contents: &str) -> Result<(), Error> {
        match &self.dir {
            Some(dir) => {
                let path = dir.join(file_name);
                emit::write_atomic(&path, contents)?;
                eprintln!("wrote {}", path.display());
            }
            None => print!("{contents}"),
        }
        Ok(())
    }
}

fn cmd_sweep(
    scenario: &Scenario,
    format: FormatArg,
    out: &Output,
    plot: bool,
) -> Result<ExitCode, Error> {
    let points = scenario.sweep()?;
    match format {
        FormatArg::Csv => out.deliver("sweep.csv", &emit::sweep_csv(&points))?,
        FormatArg::Json => out.deliver(
            "sweep.json",
            &emit::to_json_pretty(&serde_json::json!({ "market": &points })),
        )?,
    }
    if plot {
        market_plots(&points, out)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_table(
    scenario: &Scenario,
    format: FormatArg,
    out: &Output,
    plot: bool,
) -> Result<ExitCode, Error> {
    let rows = scenario.metrics_table()?;
    match format {
        FormatArg::Csv => out.deliver("metrics.csv", &emit::metrics_csv(&rows))?,
        FormatArg::Json => out.deliver(
            "metrics.json",
            &emit::to_json_pretty(&serde_json::json!({ "metrics": &rows })),
        )?,
    }
    if plot {
        risk_plot(&rows, out)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(scenario: &Scenario, format: FormatArg, out: &Output) -> Result<ExitCode, Error> {
    let computed = scenario.metrics_table()?;
    let golden = GoldenTable::embedded();
    let report = verify_golden(
        &computed,
        golden.rows(),
        &ColumnTolerances::default(),
        scenario.paper_compat,
    )?;
    match format {
        FormatArg::Csv => out.deliver("verification.csv", &emit::verification_csv(&report))?,
        FormatArg::Json => out.deliver("verification.json", &emit::to_json_pretty(&report))?,
    }
    if report.overall_pass {
        eprintln!(
            "verification PASSED: all {} rows within tolerance",
            report.rows.len()
        );
        Ok(ExitCode::SUCCESS)
    } else {
        let failing = report.rows.iter().filter(|r| !r.pass).count();
        eprintln!(
            "verification FAILED: {failing} of {} rows out of tolerance",
            report.rows.len()
        );
        Ok(ExitCode::from(1))
    }
}

fn cmd_calibrate(scenario: &Scenario, format: FormatArg, out: &Output) -> Result<ExitCode, Error> {
    let golden = GoldenTable::embedded();
    let principal = discounted_price(
        scenario.property_price,
        scenario.household.contribution_rate,
    )?;
    let report = calibrate_table(
        golden.rows(),
        principal,
        DEFAULT_RATE_BRACKET,
        scenario.weights.max_term_months,
    )?;
    if report.weights.ill_conditioned() {
        eprintln!(
            "warning: weight fit is ill-conditioned (condition {:.3e}); weights may be unreliable",
            report.weights.condition
        );
    }
    match format {
        FormatArg::Csv => out.deliver("calibration.csv", &emit::calibration_csv(&report))?,
        FormatArg::Json => out.deliver("calibration.json", &emit::to_json_pretty(&report))?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(
    scenario: &Scenario,
    format: FormatArg,
    out: &Output,
    plot: bool,
) -> Result<ExitCode, Error> {
    let report = build_report(scenario)?;
    match format {
        FormatArg::Json => out.deliver("report.json", &emit::to_json_pretty(&report))?,
        FormatArg::Csv => {
            if out.dir.is_none() {
                return Err(Error::InvalidInput(
                    "report --format csv writes several files; pass --out <dir>".into(),
                ));
            }
            out.deliver("sweep.csv", &emit::sweep_csv(&report.market))?;
            out.deliver("metrics.csv", &emit::metrics_csv(&report.metrics))?;
            out.deliver("summary.csv", &summary_csv(&report))?;
        }
    }
    if plot {
        market_plots(&report.market, out)?;
        risk_plot(&report.metrics, out)?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Headline and gap figures as parameter/value rows.
fn summary_csv(report: &Report) -> String {
    let mut out = String::from("Parameter,Value\n");
    let mut kv = |k: &str, v: String| {
        out.push_str(k);
        out.push(',');
        out.push_str(&v);
        out.push('\n');
    };
    let h = &report.headline;
    kv("min_duration_years", h.min_duration_years.to_string());
    kv("max_duration_years", h.max_duration_years.to_string());
    kv("payment_at_min", format!("{:.4}", h.payment_at_min));
    kv("payment_at_max", format!("{:.4}", h.payment_at_max));
    kv("cost_increase_pct", format!("{:.6}", h.cost_increase_pct));
    for (label, end) in [
        ("shortest", &report.gap.shortest),
        ("longest", &report.gap.longest),
    ] {
        kv(
            &format!("gap_{label}_duration_years"),
            end.duration_years.to_string(),
        );
        kv(&format!("gap_{label}_demand"), format!("{:.2}", end.demand));
        kv(
            &format!("gap_{label}_supply_loans"),
            format!("{:.2}", end.supply_loans),
        );
        kv(
            &format!("gap_{label}_difference"),
            format!("{:.2}", end.difference),
        );
        kv(&format!("gap_{label}_ratio"), format!("{:.6}", end.ratio));
        kv(&format!("gap_{label}_balanced"), end.balanced.to_string());
    }
    kv("gap_epsilon", format!("{:e}", report.gap.epsilon));
    out
}

/// Demand and financeable-loan curves as data files plus SVG charts.
fn market_plots(points: &[MarketPoint], out: &Output) -> Result<(), Error> {
    let demand: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (f64::from(p.duration_years), p.demand))
        .collect();
    let supply: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (f64::from(p.duration_years), p.supply_loans))
        .collect();
    out.deliver("demand.dat", &data_file(&demand))?;
    out.deliver(
        "demand.svg",
        &svg_line_chart(&Series {
            title: "Demand for home loans",
            x_label: "Duration (years)",
            y_label: "Loans demanded",
            points: &demand,
        }),
    )?;
    out.deliver("supply.dat", &data_file(&supply))?;
    out.deliver(
        "supply.svg",
        &svg_line_chart(&Series {
            title: "Financeable home loans",
            x_label: "Duration (years)",
            y_label: "Loans financeable",
            points: &supply,
        }),
    )?;
    Ok(())
}

/// Composite risk index as a data file plus an SVG chart.
fn risk_plot(rows: &[MetricsRow], out: &Output) -> Result<(), Error> {
    let series: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (f64::from(r.duration_years), r.risk_index))
        .collect();
    out.deliver("risk_index.dat", &data_file(&series))?;
    out.deliver(
        "risk_index.svg",
        &svg_line_chart(&Series {
            title: "Composite risk index",
            x_label: "Duration (years)",
            y_label: "Index",
            points: &series,
        }),
    )?;
    Ok(())
}
