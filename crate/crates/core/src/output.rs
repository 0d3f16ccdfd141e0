//! Deterministic serialization of experiment artifacts: CSV, JSON, markdown
//! and long-form plot data. Byte output is a pure function of the artifact.

use crate::bootstrap::SizePowerCurve;
use crate::error::Result;
use crate::experiments::{PowerTable, Report};
use std::fmt::Write as _;

/// Output format selector for the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Markdown,
    Plotdata,
}

impl std::str::FromStr for Format {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            "plotdata" => Ok(Format::Plotdata),
            other => Err(crate::error::Error::Config(format!(
                "unknown format '{other}' (expected csv, json, markdown or plotdata)"
            ))),
        }
    }
}

/// Full-precision CSV of a power/size table: `beta,L1..L5,L0` plus standard
/// error columns. `{}` formatting prints the shortest round-tripping
/// decimal, so bytes are reproducible.
pub fn power_table_csv(table: &PowerTable) -> String {
    let mut out = String::new();
    out.push_str("beta,L1,L2,L3,L4,L5,L0,se_L1,se_L2,se_L3,se_L4,se_L5,se_L0,degenerate\n");
    for row in &table.rows {
        let _ = write!(out, "{}", row.beta);
        for v in row.l {
            let _ = write!(out, ",{v}");
        }
        let _ = write!(out, ",{}", row.l0);
        for v in row.se_l {
            let _ = write!(out, ",{v}");
        }
        let _ = writeln!(out, ",{},{}", row.se_l0, row.degenerate);
    }
    out
}

/// Markdown rendering of a table, rounded to 3 decimals.
pub fn power_table_markdown(table: &PowerTable) -> String {
    let mut out = String::new();
    let kind = if table.alternative == "null" {
        "Size"
    } else {
        "Power"
    };
    let _ = writeln!(
        out,
        "{kind} values for T = {} at the {:.0}% level (h_test = {}, M = {}, B = {}, seed = {})",
        table.t,
        table.alpha * 100.0,
        table.h_test,
        table.m,
        table.b,
        table.seed
    );
    out.push('\n');
    out.push_str("| beta | L1 | L2 | L3 | L4 | L5 | L0 |\n");
    out.push_str("|------|----|----|----|----|----|----|\n");
    for row in &table.rows {
        let _ = write!(out, "| {} |", row.beta);
        for v in row.l {
            let _ = write!(out, " {v:.3} |");
        }
        let _ = writeln!(out, " {:.3} |", row.l0);
    }
    out
}

/// Long-form plot data: `x,y,series` rows, one per (beta, statistic) cell.
pub fn power_table_plotdata(table: &PowerTable) -> String {
    let mut out = String::new();
    out.push_str("x,y,series\n");
    for row in &table.rows {
        for (i, v) in row.l.iter().enumerate() {
            let _ = writeln!(out, "{},{v},L{}", row.beta, i + 1);
        }
        let _ = writeln!(out, "{},{},L0", row.beta, row.l0);
    }
    out
}

pub fn power_table_json(table: &PowerTable) -> Result<String> {
    Ok(serde_json::to_string_pretty(table).map_err(std::io::Error::other)? + "\n")
}

/// CSV of a size/power curve with the stable header
/// `h,size,power,se_size,se_power,degenerate`.
pub fn curve_csv(curve: &SizePowerCurve) -> String {
    let mut out = String::new();
    out.push_str("h,size,power,se_size,se_power,degenerate\n");
    for row in &curve.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.h.get(),
            row.size,
            row.power,
            row.se_size,
            row.se_power,
            row.degenerate
        );
    }
    out
}

pub fn report_json(report: &Report) -> Result<String> {
    Ok(serde_json::to_string_pretty(report).map_err(std::io::Error::other)? + "\n")
}

/// Human-readable report summary.
pub fn report_markdown(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Random-walk test report: {}", report.input);
    out.push('\n');
    let _ = writeln!(out, "- T = {}, kernel = {}", report.t, report.kernel);
    let _ = writeln!(out, "- sigma_u_hat = {:.6}", report.sigma_u_hat);
    let _ = writeln!(out, "- h = {} ({})", report.h, report.h_source);
    let _ = writeln!(
        out,
        "- alpha = {}, B = {}, seed = {}, innovation = {}",
        report.alpha,
        report.b,
        report.seed,
        report.innovation.name()
    );
    out.push('\n');
    let _ = writeln!(
        out,
        "| statistic | value | p-value |\n|-----------|-------|---------|"
    );
    let _ = writeln!(
        out,
        "| L_T(h) | {:.4} | {:.4} |",
        report.l_test.l_value, report.l_p_value
    );
    let _ = writeln!(
        out,
        "| L_0 (Dickey-Fuller) | {:.4} | {:.4} |",
        report.dickey_fuller.l0, report.l0_p_value
    );
    out.push('\n');
    let _ = writeln!(
        out,
        "Kernel statistic: M = {:.6}, sigma = {:.6}, pairs = {}, degenerate resamples = {}",
        report.l_test.m_value,
        report.l_test.sigma_hat,
        report.l_test.pair_count,
        report.degenerate_resamples
    );
    for w in &report.warnings {
        let _ = writeln!(out, "\nWARNING: {w}");
    }
    out
}
