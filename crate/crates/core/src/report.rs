//! CSV and plot-series output for scenario reports.
//!
//! Numbers are printed with fixed decimals so reruns are byte-identical.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scenario::{ReportRow, ScenarioReport};

pub const CSV_HEADER: [&str; 18] = [
    "scenario",
    "ped_a",
    "ped_b",
    "ped_c",
    "lb",
    "price_a",
    "price_b",
    "price_c",
    "users_pct_a",
    "users_pct_b",
    "users_pct_c",
    "users_pct_total",
    "revenue_usd",
    "cost_usd",
    "profit_usd",
    "profit_ratio",
    "core_traffic_gbps",
    "power_w",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Csv,
    PlotData,
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Csv => "csv",
            ReportFormat::PlotData => "plot-data",
        })
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "plot-data" => Ok(ReportFormat::PlotData),
            other => Err(Error::Param(format!(
                "unknown format {other:?} (expected csv or plot-data)"
            ))),
        }
    }
}

fn fixed(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    // Keep -0.000 from leaking into the output.
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn row_fields(r: &ReportRow) -> Vec<String> {
    let mut out = vec![r.scenario.clone()];
    out.extend(r.elasticities.iter().map(|e| e.to_string()));
    out.push(r.lb.to_string());
    out.extend(r.prices.iter().map(|p| fixed(*p, 4)));
    out.extend(r.users_pct.iter().map(|p| fixed(*p, 6)));
    out.push(fixed(r.users_pct_total, 6));
    out.push(fixed(r.revenue, 4));
    out.push(fixed(r.cost, 4));
    out.push(fixed(r.profit, 4));
    out.push(fixed(r.profit_ratio, 6));
    out.push(fixed(r.core_traffic_gbps, 4));
    out.push(fixed(r.power.total_w, 4));
    out
}

fn all_rows(report: &ScenarioReport) -> impl Iterator<Item = &ReportRow> {
    std::iter::once(&report.baseline).chain(&report.rows)
}

/// Baseline first, then the scenario rows.
pub fn write_csv<W: Write>(report: &ScenarioReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in all_rows(report) {
        w.write_record(row_fields(row))?;
    }
    w.flush()?;
    Ok(())
}

fn label(r: &ReportRow) -> String {
    if r.scenario == "nn" {
        return "NN".into();
    }
    let [a, b, c] = r.elasticities;
    if a == b && b == c {
        format!("{} PED={a} LB={}", r.scenario, r.lb)
    } else {
        format!("{} PED={a}/{b}/{c} LB={}", r.scenario, r.lb)
    }
}

type Series = (
    &'static str,
    &'static [&'static str],
    fn(&ReportRow) -> Vec<String>,
);

const SERIES: [Series; 4] = [
    (
        "price_users.csv",
        &[
            "price_a",
            "price_b",
            "price_c",
            "users_pct_a",
            "users_pct_b",
            "users_pct_c",
            "users_pct_total",
        ],
        |r| {
            let mut v: Vec<String> = r.prices.iter().map(|p| fixed(*p, 4)).collect();
            v.extend(r.users_pct.iter().map(|p| fixed(*p, 6)));
            v.push(fixed(r.users_pct_total, 6));
            v
        },
    ),
    ("profit.csv", &["profit_usd", "profit_ratio"], |r| {
        vec![fixed(r.profit, 4), fixed(r.profit_ratio, 6)]
    }),
    (
        "traffic.csv",
        &["core_traffic_gbps", "link_traffic_gbps"],
        |r| {
            vec![
                fixed(r.core_traffic_gbps, 4),
                fixed(r.power.total_link_traffic_gbps, 4),
            ]
        },
    ),
    (
        "power.csv",
        &[
            "router_ports_w",
            "transponders_w",
            "edfas_w",
            "optical_switches_w",
            "regenerators_w",
            "total_w",
        ],
        |r| {
            let p = &r.power;
            [
                p.router_ports_w,
                p.transponders_w,
                p.edfas_w,
                p.optical_switches_w,
                p.regenerators_w,
                p.total_w,
            ]
            .iter()
            .map(|v| fixed(*v, 4))
            .collect()
        },
    ),
];

/// Writes `report.csv`, or one series file per chart for `PlotData`.
/// Returns the paths written.
pub fn emit_report(
    report: &ScenarioReport,
    format: ReportFormat,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    match format {
        ReportFormat::Csv => {
            let path = out_dir.join("report.csv");
            let mut file = BufWriter::new(File::create(&path)?);
            write_csv(report, &mut file)?;
            file.flush()?;
            Ok(vec![path])
        }
        ReportFormat::PlotData => {
            let mut paths = Vec::new();
            for (name, columns, fields) in SERIES {
                let path = out_dir.join(name);
                let mut w = csv::Writer::from_path(&path)?;
                let mut header = vec!["label"];
                header.extend_from_slice(columns);
                w.write_record(&header)?;
                for row in all_rows(report) {
                    let mut record = vec![label(row)];
                    record.extend(fields(row));
                    w.write_record(&record)?;
                }
                w.flush()?;
                paths.push(path);
            }
            Ok(paths)
        }
    }
}
