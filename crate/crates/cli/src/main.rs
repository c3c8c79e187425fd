use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tariffnet_core::report::write_csv;
use tariffnet_core::scenario::parse_ped;
use tariffnet_core::{
    emit_report, run_scenario, sweep, CascadeMode, Delivery, Error, ReportFormat, ScenarioConfig,
    ScenarioReport, Topology,
};

#[derive(Parser)]
#[command(
    name = "tariffnet",
    version,
    about = "ISP tariff optimization and core network power"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize prices for one scenario and report it against net neutrality.
    Solve {
        #[command(flatten)]
        common: Common,
        /// One elasticity for every class, or `A,B,C`.
        #[arg(long)]
        ped: Option<String>,
        /// 0 lets users leave, 1 keeps all of them.
        #[arg(long)]
        lb: Option<u8>,
    },
    /// Run every elasticity in the list under both LB modes.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated elasticities; use `;` to separate per-class
        /// triples, e.g. `2,1,0.2` or `2,0.8,0.2;0.4`.
        #[arg(long)]
        ped_list: String,
    },
    /// Check a topology file.
    Validate {
        #[arg(long)]
        topology: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// `key = value` scenario file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_delivery)]
    delivery: Option<Delivery>,
    #[arg(long, value_parser = parse_cascade)]
    cascade: Option<CascadeMode>,
    /// Output directory; CSV goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: ReportFormat,
}

fn parse_delivery(s: &str) -> Result<Delivery, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_cascade(s: &str) -> Result<CascadeMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Common {
    fn config(&self) -> Result<ScenarioConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::load(path)?,
            None => ScenarioConfig::default(),
        };
        if let Some(d) = self.delivery {
            cfg.delivery = d;
        }
        if let Some(c) = self.cascade {
            cfg.cascade = c;
        }
        Ok(cfg)
    }
}

/// A bare comma list means one equal elasticity per entry; `;` separates
/// entries so per-class triples can be mixed in.
fn parse_ped_list(text: &str) -> Result<Vec<[f64; 3]>, Error> {
    if text.contains(';') {
        text.split(';').map(parse_ped).collect()
    } else {
        text.split(',').map(parse_ped).collect()
    }
}

fn write_outputs(report: &ScenarioReport, common: &Common, details: bool) -> Result<(), Error> {
    let Some(dir) = &common.out else {
        let stdout = io::stdout();
        let mut out = stdout.lock();
        write_csv(report, &mut out)?;
        out.flush()?;
        return Ok(());
    };
    let mut written = emit_report(report, common.format, dir)?;
    if details {
        if let Some(eval) = report.evaluations.first() {
            let links = dir.join("links.csv");
            eval.dimensioning
                .write_csv(BufWriter::new(File::create(&links)?))?;
            let power = dir.join("power_breakdown.csv");
            eval.power
                .write_csv(BufWriter::new(File::create(&power)?))?;
            written.extend([links, power]);
        }
    }
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Solve { common, ped, lb } => {
            let mut cfg = common.config()?;
            if let Some(ped) = ped {
                cfg.classes.set_elasticities(parse_ped(&ped)?);
            }
            if let Some(lb) = lb {
                cfg.set_lb(lb)?;
            }
            let report = run_scenario(&cfg)?;
            write_outputs(&report, &common, true)
        }
        Command::Sweep { common, ped_list } => {
            let cfg = common.config()?;
            let peds = parse_ped_list(&ped_list)?;
            let report = sweep(&cfg, &peds)?;
            write_outputs(&report, &common, false)
        }
        Command::Validate { topology } => {
            let topo = Topology::load(&topology)?;
            println!(
                "{}: {} nodes, {} links, {} datacenters",
                topology.display(),
                topo.node_count(),
                topo.links().len(),
                topo.datacenter_count()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_infeasible() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
