//! Scenario configuration and the end-to-end pipeline.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::demand::{build_solution_table, GridSpec};
use crate::error::{Error, Result};
use crate::network::{
    assign_to_datacenters, cloud_demands, route_and_size, DemandMatrix, NetworkDimensioning,
};
use crate::params::{Delivery, EconomicParams, PowerParams, ServiceClasses};
use crate::power::{network_power, PowerBreakdown};
use crate::pricing::{optimize_pricing, CascadeMode, PricingOutcome};
use crate::topology::Topology;

/// Everything one scenario run needs. `Default` is the reference setup on the
/// bundled att25 network with every class at elasticity 0.2.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// `None` selects the bundled att25 network.
    pub topology: Option<PathBuf>,
    pub delivery: Delivery,
    pub classes: ServiceClasses,
    pub cascade: CascadeMode,
    pub grid: GridSpec,
    /// `min_user_fraction` carries the LB mode.
    pub econ: EconomicParams,
    pub power: PowerParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            topology: None,
            delivery: Delivery::Cloud,
            classes: ServiceClasses::default(),
            cascade: CascadeMode::Strict,
            grid: GridSpec::default(),
            econ: EconomicParams::default(),
            power: PowerParams::default(),
        }
    }
}

/// Parses `v` or `vA,vB,vC`.
pub fn parse_ped(text: &str) -> Result<[f64; 3]> {
    let values = parse_list(text).map_err(Error::Param)?;
    match values[..] {
        [v] => Ok([v; 3]),
        [a, b, c] => Ok([a, b, c]),
        _ => Err(Error::Param(format!(
            "elasticity must be one value or three, got {:?}",
            text.trim()
        ))),
    }
}

fn parse_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>().map_err(|_| format!("not a number: {s:?}"))
        })
        .collect()
}

fn parse_lb(text: &str) -> Result<f64> {
    match text.trim() {
        "0" => Ok(0.0),
        "1" => Ok(1.0),
        other => Err(Error::Param(format!("lb must be 0 or 1, got {other:?}"))),
    }
}

impl ScenarioConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    /// Parses `key = value` lines; `#` starts a comment. A relative
    /// `topology` path is resolved against the directory holding `path`.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = ScenarioConfig::default();
        let (mut lower, mut step, mut upper, mut cap) = (0.5, 0.01, None, 10.0);
        let mut explicit: Option<Vec<f64>> = None;

        for (i, raw) in text.lines().enumerate() {
            let parse_err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(parse_err(format!("expected `key = value`, got {line:?}")));
            };
            let (key, value) = (key.trim(), value.trim());
            let number = || {
                value
                    .parse::<f64>()
                    .map_err(|_| parse_err(format!("{key}: not a number: {value:?}")))
            };
            let wrap = |e: Error| parse_err(format!("{key}: {}", e.root()));
            match key {
                "topology" => {
                    let p = PathBuf::from(value);
                    cfg.topology = Some(match path.parent() {
                        Some(dir) if p.is_relative() => dir.join(p),
                        _ => p,
                    });
                }
                "delivery" => cfg.delivery = value.parse().map_err(wrap)?,
                "ped" => cfg
                    .classes
                    .set_elasticities(parse_ped(value).map_err(wrap)?),
                "lb" => cfg.econ.min_user_fraction = parse_lb(value).map_err(wrap)?,
                "cascade" => cfg.cascade = value.parse().map_err(wrap)?,
                "grid_lower" => lower = number()?,
                "grid_step" => step = number()?,
                "grid_upper" => upper = Some(number()?),
                "grid_cap" => cap = number()?,
                "grid_prices" => explicit = Some(parse_list(value).map_err(parse_err)?),
                "rate_a" => cfg.classes.0[0].download_rate_gbps = number()?,
                "rate_b" => cfg.classes.0[1].download_rate_gbps = number()?,
                "rate_c" => cfg.classes.0[2].download_rate_gbps = number()?,
                "share_a" => cfg.classes.0[0].initial_share = number()?,
                "share_b" => cfg.classes.0[1].initial_share = number()?,
                "share_c" => cfg.classes.0[2].initial_share = number()?,
                "base_price" => cfg.econ.base_price_per_gbps = number()?,
                "core_cost" => cfg.econ.core_cost_per_gbps = number()?,
                "metro_access_cost" => cfg.econ.metro_access_cost_per_gbps = number()?,
                "total_users" => cfg.econ.total_users = number()?,
                "router_port_w" => cfg.power.router_port_w = number()?,
                "transponder_w" => cfg.power.transponder_w = number()?,
                "edfa_w" => cfg.power.edfa_w = number()?,
                "optical_switch_w" => cfg.power.optical_switch_w = number()?,
                "regenerator_w" => cfg.power.regenerator_w = number()?,
                "edfa_span_km" => cfg.power.edfa_span_km = number()?,
                "regen_reach_km" => cfg.power.regen_reach_km = number()?,
                "wavelengths_per_fiber" => {
                    cfg.power.wavelengths_per_fiber = value
                        .parse()
                        .map_err(|_| parse_err(format!("{key}: not an integer: {value:?}")))?
                }
                "wavelength_rate_gbps" => cfg.power.wavelength_rate_gbps = number()?,
                "pue" => cfg.power.pue = number()?,
                _ => return Err(parse_err(format!("unknown key {key:?}"))),
            }
        }
        cfg.grid = match explicit {
            Some(prices) => GridSpec::Explicit(prices),
            None => GridSpec::Range {
                lower,
                step,
                upper,
                cap,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets the LB mode: 0 keeps any number of users, 1 keeps all of them.
    pub fn set_lb(&mut self, lb: u8) -> Result<()> {
        self.econ.min_user_fraction = parse_lb(&lb.to_string())?;
        Ok(())
    }

    pub fn lb(&self) -> u8 {
        if self.econ.min_user_fraction >= 1.0 {
            1
        } else {
            0
        }
    }

    pub fn validate(&self) -> Result<()> {
        for e in self.classes.elasticities() {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::Param(format!("elasticity must be > 0, got {e}")));
            }
        }
        self.classes.validate()?;
        self.econ.validate()?;
        self.power.validate()?;
        // Grid errors surface here rather than mid-sweep.
        for e in self.classes.elasticities() {
            self.grid.prices(self.econ.base_price_per_gbps, e)?;
        }
        Ok(())
    }

    pub fn load_topology(&self) -> Result<Topology> {
        match &self.topology {
            Some(path) => Topology::load(path),
            None => Ok(Topology::att25()),
        }
    }

    fn context(&self) -> String {
        let [a, b, c] = self.classes.elasticities();
        format!(
            "{} ped={a}/{b}/{c} lb={} cascade={}",
            self.delivery,
            self.lb(),
            self.cascade
        )
    }
}

/// Intermediate products of one pipeline run.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub outcome: PricingOutcome,
    pub demands: DemandMatrix,
    pub dimensioning: NetworkDimensioning,
    pub power: PowerBreakdown,
}

pub fn evaluate(
    topology: &Topology,
    classes: &ServiceClasses,
    econ: &EconomicParams,
    power: &PowerParams,
    grid: &GridSpec,
    delivery: Delivery,
    cascade: CascadeMode,
) -> Result<Evaluation> {
    let table = build_solution_table(classes, econ, topology, grid)?;
    let outcome = optimize_pricing(&table, topology, econ, delivery, cascade)?;
    let demands = cloud_demands(&outcome, classes, topology, delivery);
    let demands = assign_to_datacenters(&demands, topology)?;
    let dimensioning = route_and_size(&demands, topology, power);
    let breakdown = network_power(&dimensioning, topology, power);
    Ok(Evaluation {
        outcome,
        demands,
        dimensioning,
        power: breakdown,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    /// Delivery mode name, or `nn` for the baseline.
    pub scenario: String,
    pub delivery: Delivery,
    pub elasticities: [f64; 3],
    pub lb: u8,
    pub prices: [f64; 3],
    /// Percent of the original population `u`; can exceed 100.
    pub users_pct: [f64; 3],
    pub users_pct_total: f64,
    pub revenue: f64,
    pub cost: f64,
    pub profit: f64,
    pub profit_ratio: f64,
    /// Demand crossing the core from the datacenters.
    pub core_traffic_gbps: f64,
    pub power: PowerBreakdown,
}

impl ReportRow {
    fn new(
        scenario: String,
        cfg: &ScenarioConfig,
        eval: &Evaluation,
        baseline_profit: f64,
    ) -> Self {
        let totals = eval.outcome.class_totals();
        let pct = totals.map(|t| 100.0 * t / cfg.econ.total_users);
        ReportRow {
            scenario,
            delivery: cfg.delivery,
            elasticities: cfg.classes.elasticities(),
            lb: cfg.lb(),
            prices: eval.outcome.prices,
            users_pct: pct,
            users_pct_total: 100.0 * totals.iter().sum::<f64>() / cfg.econ.total_users,
            revenue: eval.outcome.revenue,
            cost: eval.outcome.cost,
            profit: eval.outcome.profit,
            profit_ratio: eval.outcome.profit / baseline_profit,
            core_traffic_gbps: eval.demands.total_gbps(),
            power: eval.power,
        }
    }
}

/// Scenario rows plus the net-neutrality baseline for the same delivery.
#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub baseline: ReportRow,
    pub rows: Vec<ReportRow>,
    pub baseline_evaluation: Evaluation,
    /// Aligned with `rows`.
    pub evaluations: Vec<Evaluation>,
}

/// Every class at the base price with all original subscribers kept.
fn run_baseline(cfg: &ScenarioConfig, topology: &Topology) -> Result<(ReportRow, Evaluation)> {
    let mut econ = cfg.econ;
    econ.min_user_fraction = cfg
        .classes
        .iter()
        .map(|c| c.initial_share)
        .sum::<f64>()
        .min(1.0);
    let eval = evaluate(
        topology,
        &cfg.classes,
        &econ,
        &cfg.power,
        &GridSpec::anchor_only(),
        cfg.delivery,
        CascadeMode::Strict,
    )
    .map_err(|e| Error::Scenario {
        context: format!("{} baseline", cfg.delivery),
        source: Box::new(e),
    })?;
    let mut row = ReportRow::new("nn".into(), cfg, &eval, eval.outcome.profit);
    row.lb = 1;
    row.profit_ratio = 1.0;
    Ok((row, eval))
}

fn run_point(cfg: &ScenarioConfig, topology: &Topology) -> Result<Evaluation> {
    evaluate(
        topology,
        &cfg.classes,
        &cfg.econ,
        &cfg.power,
        &cfg.grid,
        cfg.delivery,
        cfg.cascade,
    )
    .map_err(|e| Error::Scenario {
        context: cfg.context(),
        source: Box::new(e),
    })
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport> {
    config.validate()?;
    let topology = config.load_topology()?;
    let (baseline, baseline_evaluation) = run_baseline(config, &topology)?;
    let eval = run_point(config, &topology)?;
    let row = ReportRow::new(
        config.delivery.to_string(),
        config,
        &eval,
        baseline_evaluation.outcome.profit,
    );
    Ok(ScenarioReport {
        baseline,
        rows: vec![row],
        baseline_evaluation,
        evaluations: vec![eval],
    })
}

/// One row per elasticity setting and LB mode (0 then 1), in input order.
/// Points run in parallel.
pub fn sweep(config: &ScenarioConfig, ped_list: &[[f64; 3]]) -> Result<ScenarioReport> {
    if ped_list.is_empty() {
        return Err(Error::Param("elasticity list is empty".into()));
    }
    let points: Vec<ScenarioConfig> = ped_list
        .iter()
        .flat_map(|ped| {
            [0.0, 1.0].map(|lb| {
                let mut cfg = config.clone();
                cfg.classes.set_elasticities(*ped);
                cfg.econ.min_user_fraction = lb;
                cfg
            })
        })
        .collect();
    for cfg in &points {
        cfg.validate()?;
    }
    let topology = config.load_topology()?;
    let (baseline, baseline_evaluation) = run_baseline(config, &topology)?;

    let results: Vec<Result<Evaluation>> = points
        .par_iter()
        .map(|cfg| run_point(cfg, &topology))
        .collect();
    let mut rows = Vec::with_capacity(points.len());
    let mut evaluations = Vec::with_capacity(points.len());
    for (cfg, result) in points.iter().zip(results) {
        let eval = result?;
        rows.push(ReportRow::new(
            cfg.delivery.to_string(),
            cfg,
            &eval,
            baseline_evaluation.outcome.profit,
        ));
        evaluations.push(eval);
    }
    Ok(ScenarioReport {
        baseline,
        rows,
        baseline_evaluation,
        evaluations,
    })
}
