//! Differentiated-tariff pricing for an ISP and the IP-over-WDM core
//! network that carries the resulting traffic.
//!
//! The pipeline runs in five steps: build per-class price tables from the
//! elasticity of demand, pick the profit-maximizing price triple, turn the
//! chosen subscribers into core demands, route and size the network, and
//! evaluate its power draw. [`scenario`] wires the steps together.

pub mod demand;
pub mod error;
pub mod network;
pub mod oracle;
pub mod params;
pub mod power;
pub mod pricing;
pub mod report;
pub mod scenario;
pub mod topology;

pub use demand::{build_solution_table, demand_response, GridSpec, PriceSolution, SolutionTable};
pub use error::{Error, Result};
pub use network::{
    assign_to_datacenters, cloud_demands, route_and_size, DemandMatrix, DirectedLink, Flow,
    NetworkDimensioning,
};
pub use oracle::{brute_force_oracle, discretization_gap};
pub use params::{
    ClassId, Delivery, EconomicParams, PowerParams, ServiceClassSpec, ServiceClasses, UserMatrix,
};
pub use power::{network_power, PowerBreakdown};
pub use pricing::{optimize_pricing, CascadeMode, PricingOutcome};
pub use report::{emit_report, ReportFormat};
pub use scenario::{run_scenario, sweep, ReportRow, ScenarioConfig, ScenarioReport};
pub use topology::{LinkRecord, NodeRecord, Topology};
