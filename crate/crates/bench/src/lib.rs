//! Shared inputs for the criterion benches.

use tariffnet_core::{
    build_solution_table, EconomicParams, GridSpec, ScenarioConfig, ServiceClasses, SolutionTable,
    Topology,
};

/// The reference setup with every class at elasticity `ped`.
pub fn config(ped: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    cfg.classes.set_elasticities([ped; 3]);
    cfg
}

/// Default-grid solution table on att25.
pub fn att25_table(ped: f64) -> (Topology, EconomicParams, SolutionTable) {
    let topo = Topology::att25();
    let econ = EconomicParams::default();
    let table = build_solution_table(
        &ServiceClasses::with_elasticities([ped; 3]),
        &econ,
        &topo,
        &GridSpec::default(),
    )
    .expect("default grid is valid");
    (topo, econ, table)
}
