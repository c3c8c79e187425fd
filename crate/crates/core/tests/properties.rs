mod common;

use std::path::Path;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{check_network, check_outcome, check_power, random_instance, random_topology};
use tariffnet_core::{
    assign_to_datacenters, cloud_demands, optimize_pricing, route_and_size, CascadeMode, Delivery,
    PowerParams, Topology,
};

fn delivery_strategy() -> impl Strategy<Value = Delivery> {
    prop_oneof![
        Just(Delivery::Cloud),
        Just(Delivery::CloudFog),
        Just(Delivery::Fog)
    ]
}

fn cascade_strategy() -> impl Strategy<Value = CascadeMode> {
    prop_oneof![Just(CascadeMode::Strict), Just(CascadeMode::Verbatim)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outcomes_respect_order_floor_and_ratios(
        seed in any::<u64>(),
        delivery in delivery_strategy(),
        cascade in cascade_strategy(),
        lb in prop_oneof![Just(0.0), Just(1.0)],
    ) {
        let inst = random_instance(seed, lb);
        match optimize_pricing(&inst.table, &inst.topology, &inst.econ, delivery, cascade) {
            Ok(out) => {
                if let Err(e) = check_outcome(&inst, delivery, &out) {
                    prop_assert!(false, "{}", e);
                }
            }
            Err(e) => prop_assert!(e.is_infeasible() && lb > 0.0, "{}", e),
        }
    }

    #[test]
    fn dropping_the_floor_never_lowers_profit(
        seed in any::<u64>(),
        delivery in delivery_strategy(),
        cascade in cascade_strategy(),
    ) {
        let free = random_instance(seed, 0.0);
        let bound = random_instance(seed, 1.0);
        let p0 = optimize_pricing(&free.table, &free.topology, &free.econ, delivery, cascade)
            .unwrap()
            .profit;
        if let Ok(out) = optimize_pricing(&bound.table, &bound.topology, &bound.econ, delivery, cascade) {
            prop_assert!(p0 >= out.profit - 1e-9 * (1.0 + p0.abs()), "{} < {}", p0, out.profit);
        }
    }

    #[test]
    fn networks_conserve_flow_and_fit_capacity(
        seed in any::<u64>(),
        delivery in delivery_strategy(),
        k in 2u64..5,
    ) {
        let inst = random_instance(seed, 0.0);
        let power = PowerParams::default();
        let out = optimize_pricing(&inst.table, &inst.topology, &inst.econ, delivery, CascadeMode::Strict)
            .unwrap();
        let demands = cloud_demands(&out, &inst.classes, &inst.topology, delivery);
        let demands = assign_to_datacenters(&demands, &inst.topology).unwrap();
        let dim = route_and_size(&demands, &inst.topology, &power);
        if let Err(e) = check_network(&inst.topology, &demands, &dim, &power) {
            prop_assert!(false, "{}", e);
        }
        if let Err(e) = check_power(&inst.topology, &dim, &power, k) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn extra_fog_site_never_adds_wavelengths(seed in any::<u64>()) {
        let inst = random_instance(seed, 0.0);
        let power = PowerParams::default();
        let out = optimize_pricing(
            &inst.table,
            &inst.topology,
            &inst.econ,
            Delivery::Cloud,
            CascadeMode::Strict,
        )
        .unwrap();
        // One fog site first, then a second one on top.
        let n = inst.topology.node_count();
        let mut nodes = inst.topology.nodes().to_vec();
        for node in &mut nodes {
            node.has_fog = node.id == 1;
        }
        let one = Topology::new(nodes.clone(), inst.topology.links().to_vec()).unwrap();
        nodes[n - 1].has_fog = true;
        let two = Topology::new(nodes, inst.topology.links().to_vec()).unwrap();

        let size = |topo: &Topology| {
            let d = cloud_demands(&out, &inst.classes, topo, Delivery::CloudFog);
            let d = assign_to_datacenters(&d, topo).unwrap();
            route_and_size(&d, topo, &power)
        };
        let (a, b) = (size(&one), size(&two));
        for (la, lb) in a.links.iter().zip(&b.links) {
            prop_assert_eq!((la.m, la.n), (lb.m, lb.n));
            prop_assert!(lb.wavelengths <= la.wavelengths);
        }
    }

    #[test]
    fn topology_text_round_trips(seed in any::<u64>(), max_nodes in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let topo = random_topology(&mut rng, max_nodes);
        let text = topo.to_text();
        let back = Topology::parse(&text, Path::new("roundtrip")).unwrap();
        prop_assert_eq!(back, topo);
    }
}

#[test]
fn bundled_topology_round_trips() {
    let topo = Topology::att25();
    let back = Topology::parse(&topo.to_text(), Path::new("att25")).unwrap();
    assert_eq!(back, topo);
}
