//! Seeded random instances and invariant checks shared by the integration
//! tests and the acceptance run.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tariffnet_core::network::DemandMatrix;
use tariffnet_core::params::class_totals;
use tariffnet_core::{
    build_solution_table, CascadeMode, Delivery, EconomicParams, GridSpec, LinkRecord,
    NetworkDimensioning, NodeRecord, PowerBreakdown, PowerParams, PricingOutcome, ServiceClasses,
    SolutionTable, Topology,
};

pub struct Instance {
    pub topology: Topology,
    pub classes: ServiceClasses,
    pub econ: EconomicParams,
    pub grid: GridSpec,
    pub table: SolutionTable,
}

/// Connected topology with 1..=`max_nodes` nodes and at least one datacenter.
pub fn random_topology(rng: &mut ChaCha8Rng, max_nodes: usize) -> Topology {
    let count = rng.gen_range(1..=max_nodes);
    let weights: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..1.0)).collect();
    let sum: f64 = weights.iter().sum();
    let mut shares: Vec<f64> = weights.iter().map(|w| w / sum).collect();
    let head: f64 = shares[..count - 1].iter().sum();
    shares[count - 1] = 1.0 - head;

    let mut dcs: Vec<bool> = (0..count).map(|_| rng.gen_bool(0.5)).collect();
    if !dcs.iter().any(|&d| d) {
        let pick = rng.gen_range(0..count);
        dcs[pick] = true;
    }
    let nodes = (0..count)
        .map(|i| NodeRecord {
            id: i + 1,
            name: format!("n{}", i + 1),
            population_share: shares[i],
            has_datacenter: dcs[i],
            has_fog: rng.gen_bool(0.4),
        })
        .collect();

    // A random spanning chain, then a few chords.
    let mut order: Vec<usize> = (1..=count).collect();
    order.shuffle(rng);
    let mut pairs: Vec<(usize, usize)> = order
        .windows(2)
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
        .collect();
    for m in 1..=count {
        for n in m + 1..=count {
            if !pairs.contains(&(m, n)) && rng.gen_bool(0.3) {
                pairs.push((m, n));
            }
        }
    }
    let links = pairs
        .into_iter()
        .map(|(m, n)| LinkRecord {
            m,
            n,
            distance_km: rng.gen_range(20.0..4000.0f64).round(),
        })
        .collect();
    Topology::new(nodes, links).expect("generated topology is valid")
}

/// Small instance the brute-force oracle can handle: at most 4 nodes and
/// 12 prices per class.
pub fn random_instance(seed: u64, min_user_fraction: f64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topology = random_topology(&mut rng, 4);
    let classes = ServiceClasses::with_elasticities([
        rng.gen_range(0.1..3.0),
        rng.gen_range(0.1..3.0),
        rng.gen_range(0.1..3.0),
    ]);
    let econ = EconomicParams {
        total_users: rng.gen_range(100.0..10_000.0f64).round(),
        min_user_fraction,
        ..Default::default()
    };
    let count = rng.gen_range(1..=11);
    let prices: Vec<f64> = (0..count)
        .map(|_| (rng.gen_range(0.5..2.5) * 131.0 * 2.0f64).round() / 2.0)
        .collect();
    let grid = GridSpec::Explicit(prices);
    let table = build_solution_table(&classes, &econ, &topology, &grid).expect("valid grid");
    Instance {
        topology,
        classes,
        econ,
        grid,
        table,
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

/// Checks an optimizer outcome against its inputs. Returns the first
/// violated property.
pub fn check_outcome(
    inst: &Instance,
    delivery: Delivery,
    out: &PricingOutcome,
) -> Result<(), String> {
    let [pa, pb, pc] = out.prices;
    if !(pa >= pb && pb >= pc) {
        return Err(format!("price order violated: {:?}", out.prices));
    }
    let total = out.total_users();
    let floor = inst.econ.total_users * inst.econ.min_user_fraction;
    if total < floor - 1e-6 * (1.0 + floor) {
        return Err(format!("{total} users below floor {floor}"));
    }
    // Equal retention ratio at every node, per class.
    for i in 0..3 {
        let ratios: Vec<f64> = out
            .users
            .iter()
            .zip(&inst.table.initial)
            .filter(|(_, n)| n[i] > 0.0)
            .map(|(u, n)| u[i] / n[i])
            .collect();
        if let Some(first) = ratios.first() {
            if let Some(r) = ratios.iter().find(|r| (*r - first).abs() > 1e-9) {
                return Err(format!("class {i} ratio {r} differs from {first}"));
            }
        }
    }
    // Accounts recomputed from the per-node users.
    let rates = inst.classes.rates();
    let fog = delivery.fog_mask(&inst.topology);
    let (mut revenue, mut cost) = (0.0, 0.0);
    for (d, row) in out.users.iter().enumerate() {
        for i in 0..3 {
            if row[i] < -1e-12 {
                return Err(format!("negative users at node {}", d + 1));
            }
            let gbps = row[i] * rates[i];
            revenue += gbps * out.prices[i];
            cost += gbps
                * (inst.econ.metro_access_cost_per_gbps
                    + if fog[d] {
                        0.0
                    } else {
                        inst.econ.core_cost_per_gbps
                    });
        }
    }
    if !close(revenue, out.revenue, 1e-9) || !close(cost, out.cost, 1e-9) {
        return Err(format!(
            "accounts differ: revenue {revenue} vs {}, cost {cost} vs {}",
            out.revenue, out.cost
        ));
    }
    if !close(out.profit, out.revenue - out.cost, 1e-12) {
        return Err("profit is not revenue minus cost".into());
    }
    Ok(())
}

/// Conservation, source and capacity checks on a routed, sized network.
pub fn check_network(
    topology: &Topology,
    demands: &DemandMatrix,
    dim: &NetworkDimensioning,
    power: &PowerParams,
) -> Result<(), String> {
    let nodes = topology.node_count();
    let rate = power.wavelength_rate_gbps;
    let per_fiber = u64::from(power.wavelengths_per_fiber);

    let mut served = vec![0.0; nodes];
    let mut sourced = vec![0.0; nodes];
    for f in &demands.flows {
        if !topology.node(f.source).is_some_and(|n| n.has_datacenter) {
            return Err(format!("flow sourced at non-datacenter node {}", f.source));
        }
        if f.path.first() != Some(&f.source) || f.path.last() != Some(&f.dest) {
            return Err(format!(
                "path {:?} does not join {}->{}",
                f.path, f.source, f.dest
            ));
        }
        for hop in f.path.windows(2) {
            if topology.distance(hop[0], hop[1]).is_none() {
                return Err(format!("hop {:?} is not a physical link", hop));
            }
        }
        served[f.dest - 1] += f.gbps;
        sourced[f.source - 1] += f.gbps;
    }
    for d in 0..nodes {
        let want: f64 = demands.cloud_demand[d].iter().sum();
        if !close(served[d], want, 1e-12) {
            return Err(format!("node {} served {} of {want}", d + 1, served[d]));
        }
    }

    // inbound + sourced == outbound + sunk at every node.
    let mut balance = vec![0.0; nodes];
    let mut scale = 0.0f64;
    for l in &dim.links {
        balance[l.n - 1] += l.traffic_gbps;
        balance[l.m - 1] -= l.traffic_gbps;
        scale = scale.max(l.traffic_gbps);
    }
    for d in 0..nodes {
        balance[d] += sourced[d] - served[d];
        if balance[d].abs() > 1e-9 * (1.0 + scale) {
            return Err(format!(
                "flow not conserved at node {}: {}",
                d + 1,
                balance[d]
            ));
        }
    }

    for l in &dim.links {
        let cap = l.wavelengths as f64 * rate;
        if l.traffic_gbps > cap {
            return Err(format!("link {}->{} over capacity", l.m, l.n));
        }
        if l.wavelengths > 0 && l.traffic_gbps <= cap - rate {
            return Err(format!("link {}->{} has a spare wavelength", l.m, l.n));
        }
        if l.wavelengths > per_fiber * l.fibers
            || (l.fibers > 0 && l.wavelengths <= per_fiber * (l.fibers - 1))
        {
            return Err(format!("link {}->{} fiber count off", l.m, l.n));
        }
        if dim.virtual_wavelengths(l.m, l.n) != l.wavelengths {
            return Err("virtual link differs from its physical link".into());
        }
    }
    for node in topology.nodes() {
        let ports = dim.aggregation_ports[node.id - 1];
        let need = sourced[node.id - 1] / rate;
        if node.has_datacenter {
            if (ports as f64) < need || (ports > 0 && (ports - 1) as f64 >= need) {
                return Err(format!("node {} has {ports} ports for {need}", node.id));
            }
        } else if ports != 0 {
            return Err(format!("node {} has ports but no datacenter", node.id));
        }
    }
    Ok(())
}

/// Traffic identity and linearity: scaling every hardware count by `k`
/// scales the traffic-dependent power by `k` and leaves switches alone.
pub fn check_power(
    topology: &Topology,
    dim: &NetworkDimensioning,
    params: &PowerParams,
    k: u64,
) -> Result<(), String> {
    let base: PowerBreakdown = tariffnet_core::network_power(dim, topology, params);
    let lit = dim.links.iter().map(|l| l.wavelengths).sum::<u64>() as f64;
    if base.total_link_traffic_gbps != lit * params.wavelength_rate_gbps {
        return Err("link traffic is not B times total wavelengths".into());
    }
    let mut scaled = dim.clone();
    for l in &mut scaled.links {
        l.wavelengths *= k;
        l.fibers *= k;
    }
    for p in &mut scaled.aggregation_ports {
        *p *= k;
    }
    let big = tariffnet_core::network_power(&scaled, topology, params);
    let kf = k as f64;
    let pairs = [
        (base.router_ports_w, big.router_ports_w),
        (base.transponders_w, big.transponders_w),
        (base.edfas_w, big.edfas_w),
        (base.regenerators_w, big.regenerators_w),
    ];
    for (one, many) in pairs {
        if many != kf * one {
            return Err(format!("power {one} scaled by {k} gave {many}"));
        }
    }
    if big.optical_switches_w != base.optical_switches_w {
        return Err("switch power depends on traffic".into());
    }
    let sum = big.router_ports_w
        + big.transponders_w
        + big.edfas_w
        + big.optical_switches_w
        + big.regenerators_w;
    if big.total_w != sum {
        return Err("total is not the sum of components".into());
    }
    Ok(())
}

pub fn totals(out: &PricingOutcome) -> [f64; 3] {
    class_totals(&out.users)
}

pub const CASCADES: [CascadeMode; 2] = [CascadeMode::Strict, CascadeMode::Verbatim];
pub const LB_MODES: [f64; 2] = [0.0, 1.0];

/// Runs optimizer and oracle on one seeded instance. Both must agree on
/// feasibility; when feasible the optimizer must be at least as good as the
/// oracle and no better than the oracle's discretization gap allows.
pub fn compare_with_oracle(
    seed: u64,
    delivery: Delivery,
    cascade: CascadeMode,
    lb: f64,
) -> Result<(), String> {
    use tariffnet_core::{brute_force_oracle, discretization_gap, optimize_pricing};

    let inst = random_instance(seed, lb);
    let fast = optimize_pricing(&inst.table, &inst.topology, &inst.econ, delivery, cascade);
    let slow = brute_force_oracle(&inst.table, &inst.topology, &inst.econ, delivery, cascade);
    let tag = format!("seed {seed} {delivery} {cascade} lb={lb}");
    match (fast, slow) {
        (Err(f), Err(s)) if f.is_infeasible() && s.is_infeasible() => Ok(()),
        (Ok(fast), Ok(slow)) => {
            check_outcome(&inst, delivery, &fast).map_err(|e| format!("{tag}: {e}"))?;
            let gap = discretization_gap(
                &inst.table,
                &inst.topology,
                &inst.econ,
                delivery,
                cascade,
                &fast,
            );
            let slack = 1e-6 * (1.0 + fast.profit.abs());
            if fast.profit < slow.profit - slack {
                return Err(format!(
                    "{tag}: optimizer {} below oracle {}",
                    fast.profit, slow.profit
                ));
            }
            if fast.profit > slow.profit + gap + slack {
                return Err(format!(
                    "{tag}: optimizer {} beats oracle {} by more than gap {gap}",
                    fast.profit, slow.profit
                ));
            }
            Ok(())
        }
        (f, s) => Err(format!(
            "{tag}: feasibility differs (optimizer {:?}, oracle {:?})",
            f.map(|o| o.profit).map_err(|e| e.to_string()),
            s.map(|o| o.profit).map_err(|e| e.to_string()),
        )),
    }
}
