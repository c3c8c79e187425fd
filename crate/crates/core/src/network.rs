//! Core-network demands, datacenter assignment and non-bypass dimensioning.
//!
//! Under non-bypass every lightpath spans exactly one physical hop, so the
//! virtual topology coincides with the physical one: a virtual link (i, j)
//! carries `W[i][j]` wavelengths and exists only where i and j are adjacent.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::params::{Delivery, PowerParams, ServiceClasses, UserMatrix};
use crate::pricing::PricingOutcome;
use crate::topology::Topology;

/// Traffic from one datacenter to one node, along a fixed node path.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    /// Datacenter node id.
    pub source: usize,
    pub dest: usize,
    pub gbps: f64,
    /// Node ids from `source` to `dest`; a single entry for local service.
    pub path: Vec<usize>,
}

impl Flow {
    pub fn hops(&self) -> usize {
        self.path.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DemandMatrix {
    /// Cloud-served demand in Gbps per node (`id - 1`) and class.
    pub cloud_demand: UserMatrix,
    pub flows: Vec<Flow>,
}

impl DemandMatrix {
    pub fn node_demand(&self, id: usize) -> f64 {
        self.cloud_demand[id - 1].iter().sum()
    }

    pub fn total_gbps(&self) -> f64 {
        self.cloud_demand.iter().flatten().sum()
    }

    /// Sum of flows leaving datacenter `source`, local service included.
    pub fn sourced_by(&self, source: usize) -> f64 {
        self.flows
            .iter()
            .filter(|f| f.source == source)
            .map(|f| f.gbps)
            .sum()
    }
}

/// One direction of a physical link.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedLink {
    pub m: usize,
    pub n: usize,
    pub distance_km: f64,
    pub traffic_gbps: f64,
    pub wavelengths: u64,
    pub fibers: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkDimensioning {
    /// Both directions of every physical link, ordered by `(m, n)`.
    pub links: Vec<DirectedLink>,
    /// Aggregation ports per node (`id - 1`); zero away from datacenters.
    pub aggregation_ports: Vec<u64>,
    pub routes: Vec<Flow>,
    pub wavelength_rate_gbps: f64,
}

impl NetworkDimensioning {
    pub fn link(&self, m: usize, n: usize) -> Option<&DirectedLink> {
        self.links.iter().find(|l| l.m == m && l.n == n)
    }

    /// Wavelengths of virtual link (i, j): the physical link's count when i
    /// and j are adjacent, zero otherwise.
    pub fn virtual_wavelengths(&self, i: usize, j: usize) -> u64 {
        self.link(i, j).map_or(0, |l| l.wavelengths)
    }

    /// Wavelengths of virtual link (i, j) routed over physical link (m, n).
    pub fn virtual_on_physical(&self, i: usize, j: usize, m: usize, n: usize) -> u64 {
        if (i, j) == (m, n) {
            self.virtual_wavelengths(i, j)
        } else {
            0
        }
    }

    pub fn total_wavelengths(&self) -> u64 {
        self.links.iter().map(|l| l.wavelengths).sum()
    }

    pub fn total_ports(&self) -> u64 {
        self.aggregation_ports.iter().sum()
    }

    /// Per-node `inbound + sourced - outbound - sunk`, in Gbps. Zero
    /// everywhere when flows are conserved.
    pub fn node_balance(&self) -> Vec<f64> {
        let count = self.aggregation_ports.len();
        let mut balance = vec![0.0; count];
        for l in &self.links {
            balance[l.n - 1] += l.traffic_gbps;
            balance[l.m - 1] -= l.traffic_gbps;
        }
        for f in &self.routes {
            balance[f.source - 1] += f.gbps;
            balance[f.dest - 1] -= f.gbps;
        }
        balance
    }

    /// Writes `link_m,link_n,traffic_gbps,wavelengths,fibers`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["link_m", "link_n", "traffic_gbps", "wavelengths", "fibers"])?;
        for l in &self.links {
            w.write_record([
                l.m.to_string(),
                l.n.to_string(),
                l.traffic_gbps.to_string(),
                l.wavelengths.to_string(),
                l.fibers.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Demand each node places on the cloud: users times class rate, zero at
/// fog-served nodes.
pub fn cloud_demands(
    outcome: &PricingOutcome,
    classes: &ServiceClasses,
    topology: &Topology,
    delivery: Delivery,
) -> DemandMatrix {
    let rates = classes.rates();
    let fog = delivery.fog_mask(topology);
    let cloud_demand = outcome
        .users
        .iter()
        .zip(&fog)
        .map(|(row, fogged)| {
            if *fogged {
                [0.0; 3]
            } else {
                [row[0] * rates[0], row[1] * rates[1], row[2] * rates[2]]
            }
        })
        .collect();
    DemandMatrix {
        cloud_demand,
        flows: Vec::new(),
    }
}

/// Per-node `(hops, km)` from the root and predecessor toward it.
type Tree = (Vec<Option<(usize, f64)>>, Vec<Option<usize>>);

/// Shortest-path tree from `root` ordered by (hops, km). Equal-cost
/// alternatives keep the lower-id predecessor.
fn shortest_tree(adjacency: &[Vec<(usize, f64)>], root: usize) -> Tree {
    let count = adjacency.len();
    let mut cost: Vec<Option<(usize, f64)>> = vec![None; count];
    let mut pred: Vec<Option<usize>> = vec![None; count];
    let mut done = vec![false; count];
    cost[root] = Some((0, 0.0));
    loop {
        let next = (0..count)
            .filter(|&v| !done[v])
            .filter_map(|v| cost[v].map(|c| (v, c)))
            .min_by(|(va, (ha, ka)), (vb, (hb, kb))| {
                ha.cmp(hb).then(ka.total_cmp(kb)).then(va.cmp(vb))
            });
        let Some((u, (hops, km))) = next else { break };
        done[u] = true;
        for &(v, dist) in &adjacency[u] {
            if done[v] {
                continue;
            }
            let cand = (hops + 1, km + dist);
            let replace = match cost[v] {
                None => true,
                Some(cur) => {
                    cand.0 < cur.0
                        || (cand.0 == cur.0 && cand.1 < cur.1)
                        || (cand == cur && pred[v].is_none_or(|p| u < p))
                }
            };
            if replace {
                cost[v] = Some(cand);
                pred[v] = Some(u);
            }
        }
    }
    (cost, pred)
}

/// Serves each node's whole demand from its nearest datacenter: fewest hops,
/// then shortest distance, then lowest datacenter id.
pub fn assign_to_datacenters(demands: &DemandMatrix, topology: &Topology) -> Result<DemandMatrix> {
    let adjacency = topology.adjacency();
    let trees: Vec<(usize, Tree)> = topology
        .datacenter_ids()
        .into_iter()
        .map(|id| (id, shortest_tree(&adjacency, id - 1)))
        .collect();

    let mut flows = Vec::new();
    for d in 0..topology.node_count() {
        let gbps: f64 = demands.cloud_demand[d].iter().sum();
        if gbps <= 0.0 {
            continue;
        }
        let chosen = trees
            .iter()
            .filter_map(|(id, (cost, pred))| cost[d].map(|c| (*id, c, pred)))
            .min_by(|(ia, (ha, ka), _), (ib, (hb, kb), _)| {
                ha.cmp(hb).then(ka.total_cmp(kb)).then(ia.cmp(ib))
            });
        let Some((source, _, pred)) = chosen else {
            return Err(Error::Unreachable(d + 1));
        };
        let mut path = vec![d + 1];
        let mut at = d;
        while let Some(p) = pred[at] {
            path.push(p + 1);
            at = p;
        }
        path.reverse();
        debug_assert_eq!(path[0], source);
        flows.push(Flow {
            source,
            dest: d + 1,
            gbps,
            path,
        });
    }
    Ok(DemandMatrix {
        cloud_demand: demands.cloud_demand.clone(),
        flows,
    })
}

/// Accumulates flows on directed links and sizes wavelengths, fibers and
/// datacenter aggregation ports.
pub fn route_and_size(
    flows: &DemandMatrix,
    topology: &Topology,
    power: &PowerParams,
) -> NetworkDimensioning {
    let rate = power.wavelength_rate_gbps;
    let mut traffic: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for l in topology.links() {
        traffic.insert((l.m, l.n), 0.0);
        traffic.insert((l.n, l.m), 0.0);
    }
    for f in &flows.flows {
        for hop in f.path.windows(2) {
            *traffic
                .get_mut(&(hop[0], hop[1]))
                .expect("flow paths follow physical links") += f.gbps;
        }
    }

    let per_fiber = u64::from(power.wavelengths_per_fiber);
    let links = traffic
        .into_iter()
        .map(|((m, n), gbps)| {
            let wavelengths = (gbps / rate).ceil() as u64;
            DirectedLink {
                m,
                n,
                distance_km: topology.distance(m, n).expect("link exists"),
                traffic_gbps: gbps,
                wavelengths,
                fibers: wavelengths.div_ceil(per_fiber),
            }
        })
        .collect();

    let aggregation_ports = topology
        .nodes()
        .iter()
        .map(|node| {
            if node.has_datacenter {
                (flows.sourced_by(node.id) / rate).ceil() as u64
            } else {
                0
            }
        })
        .collect();

    NetworkDimensioning {
        links,
        aggregation_ports,
        routes: flows.flows.clone(),
        wavelength_rate_gbps: rate,
    }
}
