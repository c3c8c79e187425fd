//! IP-over-WDM power consumption under non-bypass.

use std::io::Write;

use crate::error::Result;
use crate::network::NetworkDimensioning;
use crate::params::PowerParams;
use crate::topology::Topology;

/// In-line amplifiers on a link: `floor(distance / span - 1)`, never negative.
pub fn edfa_count(distance_km: f64, span_km: f64) -> u64 {
    (distance_km / span_km - 1.0).floor().max(0.0) as u64
}

/// Regenerators on a link: `ceil(distance / reach) - 1`, never negative.
pub fn regen_count(distance_km: f64, reach_km: f64) -> u64 {
    ((distance_km / reach_km).ceil() - 1.0).max(0.0) as u64
}

/// Watts, PUE included.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PowerBreakdown {
    pub router_ports_w: f64,
    pub transponders_w: f64,
    pub edfas_w: f64,
    pub optical_switches_w: f64,
    pub regenerators_w: f64,
    pub total_w: f64,
    /// Wavelength capacity lit on core links: `B * sum(W)`.
    pub total_link_traffic_gbps: f64,
}

impl PowerBreakdown {
    /// Writes `component,value`: one row per component, then total and traffic.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["component", "value"])?;
        let rows = [
            ("router_ports_w", self.router_ports_w),
            ("transponders_w", self.transponders_w),
            ("edfas_w", self.edfas_w),
            ("optical_switches_w", self.optical_switches_w),
            ("regenerators_w", self.regenerators_w),
            ("total_w", self.total_w),
            ("total_link_traffic_gbps", self.total_link_traffic_gbps),
        ];
        for (name, value) in rows {
            w.write_record([name.to_string(), value.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn network_power(
    dim: &NetworkDimensioning,
    topology: &Topology,
    params: &PowerParams,
) -> PowerBreakdown {
    let pue = params.pue;
    let wavelengths = dim.total_wavelengths() as f64;
    let ports = dim.total_ports() as f64;
    let (mut amplified_fibers, mut regenerated_wavelengths) = (0u64, 0u64);
    for l in &dim.links {
        amplified_fibers += l.fibers * edfa_count(l.distance_km, params.edfa_span_km);
        regenerated_wavelengths +=
            l.wavelengths * regen_count(l.distance_km, params.regen_reach_km);
    }

    let router_ports_w = pue * params.router_port_w * (ports + wavelengths);
    let transponders_w = pue * params.transponder_w * wavelengths;
    let edfas_w = pue * params.edfa_w * amplified_fibers as f64;
    let optical_switches_w = pue * params.optical_switch_w * topology.node_count() as f64;
    let regenerators_w = pue * params.regenerator_w * regenerated_wavelengths as f64;
    PowerBreakdown {
        router_ports_w,
        transponders_w,
        edfas_w,
        optical_switches_w,
        regenerators_w,
        total_w: router_ports_w + transponders_w + edfas_w + optical_switches_w + regenerators_w,
        total_link_traffic_gbps: wavelengths * dim.wavelength_rate_gbps,
    }
}

#[cfg(test)]
mod tests {
    use std::path::Path;

    use super::*;
    use crate::network::DirectedLink;

    #[test]
    fn edfa_counts() {
        assert_eq!(edfa_count(80.0, 80.0), 0);
        assert_eq!(edfa_count(1000.0, 80.0), 11);
        assert_eq!(edfa_count(50.0, 80.0), 0);
    }

    #[test]
    fn regen_counts() {
        assert_eq!(regen_count(1000.0, 2000.0), 0);
        assert_eq!(regen_count(2500.0, 2000.0), 1);
        assert_eq!(regen_count(4500.0, 2000.0), 2);
        assert_eq!(regen_count(2000.0, 2000.0), 0);
    }

    fn two_nodes() -> Topology {
        Topology::parse(
            "[nodes]\n1,a,0.5,1,0\n2,b,0.5,0,0\n[links]\n1,2,80\n",
            Path::new("t"),
        )
        .unwrap()
    }

    fn one_link(wavelengths: u64, ports: u64, distance_km: f64) -> NetworkDimensioning {
        NetworkDimensioning {
            links: vec![DirectedLink {
                m: 1,
                n: 2,
                distance_km,
                traffic_gbps: 0.0,
                wavelengths,
                fibers: wavelengths.div_ceil(32),
            }],
            aggregation_ports: vec![ports, 0],
            routes: Vec::new(),
            wavelength_rate_gbps: 40.0,
        }
    }

    #[test]
    fn idle_network_draws_switch_power_only() {
        let topo = Topology::att25();
        let dim = NetworkDimensioning {
            links: Vec::new(),
            aggregation_ports: vec![0; 25],
            routes: Vec::new(),
            wavelength_rate_gbps: 40.0,
        };
        let p = network_power(&dim, &topo, &PowerParams::default());
        assert_eq!(p.total_w, 3187.5);
        assert_eq!(p.optical_switches_w, 3187.5);
        assert_eq!(p.total_link_traffic_gbps, 0.0);
    }

    #[test]
    fn single_link_components() {
        let p = network_power(&one_link(2, 3, 80.0), &two_nodes(), &PowerParams::default());
        assert_eq!(p.router_ports_w, 4785.0);
        assert_eq!(p.transponders_w, 387.0);
        assert_eq!(p.edfas_w, 0.0);
        assert_eq!(p.regenerators_w, 0.0);
        assert_eq!(p.total_link_traffic_gbps, 80.0);
    }

    #[test]
    fn long_link_adds_amplifiers_and_regenerators() {
        let p = network_power(
            &one_link(2, 0, 2500.0),
            &two_nodes(),
            &PowerParams::default(),
        );
        // 30 EDFAs on one fiber, one regenerator per wavelength.
        assert_eq!(p.edfas_w, 1.5 * 11.0 * 30.0);
        assert_eq!(p.regenerators_w, 1.5 * 114.0 * 2.0);
    }

    #[test]
    fn doubling_counts_doubles_traffic_dependent_power() {
        let topo = two_nodes();
        let params = PowerParams::default();
        let one = network_power(&one_link(32, 3, 1000.0), &topo, &params);
        let two = network_power(&one_link(64, 6, 1000.0), &topo, &params);
        assert_eq!(two.router_ports_w, 2.0 * one.router_ports_w);
        assert_eq!(two.transponders_w, 2.0 * one.transponders_w);
        assert_eq!(two.edfas_w, 2.0 * one.edfas_w);
        assert_eq!(two.regenerators_w, 2.0 * one.regenerators_w);
        assert_eq!(two.optical_switches_w, one.optical_switches_w);
    }

    #[test]
    fn csv_rows() {
        let p = network_power(&one_link(2, 3, 80.0), &two_nodes(), &PowerParams::default());
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 8);
        assert!(text.contains("router_ports_w,4785\n"));
    }
}
