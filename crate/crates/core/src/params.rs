//! Service classes, economic and power parameters, delivery modes, and the
//! net-neutrality user distribution derived from them.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::topology::Topology;

/// Number of fog sites placed by cloud-fog delivery when the topology file
/// flags none.
pub const DEFAULT_FOG_SITES: usize = 10;

/// Service class, ordered from the highest rate to the lowest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassId {
    A,
    B,
    C,
}

impl ClassId {
    pub const ALL: [ClassId; 3] = [ClassId::A, ClassId::B, ClassId::C];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassId::A => "A",
            ClassId::B => "B",
            ClassId::C => "C",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceClassSpec {
    pub class_id: ClassId,
    /// Per-user download rate in Gbps.
    pub download_rate_gbps: f64,
    /// Price elasticity of demand, non-negative.
    pub elasticity: f64,
    /// Fraction of all users subscribed to this class under net neutrality.
    pub initial_share: f64,
}

/// The three classes A, B, C in order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceClasses(pub [ServiceClassSpec; 3]);

impl Default for ServiceClasses {
    /// UHD 18 Mbps / HD 7.2 Mbps / SD 2 Mbps at 19% / 56% / 25%.
    fn default() -> Self {
        Self::with_elasticities([0.2; 3])
    }
}

impl ServiceClasses {
    pub fn with_elasticities(elasticities: [f64; 3]) -> Self {
        let spec = |class_id, rate, share, e| ServiceClassSpec {
            class_id,
            download_rate_gbps: rate,
            elasticity: e,
            initial_share: share,
        };
        ServiceClasses([
            spec(ClassId::A, 0.018, 0.19, elasticities[0]),
            spec(ClassId::B, 0.0072, 0.56, elasticities[1]),
            spec(ClassId::C, 0.002, 0.25, elasticities[2]),
        ])
    }

    pub fn get(&self, class: ClassId) -> &ServiceClassSpec {
        &self.0[class.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &ServiceClassSpec> {
        self.0.iter()
    }

    pub fn rates(&self) -> [f64; 3] {
        self.0.map(|c| c.download_rate_gbps)
    }

    pub fn elasticities(&self) -> [f64; 3] {
        self.0.map(|c| c.elasticity)
    }

    pub fn set_elasticities(&mut self, elasticities: [f64; 3]) {
        for (c, e) in self.0.iter_mut().zip(elasticities) {
            c.elasticity = e;
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.0.iter().enumerate() {
            if c.class_id.index() != i {
                return Err(Error::Param("classes must be ordered A, B, C".into()));
            }
            if !(c.download_rate_gbps.is_finite() && c.download_rate_gbps > 0.0) {
                return Err(Error::Param(format!(
                    "class {} rate must be > 0",
                    c.class_id
                )));
            }
            if !(c.elasticity.is_finite() && c.elasticity >= 0.0) {
                return Err(Error::Param(format!(
                    "class {} elasticity must be >= 0",
                    c.class_id
                )));
            }
            if !(c.initial_share.is_finite() && c.initial_share >= 0.0) {
                return Err(Error::Param(format!(
                    "class {} initial share must be >= 0",
                    c.class_id
                )));
            }
        }
        let [a, b, c] = self.rates();
        if !(a > b && b > c) {
            return Err(Error::Param(
                "download rates must strictly decrease from A to C".into(),
            ));
        }
        let shares: f64 = self.0.iter().map(|c| c.initial_share).sum();
        if shares > 1.0 + 1e-12 {
            return Err(Error::Param(format!("initial shares sum to {shares} > 1")));
        }
        Ok(())
    }
}

/// Monetary values are US$ per Gbps per month.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EconomicParams {
    /// Net-neutrality selling price.
    pub base_price_per_gbps: f64,
    /// IP-over-WDM core provisioning cost.
    pub core_cost_per_gbps: f64,
    /// Metro plus access provisioning cost.
    pub metro_access_cost_per_gbps: f64,
    pub total_users: f64,
    /// Fraction of `total_users` the pricing must retain, in [0, 1].
    pub min_user_fraction: f64,
}

impl Default for EconomicParams {
    fn default() -> Self {
        EconomicParams {
            base_price_per_gbps: 131.0,
            core_cost_per_gbps: 28.0,
            metro_access_cost_per_gbps: 90.0,
            total_users: 1.8e6,
            min_user_fraction: 0.0,
        }
    }
}

impl EconomicParams {
    pub fn validate(&self) -> Result<()> {
        let money = [
            ("base price", self.base_price_per_gbps),
            ("core cost", self.core_cost_per_gbps),
            ("metro/access cost", self.metro_access_cost_per_gbps),
            ("total users", self.total_users),
        ];
        for (what, v) in money {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Param(format!("{what} must be >= 0, got {v}")));
            }
        }
        if self.base_price_per_gbps <= 0.0 {
            return Err(Error::Param("base price must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.min_user_fraction) {
            return Err(Error::Param(format!(
                "min user fraction must lie in [0, 1], got {}",
                self.min_user_fraction
            )));
        }
        Ok(())
    }

    /// Users the pricing must retain.
    pub fn min_users(&self) -> f64 {
        self.total_users * self.min_user_fraction
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerParams {
    pub router_port_w: f64,
    pub transponder_w: f64,
    pub edfa_w: f64,
    pub optical_switch_w: f64,
    pub regenerator_w: f64,
    pub edfa_span_km: f64,
    pub regen_reach_km: f64,
    pub wavelengths_per_fiber: u32,
    pub wavelength_rate_gbps: f64,
    /// Power usage effectiveness multiplier.
    pub pue: f64,
}

impl Default for PowerParams {
    fn default() -> Self {
        PowerParams {
            router_port_w: 638.0,
            transponder_w: 129.0,
            edfa_w: 11.0,
            optical_switch_w: 85.0,
            regenerator_w: 114.0,
            edfa_span_km: 80.0,
            regen_reach_km: 2000.0,
            wavelengths_per_fiber: 32,
            wavelength_rate_gbps: 40.0,
            pue: 1.5,
        }
    }
}

impl PowerParams {
    pub fn validate(&self) -> Result<()> {
        let values = [
            ("router port power", self.router_port_w),
            ("transponder power", self.transponder_w),
            ("EDFA power", self.edfa_w),
            ("optical switch power", self.optical_switch_w),
            ("regenerator power", self.regenerator_w),
            ("EDFA span", self.edfa_span_km),
            ("regenerator reach", self.regen_reach_km),
            ("wavelength rate", self.wavelength_rate_gbps),
            ("PUE", self.pue),
        ];
        for (what, v) in values {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Param(format!("{what} must be > 0, got {v}")));
            }
        }
        if self.wavelengths_per_fiber == 0 {
            return Err(Error::Param("wavelengths per fiber must be > 0".into()));
        }
        Ok(())
    }
}

/// Where content is served from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Delivery {
    /// Only the cloud datacenters; every node's demand crosses the core.
    #[default]
    Cloud,
    /// Cloud datacenters plus fog sites next to the most populous nodes.
    CloudFog,
    /// Every node has a local fog site.
    Fog,
}

impl Delivery {
    pub const ALL: [Delivery; 3] = [Delivery::Cloud, Delivery::CloudFog, Delivery::Fog];

    /// Per-node flag, indexed by `id - 1`: true when the node is fog-served.
    ///
    /// Cloud-fog uses the topology's `has_fog` flags, falling back to the
    /// [`DEFAULT_FOG_SITES`] most populous nodes when none are flagged.
    pub fn fog_mask(self, topology: &Topology) -> Vec<bool> {
        let count = topology.node_count();
        match self {
            Delivery::Cloud => vec![false; count],
            Delivery::Fog => vec![true; count],
            Delivery::CloudFog => {
                let flagged: Vec<bool> = topology.nodes().iter().map(|n| n.has_fog).collect();
                if flagged.iter().any(|&f| f) {
                    flagged
                } else {
                    let mut mask = vec![false; count];
                    for id in topology.most_populous(DEFAULT_FOG_SITES) {
                        mask[id - 1] = true;
                    }
                    mask
                }
            }
        }
    }
}

impl fmt::Display for Delivery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Delivery::Cloud => "cloud",
            Delivery::CloudFog => "cloud-fog",
            Delivery::Fog => "fog",
        })
    }
}

impl FromStr for Delivery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cloud" => Ok(Delivery::Cloud),
            "cloud-fog" => Ok(Delivery::CloudFog),
            "fog" => Ok(Delivery::Fog),
            other => Err(Error::Param(format!(
                "unknown delivery {other:?} (expected cloud, cloud-fog or fog)"
            ))),
        }
    }
}

/// Users per node (indexed by `id - 1`) and class (A, B, C).
pub type UserMatrix = Vec<[f64; 3]>;

/// Net-neutrality subscribers: `total_users * initial_share * population_share`.
pub fn initial_users(
    topology: &Topology,
    classes: &ServiceClasses,
    econ: &EconomicParams,
) -> UserMatrix {
    topology
        .nodes()
        .iter()
        .map(|node| {
            classes
                .0
                .map(|c| econ.total_users * c.initial_share * node.population_share)
        })
        .collect()
}

/// Column sums of a user matrix.
pub fn class_totals(users: &[[f64; 3]]) -> [f64; 3] {
    users.iter().fold([0.0; 3], |mut acc, row| {
        for (a, v) in acc.iter_mut().zip(row) {
            *a += v;
        }
        acc
    })
}
