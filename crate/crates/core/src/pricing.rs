//! Profit-maximizing selection of one candidate price per class.
//!
//! The search enumerates every price triple with `P_A >= P_B >= P_C`.
//! Class A takes exactly its elasticity-induced subscribers. Users leaving A
//! form an extra pool for B, and users leaving B an extra pool for C. The
//! share of each pool a class keeps is uniform across nodes, so every node
//! keeps the same class mix. For a fixed triple, profit is linear in the
//! B and C subscriber counts, and the feasible set is a small polygon in
//! that plane. Its vertices are enumerated in closed form, which makes the
//! search exact.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::demand::SolutionTable;
use crate::error::{Error, Result};
use crate::params::{class_totals, ClassId, Delivery, EconomicParams, ServiceClasses, UserMatrix};
use crate::topology::Topology;

/// How users leaving a class are offered to the class below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CascadeMode {
    /// Only users who actually left the class above join the pool below.
    #[default]
    Strict,
    /// Every net-neutrality subscriber of the class above may join the class
    /// below, whether or not they left.
    Verbatim,
}

impl fmt::Display for CascadeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CascadeMode::Strict => "strict",
            CascadeMode::Verbatim => "verbatim",
        })
    }
}

impl FromStr for CascadeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(CascadeMode::Strict),
            "verbatim" => Ok(CascadeMode::Verbatim),
            other => Err(Error::Param(format!(
                "unknown cascade mode {other:?} (expected strict or verbatim)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricingOutcome {
    pub delivery: Delivery,
    pub cascade: CascadeMode,
    /// Selected solution index per class.
    pub selected: [usize; 3],
    pub prices: [f64; 3],
    /// Subscribers per node (`id - 1`) and class.
    pub users: UserMatrix,
    pub class_revenue: [f64; 3],
    pub revenue: f64,
    pub cost: f64,
    pub profit: f64,
    /// Users per node that moved from A into B.
    pub downgraded_a_to_b: Vec<f64>,
    /// Users per node that moved from B into C.
    pub downgraded_b_to_c: Vec<f64>,
}

impl PricingOutcome {
    pub fn class_totals(&self) -> [f64; 3] {
        class_totals(&self.users)
    }

    pub fn total_users(&self) -> f64 {
        self.class_totals().iter().sum()
    }
}

/// Monthly revenue of one class: users times rate times price.
pub fn class_revenue(users_per_node: &[f64], rate_gbps: f64, price: f64) -> f64 {
    users_per_node.iter().sum::<f64>() * rate_gbps * price
}

/// Monthly provisioning cost. Metro/access cost applies to all traffic; core
/// cost only to traffic of nodes without a fog site.
pub fn delivery_cost(
    users: &[[f64; 3]],
    classes: &ServiceClasses,
    topology: &Topology,
    econ: &EconomicParams,
    delivery: Delivery,
) -> f64 {
    let rates = classes.rates();
    let fog = delivery.fog_mask(topology);
    let mut core = 0.0;
    let mut all = 0.0;
    for (row, fogged) in users.iter().zip(&fog) {
        let traffic: f64 = row.iter().zip(&rates).map(|(u, r)| u * r).sum();
        all += traffic;
        if !fogged {
            core += traffic;
        }
    }
    econ.core_cost_per_gbps * core + econ.metro_access_cost_per_gbps * all
}

/// Absolute tolerance used when comparing profits and user totals.
pub(crate) fn tolerance(scale: f64) -> f64 {
    1e-9 * (1.0 + scale.abs())
}

/// Aggregated class data for one candidate price.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    price: f64,
    users: f64,
    /// Profit per subscriber: rate times (price - unit cost).
    margin: f64,
}

/// The B/C subproblem of one price triple, in aggregate subscriber counts.
///
/// B takes `y` in `[0, pool_b]`; C takes `z` in `[0, cap(y)]` where
/// `cap(y) = c_base + max(0, k_free - y)`; and `a_users + y + z` must reach
/// `min_users`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Subproblem {
    pub a_users: f64,
    pub pool_b: f64,
    pub c_base: f64,
    pub k_free: f64,
    pub min_users: f64,
}

impl Subproblem {
    pub fn new(cascade: CascadeMode, initial: [f64; 3], yn: [f64; 3], min_users: f64) -> Self {
        match cascade {
            CascadeMode::Strict => {
                let left_a = (initial[0] - yn[0]).max(0.0);
                Subproblem {
                    a_users: yn[0],
                    pool_b: yn[1] + left_a,
                    c_base: yn[2],
                    k_free: initial[1] + left_a,
                    min_users,
                }
            }
            CascadeMode::Verbatim => Subproblem {
                a_users: yn[0],
                pool_b: yn[1] + initial[0],
                c_base: yn[2] + initial[1],
                k_free: 0.0,
                min_users,
            },
        }
    }

    pub fn cap(&self, y: f64) -> f64 {
        self.c_base + (self.k_free - y).max(0.0)
    }

    /// Most users any (y, z) can reach.
    pub fn max_users(&self) -> f64 {
        self.a_users + self.c_base + self.k_free.max(self.pool_b)
    }

    /// Best `(y, z, margin_b * y + margin_c * z)`; ties go to more users,
    /// then to keeping more of them in B.
    /// `None` when the user floor is out of reach.
    pub fn solve(&self, margin_b: f64, margin_c: f64) -> Option<(f64, f64, f64)> {
        let need = self.min_users - self.a_users;
        let slack = tolerance(self.min_users);

        let mut ys = [0.0; 5];
        let mut ny = 0;
        let mut push_y = |y: f64| {
            if (0.0..=self.pool_b).contains(&y) {
                ys[ny] = y;
                ny += 1;
            }
        };
        push_y(0.0);
        push_y(self.pool_b);
        if self.k_free > 0.0 && self.k_free < self.pool_b {
            push_y(self.k_free);
        }
        if need > 0.0 {
            push_y(need);
            if need - self.c_base >= self.k_free {
                push_y(need - self.c_base);
            }
        }

        let mut best: Option<(f64, f64, f64)> = None;
        for &y in &ys[..ny] {
            let cap = self.cap(y);
            let mut zs = [0.0, cap, 0.0];
            let mut nz = 2;
            if need > 0.0 {
                let z = need - y;
                if z > 0.0 && z < cap {
                    zs[2] = z;
                    nz = 3;
                }
            }
            for &z in &zs[..nz] {
                if y + z < need - slack {
                    continue;
                }
                let value = margin_b * y + margin_c * z;
                let better = match best {
                    None => true,
                    Some((by, bz, bv)) => {
                        let tol = tolerance(bv);
                        let (users, busers) = (y + z, by + bz);
                        let utol = tolerance(busers);
                        value > bv + tol
                            || (value >= bv - tol
                                && (users > busers + utol || (users >= busers - utol && y > by)))
                    }
                };
                if better {
                    best = Some((y, z, value));
                }
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy)]
struct Best {
    selected: [usize; 3],
    y: f64,
    z: f64,
    profit: f64,
}

impl Best {
    /// Candidates arrive in ascending price order, so only strictly more
    /// profit displaces the incumbent; within one triple the subproblem
    /// already prefers more users.
    fn beats(&self, incumbent: &Best) -> bool {
        self.profit > incumbent.profit + tolerance(incumbent.profit)
    }
}

/// Cost per Gbps of delivered traffic when every node keeps the same class
/// mix: metro/access plus core cost weighted by the non-fog population.
fn unit_cost(topology: &Topology, econ: &EconomicParams, delivery: Delivery) -> f64 {
    let fog = delivery.fog_mask(topology);
    let total: f64 = topology.nodes().iter().map(|n| n.population_share).sum();
    let core: f64 = topology
        .nodes()
        .iter()
        .zip(&fog)
        .filter(|(_, f)| !**f)
        .map(|(n, _)| n.population_share)
        .sum();
    let core_fraction = if total > 0.0 { core / total } else { 0.0 };
    econ.metro_access_cost_per_gbps + econ.core_cost_per_gbps * core_fraction
}

fn check_table(table: &SolutionTable, topology: &Topology) -> Result<()> {
    let nodes = topology.node_count();
    if table.initial.len() != nodes {
        return Err(Error::Param(format!(
            "solution table covers {} nodes, topology has {nodes}",
            table.initial.len()
        )));
    }
    for class in ClassId::ALL {
        if table.solutions(class).is_empty() {
            return Err(Error::Grid(format!("class {class} has no solutions")));
        }
    }
    Ok(())
}

/// Exact profit maximizer over the solution table.
pub fn optimize_pricing(
    table: &SolutionTable,
    topology: &Topology,
    econ: &EconomicParams,
    delivery: Delivery,
    cascade: CascadeMode,
) -> Result<PricingOutcome> {
    econ.validate()?;
    check_table(table, topology)?;
    let classes = &table.classes;
    let rates = classes.rates();
    let cost = unit_cost(topology, econ, delivery);
    let initial = class_totals(&table.initial);
    let min_users = econ.min_users();

    let candidates: [Vec<Candidate>; 3] = ClassId::ALL.map(|class| {
        let rate = rates[class.index()];
        table
            .solutions(class)
            .iter()
            .map(|s| Candidate {
                price: s.price,
                users: s.total_users(),
                margin: rate * (s.price - cost),
            })
            .collect()
    });
    let [cand_a, cand_b, cand_c] = &candidates;

    let per_a: Vec<(Option<Best>, f64)> = (0..cand_a.len())
        .into_par_iter()
        .map(|ia| {
            let a = cand_a[ia];
            let mut best: Option<Best> = None;
            let mut reachable = 0.0f64;
            let nb = cand_b.partition_point(|b| b.price <= a.price);
            for (ib, b) in cand_b[..nb].iter().enumerate() {
                let nc = cand_c.partition_point(|c| c.price <= b.price);
                for (ic, c) in cand_c[..nc].iter().enumerate() {
                    let sub =
                        Subproblem::new(cascade, initial, [a.users, b.users, c.users], min_users);
                    reachable = reachable.max(sub.max_users());
                    let Some((y, z, value)) = sub.solve(b.margin, c.margin) else {
                        continue;
                    };
                    let cand = Best {
                        selected: [ia, ib, ic],
                        y,
                        z,
                        profit: a.margin * a.users + value,
                    };
                    if best.as_ref().is_none_or(|inc| cand.beats(inc)) {
                        best = Some(cand);
                    }
                }
            }
            (best, reachable)
        })
        .collect();

    let mut best: Option<Best> = None;
    let mut reachable = 0.0f64;
    for (cand, reach) in per_a {
        reachable = reachable.max(reach);
        if let Some(cand) = cand {
            if best.as_ref().is_none_or(|inc| cand.beats(inc)) {
                best = Some(cand);
            }
        }
    }
    let best = best.ok_or(Error::Infeasible {
        needed: min_users,
        reachable,
    })?;
    Ok(realize(table, topology, econ, delivery, cascade, best))
}

/// Expands an aggregate choice into per-node subscribers and accounts.
fn realize(
    table: &SolutionTable,
    topology: &Topology,
    econ: &EconomicParams,
    delivery: Delivery,
    cascade: CascadeMode,
    best: Best,
) -> PricingOutcome {
    let [sa, sb, sc] = best.selected;
    let sol_a = &table.solutions(ClassId::A)[sa];
    let sol_b = &table.solutions(ClassId::B)[sb];
    let sol_c = &table.solutions(ClassId::C)[sc];
    let sub = Subproblem::new(
        cascade,
        class_totals(&table.initial),
        [
            sol_a.total_users(),
            sol_b.total_users(),
            sol_c.total_users(),
        ],
        econ.min_users(),
    );
    let share_b = fraction(best.y, sub.pool_b);
    let share_c = fraction(best.z, sub.cap(best.y));

    let nodes = topology.node_count();
    let mut users = Vec::with_capacity(nodes);
    let mut a_to_b = Vec::with_capacity(nodes);
    let mut b_to_c = Vec::with_capacity(nodes);
    for d in 0..nodes {
        let [na, nb, _] = table.initial[d];
        let (ya, yb, yc) = (
            sol_a.users_per_node[d],
            sol_b.users_per_node[d],
            sol_c.users_per_node[d],
        );
        let (extra_b, ub, extra_c) = match cascade {
            CascadeMode::Strict => {
                let left_a = (na - ya).max(0.0);
                let ub = share_b * (yb + left_a);
                let left_b = (nb + left_a - ub).max(0.0);
                (left_a, ub, left_b)
            }
            CascadeMode::Verbatim => (na, share_b * (yb + na), nb),
        };
        let uc = share_c * (yc + extra_c);
        users.push([ya, ub, uc]);
        a_to_b.push(share_b * extra_b);
        b_to_c.push(share_c * extra_c);
    }

    let prices = [sol_a.price, sol_b.price, sol_c.price];
    let classes = &table.classes;
    let class_rev: [f64; 3] = ClassId::ALL.map(|class| {
        let i = class.index();
        let column: Vec<f64> = users.iter().map(|row| row[i]).collect();
        class_revenue(&column, classes.get(class).download_rate_gbps, prices[i])
    });
    let revenue: f64 = class_rev.iter().sum();
    let cost = delivery_cost(&users, classes, topology, econ, delivery);
    PricingOutcome {
        delivery,
        cascade,
        selected: best.selected,
        prices,
        users,
        class_revenue: class_rev,
        revenue,
        cost,
        profit: revenue - cost,
        downgraded_a_to_b: a_to_b,
        downgraded_b_to_c: b_to_c,
    }
}

fn fraction(part: f64, whole: f64) -> f64 {
    if whole > 0.0 {
        (part / whole).clamp(0.0, 1.0)
    } else {
        0.0
    }
}
