//! Exhaustive reference search for small pricing instances.
//!
//! Walks every price triple and every pair of pool fractions on a 1/100 grid,
//! rebuilding per-node subscribers and profit from scratch. It shares no code
//! with the optimizer beyond the solution table.

use crate::demand::SolutionTable;
use crate::error::{Error, Result};
use crate::params::{ClassId, Delivery, EconomicParams};
use crate::pricing::{delivery_cost, CascadeMode, PricingOutcome};
use crate::topology::Topology;

pub const MAX_NODES: usize = 4;
pub const MAX_GRID: usize = 12;
/// Pool fractions are searched in steps of `1 / FRACTION_STEPS`.
pub const FRACTION_STEPS: usize = 100;

/// Per-node `[A, B, C, A->B, B->C]` for one triple and pair of pool fractions.
fn node_users(
    table: &SolutionTable,
    cascade: CascadeMode,
    picks: [usize; 3],
    d: usize,
    share_b: f64,
    share_c: f64,
) -> [f64; 5] {
    let yn = ClassId::ALL.map(|c| table.solutions(c)[picks[c.index()]].users_per_node[d]);
    let n = table.initial[d];
    let ua = yn[0];
    match cascade {
        CascadeMode::Strict => {
            let leaving_a = if n[0] > ua { n[0] - ua } else { 0.0 };
            let ub = share_b * (yn[1] + leaving_a);
            // Everyone who was in B, or was pushed into B, and is not there now.
            let leaving_b = if n[1] + leaving_a > ub {
                n[1] + leaving_a - ub
            } else {
                0.0
            };
            let uc = share_c * (yn[2] + leaving_b);
            [ua, ub, uc, share_b * leaving_a, share_c * leaving_b]
        }
        CascadeMode::Verbatim => {
            let ub = share_b * (yn[1] + n[0]);
            let uc = share_c * (yn[2] + n[1]);
            [ua, ub, uc, share_b * n[0], share_c * n[1]]
        }
    }
}

/// Brute-force maximizer with the optimizer's tie-break: highest profit,
/// then lowest price vector, then most users.
pub fn brute_force_oracle(
    table: &SolutionTable,
    topology: &Topology,
    econ: &EconomicParams,
    delivery: Delivery,
    cascade: CascadeMode,
) -> Result<PricingOutcome> {
    if topology.node_count() > MAX_NODES {
        return Err(Error::TooLarge(format!(
            "{} nodes (limit {MAX_NODES})",
            topology.node_count()
        )));
    }
    for class in ClassId::ALL {
        if table.len(class) > MAX_GRID {
            return Err(Error::TooLarge(format!(
                "class {class} has {} prices (limit {MAX_GRID})",
                table.len(class)
            )));
        }
    }

    let classes = &table.classes;
    let rates = classes.rates();
    let fog = delivery.fog_mask(topology);
    let unit: Vec<f64> = fog
        .iter()
        .map(|f| econ.metro_access_cost_per_gbps + if *f { 0.0 } else { econ.core_cost_per_gbps })
        .collect();
    let nodes = topology.node_count();
    let floor = econ.total_users * econ.min_user_fraction;
    let floor_slack = 1e-9 * (1.0 + floor);
    let sols = ClassId::ALL.map(|c| table.solutions(c));

    // (profit, picks, share_b, share_c, users)
    let mut best: Option<(f64, [usize; 3], f64, f64, f64)> = None;
    for (ia, a) in sols[0].iter().enumerate() {
        for (ib, b) in sols[1].iter().enumerate() {
            if b.price > a.price {
                continue;
            }
            for (ic, c) in sols[2].iter().enumerate() {
                if c.price > b.price {
                    continue;
                }
                let prices = [a.price, b.price, c.price];
                let picks = [ia, ib, ic];
                for kb in 0..=FRACTION_STEPS {
                    let share_b = kb as f64 / FRACTION_STEPS as f64;
                    for kc in 0..=FRACTION_STEPS {
                        let share_c = kc as f64 / FRACTION_STEPS as f64;
                        let mut total = 0.0;
                        let mut profit = 0.0;
                        for d in 0..nodes {
                            let u = node_users(table, cascade, picks, d, share_b, share_c);
                            for i in 0..3 {
                                total += u[i];
                                profit += u[i] * rates[i] * (prices[i] - unit[d]);
                            }
                        }
                        if total < floor - floor_slack {
                            continue;
                        }
                        let take = match best {
                            None => true,
                            Some((bp, bpicks, _, _, busers)) => {
                                let tol = 1e-9 * (1.0 + bp.abs());
                                profit > bp + tol
                                    || (profit >= bp - tol
                                        && picks == bpicks
                                        && total > busers + 1e-9 * (1.0 + busers))
                            }
                        };
                        if take {
                            best = Some((profit, picks, share_b, share_c, total));
                        }
                    }
                }
            }
        }
    }

    let Some((_, picks, share_b, share_c, _)) = best else {
        return Err(Error::Infeasible {
            needed: floor,
            reachable: f64::NAN,
        });
    };
    let rows: Vec<[f64; 5]> = (0..nodes)
        .map(|d| node_users(table, cascade, picks, d, share_b, share_c))
        .collect();
    let users: Vec<[f64; 3]> = rows.iter().map(|r| [r[0], r[1], r[2]]).collect();
    let prices = ClassId::ALL.map(|c| table.solutions(c)[picks[c.index()]].price);
    let mut revenue = [0.0; 3];
    for row in &users {
        for i in 0..3 {
            revenue[i] += row[i] * rates[i] * prices[i];
        }
    }
    let revenue_sum = revenue.iter().sum::<f64>();
    let cost = delivery_cost(&users, classes, topology, econ, delivery);
    Ok(PricingOutcome {
        delivery,
        cascade,
        selected: picks,
        prices,
        users,
        class_revenue: revenue,
        revenue: revenue_sum,
        cost,
        profit: revenue_sum - cost,
        downgraded_a_to_b: rows.iter().map(|r| r[3]).collect(),
        downgraded_b_to_c: rows.iter().map(|r| r[4]).collect(),
    })
}

/// Largest profit the 1/100 fraction grid can lose against the exact
/// optimum at `outcome`'s price triple.
///
/// Rounding both pool fractions up by at most one step keeps the user floor
/// satisfied; each step moves B by at most `pool_b / 100` and C by at most
/// `(pool_b + max C pool) / 100`.
pub fn discretization_gap(
    table: &SolutionTable,
    topology: &Topology,
    econ: &EconomicParams,
    delivery: Delivery,
    cascade: CascadeMode,
    outcome: &PricingOutcome,
) -> f64 {
    let fog = delivery.fog_mask(topology);
    let picks = outcome.selected;
    let step = 1.0 / FRACTION_STEPS as f64;
    let mut gap = 0.0;
    for (d, fogged) in fog.iter().enumerate() {
        let unit = econ.metro_access_cost_per_gbps
            + if *fogged {
                0.0
            } else {
                econ.core_cost_per_gbps
            };
        let margin = |class: ClassId| {
            let i = class.index();
            (table.classes.0[i].download_rate_gbps * (outcome.prices[i] - unit)).abs()
        };
        let yn = ClassId::ALL.map(|c| table.solutions(c)[picks[c.index()]].users_per_node[d]);
        let n = table.initial[d];
        let (pool_b, pool_c_max) = match cascade {
            CascadeMode::Strict => {
                let leaving_a = (n[0] - yn[0]).max(0.0);
                (yn[1] + leaving_a, yn[2] + n[1] + leaving_a)
            }
            CascadeMode::Verbatim => (yn[1] + n[0], yn[2] + n[1]),
        };
        gap += step
            * (pool_b * (margin(ClassId::B) + margin(ClassId::C))
                + pool_c_max * margin(ClassId::C));
    }
    gap
}
