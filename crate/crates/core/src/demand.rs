//! Price elasticity of demand and the lookup table of candidate prices.
//!
//! Every candidate price of a class induces one retention fraction,
//! `max(0, 1 - E * (price - base) / base)`, applied uniformly to the
//! net-neutrality subscribers of every node. Demand falls when the price
//! rises and grows without cap when it falls.

use std::io::Write;

use crate::error::{Error, Result};
use crate::params::{initial_users, ClassId, EconomicParams, ServiceClasses, UserMatrix};
use crate::topology::Topology;

/// Subscribers left after moving from `base_price` to `price`.
pub fn demand_response(
    price: f64,
    base_price: f64,
    elasticity: f64,
    base_users: f64,
) -> Result<f64> {
    if !(base_price > 0.0) {
        return Err(Error::Param(format!(
            "base price must be > 0, got {base_price}"
        )));
    }
    Ok(base_users * retention(price, base_price, elasticity))
}

fn retention(price: f64, base_price: f64, elasticity: f64) -> f64 {
    (1.0 - elasticity * (price - base_price) / base_price).max(0.0)
}

/// Candidate prices for a class. Range bounds are multiples of the base price.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Range {
        lower: f64,
        step: f64,
        /// `None` stops at the first grid price with zero demand,
        /// `1 + 1/E`, capped at `cap`.
        upper: Option<f64>,
        cap: f64,
    },
    /// Absolute prices.
    Explicit(Vec<f64>),
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Range {
            lower: 0.5,
            step: 0.01,
            upper: None,
            cap: 10.0,
        }
    }
}

impl GridSpec {
    /// Only the net-neutrality price.
    pub fn anchor_only() -> Self {
        GridSpec::Explicit(Vec::new())
    }

    /// Sorted, de-duplicated prices for one class; always contains
    /// `base_price` exactly.
    pub fn prices(&self, base_price: f64, elasticity: f64) -> Result<Vec<f64>> {
        let snap = base_price * 1e-9;
        let mut prices = match self {
            GridSpec::Explicit(list) => {
                if let Some(bad) = list.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
                    return Err(Error::Grid(format!("price {bad} is not positive")));
                }
                list.clone()
            }
            &GridSpec::Range {
                lower,
                step,
                upper,
                cap,
            } => {
                let upper = upper.unwrap_or_else(|| {
                    if elasticity > 0.0 {
                        (1.0 + 1.0 / elasticity).min(cap)
                    } else {
                        cap
                    }
                });
                if !(lower > 0.0 && step > 0.0 && lower.is_finite() && step.is_finite()) {
                    return Err(Error::Grid(format!(
                        "lower bound and step must be > 0 (lower {lower}, step {step})"
                    )));
                }
                if !(upper.is_finite() && upper >= lower) {
                    return Err(Error::Grid(format!(
                        "upper bound {upper} below lower bound {lower}"
                    )));
                }
                let steps = ((upper - lower) / step - 1e-9).ceil().max(0.0) as usize;
                (0..=steps)
                    .map(|k| base_price * (lower + k as f64 * step))
                    .collect()
            }
        };
        for p in &mut prices {
            if (*p - base_price).abs() <= snap {
                *p = base_price;
            }
        }
        if !prices.contains(&base_price) {
            prices.push(base_price);
        }
        prices.sort_by(f64::total_cmp);
        prices.dedup_by(|a, b| (*a - *b).abs() <= snap);
        Ok(prices)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceSolution {
    pub class_id: ClassId,
    pub index: usize,
    /// US$ per Gbps per month.
    pub price: f64,
    /// Fraction of net-neutrality subscribers kept (or gained) at this price.
    pub retention: f64,
    /// Subscribers per node, indexed by `id - 1`.
    pub users_per_node: Vec<f64>,
}

impl PriceSolution {
    pub fn total_users(&self) -> f64 {
        self.users_per_node.iter().sum()
    }
}

/// Candidate solutions per class, ordered by strictly increasing price.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTable {
    pub(crate) solutions: [Vec<PriceSolution>; 3],
    pub(crate) anchors: [usize; 3],
    pub grid: GridSpec,
    pub base_price: f64,
    pub classes: ServiceClasses,
    /// Net-neutrality subscribers the table was derived from.
    pub initial: UserMatrix,
}

impl SolutionTable {
    pub fn solutions(&self, class: ClassId) -> &[PriceSolution] {
        &self.solutions[class.index()]
    }

    /// Index of the net-neutrality solution for a class.
    pub fn anchor(&self, class: ClassId) -> usize {
        self.anchors[class.index()]
    }

    pub fn len(&self, class: ClassId) -> usize {
        self.solutions[class.index()].len()
    }

    /// Writes `class,solution_index,price,retention_fraction,total_users`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "class",
            "solution_index",
            "price",
            "retention_fraction",
            "total_users",
        ])?;
        for class in ClassId::ALL {
            for s in self.solutions(class) {
                w.write_record([
                    class.to_string(),
                    s.index.to_string(),
                    s.price.to_string(),
                    s.retention.to_string(),
                    s.total_users().to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

pub fn build_solution_table(
    classes: &ServiceClasses,
    econ: &EconomicParams,
    topology: &Topology,
    grid: &GridSpec,
) -> Result<SolutionTable> {
    classes.validate()?;
    econ.validate()?;
    let base = econ.base_price_per_gbps;
    let initial = initial_users(topology, classes, econ);

    let mut tables: [Vec<PriceSolution>; 3] = Default::default();
    let mut anchors = [0; 3];
    for spec in classes.iter() {
        let ci = spec.class_id.index();
        let prices = grid.prices(base, spec.elasticity)?;
        anchors[ci] = prices
            .iter()
            .position(|&p| p == base)
            .expect("grid always holds the base price");
        tables[ci] = prices
            .into_iter()
            .enumerate()
            .map(|(index, price)| {
                let keep = retention(price, base, spec.elasticity);
                PriceSolution {
                    class_id: spec.class_id,
                    index,
                    price,
                    retention: keep,
                    users_per_node: initial.iter().map(|row| row[ci] * keep).collect(),
                }
            })
            .collect();
    }
    Ok(SolutionTable {
        solutions: tables,
        anchors,
        grid: grid.clone(),
        base_price: base,
        classes: *classes,
        initial,
    })
}
