//! Best-of-N selection shared by every scheme sampler.

use crate::error::{Error, Result};
use crate::model::{compute_flows, AllocationScheme, FeasibilityReport, Instance, OptionTable};
use crate::rng::Stream;

/// A source of hard allocation schemes for one instance.
pub trait SchemeSampler {
    fn sample(&self, rng: &mut Stream) -> AllocationScheme;
}

/// Outcome of drawing `n_samples` schemes and keeping the cheapest feasible one.
#[derive(Debug, Clone, PartialEq)]
pub struct BestOf {
    /// Cheapest feasible scheme and its cost; ties keep the earliest sample.
    pub best: Option<(AllocationScheme, f64)>,
    pub n_samples: usize,
    pub n_feasible: usize,
    /// Cost of every feasible sample, in draw order.
    pub feasible_costs: Vec<f64>,
}

impl BestOf {
    pub fn best_cost(&self) -> Option<f64> {
        self.best.as_ref().map(|(_, c)| *c)
    }
}

/// Cost and feasibility of one hard scheme.
pub fn evaluate_scheme(
    instance: &Instance,
    table: &OptionTable,
    scheme: &AllocationScheme,
) -> Result<(f64, FeasibilityReport)> {
    let flows = compute_flows(instance, table, scheme)?;
    Ok((flows.cost_total, FeasibilityReport::from_flows(instance, &flows)))
}

/// Draws `n_samples` schemes, filters by feasibility and keeps the cheapest.
pub fn best_of<S: SchemeSampler + ?Sized>(
    sampler: &S,
    instance: &Instance,
    table: &OptionTable,
    n_samples: usize,
    rng: &mut Stream,
) -> Result<BestOf> {
    if n_samples == 0 {
        return Err(Error::InvalidConfig("best-of needs at least one sample".into()));
    }
    let mut out = BestOf { best: None, n_samples, n_feasible: 0, feasible_costs: Vec::new() };
    for _ in 0..n_samples {
        let scheme = sampler.sample(rng);
        let (cost, report) = evaluate_scheme(instance, table, &scheme)?;
        if !report.feasible {
            continue;
        }
        out.n_feasible += 1;
        out.feasible_costs.push(cost);
        if out.best.as_ref().is_none_or(|(_, c)| cost < *c) {
            out.best = Some((scheme, cost));
        }
    }
    Ok(out)
}
