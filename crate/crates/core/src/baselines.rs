//! Baselines: the uniform random sampler and an exhaustive oracle.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{compute_flows, AllocationScheme, FeasibilityReport, Instance, OptionTable};
use crate::rng::Stream;
use crate::sampling::SchemeSampler;

/// Draws every demand's option uniformly from its valid options.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSampler {
    n_slots: usize,
    n_users: usize,
    n_types: usize,
    n_valid: Vec<u16>,
}

impl UniformSampler {
    pub fn new(instance: &Instance, table: &OptionTable) -> Self {
        let topo = &instance.topology;
        let mut n_valid = Vec::with_capacity(instance.n_rows());
        for _t in 0..topo.n_slots {
            for n in 0..topo.n_users {
                for k in 0..topo.n_types {
                    n_valid.push(table.n_valid(k, n) as u16);
                }
            }
        }
        UniformSampler { n_slots: topo.n_slots, n_users: topo.n_users, n_types: topo.n_types, n_valid }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> AllocationScheme {
        let option = self.n_valid.iter().map(|&s| rng.random_range(0..s)).collect();
        AllocationScheme { n_slots: self.n_slots, n_users: self.n_users, n_types: self.n_types, option }
    }
}

impl SchemeSampler for UniformSampler {
    fn sample(&self, rng: &mut Stream) -> AllocationScheme {
        self.draw(rng)
    }
}

/// One uniform random scheme.
pub fn rsn_sample<R: Rng + ?Sized>(instance: &Instance, table: &OptionTable, rng: &mut R) -> AllocationScheme {
    UniformSampler::new(instance, table).draw(rng)
}

/// Largest joint enumeration the oracle agrees to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteForceBudget {
    pub max_combinations: u128,
}

impl Default for BruteForceBudget {
    fn default() -> Self {
        BruteForceBudget { max_combinations: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    /// A feasible global minimizer (first in enumeration order), if any.
    pub best: Option<(AllocationScheme, f64)>,
    /// Size of the joint search space.
    pub n_combinations: u128,
    /// Complete assignments that were fully evaluated.
    pub n_evaluated: u64,
}

impl BruteForceResult {
    pub fn best_cost(&self) -> Option<f64> {
        self.best.as_ref().map(|(_, c)| *c)
    }
}

/// Product of valid option counts over all demands (saturating).
pub fn combination_count(instance: &Instance, table: &OptionTable) -> u128 {
    let topo = &instance.topology;
    let per_slot = (0..topo.n_users)
        .flat_map(|n| (0..topo.n_types).map(move |k| (k, n)))
        .fold(1u128, |acc, (k, n)| acc.saturating_mul(table.n_valid(k, n) as u128));
    (0..topo.n_slots).fold(1u128, |acc, _| acc.saturating_mul(per_slot))
}

/// True when slot `t`'s edge and ISP flows respect the physical capacities.
fn slot_within_physical_caps(
    instance: &Instance,
    table: &OptionTable,
    option: &[u16],
    t: usize,
    buf: &mut [f64],
) -> bool {
    let topo = &instance.topology;
    let (nu, nk, el) = (topo.n_users, topo.n_types, topo.n_links);
    let d = &instance.demands;
    // buf: [edge_in (N*EL) | edge_out (N*EL)]
    buf.fill(0.0);
    let (edge_in, edge_out) = buf.split_at_mut(nu * el);
    for n in 0..nu {
        for k in 0..nk {
            let row = (t * nu + n) * nk + k;
            let w = table.weights(k, n, option[row] as usize);
            for i in 0..el {
                edge_in[n * el + i] += d.inbound[row] * w[i];
                edge_out[n * el + i] += d.outbound[row] * w[i];
            }
        }
    }
    for (i, isp) in topo.isp_links.iter().enumerate() {
        let (mut xin, mut xout) = (0.0, 0.0);
        for n in 0..nu {
            let cap = topo.edge(n, i).cap_phys;
            let (fin, fout) = (edge_in[n * el + i], edge_out[n * el + i]);
            if fin > cap || fout > cap {
                return false;
            }
            xin += fin;
            xout += fout;
        }
        if xin > isp.cap_phys || xout > isp.cap_phys {
            return false;
        }
    }
    true
}

/// Exhaustive joint search for the cheapest feasible scheme.
///
/// The percentile couples all slots, so the search is joint over every
/// (t, n, k). Physical capacities are separable per slot, so a partial
/// assignment whose completed slot already breaks one is pruned; billable
/// caps and cost are evaluated on complete assignments only.
pub fn brute_force(instance: &Instance, budget: BruteForceBudget) -> Result<BruteForceResult> {
    instance.validate()?;
    let table = OptionTable::build(&instance.topology)?;
    let n_combinations = combination_count(instance, &table);
    if n_combinations > budget.max_combinations {
        return Err(Error::BudgetExceeded { required: n_combinations, budget: budget.max_combinations });
    }
    let topo = &instance.topology;
    let per_slot = topo.n_users * topo.n_types;
    let rows = instance.n_rows();
    let n_valid: Vec<u16> = UniformSampler::new(instance, &table).n_valid;
    let mut option = vec![0u16; rows];
    let mut buf = vec![0.0; 2 * topo.n_users * topo.n_links];
    let mut best: Option<(AllocationScheme, f64)> = None;
    let mut n_evaluated = 0u64;
    let mut scheme = AllocationScheme::uniform_option(topo.n_slots, topo.n_users, topo.n_types, 0);
    let mut r = 0usize;
    'search: loop {
        let slot_done = (r + 1).is_multiple_of(per_slot);
        let ok = !slot_done || slot_within_physical_caps(instance, &table, &option, r / per_slot, &mut buf);
        if ok {
            if r + 1 == rows {
                n_evaluated += 1;
                scheme.option.copy_from_slice(&option);
                let flows = compute_flows(instance, &table, &scheme)?;
                if FeasibilityReport::from_flows(instance, &flows).feasible
                    && best.as_ref().is_none_or(|(_, c)| flows.cost_total < *c)
                {
                    best = Some((scheme.clone(), flows.cost_total));
                }
            } else {
                r += 1;
                option[r] = 0;
                continue;
            }
        }
        loop {
            option[r] += 1;
            if option[r] < n_valid[r] {
                break;
            }
            if r == 0 {
                break 'search;
            }
            r -= 1;
        }
    }
    Ok(BruteForceResult { best, n_combinations, n_evaluated })
}
