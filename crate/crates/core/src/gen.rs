//! Reproducible synthetic problem families.
//!
//! A family shares one set of static parameters (capacities, rates and
//! admissible sets) drawn from stream [`rng::STATIC_STREAM`] of the family
//! seed; member `j` draws its demand tensor from stream
//! [`rng::DEMAND_STREAM`] of `derive_seed(seed, j)`.
//!
//! Draw order for static parameters: edge links user-major then ISP
//! (`cap_max`, `cap_basic`, `rate` per link), then admissibility bits
//! type-major then user then link, then ISP links (`cap_basic`, `cap_max`,
//! `cap_phys`, `rate` per link).
//!
//! Draw order for demands: initial values slot-major then user then type
//! (inbound before outbound per entry); then per user the slot loop (branch
//! draw, then inbound and outbound rescales per type); then per user the
//! cap pass type-major then slot (inbound before outbound).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DemandTensor, Instance, LinkCaps, Topology};
use crate::rng::{self, derive_seed, uniform};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub n_users: usize,
    pub n_slots: usize,
    pub n_types: usize,
    pub n_links: usize,
    pub seed: u64,
    /// `cap_max ~ Uniform(lo, hi)` for edge links.
    pub cap_max_range: (f64, f64),
    /// `cap_basic ~ Uniform(lo * cap_max, hi * cap_max)`.
    pub cap_basic_fraction: (f64, f64),
    pub edge_rate_range: (f64, f64),
    pub isp_rate_range: (f64, f64),
    pub cap_phys: f64,
    /// Probability that a link joins an admissible set.
    pub admit_prob: f64,
    /// ISP capacities are drawn from `Uniform(lo * S, hi * S)` where `S`
    /// sums the corresponding edge capacities.
    pub isp_contraction: (f64, f64),
    pub demand_init: (f64, f64),
    /// Rescale factor range applied to each demand's share of the user budget.
    pub demand_scale: (f64, f64),
    /// Probability of scaling a slot against the basic-capacity budget
    /// rather than the maximum-capacity budget.
    pub low_branch_prob: f64,
    /// Entries above `cap_trigger * cbb` are resampled.
    pub cap_trigger: f64,
    /// Resampling range as fractions of `cbb`.
    pub cap_resample: (f64, f64),
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_users: 10,
            n_slots: 48,
            n_types: 8,
            n_links: 4,
            seed: 0,
            cap_max_range: (300.0, 1000.0),
            cap_basic_fraction: (0.05, 0.5),
            edge_rate_range: (5.0, 10.0),
            isp_rate_range: (5.0, 10.0),
            cap_phys: 10_000.0,
            admit_prob: 0.5,
            isp_contraction: (0.8, 0.9),
            demand_init: (20.0, 30.0),
            demand_scale: (0.6, 0.8),
            low_branch_prob: 0.5,
            cap_trigger: 0.25,
            cap_resample: (0.05, 0.125),
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        let ranges = [
            ("cap_max_range", self.cap_max_range),
            ("cap_basic_fraction", self.cap_basic_fraction),
            ("edge_rate_range", self.edge_rate_range),
            ("isp_rate_range", self.isp_rate_range),
            ("isp_contraction", self.isp_contraction),
            ("demand_init", self.demand_init),
            ("demand_scale", self.demand_scale),
            ("cap_resample", self.cap_resample),
        ];
        for (name, (lo, hi)) in ranges {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::InvalidConfig(format!("{name}: lower bound {lo} exceeds upper bound {hi}")));
            }
        }
        for (name, p) in [("admit_prob", self.admit_prob), ("low_branch_prob", self.low_branch_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!("{name} must be a probability, got {p}")));
            }
        }
        if self.n_users == 0 || self.n_slots == 0 || self.n_types == 0 || self.n_links == 0 {
            return Err(Error::InvalidConfig("all dimensions must be positive".into()));
        }
        if self.cap_max_range.0 <= 0.0 || self.cap_basic_fraction.0 <= 0.0 || self.cap_basic_fraction.1 > 1.0 {
            return Err(Error::InvalidConfig("capacities must be positive with basic <= max".into()));
        }
        if self.cap_phys < self.cap_max_range.1 {
            return Err(Error::InvalidConfig("cap_phys must be at least the largest cap_max".into()));
        }
        Ok(())
    }
}

/// Draws the static network parameters.
pub fn sample_static<R: Rng + ?Sized>(config: &GenConfig, rng: &mut R) -> Result<Topology> {
    config.validate()?;
    let (nu, el, nk) = (config.n_users, config.n_links, config.n_types);
    let mut edge_links = Vec::with_capacity(nu);
    for _ in 0..nu {
        let mut row = Vec::with_capacity(el);
        for _ in 0..el {
            let cap_max = uniform(rng, config.cap_max_range.0, config.cap_max_range.1);
            let cap_basic = uniform(rng, config.cap_basic_fraction.0 * cap_max, config.cap_basic_fraction.1 * cap_max);
            let rate = uniform(rng, config.edge_rate_range.0, config.edge_rate_range.1);
            row.push(LinkCaps { cap_basic, cap_max, cap_phys: config.cap_phys, rate });
        }
        edge_links.push(row);
    }
    let full = (1u32 << el) - 1;
    let mut admissible = vec![vec![0u32; nu]; nk];
    for row in admissible.iter_mut() {
        for mask in row.iter_mut() {
            for i in 0..el {
                if rng.random::<f64>() < config.admit_prob {
                    *mask |= 1 << i;
                }
            }
            if *mask == 0 {
                *mask = full;
            }
        }
    }
    let (lo, hi) = config.isp_contraction;
    let mut isp_links = Vec::with_capacity(el);
    for i in 0..el {
        let sum_basic: f64 = edge_links.iter().map(|row| row[i].cap_basic).sum();
        let sum_max: f64 = edge_links.iter().map(|row| row[i].cap_max).sum();
        let sum_phys: f64 = edge_links.iter().map(|row| row[i].cap_phys).sum();
        let cap_basic = uniform(rng, lo * sum_basic, hi * sum_basic);
        let cap_max = uniform(rng, lo * sum_max, hi * sum_max);
        let cap_phys = uniform(rng, lo * sum_phys, hi * sum_phys);
        let rate = uniform(rng, config.isp_rate_range.0, config.isp_rate_range.1);
        isp_links.push(LinkCaps { cap_basic, cap_max, cap_phys, rate });
    }
    let topology =
        Topology { n_users: nu, n_slots: config.n_slots, n_types: nk, n_links: el, edge_links, isp_links, admissible };
    topology.validate()?;
    Ok(topology)
}

/// Intermediate stages of demand sampling, for inspection and tests.
#[derive(Debug, Clone)]
pub struct DemandTrace {
    /// Initial uniform draws.
    pub raw: DemandTensor,
    /// After the per-slot budget rescale.
    pub scaled: DemandTensor,
    /// After the per-type cap pass; this is the returned tensor.
    pub capped: DemandTensor,
}

/// Draws a demand tensor for `topology` using the generator's defaults.
pub fn sample_demands<R: Rng + ?Sized>(topology: &Topology, rng: &mut R) -> DemandTensor {
    sample_demands_traced(topology, &GenConfig::default(), rng).capped
}

/// Demand sampling with explicit parameters, returning every stage.
pub fn sample_demands_traced<R: Rng + ?Sized>(topology: &Topology, config: &GenConfig, rng: &mut R) -> DemandTrace {
    let (nk, nu, nt) = (topology.n_types, topology.n_users, topology.n_slots);
    let mut d = DemandTensor::zeros(nk, nu, nt);
    for t in 0..nt {
        for n in 0..nu {
            for k in 0..nk {
                let idx = d.index(k, n, t);
                d.inbound[idx] = uniform(rng, config.demand_init.0, config.demand_init.1);
                d.outbound[idx] = uniform(rng, config.demand_init.0, config.demand_init.1);
            }
        }
    }
    let raw = d.clone();
    let (s_lo, s_hi) = config.demand_scale;
    let mut capped = d.clone();
    for n in 0..nu {
        let cb: f64 = topology.edge_links[n].iter().map(|l| l.cap_basic).sum();
        let cm: f64 = topology.edge_links[n].iter().map(|l| l.cap_max).sum();
        for t in 0..nt {
            let sum_in: f64 = (0..nk).map(|k| d.inbound_at(k, n, t)).sum();
            let sum_out: f64 = (0..nk).map(|k| d.outbound_at(k, n, t)).sum();
            let budget = if rng.random::<f64>() < config.low_branch_prob { cb } else { cm };
            for k in 0..nk {
                let idx = d.index(k, n, t);
                let share_in = d.inbound[idx] * budget / sum_in;
                let share_out = d.outbound[idx] * budget / sum_out;
                d.inbound[idx] = uniform(rng, s_lo * share_in, s_hi * share_in);
                d.outbound[idx] = uniform(rng, s_lo * share_out, s_hi * share_out);
            }
        }
        for k in 0..nk {
            let cbb: f64 = (0..topology.n_links)
                .filter(|&i| topology.admissible[k][n] & (1 << i) != 0)
                .map(|i| topology.edge_links[n][i].cap_basic)
                .sum();
            let trigger = config.cap_trigger * cbb;
            for t in 0..nt {
                let idx = d.index(k, n, t);
                let (mut din, mut dout) = (d.inbound[idx], d.outbound[idx]);
                if din > trigger {
                    din = uniform(rng, config.cap_resample.0 * cbb, config.cap_resample.1 * cbb);
                }
                if dout > trigger {
                    dout = uniform(rng, config.cap_resample.0 * cbb, config.cap_resample.1 * cbb);
                }
                capped.inbound[idx] = din;
                capped.outbound[idx] = dout;
            }
        }
    }
    let scaled = d;
    DemandTrace { raw, scaled, capped }
}

/// Static parameters of the family described by `config`.
pub fn family_topology(config: &GenConfig) -> Result<Topology> {
    sample_static(config, &mut rng::stream(config.seed, rng::STATIC_STREAM))
}

/// Member `index` of a family sharing `topology`.
pub fn family_member(topology: &Topology, config: &GenConfig, index: usize) -> Result<Instance> {
    let seed = derive_seed(config.seed, index as u64);
    let demands = sample_demands_traced(topology, config, &mut rng::stream(seed, rng::DEMAND_STREAM)).capped;
    Instance::new(topology.clone(), demands, seed, format!("s{}-{index:04}", config.seed))
}

/// `count` instances sharing one set of static parameters.
pub fn generate_family(config: &GenConfig, count: usize) -> Result<Vec<Instance>> {
    let topology = family_topology(config)?;
    (0..count).map(|j| family_member(&topology, config, j)).collect()
}

/// `count` instances whose static and dynamic parameters are all drawn
/// independently (member `j` uses family seed `derive_seed(seed, j)`).
pub fn generate_independent(config: &GenConfig, count: usize) -> Result<Vec<Instance>> {
    (0..count)
        .map(|j| {
            let cfg = GenConfig { seed: derive_seed(config.seed, 1_000_000 + j as u64), ..config.clone() };
            let topology = family_topology(&cfg)?;
            let mut inst = family_member(&topology, &cfg, 0)?;
            inst.id = format!("s{}-ind{j:04}", config.seed);
            Ok(inst)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GenConfig {
        GenConfig { n_users: 3, n_slots: 10, seed: 5, ..GenConfig::default() }
    }

    #[test]
    fn static_draws_stay_in_their_intervals() {
        let cfg = small();
        let topo = family_topology(&cfg).unwrap();
        for row in &topo.edge_links {
            for l in row {
                assert!((300.0..=1000.0).contains(&l.cap_max));
                assert!(l.cap_basic >= 0.05 * l.cap_max && l.cap_basic <= 0.5 * l.cap_max);
                assert!((5.0..=10.0).contains(&l.rate));
                assert_eq!(l.cap_phys, 10_000.0);
            }
        }
        for (i, l) in topo.isp_links.iter().enumerate() {
            let s: f64 = topo.edge_links.iter().map(|r| r[i].cap_basic).sum();
            assert!(l.cap_basic >= 0.8 * s && l.cap_basic <= 0.9 * s);
        }
    }

    #[test]
    fn raw_demands_lie_in_init_range() {
        let cfg = small();
        let topo = family_topology(&cfg).unwrap();
        let trace = sample_demands_traced(&topo, &cfg, &mut rng::stream(1, rng::DEMAND_STREAM));
        assert!(trace.raw.inbound.iter().chain(&trace.raw.outbound).all(|d| (20.0..=30.0).contains(d)));
    }

    #[test]
    fn cap_pass_bounds_every_entry() {
        let cfg = small();
        let topo = family_topology(&cfg).unwrap();
        let d = sample_demands(&topo, &mut rng::stream(2, rng::DEMAND_STREAM));
        for t in 0..topo.n_slots {
            for n in 0..topo.n_users {
                for k in 0..topo.n_types {
                    let cbb: f64 = (0..4)
                        .filter(|&i| topo.admissible[k][n] & (1 << i) != 0)
                        .map(|i| topo.edge_links[n][i].cap_basic)
                        .sum();
                    assert!(d.inbound_at(k, n, t) <= 0.25 * cbb && d.inbound_at(k, n, t) > 0.0);
                    assert!(d.outbound_at(k, n, t) <= 0.25 * cbb && d.outbound_at(k, n, t) > 0.0);
                }
            }
        }
    }

    #[test]
    fn same_seed_same_family() {
        let a = generate_family(&small(), 3).unwrap();
        let b = generate_family(&small(), 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0].demands, a[1].demands);
    }

    #[test]
    fn rejects_inverted_ranges() {
        let cfg = GenConfig { demand_init: (30.0, 20.0), ..small() };
        assert!(cfg.validate().is_err());
    }
}
