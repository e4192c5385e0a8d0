//! Helpers shared by the integration tests: small random instances and an
//! independent, deliberately naive bill evaluator.
#![allow(dead_code)]

use edgecloud::model::{AllocationScheme, DemandTensor, Instance, LinkCaps, OptionTable, Topology};
use edgecloud::rng;
use rand::Rng;

fn caps<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> LinkCaps {
    let cap_max = rng.random_range(lo..hi);
    let cap_basic = cap_max * rng.random_range(0.2..0.8);
    LinkCaps { cap_basic, cap_max, cap_phys: cap_max * rng.random_range(1.2..2.0), rate: rng.random_range(1.0..10.0) }
}

/// A random topology with nonempty admissible sets and demands large enough
/// that some schemes bill overage and some violate caps.
pub fn random_instance(seed: u64, n_users: usize, n_slots: usize, n_types: usize, n_links: usize) -> Instance {
    let mut rng = rng::stream(seed, 77);
    let edge_links = (0..n_users).map(|_| (0..n_links).map(|_| caps(&mut rng, 50.0, 150.0)).collect()).collect();
    let isp_links = (0..n_links).map(|_| caps(&mut rng, 80.0 * n_users as f64, 200.0 * n_users as f64)).collect();
    let full = (1u32 << n_links) - 1;
    let admissible = (0..n_types).map(|_| (0..n_users).map(|_| rng.random_range(1..=full)).collect()).collect();
    let topology = Topology { n_users, n_slots, n_types, n_links, edge_links, isp_links, admissible };
    let mut demands = DemandTensor::zeros(n_types, n_users, n_slots);
    for d in demands.inbound.iter_mut().chain(demands.outbound.iter_mut()) {
        *d = rng.random_range(0.0..60.0);
    }
    Instance::new(topology, demands, seed, format!("rand-{seed}")).unwrap()
}

pub fn random_scheme<R: Rng>(instance: &Instance, table: &OptionTable, rng: &mut R) -> AllocationScheme {
    let topo = &instance.topology;
    let mut scheme = AllocationScheme::uniform_option(topo.n_slots, topo.n_users, topo.n_types, 0);
    for t in 0..topo.n_slots {
        for n in 0..topo.n_users {
            for k in 0..topo.n_types {
                let r = scheme.row(t, n, k);
                scheme.option[r] = rng.random_range(0..table.n_valid(k, n)) as u16;
            }
        }
    }
    scheme
}

/// Links selected by option `p` of an admissible mask, enumerated by binary
/// counting over the admissible links in ascending order.
pub fn selected_links(admissible: u32, p: usize) -> Vec<usize> {
    let links: Vec<usize> = (0..32).filter(|i| admissible & (1 << i) != 0).collect();
    let code = p + 1;
    links.iter().enumerate().filter(|(b, _)| code & (1 << b) != 0).map(|(_, &l)| l).collect()
}

/// Percentile by counting: the value `v` with exactly `m` samples strictly
/// ranked above it, where ranking is by value then earliest slot.
pub fn naive_g95(series: &[f64]) -> f64 {
    let m = series.len() * 5 / 100;
    for (t, &v) in series.iter().enumerate() {
        let above = series.iter().enumerate().filter(|&(s, &w)| w > v || (w == v && s < t)).count();
        if above == m {
            return v;
        }
    }
    unreachable!()
}

/// Per-link flows and cost computed straight from the definitions, without
/// the library's option tables.
pub struct NaiveBill {
    /// `[n][i][t]` inbound and outbound edge flows.
    pub edge_in: Vec<Vec<Vec<f64>>>,
    pub edge_out: Vec<Vec<Vec<f64>>>,
    pub cost: f64,
}

pub fn naive_bill(instance: &Instance, scheme: &AllocationScheme) -> NaiveBill {
    let topo = &instance.topology;
    let (nu, nt, nk, el) = (topo.n_users, topo.n_slots, topo.n_types, topo.n_links);
    let mut edge_in = vec![vec![vec![0.0; nt]; el]; nu];
    let mut edge_out = vec![vec![vec![0.0; nt]; el]; nu];
    for t in 0..nt {
        for n in 0..nu {
            for k in 0..nk {
                let links = selected_links(topo.admissible[k][n], scheme.get(t, n, k));
                let total: f64 = links.iter().map(|&i| topo.edge_links[n][i].cap_basic).sum();
                for &i in &links {
                    let share = topo.edge_links[n][i].cap_basic / total;
                    edge_in[n][i][t] += share * instance.demands.inbound_at(k, n, t);
                    edge_out[n][i][t] += share * instance.demands.outbound_at(k, n, t);
                }
            }
        }
    }
    let mut cost = 0.0;
    for n in 0..nu {
        for i in 0..el {
            let l = &topo.edge_links[n][i];
            let z = naive_g95(&edge_in[n][i]).max(naive_g95(&edge_out[n][i]));
            cost += l.rate * (z - l.cap_basic).max(0.0);
        }
    }
    for i in 0..el {
        let l = &topo.isp_links[i];
        let sin: Vec<f64> = (0..nt).map(|t| (0..nu).map(|n| edge_in[n][i][t]).sum()).collect();
        let sout: Vec<f64> = (0..nt).map(|t| (0..nu).map(|n| edge_out[n][i][t]).sum()).collect();
        let z = naive_g95(&sin).max(naive_g95(&sout));
        cost += l.rate * (z - l.cap_basic).max(0.0);
    }
    NaiveBill { edge_in, edge_out, cost }
}

pub fn assert_close(a: f64, b: f64, rel: f64) {
    assert!((a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0), "{a} vs {b}");
}

/// A generator-drawn instance with N = 1, T = 3, K = 2 and exactly two
/// admissible links per type (3 options per demand, 3^6 = 729 schemes).
/// Demands are scaled up by `1 + (seed % 4)` so overage and infeasible
/// schemes both occur.
pub fn tiny_instance(seed: u64) -> Instance {
    use edgecloud::gen::{family_topology, sample_demands, GenConfig};
    let cfg = GenConfig { n_users: 1, n_slots: 3, n_types: 2, seed, ..GenConfig::default() };
    let mut topology = family_topology(&cfg).unwrap();
    let mut r = rng::stream(seed, 99);
    for row in topology.admissible.iter_mut() {
        let a = r.random_range(0..4u32);
        let b = (a + r.random_range(1..4u32)) % 4;
        row[0] = (1 << a) | (1 << b);
    }
    let mut demands = sample_demands(&topology, &mut r);
    let scale = 1.0 + (seed % 4) as f64;
    for d in demands.inbound.iter_mut().chain(demands.outbound.iter_mut()) {
        *d *= scale;
    }
    Instance::new(topology, demands, seed, format!("tiny-{seed}")).unwrap()
}

/// Every scheme of an instance, by odometer enumeration.
pub fn all_schemes(instance: &Instance, table: &OptionTable) -> Vec<AllocationScheme> {
    let topo = &instance.topology;
    let rows = instance.n_rows();
    let n_valid: Vec<usize> =
        (0..rows).map(|r| table.n_valid(r % topo.n_types, (r / topo.n_types) % topo.n_users)).collect();
    let mut out = Vec::new();
    let mut scheme = AllocationScheme::uniform_option(topo.n_slots, topo.n_users, topo.n_types, 0);
    loop {
        out.push(scheme.clone());
        let mut r = 0;
        while r < rows {
            scheme.option[r] += 1;
            if (scheme.option[r] as usize) < n_valid[r] {
                break;
            }
            scheme.option[r] = 0;
            r += 1;
        }
        if r == rows {
            return out;
        }
    }
}

/// Solves an exported LP file exactly with an independent MILP solver.
///
/// `fixed` pins variables by name. Returns the optimal objective and the
/// value of every named variable, or `None` when infeasible.
pub fn solve_lp_text(lp: &str, fixed: &[(String, f64)]) -> Option<(f64, std::collections::HashMap<String, f64>)> {
    use microlp::{ComparisonOp, OptimizationDirection, Problem};
    use std::collections::HashMap;
    let parsed = edgecloud::milp::parse_lp(lp).unwrap();
    let binaries: std::collections::HashSet<&str> = parsed.binaries.iter().map(String::as_str).collect();
    let mut names: Vec<&str> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let all_terms = parsed.objective.iter().chain(parsed.constraints.iter().flat_map(|c| c.terms.iter()));
    for (name, _) in all_terms {
        if seen.insert(name.as_str()) {
            names.push(name);
        }
    }
    let objective: HashMap<&str, f64> = parsed.objective.iter().map(|(n, c)| (n.as_str(), *c)).collect();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: HashMap<&str, microlp::Variable> = names
        .iter()
        .map(|&n| {
            let c = objective.get(n).copied().unwrap_or(0.0);
            let v =
                if binaries.contains(n) { problem.add_binary_var(c) } else { problem.add_var(c, (0.0, f64::INFINITY)) };
            (n, v)
        })
        .collect();
    for c in &parsed.constraints {
        let expr: Vec<(microlp::Variable, f64)> = c.terms.iter().map(|(n, a)| (vars[n.as_str()], *a)).collect();
        let op = match c.sense {
            edgecloud::milp::Sense::Le => ComparisonOp::Le,
            edgecloud::milp::Sense::Ge => ComparisonOp::Ge,
            edgecloud::milp::Sense::Eq => ComparisonOp::Eq,
        };
        problem.add_constraint(expr, op, c.rhs);
    }
    for (name, value) in fixed {
        problem.add_constraint([(vars[name.as_str()], 1.0)], ComparisonOp::Eq, *value);
    }
    let solution = problem.solve().ok()?.into_solution().ok()?;
    let values = vars.iter().map(|(n, v)| (n.to_string(), solution.var_value(*v))).collect();
    Some((solution.objective(), values))
}
