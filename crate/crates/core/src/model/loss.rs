use super::allocation::{Allocation, SoftAllocation};
use super::flows::{accumulate_flows, g95_index, total_cost, FlowSummary};
use super::options::OptionTable;
use super::topology::Instance;
use crate::error::{Error, Result};

/// Penalty weights of the soft loss.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LossWeights {
    /// Weight of the squared-ReLU inequality penalty.
    pub inequality: f64,
    /// Weight of the squared equality residual. Demand conservation and
    /// admissibility hold by construction, so this term is always zero.
    pub equality: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights { inequality: 1.0, equality: 1.0 }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        if !(self.inequality >= 0.0 && self.equality >= 0.0) {
            return Err(Error::InvalidConfig(format!("loss weights must be nonnegative, got {self:?}")));
        }
        Ok(())
    }
}

#[inline]
fn relu(x: f64) -> f64 {
    x.max(0.0)
}

/// `sum max(g, 0)^2` over every inequality of the program: per-slot physical
/// caps on edge and ISP links (both directions) and billable caps.
fn penalty(instance: &Instance, flows: &FlowSummary) -> f64 {
    let topo = &instance.topology;
    let (nt, el) = (topo.n_slots, topo.n_links);
    let mut acc = 0.0;
    for n in 0..topo.n_users {
        for i in 0..el {
            let caps = topo.edge(n, i);
            let off = (n * el + i) * nt;
            for t in 0..nt {
                acc += relu(flows.edge_in[off + t] - caps.cap_phys).powi(2);
                acc += relu(flows.edge_out[off + t] - caps.cap_phys).powi(2);
            }
        }
    }
    for (i, caps) in topo.isp_links.iter().enumerate() {
        for t in 0..nt {
            acc += relu(flows.isp_in[i * nt + t] - caps.cap_phys).powi(2);
            acc += relu(flows.isp_out[i * nt + t] - caps.cap_phys).powi(2);
        }
    }
    for n in 0..topo.n_users {
        for i in 0..el {
            acc += relu(flows.z_edge[n * el + i] - topo.edge(n, i).cap_max).powi(2);
        }
    }
    for (i, caps) in topo.isp_links.iter().enumerate() {
        acc += relu(flows.z_isp[i] - caps.cap_max).powi(2);
    }
    acc
}

/// Soft loss `f + w_g * sum max(g, 0)^2 + w_h * |h|^2` of a hard or soft allocation.
pub fn soft_loss<A: Allocation + ?Sized>(
    instance: &Instance,
    table: &OptionTable,
    alloc: &A,
    weights: LossWeights,
) -> Result<f64> {
    weights.validate()?;
    let flows = super::flows::compute_flows(instance, table, alloc)?;
    Ok(flows.cost_total + weights.inequality * penalty(instance, &flows))
}

/// Soft loss of a soft allocation together with its subgradient with
/// respect to every allocation weight.
///
/// The percentile routes gradient to its selected slot, `max(in, out)` to
/// the winning direction (inbound on ties), and `max(z - c_basic, 0)` is
/// differentiated as zero at the kink.
pub fn soft_loss_with_grad(
    instance: &Instance,
    table: &OptionTable,
    alloc: &SoftAllocation,
    weights: LossWeights,
) -> Result<(f64, Vec<f64>)> {
    weights.validate()?;
    alloc.validate(table)?;
    let topo = &instance.topology;
    if alloc.n_slots != topo.n_slots {
        return Err(Error::Shape("soft allocation slot count differs from instance".into()));
    }
    let lg = weights.inequality;
    let mut flows = accumulate_flows(instance, table, alloc);
    flows.cost_total = total_cost(&flows, topo)?;
    let loss = flows.cost_total + lg * penalty(instance, &flows);

    let (nt, nu, nk, el) = (topo.n_slots, topo.n_users, topo.n_types, topo.n_links);
    // dL/d(flow) for every edge and ISP sample.
    let mut g_isp_in = vec![0.0; el * nt];
    let mut g_isp_out = vec![0.0; el * nt];
    for (i, caps) in topo.isp_links.iter().enumerate() {
        let s_in = flows.isp_series_in(i);
        let s_out = flows.isp_series_out(i);
        for t in 0..nt {
            g_isp_in[i * nt + t] = 2.0 * lg * relu(s_in[t] - caps.cap_phys);
            g_isp_out[i * nt + t] = 2.0 * lg * relu(s_out[t] - caps.cap_phys);
        }
        let z = flows.z_isp[i];
        let dz = billable_grad(z, caps.cap_basic, caps.cap_max, caps.rate, lg);
        route_billable(s_in, s_out, dz, &mut g_isp_in[i * nt..(i + 1) * nt], &mut g_isp_out[i * nt..(i + 1) * nt]);
    }
    let mut g_edge_in = vec![0.0; nu * el * nt];
    let mut g_edge_out = vec![0.0; nu * el * nt];
    for n in 0..nu {
        for i in 0..el {
            let caps = topo.edge(n, i);
            let off = (n * el + i) * nt;
            let s_in = flows.edge_series_in(n, i);
            let s_out = flows.edge_series_out(n, i);
            for t in 0..nt {
                g_edge_in[off + t] = 2.0 * lg * relu(s_in[t] - caps.cap_phys) + g_isp_in[i * nt + t];
                g_edge_out[off + t] = 2.0 * lg * relu(s_out[t] - caps.cap_phys) + g_isp_out[i * nt + t];
            }
            let dz = billable_grad(flows.z_edge[n * el + i], caps.cap_basic, caps.cap_max, caps.rate, lg);
            route_billable(s_in, s_out, dz, &mut g_edge_in[off..off + nt], &mut g_edge_out[off..off + nt]);
        }
    }

    let p_count = alloc.n_options;
    let mut grad = vec![0.0; alloc.weights.len()];
    let d = &instance.demands;
    for t in 0..nt {
        for n in 0..nu {
            for k in 0..nk {
                let row = (t * nu + n) * nk + k;
                let (din, dout) = (d.inbound[row], d.outbound[row]);
                let set = table.set(k, n);
                let g_row = &mut grad[row * p_count..(row + 1) * p_count];
                for (p, g) in g_row.iter_mut().enumerate().take(set.n_valid()) {
                    let w = &set.weights[p * el..(p + 1) * el];
                    let mut acc = 0.0;
                    for (i, &wi) in w.iter().enumerate() {
                        if wi != 0.0 {
                            let idx = (n * el + i) * nt + t;
                            acc += wi * (din * g_edge_in[idx] + dout * g_edge_out[idx]);
                        }
                    }
                    *g = acc;
                }
            }
        }
    }
    Ok((loss, grad))
}

#[inline]
fn billable_grad(z: f64, cap_basic: f64, cap_max: f64, rate: f64, lg: f64) -> f64 {
    let cost = if z > cap_basic { rate } else { 0.0 };
    cost + 2.0 * lg * relu(z - cap_max)
}

fn route_billable(s_in: &[f64], s_out: &[f64], dz: f64, g_in: &mut [f64], g_out: &mut [f64]) {
    if dz == 0.0 {
        return;
    }
    let ti = g95_index(s_in).expect("T > 0");
    let to = g95_index(s_out).expect("T > 0");
    if s_in[ti] >= s_out[to] {
        g_in[ti] += dz;
    } else {
        g_out[to] += dz;
    }
}
