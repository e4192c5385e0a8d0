use super::allocation::Allocation;
use super::options::OptionTable;
use super::topology::{Instance, Topology};
use crate::error::{Error, Result};

/// Per-link, per-slot traffic and the resulting bill.
///
/// Edge arrays are indexed `(n * EL + i) * T + t`, ISP arrays `i * T + t`,
/// edge billables `n * EL + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSummary {
    pub n_users: usize,
    pub n_links: usize,
    pub n_slots: usize,
    pub edge_in: Vec<f64>,
    pub edge_out: Vec<f64>,
    pub isp_in: Vec<f64>,
    pub isp_out: Vec<f64>,
    pub z_edge: Vec<f64>,
    pub z_isp: Vec<f64>,
    pub cost_total: f64,
}

impl FlowSummary {
    #[inline]
    pub fn edge_series_in(&self, n: usize, i: usize) -> &[f64] {
        let off = (n * self.n_links + i) * self.n_slots;
        &self.edge_in[off..off + self.n_slots]
    }

    #[inline]
    pub fn edge_series_out(&self, n: usize, i: usize) -> &[f64] {
        let off = (n * self.n_links + i) * self.n_slots;
        &self.edge_out[off..off + self.n_slots]
    }

    #[inline]
    pub fn isp_series_in(&self, i: usize) -> &[f64] {
        &self.isp_in[i * self.n_slots..(i + 1) * self.n_slots]
    }

    #[inline]
    pub fn isp_series_out(&self, i: usize) -> &[f64] {
        &self.isp_out[i * self.n_slots..(i + 1) * self.n_slots]
    }
}

/// Number of exempt (free) slots in a billing cycle of `n_slots` samples:
/// `floor(0.05 * T)`.
#[inline]
pub fn exempt_slots(n_slots: usize) -> usize {
    n_slots / 20
}

/// Slot index of the 95th-percentile sample: the `(m + 1)`-th largest value
/// with `m = floor(0.05 * T)`. Ties resolve to the lowest slot index.
pub fn g95_index(series: &[f64]) -> Option<usize> {
    if series.is_empty() {
        return None;
    }
    let m = exempt_slots(series.len());
    let mut order: Vec<usize> = (0..series.len()).collect();
    // Stable sort keeps ascending slot order among equal values.
    order.sort_by(|&a, &b| series[b].total_cmp(&series[a]));
    Some(order[m])
}

/// 95th-percentile value of a series of five-minute samples.
pub fn g95(series: &[f64]) -> Result<f64> {
    g95_index(series).map(|i| series[i]).ok_or_else(|| Error::Shape("g95 of an empty series".into()))
}

/// Billable bandwidth: the larger of the inbound and outbound percentiles.
pub fn billable(inbound: &[f64], outbound: &[f64]) -> Result<f64> {
    Ok(g95(inbound)?.max(g95(outbound)?))
}

/// Splits demands over links according to `alloc` and bills the result.
pub fn compute_flows<A: Allocation + ?Sized>(
    instance: &Instance,
    table: &OptionTable,
    alloc: &A,
) -> Result<FlowSummary> {
    let topo = &instance.topology;
    let (t_a, n_a, k_a) = alloc.dims();
    if (t_a, n_a, k_a) != (topo.n_slots, topo.n_users, topo.n_types) {
        return Err(Error::Shape(format!(
            "allocation is {t_a}x{n_a}x{k_a} (T x N x K) but instance is {}x{}x{}",
            topo.n_slots, topo.n_users, topo.n_types
        )));
    }
    alloc.validate(table)?;
    let mut flows = accumulate_flows(instance, table, alloc);
    flows.cost_total = total_cost(&flows, topo)?;
    Ok(flows)
}

/// Flow accumulation and billables without validation; cost is left at zero.
pub(crate) fn accumulate_flows<A: Allocation + ?Sized>(
    instance: &Instance,
    table: &OptionTable,
    alloc: &A,
) -> FlowSummary {
    let topo = &instance.topology;
    let d = &instance.demands;
    let (nt, nu, nk, el) = (topo.n_slots, topo.n_users, topo.n_types, topo.n_links);
    let mut edge_in = vec![0.0; nu * el * nt];
    let mut edge_out = vec![0.0; nu * el * nt];
    let mut frac = vec![0.0; el];
    for t in 0..nt {
        for n in 0..nu {
            for k in 0..nk {
                let row = (t * nu + n) * nk + k;
                alloc.fractions(table, row, k, n, &mut frac);
                let (din, dout) = (d.inbound[row], d.outbound[row]);
                for (i, &w) in frac.iter().enumerate() {
                    if w != 0.0 {
                        let idx = (n * el + i) * nt + t;
                        edge_in[idx] += w * din;
                        edge_out[idx] += w * dout;
                    }
                }
            }
        }
    }
    let mut isp_in = vec![0.0; el * nt];
    let mut isp_out = vec![0.0; el * nt];
    for n in 0..nu {
        for i in 0..el {
            for t in 0..nt {
                let idx = (n * el + i) * nt + t;
                isp_in[i * nt + t] += edge_in[idx];
                isp_out[i * nt + t] += edge_out[idx];
            }
        }
    }
    let mut flows = FlowSummary {
        n_users: nu,
        n_links: el,
        n_slots: nt,
        edge_in,
        edge_out,
        isp_in,
        isp_out,
        z_edge: vec![0.0; nu * el],
        z_isp: vec![0.0; el],
        cost_total: 0.0,
    };
    for n in 0..nu {
        for i in 0..el {
            let z = billable(flows.edge_series_in(n, i), flows.edge_series_out(n, i)).expect("T > 0");
            flows.z_edge[n * el + i] = z;
        }
    }
    for i in 0..el {
        flows.z_isp[i] = billable(flows.isp_series_in(i), flows.isp_series_out(i)).expect("T > 0");
    }
    flows
}

/// Overage cost: `sum r * max(z - c_basic, 0)` over edge and ISP links.
pub fn total_cost(flows: &FlowSummary, topology: &Topology) -> Result<f64> {
    let el = topology.n_links;
    if flows.z_edge.len() != topology.n_users * el || flows.z_isp.len() != el {
        return Err(Error::Shape("flow summary does not match topology".into()));
    }
    let mut cost = 0.0;
    for n in 0..topology.n_users {
        for i in 0..el {
            let link = topology.edge(n, i);
            cost += link.rate * (flows.z_edge[n * el + i] - link.cap_basic).max(0.0);
        }
    }
    for (i, link) in topology.isp_links.iter().enumerate() {
        cost += link.rate * (flows.z_isp[i] - link.cap_basic).max(0.0);
    }
    Ok(cost)
}
