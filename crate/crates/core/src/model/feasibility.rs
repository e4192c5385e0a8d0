use super::allocation::AllocationScheme;
use super::flows::{compute_flows, FlowSummary};
use super::options::OptionTable;
use super::topology::Instance;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Direction {
    Inbound,
    Outbound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum ConstraintFamily {
    EdgePhysical,
    IspPhysical,
    EdgeBillable,
    IspBillable,
}

/// One violated inequality. `user` is `None` for ISP links; `slot` and
/// `direction` are `None` for billable caps.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Violation {
    pub family: ConstraintFamily,
    pub user: Option<usize>,
    pub link: usize,
    pub slot: Option<usize>,
    pub direction: Option<Direction>,
    /// Amount (Mbps) by which the bound is exceeded.
    pub excess: f64,
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct FeasibilityReport {
    pub edge_physical: Vec<Violation>,
    pub isp_physical: Vec<Violation>,
    pub edge_billable: Vec<Violation>,
    pub isp_billable: Vec<Violation>,
    pub feasible: bool,
}

impl FeasibilityReport {
    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.edge_physical.iter().chain(&self.isp_physical).chain(&self.edge_billable).chain(&self.isp_billable)
    }

    pub fn count(&self) -> usize {
        self.violations().count()
    }

    /// Builds the report from already computed flows.
    pub fn from_flows(instance: &Instance, flows: &FlowSummary) -> Self {
        let topo = &instance.topology;
        let (nt, el) = (topo.n_slots, topo.n_links);
        let mut report = FeasibilityReport::default();
        for n in 0..topo.n_users {
            for i in 0..el {
                let caps = topo.edge(n, i);
                for (dir, series) in [
                    (Direction::Inbound, flows.edge_series_in(n, i)),
                    (Direction::Outbound, flows.edge_series_out(n, i)),
                ] {
                    for (t, &f) in series.iter().enumerate() {
                        if f > caps.cap_phys {
                            report.edge_physical.push(Violation {
                                family: ConstraintFamily::EdgePhysical,
                                user: Some(n),
                                link: i,
                                slot: Some(t),
                                direction: Some(dir),
                                excess: f - caps.cap_phys,
                            });
                        }
                    }
                }
            }
        }
        for (i, caps) in topo.isp_links.iter().enumerate() {
            for (dir, series) in
                [(Direction::Inbound, flows.isp_series_in(i)), (Direction::Outbound, flows.isp_series_out(i))]
            {
                for (t, &f) in series.iter().enumerate().take(nt) {
                    if f > caps.cap_phys {
                        report.isp_physical.push(Violation {
                            family: ConstraintFamily::IspPhysical,
                            user: None,
                            link: i,
                            slot: Some(t),
                            direction: Some(dir),
                            excess: f - caps.cap_phys,
                        });
                    }
                }
            }
        }
        for n in 0..topo.n_users {
            for i in 0..el {
                let z = flows.z_edge[n * el + i];
                let cap = topo.edge(n, i).cap_max;
                if z > cap {
                    report.edge_billable.push(Violation {
                        family: ConstraintFamily::EdgeBillable,
                        user: Some(n),
                        link: i,
                        slot: None,
                        direction: None,
                        excess: z - cap,
                    });
                }
            }
        }
        for (i, caps) in topo.isp_links.iter().enumerate() {
            if flows.z_isp[i] > caps.cap_max {
                report.isp_billable.push(Violation {
                    family: ConstraintFamily::IspBillable,
                    user: None,
                    link: i,
                    slot: None,
                    direction: None,
                    excess: flows.z_isp[i] - caps.cap_max,
                });
            }
        }
        report.feasible = report.count() == 0;
        report
    }
}

/// Reports every violated capacity inequality of `scheme`. Demand and
/// "at least one link" constraints hold by encoding and are not re-checked.
pub fn check_feasibility(
    instance: &Instance,
    table: &OptionTable,
    scheme: &AllocationScheme,
) -> Result<FeasibilityReport> {
    let flows = compute_flows(instance, table, scheme)?;
    Ok(FeasibilityReport::from_flows(instance, &flows))
}
