//! The scheduling problem: topology, demands, option encoding, flows,
//! percentile billing, cost, feasibility and the penalized soft loss.

mod allocation;
mod feasibility;
mod flows;
pub mod io;
mod loss;
mod options;
mod topology;

pub use allocation::{Allocation, AllocationScheme, SoftAllocation};
pub use feasibility::{check_feasibility, ConstraintFamily, Direction, FeasibilityReport, Violation};
pub use flows::{billable, compute_flows, exempt_slots, g95, g95_index, total_cost, FlowSummary};
pub use loss::{soft_loss, soft_loss_with_grad, LossWeights};
pub use options::{OptionSet, OptionTable};
pub use topology::{DemandTensor, Instance, LinkCaps, Topology, MAX_LINKS};
