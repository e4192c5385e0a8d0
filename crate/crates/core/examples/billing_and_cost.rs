//! Percentile billing on a hand-built instance: how a scheme turns into link
//! flows, billable bandwidth, cost and a feasibility report.
//!
//! Run with `cargo run --example billing_and_cost`.

use edgecloud::model::{billable, compute_flows, exempt_slots, g95, g95_index, FeasibilityReport};
use edgecloud::{AllocationScheme, DemandTensor, Instance, LinkCaps, OptionTable, Topology};

fn main() -> edgecloud::Result<()> {
    // One user, two peering links, one traffic type, 40 five-minute slots.
    let link = |cap_basic, cap_max, rate| LinkCaps { cap_basic, cap_max, cap_phys: 10_000.0, rate };
    let n_slots = 40;
    let topology = Topology {
        n_users: 1,
        n_slots,
        n_types: 1,
        n_links: 2,
        edge_links: vec![vec![link(10.0, 300.0, 5.0), link(30.0, 300.0, 8.0)]],
        isp_links: vec![link(10.0, 300.0, 6.0), link(30.0, 300.0, 9.0)],
        admissible: vec![vec![0b11]],
    };
    let mut demands = DemandTensor::zeros(1, 1, n_slots);
    for t in 0..n_slots {
        let i = demands.index(0, 0, t);
        // A steady 40 Mbps with two short bursts.
        demands.inbound[i] = if t == 5 || t == 17 { 200.0 } else { 40.0 };
        demands.outbound[i] = 20.0;
    }
    let instance = Instance::new(topology, demands, 0, "hand-built")?;
    let table = OptionTable::build(&instance.topology)?;

    let options = table.set(0, 0);
    println!("{} valid options for the single demand:", options.n_valid());
    for p in 0..options.n_valid() {
        println!("  option {p}: split {:?}", table.weights(0, 0, p));
    }

    println!("\n{} of {n_slots} slots are free of charge per cycle", exempt_slots(n_slots));
    for p in 0..options.n_valid() {
        let scheme = AllocationScheme::uniform_option(n_slots, 1, 1, p as u16);
        let flows = compute_flows(&instance, &table, &scheme)?;
        println!("\noption {p} in every slot: total cost {:.1}", flows.cost_total);
        for i in 0..2 {
            let (inbound, outbound) = (flows.edge_series_in(0, i), flows.edge_series_out(0, i));
            println!(
                "  edge link {i}: peak {:6.1}  billed slot {:?}  g95 in {:6.1}  out {:6.1}  billable {:6.1}",
                inbound.iter().cloned().fold(0.0, f64::max),
                g95_index(inbound),
                g95(inbound)?,
                g95(outbound)?,
                billable(inbound, outbound)?
            );
        }
        let report = FeasibilityReport::from_flows(&instance, &flows);
        println!("  feasible: {} ({} violations)", report.feasible, report.count());
    }
    Ok(())
}
