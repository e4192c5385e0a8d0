//! Reproducible synthetic instances: a family sharing one topology, an
//! independent batch, and a save/load round trip.
//!
//! Run with `cargo run --example generate_instances`.

use edgecloud::gen::{family_member, family_topology, generate_independent, GenConfig};
use edgecloud::model::io::{read_instance, write_instance};
use edgecloud::model::{compute_flows, OptionTable};
use edgecloud::AllocationScheme;

fn main() -> edgecloud::Result<()> {
    let config = GenConfig { n_users: 3, n_slots: 24, seed: 42, ..GenConfig::default() };

    // Family members share links and admissible sets; only demands differ.
    let topology = family_topology(&config)?;
    println!(
        "family topology: {} users, {} links, {} traffic types",
        topology.n_users, topology.n_links, topology.n_types
    );
    for (n, row) in topology.edge_links.iter().enumerate() {
        let caps: Vec<String> = row.iter().map(|l| format!("{:.0}/{:.0}", l.cap_basic, l.cap_max)).collect();
        println!("  user {n} basic/max capacities: {}", caps.join("  "));
    }
    for j in 0..3 {
        let inst = family_member(&topology, &config, j)?;
        let total: f64 = inst.demands.inbound.iter().sum();
        println!("  member {j} ({}): total inbound demand {total:.0} Mbps", inst.id);
    }

    // Independent instances redraw every static parameter too.
    for inst in generate_independent(&config, 3)? {
        let isp: Vec<String> = inst.topology.isp_links.iter().map(|l| format!("{:.0}", l.cap_max)).collect();
        println!("independent {}: ISP max capacities {}", inst.id, isp.join(" "));
    }

    // Files round-trip exactly, so costs recomputed after loading match.
    let inst = family_member(&topology, &config, 0)?;
    let path = std::env::temp_dir().join("edgecloud-example-instance.txt");
    write_instance(&inst, &path)?;
    let loaded = read_instance(&path)?;
    let table = OptionTable::build(&inst.topology)?;
    let scheme =
        AllocationScheme::uniform_option(inst.topology.n_slots, inst.topology.n_users, inst.topology.n_types, 0);
    let before = compute_flows(&inst, &table, &scheme)?.cost_total;
    let after = compute_flows(&loaded, &table, &scheme)?.cost_total;
    println!("saved to {}; cost before {before:.3}, after reload {after:.3}", path.display());
    Ok(())
}
