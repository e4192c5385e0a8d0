//! Exhaustive search on a tiny instance, compared with best-of-N uniform
//! sampling, plus the budget guard that refuses oversized searches.
//!
//! Run with `cargo run --release --example brute_force_oracle`.

use rand::Rng;

use edgecloud::baselines::{brute_force, combination_count, BruteForceBudget, UniformSampler};
use edgecloud::gen::{family_member, family_topology, GenConfig};
use edgecloud::rng::{self, SAMPLE_STREAM_BASE};
use edgecloud::sampling::best_of;
use edgecloud::{DemandTensor, Instance, LinkCaps, OptionTable, Topology};

/// One user, two links with small basic capacities, two traffic types that
/// may use either link, and bursty demands over six slots.
fn tiny_instance(seed: u64) -> edgecloud::Result<Instance> {
    let mut r = rng::stream(seed, 0);
    let mut link = |rate| LinkCaps { cap_basic: r.random_range(10.0..30.0), cap_max: 200.0, cap_phys: 10_000.0, rate };
    let edge = vec![link(5.0), link(8.0)];
    let isp = vec![link(6.0), link(9.0)];
    let topology = Topology {
        n_users: 1,
        n_slots: 6,
        n_types: 2,
        n_links: 2,
        edge_links: vec![edge],
        isp_links: isp,
        admissible: vec![vec![0b11]; 2],
    };
    let mut demands = DemandTensor::zeros(2, 1, 6);
    for d in demands.inbound.iter_mut().chain(demands.outbound.iter_mut()) {
        *d = r.random_range(0.0..40.0);
    }
    Instance::new(topology, demands, seed, format!("tiny-{seed}"))
}

fn main() -> edgecloud::Result<()> {
    let instance = tiny_instance(11)?;
    let table = OptionTable::build(&instance.topology)?;
    println!("search space: {} complete schemes", combination_count(&instance, &table));

    let oracle = brute_force(&instance, BruteForceBudget::default())?;
    match &oracle.best {
        Some((scheme, cost)) => {
            println!("optimum {cost:.3} ({} schemes evaluated), options {:?}", oracle.n_evaluated, scheme.option)
        }
        None => println!("no feasible scheme exists"),
    }

    for n in [1, 10, 100, 1000] {
        let mut r = rng::stream(11, SAMPLE_STREAM_BASE);
        let result = best_of(&UniformSampler::new(&instance, &table), &instance, &table, n, &mut r)?;
        println!("uniform best of {n:4}: {:.3}", result.best_cost().unwrap_or(f64::NAN));
    }

    let big = GenConfig { seed: 11, ..GenConfig::default() };
    let big = family_member(&family_topology(&big)?, &big, 0)?;
    if let Err(e) = brute_force(&big, BruteForceBudget::default()) {
        println!("full-size instance: {e}");
    }
    Ok(())
}
