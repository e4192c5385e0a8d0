//! Linearized MILP export: the LP file, a warm start built from a sampled
//! scheme, and a solution file read back into a verified scheme.
//!
//! Run with `cargo run --release --example milp_export`.

use edgecloud::baselines::UniformSampler;
use edgecloud::gen::{family_member, family_topology, GenConfig};
use edgecloud::milp::{linearize, read_solution_file, write_lp_file, write_warmstart_file};
use edgecloud::model::OptionTable;
use edgecloud::rng::{self, SAMPLE_STREAM_BASE};
use edgecloud::sampling::best_of;

fn main() -> edgecloud::Result<()> {
    let config = GenConfig { n_users: 2, n_slots: 24, n_types: 3, seed: 21, ..GenConfig::default() };
    let instance = family_member(&family_topology(&config)?, &config, 0)?;
    let model = linearize(&instance)?;
    println!(
        "{}: {} variables ({} binary), {} constraints",
        model.instance_id,
        model.variables.len(),
        model.n_binaries(),
        model.constraints.len()
    );

    let dir = std::env::temp_dir();
    let lp_path = dir.join("edgecloud-example.lp");
    write_lp_file(&model, &lp_path)?;
    println!("wrote {}", lp_path.display());

    // A sampled scheme gives the solver an incumbent to start from.
    let table = OptionTable::build(&instance.topology)?;
    let mut r = rng::stream(config.seed, SAMPLE_STREAM_BASE);
    let sampled = best_of(&UniformSampler::new(&instance, &table), &instance, &table, 200, &mut r)?;
    let Some((scheme, cost)) = sampled.best else {
        println!("no feasible sample to warm-start from");
        return Ok(());
    };
    let start_path = dir.join("edgecloud-example.mst");
    write_warmstart_file(&model, &instance, &scheme, &start_path)?;
    println!("warm start with cost {cost:.3} written to {}", start_path.display());

    // A solver's solution file has the same shape; reading it back decodes
    // the one-hot choices and recomputes the cost independently.
    let imported = read_solution_file(&start_path, &instance)?;
    println!(
        "read back: objective {:.3}, recomputed cost {:.3}, same scheme: {}",
        imported.reported_objective,
        imported.cost,
        imported.scheme == scheme
    );
    Ok(())
}
