//! Best-of-N selection: draw many hard schemes, drop the infeasible ones and
//! keep the cheapest, for both the uniform sampler and a sampling network.
//!
//! Run with `cargo run --release --example best_of_sampling`.

use edgecloud::baselines::UniformSampler;
use edgecloud::gen::{family_member, family_topology, GenConfig};
use edgecloud::gssn::{preprocess, Architecture, GssnModel};
use edgecloud::model::OptionTable;
use edgecloud::rng::{self, SAMPLE_STREAM_BASE};
use edgecloud::sampling::{best_of, BestOf};

fn summary(name: &str, result: &BestOf) {
    let costs = &result.feasible_costs;
    let mean = costs.iter().sum::<f64>() / costs.len().max(1) as f64;
    println!(
        "{name:>22}: {}/{} feasible, mean feasible cost {mean:9.1}, best {:9.1}",
        result.n_feasible,
        result.n_samples,
        result.best_cost().unwrap_or(f64::NAN)
    );
}

fn main() -> edgecloud::Result<()> {
    let config = GenConfig { n_users: 4, n_slots: 24, seed: 3, ..GenConfig::default() };
    let instance = family_member(&family_topology(&config)?, &config, 0)?;
    let table = OptionTable::build(&instance.topology)?;

    for n in [1, 10, 100, 1000] {
        let mut r = rng::stream(config.seed, SAMPLE_STREAM_BASE);
        let result = best_of(&UniformSampler::new(&instance, &table), &instance, &table, n, &mut r)?;
        summary(&format!("uniform, best of {n}"), &result);
    }

    // An untrained network already proposes a per-demand distribution; the
    // same selection loop runs on its location parameters.
    let model = GssnModel::init(Architecture::default(), &mut rng::stream(config.seed, rng::INIT_STREAM))?;
    let alpha = model.forward_alpha(&preprocess(&instance, &table))?;
    println!("first demand's option probabilities: {:.3?}", alpha.probabilities(0));
    let mut r = rng::stream(config.seed, SAMPLE_STREAM_BASE + 1);
    let result = best_of(&alpha, &instance, &table, 100, &mut r)?;
    summary("untrained, best of 100", &result);
    Ok(())
}
