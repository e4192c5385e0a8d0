//! Train once on short cycles, then evaluate on longer cycles of the same
//! topology against the uniform baseline.
//!
//! Run with `cargo run --release --example generalization_sweep`.

use edgecloud::bench::{generalize, write_sweep_csv, Axis, SweepConfig};
use edgecloud::gen::{family_member, family_topology, GenConfig};
use edgecloud::gssn::{train, Architecture, GssnModel, TrainConfig};
use edgecloud::rng;

fn main() -> edgecloud::Result<()> {
    let gen = GenConfig { n_users: 4, n_slots: 12, seed: 8, ..GenConfig::default() };
    let topology = family_topology(&gen)?;
    let train_set = (0..20).map(|j| family_member(&topology, &gen, j)).collect::<Result<Vec<_>, _>>()?;

    let config = TrainConfig { epochs: 50, seed: 8, ..TrainConfig::default() };
    let mut model = GssnModel::init(Architecture::default(), &mut rng::stream(config.seed, rng::INIT_STREAM))?;
    train(&mut model, &train_set, &[], &config)?;

    let sweep =
        SweepConfig { axis: Axis::Slots, grid: vec![12, 24, 48], per_point: 10, samples: 50, gen, first_member: 1000 };
    let points = generalize(&model, &sweep, 8)?;
    for p in &points {
        println!(
            "T = {:3}  {:>4}: mean cost {:9.1}  std {:8.1}  SSFR {:.3}  PFR {:.3}",
            p.value,
            p.policy,
            p.mean_cost.unwrap_or(f64::NAN),
            p.std_cost.unwrap_or(f64::NAN),
            p.ssfr,
            p.pfr
        );
    }
    println!();
    write_sweep_csv(&points, std::io::stdout())
}
