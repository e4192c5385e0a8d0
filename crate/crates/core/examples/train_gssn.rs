//! Train a sampling network on a small instance family and compare it with
//! the uniform random baseline on held-out members.
//!
//! Run with `cargo run --release --example train_gssn`.

use edgecloud::bench::{bench, Policy};
use edgecloud::gen::{family_member, family_topology, GenConfig};
use edgecloud::gssn::{train, Architecture, GssnModel, TrainConfig};
use edgecloud::rng;

fn main() -> edgecloud::Result<()> {
    let gen = GenConfig { n_users: 4, n_slots: 12, seed: 7, ..GenConfig::default() };
    let topology = family_topology(&gen)?;
    let train_set = (0..20).map(|j| family_member(&topology, &gen, j)).collect::<Result<Vec<_>, _>>()?;
    let held_out = (20..40).map(|j| family_member(&topology, &gen, j)).collect::<Result<Vec<_>, _>>()?;

    let config = TrainConfig { seed: 7, ..TrainConfig::default() };
    let mut model = GssnModel::init(Architecture::default(), &mut rng::stream(config.seed, rng::INIT_STREAM))?;
    let history = train(&mut model, &train_set, &held_out, &config)?;
    for e in history.epochs.iter().filter(|e| e.epoch % 10 == 0 || e.epoch == 1) {
        println!(
            "epoch {:3}  tau {:.3}  train loss {:10.2}  held-out loss {:10.2}",
            e.epoch,
            e.tau,
            e.train_loss,
            e.validation_loss.unwrap_or(f64::NAN)
        );
    }

    for policy in [Policy::Gssn(&model), Policy::Rsn] {
        let report = bench(&held_out, policy, 100, 99)?;
        println!(
            "{:>4}: mean best-of-100 cost {:9.2}  std {:8.2}  SSFR {:.3}  PFR {:.3}",
            report.policy,
            report.mean_cost.unwrap_or(f64::NAN),
            report.std_cost.unwrap_or(f64::NAN),
            report.ssfr,
            report.pfr
        );
    }
    Ok(())
}
