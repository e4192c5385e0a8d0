//! Finite-difference check of the soft-loss gradient through the whole
//! network, the Gumbel-Softmax relaxation and the percentile cost.
//!
//! Run with `cargo run --release --example gradient_check`.

use edgecloud::gen::{family_member, family_topology, GenConfig};
use edgecloud::gssn::{grad_check_model, Architecture, GssnModel};
use edgecloud::model::LossWeights;
use edgecloud::nn::GradCheckConfig;
use edgecloud::rng;

fn main() -> edgecloud::Result<()> {
    // Desk-scale instance: enough demand that the cost terms are active.
    let config = GenConfig { n_users: 4, n_slots: 12, seed: 4, ..GenConfig::default() };
    let instance = family_member(&family_topology(&config)?, &config, 0)?;
    let model = GssnModel::init(Architecture::default(), &mut rng::stream(4, rng::INIT_STREAM))?;
    println!("{} parameters", model.n_params());

    // A larger instance has many percentile and clamp kinks; a smaller step
    // and a few more retries keep the stencils clear of them.
    let check = GradCheckConfig { n_coords: 40, step: 1e-6, max_retries: 10, ..GradCheckConfig::default() };
    let report = grad_check_model(&model, &instance, 1.0, LossWeights::default(), &check, &mut rng::stream(4, 1))?;
    for c in report.coords.iter().filter(|c| c.analytic != 0.0 || c.numeric != 0.0) {
        println!(
            "  param {:5}: analytic {:+.6e}  numeric {:+.6e}  rel err {:.1e}{}",
            c.index,
            c.analytic,
            c.numeric,
            c.rel_err,
            if c.retries > 0 { " (moved off a kink)" } else { "" }
        );
    }
    let zeros = report.coords.iter().filter(|c| c.analytic == 0.0 && c.numeric == 0.0).count();
    println!("{zeros} coordinates have zero gradient on both sides (inactive ReLU6 units)");
    println!("max relative error {:.2e}, passed: {}", report.max_rel_err, report.passed);
    Ok(())
}
