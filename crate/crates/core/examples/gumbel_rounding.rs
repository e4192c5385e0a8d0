//! Concrete (Gumbel-Softmax) samples: how the temperature trades smoothness
//! for sharpness while the rounded choice keeps the categorical law.
//!
//! Run with `cargo run --release --example gumbel_rounding`.

use edgecloud::gumbel::{concrete_sample, round_onehot, LocationParams, Temperature};
use edgecloud::rng;

fn main() -> edgecloud::Result<()> {
    let alpha = LocationParams::new(vec![1.0, 2.0, 3.0, 4.0])?;
    println!("target probabilities {:?}", alpha.probabilities());
    let mut r = rng::stream(5, 0);

    for tau in [5.0, 1.0, 0.5, 0.1, 0.01] {
        let temperature = Temperature::new(tau)?;
        let n = 50_000;
        let (mut counts, mut top_mass) = ([0usize; 4], 0.0);
        for _ in 0..n {
            let x = concrete_sample(&alpha, temperature, &mut r);
            top_mass += x.iter().cloned().fold(0.0, f64::max);
            counts[round_onehot(&x)] += 1;
        }
        let freq: Vec<String> = counts.iter().map(|&c| format!("{:.3}", c as f64 / n as f64)).collect();
        println!(
            "tau {tau:5.2}: mean largest coordinate {:.3}, argmax frequencies [{}]",
            top_mass / n as f64,
            freq.join(", ")
        );
    }

    let x = concrete_sample(&alpha, Temperature::new(0.5)?, &mut r);
    println!("one sample at tau 0.5: {x:.3?} -> option {}", round_onehot(&x));
    Ok(())
}
