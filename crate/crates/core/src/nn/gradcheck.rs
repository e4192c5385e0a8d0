use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::uniform;

/// Settings for a finite-difference gradient check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradCheckConfig {
    /// Number of coordinates to sample (all of them if larger than the dimension).
    pub n_coords: usize,
    /// Central-difference step.
    pub step: f64,
    /// Maximum accepted relative error.
    pub tolerance: f64,
    /// How often to move to a nearby point when a kink is detected.
    pub max_retries: usize,
    /// Relative size of the random move applied on a retry.
    pub jitter: f64,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        GradCheckConfig { n_coords: 20, step: 1e-5, tolerance: 1e-3, max_retries: 3, jitter: 1e-3 }
    }
}

/// Outcome for one checked coordinate.
#[derive(Debug, Clone, Serialize)]
pub struct CoordCheck {
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_err: f64,
    pub retries: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradCheckReport {
    pub coords: Vec<CoordCheck>,
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Relative error with a denominator floored just above finite-difference
/// round-off, which scales with the magnitude of the function value.
fn rel_err(a: f64, n: f64, fx: f64) -> f64 {
    let floor = 1e-9 * fx.abs().max(1.0);
    (a - n).abs() / a.abs().max(n.abs()).max(floor)
}

/// Compare `grad(x)` against central differences of `f` on randomly chosen
/// coordinates.
///
/// When a coordinate disagrees and its one-sided differences disagree with
/// each other as well, the function has a kink (an order-statistic tie or a
/// clamp boundary) inside the stencil; the whole point is then jittered and
/// the coordinate re-checked, up to `max_retries` times.
pub fn grad_check<F, G, R>(mut f: F, mut grad: G, x0: &[f64], cfg: &GradCheckConfig, rng: &mut R) -> GradCheckReport
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Vec<f64>,
    R: Rng + ?Sized,
{
    let dim = x0.len();
    let picks = sample(rng, dim, cfg.n_coords.min(dim)).into_vec();
    let mut coords = Vec::with_capacity(picks.len());
    let h = cfg.step;
    for index in picks {
        let mut x = x0.to_vec();
        let mut retries = 0;
        loop {
            let fx = f(&x);
            let analytic = grad(&x)[index];
            let orig = x[index];
            x[index] = orig + h;
            let fp = f(&x);
            x[index] = orig - h;
            let fm = f(&x);
            x[index] = orig;
            let numeric = (fp - fm) / (2.0 * h);
            let err = rel_err(analytic, numeric, fx);
            let forward = (fp - fx) / h;
            let backward = (fx - fm) / h;
            let kink = rel_err(forward, backward, fx) > cfg.tolerance;
            if err <= cfg.tolerance || !kink || retries >= cfg.max_retries {
                coords.push(CoordCheck { index, analytic, numeric, rel_err: err, retries });
                break;
            }
            retries += 1;
            for v in x.iter_mut() {
                let scale = cfg.jitter * v.abs().max(1e-2);
                *v += uniform(rng, -scale, scale);
            }
        }
    }
    let max_rel_err = coords.iter().map(|c| c.rel_err).fold(0.0, f64::max);
    GradCheckReport { passed: max_rel_err <= cfg.tolerance, max_rel_err, tolerance: cfg.tolerance, coords }
}
