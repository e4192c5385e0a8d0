use rand::Rng;

use crate::error::{Error, Result};
use crate::gumbel::{categorical_from_weights, sample_gumbel, softmax_perturbed, Temperature};
use crate::model::{AllocationScheme, SoftAllocation};
use crate::sampling::SchemeSampler;

/// Location parameters, `(T·N·K) x P`, rows t-major then user then type.
///
/// Only the first `n_valid[row]` options of a row can be sampled; the rest
/// are padding and carry no probability mass.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMatrix {
    pub n_slots: usize,
    pub n_users: usize,
    pub n_types: usize,
    pub n_options: usize,
    pub alpha: Vec<f64>,
    pub n_valid: Vec<u16>,
}

impl AlphaMatrix {
    pub fn n_rows(&self) -> usize {
        self.n_valid.len()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.alpha[r * self.n_options..(r + 1) * self.n_options]
    }

    /// The sampleable part of row `r`.
    pub fn valid_row(&self, r: usize) -> &[f64] {
        &self.row(r)[..self.n_valid[r] as usize]
    }

    /// Sampling distribution of row `r` (zeros on padded options).
    pub fn probabilities(&self, r: usize) -> Vec<f64> {
        let valid = self.valid_row(r);
        let total: f64 = valid.iter().sum();
        let mut p = vec![0.0; self.n_options];
        for (o, a) in p.iter_mut().zip(valid) {
            *o = a / total;
        }
        p
    }
}

/// Standard Gumbel noise for every valid entry, row by row; padded entries
/// are left at zero and never read.
pub fn draw_gumbel_noise<R: Rng + ?Sized>(alpha: &AlphaMatrix, rng: &mut R) -> Vec<f64> {
    gumbel_noise(alpha.n_options, &alpha.n_valid, rng)
}

pub(crate) fn gumbel_noise<R: Rng + ?Sized>(n_options: usize, n_valid: &[u16], rng: &mut R) -> Vec<f64> {
    let mut noise = vec![0.0; n_valid.len() * n_options];
    for (r, &s) in n_valid.iter().enumerate() {
        for g in &mut noise[r * n_options..r * n_options + s as usize] {
            *g = sample_gumbel(rng);
        }
    }
    noise
}

/// Masked concrete sample with explicit noise: on valid options of each
/// row `X = softmax((log alpha + G) / tau)`, zero elsewhere.
pub fn draw_soft_with_noise(alpha: &AlphaMatrix, noise: &[f64], tau: Temperature) -> Result<SoftAllocation> {
    if noise.len() != alpha.alpha.len() {
        return Err(Error::Shape("noise does not match alpha".into()));
    }
    let mut soft = SoftAllocation::zeros(alpha.n_slots, alpha.n_users, alpha.n_types, alpha.n_options);
    let mut logits = vec![0.0; alpha.n_options];
    for r in 0..alpha.n_rows() {
        let s = alpha.n_valid[r] as usize;
        let base = r * alpha.n_options;
        for (l, a) in logits[..s].iter_mut().zip(alpha.valid_row(r)) {
            *l = a.ln();
        }
        softmax_perturbed(&logits[..s], &noise[base..base + s], tau.get(), &mut soft.weights[base..base + s]);
    }
    Ok(soft)
}

/// Masked concrete sample of every row.
pub fn draw_soft<R: Rng + ?Sized>(alpha: &AlphaMatrix, tau: Temperature, rng: &mut R) -> SoftAllocation {
    let noise = draw_gumbel_noise(alpha, rng);
    draw_soft_with_noise(alpha, &noise, tau).expect("noise shaped from alpha")
}

/// Exact categorical draw of every row over its valid options.
pub fn draw_hard<R: Rng + ?Sized>(alpha: &AlphaMatrix, rng: &mut R) -> AllocationScheme {
    let option = (0..alpha.n_rows()).map(|r| categorical_from_weights(alpha.valid_row(r), rng) as u16).collect();
    AllocationScheme { n_slots: alpha.n_slots, n_users: alpha.n_users, n_types: alpha.n_types, option }
}

impl SchemeSampler for AlphaMatrix {
    fn sample(&self, rng: &mut crate::rng::Stream) -> AllocationScheme {
        draw_hard(self, rng)
    }
}
