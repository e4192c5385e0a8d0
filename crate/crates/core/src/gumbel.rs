//! Gumbel noise, concrete (Gumbel-Softmax) samples and rounding.
//!
//! A concrete sample with location `alpha` and temperature `tau` is
//! `softmax((log alpha + G) / tau)` with i.i.d. standard Gumbel `G`. Its
//! argmax is distributed exactly as `alpha / |alpha|_1` for every `tau`, and
//! as `tau -> 0` the sample collapses onto that corner of the simplex.
//!
//! Excluded categories are handled on the logit scale: their logit is
//! shifted by [`MASK_LOGIT`], which underflows to an exact zero weight.

use rand::Rng;

use crate::error::{Error, Result};

/// Uniform draws are clamped to `[UNIFORM_EPS, 1 - UNIFORM_EPS]`.
pub const UNIFORM_EPS: f64 = 1e-12;

/// Additive logit offset for excluded categories.
pub const MASK_LOGIT: f64 = -1e9;

/// Unnormalized category masses; all strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationParams(Vec<f64>);

impl LocationParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidConfig("location parameters need at least one category".into()));
        }
        if alpha.iter().any(|a| !a.is_finite() || *a <= 0.0) {
            return Err(Error::InvalidConfig(format!("location parameters must be positive and finite: {alpha:?}")));
        }
        Ok(LocationParams(alpha))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `alpha / |alpha|_1`.
    pub fn probabilities(&self) -> Vec<f64> {
        let s: f64 = self.0.iter().sum();
        self.0.iter().map(|a| a / s).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Temperature(f64);

impl Temperature {
    pub fn new(tau: f64) -> Result<Self> {
        if tau > 0.0 && tau.is_finite() {
            Ok(Temperature(tau))
        } else {
            Err(Error::InvalidConfig(format!("temperature must be positive, got {tau}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Inverse-CDF Gumbel(0, 1) transform: `-log(-log(u))`.
#[inline]
pub fn gumbel_from_uniform(u: f64) -> f64 {
    let u = u.clamp(UNIFORM_EPS, 1.0 - UNIFORM_EPS);
    -(-u.ln()).ln()
}

#[inline]
pub fn sample_gumbel<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    gumbel_from_uniform(rng.random::<f64>())
}

/// `out = softmax((logits + noise) / tau)`, computed with max subtraction.
pub fn softmax_perturbed(logits: &[f64], noise: &[f64], tau: f64, out: &mut [f64]) {
    debug_assert_eq!(logits.len(), noise.len());
    let mut max = f64::NEG_INFINITY;
    for (o, (l, g)) in out.iter_mut().zip(logits.iter().zip(noise)) {
        *o = (l + g) / tau;
        max = max.max(*o);
    }
    let mut sum = 0.0;
    for o in out.iter_mut() {
        *o = (*o - max).exp();
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}

/// Vector-Jacobian product of [`softmax_perturbed`] with respect to its
/// logits: `d_logit_j = x_j (g_j - <x, g>) / tau`.
pub fn softmax_backward(x: &[f64], grad_x: &[f64], tau: f64, grad_logits: &mut [f64]) {
    let dot: f64 = x.iter().zip(grad_x).map(|(a, b)| a * b).sum();
    for ((gl, &xi), &gi) in grad_logits.iter_mut().zip(x).zip(grad_x) {
        *gl = xi * (gi - dot) / tau;
    }
}

/// One concrete sample on the simplex.
pub fn concrete_sample<R: Rng + ?Sized>(alpha: &LocationParams, tau: Temperature, rng: &mut R) -> Vec<f64> {
    let logits: Vec<f64> = alpha.0.iter().map(|a| a.ln()).collect();
    let noise: Vec<f64> = (0..logits.len()).map(|_| sample_gumbel(rng)).collect();
    let mut out = vec![0.0; logits.len()];
    softmax_perturbed(&logits, &noise, tau.0, &mut out);
    out
}

/// Concrete sample restricted to `allowed` categories; the rest get weight 0.
pub fn masked_concrete_sample<R: Rng + ?Sized>(
    alpha: &[f64],
    allowed: &[bool],
    tau: Temperature,
    rng: &mut R,
) -> Vec<f64> {
    let logits: Vec<f64> = alpha.iter().zip(allowed).map(|(&a, &ok)| if ok { a.ln() } else { MASK_LOGIT }).collect();
    let noise: Vec<f64> = (0..logits.len()).map(|_| sample_gumbel(rng)).collect();
    let mut out = vec![0.0; logits.len()];
    softmax_perturbed(&logits, &noise, tau.0, &mut out);
    out
}

/// Index of the largest coordinate; ties go to the lowest index.
pub fn round_onehot(x: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in x.iter().enumerate().skip(1) {
        if v > x[best] {
            best = i;
        }
    }
    best
}

/// Exact categorical draw with probabilities proportional to `weights`
/// (nonnegative, not all zero).
pub fn categorical_from_weights<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = i;
            if target < acc {
                return i;
            }
        }
    }
    last
}

pub fn categorical_sample<R: Rng + ?Sized>(alpha: &LocationParams, rng: &mut R) -> usize {
    categorical_from_weights(&alpha.0, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn gumbel_of_inverse_e_is_zero() {
        assert!(gumbel_from_uniform((-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn gumbel_is_increasing_and_finite_at_the_ends() {
        let us = [0.0, 1e-13, 0.1, 0.5, 0.9, 1.0 - 1e-13, 1.0];
        let gs: Vec<f64> = us.iter().map(|&u| gumbel_from_uniform(u)).collect();
        assert!(gs.iter().all(|g| g.is_finite()));
        assert!(gs.windows(2).all(|w| w[0] <= w[1]));
        assert!(gumbel_from_uniform(0.3) < gumbel_from_uniform(0.31));
    }

    #[test]
    fn single_category_is_certain() {
        let mut r = rng::stream(0, 0);
        let a = LocationParams::new(vec![3.0]).unwrap();
        let t = Temperature::new(0.5).unwrap();
        for _ in 0..10 {
            assert_eq!(concrete_sample(&a, t, &mut r), vec![1.0]);
            assert_eq!(categorical_sample(&a, &mut r), 0);
        }
    }

    #[test]
    fn concrete_samples_lie_in_the_open_simplex() {
        let mut r = rng::stream(1, 0);
        let a = LocationParams::new(vec![1.0, 2.0, 3.0]).unwrap();
        let t = Temperature::new(1.0).unwrap();
        for _ in 0..1000 {
            let x = concrete_sample(&a, t, &mut r);
            assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(x.iter().all(|&v| v > 0.0 && v < 1.0));
        }
    }

    #[test]
    fn rounding_examples() {
        assert_eq!(round_onehot(&[0.2, 0.5, 0.3]), 1);
        assert_eq!(round_onehot(&[0.5, 0.5]), 0);
    }

    #[test]
    fn masked_categories_get_exact_zero() {
        let mut r = rng::stream(2, 0);
        let t = Temperature::new(2.0).unwrap();
        let x = masked_concrete_sample(&[1.0, 5.0, 1.0], &[true, false, true], t, &mut r);
        assert_eq!(x[1], 0.0);
    }

    #[test]
    fn softmax_backward_matches_finite_differences() {
        let logits = [0.3, -1.2, 0.8, 0.1];
        let noise = [0.5, 0.2, -0.4, 1.1];
        let g = [1.0, -2.0, 0.5, 3.0];
        let tau = 0.7;
        let mut x = [0.0; 4];
        softmax_perturbed(&logits, &noise, tau, &mut x);
        let mut gl = [0.0; 4];
        softmax_backward(&x, &g, tau, &mut gl);
        let f = |l: &[f64]| {
            let mut y = [0.0; 4];
            softmax_perturbed(l, &noise, tau, &mut y);
            y.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>()
        };
        for j in 0..4 {
            let h = 1e-6;
            let mut lp = logits;
            let mut lm = logits;
            lp[j] += h;
            lm[j] -= h;
            let fd = (f(&lp) - f(&lm)) / (2.0 * h);
            assert!((fd - gl[j]).abs() < 1e-8, "{j}: {fd} vs {}", gl[j]);
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(LocationParams::new(vec![1.0, 0.0]).is_err());
        assert!(LocationParams::new(vec![]).is_err());
        assert!(Temperature::new(0.0).is_err());
    }
}
