use rand::Rng;
use serde::{Deserialize, Serialize};

use super::input::{preprocess, InputTensor};
use super::network::GssnModel;
use super::sample::{draw_soft_with_noise, gumbel_noise};
use crate::error::{Error, Result};
use crate::gumbel::{softmax_backward, Temperature};
use crate::model::{soft_loss_with_grad, Instance, LossWeights, OptionTable};
use crate::nn::{grad_check, AdamState, GradCheckConfig, GradCheckReport};
use crate::rng::{self, Stream};

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub tau_start: f64,
    pub tau_end: f64,
    pub loss: LossWeights,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            learning_rate: 1e-4,
            tau_start: 2.0,
            tau_end: 0.31,
            loss: LossWeights::default(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("need at least one epoch".into()));
        }
        if !(self.tau_start >= self.tau_end && self.tau_end > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "temperatures must satisfy start >= end > 0, got {} and {}",
                self.tau_start, self.tau_end
            )));
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig("learning rate must be positive".into()));
        }
        self.loss.validate()
    }
}

/// Temperature of epoch `epoch` (1-based): linear from `tau_start` towards
/// `tau_end`, reaching it at the last epoch.
pub fn tau_schedule(config: &TrainConfig, epoch: usize) -> f64 {
    let frac = epoch as f64 / config.epochs as f64;
    config.tau_start - frac * (config.tau_start - config.tau_end)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub tau: f64,
    /// Mean soft loss over the training instances during the epoch.
    pub train_loss: f64,
    /// Mean soft loss over the validation instances after the epoch.
    pub validation_loss: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochStats>,
}

impl TrainHistory {
    pub fn train_losses(&self) -> Vec<f64> {
        self.epochs.iter().map(|e| e.train_loss).collect()
    }

    pub fn validation_losses(&self) -> Vec<f64> {
        self.epochs.iter().filter_map(|e| e.validation_loss).collect()
    }
}

struct Prepared<'a> {
    instance: &'a Instance,
    table: OptionTable,
    input: InputTensor,
}

fn prepare(instances: &[Instance]) -> Result<Vec<Prepared<'_>>> {
    instances
        .iter()
        .map(|instance| {
            let table = OptionTable::build(&instance.topology)?;
            let input = preprocess(instance, &table);
            Ok(Prepared { instance, table, input })
        })
        .collect()
}

/// Soft loss of one instance under fixed Gumbel noise, and its gradient with
/// respect to every model parameter.
pub fn instance_loss_and_grad(
    model: &GssnModel,
    instance: &Instance,
    table: &OptionTable,
    input: &InputTensor,
    noise: &[f64],
    tau: Temperature,
    weights: LossWeights,
) -> Result<(f64, Vec<f64>)> {
    let (alpha, cache) = model.forward(input)?;
    let soft = draw_soft_with_noise(&alpha, noise, tau)?;
    let (loss, grad_x) = soft_loss_with_grad(instance, table, &soft, weights)?;
    let p_count = alpha.n_options;
    let mut grad_alpha = vec![0.0; alpha.alpha.len()];
    for r in 0..alpha.n_rows() {
        let s = alpha.n_valid[r] as usize;
        let base = r * p_count;
        let ga = &mut grad_alpha[base..base + s];
        softmax_backward(&soft.weights[base..base + s], &grad_x[base..base + s], tau.get(), ga);
        for (g, a) in ga.iter_mut().zip(alpha.valid_row(r)) {
            *g /= a;
        }
    }
    Ok((loss, model.backward(&cache, &grad_alpha)?))
}

fn fixed_noise_loss(
    model: &GssnModel,
    instance: &Instance,
    table: &OptionTable,
    input: &InputTensor,
    noise: &[f64],
    tau: Temperature,
    weights: LossWeights,
) -> Result<f64> {
    let alpha = model.forward_alpha(input)?;
    let soft = draw_soft_with_noise(&alpha, noise, tau)?;
    crate::model::soft_loss(instance, table, &soft, weights)
}

fn soft_loss_only(
    model: &GssnModel,
    p: &Prepared<'_>,
    tau: Temperature,
    weights: LossWeights,
    rng: &mut Stream,
) -> Result<f64> {
    let noise = gumbel_noise(p.input.n_options, &p.input.n_valid, rng);
    fixed_noise_loss(model, p.instance, &p.table, &p.input, &noise, tau, weights)
}

/// Mean soft loss over `instances` at temperature `tau`, one concrete
/// sample per instance.
pub fn mean_soft_loss(
    model: &GssnModel,
    instances: &[Instance],
    tau: f64,
    weights: LossWeights,
    rng: &mut Stream,
) -> Result<f64> {
    let tau = Temperature::new(tau)?;
    let prepared = prepare(instances)?;
    let mut total = 0.0;
    for p in &prepared {
        total += soft_loss_only(model, p, tau, weights, rng)?;
    }
    Ok(total / prepared.len().max(1) as f64)
}

/// Trains `model` with batch size one, one Adam step per instance per epoch.
///
/// Training noise comes from the training stream of `config.seed`; the
/// validation loss is measured after every epoch with the same validation
/// noise each time, so the curve reflects the model rather than the draw.
pub fn train(
    model: &mut GssnModel,
    instances: &[Instance],
    validation: &[Instance],
    config: &TrainConfig,
) -> Result<TrainHistory> {
    config.validate()?;
    if instances.is_empty() {
        return Err(Error::InvalidConfig("need at least one training instance".into()));
    }
    let train_set = prepare(instances)?;
    let val_set = prepare(validation)?;
    let mut rng = rng::stream(config.seed, rng::TRAIN_STREAM);
    let mut adam = AdamState::new(model.n_params(), config.learning_rate);
    let mut params = model.params_flat();
    let mut history = TrainHistory::default();
    for epoch in 1..=config.epochs {
        let tau_value = tau_schedule(config, epoch);
        let tau = Temperature::new(tau_value)?;
        let mut total = 0.0;
        for p in &train_set {
            let noise = gumbel_noise(p.input.n_options, &p.input.n_valid, &mut rng);
            let (loss, grad) = instance_loss_and_grad(model, p.instance, &p.table, &p.input, &noise, tau, config.loss)?;
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::Diverged { epoch, loss });
            }
            total += loss;
            adam.update(&mut params, &grad)?;
            model.set_params_flat(&params)?;
        }
        let train_loss = total / train_set.len() as f64;
        let validation_loss = if val_set.is_empty() {
            None
        } else {
            let mut vrng = rng::stream(config.seed, rng::VALIDATION_STREAM);
            let mut vtotal = 0.0;
            for p in &val_set {
                vtotal += soft_loss_only(model, p, tau, config.loss, &mut vrng)?;
            }
            Some(vtotal / val_set.len() as f64)
        };
        history.epochs.push(EpochStats { epoch, tau: tau_value, train_loss, validation_loss });
    }
    model.temperature = config.tau_end;
    Ok(history)
}

/// Finite-difference check of the full soft-loss gradient with respect to
/// the model parameters, under one fixed noise draw.
pub fn grad_check_model<R: Rng + ?Sized>(
    model: &GssnModel,
    instance: &Instance,
    tau: f64,
    weights: LossWeights,
    config: &GradCheckConfig,
    rng: &mut R,
) -> Result<GradCheckReport> {
    let tau = Temperature::new(tau)?;
    let table = OptionTable::build(&instance.topology)?;
    let input = preprocess(instance, &table);
    let noise = gumbel_noise(input.n_options, &input.n_valid, rng);
    let x0 = model.params_flat();
    let mut probe_f = model.clone();
    let mut probe_g = model.clone();
    let report = grad_check(
        |x| {
            probe_f.set_params_flat(x).expect("same length");
            fixed_noise_loss(&probe_f, instance, &table, &input, &noise, tau, weights).unwrap_or(f64::NAN)
        },
        |x| {
            probe_g.set_params_flat(x).expect("same length");
            instance_loss_and_grad(&probe_g, instance, &table, &input, &noise, tau, weights)
                .map(|r| r.1)
                .unwrap_or_else(|_| vec![f64::NAN; x.len()])
        },
        &x0,
        config,
        rng,
    );
    Ok(report)
}
