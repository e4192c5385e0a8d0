//! Benchmarks: best-of-M sampling over instance sets, feasibility rates and
//! generalization sweeps.
//!
//! For `N` problems sampled `M` times each, with `L` feasible samples in
//! total and `S` problems having at least one feasible sample:
//! `SSFR = L / (M·N)` and `PFR = S / N`. Since a problem contributes at most
//! `M` feasible samples, `SSFR ≤ PFR` always.
//!
//! Instance `j` of a run is sampled from stream `SAMPLE_STREAM_BASE + j` of
//! the run seed, so results do not depend on evaluation order.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines::UniformSampler;
use crate::error::{Error, Result};
use crate::gen::{family_member, family_topology, generate_independent, GenConfig};
use crate::gssn::{preprocess, GssnModel};
use crate::model::{Instance, OptionTable};
use crate::rng::{self, SAMPLE_STREAM_BASE};
use crate::sampling::{best_of, BestOf};

/// Which sampler drives a benchmark.
#[derive(Debug, Clone, Copy)]
pub enum Policy<'a> {
    Gssn(&'a GssnModel),
    Rsn,
}

impl Policy<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::Gssn(_) => "gssn",
            Policy::Rsn => "rsn",
        }
    }
}

/// Best-of-`n_samples` for one instance under a policy.
pub fn run_policy(policy: Policy<'_>, instance: &Instance, n_samples: usize, rng: &mut rng::Stream) -> Result<BestOf> {
    let table = OptionTable::build(&instance.topology)?;
    match policy {
        Policy::Gssn(model) => {
            let alpha = model.forward_alpha(&preprocess(instance, &table))?;
            best_of(&alpha, instance, &table, n_samples, rng)
        }
        Policy::Rsn => best_of(&UniformSampler::new(instance, &table), instance, &table, n_samples, rng),
    }
}

/// Per-instance benchmark row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceResult {
    pub id: String,
    pub policy: String,
    pub best_cost: Option<f64>,
    pub n_samples: usize,
    pub n_feasible: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub policy: String,
    pub rows: Vec<InstanceResult>,
    /// Mean of best feasible costs over instances that have one.
    pub mean_cost: Option<f64>,
    /// Sample standard deviation of the same costs.
    pub std_cost: Option<f64>,
    pub ssfr: f64,
    pub pfr: f64,
}

/// Mean and sample standard deviation (`n - 1` denominator).
pub fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (Some(mean), Some(std))
}

impl BenchReport {
    /// Aggregates per-instance rows.
    pub fn from_rows(policy: &str, rows: Vec<InstanceResult>) -> Self {
        let costs: Vec<f64> = rows.iter().filter_map(|r| r.best_cost).collect();
        let (mean_cost, std_cost) = mean_std(&costs);
        let total_samples: usize = rows.iter().map(|r| r.n_samples).sum();
        let feasible_samples: usize = rows.iter().map(|r| r.n_feasible).sum();
        let solved = rows.iter().filter(|r| r.n_feasible > 0).count();
        let ssfr = if total_samples == 0 { 0.0 } else { feasible_samples as f64 / total_samples as f64 };
        let pfr = if rows.is_empty() { 0.0 } else { solved as f64 / rows.len() as f64 };
        BenchReport { policy: policy.to_string(), rows, mean_cost, std_cost, ssfr, pfr }
    }

    /// Writes the per-instance CSV: `id,policy,best_cost,n_samples,n_feasible`
    /// plus `seconds` when `with_timing` is set. Without timing, reruns with
    /// the same seed produce identical bytes.
    pub fn write_csv<W: Write>(&self, out: W, with_timing: bool) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::format("bench CSV", e.to_string());
        let mut header = vec!["id", "policy", "best_cost", "n_samples", "n_feasible"];
        if with_timing {
            header.push("seconds");
        }
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec = vec![
                r.id.clone(),
                r.policy.clone(),
                r.best_cost.map(|c| c.to_string()).unwrap_or_default(),
                r.n_samples.to_string(),
                r.n_feasible.to_string(),
            ];
            if with_timing {
                rec.push(format!("{:.6}", r.seconds));
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::format("bench CSV", e.to_string()))?;
        Ok(())
    }
}

/// Runs best-of-`n_samples` on every instance.
pub fn bench(instances: &[Instance], policy: Policy<'_>, n_samples: usize, seed: u64) -> Result<BenchReport> {
    if n_samples == 0 {
        return Err(Error::InvalidConfig("samples per problem must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(instances.len());
    for (j, instance) in instances.iter().enumerate() {
        let mut rng = rng::stream(seed, SAMPLE_STREAM_BASE + j as u64);
        let start = Instant::now();
        let result = run_policy(policy, instance, n_samples, &mut rng)?;
        rows.push(InstanceResult {
            id: instance.id.clone(),
            policy: policy.name().to_string(),
            best_cost: result.best_cost(),
            n_samples,
            n_feasible: result.n_feasible,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(BenchReport::from_rows(policy.name(), rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Fixed static parameters, varying slot count, fresh demands.
    Slots,
    /// Varying user count, static and dynamic parameters all resampled.
    Users,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub axis: Axis,
    pub grid: Vec<usize>,
    pub per_point: usize,
    pub samples: usize,
    /// Base generator settings; the swept dimension is overridden per point.
    pub gen: GenConfig,
    /// Index of the first family member used on the slots axis, so that
    /// sweep instances can be kept apart from training members.
    pub first_member: usize,
}

/// One point of a generalization curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub axis: Axis,
    pub value: usize,
    pub policy: String,
    pub mean_cost: Option<f64>,
    pub std_cost: Option<f64>,
    pub ssfr: f64,
    pub pfr: f64,
    pub n_instances: usize,
}

/// Instances of one grid point.
pub fn sweep_instances(config: &SweepConfig, value: usize) -> Result<Vec<Instance>> {
    match config.axis {
        Axis::Slots => {
            let topology = family_topology(&config.gen)?.with_slots(value);
            let gen = GenConfig { n_slots: value, ..config.gen.clone() };
            (0..config.per_point).map(|j| family_member(&topology, &gen, config.first_member + j)).collect()
        }
        Axis::Users => {
            let gen = GenConfig {
                n_users: value,
                seed: rng::derive_seed(config.gen.seed, value as u64),
                ..config.gen.clone()
            };
            generate_independent(&gen, config.per_point)
        }
    }
}

/// Evaluates GSSN and RSN on every grid point.
pub fn generalize(model: &GssnModel, config: &SweepConfig, seed: u64) -> Result<Vec<SweepPoint>> {
    if config.grid.is_empty() {
        return Err(Error::InvalidConfig("generalization grid is empty".into()));
    }
    let mut points = Vec::new();
    for &value in &config.grid {
        let instances = sweep_instances(config, value)?;
        let point_seed = rng::derive_seed(seed, value as u64);
        for policy in [Policy::Gssn(model), Policy::Rsn] {
            let report = bench(&instances, policy, config.samples, point_seed)?;
            points.push(SweepPoint {
                axis: config.axis,
                value,
                policy: report.policy.clone(),
                mean_cost: report.mean_cost,
                std_cost: report.std_cost,
                ssfr: report.ssfr,
                pfr: report.pfr,
                n_instances: instances.len(),
            });
        }
    }
    Ok(points)
}

/// Writes sweep points as CSV:
/// `axis,value,policy,mean_cost,std_cost,ssfr,pfr,n_instances`.
pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::format("sweep CSV", e.to_string());
    w.write_record(["axis", "value", "policy", "mean_cost", "std_cost", "ssfr", "pfr", "n_instances"])
        .map_err(csv_err)?;
    for p in points {
        let axis = match p.axis {
            Axis::Slots => "slots",
            Axis::Users => "users",
        };
        w.write_record([
            axis.to_string(),
            p.value.to_string(),
            p.policy.clone(),
            p.mean_cost.map(|c| c.to_string()).unwrap_or_default(),
            p.std_cost.map(|c| c.to_string()).unwrap_or_default(),
            p.ssfr.to_string(),
            p.pfr.to_string(),
            p.n_instances.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::format("sweep CSV", e.to_string()))?;
    Ok(())
}
