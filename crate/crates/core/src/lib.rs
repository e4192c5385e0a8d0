//! Edge-cloud traffic scheduling under 95th-percentile (burstable) billing.
//!
//! The crate models the allocation of typed traffic demands onto admissible
//! peering links as a family of integer programs, and solves them with a
//! Gumbel-Softmax sampling network (GSSN) trained without labels on a
//! penalized soft loss. Around that core it provides:
//!
//! - [`model`]: option encoding, flow splitting, percentile billing, cost,
//!   feasibility and the soft loss with its subgradient.
//! - [`gen`]: reproducible synthetic topologies and demand tensors.
//! - [`gumbel`]: Gumbel noise, concrete (Gumbel-Softmax) samples, rounding.
//! - [`nn`]: a small dense-network engine with ReLU6, Adam and gradient checks.
//! - [`gssn`]: preprocessing, the three encoders, training and best-of-N inference.
//! - [`sampling`]: best-of-N selection shared by all samplers.
//! - [`baselines`]: the uniform random sampler and an exhaustive oracle.
//! - [`milp`]: linearized MILP export (LP format), warm starts, solution import.
//! - [`bench`]: SSFR/PFR benchmarks and generalization sweeps.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod baselines;
pub mod bench;
pub mod error;
pub mod gen;
pub mod gssn;
pub mod gumbel;
pub mod milp;
pub mod model;
pub mod nn;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
pub use model::{
    AllocationScheme, DemandTensor, FeasibilityReport, FlowSummary, Instance, LinkCaps, LossWeights, OptionTable,
    SoftAllocation, Topology,
};
