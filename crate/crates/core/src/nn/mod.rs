//! A small dense-network engine: batched MLPs with ReLU6, hand-written
//! reverse-mode gradients, Adam, and finite-difference gradient checks.

mod adam;
mod gradcheck;
mod mlp;

pub use adam::AdamState;
pub use gradcheck::{grad_check, CoordCheck, GradCheckConfig, GradCheckReport};
pub use mlp::{relu6, relu6_grad, DenseSpec, ForwardCache, Mlp, OutputTransform};
