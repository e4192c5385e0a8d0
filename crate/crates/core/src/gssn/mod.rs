//! The Gumbel-Softmax sampling network.
//!
//! Pipeline for one instance with `R = T·N·K` demand rows, `P` options and
//! `EL` links:
//!
//! 1. [`preprocess`] builds, for every demand row, a `(P·EL) x 4` block with
//!    columns `[inbound share, outbound share, c_basic, c_max]` of link `j`
//!    under option `p` at row `EL·p + j`. Blocks are stacked t-major, then
//!    user, then type.
//! 2. The *link encoder* maps each 4-vector to a scalar; groups of `EL`
//!    scalars feed the *program encoder*, which scores each option; groups of
//!    `P` option scores feed the *ranking autoencoder*, whose
//!    `ReLU6 + eps` output is the location parameter `alpha` (`R x P`).
//! 3. Training draws masked concrete samples from `alpha` and minimizes the
//!    soft loss with Adam; inference draws exact categorical samples and
//!    keeps the cheapest feasible one.

mod input;
mod io;
mod network;
mod sample;
mod train;

pub use input::{preprocess, InputTensor, INPUT_COLUMNS};
pub use io::{load_model, model_from_str, model_to_string, save_model, MODEL_FORMAT, MODEL_VERSION};
pub use network::{Architecture, GssnCache, GssnModel};
pub use sample::{draw_gumbel_noise, draw_hard, draw_soft, draw_soft_with_noise, AlphaMatrix};
pub use train::{
    grad_check_model, instance_loss_and_grad, mean_soft_loss, tau_schedule, train, EpochStats, TrainConfig,
    TrainHistory,
};
