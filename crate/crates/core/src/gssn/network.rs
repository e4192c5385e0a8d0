use rand::Rng;
use serde::{Deserialize, Serialize};

use super::input::{InputTensor, INPUT_COLUMNS};
use super::sample::AlphaMatrix;
use crate::error::{Error, Result};
use crate::nn::{DenseSpec, ForwardCache, Mlp, OutputTransform};

/// Layer widths and input scaling of a [`GssnModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Architecture {
    /// Links per user (`EL`); fixes the program encoder's input width and
    /// `P = 2^EL - 1`.
    pub n_links: usize,
    pub link_hidden: Vec<usize>,
    pub program_hidden: Vec<usize>,
    pub ranking_hidden: Vec<usize>,
    /// Multiplier applied to every input column (Mbps) before the link
    /// encoder, keeping preactivations inside ReLU6's linear range.
    pub input_scale: f64,
    /// Floor added to the ranking output so `alpha > 0` on valid options.
    pub alpha_floor: f64,
    /// Initial bias of the ranking output layer. A positive value starts
    /// every `alpha` inside ReLU6's active range, so no option begins with
    /// a dead gradient.
    #[serde(default)]
    pub alpha_bias_init: f64,
}

impl Default for Architecture {
    fn default() -> Self {
        Architecture {
            n_links: 4,
            link_hidden: vec![8, 8, 8],
            program_hidden: vec![8, 8, 8],
            ranking_hidden: vec![32, 16, 8, 16, 32],
            input_scale: 1.0 / 250.0,
            alpha_floor: 1e-6,
            alpha_bias_init: 1.0,
        }
    }
}

impl Architecture {
    pub fn n_options(&self) -> usize {
        (1usize << self.n_links) - 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_links == 0 || self.n_links > crate::model::MAX_LINKS {
            return Err(Error::InvalidConfig(format!("unsupported link count {}", self.n_links)));
        }
        if !(self.input_scale > 0.0 && self.input_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!("input scale must be positive, got {}", self.input_scale)));
        }
        if self.alpha_floor.is_nan() || self.alpha_floor <= 0.0 {
            return Err(Error::InvalidConfig("alpha floor must be positive".into()));
        }
        if !self.alpha_bias_init.is_finite() {
            return Err(Error::InvalidConfig("initial alpha bias must be finite".into()));
        }
        Ok(())
    }

    fn widths(input: usize, hidden: &[usize], output: usize) -> Vec<usize> {
        std::iter::once(input).chain(hidden.iter().copied()).chain(std::iter::once(output)).collect()
    }

    pub fn link_spec(&self) -> Result<DenseSpec> {
        DenseSpec::new(Self::widths(INPUT_COLUMNS, &self.link_hidden, 1), OutputTransform::Identity)
    }

    pub fn program_spec(&self) -> Result<DenseSpec> {
        DenseSpec::new(Self::widths(self.n_links, &self.program_hidden, 1), OutputTransform::Identity)
    }

    pub fn ranking_spec(&self) -> Result<DenseSpec> {
        let p = self.n_options();
        DenseSpec::new(Self::widths(p, &self.ranking_hidden, p), OutputTransform::Relu6Plus(self.alpha_floor))
    }
}

/// Activations kept by [`GssnModel::forward`] for [`GssnModel::backward`].
#[derive(Debug, Clone)]
pub struct GssnCache {
    link: ForwardCache,
    program: ForwardCache,
    ranking: ForwardCache,
}

/// The three encoders plus the sampling temperature last used in training.
#[derive(Debug, Clone, PartialEq)]
pub struct GssnModel {
    pub arch: Architecture,
    pub link: Mlp,
    pub program: Mlp,
    pub ranking: Mlp,
    pub temperature: f64,
}

impl GssnModel {
    /// Glorot-initialized model.
    pub fn init<R: Rng + ?Sized>(arch: Architecture, rng: &mut R) -> Result<Self> {
        arch.validate()?;
        let link = Mlp::init(arch.link_spec()?, rng);
        let program = Mlp::init(arch.program_spec()?, rng);
        let mut ranking = Mlp::init(arch.ranking_spec()?, rng);
        let p = arch.n_options();
        let n = ranking.n_params();
        ranking.params_mut()[n - p..].fill(arch.alpha_bias_init);
        Ok(GssnModel { arch, link, program, ranking, temperature: 2.0 })
    }

    pub fn n_params(&self) -> usize {
        self.link.n_params() + self.program.n_params() + self.ranking.n_params()
    }

    /// All parameters, link encoder first, then program encoder, then ranking.
    pub fn params_flat(&self) -> Vec<f64> {
        [self.link.params(), self.program.params(), self.ranking.params()].concat()
    }

    pub fn set_params_flat(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::Shape(format!("expected {} parameters, got {}", self.n_params(), params.len())));
        }
        let (a, rest) = params.split_at(self.link.n_params());
        let (b, c) = rest.split_at(self.program.n_params());
        self.link.params_mut().copy_from_slice(a);
        self.program.params_mut().copy_from_slice(b);
        self.ranking.params_mut().copy_from_slice(c);
        Ok(())
    }

    fn check_input(&self, input: &InputTensor) -> Result<()> {
        if input.n_links != self.arch.n_links || input.n_options != self.arch.n_options() {
            return Err(Error::Shape(format!(
                "model expects EL={} (P={}), input has EL={} (P={})",
                self.arch.n_links,
                self.arch.n_options(),
                input.n_links,
                input.n_options
            )));
        }
        Ok(())
    }

    fn scaled(&self, input: &InputTensor) -> Vec<f64> {
        input.data.iter().map(|v| v * self.arch.input_scale).collect()
    }

    fn wrap(&self, input: &InputTensor, alpha: Vec<f64>) -> AlphaMatrix {
        AlphaMatrix {
            n_slots: input.n_slots,
            n_users: input.n_users,
            n_types: input.n_types,
            n_options: input.n_options,
            alpha,
            n_valid: input.n_valid.clone(),
        }
    }

    /// Location parameters of every demand row.
    pub fn forward_alpha(&self, input: &InputTensor) -> Result<AlphaMatrix> {
        self.check_input(input)?;
        let rows = input.n_rows();
        let s = self.link.infer(&self.scaled(input), rows)?;
        let v = self.program.infer(&s, rows / input.n_links)?;
        let alpha = self.ranking.infer(&v, input.n_demands())?;
        Ok(self.wrap(input, alpha))
    }

    /// Forward pass that keeps the activations needed for backpropagation.
    pub fn forward(&self, input: &InputTensor) -> Result<(AlphaMatrix, GssnCache)> {
        self.check_input(input)?;
        let rows = input.n_rows();
        let (s, link) = self.link.forward(&self.scaled(input), rows)?;
        let (v, program) = self.program.forward(&s, rows / input.n_links)?;
        let (alpha, ranking) = self.ranking.forward(&v, input.n_demands())?;
        Ok((self.wrap(input, alpha), GssnCache { link, program, ranking }))
    }

    /// Gradient of a scalar loss with respect to all parameters (in
    /// [`GssnModel::params_flat`] order), given its gradient w.r.t. `alpha`.
    pub fn backward(&self, cache: &GssnCache, grad_alpha: &[f64]) -> Result<Vec<f64>> {
        let (nl, np) = (self.link.n_params(), self.program.n_params());
        let mut grads = vec![0.0; self.n_params()];
        let (gl, rest) = grads.split_at_mut(nl);
        let (gp, gr) = rest.split_at_mut(np);
        let gv = self.ranking.backward(&cache.ranking, grad_alpha, gr)?;
        let gs = self.program.backward(&cache.program, &gv, gp)?;
        self.link.backward(&cache.link, &gs, gl)?;
        Ok(grads)
    }
}
