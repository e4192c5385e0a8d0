use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::uniform;

#[inline]
pub fn relu6(x: f64) -> f64 {
    x.clamp(0.0, 6.0)
}

/// Derivative of ReLU6: 1 on the open interval (0, 6), 0 elsewhere.
#[inline]
pub fn relu6_grad(x: f64) -> f64 {
    if x > 0.0 && x < 6.0 {
        1.0
    } else {
        0.0
    }
}

/// Transform applied to the last layer's preactivation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OutputTransform {
    Identity,
    /// `relu6(x) + eps`, keeping outputs strictly positive.
    Relu6Plus(f64),
}

impl OutputTransform {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            OutputTransform::Identity => x,
            OutputTransform::Relu6Plus(eps) => relu6(x) + eps,
        }
    }

    #[inline]
    fn grad(self, x: f64) -> f64 {
        match self {
            OutputTransform::Identity => 1.0,
            OutputTransform::Relu6Plus(_) => relu6_grad(x),
        }
    }
}

/// Layer widths `[in, hidden.., out]`; hidden layers use ReLU6.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseSpec {
    pub widths: Vec<usize>,
    pub output: OutputTransform,
}

impl DenseSpec {
    pub fn new(widths: Vec<usize>, output: OutputTransform) -> Result<Self> {
        if widths.len() < 2 || widths.contains(&0) {
            return Err(Error::InvalidConfig(format!("need at least one layer of positive widths, got {widths:?}")));
        }
        Ok(DenseSpec { widths, output })
    }

    pub fn n_layers(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn input_width(&self) -> usize {
        self.widths[0]
    }

    pub fn output_width(&self) -> usize {
        *self.widths.last().expect("nonempty")
    }

    pub fn n_params(&self) -> usize {
        self.widths.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }
}

/// Activations retained by [`Mlp::forward`] for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub rows: usize,
    /// `inputs[l]` is the input of layer `l` (rows x widths[l]).
    inputs: Vec<Vec<f64>>,
    /// `pre[l]` is the preactivation of layer `l` (rows x widths[l+1]).
    pre: Vec<Vec<f64>>,
}

/// Fully connected network with all parameters in one flat vector.
///
/// Layer `l` stores its `out x in` weight matrix row-major followed by its
/// bias, so the parameter vector can be handed directly to an optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    spec: DenseSpec,
    params: Vec<f64>,
}

impl Mlp {
    /// Glorot-uniform weights, zero biases.
    pub fn init<R: Rng + ?Sized>(spec: DenseSpec, rng: &mut R) -> Self {
        let mut params = Vec::with_capacity(spec.n_params());
        for w in spec.widths.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            params.extend((0..fan_in * fan_out).map(|_| uniform(rng, -bound, bound)));
            params.extend(std::iter::repeat_n(0.0, fan_out));
        }
        Mlp { spec, params }
    }

    pub fn from_params(spec: DenseSpec, params: Vec<f64>) -> Result<Self> {
        if params.len() != spec.n_params() {
            return Err(Error::Shape(format!("expected {} parameters, got {}", spec.n_params(), params.len())));
        }
        Ok(Mlp { spec, params })
    }

    pub fn spec(&self) -> &DenseSpec {
        &self.spec
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    fn offsets(&self, layer: usize) -> (usize, usize, usize, usize) {
        let mut off = 0;
        for w in self.spec.widths.windows(2).take(layer) {
            off += w[0] * w[1] + w[1];
        }
        let (n_in, n_out) = (self.spec.widths[layer], self.spec.widths[layer + 1]);
        (off, off + n_in * n_out, n_in, n_out)
    }

    /// Weight matrix (`out x in`, row-major) and bias of one layer.
    pub fn layer(&self, layer: usize) -> (&[f64], &[f64]) {
        let (w, b, _, n_out) = self.offsets(layer);
        (&self.params[w..b], &self.params[b..b + n_out])
    }

    fn check_input(&self, input: &[f64], rows: usize) -> Result<()> {
        if input.len() != rows * self.spec.input_width() {
            return Err(Error::Shape(format!(
                "input has {} values, expected {rows} rows x {}",
                input.len(),
                self.spec.input_width()
            )));
        }
        Ok(())
    }

    fn affine(&self, layer: usize, input: &[f64], rows: usize, pre: &mut [f64]) {
        let (wo, bo, n_in, n_out) = self.offsets(layer);
        let w = &self.params[wo..bo];
        let b = &self.params[bo..bo + n_out];
        for r in 0..rows {
            let x = &input[r * n_in..(r + 1) * n_in];
            let y = &mut pre[r * n_out..(r + 1) * n_out];
            for o in 0..n_out {
                let row = &w[o * n_in..(o + 1) * n_in];
                y[o] = b[o] + row.iter().zip(x).map(|(a, c)| a * c).sum::<f64>();
            }
        }
    }

    /// Forward pass over `rows` stacked inputs, keeping a cache for backprop.
    pub fn forward(&self, input: &[f64], rows: usize) -> Result<(Vec<f64>, ForwardCache)> {
        self.check_input(input, rows)?;
        let n_layers = self.spec.n_layers();
        let mut inputs = Vec::with_capacity(n_layers);
        let mut pre_all = Vec::with_capacity(n_layers);
        let mut current = input.to_vec();
        for l in 0..n_layers {
            let n_out = self.spec.widths[l + 1];
            let mut pre = vec![0.0; rows * n_out];
            self.affine(l, &current, rows, &mut pre);
            let act: Vec<f64> = if l + 1 == n_layers {
                pre.iter().map(|&x| self.spec.output.apply(x)).collect()
            } else {
                pre.iter().map(|&x| relu6(x)).collect()
            };
            inputs.push(std::mem::replace(&mut current, act));
            pre_all.push(pre);
        }
        Ok((current, ForwardCache { rows, inputs, pre: pre_all }))
    }

    /// Forward pass without a cache.
    pub fn infer(&self, input: &[f64], rows: usize) -> Result<Vec<f64>> {
        self.check_input(input, rows)?;
        let n_layers = self.spec.n_layers();
        let mut current = input.to_vec();
        for l in 0..n_layers {
            let mut pre = vec![0.0; rows * self.spec.widths[l + 1]];
            self.affine(l, &current, rows, &mut pre);
            if l + 1 == n_layers {
                pre.iter_mut().for_each(|x| *x = self.spec.output.apply(*x));
            } else {
                pre.iter_mut().for_each(|x| *x = relu6(*x));
            }
            current = pre;
        }
        Ok(current)
    }

    /// Reverse pass: accumulates parameter gradients into `grads` and
    /// returns the gradient with respect to the input rows.
    pub fn backward(&self, cache: &ForwardCache, grad_out: &[f64], grads: &mut [f64]) -> Result<Vec<f64>> {
        let rows = cache.rows;
        let n_layers = self.spec.n_layers();
        if cache.pre.len() != n_layers || grad_out.len() != rows * self.spec.output_width() {
            return Err(Error::Shape("backward called with a mismatched cache or output gradient".into()));
        }
        if grads.len() != self.params.len() {
            return Err(Error::Shape("gradient buffer does not match parameter count".into()));
        }
        let mut delta: Vec<f64> = grad_out.to_vec();
        for l in (0..n_layers).rev() {
            let (wo, bo, n_in, n_out) = self.offsets(l);
            let pre = &cache.pre[l];
            if l + 1 == n_layers {
                for (d, &p) in delta.iter_mut().zip(pre) {
                    *d *= self.spec.output.grad(p);
                }
            } else {
                for (d, &p) in delta.iter_mut().zip(pre) {
                    *d *= relu6_grad(p);
                }
            }
            let x = &cache.inputs[l];
            let (gw, rest) = grads[wo..].split_at_mut(bo - wo);
            let gb = &mut rest[..n_out];
            let w = &self.params[wo..bo];
            let mut prev = vec![0.0; rows * n_in];
            for r in 0..rows {
                let dr = &delta[r * n_out..(r + 1) * n_out];
                let xr = &x[r * n_in..(r + 1) * n_in];
                let pr = &mut prev[r * n_in..(r + 1) * n_in];
                for (o, &d) in dr.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    gb[o] += d;
                    let gw_row = &mut gw[o * n_in..(o + 1) * n_in];
                    let w_row = &w[o * n_in..(o + 1) * n_in];
                    for j in 0..n_in {
                        gw_row[j] += d * xr[j];
                        pr[j] += d * w_row[j];
                    }
                }
            }
            delta = prev;
        }
        Ok(delta)
    }
}
