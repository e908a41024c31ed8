use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Relu,
    Identity,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Relu => x.max(0.0),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activation's output `y`.
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerShape {
    pub inputs: usize,
    pub outputs: usize,
}

impl LayerShape {
    fn num_params(&self) -> usize {
        self.inputs * self.outputs + self.outputs
    }
}

/// Architecture description for an [`Mlp`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpConfig {
    #[serde(default = "MlpConfig::default_hidden")]
    pub hidden: Vec<usize>,
    #[serde(default = "MlpConfig::default_activation")]
    pub activation: Activation,
}

impl MlpConfig {
    fn default_hidden() -> Vec<usize> {
        vec![64, 64]
    }

    fn default_activation() -> Activation {
        Activation::Tanh
    }

    pub fn new(hidden: Vec<usize>, activation: Activation) -> Self {
        Self { hidden, activation }
    }

    /// Builds a network with the configured hidden stack and a linear output.
    pub fn build(&self, inputs: usize, outputs: usize, seed: u64) -> Mlp {
        let mut sizes = Vec::with_capacity(self.hidden.len() + 2);
        sizes.push(inputs);
        sizes.extend_from_slice(&self.hidden);
        sizes.push(outputs);
        Mlp::new(&sizes, self.activation, Activation::Identity, seed)
    }
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden: Self::default_hidden(),
            activation: Self::default_activation(),
        }
    }
}

#[derive(Clone, Debug)]
struct ForwardCache {
    input: Vec<f64>,
    /// Post-activation output of every layer.
    outputs: Vec<Vec<f64>>,
}

/// A fully connected network stored as one flat parameter vector.
///
/// Layer `k` occupies `outputs * inputs` row-major weights followed by
/// `outputs` biases. `grad` mirrors `params` and accumulates across
/// [`Mlp::backward`] calls until an optimizer step zeroes it.
#[derive(Clone, Debug)]
pub struct Mlp {
    shapes: Vec<LayerShape>,
    activations: Vec<Activation>,
    params: Vec<f64>,
    grad: Vec<f64>,
    seed: u64,
    cache: Option<ForwardCache>,
}

impl PartialEq for Mlp {
    fn eq(&self, other: &Self) -> bool {
        self.shapes == other.shapes
            && self.activations == other.activations
            && self.seed == other.seed
            && self.params.len() == other.params.len()
            && self
                .params
                .iter()
                .zip(&other.params)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl Mlp {
    /// `sizes` lists layer widths from input to output. Hidden layers use
    /// `hidden`, the last layer uses `output`.
    ///
    /// Weights are drawn from U(-sqrt(3/fan_in), sqrt(3/fan_in)) with a
    /// stream seeded by `seed`; biases start at zero.
    pub fn new(sizes: &[usize], hidden: Activation, output: Activation, seed: u64) -> Self {
        assert!(sizes.len() >= 2, "an MLP needs at least input and output sizes");
        assert!(sizes.iter().all(|&s| s > 0), "layer sizes must be positive");
        let shapes: Vec<LayerShape> = sizes
            .windows(2)
            .map(|w| LayerShape {
                inputs: w[0],
                outputs: w[1],
            })
            .collect();
        let mut activations = vec![hidden; shapes.len()];
        *activations.last_mut().unwrap() = output;
        let total: usize = shapes.iter().map(LayerShape::num_params).sum();
        let mut params = vec![0.0; total];
        let mut rng = rng::from_seed(seed);
        let mut offset = 0;
        for shape in &shapes {
            let bound = (3.0 / shape.inputs as f64).sqrt();
            for w in &mut params[offset..offset + shape.inputs * shape.outputs] {
                *w = rng.random_range(-bound..bound);
            }
            offset += shape.num_params();
        }
        Self {
            shapes,
            activations,
            grad: vec![0.0; total],
            params,
            seed,
            cache: None,
        }
    }

    /// Rebuilds a network from its stored parts, as read from a checkpoint.
    pub fn from_parts(
        shapes: Vec<LayerShape>,
        activations: Vec<Activation>,
        params: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        if shapes.is_empty() || shapes.len() != activations.len() {
            return Err(Error::Config("layer shapes and activations disagree".into()));
        }
        for pair in shapes.windows(2) {
            if pair[0].outputs != pair[1].inputs {
                return Err(Error::Config("consecutive layer shapes do not chain".into()));
            }
        }
        let total: usize = shapes.iter().map(LayerShape::num_params).sum();
        if params.len() != total {
            return Err(Error::DimensionMismatch {
                context: "mlp parameters",
                expected: total,
                got: params.len(),
            });
        }
        Ok(Self {
            shapes,
            activations,
            grad: vec![0.0; total],
            params,
            seed,
            cache: None,
        })
    }

    /// Scales the final layer's weights and biases, e.g. to start a policy
    /// mean near zero. A factor of 0 zero-initialises the output layer.
    pub fn scale_output_layer(&mut self, factor: f64) {
        let last = *self.shapes.last().unwrap();
        let start = self.params.len() - last.num_params();
        for p in &mut self.params[start..] {
            *p *= factor;
        }
    }

    pub fn input_dim(&self) -> usize {
        self.shapes[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.shapes.last().unwrap().outputs
    }

    pub fn shapes(&self) -> &[LayerShape] {
        &self.shapes
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        self.cache = None;
        &mut self.params
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    pub fn grad_mut(&mut self) -> &mut [f64] {
        &mut self.grad
    }

    /// Borrow parameters and gradient together for an optimizer step.
    pub fn params_and_grad_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        self.cache = None;
        (&mut self.params, &mut self.grad)
    }

    pub fn zero_grad(&mut self) {
        self.grad.iter_mut().for_each(|g| *g = 0.0);
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "mlp input",
                expected: self.input_dim(),
                got: input.len(),
            });
        }
        ensure_finite(input, "mlp input")
    }

    fn run(&self, input: &[f64], mut keep: Option<&mut Vec<Vec<f64>>>) -> Vec<f64> {
        let mut current = input.to_vec();
        let mut offset = 0;
        for (shape, act) in self.shapes.iter().zip(&self.activations) {
            let weights = &self.params[offset..offset + shape.inputs * shape.outputs];
            let biases = &self.params
                [offset + shape.inputs * shape.outputs..offset + shape.num_params()];
            let next: Vec<f64> = (0..shape.outputs)
                .map(|o| {
                    let row = &weights[o * shape.inputs..(o + 1) * shape.inputs];
                    let z = row.iter().zip(&current).map(|(w, x)| w * x).sum::<f64>() + biases[o];
                    act.apply(z)
                })
                .collect();
            offset += shape.num_params();
            if let Some(store) = keep.as_deref_mut() {
                store.push(next.clone());
            }
            current = next;
        }
        current
    }

    /// Pure forward pass; leaves the backward cache untouched.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let out = self.run(input, None);
        ensure_finite(&out, "mlp output")?;
        Ok(out)
    }

    /// Forward pass that records activations for a following [`Mlp::backward`].
    pub fn forward_cached(&mut self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut outputs = Vec::with_capacity(self.shapes.len());
        let out = self.run(input, Some(&mut outputs));
        ensure_finite(&out, "mlp output")?;
        self.cache = Some(ForwardCache {
            input: input.to_vec(),
            outputs,
        });
        Ok(out)
    }

    /// Accumulates `d(upstream · output)/d params` into the gradient buffer and
    /// returns the gradient with respect to the input.
    ///
    /// Fails with [`Error::StaleCache`] unless the last cached forward pass was
    /// run on exactly this input with the current parameters.
    pub fn backward(&mut self, input: &[f64], upstream: &[f64]) -> Result<Vec<f64>> {
        let cache = match &self.cache {
            Some(c)
                if c.input.len() == input.len()
                    && c.input
                        .iter()
                        .zip(input)
                        .all(|(a, b)| a.to_bits() == b.to_bits()) =>
            {
                c
            }
            _ => return Err(Error::StaleCache),
        };
        if upstream.len() != self.output_dim() {
            return Err(Error::DimensionMismatch {
                context: "mlp upstream gradient",
                expected: self.output_dim(),
                got: upstream.len(),
            });
        }
        ensure_finite(upstream, "mlp upstream gradient")?;

        let mut offsets = Vec::with_capacity(self.shapes.len());
        let mut acc = 0;
        for s in &self.shapes {
            offsets.push(acc);
            acc += s.num_params();
        }

        let mut delta: Vec<f64> = upstream.to_vec();
        for k in (0..self.shapes.len()).rev() {
            let shape = self.shapes[k];
            let act = self.activations[k];
            let out = &cache.outputs[k];
            for (d, y) in delta.iter_mut().zip(out) {
                *d *= act.derivative_from_output(*y);
            }
            let layer_in: &[f64] = if k == 0 { &cache.input } else { &cache.outputs[k - 1] };
            let off = offsets[k];
            let n_w = shape.inputs * shape.outputs;
            let mut next_delta = vec![0.0; shape.inputs];
            for o in 0..shape.outputs {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                let row = off + o * shape.inputs;
                for i in 0..shape.inputs {
                    self.grad[row + i] += d * layer_in[i];
                    next_delta[i] += d * self.params[row + i];
                }
                self.grad[off + n_w + o] += d;
            }
            delta = next_delta;
        }
        Ok(delta)
    }

    /// Convenience: cached forward, then backward with `upstream_fn(output)`.
    /// Returns the network output.
    pub fn forward_backward<F>(&mut self, input: &[f64], upstream_fn: F) -> Result<Vec<f64>>
    where
        F: FnOnce(&[f64]) -> Vec<f64>,
    {
        let out = self.forward_cached(input)?;
        let up = upstream_fn(&out);
        self.backward(input, &up)?;
        Ok(out)
    }

    /// Scalar-output shorthand for [`Mlp::forward`].
    pub fn scalar(&self, input: &[f64]) -> Result<f64> {
        Ok(self.forward(input)?[0])
    }
}
