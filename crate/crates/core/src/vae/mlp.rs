//! Scalar-input MLP with one ReLU hidden layer of four units.
//!
//! Parameters live in one flat vector laid out as
//! `w1[H] | b1[H] | w2[out][H] | b2[out]` (row-major `w2`, one row per output).

use rand::Rng;

use crate::rng::StreamRng;

pub const HIDDEN: usize = 4;
pub const MAX_OUT: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    n_out: usize,
    params: Vec<f64>,
}

/// Activations kept from a forward pass for the backward pass.
#[derive(Debug, Clone, Copy)]
pub struct Trace {
    pub input: f64,
    pub pre: [f64; HIDDEN],
    pub hidden: [f64; HIDDEN],
    pub out: [f64; MAX_OUT],
}

impl Mlp {
    pub const fn param_count_for(n_out: usize) -> usize {
        2 * HIDDEN + n_out * HIDDEN + n_out
    }

    pub fn zeros(n_out: usize) -> Self {
        assert!((1..=MAX_OUT).contains(&n_out));
        Self {
            n_out,
            params: vec![0.0; Self::param_count_for(n_out)],
        }
    }

    /// Uniform `[-0.5, 0.5]` initialisation.
    pub fn init(n_out: usize, rng: &mut StreamRng) -> Self {
        let mut net = Self::zeros(n_out);
        for p in &mut net.params {
            *p = rng.random_range(-0.5..=0.5);
        }
        net
    }

    pub fn from_params(n_out: usize, params: Vec<f64>) -> Option<Self> {
        ((1..=MAX_OUT).contains(&n_out) && params.len() == Self::param_count_for(n_out))
            .then_some(Self { n_out, params })
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    fn w2_offset(&self) -> usize {
        2 * HIDDEN
    }

    fn b2_offset(&self) -> usize {
        2 * HIDDEN + self.n_out * HIDDEN
    }

    /// Zeroes the output row `o` (weights and bias).
    pub fn zero_output(&mut self, o: usize) {
        let w2 = self.w2_offset() + o * HIDDEN;
        self.params[w2..w2 + HIDDEN].fill(0.0);
        let b2 = self.b2_offset();
        self.params[b2 + o] = 0.0;
    }

    /// Sets output `o` to the constant `value`.
    pub fn set_output_constant(&mut self, o: usize, value: f64) {
        self.zero_output(o);
        let b2 = self.b2_offset();
        self.params[b2 + o] = value;
    }

    pub fn forward(&self, input: f64) -> Trace {
        let p = &self.params;
        let mut pre = [0.0; HIDDEN];
        let mut hidden = [0.0; HIDDEN];
        for j in 0..HIDDEN {
            pre[j] = p[j] * input + p[HIDDEN + j];
            hidden[j] = pre[j].max(0.0);
        }
        let mut out = [0.0; MAX_OUT];
        let (w2, b2) = (self.w2_offset(), self.b2_offset());
        for (o, slot) in out.iter_mut().enumerate().take(self.n_out) {
            let row = &p[w2 + o * HIDDEN..w2 + (o + 1) * HIDDEN];
            *slot = p[b2 + o] + row.iter().zip(&hidden).map(|(w, h)| w * h).sum::<f64>();
        }
        Trace {
            input,
            pre,
            hidden,
            out,
        }
    }

    /// Accumulates `d_out · ∂out/∂params` into `grad` and returns `d_out · ∂out/∂input`.
    ///
    /// The ReLU derivative at exactly zero is taken to be zero.
    pub fn backward(&self, trace: &Trace, d_out: &[f64], grad: &mut [f64]) -> f64 {
        debug_assert_eq!(grad.len(), self.params.len());
        let p = &self.params;
        let (w2, b2) = (self.w2_offset(), self.b2_offset());
        let mut d_hidden = [0.0; HIDDEN];
        for (o, &d) in d_out.iter().enumerate().take(self.n_out) {
            grad[b2 + o] += d;
            for j in 0..HIDDEN {
                grad[w2 + o * HIDDEN + j] += d * trace.hidden[j];
                d_hidden[j] += d * p[w2 + o * HIDDEN + j];
            }
        }
        let mut d_input = 0.0;
        for j in 0..HIDDEN {
            if trace.pre[j] > 0.0 {
                let d_pre = d_hidden[j];
                grad[j] += d_pre * trace.input;
                grad[HIDDEN + j] += d_pre;
                d_input += d_pre * p[j];
            }
        }
        d_input
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn parameter_counts() {
        assert_eq!(Mlp::param_count_for(1), 13);
        assert_eq!(Mlp::param_count_for(2), 18);
        assert!(Mlp::from_params(1, vec![0.0; 12]).is_none());
        assert!(Mlp::from_params(3, vec![0.0; 23]).is_none());
    }

    #[test]
    fn constant_output() {
        let mut rng = stream_rng(1, 0);
        let mut net = Mlp::init(2, &mut rng);
        net.set_output_constant(1, -0.7);
        for x in [-3.0, 0.0, 2.5] {
            assert_eq!(net.forward(x).out[1], -0.7);
        }
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = stream_rng(9, 0);
        let net = Mlp::init(2, &mut rng);
        let d_out = [0.3, -1.1];
        let loss = |n: &Mlp, x: f64| {
            let t = n.forward(x);
            d_out[0] * t.out[0] + d_out[1] * t.out[1]
        };
        for x in [-1.3, 0.4, 2.2] {
            let t = net.forward(x);
            let mut grad = vec![0.0; net.param_count()];
            let dx = net.backward(&t, &d_out, &mut grad);
            let h = 1e-6;
            let fd_x = (loss(&net, x + h) - loss(&net, x - h)) / (2.0 * h);
            assert!((dx - fd_x).abs() < 1e-6);
            for (i, &g) in grad.iter().enumerate() {
                let mut plus = net.clone();
                plus.params_mut()[i] += h;
                let mut minus = net.clone();
                minus.params_mut()[i] -= h;
                let fd = (loss(&plus, x) - loss(&minus, x)) / (2.0 * h);
                assert!((g - fd).abs() < 1e-6, "param {i}: {g} vs {fd}");
            }
        }
    }
}
