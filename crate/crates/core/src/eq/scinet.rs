//! FC-SCINet: frequency calibration, Decomp, a binary tree of
//! Interactors, and the output convolution.
//!
//! Each Interactor splits its input into even/odd subsequences and
//! cross-modulates them through exponentiated convolutional features:
//!
//! ```text
//! x_even_s = x_even ⊙ exp(ψ(x_odd))     x_odd_s = x_odd ⊙ exp(φ(x_even))
//! x_odd'   = x_even_s + exp(η(x_odd_s)) x_even' = x_odd_s − exp(ρ(x_even_s))
//! ```
//!
//! The recursion continues down the tree; leaf subsequences are realigned
//! to their original coordinates before the output layer.

use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::data::FcMode;
use crate::error::{Error, Result};
use crate::nn::{self, Conv1dLayer, LinearLayer, PadMode, Tensor, EXP_CLAMP};
use crate::rng::Stream;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScinetConfig {
    /// Window length p; must be divisible by 2^levels.
    pub window: usize,
    /// Interactor tree depth L.
    pub levels: usize,
    /// Hidden features per interactor conv stack.
    pub n_h: usize,
    /// Kernel size of the interactor convolutions.
    pub conv_kernel: usize,
    /// Three conv sublayers (1→n_h→n_h→1) instead of two (1→n_h→1);
    /// the middle n_h→n_h conv carries most of the capacity.
    pub deep_stack: bool,
    /// AvgPool kernel of the FC/Decomp decompositions.
    pub fc_kernel: usize,
    pub fc_mode: FcMode,
    /// How many centered symbols the output layer predicts: 1 is the
    /// usual center-symbol head, `window` is full sequence-to-sequence.
    pub output_span: usize,
}

impl Default for ScinetConfig {
    fn default() -> Self {
        ScinetConfig {
            window: 64,
            levels: 3,
            n_h: 8,
            conv_kernel: 5,
            deep_stack: false,
            fc_kernel: 3,
            fc_mode: FcMode::Paper,
            output_span: 1,
        }
    }
}

impl ScinetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 || self.window % (1 << self.levels) != 0 {
            return Err(Error::InvalidParam(format!(
                "window {} not divisible by 2^{}",
                self.window, self.levels
            )));
        }
        if self.fc_kernel % 2 == 0 || self.conv_kernel % 2 == 0 {
            return Err(Error::InvalidParam("kernels must be odd".into()));
        }
        if self.output_span == 0
            || self.output_span > self.window
            || (self.output_span > 1 && (self.window - self.output_span) % 2 != 0)
        {
            return Err(Error::InvalidParam(format!(
                "output_span {} must be 1 or share the window's parity",
                self.output_span
            )));
        }
        Ok(())
    }
}

/// Length-preserving conv sublayers with intermediate nonlinearities;
/// the whole stack feeds an exp(·).
pub struct ConvStack {
    pub expand: Conv1dLayer,
    pub mid: Option<Conv1dLayer>,
    pub project: Conv1dLayer,
}

impl ConvStack {
    fn new(n_h: usize, kernel: usize, deep: bool, rng: &mut Stream) -> ConvStack {
        ConvStack {
            expand: Conv1dLayer::new(1, n_h, kernel, kernel / 2, PadMode::Replicate, rng),
            mid: deep.then(|| Conv1dLayer::new(n_h, n_h, kernel, kernel / 2, PadMode::Replicate, rng)),
            project: Conv1dLayer::new(n_h, 1, kernel, kernel / 2, PadMode::Replicate, rng),
        }
    }

    fn zeros(n_h: usize, kernel: usize, deep: bool) -> ConvStack {
        ConvStack {
            expand: Conv1dLayer::zeros(1, n_h, kernel, kernel / 2, PadMode::Replicate),
            mid: deep.then(|| Conv1dLayer::zeros(n_h, n_h, kernel, kernel / 2, PadMode::Replicate)),
            project: Conv1dLayer::zeros(n_h, 1, kernel, kernel / 2, PadMode::Replicate),
        }
    }

    /// `[B, 1, n] → [B, 1, n]`.
    fn forward(&self, x: &Tensor) -> Result<Tensor> {
        let mut h = nn::leaky_relu(&nn::conv1d_forward(x, &self.expand)?, 0.01);
        if let Some(mid) = &self.mid {
            h = nn::leaky_relu(&nn::conv1d_forward(&h, mid)?, 0.01);
        }
        nn::conv1d_forward(&h, &self.project)
    }

    fn params(&self) -> Vec<Tensor> {
        let mut p = self.expand.params();
        if let Some(mid) = &self.mid {
            p.extend(mid.params());
        }
        p.extend(self.project.params());
        p
    }
}

/// One tree node: the four independent conv stacks ψ, φ, η, ρ.
pub struct Interactor {
    pub psi: ConvStack,
    pub phi: ConvStack,
    pub eta: ConvStack,
    pub rho: ConvStack,
}

impl Interactor {
    fn new(n_h: usize, kernel: usize, deep: bool, rng: &mut Stream) -> Interactor {
        Interactor {
            psi: ConvStack::new(n_h, kernel, deep, rng),
            phi: ConvStack::new(n_h, kernel, deep, rng),
            eta: ConvStack::new(n_h, kernel, deep, rng),
            rho: ConvStack::new(n_h, kernel, deep, rng),
        }
    }

    pub fn zeros(n_h: usize, kernel: usize) -> Interactor {
        Interactor {
            psi: ConvStack::zeros(n_h, kernel, false),
            phi: ConvStack::zeros(n_h, kernel, false),
            eta: ConvStack::zeros(n_h, kernel, false),
            rho: ConvStack::zeros(n_h, kernel, false),
        }
    }

    /// Split `[B, 1, n]` into even/odd, cross-modulate, return the two
    /// `[B, 1, n/2]` outputs.
    pub fn forward(&self, x: &Tensor) -> Result<(Tensor, Tensor)> {
        let n = *x.shape().last().unwrap();
        if n % 2 != 0 {
            return Err(Error::InvalidParam(format!(
                "interactor input length {n} must be even"
            )));
        }
        let even_idx: Rc<Vec<usize>> = Rc::new((0..n).step_by(2).collect());
        let odd_idx: Rc<Vec<usize>> = Rc::new((1..n).step_by(2).collect());
        let x_even = nn::gather(x, even_idx);
        let x_odd = nn::gather(x, odd_idx);

        let x_even_s = nn::mul(&x_even, &nn::exp_clamped(&self.psi.forward(&x_odd)?, EXP_CLAMP));
        let x_odd_s = nn::mul(&x_odd, &nn::exp_clamped(&self.phi.forward(&x_even)?, EXP_CLAMP));
        let x_odd_p = nn::add(
            &x_even_s,
            &nn::exp_clamped(&self.eta.forward(&x_odd_s)?, EXP_CLAMP),
        );
        let x_even_p = nn::sub(
            &x_odd_s,
            &nn::exp_clamped(&self.rho.forward(&x_even_s)?, EXP_CLAMP),
        );
        Ok((x_even_p, x_odd_p))
    }

    fn params(&self) -> Vec<Tensor> {
        let mut p = self.psi.params();
        p.extend(self.phi.params());
        p.extend(self.eta.params());
        p.extend(self.rho.params());
        p
    }
}

/// The leaf-order permutation of a depth-L even/odd split: `perm[j]` is
/// the original coordinate of the j-th concatenated leaf sample.
pub fn split_permutation(p: usize, levels: usize) -> Vec<usize> {
    fn recurse(indices: Vec<usize>, depth: usize) -> Vec<usize> {
        if depth == 0 {
            return indices;
        }
        let even: Vec<usize> = indices.iter().copied().step_by(2).collect();
        let odd: Vec<usize> = indices.iter().copied().skip(1).step_by(2).collect();
        let mut out = recurse(even, depth - 1);
        out.extend(recurse(odd, depth - 1));
        out
    }
    recurse((0..p).collect(), levels)
}

/// Gather indices that undo [`split_permutation`].
pub fn realign_indices(p: usize, levels: usize) -> Vec<usize> {
    let perm = split_permutation(p, levels);
    let mut inv = vec![0usize; p];
    for (j, orig) in perm.iter().enumerate() {
        inv[*orig] = j;
    }
    inv
}

pub struct FcScinetModel {
    pub cfg: ScinetConfig,
    /// Decomp weights over the smooth path.
    pub w_s: LinearLayer,
    /// Decomp weights over the fluctuating path.
    pub w_f: LinearLayer,
    /// Level-order interactor tree, 2^L − 1 nodes.
    pub tree: Vec<Interactor>,
    pub output: Conv1dLayer,
}

impl FcScinetModel {
    pub fn new(cfg: ScinetConfig, master_seed: u64) -> Result<FcScinetModel> {
        cfg.validate()?;
        let mut rng = Stream::new(master_seed, "scinet-init", 0);
        let p = cfg.window;
        let w_s = LinearLayer::new(p, p, &mut rng);
        let w_f = LinearLayer::new(p, p, &mut rng);
        let n_nodes = (1 << cfg.levels) - 1;
        let tree = (0..n_nodes)
            .map(|_| Interactor::new(cfg.n_h, cfg.conv_kernel, cfg.deep_stack, &mut rng))
            .collect();
        // kernel w−span+1 with no padding leaves exactly `span` outputs
        let output = Conv1dLayer::new(1, 1, p - cfg.output_span + 1, 0, PadMode::Zero, &mut rng);
        Ok(FcScinetModel {
            cfg,
            w_s,
            w_f,
            tree,
            output,
        })
    }

    /// Identity Decomp (W_s = W_f = I, zero bias) and all-zero convs;
    /// the closed-form reference configuration.
    pub fn zeroed(cfg: ScinetConfig) -> Result<FcScinetModel> {
        cfg.validate()?;
        let p = cfg.window;
        let n_nodes = (1 << cfg.levels) - 1;
        let tree = (0..n_nodes)
            .map(|_| Interactor::zeros(cfg.n_h, cfg.conv_kernel))
            .collect();
        let output = Conv1dLayer::zeros(1, 1, p - cfg.output_span + 1, 0, PadMode::Zero);
        Ok(FcScinetModel {
            w_s: LinearLayer::identity(p),
            w_f: LinearLayer::identity(p),
            cfg,
            tree,
            output,
        })
    }

    /// Frequency calibration on `[B, p]`: x_s = AvgPool(x), x_f = x − x_s,
    /// x_pre = x + x_f (or x_s + x_f in Reconstruct mode).
    pub fn frequency_calibrate(&self, x: &Tensor) -> Result<Tensor> {
        let x_s = nn::avg_pool_smooth(x, self.cfg.fc_kernel)?;
        match self.cfg.fc_mode {
            FcMode::Paper => {
                let x_f = nn::sub(x, &x_s);
                Ok(nn::add(x, &x_f))
            }
            FcMode::Reconstruct => Ok(x.clone()),
        }
    }

    /// Decomp: split x_pre by AvgPool, map both parts through their
    /// linear layers, sum to x̂, and decompose x̂ again. Returns
    /// `(x_s, x_f)`, both `[B, p]`.
    pub fn decomp_forward(&self, x_pre: &Tensor) -> Result<(Tensor, Tensor)> {
        let s0 = nn::avg_pool_smooth(x_pre, self.cfg.fc_kernel)?;
        let f0 = nn::sub(x_pre, &s0);
        let x_hat = nn::add(
            &nn::linear_forward(&s0, &self.w_s)?,
            &nn::linear_forward(&f0, &self.w_f)?,
        );
        let x_s = nn::avg_pool_smooth(&x_hat, self.cfg.fc_kernel)?;
        let x_f = nn::sub(&x_hat, &x_s);
        Ok((x_s, x_f))
    }

    fn tree_forward(&self, node: usize, depth: usize, x: &Tensor) -> Result<Vec<Tensor>> {
        let (even, odd) = self.tree[node].forward(x)?;
        if depth + 1 == self.cfg.levels {
            return Ok(vec![even, odd]);
        }
        let mut leaves = self.tree_forward(2 * node + 1, depth + 1, &even)?;
        leaves.extend(self.tree_forward(2 * node + 2, depth + 1, &odd)?);
        Ok(leaves)
    }

    /// SCIBlock: recursive even/odd interaction over `[B, 1, p]`,
    /// realigned to the original coordinates.
    pub fn sciblock_forward(&self, x_f: &Tensor) -> Result<Tensor> {
        let leaves = self.tree_forward(0, 0, x_f)?;
        let stacked = nn::concat(&leaves);
        let idx = Rc::new(realign_indices(self.cfg.window, self.cfg.levels));
        Ok(nn::gather(&stacked, idx))
    }

    /// Full model: FC → Decomp → SCIBlock on x_f → + x_s → output conv.
    /// Input `[B, p]`, output `[B, 1]` (or `[B, p]` many-to-many).
    pub fn forward(&self, window: &Tensor) -> Result<Tensor> {
        let shape = window.shape();
        let (batch, p) = match shape.as_slice() {
            [b, p] => (*b, *p),
            [p] => (1, *p),
            other => {
                return Err(Error::ShapeMismatch {
                    context: format!("scinet expects [B,p] or [p], got {other:?}"),
                })
            }
        };
        if p != self.cfg.window {
            return Err(Error::ShapeMismatch {
                context: format!("window {p} vs configured {}", self.cfg.window),
            });
        }
        let x = if shape.len() == 1 {
            nn::reshape(window, vec![1, p])
        } else {
            window.clone()
        };
        let x_pre = self.frequency_calibrate(&x)?;
        let (x_s, x_f) = self.decomp_forward(&x_pre)?;
        let x_f3 = nn::reshape(&x_f, vec![batch, 1, p]);
        let x_hat_f = self.sciblock_forward(&x_f3)?;
        let merged = nn::add(&x_hat_f, &nn::reshape(&x_s, vec![batch, 1, p]));
        let out = nn::conv1d_forward(&merged, &self.output)?;
        let out_len = *out.shape().last().unwrap();
        Ok(nn::reshape(&out, vec![batch, out_len]))
    }

    pub fn params(&self) -> Vec<Tensor> {
        let mut p = self.w_s.params();
        p.extend(self.w_f.params());
        for node in &self.tree {
            p.extend(node.params());
        }
        p.extend(self.output.params());
        p
    }

    pub fn named_params(&self) -> Vec<(String, Tensor)> {
        let mut out = vec![
            ("decomp.ws.weight".to_string(), self.w_s.weights.clone()),
            ("decomp.ws.bias".to_string(), self.w_s.bias.clone()),
            ("decomp.wf.weight".to_string(), self.w_f.weights.clone()),
            ("decomp.wf.bias".to_string(), self.w_f.bias.clone()),
        ];
        for (i, node) in self.tree.iter().enumerate() {
            for (name, stack) in [
                ("psi", &node.psi),
                ("phi", &node.phi),
                ("eta", &node.eta),
                ("rho", &node.rho),
            ] {
                out.push((format!("tree{i}.{name}.expand.weight"), stack.expand.weights.clone()));
                out.push((format!("tree{i}.{name}.expand.bias"), stack.expand.bias.clone()));
                out.push((format!("tree{i}.{name}.project.weight"), stack.project.weights.clone()));
                out.push((format!("tree{i}.{name}.project.bias"), stack.project.bias.clone()));
            }
        }
        out.push(("output.weight".to_string(), self.output.weights.clone()));
        out.push(("output.bias".to_string(), self.output.bias.clone()));
        out
    }
}
