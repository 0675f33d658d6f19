//! Graph-recorded tensors and reverse-mode backpropagation.
//!
//! A [`Tensor`] is a shared handle to a node in an implicit computation
//! graph. Forward ops record their parents; [`Tensor::backward`] walks
//! the graph in reverse topological order and accumulates gradients into
//! every node with `requires_grad`. Gradients accumulate across repeated
//! backward calls until [`Tensor::zero_grad`].

use std::cell::{Ref, RefCell};
use std::rc::Rc;

use crate::error::{shape_mismatch, Error, Result};

use super::layers::{Conv1dLayer, LinearLayer, PadMode};

#[derive(Clone)]
pub struct Tensor {
    inner: Rc<RefCell<Node>>,
}

struct Node {
    shape: Vec<usize>,
    data: Vec<f64>,
    grad: Option<Vec<f64>>,
    requires_grad: bool,
    op: Op,
}

enum Op {
    Leaf,
    Add(Tensor, Tensor),
    Sub(Tensor, Tensor),
    Mul(Tensor, Tensor),
    Scale(Tensor, f64),
    ExpClamped(Tensor, f64),
    Relu(Tensor),
    LeakyRelu(Tensor, f64),
    Sigmoid(Tensor),
    Tanh(Tensor),
    Conv1d {
        x: Tensor,
        w: Tensor,
        b: Tensor,
        pad: usize,
        pad_mode: PadMode,
    },
    Linear {
        x: Tensor,
        w: Tensor,
        b: Tensor,
    },
    AvgPool {
        x: Tensor,
        kernel: usize,
    },
    Gather {
        x: Tensor,
        idx: Rc<Vec<usize>>,
    },
    Concat(Vec<Tensor>),
    Mse {
        pred: Tensor,
        target: Tensor,
    },
    Reshape(Tensor),
}

impl Op {
    fn parents(&self) -> Vec<Tensor> {
        match self {
            Op::Leaf => vec![],
            Op::Add(a, b) | Op::Sub(a, b) | Op::Mul(a, b) => vec![a.clone(), b.clone()],
            Op::Scale(a, _)
            | Op::ExpClamped(a, _)
            | Op::Relu(a)
            | Op::LeakyRelu(a, _)
            | Op::Sigmoid(a)
            | Op::Tanh(a) => vec![a.clone()],
            Op::Conv1d { x, w, b, .. } => vec![x.clone(), w.clone(), b.clone()],
            Op::Linear { x, w, b } => vec![x.clone(), w.clone(), b.clone()],
            Op::AvgPool { x, .. } => vec![x.clone()],
            Op::Gather { x, .. } => vec![x.clone()],
            Op::Concat(parts) => parts.clone(),
            Op::Mse { pred, target } => vec![pred.clone(), target.clone()],
            Op::Reshape(a) => vec![a.clone()],
        }
    }
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>, requires_grad: bool) -> Tensor {
        assert_eq!(
            shape.iter().product::<usize>(),
            data.len(),
            "shape {shape:?} does not match data length {}",
            data.len()
        );
        Tensor::from_node(shape, data, requires_grad, Op::Leaf)
    }

    /// Constant leaf (no gradient).
    pub fn constant(shape: Vec<usize>, data: Vec<f64>) -> Tensor {
        Tensor::new(shape, data, false)
    }

    pub fn from_vec(data: Vec<f64>) -> Tensor {
        let n = data.len();
        Tensor::new(vec![n], data, false)
    }

    pub fn zeros(shape: Vec<usize>, requires_grad: bool) -> Tensor {
        let n = shape.iter().product();
        Tensor::new(shape, vec![0.0; n], requires_grad)
    }

    fn from_node(shape: Vec<usize>, data: Vec<f64>, requires_grad: bool, op: Op) -> Tensor {
        Tensor {
            inner: Rc::new(RefCell::new(Node {
                shape,
                data,
                grad: None,
                requires_grad,
                op,
            })),
        }
    }

    pub fn shape(&self) -> Vec<usize> {
        self.inner.borrow().shape.clone()
    }

    pub fn len(&self) -> usize {
        self.inner.borrow().data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn requires_grad(&self) -> bool {
        self.inner.borrow().requires_grad
    }

    pub fn data(&self) -> Ref<'_, [f64]> {
        Ref::map(self.inner.borrow(), |n| n.data.as_slice())
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.inner.borrow().data.clone()
    }

    /// Value of a scalar (single-element) tensor.
    pub fn value(&self) -> f64 {
        let n = self.inner.borrow();
        assert_eq!(n.data.len(), 1, "value() on non-scalar tensor");
        n.data[0]
    }

    /// Current gradient, if one has been accumulated.
    pub fn grad(&self) -> Option<Vec<f64>> {
        self.inner.borrow().grad.clone()
    }

    /// Overwrite the stored values (used by optimizers and checkpoint
    /// loading). Shape must not change.
    pub fn set_data(&self, new: &[f64]) {
        let mut n = self.inner.borrow_mut();
        assert_eq!(n.data.len(), new.len(), "set_data length mismatch");
        n.data.copy_from_slice(new);
    }

    pub(crate) fn apply_to_data(&self, f: impl FnOnce(&mut [f64], Option<&[f64]>)) {
        let mut n = self.inner.borrow_mut();
        let Node { data, grad, .. } = &mut *n;
        f(data.as_mut_slice(), grad.as_deref());
    }

    /// Reset accumulated gradients of this tensor to exactly zero.
    pub fn zero_grad(&self) {
        let mut n = self.inner.borrow_mut();
        if let Some(g) = n.grad.as_mut() {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    /// Reverse-mode backpropagation from a scalar.
    ///
    /// Gradients accumulate: repeated calls without `zero_grad` sum.
    pub fn backward(&self) -> Result<()> {
        if self.len() != 1 {
            return Err(shape_mismatch(format!(
                "backward() requires a scalar loss, got shape {:?}",
                self.shape()
            )));
        }
        let order = self.topo_order();
        // Seed d(loss)/d(loss) = 1, accumulating if grad already present.
        {
            let mut n = self.inner.borrow_mut();
            let g = n.grad.get_or_insert_with(|| vec![0.0; 1]);
            g[0] += 1.0;
        }
        for t in order.iter().rev() {
            t.backprop_node();
        }
        Ok(())
    }

    /// Topological order via iterative post-order DFS. Nodes that do not
    /// require grad are still visited (their parents might).
    fn topo_order(&self) -> Vec<Tensor> {
        let mut order: Vec<Tensor> = Vec::new();
        let mut visited: std::collections::HashSet<*const RefCell<Node>> =
            std::collections::HashSet::new();
        let mut stack: Vec<(Tensor, bool)> = vec![(self.clone(), false)];
        while let Some((t, children_done)) = stack.pop() {
            let ptr = Rc::as_ptr(&t.inner);
            if children_done {
                order.push(t);
                continue;
            }
            if !visited.insert(ptr) {
                continue;
            }
            let parents = t.inner.borrow().op.parents();
            stack.push((t, true));
            for p in parents {
                if !visited.contains(&Rc::as_ptr(&p.inner)) {
                    stack.push((p, false));
                }
            }
        }
        order
    }

    fn ensure_grad(&self) {
        let mut n = self.inner.borrow_mut();
        if n.grad.is_none() {
            let len = n.data.len();
            n.grad = Some(vec![0.0; len]);
        }
    }

    fn add_to_grad(&self, contrib: &[f64]) {
        self.ensure_grad();
        let mut n = self.inner.borrow_mut();
        let g = n.grad.as_mut().unwrap();
        for (gi, ci) in g.iter_mut().zip(contrib) {
            *gi += *ci;
        }
    }

    /// Propagate this node's gradient into its parents.
    fn backprop_node(&self) {
        let (gout, op_needed) = {
            let n = self.inner.borrow();
            match (&n.op, &n.grad) {
                (Op::Leaf, _) | (_, None) => return,
                (_, Some(g)) => (g.clone(), true),
            }
        };
        if !op_needed {
            return;
        }
        let n = self.inner.borrow();
        match &n.op {
            Op::Leaf => {}
            Op::Add(a, b) => {
                if a.requires_grad_path() {
                    a.add_to_grad(&gout);
                }
                if b.requires_grad_path() {
                    b.add_to_grad(&gout);
                }
            }
            Op::Sub(a, b) => {
                if a.requires_grad_path() {
                    a.add_to_grad(&gout);
                }
                if b.requires_grad_path() {
                    let neg: Vec<f64> = gout.iter().map(|g| -g).collect();
                    b.add_to_grad(&neg);
                }
            }
            Op::Mul(a, b) => {
                if a.requires_grad_path() {
                    let bd = b.data();
                    let ga: Vec<f64> = gout.iter().zip(bd.iter()).map(|(g, x)| g * x).collect();
                    drop(bd);
                    a.add_to_grad(&ga);
                }
                if b.requires_grad_path() {
                    let ad = a.data();
                    let gb: Vec<f64> = gout.iter().zip(ad.iter()).map(|(g, x)| g * x).collect();
                    drop(ad);
                    b.add_to_grad(&gb);
                }
            }
            Op::Scale(a, c) => {
                if a.requires_grad_path() {
                    let ga: Vec<f64> = gout.iter().map(|g| g * c).collect();
                    a.add_to_grad(&ga);
                }
            }
            Op::ExpClamped(a, clamp) => {
                if a.requires_grad_path() {
                    let ad = a.data();
                    let ga: Vec<f64> = gout
                        .iter()
                        .zip(ad.iter().zip(n.data.iter()))
                        .map(|(g, (x, y))| if x.abs() < *clamp { g * y } else { 0.0 })
                        .collect();
                    drop(ad);
                    a.add_to_grad(&ga);
                }
            }
            Op::Relu(a) => {
                if a.requires_grad_path() {
                    let ad = a.data();
                    let ga: Vec<f64> = gout
                        .iter()
                        .zip(ad.iter())
                        .map(|(g, x)| if *x > 0.0 { *g } else { 0.0 })
                        .collect();
                    drop(ad);
                    a.add_to_grad(&ga);
                }
            }
            Op::LeakyRelu(a, slope) => {
                if a.requires_grad_path() {
                    let ad = a.data();
                    let ga: Vec<f64> = gout
                        .iter()
                        .zip(ad.iter())
                        .map(|(g, x)| if *x > 0.0 { *g } else { g * slope })
                        .collect();
                    drop(ad);
                    a.add_to_grad(&ga);
                }
            }
            Op::Sigmoid(a) => {
                if a.requires_grad_path() {
                    let ga: Vec<f64> = gout
                        .iter()
                        .zip(n.data.iter())
                        .map(|(g, y)| g * y * (1.0 - y))
                        .collect();
                    a.add_to_grad(&ga);
                }
            }
            Op::Tanh(a) => {
                if a.requires_grad_path() {
                    let ga: Vec<f64> = gout
                        .iter()
                        .zip(n.data.iter())
                        .map(|(g, y)| g * (1.0 - y * y))
                        .collect();
                    a.add_to_grad(&ga);
                }
            }
            Op::Conv1d {
                x,
                w,
                b,
                pad,
                pad_mode,
            } => backprop_conv1d(&gout, x, w, b, *pad, *pad_mode),
            Op::Linear { x, w, b } => backprop_linear(&gout, x, w, b),
            Op::AvgPool { x, kernel } => backprop_avg_pool(&gout, x, *kernel),
            Op::Gather { x, idx } => backprop_gather(&gout, x, idx),
            Op::Concat(parts) => backprop_concat(&gout, parts),
            Op::Mse { pred, target } => backprop_mse(&gout, pred, target),
            Op::Reshape(a) => {
                if a.requires_grad_path() {
                    a.add_to_grad(&gout);
                }
            }
        }
    }

    /// Whether gradient needs to flow into this node (it or any ancestor
    /// requires grad). Conservative: a node created from any grad-requiring
    /// parent is marked requires_grad at construction.
    fn requires_grad_path(&self) -> bool {
        self.inner.borrow().requires_grad
    }
}

fn any_requires(ts: &[&Tensor]) -> bool {
    ts.iter().any(|t| t.requires_grad())
}

fn assert_same_shape(a: &Tensor, b: &Tensor, op: &str) {
    assert_eq!(
        a.shape(),
        b.shape(),
        "{op}: shape mismatch {:?} vs {:?}",
        a.shape(),
        b.shape()
    );
}

pub fn add(a: &Tensor, b: &Tensor) -> Tensor {
    assert_same_shape(a, b, "add");
    let data: Vec<f64> = a
        .data()
        .iter()
        .zip(b.data().iter())
        .map(|(x, y)| x + y)
        .collect();
    Tensor::from_node(
        a.shape(),
        data,
        any_requires(&[a, b]),
        Op::Add(a.clone(), b.clone()),
    )
}

pub fn sub(a: &Tensor, b: &Tensor) -> Tensor {
    assert_same_shape(a, b, "sub");
    let data: Vec<f64> = a
        .data()
        .iter()
        .zip(b.data().iter())
        .map(|(x, y)| x - y)
        .collect();
    Tensor::from_node(
        a.shape(),
        data,
        any_requires(&[a, b]),
        Op::Sub(a.clone(), b.clone()),
    )
}

/// Element-wise product.
pub fn mul(a: &Tensor, b: &Tensor) -> Tensor {
    assert_same_shape(a, b, "mul");
    let data: Vec<f64> = a
        .data()
        .iter()
        .zip(b.data().iter())
        .map(|(x, y)| x * y)
        .collect();
    Tensor::from_node(
        a.shape(),
        data,
        any_requires(&[a, b]),
        Op::Mul(a.clone(), b.clone()),
    )
}

pub fn scale(a: &Tensor, c: f64) -> Tensor {
    let data: Vec<f64> = a.data().iter().map(|x| x * c).collect();
    Tensor::from_node(a.shape(), data, a.requires_grad(), Op::Scale(a.clone(), c))
}

/// exp(x) with the input clamped to `[-clamp, clamp]`.
pub fn exp_clamped(a: &Tensor, clamp: f64) -> Tensor {
    let data: Vec<f64> = a
        .data()
        .iter()
        .map(|x| x.clamp(-clamp, clamp).exp())
        .collect();
    Tensor::from_node(
        a.shape(),
        data,
        a.requires_grad(),
        Op::ExpClamped(a.clone(), clamp),
    )
}

pub fn relu(a: &Tensor) -> Tensor {
    let data: Vec<f64> = a.data().iter().map(|x| x.max(0.0)).collect();
    Tensor::from_node(a.shape(), data, a.requires_grad(), Op::Relu(a.clone()))
}

pub fn leaky_relu(a: &Tensor, slope: f64) -> Tensor {
    let data: Vec<f64> = a
        .data()
        .iter()
        .map(|x| if *x > 0.0 { *x } else { x * slope })
        .collect();
    Tensor::from_node(
        a.shape(),
        data,
        a.requires_grad(),
        Op::LeakyRelu(a.clone(), slope),
    )
}

pub fn sigmoid(a: &Tensor) -> Tensor {
    let data: Vec<f64> = a.data().iter().map(|x| 1.0 / (1.0 + (-x).exp())).collect();
    Tensor::from_node(a.shape(), data, a.requires_grad(), Op::Sigmoid(a.clone()))
}

pub fn tanh(a: &Tensor) -> Tensor {
    let data: Vec<f64> = a.data().iter().map(|x| x.tanh()).collect();
    Tensor::from_node(a.shape(), data, a.requires_grad(), Op::Tanh(a.clone()))
}

/// Split a shape into (leading batch size, channels, length) for conv-style
/// ops. Accepts `[C, N]` or `[B, C, N]`.
fn conv_dims(shape: &[usize]) -> Result<(usize, usize, usize)> {
    match shape {
        [c, n] => Ok((1, *c, *n)),
        [b, c, n] => Ok((*b, *c, *n)),
        other => Err(shape_mismatch(format!(
            "conv1d expects [C,N] or [B,C,N], got {other:?}"
        ))),
    }
}

/// Sliding dot product per output channel plus bias, stride 1.
///
/// `x`: `[C_in, N]` or `[B, C_in, N]`; output `[C_out, N']` or
/// `[B, C_out, N']` with `N' = N + 2*pad - K + 1`.
pub fn conv1d_forward(x: &Tensor, layer: &Conv1dLayer) -> Result<Tensor> {
    let xshape = x.shape();
    let (batch, c_in, n) = conv_dims(&xshape)?;
    if c_in != layer.in_channels {
        return Err(shape_mismatch(format!(
            "conv1d: input has {c_in} channels, layer expects {}",
            layer.in_channels
        )));
    }
    let k = layer.kernel_size;
    let pad = layer.pad;
    if n + 2 * pad < k {
        return Err(shape_mismatch(format!(
            "conv1d: input length {n} too short for kernel {k} with pad {pad}"
        )));
    }
    let n_out = n + 2 * pad - k + 1;
    let c_out = layer.out_channels;
    let w = layer.weights.data();
    let b = layer.bias.data();
    let xd = x.data();
    let mut out = vec![0.0; batch * c_out * n_out];
    // interior outputs never touch the padding: j + t - pad ∈ [0, n)
    // for all t when pad <= j < n_out - pad
    let interior_lo = pad;
    let interior_hi = n_out.saturating_sub(pad).max(interior_lo);
    for bi in 0..batch {
        let x_base = bi * c_in * n;
        let o_base = bi * c_out * n_out;
        for o in 0..c_out {
            let orow = o_base + o * n_out;
            out[orow..orow + n_out].iter_mut().for_each(|v| *v = b[o]);
            for c in 0..c_in {
                let wrow = (o * c_in + c) * k;
                let xrow = x_base + c * n;
                let wk = &w[wrow..wrow + k];
                let xs = &xd[xrow..xrow + n];
                for (t, &wt) in wk.iter().enumerate() {
                    if wt == 0.0 {
                        continue;
                    }
                    for j in interior_lo..interior_hi {
                        out[orow + j] += wt * xs[j + t - pad];
                    }
                }
                for j in (0..interior_lo).chain(interior_hi..n_out) {
                    let mut acc = 0.0;
                    for (t, &wt) in wk.iter().enumerate() {
                        let m = j + t;
                        let xv = match layer.pad_mode {
                            PadMode::Zero => {
                                if m < pad || m >= n + pad {
                                    0.0
                                } else {
                                    xs[m - pad]
                                }
                            }
                            PadMode::Replicate => xs[(m.max(pad) - pad).min(n - 1)],
                        };
                        acc += wt * xv;
                    }
                    out[orow + j] += acc;
                }
            }
        }
    }
    drop(w);
    drop(b);
    drop(xd);
    let out_shape = if xshape.len() == 2 {
        vec![c_out, n_out]
    } else {
        vec![batch, c_out, n_out]
    };
    let rg = x.requires_grad() || layer.weights.requires_grad() || layer.bias.requires_grad();
    Ok(Tensor::from_node(
        out_shape,
        out,
        rg,
        Op::Conv1d {
            x: x.clone(),
            w: layer.weights.clone(),
            b: layer.bias.clone(),
            pad,
            pad_mode: layer.pad_mode,
        },
    ))
}

fn backprop_conv1d(gout: &[f64], x: &Tensor, w: &Tensor, b: &Tensor, pad: usize, pm: PadMode) {
    let xshape = x.shape();
    let (batch, c_in, n) = conv_dims(&xshape).expect("validated in forward");
    let wshape = w.shape();
    let (c_out, k) = (wshape[0], wshape[2]);
    let n_out = n + 2 * pad - k + 1;
    let need_x = x.requires_grad_path();
    let need_w = w.requires_grad_path();
    let need_b = b.requires_grad_path();

    let xd = x.data();
    let wd = w.data();
    let mut gx = vec![0.0; if need_x { batch * c_in * n } else { 0 }];
    let mut gw = vec![0.0; if need_w { c_out * c_in * k } else { 0 }];
    let mut gb = vec![0.0; if need_b { c_out } else { 0 }];

    let interior_lo = pad;
    let interior_hi = n_out.saturating_sub(pad).max(interior_lo);
    for bi in 0..batch {
        let x_base = bi * c_in * n;
        let o_base = bi * c_out * n_out;
        for o in 0..c_out {
            let grow = &gout[o_base + o * n_out..o_base + (o + 1) * n_out];
            if need_b {
                gb[o] += grow.iter().sum::<f64>();
            }
            for c in 0..c_in {
                let wrow = (o * c_in + c) * k;
                let xrow = x_base + c * n;
                let xs = &xd[xrow..xrow + n];
                for t in 0..k {
                    if need_w {
                        let mut acc = 0.0;
                        for j in interior_lo..interior_hi {
                            acc += grow[j] * xs[j + t - pad];
                        }
                        gw[wrow + t] += acc;
                    }
                    if need_x {
                        let wt = wd[wrow + t];
                        if wt != 0.0 {
                            let gxs = &mut gx[xrow..xrow + n];
                            for j in interior_lo..interior_hi {
                                gxs[j + t - pad] += grow[j] * wt;
                            }
                        }
                    }
                }
                // edge outputs with clamped/zero padding
                for j in (0..interior_lo).chain(interior_hi..n_out) {
                    let g = grow[j];
                    if g == 0.0 {
                        continue;
                    }
                    for t in 0..k {
                        let m = j + t;
                        let src = match pm {
                            PadMode::Zero => {
                                if m < pad || m >= n + pad {
                                    None
                                } else {
                                    Some(m - pad)
                                }
                            }
                            PadMode::Replicate => Some((m.max(pad) - pad).min(n - 1)),
                        };
                        if let Some(mm) = src {
                            if need_w {
                                gw[wrow + t] += g * xs[mm];
                            }
                            if need_x {
                                gx[xrow + mm] += g * wd[wrow + t];
                            }
                        }
                    }
                }
            }
        }
    }
    drop(xd);
    drop(wd);
    if need_x {
        x.add_to_grad(&gx);
    }
    if need_w {
        w.add_to_grad(&gw);
    }
    if need_b {
        b.add_to_grad(&gb);
    }
}

/// `W·x + b` applied to the last axis. `x`: `[in]` or `[B, in]`.
pub fn linear_forward(x: &Tensor, layer: &LinearLayer) -> Result<Tensor> {
    let xshape = x.shape();
    let (batch, in_dim) = match xshape.as_slice() {
        [n] => (1, *n),
        [b, n] => (*b, *n),
        other => {
            return Err(shape_mismatch(format!(
                "linear expects [in] or [B,in], got {other:?}"
            )))
        }
    };
    if in_dim != layer.in_dim {
        return Err(shape_mismatch(format!(
            "linear: input dim {in_dim}, layer expects {}",
            layer.in_dim
        )));
    }
    let out_dim = layer.out_dim;
    let w = layer.weights.data();
    let b = layer.bias.data();
    let xd = x.data();
    let mut out = vec![0.0; batch * out_dim];
    for bi in 0..batch {
        let xrow = bi * in_dim;
        for o in 0..out_dim {
            let wrow = o * in_dim;
            let mut acc = b[o];
            for i in 0..in_dim {
                acc += w[wrow + i] * xd[xrow + i];
            }
            out[bi * out_dim + o] = acc;
        }
    }
    drop(w);
    drop(b);
    drop(xd);
    let out_shape = if xshape.len() == 1 {
        vec![out_dim]
    } else {
        vec![batch, out_dim]
    };
    let rg = x.requires_grad() || layer.weights.requires_grad() || layer.bias.requires_grad();
    Ok(Tensor::from_node(
        out_shape,
        out,
        rg,
        Op::Linear {
            x: x.clone(),
            w: layer.weights.clone(),
            b: layer.bias.clone(),
        },
    ))
}

fn backprop_linear(gout: &[f64], x: &Tensor, w: &Tensor, b: &Tensor) {
    let xshape = x.shape();
    let (batch, in_dim) = match xshape.as_slice() {
        [n] => (1, *n),
        [bb, n] => (*bb, *n),
        _ => unreachable!(),
    };
    let out_dim = w.shape()[0];
    let need_x = x.requires_grad_path();
    let need_w = w.requires_grad_path();
    let need_b = b.requires_grad_path();
    let xd = x.data();
    let wd = w.data();
    let mut gx = vec![0.0; if need_x { batch * in_dim } else { 0 }];
    let mut gw = vec![0.0; if need_w { out_dim * in_dim } else { 0 }];
    let mut gb = vec![0.0; if need_b { out_dim } else { 0 }];
    for bi in 0..batch {
        let xrow = bi * in_dim;
        for o in 0..out_dim {
            let g = gout[bi * out_dim + o];
            if g == 0.0 {
                continue;
            }
            if need_b {
                gb[o] += g;
            }
            let wrow = o * in_dim;
            for i in 0..in_dim {
                if need_w {
                    gw[wrow + i] += g * xd[xrow + i];
                }
                if need_x {
                    gx[xrow + i] += g * wd[wrow + i];
                }
            }
        }
    }
    drop(xd);
    drop(wd);
    if need_x {
        x.add_to_grad(&gx);
    }
    if need_w {
        w.add_to_grad(&gw);
    }
    if need_b {
        b.add_to_grad(&gb);
    }
}

/// Centered moving average over the last axis with replicate padding;
/// output length equals input length. Kernel must be odd.
pub fn avg_pool_smooth(x: &Tensor, kernel: usize) -> Result<Tensor> {
    if kernel % 2 == 0 {
        return Err(Error::InvalidParam(format!(
            "avg_pool kernel must be odd, got {kernel}"
        )));
    }
    let shape = x.shape();
    let n = *shape.last().expect("avg_pool on 0-d tensor");
    if kernel > n {
        return Err(Error::InvalidParam(format!(
            "avg_pool kernel {kernel} exceeds sequence length {n}"
        )));
    }
    let rows = x.len() / n;
    let half = kernel / 2;
    let xd = x.data();
    let mut out = vec![0.0; x.len()];
    for r in 0..rows {
        let base = r * n;
        for i in 0..n {
            let mut acc = 0.0;
            for d in 0..kernel {
                let m = (i + d).max(half) - half;
                let m = m.min(n - 1);
                acc += xd[base + m];
            }
            out[base + i] = acc / kernel as f64;
        }
    }
    drop(xd);
    Ok(Tensor::from_node(
        shape,
        out,
        x.requires_grad(),
        Op::AvgPool {
            x: x.clone(),
            kernel,
        },
    ))
}

fn backprop_avg_pool(gout: &[f64], x: &Tensor, kernel: usize) {
    if !x.requires_grad_path() {
        return;
    }
    let shape = x.shape();
    let n = *shape.last().unwrap();
    let rows = x.len() / n;
    let half = kernel / 2;
    let inv_k = 1.0 / kernel as f64;
    let mut gx = vec![0.0; x.len()];
    for r in 0..rows {
        let base = r * n;
        for i in 0..n {
            let g = gout[base + i] * inv_k;
            if g == 0.0 {
                continue;
            }
            for d in 0..kernel {
                let m = (i + d).max(half) - half;
                let m = m.min(n - 1);
                gx[base + m] += g;
            }
        }
    }
    x.add_to_grad(&gx);
}

/// Select indices along the last axis: `out[..., j] = x[..., idx[j]]`.
pub fn gather(x: &Tensor, idx: Rc<Vec<usize>>) -> Tensor {
    let shape = x.shape();
    let n = *shape.last().expect("gather on 0-d tensor");
    let rows = x.len() / n;
    for &i in idx.iter() {
        assert!(i < n, "gather index {i} out of range (len {n})");
    }
    let m = idx.len();
    let xd = x.data();
    let mut out = vec![0.0; rows * m];
    for r in 0..rows {
        let base = r * n;
        let obase = r * m;
        for (j, &i) in idx.iter().enumerate() {
            out[obase + j] = xd[base + i];
        }
    }
    drop(xd);
    let mut out_shape = shape;
    *out_shape.last_mut().unwrap() = m;
    Tensor::from_node(
        out_shape,
        out,
        x.requires_grad(),
        Op::Gather {
            x: x.clone(),
            idx,
        },
    )
}

fn backprop_gather(gout: &[f64], x: &Tensor, idx: &Rc<Vec<usize>>) {
    if !x.requires_grad_path() {
        return;
    }
    let shape = x.shape();
    let n = *shape.last().unwrap();
    let rows = x.len() / n;
    let m = idx.len();
    let mut gx = vec![0.0; x.len()];
    for r in 0..rows {
        let base = r * n;
        let obase = r * m;
        for (j, &i) in idx.iter().enumerate() {
            gx[base + i] += gout[obase + j];
        }
    }
    x.add_to_grad(&gx);
}

/// Concatenate along the last axis. All leading dims must match.
pub fn concat(parts: &[Tensor]) -> Tensor {
    assert!(!parts.is_empty(), "concat of zero tensors");
    let lead: Vec<usize> = {
        let s = parts[0].shape();
        s[..s.len() - 1].to_vec()
    };
    let mut total_last = 0;
    for p in parts {
        let s = p.shape();
        assert_eq!(
            &s[..s.len() - 1],
            lead.as_slice(),
            "concat: leading dims differ"
        );
        total_last += *s.last().unwrap();
    }
    let rows: usize = lead.iter().product::<usize>().max(1);
    let mut out = vec![0.0; rows * total_last];
    let mut offset = 0;
    for p in parts {
        let n = *p.shape().last().unwrap();
        let pd = p.data();
        for r in 0..rows {
            let src = r * n;
            let dst = r * total_last + offset;
            out[dst..dst + n].copy_from_slice(&pd[src..src + n]);
        }
        offset += n;
    }
    let mut out_shape = lead;
    out_shape.push(total_last);
    let rg = parts.iter().any(|p| p.requires_grad());
    Tensor::from_node(out_shape, out, rg, Op::Concat(parts.to_vec()))
}

fn backprop_concat(gout: &[f64], parts: &[Tensor]) {
    let lead_rows: usize = {
        let s = parts[0].shape();
        s[..s.len() - 1].iter().product::<usize>().max(1)
    };
    let total_last: usize = parts.iter().map(|p| *p.shape().last().unwrap()).sum();
    let mut offset = 0;
    for p in parts {
        let n = *p.shape().last().unwrap();
        if p.requires_grad_path() {
            let mut gp = vec![0.0; lead_rows * n];
            for r in 0..lead_rows {
                let src = r * total_last + offset;
                let dst = r * n;
                gp[dst..dst + n].copy_from_slice(&gout[src..src + n]);
            }
            p.add_to_grad(&gp);
        }
        offset += n;
    }
}

/// Same data under a new shape (element count must match); gradient
/// passes straight through.
pub fn reshape(x: &Tensor, new_shape: Vec<usize>) -> Tensor {
    assert_eq!(
        new_shape.iter().product::<usize>(),
        x.len(),
        "reshape {:?} -> {:?}",
        x.shape(),
        new_shape
    );
    Tensor::from_node(
        new_shape,
        x.to_vec(),
        x.requires_grad(),
        Op::Reshape(x.clone()),
    )
}

/// Mean-square error between two equal-shape tensors; returns a scalar.
pub fn mse_loss(pred: &Tensor, target: &Tensor) -> Result<Tensor> {
    if pred.shape() != target.shape() {
        return Err(shape_mismatch(format!(
            "mse_loss: {:?} vs {:?}",
            pred.shape(),
            target.shape()
        )));
    }
    let n = pred.len() as f64;
    let loss = pred
        .data()
        .iter()
        .zip(target.data().iter())
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / n;
    let rg = pred.requires_grad() || target.requires_grad();
    Ok(Tensor::from_node(
        vec![1],
        vec![loss],
        rg,
        Op::Mse {
            pred: pred.clone(),
            target: target.clone(),
        },
    ))
}

fn backprop_mse(gout: &[f64], pred: &Tensor, target: &Tensor) {
    let g = gout[0];
    let n = pred.len() as f64;
    let pd = pred.data();
    let td = target.data();
    let diff: Vec<f64> = pd
        .iter()
        .zip(td.iter())
        .map(|(p, t)| 2.0 * (p - t) / n * g)
        .collect();
    drop(pd);
    drop(td);
    if pred.requires_grad_path() {
        pred.add_to_grad(&diff);
    }
    if target.requires_grad_path() {
        let neg: Vec<f64> = diff.iter().map(|d| -d).collect();
        target.add_to_grad(&neg);
    }
}
