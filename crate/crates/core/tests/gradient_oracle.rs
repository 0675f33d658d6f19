//! Central finite-difference gradient checks for every layer primitive.
//!
//! The oracle perturbs each parameter element by ±eps, evaluates the loss
//! through the forward path only, and compares the quotient against the
//! analytic gradient from backward(). It never reuses the backward code it
//! is checking.

use ponlab_core::nn::{
    self, avg_pool_smooth, conv1d_forward, exp_clamped, leaky_relu, linear_forward, mse_loss,
    mul, relu, sigmoid, tanh, Conv1dLayer, LinearLayer, PadMode, Tensor,
};
use ponlab_core::rng::Stream;

const EPS: f64 = 1e-5;
const TOL_SINGLE: f64 = 1e-4;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / f64::max(1.0, f64::max(a.abs(), b.abs()))
}

/// Check d(loss)/d(param) for every element of `param`, where `loss` is
/// rebuilt from scratch by `f` on every evaluation.
fn check_param_grad(param: &Tensor, f: &dyn Fn() -> f64, analytic: &[f64], tol: f64, what: &str) {
    let base = param.to_vec();
    for i in 0..base.len() {
        let mut plus = base.clone();
        plus[i] += EPS;
        param.set_data(&plus);
        let fp = f();
        let mut minus = base.clone();
        minus[i] -= EPS;
        param.set_data(&minus);
        let fm = f();
        param.set_data(&base);
        let numeric = (fp - fm) / (2.0 * EPS);
        let err = rel_err(analytic[i], numeric);
        assert!(
            err <= tol,
            "{what}[{i}]: analytic {} vs numeric {} (rel err {err:.3e})",
            analytic[i],
            numeric
        );
    }
}

fn random_tensor(shape: Vec<usize>, rng: &mut Stream, requires_grad: bool) -> Tensor {
    let n: usize = shape.iter().product();
    let data: Vec<f64> = (0..n).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
    Tensor::new(shape, data, requires_grad)
}

#[test]
fn conv1d_gradients_match_finite_differences() {
    for trial in 0..20 {
        let mut rng = Stream::new(1000 + trial, "gradcheck-conv", trial);
        let c_in = 1 + (trial as usize % 3);
        let c_out = 1 + ((trial as usize / 3) % 2);
        let k = 1 + 2 * (trial as usize % 2); // 1 or 3
        let n = 6 + (trial as usize % 4);
        let pad_mode = if trial % 2 == 0 {
            PadMode::Zero
        } else {
            PadMode::Replicate
        };
        let pad = if trial % 3 == 0 { 0 } else { k / 2 };
        let layer = Conv1dLayer::new(c_in, c_out, k, pad, pad_mode, &mut rng);
        let x = random_tensor(vec![c_in, n], &mut rng, true);
        let n_out = n + 2 * pad - k + 1;
        let target = random_tensor(vec![c_out, n_out], &mut rng, false);

        let forward = {
            let layer_w = layer.weights.clone();
            let layer_b = layer.bias.clone();
            let x = x.clone();
            let target = target.clone();
            let (ci, co, kk, pp, pm) = (c_in, c_out, k, pad, pad_mode);
            move || {
                let l = Conv1dLayer {
                    in_channels: ci,
                    out_channels: co,
                    kernel_size: kk,
                    pad: pp,
                    pad_mode: pm,
                    weights: layer_w.clone(),
                    bias: layer_b.clone(),
                };
                let y = conv1d_forward(&x, &l).unwrap();
                mse_loss(&y, &target).unwrap().value()
            }
        };

        let y = conv1d_forward(&x, &layer).unwrap();
        let loss = mse_loss(&y, &target).unwrap();
        loss.backward().unwrap();

        check_param_grad(
            &layer.weights,
            &forward,
            &layer.weights.grad().unwrap(),
            TOL_SINGLE,
            "conv.w",
        );
        check_param_grad(
            &layer.bias,
            &forward,
            &layer.bias.grad().unwrap(),
            TOL_SINGLE,
            "conv.b",
        );
        check_param_grad(&x, &forward, &x.grad().unwrap(), TOL_SINGLE, "conv.x");
    }
}

#[test]
fn linear_gradients_match_finite_differences() {
    for trial in 0..20 {
        let mut rng = Stream::new(2000 + trial, "gradcheck-linear", trial);
        let in_dim = 2 + (trial as usize % 5);
        let out_dim = 1 + (trial as usize % 4);
        let layer = LinearLayer::new(in_dim, out_dim, &mut rng);
        let x = random_tensor(vec![in_dim], &mut rng, true);
        let target = random_tensor(vec![out_dim], &mut rng, false);

        let forward = {
            let (w, b, x, t) = (
                layer.weights.clone(),
                layer.bias.clone(),
                x.clone(),
                target.clone(),
            );
            move || {
                let l = LinearLayer {
                    in_dim,
                    out_dim,
                    weights: w.clone(),
                    bias: b.clone(),
                };
                let y = linear_forward(&x, &l).unwrap();
                mse_loss(&y, &t).unwrap().value()
            }
        };

        let y = linear_forward(&x, &layer).unwrap();
        mse_loss(&y, &target).unwrap().backward().unwrap();
        check_param_grad(
            &layer.weights,
            &forward,
            &layer.weights.grad().unwrap(),
            TOL_SINGLE,
            "lin.w",
        );
        check_param_grad(
            &layer.bias,
            &forward,
            &layer.bias.grad().unwrap(),
            TOL_SINGLE,
            "lin.b",
        );
        check_param_grad(&x, &forward, &x.grad().unwrap(), TOL_SINGLE, "lin.x");
    }
}

#[test]
fn avg_pool_gradients_match_finite_differences() {
    for trial in 0..20 {
        let mut rng = Stream::new(3000 + trial, "gradcheck-avgpool", trial);
        let n = 5 + (trial as usize % 6);
        let k = [1usize, 3, 5][trial as usize % 3];
        let x = random_tensor(vec![n], &mut rng, true);
        let target = random_tensor(vec![n], &mut rng, false);

        let forward = {
            let (x, t) = (x.clone(), target.clone());
            move || {
                let y = avg_pool_smooth(&x, k).unwrap();
                mse_loss(&y, &t).unwrap().value()
            }
        };
        let y = avg_pool_smooth(&x, k).unwrap();
        mse_loss(&y, &target).unwrap().backward().unwrap();
        check_param_grad(&x, &forward, &x.grad().unwrap(), TOL_SINGLE, "pool.x");
    }
}

#[test]
fn elementwise_gradients_match_finite_differences() {
    for trial in 0..20 {
        let mut rng = Stream::new(4000 + trial, "gradcheck-elem", trial);
        let n = 4 + (trial as usize % 4);
        let x = random_tensor(vec![n], &mut rng, true);
        let z = random_tensor(vec![n], &mut rng, false);
        let target = random_tensor(vec![n], &mut rng, false);

        // y = exp(tanh(x) * z) - sigmoid(relu(x)) + leaky_relu(x)
        let build = |x: &Tensor, z: &Tensor| {
            let a = mul(&tanh(x), z);
            let b = exp_clamped(&a, nn::EXP_CLAMP);
            let c = sigmoid(&relu(x));
            let d = leaky_relu(x, 0.01);
            nn::add(&nn::sub(&b, &c), &d)
        };
        let forward = {
            let (x, z, t) = (x.clone(), z.clone(), target.clone());
            move || mse_loss(&build(&x, &z), &t).unwrap().value()
        };
        let y = build(&x, &z);
        mse_loss(&y, &target).unwrap().backward().unwrap();
        check_param_grad(&x, &forward, &x.grad().unwrap(), TOL_SINGLE, "elem.x");
    }
}
