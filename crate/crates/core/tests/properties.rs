//! Property tests over the spec-level invariants.

use proptest::prelude::*;

use ponlab_core::data::{frequency_calibrate, normalize, FcMode};
use ponlab_core::eq::{realign_indices, split_permutation};
use ponlab_core::link::pam4;
use ponlab_core::metrics::count_ber;
use ponlab_core::nn::{self, Conv1dLayer, PadMode, Tensor};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conv_identity_kernel_is_exact_identity(xs in prop::collection::vec(-1e3f64..1e3, 1..64)) {
        let layer = Conv1dLayer::from_weights(1, 1, vec![1.0], vec![0.0], 0, PadMode::Zero);
        let n = xs.len();
        let x = Tensor::constant(vec![1, n], xs.clone());
        let y = nn::conv1d_forward(&x, &layer).unwrap();
        prop_assert_eq!(y.to_vec(), xs);
    }

    #[test]
    fn avg_pool_preserves_constants(c in -1e3f64..1e3, n in 3usize..40, k_half in 0usize..3) {
        let k = 2 * k_half + 1;
        prop_assume!(k <= n);
        let x = Tensor::constant(vec![n], vec![c; n]);
        let y = nn::avg_pool_smooth(&x, k).unwrap();
        for v in y.to_vec() {
            prop_assert!((v - c).abs() < 1e-9 * c.abs().max(1.0));
        }
    }

    #[test]
    fn mse_nonnegative_and_zero_iff_equal(
        a in prop::collection::vec(-1e2f64..1e2, 1..32),
        delta in prop::collection::vec(-1e2f64..1e2, 1..32),
    ) {
        let n = a.len().min(delta.len());
        let a = &a[..n];
        let delta = &delta[..n];
        let ta = Tensor::constant(vec![n], a.to_vec());
        let tb = Tensor::constant(
            vec![n],
            a.iter().zip(delta).map(|(x, d)| x + d).collect(),
        );
        let loss = nn::mse_loss(&ta, &tb).unwrap().value();
        prop_assert!(loss >= 0.0);
        let all_zero = delta.iter().all(|d| *d == 0.0);
        prop_assert_eq!(loss == 0.0, all_zero);
    }

    #[test]
    fn frequency_calibration_is_linear(
        x in prop::collection::vec(-10f64..10.0, 8..32),
        z_seed in prop::collection::vec(-10f64..10.0, 8..32),
        a in -3f64..3.0,
        b in -3f64..3.0,
    ) {
        let n = x.len().min(z_seed.len());
        let x = &x[..n];
        let z = &z_seed[..n];
        let comb: Vec<f64> = x.iter().zip(z).map(|(xi, zi)| a * xi + b * zi).collect();
        let fc = |v: &[f64]| frequency_calibrate(v, n, 3, FcMode::Paper).unwrap();
        let lhs = fc(&comb);
        let fx = fc(x);
        let fz = fc(z);
        for i in 0..n {
            let rhs = a * fx[i] + b * fz[i];
            prop_assert!((lhs[i] - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn split_realign_identity_any_depth(p_exp in 2usize..7, data_seed in any::<u64>()) {
        let p = 1usize << p_exp;
        for l in 1..=p_exp {
            let perm = split_permutation(p, l);
            let inv = realign_indices(p, l);
            let data: Vec<f64> = (0..p)
                .map(|i| ((data_seed.wrapping_add(i as u64)) % 1000) as f64)
                .collect();
            let split: Vec<f64> = perm.iter().map(|j| data[*j]).collect();
            let back: Vec<f64> = inv.iter().map(|j| split[*j]).collect();
            prop_assert_eq!(back, data);
        }
    }

    #[test]
    fn normalize_defining_property(xs in prop::collection::vec(-1e3f64..1e3, 4..128)) {
        let spread = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - xs.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assume!(spread > 1e-6);
        let (z, _, std) = normalize(&xs).unwrap();
        prop_assert!(std > 0.0);
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let var = z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        prop_assert!(mean.abs() < 1e-9);
        prop_assert!((var - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ber_symmetric_under_simultaneous_relabel(
        decisions in prop::collection::vec(0u8..4, 16..256),
        perm_idx in 0usize..24,
    ) {
        let truth: Vec<u8> = decisions.iter().map(|d| (d + 1) % 4).collect();
        // one of the 24 permutations of 4 symbols
        let perms: Vec<Vec<u8>> = {
            let mut all = Vec::new();
            let items = [0u8, 1, 2, 3];
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            let p = [items[a], items[b], items[c], items[d]];
                            let mut sorted = p;
                            sorted.sort();
                            if sorted == items {
                                all.push(p.to_vec());
                            }
                        }
                    }
                }
            }
            all
        };
        let p = &perms[perm_idx];
        let base = count_ber(&decisions, &truth).unwrap();
        let d2: Vec<u8> = decisions.iter().map(|s| p[*s as usize]).collect();
        let t2: Vec<u8> = truth.iter().map(|s| p[*s as usize]).collect();
        let relabeled = count_ber(&d2, &t2).unwrap();
        // symbol-level errors are permutation invariant
        prop_assert_eq!(base.symbol_errors, relabeled.symbol_errors);
    }

    #[test]
    fn gray_map_hamming_consistency(a in 0u8..4, b in 0u8..4) {
        let d = pam4::bit_errors(a, b);
        prop_assert_eq!(d, pam4::bit_errors(b, a));
        prop_assert_eq!(d == 0, a == b);
        prop_assert!(d <= 2);
    }
}
