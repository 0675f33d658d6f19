//! Waveform-level simulator and equalizer laboratory for a downstream
//! 100 Gb/s PAM-4 passive optical network.
//!
//! The crate is organized around the stages of the link:
//!
//! - [`nn`] — a minimal deterministic tensor/autodiff engine with exactly
//!   the layer types the equalizer models need (1-D convolutions, dense
//!   layers, average pooling, element-wise exp/product, MSE loss) plus
//!   SGD/Adam optimizers and a binary checkpoint format.
//! - [`link`] — PAM-4 transmitter, split-step fiber propagation (CD, CD
//!   slope, loss, Kerr), APD/TIA receiver chain, timing jitter, and
//!   symbol-rate synchronization.
//! - [`data`] — normalization, sliding windows, train/val/test splits and
//!   the frequency-calibration preprocessing filter.
//! - [`eq`] — the three equalizers under study: decision-directed FFE-LMS,
//!   a feed-forward DNN, and FC-SCINet (Decomp + binary-tree SCIBlock),
//!   with their training loops.
//! - [`metrics`] — direct-counting BER, median BER, real-multiplications-
//!   per-symbol accounting and the RMpS × mBER trade-off product.
//! - [`io`] — little-endian binary dumps with JSON sidecars for waveforms,
//!   symbol frames and dataset caches.

pub mod data;
pub mod eq;
pub mod error;
pub mod io;
pub mod link;
pub mod metrics;
pub mod nn;
pub mod rng;

pub use error::{Error, Result};
pub use num_complex;
