//! PAM-4 symbol generation and Gray mapping.
//!
//! Symbols are drawn as a seeded uniform i.i.d. stream (a
//! random-unrepeated sequence rather than a PRBS, so pattern-matching
//! equalizers cannot memorize a period). Gray mapping:
//! `00→0, 01→1, 11→2, 10→3`, symbols 0..3 riding on amplitudes
//! −3, −1, +1, +3.

use crate::rng::Stream;

/// Amplitude alphabet indexed by symbol value.
pub const LEVELS: [f64; 4] = [-3.0, -1.0, 1.0, 3.0];

/// Population standard deviation of the (equiprobable) alphabet.
pub const LEVEL_STD: f64 = 2.236_067_977_499_79; // sqrt(5)

/// Gray bit pair (msb, lsb) for each symbol value.
pub const GRAY_BITS: [(u8, u8); 4] = [(0, 0), (0, 1), (1, 1), (1, 0)];

/// Seeded uniform i.i.d. 4-ary symbol stream.
pub fn generate_rns_pam4(n_symbols: usize, master_seed: u64, capture: u64) -> Vec<u8> {
    let mut rng = Stream::new(master_seed, "pam4-symbols", capture);
    (0..n_symbols).map(|_| rng.uniform_usize(4) as u8).collect()
}

/// Amplitude of a symbol.
pub fn amplitude(symbol: u8) -> f64 {
    LEVELS[symbol as usize]
}

/// Nearest-level slicer; midpoint ties break toward the lower level.
pub fn slice_symbol(amp: f64) -> u8 {
    if amp <= -2.0 {
        0
    } else if amp <= 0.0 {
        1
    } else if amp <= 2.0 {
        2
    } else {
        3
    }
}

/// Hamming distance between the Gray bit pairs of two symbols.
pub fn bit_errors(a: u8, b: u8) -> u32 {
    let (a1, a0) = GRAY_BITS[a as usize];
    let (b1, b0) = GRAY_BITS[b as usize];
    ((a1 ^ b1) + (a0 ^ b0)) as u32
}
