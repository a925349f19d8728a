//! Random binning of source blocks and index dithering.
//!
//! A user's block `(w[1], ..., w[m])` is identified with its base-`|A|`
//! integer, `w[1]` most significant. Binning draws a uniformly random
//! permutation of the block space from the seed and keeps the low
//! `bits` bits, so each block lands in a uniformly distributed bin and bins
//! are balanced. Bin and dither indices are zero-based.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rates::REGION_TOLERANCE;

/// Largest block space a binning table may cover.
pub const MAX_BLOCK_SPACE: u64 = 1 << 20;
/// Widest bin index supported.
pub const MAX_BIN_BITS: u32 = 62;

/// Bits of bin index for rate `rate` and block length `m`:
/// `ceil(m · rate)`, so rates are never understated.
pub fn bin_bits(m: usize, rate: f64) -> u32 {
    let exact = m as f64 * rate.max(0.0);
    (exact - REGION_TOLERANCE)
        .ceil()
        .max(0.0)
        .min(MAX_BIN_BITS as f64) as u32
}

/// Number of blocks of length `m` over `alphabet` symbols, if tractable.
pub fn block_space(alphabet: usize, m: usize) -> Result<u64> {
    (alphabet as u64)
        .checked_pow(m as u32)
        .filter(|&n| n <= MAX_BLOCK_SPACE)
        .ok_or_else(|| {
            Error::TractabilityExceeded(format!(
                "{alphabet}^{m} blocks exceeds the binning limit of {MAX_BLOCK_SPACE}"
            ))
        })
}

/// Integer identifier of a block.
pub fn block_index(symbols: &[usize], alphabet: usize) -> u64 {
    symbols
        .iter()
        .fold(0u64, |acc, &s| acc * alphabet as u64 + s as u64)
}

/// Inverse of [`block_index`].
pub fn block_symbols(mut index: u64, alphabet: usize, m: usize) -> Vec<usize> {
    let mut symbols = vec![0; m];
    for slot in symbols.iter_mut().rev() {
        *slot = (index % alphabet as u64) as usize;
        index /= alphabet as u64;
    }
    symbols
}

/// Seeded binning function of one user.
#[derive(Debug, Clone, PartialEq)]
pub struct Binning {
    alphabet: usize,
    m: usize,
    bits: u32,
    bins: Vec<u64>,
}

impl Binning {
    /// The binning of `user`; identical for equal `(seed, user, alphabet, m)`
    /// at every encoder and decoder. Binnings with more bits refine those
    /// with fewer.
    pub fn new(alphabet: usize, m: usize, bits: u32, seed: u64, user: usize) -> Result<Self> {
        let space = block_space(alphabet, m)?;
        let bits = bits.min(MAX_BIN_BITS);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(user as u64);
        let mut perm: Vec<u64> = (0..space).collect();
        perm.shuffle(&mut rng);
        let mask = (1u64 << bits) - 1;
        let bins = perm.into_iter().map(|p| p & mask).collect();
        Ok(Binning {
            alphabet,
            m,
            bits,
            bins,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn bin_count(&self) -> u64 {
        1u64 << self.bits
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn block_len(&self) -> usize {
        self.m
    }

    pub fn bin_of(&self, block: u64) -> u64 {
        self.bins[block as usize]
    }

    pub fn encode(&self, symbols: &[usize]) -> u64 {
        self.bin_of(block_index(symbols, self.alphabet))
    }

    /// Blocks in `bin`, ascending.
    pub fn members(&self, bin: u64) -> Vec<u64> {
        self.bins
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == bin)
            .map(|(block, _)| block as u64)
            .collect()
    }
}

/// Bin index of `symbols` for `user` at rate `rate`.
pub fn sw_encode(
    symbols: &[usize],
    alphabet: usize,
    user: usize,
    rate: f64,
    seed: u64,
) -> Result<u64> {
    let binning = Binning::new(
        alphabet,
        symbols.len(),
        bin_bits(symbols.len(), rate),
        seed,
        user,
    )?;
    Ok(binning.encode(symbols))
}

/// `(index + dither) mod modulus`.
pub fn apply_dither(index: u64, dither: u64, modulus: u64) -> Result<u64> {
    check_index(index, modulus)?;
    check_index(dither, modulus)?;
    Ok(((index as u128 + dither as u128) % modulus as u128) as u64)
}

/// `(index - dither) mod modulus`.
pub fn remove_dither(index: u64, dither: u64, modulus: u64) -> Result<u64> {
    check_index(index, modulus)?;
    check_index(dither, modulus)?;
    Ok(((index as u128 + modulus as u128 - dither as u128) % modulus as u128) as u64)
}

fn check_index(index: u64, modulus: u64) -> Result<()> {
    if index >= modulus {
        Err(Error::IndexOutOfRange { index, modulus })
    } else {
        Ok(())
    }
}
