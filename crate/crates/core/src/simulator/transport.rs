//! Symbol-level transport of bin indices through the relay.
//!
//! This is a simple concrete scheme, not a capacity-achieving one. The
//! `n` channel uses are split into `L + 1` equal slots. In slot `s < L`
//! user `s` sends its index, encoded with a systematic random linear code
//! over `GF(q)`, while the other users send zeros. The relay decodes it by
//! maximum likelihood, re-encodes it and broadcasts it during slot `s + 1`,
//! where every other user decodes it by maximum likelihood.

use rand::Rng;

use crate::channel::ChannelSpec;
use crate::error::Result;

use super::field::FieldChannel;

/// Linear block code over `GF(q)` mapping `k` message symbols to `n`.
///
/// The first `min(k, n)` rows copy message symbols; the remaining rows are
/// uniform random combinations. With `n < k` the code is not injective and
/// decoding resolves the ambiguity towards small indices.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCode {
    q: u32,
    k: usize,
    rows: Vec<Vec<u32>>,
}

impl LinearCode {
    pub fn systematic_random<R: Rng + ?Sized>(q: u32, k: usize, n: usize, rng: &mut R) -> Self {
        let rows = (0..n)
            .map(|t| {
                if t < k {
                    (0..k).map(|c| u32::from(c == t)).collect()
                } else {
                    (0..k).map(|_| rng.random_range(0..q)).collect()
                }
            })
            .collect();
        LinearCode { q, k, rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn encode(&self, message: &[u32]) -> Vec<u32> {
        let q = self.q as u64;
        self.rows
            .iter()
            .map(|row| {
                (row.iter()
                    .zip(message)
                    .map(|(&g, &u)| g as u64 * u as u64)
                    .sum::<u64>()
                    % q) as u32
            })
            .collect()
    }

    /// Encodes an integer index through its base-`q` digits.
    pub fn encode_index(&self, index: u64) -> Vec<u32> {
        self.encode(&index_digits(index, self.q, self.k))
    }

    /// Maximum-likelihood index in `0..candidates` for additive noise with
    /// log-probabilities `noise_log`; ties go to the smallest index.
    pub fn decode_index(&self, received: &[u32], noise_log: &[f64], candidates: u64) -> u64 {
        let q = self.q;
        let mut best = (0u64, f64::NEG_INFINITY);
        for index in 0..candidates {
            let codeword = self.encode_index(index);
            let ll: f64 = codeword
                .iter()
                .zip(received)
                .map(|(&c, &y)| noise_log[((y + q - c) % q) as usize])
                .sum();
            if ll > best.1 {
                best = (index, ll);
            }
        }
        best.0
    }
}

/// Smallest `k` with `q^k >= count`.
pub fn digits_needed(count: u64, q: u32) -> usize {
    let mut k = 0;
    let mut cap = 1u128;
    while cap < count as u128 {
        cap *= q as u128;
        k += 1;
    }
    k
}

/// Little-endian base-`q` digits of `index`.
pub fn index_digits(mut index: u64, q: u32, k: usize) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = (index % q as u64) as u32;
            index /= q as u64;
            d
        })
        .collect()
}

fn log_pmf(pmf: &[f64]) -> Vec<f64> {
    pmf.iter()
        .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
        .collect()
}

/// Sends every user's index to every other user; `estimates[i][j]` is user
/// `i`'s estimate of the index of user `j` (`estimates[i][i]` is exact).
pub fn transport<R: Rng + ?Sized>(
    spec: &ChannelSpec,
    channel: &FieldChannel,
    indices: &[u64],
    bin_counts: &[u64],
    channel_uses: usize,
    code_rng: &mut R,
    noise_rng: &mut R,
) -> Result<Vec<Vec<u64>>> {
    let users = indices.len();
    let q = channel.q();
    let slot = channel_uses / (users + 1);
    let codes: Vec<LinearCode> = bin_counts
        .iter()
        .map(|&count| LinearCode::systematic_random(q, digits_needed(count, q), slot, code_rng))
        .collect();
    let relay_log = log_pmf(spec.noise_relay());
    let user_logs: Vec<Vec<f64>> = (0..users).map(|i| log_pmf(spec.noise_user(i))).collect();

    let mut estimates: Vec<Vec<u64>> = (0..users).map(|_| indices.to_vec()).collect();
    let mut relay_word: Vec<u32> = vec![0; slot];
    for s in 0..=users {
        let uplink: Vec<u32> = if s < users {
            codes[s].encode_index(indices[s])
        } else {
            vec![0; slot]
        };
        let mut relay_heard = Vec::with_capacity(slot);
        let mut users_heard: Vec<Vec<u32>> = vec![Vec::with_capacity(slot); users];
        for t in 0..slot {
            let mut inputs = vec![0u32; users];
            if s < users {
                inputs[s] = uplink[t];
            }
            let out = channel.channel_use(&inputs, relay_word[t], noise_rng)?;
            relay_heard.push(out.relay);
            for (heard, y) in users_heard.iter_mut().zip(out.users) {
                heard.push(y);
            }
        }
        if s >= 1 {
            let j = s - 1;
            for i in (0..users).filter(|&i| i != j) {
                estimates[i][j] =
                    codes[j].decode_index(&users_heard[i], &user_logs[i], bin_counts[j]);
            }
        }
        if s < users {
            let relay_estimate = codes[s].decode_index(&relay_heard, &relay_log, bin_counts[s]);
            relay_word = codes[s].encode_index(relay_estimate);
        }
    }
    Ok(estimates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn digit_counts() {
        assert_eq!(digits_needed(1, 2), 0);
        assert_eq!(digits_needed(8, 2), 3);
        assert_eq!(digits_needed(9, 3), 2);
        assert_eq!(digits_needed(10, 3), 3);
        assert_eq!(index_digits(11, 3, 3), vec![2, 0, 1]);
    }

    #[test]
    fn noiseless_codes_decode_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let code = LinearCode::systematic_random(3, 3, 5, &mut rng);
        let zero_noise = [0.0, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for index in 0..27 {
            let word = code.encode_index(index);
            assert_eq!(code.decode_index(&word, &zero_noise, 27), index);
        }
    }

    #[test]
    fn noiseless_transport_delivers_everything() {
        let spec = ChannelSpec::noiseless(2, 3).unwrap();
        let channel = FieldChannel::new(&spec).unwrap();
        let mut code_rng = ChaCha8Rng::seed_from_u64(1);
        let mut noise_rng = ChaCha8Rng::seed_from_u64(2);
        let indices = [5u64, 0, 7];
        let est = transport(
            &spec,
            &channel,
            &indices,
            &[8, 8, 8],
            12,
            &mut code_rng,
            &mut noise_rng,
        )
        .unwrap();
        for row in &est {
            assert_eq!(row, &indices.to_vec());
        }
    }

    #[test]
    fn too_few_uses_fall_back_to_index_zero() {
        let spec = ChannelSpec::noiseless(2, 3).unwrap();
        let channel = FieldChannel::new(&spec).unwrap();
        let mut rng_a = ChaCha8Rng::seed_from_u64(1);
        let mut rng_b = ChaCha8Rng::seed_from_u64(2);
        let est = transport(
            &spec,
            &channel,
            &[3, 2, 1],
            &[4, 4, 4],
            3,
            &mut rng_a,
            &mut rng_b,
        )
        .unwrap();
        assert_eq!(est[0], vec![3, 0, 0]);
        assert_eq!(est[2], vec![0, 0, 1]);
    }
}
