//! Maximum-joint-probability decoding of binned correlated blocks.

use crate::distribution::JointPmf;
use crate::error::{Error, Result};
use crate::subset::Subset;

use super::binning::{bin_bits, block_symbols, Binning};

/// Log-probabilities within this margin count as ties.
const TIE_EPS: f64 = 1e-9;

#[derive(Debug, Clone)]
struct LogMarginal {
    members: Vec<usize>,
    sizes: Vec<usize>,
    logp: Vec<f64>,
}

/// Decoder shared by all users for one source and block length.
///
/// Decoder `i` searches every tuple of blocks `(w_j)_{j≠i}` whose bin indices
/// match the received ones and returns the tuple maximising
/// `Π_t P(w_1[t], ..., w_L[t])` together with its own block. Tuples are
/// visited in lexicographic order (users ascending, blocks ascending) and
/// only a strictly better one replaces the incumbent, so ties go to the
/// lexicographically smallest tuple. Marginals of partially assigned tuples
/// bound the joint probability from above and prune the search.
#[derive(Debug, Clone)]
pub struct SourceDecoder {
    users: usize,
    m: usize,
    alphabets: Vec<usize>,
    // prefixes[i][k]: marginal over {i} ∪ (first k+1 users other than i)
    prefixes: Vec<Vec<LogMarginal>>,
}

impl SourceDecoder {
    pub fn new(pmf: &JointPmf, m: usize) -> Self {
        let users = pmf.users();
        let prefixes = (0..users)
            .map(|i| {
                let mut subset = Subset::singleton(i);
                (0..users)
                    .filter(|&j| j != i)
                    .map(|j| {
                        subset = subset.with(j);
                        let marginal = pmf.marginal(subset).expect("subset in range");
                        LogMarginal {
                            members: subset.members().collect(),
                            sizes: marginal.sizes,
                            logp: marginal
                                .probs
                                .iter()
                                .map(|&p| if p > 0.0 { p.log2() } else { f64::NEG_INFINITY })
                                .collect(),
                        }
                    })
                    .collect()
            })
            .collect();
        SourceDecoder {
            users,
            m,
            alphabets: pmf.alphabet_sizes().to_vec(),
            prefixes,
        }
    }

    pub fn block_len(&self) -> usize {
        self.m
    }

    /// Decodes all blocks at `user` from its own block and the bin indices
    /// of the others (`bins[user]` is ignored). The result has one block per
    /// user, with the decoder's own block at its own position.
    pub fn decode(
        &self,
        user: usize,
        own: &[usize],
        bins: &[u64],
        binnings: &[Binning],
    ) -> Result<Vec<Vec<usize>>> {
        if user >= self.users {
            return Err(Error::UserOutOfRange {
                user,
                users: self.users,
            });
        }
        if own.len() != self.m || bins.len() != self.users || binnings.len() != self.users {
            return Err(Error::ShapeMismatch(format!(
                "decoder for {} users and block length {} got {} symbols, {} bins, {} binnings",
                self.users,
                self.m,
                own.len(),
                bins.len(),
                binnings.len()
            )));
        }
        let others: Vec<usize> = (0..self.users).filter(|&j| j != user).collect();
        let candidates: Vec<Vec<Vec<usize>>> = others
            .iter()
            .map(|&j| {
                let members = binnings[j].members(bins[j]);
                let members = if members.is_empty() { vec![0] } else { members };
                members
                    .into_iter()
                    .map(|b| block_symbols(b, self.alphabets[j], self.m))
                    .collect()
            })
            .collect();

        let mut search = Search {
            decoder: self,
            user,
            others: &others,
            candidates: &candidates,
            choice: vec![0; others.len()],
            best: None,
            best_logp: f64::NEG_INFINITY,
        };
        let mut assigned: Vec<&[usize]> = vec![own; self.users];
        search.descend(0, &mut assigned);
        let choice = search.best.unwrap_or_else(|| vec![0; others.len()]);

        let mut blocks = vec![own.to_vec(); self.users];
        for (slot, &j) in others.iter().enumerate() {
            blocks[j] = candidates[slot][choice[slot]].clone();
        }
        Ok(blocks)
    }
}

struct Search<'a> {
    decoder: &'a SourceDecoder,
    user: usize,
    others: &'a [usize],
    candidates: &'a [Vec<Vec<usize>>],
    choice: Vec<usize>,
    best: Option<Vec<usize>>,
    best_logp: f64,
}

impl<'a> Search<'a> {
    fn descend(&mut self, level: usize, assigned: &mut Vec<&'a [usize]>) {
        let marginal = &self.decoder.prefixes[self.user][level];
        let last = level + 1 == self.others.len();
        let j = self.others[level];
        for (c, block) in self.candidates[level].iter().enumerate() {
            assigned[j] = block;
            let logp = (0..self.decoder.m)
                .map(|t| {
                    let idx = marginal
                        .members
                        .iter()
                        .zip(&marginal.sizes)
                        .fold(0, |acc, (&u, &size)| acc * size + assigned[u][t]);
                    marginal.logp[idx]
                })
                .sum::<f64>();
            // marginals upper-bound every completion
            if logp == f64::NEG_INFINITY || logp <= self.best_logp + TIE_EPS {
                continue;
            }
            self.choice[level] = c;
            if last {
                self.best_logp = logp;
                self.best = Some(self.choice.clone());
            } else {
                self.descend(level + 1, assigned);
            }
        }
    }
}

/// Stand-alone decoding at `user` with binnings rebuilt from `(rates, m,
/// seed)`, exactly as the encoders built them.
pub fn sw_decode(
    pmf: &JointPmf,
    user: usize,
    own: &[usize],
    bins: &[u64],
    rates: &[f64],
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    let m = own.len();
    let binnings = pmf
        .alphabet_sizes()
        .iter()
        .zip(rates)
        .enumerate()
        .map(|(j, (&a, &r))| Binning::new(a, m, bin_bits(m, r), seed, j))
        .collect::<Result<Vec<_>>>()?;
    SourceDecoder::new(pmf, m).decode(user, own, bins, &binnings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::simulator::binning::block_index;

    fn encode_all(
        pmf: &JointPmf,
        rows: &[Vec<usize>],
        binnings: &[Binning],
    ) -> (Vec<Vec<usize>>, Vec<u64>) {
        let blocks: Vec<Vec<usize>> = (0..pmf.users())
            .map(|j| rows.iter().map(|r| r[j]).collect())
            .collect();
        let bins = blocks
            .iter()
            .zip(binnings)
            .map(|(b, bin)| bin.encode(b))
            .collect();
        (blocks, bins)
    }

    #[test]
    fn identical_sources_decode_from_own_block() {
        let pmf = fixtures::identical_uniform(3);
        let m = 7;
        let binnings: Vec<Binning> = (0..3)
            .map(|j| Binning::new(2, m, 0, 1, j).unwrap())
            .collect();
        let decoder = SourceDecoder::new(&pmf, m);
        for seed in 0..20 {
            let rows = pmf.sample(m, seed);
            let (blocks, bins) = encode_all(&pmf, &rows, &binnings);
            for i in 0..3 {
                assert_eq!(
                    decoder.decode(i, &blocks[i], &bins, &binnings).unwrap(),
                    blocks
                );
            }
        }
    }

    #[test]
    fn zero_rate_xor_guesses_the_smallest_block() {
        let pmf = fixtures::xor_triple();
        let m = 4;
        let rows = pmf.sample(m, 3);
        let blocks: Vec<Vec<usize>> = (0..3)
            .map(|j| rows.iter().map(|r| r[j]).collect())
            .collect();
        let decoded = sw_decode(&pmf, 0, &blocks[0], &[0, 0, 0], &[0.0; 3], 11).unwrap();
        // every w2 is consistent; the lexicographically first is all zeros
        assert_eq!(decoded[1], vec![0; m]);
        let w3: Vec<usize> = blocks[0].clone();
        assert_eq!(decoded[2], w3);
    }

    #[test]
    fn zero_rate_xor_error_rate_matches_counting() {
        // the decoder is right only when w2 happens to be the all-zero block
        let pmf = fixtures::xor_triple();
        let m = 3;
        let trials = 4000;
        let mut errors = 0;
        for seed in 0..trials {
            let rows = pmf.sample(m, seed);
            let blocks: Vec<Vec<usize>> = (0..3)
                .map(|j| rows.iter().map(|r| r[j]).collect())
                .collect();
            let decoded = sw_decode(&pmf, 0, &blocks[0], &[0, 0, 0], &[0.0; 3], 1).unwrap();
            if decoded != blocks {
                errors += 1;
            }
        }
        let rate = errors as f64 / trials as f64;
        let expected = 1.0 - 0.5f64.powi(m as i32);
        assert!((rate - expected).abs() < 0.03, "{rate} vs {expected}");
    }

    #[test]
    fn xor_with_slack_decodes_reliably() {
        let pmf = fixtures::xor_triple();
        let m = 6;
        let rates = [0.8; 3];
        let decoder = SourceDecoder::new(&pmf, m);
        let trials = 2000u64;
        let mut block_errors = 0;
        for trial in 0..trials {
            let binnings: Vec<Binning> = (0..3)
                .map(|j| Binning::new(2, m, bin_bits(m, rates[j]), 1000 + trial, j).unwrap())
                .collect();
            let rows = pmf.sample(m, trial);
            let (blocks, bins) = encode_all(&pmf, &rows, &binnings);
            for i in 0..3 {
                if decoder.decode(i, &blocks[i], &bins, &binnings).unwrap() != blocks {
                    block_errors += 1;
                }
            }
        }
        let rate = block_errors as f64 / (3 * trials) as f64;
        assert!(rate < 0.15, "block error rate {rate}");
    }

    #[test]
    fn decoded_blocks_match_their_bins() {
        let pmf = fixtures::xor_triple();
        let m = 5;
        let binnings: Vec<Binning> = (0..3)
            .map(|j| Binning::new(2, m, 2, 4, j).unwrap())
            .collect();
        let rows = pmf.sample(m, 77);
        let (blocks, bins) = encode_all(&pmf, &rows, &binnings);
        let decoded = SourceDecoder::new(&pmf, m)
            .decode(1, &blocks[1], &bins, &binnings)
            .unwrap();
        for j in 0..3 {
            assert_eq!(binnings[j].bin_of(block_index(&decoded[j], 2)), bins[j]);
        }
        assert_eq!(decoded[1], blocks[1]);
    }
}
