//! Joint source distributions and their Shannon entropies.
//!
//! A [`JointPmf`] stores the full probability table of `(W_1, ..., W_L)`,
//! flattened row-major with variable 1 varying slowest. All logarithms are
//! base 2 and `0 log 0 = 0`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::subset::{Subset, MAX_USERS};

/// Allowed deviation of the probability total from one.
pub const PMF_TOLERANCE: f64 = 1e-12;

/// Minimum number of users.
pub const MIN_USERS: usize = 2;

/// Validated joint probability table of `L` discrete sources.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    alphabet_sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    /// Validates a dense probability table.
    pub fn new(alphabet_sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let len = table_len(&alphabet_sizes)?;
        if probs.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "expected {len} probabilities for alphabet sizes {alphabet_sizes:?}, got {}",
                probs.len()
            )));
        }
        for (index, &value) in probs.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteProbability { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeProbability { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PMF_TOLERANCE {
            return Err(Error::SumNotOne { sum });
        }
        Ok(JointPmf {
            alphabet_sizes,
            probs,
        })
    }

    /// Builds a table from `(symbols, probability)` pairs; absent outcomes
    /// have probability zero and repeated outcomes accumulate.
    pub fn from_sparse<I>(alphabet_sizes: Vec<usize>, outcomes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let len = table_len(&alphabet_sizes)?;
        let mut probs = vec![0.0; len];
        for (symbols, p) in outcomes {
            let idx = flat_index(&alphabet_sizes, &symbols)?;
            probs[idx] += p;
        }
        JointPmf::new(alphabet_sizes, probs)
    }

    pub fn users(&self) -> usize {
        self.alphabet_sizes.len()
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.alphabet_sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn full_set(&self) -> Subset {
        Subset::full(self.users())
    }

    /// Probability of one joint outcome.
    pub fn prob(&self, symbols: &[usize]) -> Result<f64> {
        Ok(self.probs[flat_index(&self.alphabet_sizes, symbols)?])
    }

    /// Symbols of the outcome stored at flat position `index`.
    pub fn outcome(&self, mut index: usize) -> Vec<usize> {
        let mut symbols = vec![0; self.users()];
        for (slot, &size) in symbols.iter_mut().zip(&self.alphabet_sizes).rev() {
            *slot = index % size;
            index /= size;
        }
        symbols
    }

    /// Marginal distribution of the variables in `subset`, by direct
    /// summation over the full table.
    pub fn marginal(&self, subset: Subset) -> Result<Marginal> {
        let subset = subset.check(self.users())?;
        let vars: Vec<usize> = subset.members().collect();
        let sizes: Vec<usize> = vars.iter().map(|&v| self.alphabet_sizes[v]).collect();
        // stride of each full-table variable inside the marginal, zero if summed out
        let mut strides = vec![0usize; self.users()];
        let mut acc = 1;
        for (&v, &size) in vars.iter().zip(&sizes).rev() {
            strides[v] = acc;
            acc *= size;
        }
        let mut probs = vec![0.0; acc];
        let mut digits = vec![0usize; self.users()];
        let mut target = 0usize;
        for &p in &self.probs {
            probs[target] += p;
            // odometer increment, last variable fastest
            for v in (0..self.users()).rev() {
                digits[v] += 1;
                target += strides[v];
                if digits[v] < self.alphabet_sizes[v] {
                    break;
                }
                target -= strides[v] * digits[v];
                digits[v] = 0;
            }
        }
        Ok(Marginal {
            subset,
            sizes,
            probs,
        })
    }

    /// `H(W_S)` in bits.
    pub fn entropy(&self, subset: Subset) -> Result<f64> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(entropy_bits(&self.marginal(subset)?.probs))
    }

    /// `H(W_S | W_T)` in bits; equals `H(W_S)` when `T` is empty.
    pub fn conditional_entropy(&self, s: Subset, t: Subset) -> Result<f64> {
        if s.is_empty() {
            return Err(Error::EmptySubset);
        }
        if !s.is_disjoint(t) {
            return Err(Error::OverlappingSubsets(s.bits(), t.bits()));
        }
        let joint = self.entropy(s.union(t))?;
        if t.is_empty() {
            return Ok(joint);
        }
        Ok(joint - self.entropy(t)?)
    }

    /// Entropies of every subset, computed by summing variables out of the
    /// full table one at a time.
    pub fn entropy_table(&self, exec: Execution) -> EntropyTable {
        let users = self.users();
        let mut h = vec![0.0; 1 << users];
        let full = self.full_set();
        h[full.index()] = entropy_bits(&self.probs);
        let root = Marginal {
            subset: full,
            sizes: self.alphabet_sizes.clone(),
            probs: self.probs.clone(),
        };
        // Subsets reached by first removing variable j, then only variables above j.
        let branches = par::map_indexed(users, exec, |j| {
            let mut out = Vec::with_capacity(1 << (users - j - 1));
            let child = root.sum_out(j);
            descend(&child, j, &mut out);
            out
        });
        for (mask, value) in branches.into_iter().flatten() {
            h[mask.index()] = value;
        }
        h[0] = 0.0;
        EntropyTable { users, h }
    }

    /// Draws `m` i.i.d. joint outcomes; row `t` holds `(W_1[t], ..., W_L[t])`.
    pub fn sample(&self, m: usize, seed: u64) -> Vec<Vec<usize>> {
        let sampler = Sampler::new(self);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..m)
            .map(|_| self.outcome(sampler.draw(&mut rng)))
            .collect()
    }
}

fn descend(marginal: &Marginal, removed: usize, out: &mut Vec<(Subset, f64)>) {
    out.push((marginal.subset, entropy_bits(&marginal.probs)));
    for v in marginal.subset.members().filter(|&v| v > removed) {
        descend(&marginal.sum_out(v), v, out);
    }
}

fn table_len(alphabet_sizes: &[usize]) -> Result<usize> {
    let users = alphabet_sizes.len();
    if !(MIN_USERS..=MAX_USERS).contains(&users) {
        return Err(Error::UnsupportedUserCount {
            users,
            min: MIN_USERS,
            max: MAX_USERS,
        });
    }
    alphabet_sizes.iter().try_fold(1usize, |acc, &size| {
        if size == 0 {
            return Err(Error::ShapeMismatch(
                "alphabet size must be at least 1".into(),
            ));
        }
        acc.checked_mul(size)
            .ok_or_else(|| Error::ShapeMismatch("joint table size overflows".into()))
    })
}

fn flat_index(alphabet_sizes: &[usize], symbols: &[usize]) -> Result<usize> {
    if symbols.len() != alphabet_sizes.len() {
        return Err(Error::ShapeMismatch(format!(
            "outcome has {} symbols, expected {}",
            symbols.len(),
            alphabet_sizes.len()
        )));
    }
    symbols
        .iter()
        .zip(alphabet_sizes)
        .try_fold(0usize, |acc, (&s, &size)| {
            if s >= size {
                Err(Error::ShapeMismatch(format!(
                    "symbol {s} outside alphabet of size {size}"
                )))
            } else {
                Ok(acc * size + s)
            }
        })
}

/// Shannon entropy in bits of a probability vector.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// Marginal table over a subset of variables, ordered by ascending user.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal {
    pub subset: Subset,
    pub sizes: Vec<usize>,
    pub probs: Vec<f64>,
}

impl Marginal {
    /// Removes variable `user` (which must be a member) by summation.
    pub fn sum_out(&self, user: usize) -> Marginal {
        let pos = self
            .subset
            .members()
            .position(|v| v == user)
            .expect("member");
        let width = self.sizes[pos];
        let inner: usize = self.sizes[pos + 1..].iter().product();
        let outer: usize = self.sizes[..pos].iter().product();
        let mut probs = vec![0.0; outer * inner];
        for o in 0..outer {
            for x in 0..width {
                let src = &self.probs[(o * width + x) * inner..][..inner];
                for (dst, &p) in probs[o * inner..][..inner].iter_mut().zip(src) {
                    *dst += p;
                }
            }
        }
        let mut sizes = self.sizes.clone();
        sizes.remove(pos);
        Marginal {
            subset: self.subset.without(user),
            sizes,
            probs,
        }
    }

    /// Flat position of a symbol tuple listed in ascending user order.
    pub fn index_of(&self, symbols: impl IntoIterator<Item = usize>) -> usize {
        symbols
            .into_iter()
            .zip(&self.sizes)
            .fold(0, |acc, (s, &size)| acc * size + s)
    }
}

/// `H(W_S)` for every subset `S`, indexed by mask; the empty set maps to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyTable {
    users: usize,
    h: Vec<f64>,
}

impl EntropyTable {
    pub fn users(&self) -> usize {
        self.users
    }

    pub fn get(&self, subset: Subset) -> f64 {
        self.h[subset.index()]
    }

    /// `H(W_S | W_T) = H(W_{S ∪ T}) - H(W_T)` for disjoint `S`, `T`.
    pub fn conditional(&self, s: Subset, t: Subset) -> f64 {
        debug_assert!(s.is_disjoint(t));
        self.h[s.union(t).index()] - self.h[t.index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.h
    }
}

/// Draws flat outcome indices from a joint table.
#[derive(Debug, Clone)]
pub struct Sampler {
    index: WeightedIndex<f64>,
}

impl Sampler {
    pub fn new(pmf: &JointPmf) -> Self {
        // validated pmfs always have a positive total
        let index = WeightedIndex::new(pmf.probs()).expect("validated pmf");
        Sampler { index }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index.sample(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::subset::all_nonempty;

    fn s(users: &[usize]) -> Subset {
        Subset::from_users(users.iter().copied())
    }

    #[test]
    fn validation_errors() {
        assert!(JointPmf::new(vec![2, 2], vec![0.25; 4]).is_ok());
        assert!(matches!(
            JointPmf::new(vec![2, 2], vec![0.5, 0.6, -0.1, 0.0]),
            Err(Error::NegativeProbability { index: 2, .. })
        ));
        assert!(matches!(
            JointPmf::new(vec![2, 2], vec![0.5; 4]),
            Err(Error::SumNotOne { .. })
        ));
        assert!(matches!(
            JointPmf::new(vec![2, 2], vec![0.5; 2]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            JointPmf::new(vec![2, 0], vec![]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            JointPmf::new(vec![2], vec![0.5, 0.5]),
            Err(Error::UnsupportedUserCount { users: 1, .. })
        ));
        assert!(matches!(
            JointPmf::new(vec![1; 13], vec![1.0]),
            Err(Error::UnsupportedUserCount { users: 13, .. })
        ));
        assert!(matches!(
            JointPmf::new(vec![2, 1], vec![f64::NAN, 1.0]),
            Err(Error::NonFiniteProbability { .. })
        ));
    }

    #[test]
    fn sparse_matches_dense() {
        let sparse = JointPmf::from_sparse(
            vec![2, 2, 2],
            [
                (vec![0, 0, 0], 0.25),
                (vec![0, 1, 1], 0.25),
                (vec![1, 0, 1], 0.25),
                (vec![1, 1, 0], 0.25),
            ],
        )
        .unwrap();
        assert_eq!(sparse, fixtures::xor_triple());
        assert!(JointPmf::from_sparse(vec![2, 2], [(vec![0, 2], 1.0)]).is_err());
    }

    #[test]
    fn entropy_examples() {
        let ind = fixtures::independent_uniform(2, 2);
        assert_eq!(ind.entropy(s(&[0, 1])).unwrap(), 2.0);
        let xor = fixtures::xor_triple();
        assert!((xor.entropy(s(&[0, 1, 2])).unwrap() - 2.0).abs() < 1e-15);
        let point = JointPmf::new(vec![2, 3], vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        for mask in all_nonempty(2) {
            assert_eq!(point.entropy(mask).unwrap(), 0.0);
        }
        assert_eq!(xor.entropy(Subset::EMPTY), Err(Error::EmptySubset));
    }

    #[test]
    fn conditional_entropy_examples() {
        let xor = fixtures::xor_triple();
        let v = xor.conditional_entropy(s(&[0, 1]), s(&[2])).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let same = fixtures::identical_uniform(2);
        assert_eq!(same.conditional_entropy(s(&[0]), s(&[1])).unwrap(), 0.0);
        let ind = fixtures::independent_uniform(2, 2);
        assert_eq!(ind.conditional_entropy(s(&[0]), s(&[1])).unwrap(), 1.0);
        assert_eq!(
            ind.conditional_entropy(s(&[0]), Subset::EMPTY).unwrap(),
            1.0
        );
        assert_eq!(
            ind.conditional_entropy(s(&[0, 1]), s(&[1])),
            Err(Error::OverlappingSubsets(0b11, 0b10))
        );
    }

    #[test]
    fn table_agrees_with_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for users in 2..=5 {
            let pmf = fixtures::random_pmf(&mut rng, users, 3);
            let table = pmf.entropy_table(Execution::Sequential);
            assert_eq!(table, pmf.entropy_table(Execution::Parallel));
            for mask in all_nonempty(users) {
                assert!((table.get(mask) - pmf.entropy(mask).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sampling_point_mass_and_determinism() {
        let point = JointPmf::new(vec![2, 3], vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(point.sample(5, 1), vec![vec![1, 1]; 5]);
        let xor = fixtures::xor_triple();
        assert_eq!(xor.sample(50, 9), xor.sample(50, 9));
        assert_ne!(xor.sample(50, 9), xor.sample(50, 10));
    }

    #[test]
    fn xor_sample_marginals_are_balanced() {
        let xor = fixtures::xor_triple();
        let rows = xor.sample(100_000, 17);
        for col in 0..3 {
            let ones = rows.iter().filter(|r| r[col] == 1).count() as f64;
            assert!((ones / 1e5 - 0.5).abs() < 0.01);
        }
        assert!(rows.iter().all(|r| r[2] == r[0] ^ r[1]));
    }
}
