//! Reference sources and random source generators.

use rand::Rng;

use crate::distribution::{entropy_bits, JointPmf};

/// `W1, W2` i.i.d. uniform bits and `W3 = W1 xor W2`.
pub fn xor_triple() -> JointPmf {
    let mut probs = vec![0.0; 8];
    for a in 0..2 {
        for b in 0..2 {
            probs[a * 4 + b * 2 + (a ^ b)] = 0.25;
        }
    }
    JointPmf::new(vec![2, 2, 2], probs).expect("valid")
}

/// `users` independent variables, each uniform over `alphabet` symbols.
pub fn independent_uniform(users: usize, alphabet: usize) -> JointPmf {
    let len = alphabet.pow(users as u32);
    JointPmf::new(vec![alphabet; users], vec![1.0 / len as f64; len]).expect("valid")
}

/// `users` copies of one uniform bit.
pub fn identical_uniform(users: usize) -> JointPmf {
    let len = 1usize << users;
    let mut probs = vec![0.0; len];
    probs[0] = 0.5;
    probs[len - 1] = 0.5;
    JointPmf::new(vec![2; users], probs).expect("valid")
}

/// Independent sources with the given marginals.
pub fn independent(marginals: &[Vec<f64>]) -> JointPmf {
    let sizes: Vec<usize> = marginals.iter().map(Vec::len).collect();
    let mut probs = vec![1.0];
    for m in marginals {
        probs = probs
            .iter()
            .flat_map(|&p| m.iter().map(move |&q| p * q))
            .collect();
    }
    normalized(sizes, probs)
}

/// Random joint pmf with alphabet sizes drawn from `2..=max_alphabet` and
/// roughly a fifth of the outcomes forced to zero.
pub fn random_pmf<R: Rng + ?Sized>(rng: &mut R, users: usize, max_alphabet: usize) -> JointPmf {
    let sizes: Vec<usize> = (0..users)
        .map(|_| rng.random_range(2..=max_alphabet.max(2)))
        .collect();
    let len: usize = sizes.iter().product();
    let mut probs: Vec<f64> = (0..len)
        .map(|_| {
            if rng.random_bool(0.2) {
                0.0
            } else {
                -(1.0 - rng.random::<f64>()).ln()
            }
        })
        .collect();
    if probs.iter().all(|&p| p == 0.0) {
        probs[0] = 1.0;
    }
    normalized(sizes, probs)
}

/// Exchangeable source (probability depends only on the multiset of symbols)
/// mixed with a fraction `epsilon` of an unstructured random pmf. Sources of
/// this family have nearly equal atoms within each weight.
pub fn near_exchangeable<R: Rng + ?Sized>(
    rng: &mut R,
    users: usize,
    alphabet: usize,
    epsilon: f64,
) -> JointPmf {
    let len = alphabet.pow(users as u32);
    let mut by_multiset = std::collections::HashMap::new();
    let probs: Vec<f64> = (0..len)
        .map(|idx| {
            let mut counts = vec![0u8; alphabet];
            let mut rest = idx;
            for _ in 0..users {
                counts[rest % alphabet] += 1;
                rest /= alphabet;
            }
            let sym = *by_multiset
                .entry(counts)
                .or_insert_with(|| -(1.0 - rng.random::<f64>()).ln());
            let noise = -(1.0 - rng.random::<f64>()).ln();
            (1.0 - epsilon) * sym + epsilon * noise
        })
        .collect();
    normalized(vec![alphabet; users], probs)
}

/// Binary pmf `[1 - p, p]` with `p <= 1/2` whose entropy is `target` bits.
pub fn binary_noise_with_entropy(target: f64) -> Vec<f64> {
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if entropy_bits(&[1.0 - mid, mid]) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    vec![1.0 - p, p]
}

fn normalized(sizes: Vec<usize>, mut probs: Vec<f64>) -> JointPmf {
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    // push the residual rounding error into the largest entry
    let residual = 1.0 - probs.iter().sum::<f64>();
    if let Some(max) = probs
        .iter_mut()
        .max_by(|a, b| a.partial_cmp(b).expect("finite"))
    {
        *max += residual;
    }
    JointPmf::new(sizes, probs).expect("normalized table")
}
