//! Almost balanced conditional mutual information (ABCMI).
//!
//! A source has ABCMI when, for every weight `K` in `2..=L-1`, the largest
//! weight-`K` atom is at most a weight-dependent multiple of the smallest
//! one. The multiple is `1 + 1/(L-2)` for `K = L-1` and
//! `1 + min_S β(L,S,K) / ((K-1) α(L,S,K))` otherwise.

use crate::error::{Error, Result};
use crate::imeasure::AtomTable;
use crate::subset::binomial;

/// Additive slack on the ABCMI inequality.
pub const ABCMI_TOLERANCE: f64 = 1e-9;

fn check_triple(users: usize, s: usize, k: usize) -> Result<()> {
    if 2 <= k && k <= s && s + 2 <= users {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange(format!(
            "need 2 <= K <= S <= L-2, got L={users}, S={s}, K={k}"
        )))
    }
}

/// `α(L,S,K) = S·C(L-1,K) - (S-K)·C(S,K)`.
pub fn alpha(users: usize, s: usize, k: usize) -> Result<i64> {
    check_triple(users, s, k)?;
    Ok(s as i64 * binomial(users - 1, k) as i64 - (s - k) as i64 * binomial(s, k) as i64)
}

/// `β(L,S,K) = S·C(L-1,K) - (L-1)·C(S,K)`.
pub fn beta(users: usize, s: usize, k: usize) -> Result<i64> {
    check_triple(users, s, k)?;
    Ok(s as i64 * binomial(users - 1, k) as i64 - (users - 1) as i64 * binomial(s, k) as i64)
}

/// Multiplier bounding `max / min` among weight-`k` atoms.
pub fn weight_bound(users: usize, k: usize) -> Result<f64> {
    if users < 3 || k < 2 || k + 1 > users {
        return Err(Error::ParameterOutOfRange(format!(
            "need L >= 3 and 2 <= K <= L-1, got L={users}, K={k}"
        )));
    }
    if k == users - 1 {
        return Ok(1.0 + 1.0 / (users - 2) as f64);
    }
    let mut ratio = f64::INFINITY;
    for s in k..=users - 2 {
        let a = alpha(users, s, k)?;
        if a == 0 {
            return Err(Error::DivisionByZero { users, s, k });
        }
        ratio = ratio.min(beta(users, s, k)? as f64 / a as f64);
    }
    Ok(1.0 + ratio / (k - 1) as f64)
}

/// Outcome of the ABCMI test at one weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightCheck {
    pub weight: usize,
    pub mu_max: f64,
    pub mu_min: f64,
    pub bound: f64,
    pub satisfied: bool,
    /// Some atom of this weight is below `-ABCMI_TOLERANCE`.
    pub negative_atom: bool,
}

impl WeightCheck {
    /// `mu_min · bound - mu_max`; nonnegative (up to tolerance) when satisfied.
    pub fn slack(&self) -> f64 {
        self.mu_min * self.bound - self.mu_max
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbcmiReport {
    pub users: usize,
    /// One record per weight `2..=L-1`; empty for two users.
    pub weights: Vec<WeightCheck>,
    pub satisfied: bool,
}

impl AbcmiReport {
    pub fn has_negative_atoms(&self) -> bool {
        self.weights.iter().any(|w| w.negative_atom)
    }
}

/// Evaluates the ABCMI inequalities literally on the given atoms, including
/// signed atoms, which are flagged rather than rejected.
pub fn check_abcmi(atoms: &AtomTable) -> AbcmiReport {
    let users = atoms.users();
    let weights: Vec<WeightCheck> = (2..users)
        .map(|k| {
            let (mu_max, mu_min) = atoms.weight_extrema(k).expect("weight in range");
            let bound = weight_bound(users, k).expect("alpha is positive for supported L");
            WeightCheck {
                weight: k,
                mu_max,
                mu_min,
                bound,
                satisfied: mu_max <= mu_min * bound + ABCMI_TOLERANCE,
                negative_atom: mu_min < -ABCMI_TOLERANCE,
            }
        })
        .collect();
    let satisfied = weights.iter().all(|w| w.satisfied);
    AbcmiReport {
        users,
        weights,
        satisfied,
    }
}
