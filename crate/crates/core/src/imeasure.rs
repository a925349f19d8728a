//! Signed I-measure of the atoms of the information diagram.
//!
//! For `L` variables the field generated by their set variables has
//! `2^L - 1` nonempty atoms `a(K)`, one per nonempty `K ⊆ {1..L}`. The
//! measure of `a(K)` is the mutual information among `{W_i : i ∈ K}`
//! conditioned on all remaining variables, and can be negative once
//! `|K| >= 3`.

use nalgebra::{DMatrix, DVector};

use crate::distribution::{EntropyTable, JointPmf};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::subset::{all_nonempty, of_weight, Subset};

/// I-measure of every nonempty atom, in bits, indexed by subset mask.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomTable {
    users: usize,
    // slot 0 (the empty set) is unused and kept at zero
    mu: Vec<f64>,
}

impl AtomTable {
    /// Injects atom values directly, in ascending mask order `1..2^L`.
    pub fn from_values(users: usize, values: Vec<f64>) -> Result<Self> {
        if !(2..=crate::subset::MAX_USERS).contains(&users) {
            return Err(Error::UnsupportedUserCount {
                users,
                min: 2,
                max: crate::subset::MAX_USERS,
            });
        }
        let expected = (1usize << users) - 1;
        if values.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "expected {expected} atoms for {users} users, got {}",
                values.len()
            )));
        }
        let mut mu = Vec::with_capacity(expected + 1);
        mu.push(0.0);
        mu.extend(values);
        Ok(AtomTable { users, mu })
    }

    /// Builds a table by evaluating `f` on every nonempty atom.
    pub fn from_fn(users: usize, f: impl FnMut(Subset) -> f64) -> Result<Self> {
        AtomTable::from_values(users, all_nonempty(users).map(f).collect())
    }

    pub fn users(&self) -> usize {
        self.users
    }

    /// Number of atoms, always `2^L - 1`.
    pub fn len(&self) -> usize {
        self.mu.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `μ*(a(K))`. Panics on the empty set or an out-of-range mask.
    pub fn get(&self, atom: Subset) -> f64 {
        assert!(!atom.is_empty(), "the empty atom has no measure");
        self.mu[atom.index()]
    }

    /// `(K, μ*(a(K)))` in ascending mask order.
    pub fn iter(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        all_nonempty(self.users).map(move |k| (k, self.mu[k.index()]))
    }

    /// `H(W_S | W_{S^c})`, the total measure of atoms contained in `S`.
    pub fn conditional_entropy(&self, s: Subset) -> Result<f64> {
        let s = s.check(self.users)?;
        if s.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(s.nonempty_subsets().map(|k| self.mu[k.index()]).sum())
    }

    /// `H(W_S)`, the total measure of atoms meeting `S`.
    pub fn entropy(&self, s: Subset) -> Result<f64> {
        let s = s.check(self.users)?;
        if s.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(self
            .iter()
            .filter(|(k, _)| !k.is_disjoint(s))
            .map(|(_, v)| v)
            .sum())
    }

    /// Largest and smallest measure among atoms of the given weight, for
    /// weights `1..=L-1`.
    pub fn weight_extrema(&self, weight: usize) -> Result<(f64, f64)> {
        if weight < 1 || weight >= self.users {
            return Err(Error::WeightOutOfRange {
                weight,
                min: 1,
                max: self.users - 1,
            });
        }
        Ok(of_weight(self.users, weight)
            .map(|k| self.mu[k.index()])
            .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), v| {
                (hi.max(v), lo.min(v))
            }))
    }
}

/// Atoms via the alternating sum of conditional entropies.
pub fn compute_atoms(pmf: &JointPmf) -> AtomTable {
    atoms_from_entropies(&pmf.entropy_table(Execution::default()))
}

/// `μ*(a(K)) = Σ_{∅≠T⊆K} (-1)^{|T|+1} H(W_T | W_{K^c})`.
pub fn atoms_from_entropies(table: &EntropyTable) -> AtomTable {
    let users = table.users();
    AtomTable::from_fn(users, |k| {
        let rest = k.complement(users);
        k.nonempty_subsets()
            .map(|t| {
                let term = table.conditional(t, rest);
                if t.len() % 2 == 1 {
                    term
                } else {
                    -term
                }
            })
            .sum()
    })
    .expect("entropy tables always cover 2..=MAX_USERS users")
}

/// Solves `Σ_{K ∩ S ≠ ∅} μ*(a(K)) = H(W_S)` for all nonempty `S` with an LU
/// factorisation; an independent route to the same atoms.
pub fn oracle_atoms(pmf: &JointPmf) -> Result<AtomTable> {
    let users = pmf.users();
    let n = (1usize << users) - 1;
    let system = DMatrix::from_fn(
        n,
        n,
        |row, col| {
            if (row + 1) & (col + 1) != 0 {
                1.0
            } else {
                0.0
            }
        },
    );
    let rhs = all_nonempty(users)
        .map(|s| pmf.entropy(s))
        .collect::<Result<Vec<f64>>>()?;
    let solution = system
        .lu()
        .solve(&DVector::from_vec(rhs))
        .ok_or(Error::SingularSystem)?;
    AtomTable::from_values(users, solution.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::subset::strict_nonempty;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(users: &[usize]) -> Subset {
        Subset::from_users(users.iter().copied())
    }

    #[test]
    fn independent_sources_have_no_interaction() {
        let pmf = fixtures::independent(&[vec![0.3, 0.7], vec![0.1, 0.2, 0.7], vec![0.5, 0.5]]);
        let atoms = compute_atoms(&pmf);
        for (k, v) in atoms.iter() {
            if k.len() == 1 {
                assert!((v - pmf.entropy(k).unwrap()).abs() < 1e-12);
            } else {
                assert!(v.abs() < 1e-12, "atom {k} = {v}");
            }
        }
    }

    #[test]
    fn xor_triple_atoms() {
        let atoms = compute_atoms(&fixtures::xor_triple());
        for pair in [s(&[0, 1]), s(&[0, 2]), s(&[1, 2])] {
            assert!((atoms.get(pair) - 1.0).abs() < 1e-12);
        }
        assert!((atoms.get(s(&[0, 1, 2])) + 1.0).abs() < 1e-12);
        for i in 0..3 {
            assert!(atoms.get(Subset::singleton(i)).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_triple_atoms() {
        let atoms = compute_atoms(&fixtures::identical_uniform(3));
        for (k, v) in atoms.iter() {
            let expected = if k.len() == 3 { 1.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-12, "atom {k} = {v}");
        }
    }

    #[test]
    fn oracle_examples() {
        let ind = compute_atoms(&fixtures::independent_uniform(2, 2));
        assert!(
            oracle_atoms(&fixtures::independent_uniform(2, 2))
                .unwrap()
                .get(s(&[0, 1]))
                .abs()
                < 1e-12
        );
        assert_eq!(ind.len(), 3);
        let xor = oracle_atoms(&fixtures::xor_triple()).unwrap();
        assert!((xor.get(s(&[0, 1, 2])) + 1.0).abs() < 1e-10);
    }

    #[test]
    fn closed_form_matches_linear_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for users in 2..=5 {
            for _ in 0..10 {
                let pmf = fixtures::random_pmf(&mut rng, users, 3);
                let a = compute_atoms(&pmf);
                let b = oracle_atoms(&pmf).unwrap();
                for (k, v) in a.iter() {
                    assert!((v - b.get(k)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn conditional_from_atoms_examples() {
        let xor = compute_atoms(&fixtures::xor_triple());
        assert!((xor.conditional_entropy(s(&[0, 1])).unwrap() - 1.0).abs() < 1e-12);
        let pmf = fixtures::independent(&[vec![0.3, 0.7], vec![0.6, 0.4], vec![0.5, 0.5]]);
        let ind = compute_atoms(&pmf);
        assert!(
            (ind.conditional_entropy(s(&[0])).unwrap() - pmf.entropy(s(&[0])).unwrap()).abs()
                < 1e-12
        );
        let same = compute_atoms(&fixtures::identical_uniform(3));
        assert!(same.conditional_entropy(s(&[0, 1])).unwrap().abs() < 1e-12);
        assert_eq!(
            xor.conditional_entropy(Subset::EMPTY),
            Err(Error::EmptySubset)
        );
        // the full set recovers the joint entropy
        assert!((xor.conditional_entropy(s(&[0, 1, 2])).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pmf = fixtures::random_pmf(&mut rng, 4, 3);
        let atoms = compute_atoms(&pmf);
        for mask in all_nonempty(4) {
            assert!((atoms.entropy(mask).unwrap() - pmf.entropy(mask).unwrap()).abs() < 1e-9);
        }
        for mask in strict_nonempty(4) {
            let direct = pmf.conditional_entropy(mask, mask.complement(4)).unwrap();
            assert!((atoms.conditional_entropy(mask).unwrap() - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn weight_extrema_examples() {
        let xor = compute_atoms(&fixtures::xor_triple());
        let (hi, lo) = xor.weight_extrema(2).unwrap();
        assert!((hi - 1.0).abs() < 1e-12 && (lo - 1.0).abs() < 1e-12);
        let (hi, lo) = xor.weight_extrema(1).unwrap();
        assert!(hi.abs() < 1e-12 && lo.abs() < 1e-12);
        let ind = compute_atoms(&fixtures::independent_uniform(4, 2));
        let (hi, lo) = ind.weight_extrema(2).unwrap();
        assert!(hi.abs() < 1e-12 && lo.abs() < 1e-12);
        assert!(matches!(
            xor.weight_extrema(3),
            Err(Error::WeightOutOfRange { .. })
        ));
        assert!(matches!(
            xor.weight_extrema(0),
            Err(Error::WeightOutOfRange { .. })
        ));
    }

    #[test]
    fn synthetic_injection_checks_shape() {
        assert!(AtomTable::from_values(3, vec![0.0; 7]).is_ok());
        assert!(matches!(
            AtomTable::from_values(3, vec![0.0; 8]),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
