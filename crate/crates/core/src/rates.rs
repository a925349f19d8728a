//! Source-coding rate tuples and the source/channel rate regions.
//!
//! The rate assignment splits each atom `a(K)` of weight `1..=L-1` across
//! all users: users inside `K` receive `(L-|K|)/(L-1)` of its measure and
//! users outside receive `-(|K|-1)/(L-1)` of it. For ABCMI sources the
//! resulting tuple meets every Slepian-Wolf constraint with `|S| <= L-2`
//! and meets those with `|S| = L-1` with equality.

use std::ops::Deref;

use crate::channel::ChannelSpec;
use crate::distribution::JointPmf;
use crate::error::{Error, Result};
use crate::imeasure::AtomTable;
use crate::lp::{self, Constraint};
use crate::par::Execution;
use crate::subset::{strict_nonempty, Subset};

/// Tolerance on every rate-region inequality.
pub const REGION_TOLERANCE: f64 = 1e-9;

/// Upper end of the bisection window above `κ*` in [`min_feasible_kappa`].
pub const KAPPA_SEARCH_SPAN: f64 = 64.0;
/// Bisection stopping width in [`min_feasible_kappa`].
pub const KAPPA_SEARCH_TOLERANCE: f64 = 1e-6;

/// Nonnegative per-user source-coding rates, bits per source symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTuple(Vec<f64>);

impl RateTuple {
    /// Accepts values down to `-REGION_TOLERANCE`, clamping those to zero.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let mut values = values;
        for (user, v) in values.iter_mut().enumerate() {
            if !v.is_finite() || *v < -REGION_TOLERANCE {
                return Err(Error::NegativeRate { user, value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(RateTuple(values))
    }

    pub fn users(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for RateTuple {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Coefficient of `μ*(a(K))` in the rate of `user`.
pub fn contribution_coefficient(users: usize, user: usize, atom: Subset) -> Result<f64> {
    if user >= users {
        return Err(Error::UserOutOfRange { user, users });
    }
    let weight = atom.check(users)?.len();
    if weight == 0 || weight >= users {
        return Err(Error::WeightOutOfRange {
            weight,
            min: 1,
            max: users - 1,
        });
    }
    let denom = (users - 1) as f64;
    Ok(if atom.contains(user) {
        (users - weight) as f64 / denom
    } else {
        -((weight - 1) as f64) / denom
    })
}

/// Contribution `J_i(K)` of atom `a(K)` to the rate of user `i`.
pub fn contribution(user: usize, atom: Subset, atoms: &AtomTable) -> Result<f64> {
    Ok(contribution_coefficient(atoms.users(), user, atom)? * atoms.get(atom))
}

/// Rates produced from the I-measure, together with any sign anomalies.
#[derive(Debug, Clone, PartialEq)]
pub struct RateAssignment {
    /// Rates before clamping.
    pub raw: Vec<f64>,
    /// Rates with values in `[-REGION_TOLERANCE, 0)` clamped to zero.
    pub rates: Vec<f64>,
    /// Users whose rate was clamped.
    pub clamped: Vec<usize>,
    /// Users whose rate is below `-REGION_TOLERANCE`; only possible for
    /// sources without ABCMI.
    pub negative: Vec<usize>,
}

impl RateAssignment {
    pub fn tuple(&self) -> Result<RateTuple> {
        RateTuple::new(self.rates.clone())
    }
}

/// `r_i = Σ_{1 <= |K| <= L-1} J_i(K)`.
pub fn assign_rates(atoms: &AtomTable) -> RateAssignment {
    let users = atoms.users();
    let raw: Vec<f64> = (0..users)
        .map(|user| {
            atoms
                .iter()
                .filter(|(k, _)| k.len() < users)
                .map(|(k, mu)| {
                    contribution_coefficient(users, user, k).expect("weight in range") * mu
                })
                .sum()
        })
        .collect();
    let mut rates = raw.clone();
    let mut clamped = Vec::new();
    let mut negative = Vec::new();
    for (user, r) in rates.iter_mut().enumerate() {
        if *r < -REGION_TOLERANCE {
            negative.push(user);
        } else if *r < 0.0 {
            *r = 0.0;
            clamped.push(user);
        }
    }
    RateAssignment {
        raw,
        rates,
        clamped,
        negative,
    }
}

/// One Slepian-Wolf constraint `Σ_{i∈S} r_i >= H(W_S | W_{S^c})`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionRecord {
    pub subset: Subset,
    pub lhs: f64,
    pub rhs: f64,
}

impl RegionRecord {
    pub fn slack(&self) -> f64 {
        self.lhs - self.rhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionReport {
    pub users: usize,
    /// Every nonempty strict subset, ascending by mask.
    pub records: Vec<RegionRecord>,
    /// Inequalities hold for all `1 <= |S| <= L-2`.
    pub c1: bool,
    /// Equalities hold for all `|S| = L-1`.
    pub c2: bool,
}

impl RegionReport {
    /// Whether the tuple lies in the source-coding region (all inequalities).
    pub fn in_source_region(&self) -> bool {
        self.records.iter().all(|r| r.slack() >= -REGION_TOLERANCE)
    }

    pub fn c2_records(&self) -> impl Iterator<Item = &RegionRecord> {
        let users = self.users;
        self.records
            .iter()
            .filter(move |r| r.subset.len() == users - 1)
    }
}

/// Evaluates conditions C1 and C2 for a rate tuple.
pub fn check_conditions(pmf: &JointPmf, rates: &[f64]) -> Result<RegionReport> {
    let users = pmf.users();
    if rates.len() != users {
        return Err(Error::ShapeMismatch(format!(
            "{} rates for {users} users",
            rates.len()
        )));
    }
    let table = pmf.entropy_table(Execution::default());
    let records: Vec<RegionRecord> = strict_nonempty(users)
        .map(|s| RegionRecord {
            subset: s,
            lhs: s.members().map(|i| rates[i]).sum(),
            rhs: table.conditional(s, s.complement(users)),
        })
        .collect();
    let c1 = records
        .iter()
        .filter(|r| r.subset.len() + 2 <= users)
        .all(|r| r.slack() >= -REGION_TOLERANCE);
    let c2 = records
        .iter()
        .filter(|r| r.subset.len() + 1 == users)
        .all(|r| r.slack().abs() <= REGION_TOLERANCE);
    Ok(RegionReport {
        users,
        records,
        c1,
        c2,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelCheck {
    pub satisfied: bool,
    /// `capacity_i - Σ_{j≠i} R_j` per user.
    pub slack: Vec<f64>,
}

/// Tests channel rates (bits per channel use) against the capacity region
/// `Σ_{j≠i} R_j <= log2 q - max(H(N_0), H(N_i))`.
pub fn channel_region_ok(rates: &[f64], channel: &ChannelSpec) -> Result<ChannelCheck> {
    if rates.len() != channel.users() {
        return Err(Error::UserCountMismatch {
            source_users: rates.len(),
            channel_users: channel.users(),
        });
    }
    if let Some((user, &value)) = rates.iter().enumerate().find(|(_, &r)| r.is_nan() || r < 0.0) {
        return Err(Error::NegativeRate { user, value });
    }
    let capacities = channel.capacities()?;
    let total: f64 = rates.iter().sum();
    let slack: Vec<f64> = capacities
        .iter()
        .zip(rates)
        .map(|(c, r)| c - (total - r))
        .collect();
    Ok(ChannelCheck {
        satisfied: slack.iter().all(|&s| s >= -REGION_TOLERANCE),
        slack,
    })
}

fn matching_users(pmf: &JointPmf, channel: &ChannelSpec) -> Result<usize> {
    if pmf.users() != channel.users() {
        return Err(Error::UserCountMismatch {
            source_users: pmf.users(),
            channel_users: channel.users(),
        });
    }
    Ok(pmf.users())
}

/// Smallest achievable bandwidth expansion for ABCMI sources:
/// `max_i H(W_{∖i} | W_i) / (log2 q - max(H(N_0), H(N_i)))`.
pub fn kappa_star(pmf: &JointPmf, channel: &ChannelSpec) -> Result<f64> {
    let users = matching_users(pmf, channel)?;
    let capacities = channel.capacities()?;
    let table = pmf.entropy_table(Execution::default());
    let full = Subset::full(users);
    Ok((0..users)
        .map(|i| {
            let own = Subset::singleton(i);
            table.conditional(full.difference(own), own) / capacities[i]
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// A rate tuple in both regions when feasible.
    pub witness: Option<RateTuple>,
}

/// Linear constraints on `r >= 0` describing the source region and the
/// channel region scaled by `kappa`, each relaxed by [`REGION_TOLERANCE`].
pub fn region_constraints(
    pmf: &JointPmf,
    channel: &ChannelSpec,
    kappa: f64,
) -> Result<Vec<Constraint>> {
    let users = matching_users(pmf, channel)?;
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(Error::InvalidKappa(kappa));
    }
    let capacities = channel.capacities()?;
    let table = pmf.entropy_table(Execution::default());
    let indicator = |s: Subset| -> Vec<f64> {
        (0..users)
            .map(|i| if s.contains(i) { 1.0 } else { 0.0 })
            .collect()
    };
    let mut constraints: Vec<Constraint> = strict_nonempty(users)
        .map(|s| {
            Constraint::ge(
                indicator(s),
                table.conditional(s, s.complement(users)) - REGION_TOLERANCE,
            )
        })
        .collect();
    let full = Subset::full(users);
    constraints.extend((0..users).map(|i| {
        Constraint::le(
            indicator(full.without(i)),
            kappa * capacities[i] + REGION_TOLERANCE,
        )
    }));
    Ok(constraints)
}

/// Decides whether the source-coding region and the channel-coding region
/// scaled by `kappa` intersect (with `R_i = r_i / kappa`).
pub fn intersection_feasible(
    pmf: &JointPmf,
    channel: &ChannelSpec,
    kappa: f64,
) -> Result<Feasibility> {
    let constraints = region_constraints(pmf, channel, kappa)?;
    match lp::find_feasible_point(pmf.users(), &constraints) {
        Some(point) => {
            debug_assert!(constraints.iter().all(|c| c.violation(&point) <= 1e-9));
            Ok(Feasibility {
                feasible: true,
                witness: Some(RateTuple::new(point)?),
            })
        }
        None => Ok(Feasibility {
            feasible: false,
            witness: None,
        }),
    }
}

/// Smallest `kappa` at which the regions intersect, by bisection over
/// `[κ*, κ* + KAPPA_SEARCH_SPAN]`. `None` when even the upper end fails.
pub fn min_feasible_kappa(pmf: &JointPmf, channel: &ChannelSpec) -> Result<Option<f64>> {
    let lower = kappa_star(pmf, channel)?;
    if lower == 0.0 {
        return Ok(Some(0.0));
    }
    if intersection_feasible(pmf, channel, lower)?.feasible {
        return Ok(Some(lower));
    }
    let mut hi = lower + KAPPA_SEARCH_SPAN;
    if !intersection_feasible(pmf, channel, hi)?.feasible {
        return Ok(None);
    }
    let mut lo = lower;
    while hi - lo > KAPPA_SEARCH_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if intersection_feasible(pmf, channel, mid)?.feasible {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Smallest `kappa` at which the given source rates fit through the channel:
/// `max_i Σ_{j≠i} r_j / capacity_i`.
pub fn kappa_for_rates(rates: &[f64], channel: &ChannelSpec) -> Result<f64> {
    if rates.len() != channel.users() {
        return Err(Error::UserCountMismatch {
            source_users: rates.len(),
            channel_users: channel.users(),
        });
    }
    let capacities = channel.capacities()?;
    let total: f64 = rates.iter().sum();
    Ok(capacities
        .iter()
        .zip(rates)
        .map(|(c, r)| (total - r) / c)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::imeasure::compute_atoms;

    fn s(users: &[usize]) -> Subset {
        Subset::from_users(users.iter().copied())
    }

    #[test]
    fn contribution_examples() {
        let atoms = compute_atoms(&fixtures::xor_triple());
        assert_eq!(contribution_coefficient(3, 0, s(&[0])).unwrap(), 1.0);
        assert_eq!(contribution_coefficient(3, 1, s(&[0])).unwrap(), 0.0);
        assert_eq!(contribution_coefficient(3, 0, s(&[0, 2])).unwrap(), 0.5);
        assert_eq!(contribution_coefficient(3, 1, s(&[0, 2])).unwrap(), -0.5);
        assert!((contribution(0, s(&[0, 1]), &atoms).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(
            contribution(0, s(&[0, 1, 2]), &atoms),
            Err(Error::WeightOutOfRange { weight: 3, .. })
        ));
        assert!(matches!(
            contribution(3, s(&[0]), &atoms),
            Err(Error::UserOutOfRange { .. })
        ));
    }

    #[test]
    fn assignment_examples() {
        let pmf = fixtures::independent(&[vec![0.2, 0.8], vec![0.5, 0.25, 0.25], vec![0.9, 0.1]]);
        let a = assign_rates(&compute_atoms(&pmf));
        for i in 0..3 {
            assert!((a.rates[i] - pmf.entropy(Subset::singleton(i)).unwrap()).abs() < 1e-12);
        }
        let xor = assign_rates(&compute_atoms(&fixtures::xor_triple()));
        for r in &xor.rates {
            assert!((r - 0.5).abs() < 1e-12);
        }
        let same = assign_rates(&compute_atoms(&fixtures::identical_uniform(3)));
        assert!(same.rates.iter().all(|r| r.abs() < 1e-12));
        assert!(same.negative.is_empty());
    }

    #[test]
    fn tuple_clamps_within_tolerance() {
        let t = RateTuple::new(vec![-1e-12, 0.3]).unwrap();
        assert_eq!(&*t, &[0.0, 0.3]);
        assert!(matches!(
            RateTuple::new(vec![0.1, -1e-6]),
            Err(Error::NegativeRate { user: 1, .. })
        ));
    }

    #[test]
    fn condition_examples() {
        let xor = fixtures::xor_triple();
        let report = check_conditions(&xor, &[0.5, 0.5, 0.5]).unwrap();
        assert!(report.c1 && report.c2);
        let rec = report
            .records
            .iter()
            .find(|r| r.subset == s(&[0, 1]))
            .unwrap();
        assert!((rec.lhs - 1.0).abs() < 1e-12 && (rec.rhs - 1.0).abs() < 1e-12);
        assert_eq!(report.records.len(), 6);
        assert_eq!(report.c2_records().count(), 3);

        let zero = check_conditions(&xor, &[0.0; 3]).unwrap();
        assert!(!zero.c2);

        let ind = fixtures::independent(&[vec![0.3, 0.7], vec![0.5, 0.5], vec![0.1, 0.9]]);
        let h: Vec<f64> = (0..3)
            .map(|i| ind.entropy(Subset::singleton(i)).unwrap())
            .collect();
        let report = check_conditions(&ind, &h).unwrap();
        assert!(report.c1 && report.c2 && report.in_source_region());
    }

    #[test]
    fn two_users_only_have_c2_constraints() {
        let pmf = fixtures::identical_uniform(2);
        let report = check_conditions(&pmf, &[0.0, 0.0]).unwrap();
        assert!(report.c1 && report.c2);
        assert_eq!(report.c2_records().count(), 2);
    }

    #[test]
    fn channel_region_examples() {
        let ch = ChannelSpec::noiseless(2, 3).unwrap();
        assert!(channel_region_ok(&[0.5, 0.5, 0.5], &ch).unwrap().satisfied);
        let check = channel_region_ok(&[0.6, 0.5, 0.5], &ch).unwrap();
        assert!(!check.satisfied);
        assert!((check.slack[0] - 0.0).abs() < 1e-12);
        assert!((check.slack[1] + 0.1).abs() < 1e-12);
        let uniform = ChannelSpec::new(2, vec![0.5, 0.5], vec![vec![1.0, 0.0]; 3]).unwrap();
        assert!(matches!(
            channel_region_ok(&[0.1; 3], &uniform),
            Err(Error::DegenerateChannel { .. })
        ));
        assert!(matches!(
            channel_region_ok(&[0.1, -0.1, 0.0], &ch),
            Err(Error::NegativeRate { .. })
        ));
    }

    #[test]
    fn kappa_star_examples() {
        let ch = ChannelSpec::noiseless(2, 3).unwrap();
        let ind = fixtures::independent_uniform(3, 2);
        assert!((kappa_star(&ind, &ch).unwrap() - 2.0).abs() < 1e-12);
        assert!((kappa_star(&fixtures::xor_triple(), &ch).unwrap() - 1.0).abs() < 1e-12);
        let half = fixtures::binary_noise_with_entropy(0.5);
        let noisy = ChannelSpec::new(2, half, vec![vec![1.0, 0.0]; 3]).unwrap();
        assert!((kappa_star(&fixtures::xor_triple(), &noisy).unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(
            kappa_star(&fixtures::identical_uniform(3), &ch).unwrap(),
            0.0
        );
        let ch4 = ChannelSpec::noiseless(2, 4).unwrap();
        assert!(matches!(
            kappa_star(&ind, &ch4),
            Err(Error::UserCountMismatch { .. })
        ));
    }

    #[test]
    fn feasibility_examples() {
        let ch = ChannelSpec::noiseless(2, 3).unwrap();
        let xor = fixtures::xor_triple();
        let at_star = intersection_feasible(&xor, &ch, 1.0).unwrap();
        assert!(at_star.feasible);
        for r in at_star.witness.unwrap().iter() {
            assert!((r - 0.5).abs() < 1e-8);
        }
        assert!(!intersection_feasible(&xor, &ch, 0.5).unwrap().feasible);

        let ind = fixtures::independent_uniform(3, 2);
        let f = intersection_feasible(&ind, &ch, 2.0).unwrap();
        assert!(f.feasible);
        for r in f.witness.unwrap().iter() {
            assert!((r - 1.0).abs() < 1e-8);
        }
        assert!(matches!(
            intersection_feasible(&xor, &ch, 0.0),
            Err(Error::InvalidKappa(_))
        ));
    }

    #[test]
    fn kappa_search() {
        let ch = ChannelSpec::noiseless(2, 3).unwrap();
        let xor = fixtures::xor_triple();
        assert_eq!(min_feasible_kappa(&xor, &ch).unwrap(), Some(1.0));
        assert_eq!(
            min_feasible_kappa(&fixtures::identical_uniform(3), &ch).unwrap(),
            Some(0.0)
        );
        assert!((kappa_for_rates(&[0.5, 0.5, 0.5], &ch).unwrap() - 1.0).abs() < 1e-15);
    }
}
