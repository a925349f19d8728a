//! Analysis of correlated sources exchanged over a finite-field multi-way
//! relay channel.
//!
//! The crate computes the I-measure of a joint distribution, checks the
//! almost-balanced conditional mutual information (ABCMI) condition, builds
//! the atom-based rate tuple and tests it against the source coding region,
//! finds the bandwidth expansion threshold and decides whether the source
//! and channel regions meet. A Monte Carlo simulator runs the binning,
//! dithering and decoding scheme end to end.
//!
//! ```
//! use mwrc_core::{compute_atoms, check_abcmi, assign_rates, fixtures};
//!
//! let pmf = fixtures::xor_triple();
//! let atoms = compute_atoms(&pmf);
//! assert!(check_abcmi(&atoms).satisfied);
//! let rates = assign_rates(&atoms).rates;
//! assert!(rates.iter().all(|r| (r - 0.5).abs() < 1e-12));
//! ```

pub mod abcmi;
pub mod channel;
pub mod distribution;
pub mod error;
pub mod fixtures;
pub mod imeasure;
pub mod lp;
pub mod par;
pub mod rates;
pub mod simulator;
pub mod subset;

pub use abcmi::{alpha, beta, check_abcmi, weight_bound, AbcmiReport, WeightCheck};
pub use channel::ChannelSpec;
pub use distribution::{EntropyTable, JointPmf};
pub use error::{Error, Result};
pub use imeasure::{compute_atoms, oracle_atoms, AtomTable};
pub use par::Execution;
pub use rates::{
    assign_rates, channel_region_ok, check_conditions, intersection_feasible, kappa_star,
    Feasibility, RateTuple, RegionReport,
};
pub use simulator::{run_sim, run_sweep, SimConfig, SimMode, SimResult};
pub use subset::Subset;
