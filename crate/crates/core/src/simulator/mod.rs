//! Monte Carlo simulation of separate source and channel coding.
//!
//! Each trial samples `m` source symbols per user, bins every block, dithers
//! the bin indices, moves them to the other users and decodes. In
//! [`SimMode::Ideal`] the channel is an oracle that delivers all indices
//! exactly when the per-use rates fit the capacity region and loses the
//! trial otherwise. [`SimMode::SymbolLevel`] pushes the indices through the
//! noisy finite-field channel with a simple relaying schedule.
//!
//! Every trial draws from its own ChaCha streams derived from the master
//! seed and the trial index, so results do not depend on the thread count.

pub mod binning;
pub mod decode;
pub mod field;
pub mod transport;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelSpec;
use crate::distribution::{JointPmf, Sampler};
use crate::error::{Error, Result};
use crate::imeasure::compute_atoms;
use crate::par::{self, Execution};
use crate::rates::{assign_rates, channel_region_ok, kappa_for_rates, RateTuple};

pub use binning::{apply_dither, bin_bits, remove_dither, sw_encode, Binning};
pub use decode::{sw_decode, SourceDecoder};
pub use field::{ChannelOutput, FieldChannel};

/// Longest block in symbol-level mode.
pub const SYMBOL_LEVEL_MAX_M: usize = 12;
/// Widest bin index in symbol-level mode.
pub const SYMBOL_LEVEL_MAX_BITS: u32 = 16;
/// Largest number of candidate tuples a single decoder may face.
pub const MAX_DECODER_CANDIDATES: u64 = 1 << 22;
/// Two-sided 95% normal quantile.
const WILSON_Z: f64 = 1.959963984540054;

// stream offsets within a trial
const SOURCE_STREAM: u64 = 0;
const BINNING_STREAM: u64 = 1;
const DITHER_STREAM: u64 = 2;
const NOISE_STREAM: u64 = 3;
const CODE_STREAM: u64 = 4;
const STREAMS_PER_TRIAL: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimMode {
    /// Error-free delivery whenever the rates fit the channel.
    #[default]
    Ideal,
    /// Coded transmission over the simulated channel.
    SymbolLevel,
}

/// How the source rates are adapted to the channel budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateScaling {
    /// Use the rates as given.
    Fixed,
    /// Scale the rates up uniformly until the channel budget at `kappa` is
    /// used; never scales down.
    #[default]
    FillChannel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Source block length.
    pub m: usize,
    /// Channel uses per source symbol; a trial uses `ceil(kappa · m)` uses.
    pub kappa: f64,
    pub trials: u64,
    pub seed: u64,
    pub mode: SimMode,
    /// Binning rates; the I-measure assignment when `None`.
    pub rates: Option<RateTuple>,
    pub scaling: RateScaling,
    /// Whether bin indices are dithered before transmission.
    pub dither: bool,
    pub execution: Execution,
}

impl SimConfig {
    pub fn new(m: usize, kappa: f64, trials: u64, seed: u64) -> Self {
        SimConfig {
            m,
            kappa,
            trials,
            seed,
            mode: SimMode::default(),
            rates: None,
            scaling: RateScaling::default(),
            dither: true,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub kappa: f64,
    pub m: usize,
    pub channel_uses: usize,
    /// Rates after scaling, in bits per source symbol.
    pub rates: Vec<f64>,
    pub bin_bits: Vec<u32>,
    /// Ideal mode: whether the oracle delivers the indices.
    pub deliverable: bool,
    pub trials: u64,
    /// Trials in which some user decoded some block wrongly.
    pub failures: u64,
    /// Trials in which the given user decoded some block wrongly.
    pub failures_per_user: Vec<u64>,
    pub pe_overall: f64,
    pub pe_per_user: Vec<f64>,
    /// 95% Wilson score interval for `pe_overall`.
    pub wilson: (f64, f64),
}

/// 95% Wilson score interval for `failures` out of `trials`.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if failures == 0 {
        0.0
    } else {
        (center - half).max(0.0).min(p)
    };
    let hi = if failures == trials {
        1.0
    } else {
        (center + half).min(1.0).max(p)
    };
    (lo, hi)
}

fn trial_rng(seed: u64, trial: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial * STREAMS_PER_TRIAL + purpose);
    rng
}

fn validate(pmf: &JointPmf, channel: &ChannelSpec, cfg: &SimConfig) -> Result<()> {
    if pmf.users() != channel.users() {
        return Err(Error::UserCountMismatch {
            source_users: pmf.users(),
            channel_users: channel.users(),
        });
    }
    if cfg.m == 0 {
        return Err(Error::InvalidConfig("m must be at least 1".into()));
    }
    if cfg.trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if !cfg.kappa.is_finite() || cfg.kappa <= 0.0 {
        return Err(Error::InvalidKappa(cfg.kappa));
    }
    if let Some(rates) = &cfg.rates {
        if rates.len() != pmf.users() {
            return Err(Error::ShapeMismatch(format!(
                "{} rates for {} users",
                rates.len(),
                pmf.users()
            )));
        }
    }
    channel.capacities()?;
    Ok(())
}

fn base_rates(pmf: &JointPmf, cfg: &SimConfig) -> Result<Vec<f64>> {
    match &cfg.rates {
        Some(rates) => Ok(rates.to_vec()),
        None => {
            let assignment = assign_rates(&compute_atoms(pmf));
            if !assignment.negative.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "assigned rates are negative for users {:?}; supply rates explicitly",
                    assignment.negative
                )));
            }
            Ok(assignment.rates)
        }
    }
}

fn scaled_rates(rates: Vec<f64>, channel: &ChannelSpec, cfg: &SimConfig) -> Result<Vec<f64>> {
    match cfg.scaling {
        RateScaling::Fixed => Ok(rates),
        RateScaling::FillChannel => {
            let needed = kappa_for_rates(&rates, channel)?;
            if needed > 0.0 && cfg.kappa > needed {
                let factor = cfg.kappa / needed;
                Ok(rates.into_iter().map(|r| r * factor).collect())
            } else {
                Ok(rates)
            }
        }
    }
}

fn check_tractable(pmf: &JointPmf, cfg: &SimConfig, bits: &[u32]) -> Result<()> {
    let mut spaces = Vec::with_capacity(bits.len());
    for &a in pmf.alphabet_sizes() {
        spaces.push(binning::block_space(a, cfg.m)?);
    }
    if cfg.mode == SimMode::SymbolLevel {
        if cfg.m > SYMBOL_LEVEL_MAX_M {
            return Err(Error::TractabilityExceeded(format!(
                "symbol-level mode supports m <= {SYMBOL_LEVEL_MAX_M}, got {}",
                cfg.m
            )));
        }
        if let Some(&b) = bits.iter().find(|&&b| b > SYMBOL_LEVEL_MAX_BITS) {
            return Err(Error::TractabilityExceeded(format!(
                "symbol-level mode supports at most 2^{SYMBOL_LEVEL_MAX_BITS} bins, got 2^{b}"
            )));
        }
    }
    let per_bin: Vec<u64> = spaces
        .iter()
        .zip(bits)
        .map(|(&space, &b)| (space >> b.min(63)).max(1))
        .collect();
    for i in 0..per_bin.len() {
        let total = per_bin
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .try_fold(1u64, |acc, (_, &c)| acc.checked_mul(c))
            .filter(|&t| t <= MAX_DECODER_CANDIDATES);
        if total.is_none() {
            return Err(Error::TractabilityExceeded(format!(
                "decoder {} would search more than {MAX_DECODER_CANDIDATES} candidate tuples",
                i + 1
            )));
        }
    }
    Ok(())
}

struct Trial<'a> {
    pmf: &'a JointPmf,
    channel: &'a ChannelSpec,
    cfg: &'a SimConfig,
    sampler: Sampler,
    decoder: SourceDecoder,
    field: Option<FieldChannel>,
    bits: Vec<u32>,
    channel_uses: usize,
}

impl Trial<'_> {
    /// Per-user decoding failure flags for one trial.
    fn run(&self, trial: u64) -> Result<Vec<bool>> {
        let users = self.pmf.users();
        let m = self.cfg.m;
        let seed = self.cfg.seed;

        let mut source_rng = trial_rng(seed, trial, SOURCE_STREAM);
        let rows: Vec<Vec<usize>> = (0..m)
            .map(|_| self.pmf.outcome(self.sampler.draw(&mut source_rng)))
            .collect();
        let blocks: Vec<Vec<usize>> = (0..users)
            .map(|j| rows.iter().map(|r| r[j]).collect())
            .collect();

        let binning_seed = trial_rng(seed, trial, BINNING_STREAM).random::<u64>();
        let binnings = (0..users)
            .map(|j| {
                Binning::new(
                    self.pmf.alphabet_sizes()[j],
                    m,
                    self.bits[j],
                    binning_seed,
                    j,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let bins: Vec<u64> = blocks
            .iter()
            .zip(&binnings)
            .map(|(b, binning)| binning.encode(b))
            .collect();
        let counts: Vec<u64> = binnings.iter().map(Binning::bin_count).collect();

        let mut dither_rng = trial_rng(seed, trial, DITHER_STREAM);
        let dithers: Vec<u64> = counts
            .iter()
            .map(|&n| {
                if self.cfg.dither {
                    dither_rng.random_range(0..n)
                } else {
                    0
                }
            })
            .collect();
        let sent = bins
            .iter()
            .zip(&dithers)
            .zip(&counts)
            .map(|((&b, &d), &n)| apply_dither(b, d, n))
            .collect::<Result<Vec<_>>>()?;

        let received: Vec<Vec<u64>> = match &self.field {
            None => vec![sent.clone(); users],
            Some(field) => {
                let mut code_rng = trial_rng(seed, trial, CODE_STREAM);
                let mut noise_rng = trial_rng(seed, trial, NOISE_STREAM);
                transport::transport(
                    self.channel,
                    field,
                    &sent,
                    &counts,
                    self.channel_uses,
                    &mut code_rng,
                    &mut noise_rng,
                )?
            }
        };

        (0..users)
            .map(|i| {
                let undithered = received[i]
                    .iter()
                    .zip(&dithers)
                    .zip(&counts)
                    .map(|((&x, &d), &n)| remove_dither(x, d, n))
                    .collect::<Result<Vec<_>>>()?;
                let decoded = self.decoder.decode(i, &blocks[i], &undithered, &binnings)?;
                Ok(decoded != blocks)
            })
            .collect()
    }
}

/// Runs `cfg.trials` independent trials of the scheme at `cfg.kappa`.
pub fn run_sim(pmf: &JointPmf, channel: &ChannelSpec, cfg: &SimConfig) -> Result<SimResult> {
    validate(pmf, channel, cfg)?;
    let users = pmf.users();
    let rates = scaled_rates(base_rates(pmf, cfg)?, channel, cfg)?;
    let bits: Vec<u32> = rates.iter().map(|&r| bin_bits(cfg.m, r)).collect();
    check_tractable(pmf, cfg, &bits)?;
    let channel_uses = (cfg.kappa * cfg.m as f64 - crate::rates::REGION_TOLERANCE)
        .ceil()
        .max(0.0) as usize;

    let (deliverable, field) = match cfg.mode {
        SimMode::Ideal => {
            let per_use: Vec<f64> = rates.iter().map(|r| r / cfg.kappa).collect();
            (channel_region_ok(&per_use, channel)?.satisfied, None)
        }
        SimMode::SymbolLevel => (true, Some(FieldChannel::new(channel)?)),
    };

    let failure_flags: Vec<Vec<bool>> = if deliverable {
        let trial = Trial {
            pmf,
            channel,
            cfg,
            sampler: Sampler::new(pmf),
            decoder: SourceDecoder::new(pmf, cfg.m),
            field,
            bits: bits.clone(),
            channel_uses,
        };
        par::map_indexed(cfg.trials as usize, cfg.execution, |t| trial.run(t as u64))
            .into_iter()
            .collect::<Result<_>>()?
    } else {
        // the oracle refuses delivery, so no decoder gets the other indices
        vec![vec![true; users]; cfg.trials as usize]
    };

    let failures = failure_flags
        .iter()
        .filter(|f| f.iter().any(|&x| x))
        .count() as u64;
    let failures_per_user: Vec<u64> = (0..users)
        .map(|i| failure_flags.iter().filter(|f| f[i]).count() as u64)
        .collect();
    let trials = cfg.trials;
    Ok(SimResult {
        kappa: cfg.kappa,
        m: cfg.m,
        channel_uses,
        rates,
        bin_bits: bits,
        deliverable,
        trials,
        failures,
        pe_overall: failures as f64 / trials as f64,
        pe_per_user: failures_per_user
            .iter()
            .map(|&f| f as f64 / trials as f64)
            .collect(),
        failures_per_user,
        wilson: wilson_interval(failures, trials),
    })
}

/// [`run_sim`] at each `kappa`, everything else fixed.
pub fn run_sweep(
    pmf: &JointPmf,
    channel: &ChannelSpec,
    cfg: &SimConfig,
    kappas: &[f64],
) -> Result<Vec<SimResult>> {
    kappas
        .iter()
        .map(|&kappa| {
            run_sim(
                pmf,
                channel,
                &SimConfig {
                    kappa,
                    ..cfg.clone()
                },
            )
        })
        .collect()
}
