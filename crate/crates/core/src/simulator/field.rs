//! Symbol-level model of one channel use over a prime field.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};

/// Outputs of one channel use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelOutput {
    /// `Y_0`, received by the relay.
    pub relay: u32,
    /// `Y_1..Y_L`, received by the users.
    pub users: Vec<u32>,
}

/// Samples the additive noise of a [`ChannelSpec`] over `GF(q)`, `q` prime.
#[derive(Debug, Clone)]
pub struct FieldChannel {
    q: u32,
    relay_noise: WeightedIndex<f64>,
    user_noise: Vec<WeightedIndex<f64>>,
}

impl FieldChannel {
    pub fn new(spec: &ChannelSpec) -> Result<Self> {
        if !spec.is_prime_field() {
            return Err(Error::InvalidField(format!(
                "simulation needs a prime field order, got {}",
                spec.q()
            )));
        }
        let noise = |pmf: &[f64]| WeightedIndex::new(pmf).expect("validated noise pmf");
        Ok(FieldChannel {
            q: spec.q(),
            relay_noise: noise(spec.noise_relay()),
            user_noise: (0..spec.users())
                .map(|i| noise(spec.noise_user(i)))
                .collect(),
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn users(&self) -> usize {
        self.user_noise.len()
    }

    /// One use of the uplink and all downlinks with fresh i.i.d. noise.
    pub fn channel_use<R: Rng + ?Sized>(
        &self,
        user_inputs: &[u32],
        relay_input: u32,
        rng: &mut R,
    ) -> Result<ChannelOutput> {
        if user_inputs.len() != self.users() {
            return Err(Error::ShapeMismatch(format!(
                "{} uplink inputs for {} users",
                user_inputs.len(),
                self.users()
            )));
        }
        let q = self.q as u64;
        let mut sum = 0u64;
        for &x in user_inputs.iter().chain(std::iter::once(&relay_input)) {
            if x >= self.q {
                return Err(Error::SymbolOutOfField {
                    symbol: x,
                    q: self.q,
                });
            }
        }
        for &x in user_inputs {
            sum = (sum + x as u64) % q;
        }
        let relay = ((sum + self.relay_noise.sample(rng) as u64) % q) as u32;
        let users = self
            .user_noise
            .iter()
            .map(|n| ((relay_input as u64 + n.sample(rng) as u64) % q) as u32)
            .collect();
        Ok(ChannelOutput { relay, users })
    }
}
