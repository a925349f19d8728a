//! Finite-field multi-way relay channel description.
//!
//! Each channel use carries an uplink `Y_0 = X_1 + ... + X_L + N_0` and
//! downlinks `Y_i = X_0 + N_i`, with additions over the field of order `q`.

use crate::distribution::{entropy_bits, PMF_TOLERANCE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    q: u32,
    noise_relay: Vec<f64>,
    noise_users: Vec<Vec<f64>>,
}

impl ChannelSpec {
    pub fn new(q: u32, noise_relay: Vec<f64>, noise_users: Vec<Vec<f64>>) -> Result<Self> {
        if q < 2 || !is_prime_power(q) {
            return Err(Error::InvalidField(format!(
                "field order {q} is not a prime power"
            )));
        }
        if noise_users.is_empty() {
            return Err(Error::ShapeMismatch("channel has no users".into()));
        }
        check_noise(q, &noise_relay, "noise_relay")?;
        for (i, n) in noise_users.iter().enumerate() {
            check_noise(q, n, &format!("noise_users[{i}]"))?;
        }
        Ok(ChannelSpec {
            q,
            noise_relay,
            noise_users,
        })
    }

    /// Channel whose noise is identically zero on every link.
    pub fn noiseless(q: u32, users: usize) -> Result<Self> {
        let mut point = vec![0.0; q as usize];
        if let Some(first) = point.first_mut() {
            *first = 1.0;
        }
        ChannelSpec::new(q, point.clone(), vec![point; users])
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn users(&self) -> usize {
        self.noise_users.len()
    }

    pub fn noise_relay(&self) -> &[f64] {
        &self.noise_relay
    }

    pub fn noise_user(&self, user: usize) -> &[f64] {
        &self.noise_users[user]
    }

    pub fn is_prime_field(&self) -> bool {
        is_prime(self.q)
    }

    /// `log2 q` bits per channel symbol.
    pub fn symbol_bits(&self) -> f64 {
        (self.q as f64).log2()
    }

    /// `log2 q - max(H(N_0), H(N_i))`, the sum-rate available for the
    /// messages user `i` has to decode.
    pub fn capacity(&self, user: usize) -> f64 {
        let relay = entropy_bits(&self.noise_relay);
        let own = entropy_bits(&self.noise_users[user]);
        self.symbol_bits() - relay.max(own)
    }

    /// Per-user capacities, failing when some user cannot decode at any
    /// positive rate.
    pub fn capacities(&self) -> Result<Vec<f64>> {
        (0..self.users())
            .map(|user| {
                let capacity = self.capacity(user);
                if capacity <= 0.0 {
                    Err(Error::DegenerateChannel { user, capacity })
                } else {
                    Ok(capacity)
                }
            })
            .collect()
    }
}

fn check_noise(q: u32, pmf: &[f64], name: &str) -> Result<()> {
    if pmf.len() != q as usize {
        return Err(Error::ShapeMismatch(format!(
            "{name} has {} entries, field order is {q}",
            pmf.len()
        )));
    }
    for (index, &value) in pmf.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFiniteProbability { index, value });
        }
        if value < 0.0 {
            return Err(Error::NegativeProbability { index, value });
        }
    }
    let sum: f64 = pmf.iter().sum();
    if (sum - 1.0).abs() > PMF_TOLERANCE {
        return Err(Error::SumNotOne { sum });
    }
    Ok(())
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn is_prime_power(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d)).expect("n >= 2 has a divisor");
    let mut rest = n;
    while rest.is_multiple_of(p) {
        rest /= p;
    }
    rest == 1
}
