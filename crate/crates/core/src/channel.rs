//! System geometry and Rayleigh-fading channel statistics.
//!
//! Every link experiences path loss `Lc * d^-n` on top of unit-mean Rayleigh
//! fading, so the channel power gain `|h_i|^2` of user `i` is exponentially
//! distributed with mean `lambda_i = Lc * d_i^-n`. Powers enter in dBm at the
//! boundary and are converted to Watts once; everything downstream is linear.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{positive, Error, Result};

/// Converts a power level in dBm to Watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Converts a power level in Watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Geometry, path loss and power budget of the two-user downlink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Distance from the base station to the near user U1, in meters.
    pub near_distance: f64,
    /// Distance from the base station to the far user U2, in meters.
    pub far_distance: f64,
    pub path_loss_exponent: f64,
    pub path_loss_constant: f64,
    /// Noise power at both receivers, in Watts.
    pub noise_power: f64,
    /// Total transmit power of the base station, in Watts.
    pub transmit_power: f64,
}

impl SystemParams {
    /// Builds and validates a parameter set. Powers are given in dBm.
    pub fn new(
        near_distance: f64,
        far_distance: f64,
        path_loss_exponent: f64,
        path_loss_constant: f64,
        noise_dbm: f64,
        transmit_dbm: f64,
    ) -> Result<Self> {
        let params = SystemParams {
            near_distance,
            far_distance,
            path_loss_exponent,
            path_loss_constant,
            noise_power: dbm_to_watts(noise_dbm),
            transmit_power: dbm_to_watts(transmit_dbm),
        };
        params.validate()?;
        Ok(params)
    }

    /// The reference deployment: users at 50 m and 100 m, `n = 2.5`,
    /// `Lc = 1`, noise at -60 dBm, and a transmit power giving 30 dB mean
    /// received SNR at the far user.
    pub fn reference() -> Self {
        let base = SystemParams {
            near_distance: 50.0,
            far_distance: 100.0,
            path_loss_exponent: 2.5,
            path_loss_constant: 1.0,
            noise_power: dbm_to_watts(-60.0),
            transmit_power: 1.0,
        };
        base.with_received_snr_db(30.0)
            .expect("reference parameters are valid")
    }

    pub fn validate(&self) -> Result<()> {
        positive("near_distance", self.near_distance)?;
        positive("far_distance", self.far_distance)?;
        positive("path_loss_exponent", self.path_loss_exponent)?;
        positive("path_loss_constant", self.path_loss_constant)?;
        positive("noise_power", self.noise_power)?;
        positive("transmit_power", self.transmit_power)?;
        if self.near_distance >= self.far_distance {
            return Err(Error::DistanceOrdering {
                d1: self.near_distance,
                d2: self.far_distance,
            });
        }
        Ok(())
    }

    /// Returns a copy whose transmit power yields the requested mean
    /// received SNR (dB) at the far user; geometry and noise are kept.
    pub fn with_received_snr_db(&self, rho_r_db: f64) -> Result<Self> {
        if !rho_r_db.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rho_r_db",
                value: rho_r_db,
                reason: "must be finite",
            });
        }
        let lambda2 = mean_gain(
            self.far_distance,
            self.path_loss_constant,
            self.path_loss_exponent,
        )?;
        let rho_t = 10f64.powf(rho_r_db / 10.0) / lambda2;
        let params = SystemParams {
            transmit_power: rho_t * self.noise_power,
            ..*self
        };
        params.validate()?;
        Ok(params)
    }

    /// Returns a copy with the far user moved to `far_distance`; the
    /// transmit power is left unchanged.
    pub fn with_far_distance(&self, far_distance: f64) -> Result<Self> {
        let params = SystemParams {
            far_distance,
            ..*self
        };
        params.validate()?;
        Ok(params)
    }

    pub fn transmit_snr(&self) -> f64 {
        self.transmit_power / self.noise_power
    }
}

/// Mean channel gains of both users and the transmit SNR.
///
/// `lambda1 >= lambda2 > 0` always holds. Statistics derived from a
/// geometry have `lambda1 > lambda2` strictly; equality is admitted for
/// symmetric analyses built directly through [`ChannelStats::new`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStats {
    lambda1: f64,
    lambda2: f64,
    rho_t: f64,
}

impl ChannelStats {
    pub fn new(lambda1: f64, lambda2: f64, rho_t: f64) -> Result<Self> {
        positive("lambda1", lambda1)?;
        positive("lambda2", lambda2)?;
        positive("rho_t", rho_t)?;
        if lambda1 < lambda2 {
            return Err(Error::InvalidParameter {
                name: "lambda1",
                value: lambda1,
                reason: "near-user mean gain must not be below the far user's",
            });
        }
        Ok(ChannelStats {
            lambda1,
            lambda2,
            rho_t,
        })
    }

    /// Mean of `|h1|^2` (near user).
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    /// Mean of `|h2|^2` (far user).
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// Transmit SNR `P_t / sigma^2`, linear.
    pub fn rho_t(&self) -> f64 {
        self.rho_t
    }

    pub fn with_rho_t(&self, rho_t: f64) -> Result<Self> {
        ChannelStats::new(self.lambda1, self.lambda2, rho_t)
    }
}

/// A single realization of both channel power gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSample {
    pub g1: f64,
    pub g2: f64,
}

/// Mean power gain `Lc * d^-n` at distance `d`.
pub fn mean_gain(distance: f64, path_loss_constant: f64, path_loss_exponent: f64) -> Result<f64> {
    positive("distance", distance)?;
    positive("path_loss_constant", path_loss_constant)?;
    positive("path_loss_exponent", path_loss_exponent)?;
    Ok(path_loss_constant * distance.powf(-path_loss_exponent))
}

pub fn derive_stats(params: &SystemParams) -> Result<ChannelStats> {
    params.validate()?;
    let lambda1 = mean_gain(
        params.near_distance,
        params.path_loss_constant,
        params.path_loss_exponent,
    )?;
    let lambda2 = mean_gain(
        params.far_distance,
        params.path_loss_constant,
        params.path_loss_exponent,
    )?;
    ChannelStats::new(lambda1, lambda2, params.transmit_snr())
}

/// Mean received SNR at the far user in dB, `10 log10(rho_t * lambda2)`.
pub fn received_snr_far_db(stats: &ChannelStats) -> f64 {
    10.0 * (stats.rho_t * stats.lambda2).log10()
}

/// Counter-addressed stream of exponential gain pairs.
///
/// Sample `i` is derived from ChaCha8 keystream words `4i .. 4i + 4`
/// under the given seed: one 64-bit word drives `g1`, the next `g2`, each
/// through the inverse CDF `-lambda * ln(1 - u)`. Any contiguous range of
/// indices can therefore be generated independently and matches the
/// corresponding slice of the serial sequence.
#[derive(Debug, Clone)]
pub struct GainStream {
    lambda1: f64,
    lambda2: f64,
    seed: u64,
}

const WORDS_PER_SAMPLE: u128 = 4;

impl GainStream {
    pub fn new(stats: &ChannelStats, seed: u64) -> Self {
        GainStream {
            lambda1: stats.lambda1,
            lambda2: stats.lambda2,
            seed,
        }
    }

    /// Writes samples `start .. start + out.len()` into `out`.
    pub fn fill(&self, start: u64, out: &mut [GainSample]) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_word_pos(start as u128 * WORDS_PER_SAMPLE);
        for slot in out.iter_mut() {
            let u1 = unit_interval(rng.next_u64());
            let u2 = unit_interval(rng.next_u64());
            *slot = GainSample {
                g1: -self.lambda1 * (-u1).ln_1p(),
                g2: -self.lambda2 * (-u2).ln_1p(),
            };
        }
    }

    pub fn sample(&self, index: u64) -> GainSample {
        let mut one = [GainSample { g1: 0.0, g2: 0.0 }];
        self.fill(index, &mut one);
        one[0]
    }
}

// Top 53 bits as a double in [0, 1).
fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws `count` independent gain pairs using a [`GainStream`].
pub fn sample_gains(stats: &ChannelStats, count: usize, seed: u64) -> Result<Vec<GainSample>> {
    if count == 0 {
        return Err(Error::InvalidParameter {
            name: "count",
            value: 0.0,
            reason: "at least one sample is required",
        });
    }
    let mut out = vec![GainSample { g1: 0.0, g2: 0.0 }; count];
    GainStream::new(stats, seed).fill(0, &mut out);
    Ok(out)
}
