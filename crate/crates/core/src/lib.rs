//! Secrecy outage analysis for a two-user downlink NOMA system whose users
//! do not trust each other.
//!
//! Both users first decode and cancel the *other* user's signal, which gives
//! each of them a positive secrecy rate over a wide range of power splits.
//! The crate provides:
//!
//! * [`channel`]: path loss, Rayleigh statistics, seeded gain sampling;
//! * [`rates`]: SINRs, rates and secrecy rates for both decoding orders;
//! * [`sop`]: exact (quadrature) and high-SNR secrecy outage probabilities;
//! * [`optimizer`]: per-user optimal power splits and the min-max fair split;
//! * [`montecarlo`]: a seeded empirical oracle for all of the above.

pub mod channel;
pub mod error;
pub mod montecarlo;
pub mod optimizer;
pub mod quadrature;
pub mod rates;
pub mod sop;

pub use channel::{
    derive_stats, mean_gain, received_snr_far_db, sample_gains, ChannelStats, GainSample,
    SystemParams,
};
pub use error::{Error, Result};
pub use montecarlo::{empirical_sop, EmpiricalSop, SimConfig};
pub use optimizer::{
    gss_minimize, minmax_pa, minmax_pa_asymptotic, GssConfig, MinMaxOutcome, PaSolution,
};
pub use rates::{DecodingOrder, PowerSplit, RateSet, SinrSet};
pub use sop::{SopKind, SopPair, TargetRates};

/// Smallest power split accepted by the outage expressions.
pub const ALPHA_MIN: f64 = 1e-6;
/// Largest power split accepted by the outage expressions.
pub const ALPHA_MAX: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum User {
    /// U1, the strong user closer to the base station.
    Near,
    /// U2, the weak user.
    Far,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<f64> {
    if (ALPHA_MIN..=ALPHA_MAX).contains(&alpha) {
        Ok(alpha)
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}
