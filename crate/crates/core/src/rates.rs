//! SINR and secrecy-rate algebra for the two decoding orders.
//!
//! `Gamma_ij` is the SINR of user `i`'s signal when decoded at user `j`.
//! Under the conventional order the far user treats the near user's signal
//! as noise while the near user removes the far user's signal first. Under
//! the proposed order each user first decodes the *other* user's signal and
//! cancels it before decoding its own.

use crate::channel::GainSample;
use crate::error::{Error, Result};

/// Fraction of the transmit power given to the near user, strictly in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerSplit(f64);

impl PowerSplit {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(PowerSplit(alpha))
        } else {
            Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "power split must lie strictly between 0 and 1",
            })
        }
    }

    pub fn near(self) -> f64 {
        self.0
    }

    pub fn far(self) -> f64 {
        1.0 - self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodingOrder {
    Conventional,
    Proposed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSet {
    /// U1's signal at U1.
    pub g11: f64,
    /// U1's signal at U2 (leakage to the untrusted far user).
    pub g12: f64,
    /// U2's signal at U1 (leakage to the untrusted near user).
    pub g21: f64,
    /// U2's signal at U2.
    pub g22: f64,
    pub order: DecodingOrder,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    pub r11: f64,
    pub r12: f64,
    pub r21: f64,
    pub r22: f64,
    /// Secrecy rate of U1, `r11 - r12`; negative values are kept.
    pub rs1: f64,
    /// Secrecy rate of U2, `r22 - r21`; negative values are kept.
    pub rs2: f64,
}

pub fn sinr_conventional(sample: GainSample, alpha: PowerSplit, rho_t: f64) -> SinrSet {
    let (a, b) = (alpha.near(), alpha.far());
    let inv = 1.0 / rho_t;
    SinrSet {
        g11: a * rho_t * sample.g1,
        g12: a * rho_t * sample.g2,
        g21: b * sample.g1 / (a * sample.g1 + inv),
        g22: b * sample.g2 / (a * sample.g2 + inv),
        order: DecodingOrder::Conventional,
    }
}

pub fn sinr_proposed(sample: GainSample, alpha: PowerSplit, rho_t: f64) -> SinrSet {
    let (a, b) = (alpha.near(), alpha.far());
    let inv = 1.0 / rho_t;
    SinrSet {
        g11: a * rho_t * sample.g1,
        g12: a * sample.g2 / (b * sample.g2 + inv),
        g21: b * sample.g1 / (a * sample.g1 + inv),
        g22: b * rho_t * sample.g2,
        order: DecodingOrder::Proposed,
    }
}

pub fn sinr(order: DecodingOrder, sample: GainSample, alpha: PowerSplit, rho_t: f64) -> SinrSet {
    match order {
        DecodingOrder::Conventional => sinr_conventional(sample, alpha, rho_t),
        DecodingOrder::Proposed => sinr_proposed(sample, alpha, rho_t),
    }
}

pub fn rates_from_sinrs(sinrs: &SinrSet) -> RateSet {
    let rate = |g: f64| g.ln_1p() / std::f64::consts::LN_2;
    let (r11, r12, r21, r22) = (
        rate(sinrs.g11),
        rate(sinrs.g12),
        rate(sinrs.g21),
        rate(sinrs.g22),
    );
    RateSet {
        r11,
        r12,
        r21,
        r22,
        rs1: r11 - r12,
        rs2: r22 - r21,
    }
}

/// Range of power splits giving both users positive secrecy under the
/// proposed order. Empty when `lower >= upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyWindow {
    pub lower: f64,
    pub upper: f64,
}

impl SecrecyWindow {
    pub fn is_empty(&self) -> bool {
        self.lower >= self.upper
    }

    pub fn contains(&self, alpha: f64) -> bool {
        self.lower < alpha && alpha < self.upper
    }
}

/// Computes the positive-secrecy window for one channel realization.
///
/// With `b = (g1 - g2) / (g1 g2 rho_t)`, U2 has positive secrecy iff
/// `alpha > b` and U1 iff `alpha < 1 + b`; intersected with (0, 1) this is
/// `(b, 1)`. Ties `g1 == g2` are accepted and give `b = 0`.
pub fn positive_secrecy_window(sample: GainSample, rho_t: f64) -> Result<SecrecyWindow> {
    if !(sample.g1 >= sample.g2 && sample.g2 > 0.0) {
        return Err(Error::GainOrdering {
            g1: sample.g1,
            g2: sample.g2,
        });
    }
    let lower = (sample.g1 - sample.g2) / (sample.g1 * sample.g2 * rho_t);
    Ok(SecrecyWindow {
        lower,
        upper: (1.0 + lower).min(1.0),
    })
}

/// Whether the far user's secrecy rate is non-positive under the
/// conventional order; holds for every realization with `g1 >= g2`.
pub fn conventional_far_secrecy_is_nonpositive(
    sample: GainSample,
    alpha: PowerSplit,
    rho_t: f64,
) -> bool {
    rates_from_sinrs(&sinr_conventional(sample, alpha, rho_t)).rs2 <= 0.0
}
