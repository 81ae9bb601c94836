//! Secrecy outage probabilities under the proposed decoding order.
//!
//! For the near user, outage happens when
//! `|h1|^2 < Pi1 |h2|^2 / ((1 - a) rho_t |h2|^2 + 1) + A1` with
//! `A1 = (Pi1 - 1) / (a rho_t)`. Conditioning on `|h2|^2 = y` and averaging
//! the exponential CDF of `|h1|^2` over `y` leaves a one-dimensional
//! integral over the half line; the far user is the mirror image with the
//! roles of the two gains exchanged.
//!
//! With `x = slope * y` the leakage term only depends on `x / (x + 1)`,
//! which changes fastest around `y = 1 / slope`, while the density decays on
//! the scale of its mean. The substitution `y = expm1(s) / slope` makes the
//! leakage term `1 - e^-s` and turns the density into a smooth bump in `s`,
//! so a single truncated interval in `s` is resolved by Gauss-Legendre with
//! node doubling whatever the ratio of the two scales.

use crate::channel::ChannelStats;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_unit, Estimate};
use crate::{check_alpha, User};

/// Target secrecy rates (bits/s/Hz) and their exponentials `Pi = 2^R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetRates {
    rth1: f64,
    rth2: f64,
    pi1: f64,
    pi2: f64,
}

impl TargetRates {
    pub fn new(rth1: f64, rth2: f64) -> Result<Self> {
        for (name, value) in [("rth1", rth1), ("rth2", rth2)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "target secrecy rate must be finite and non-negative",
                });
            }
        }
        Ok(TargetRates {
            rth1,
            rth2,
            pi1: rth1.exp2(),
            pi2: rth2.exp2(),
        })
    }

    pub fn rth1(&self) -> f64 {
        self.rth1
    }

    pub fn rth2(&self) -> f64 {
        self.rth2
    }

    pub fn pi1(&self) -> f64 {
        self.pi1
    }

    pub fn pi2(&self) -> f64 {
        self.pi2
    }

    pub fn rate(&self, user: User) -> f64 {
        match user {
            User::Near => self.rth1,
            User::Far => self.rth2,
        }
    }

    pub fn pi(&self, user: User) -> f64 {
        match user {
            User::Near => self.pi1,
            User::Far => self.pi2,
        }
    }

    pub fn with_rth1(&self, rth1: f64) -> Result<Self> {
        TargetRates::new(rth1, self.rth2)
    }

    pub fn with_rth2(&self, rth2: f64) -> Result<Self> {
        TargetRates::new(self.rth1, rth2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SopKind {
    Exact,
    Asymptotic,
    Empirical,
}

/// Both users' outage probabilities at one power split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SopPair {
    pub alpha: f64,
    pub so1: f64,
    pub so2: f64,
    pub kind: SopKind,
    /// Estimated absolute quadrature error; zero unless `kind` is exact.
    pub quad_error: f64,
}

impl SopPair {
    /// The min-max objective `max(so1, so2)`.
    pub fn max_sop(&self) -> f64 {
        self.so1.max(self.so2)
    }

    pub fn get(&self, user: User) -> f64 {
        match user {
            User::Near => self.so1,
            User::Far => self.so2,
        }
    }
}

/// An outage probability with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SopValue {
    pub value: f64,
    pub error: f64,
    pub nodes: usize,
}

// Probability mass of the averaged density left beyond the truncation
// point is exp(-TAIL_DECAY).
const TAIL_DECAY: f64 = 60.0;

// Shared shape of both exact integrals:
//   1 - exp(-offset) * E_y[exp(-pi * y / ((slope * y + 1) * scale))],
// with y ~ Exp(mean). Written as -expm1(-offset) + exp(-offset) * E[1 - e^-k]
// so small probabilities keep their relative accuracy.
fn outage_integral(mean: f64, pi: f64, slope: f64, scale: f64, offset: f64) -> Result<SopValue> {
    let head = -(-offset).exp_m1();
    let keep = (-offset).exp();
    if keep == 0.0 {
        return Ok(SopValue {
            value: 1.0,
            error: 0.0,
            nodes: 0,
        });
    }
    let c = slope * mean;
    let span = (TAIL_DECAY * c).ln_1p();
    let saturation = pi / (slope * scale);
    let Estimate {
        value,
        error,
        nodes,
    } = integrate_unit(|t| {
        let s = span * t;
        let density = (s - s.exp_m1() / c).exp() / c;
        let k = saturation * -(-s).exp_m1();
        span * density * -(-k).exp_m1()
    })?;
    Ok(SopValue {
        value: (head + keep * value).clamp(0.0, 1.0),
        error: keep * error,
        nodes,
    })
}

/// Exact outage probability of the near user U1.
pub fn exact_sop_near(stats: &ChannelStats, alpha: f64, targets: &TargetRates) -> Result<SopValue> {
    check_alpha(alpha)?;
    let rho = stats.rho_t();
    let pi = targets.pi1();
    let a1 = (pi - 1.0) / (alpha * rho);
    outage_integral(
        stats.lambda2(),
        pi,
        (1.0 - alpha) * rho,
        stats.lambda1(),
        a1 / stats.lambda1(),
    )
}

/// Exact outage probability of the far user U2.
pub fn exact_sop_far(stats: &ChannelStats, alpha: f64, targets: &TargetRates) -> Result<SopValue> {
    check_alpha(alpha)?;
    let rho = stats.rho_t();
    let pi = targets.pi2();
    let a2 = (pi - 1.0) / ((1.0 - alpha) * rho);
    outage_integral(
        stats.lambda1(),
        pi,
        alpha * rho,
        stats.lambda2(),
        a2 / stats.lambda2(),
    )
}

pub fn exact_sop(
    user: User,
    stats: &ChannelStats,
    alpha: f64,
    targets: &TargetRates,
) -> Result<SopValue> {
    match user {
        User::Near => exact_sop_near(stats, alpha, targets),
        User::Far => exact_sop_far(stats, alpha, targets),
    }
}

/// High-SNR approximation of the near user's outage probability,
/// `1 - exp((Pi1 + a - 1) / (a (a - 1) rho_t lambda1))`.
pub fn asymptotic_sop_near(stats: &ChannelStats, alpha: f64, targets: &TargetRates) -> Result<f64> {
    check_alpha(alpha)?;
    let exponent =
        (targets.pi1() + alpha - 1.0) / (alpha * (alpha - 1.0) * stats.rho_t() * stats.lambda1());
    Ok((-exponent.exp_m1()).clamp(0.0, 1.0))
}

/// High-SNR approximation of the far user's outage probability,
/// `1 - exp((Pi2 - a) / (a (a - 1) rho_t lambda2))`.
pub fn asymptotic_sop_far(stats: &ChannelStats, alpha: f64, targets: &TargetRates) -> Result<f64> {
    check_alpha(alpha)?;
    let exponent =
        (targets.pi2() - alpha) / (alpha * (alpha - 1.0) * stats.rho_t() * stats.lambda2());
    Ok((-exponent.exp_m1()).clamp(0.0, 1.0))
}

pub fn asymptotic_sop(
    user: User,
    stats: &ChannelStats,
    alpha: f64,
    targets: &TargetRates,
) -> Result<f64> {
    match user {
        User::Near => asymptotic_sop_near(stats, alpha, targets),
        User::Far => asymptotic_sop_far(stats, alpha, targets),
    }
}

pub fn sop_pair_exact(stats: &ChannelStats, alpha: f64, targets: &TargetRates) -> Result<SopPair> {
    let near = exact_sop_near(stats, alpha, targets)?;
    let far = exact_sop_far(stats, alpha, targets)?;
    Ok(SopPair {
        alpha,
        so1: near.value,
        so2: far.value,
        kind: SopKind::Exact,
        quad_error: near.error.max(far.error),
    })
}

pub fn sop_pair_asymptotic(
    stats: &ChannelStats,
    alpha: f64,
    targets: &TargetRates,
) -> Result<SopPair> {
    Ok(SopPair {
        alpha,
        so1: asymptotic_sop_near(stats, alpha, targets)?,
        so2: asymptotic_sop_far(stats, alpha, targets)?,
        kind: SopKind::Asymptotic,
        quad_error: 0.0,
    })
}

/// Logarithm of the near-user integrand at `y` (density of `|h2|^2`
/// included), as a function of the power split.
pub fn log_integrand_near(stats: &ChannelStats, alpha: f64, targets: &TargetRates, y: f64) -> f64 {
    let (l1, l2, rho, pi) = (
        stats.lambda1(),
        stats.lambda2(),
        stats.rho_t(),
        targets.pi1(),
    );
    -l2.ln()
        - pi * y / (((1.0 - alpha) * rho * y + 1.0) * l1)
        - y / l2
        - (pi - 1.0) / (alpha * rho * l1)
}

/// Logarithm of the far-user integrand at `y` (density of `|h1|^2`
/// included).
pub fn log_integrand_far(stats: &ChannelStats, alpha: f64, targets: &TargetRates, y: f64) -> f64 {
    let (l1, l2, rho, pi) = (
        stats.lambda1(),
        stats.lambda2(),
        stats.rho_t(),
        targets.pi2(),
    );
    -l1.ln()
        - pi * y / ((alpha * rho * y + 1.0) * l2)
        - y / l1
        - (pi - 1.0) / ((1.0 - alpha) * rho * l2)
}
