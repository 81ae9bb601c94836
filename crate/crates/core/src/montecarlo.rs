//! Seeded Monte Carlo estimates of the outage probabilities.
//!
//! Samples are drawn from a counter-addressed [`GainStream`], split into
//! fixed-size index blocks that are processed in parallel and merged by
//! summing integer counts, so results do not depend on the worker count.

use rayon::prelude::*;

use crate::channel::{ChannelStats, GainSample, GainStream};
use crate::error::{Error, Result};
use crate::rates::{rates_from_sinrs, sinr_conventional, sinr_proposed, PowerSplit};
use crate::sop::{self, TargetRates};
use crate::User;

pub const DEFAULT_REALIZATIONS: u64 = 1_000_000;
const BLOCK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub realizations: u64,
    pub seed: u64,
    /// Keep only realizations with `g1 > g2`.
    pub condition_on_ordering: bool,
}

impl SimConfig {
    pub fn new(realizations: u64, seed: u64) -> Result<Self> {
        if realizations == 0 {
            return Err(Error::InvalidParameter {
                name: "realizations",
                value: 0.0,
                reason: "at least one realization is required",
            });
        }
        Ok(SimConfig {
            realizations,
            seed,
            condition_on_ordering: false,
        })
    }

    pub fn conditioned(self, on: bool) -> Self {
        SimConfig {
            condition_on_ordering: on,
            ..self
        }
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            realizations: DEFAULT_REALIZATIONS,
            seed: 0x5eed,
            condition_on_ordering: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalSop {
    pub so1_hat: f64,
    pub so2_hat: f64,
    pub stderr1: f64,
    pub stderr2: f64,
    /// Realizations that entered the estimate (all of them unless
    /// conditioning on the gain ordering).
    pub used: u64,
    pub outages1: u64,
    pub outages2: u64,
}

impl EmpiricalSop {
    pub fn get(&self, user: User) -> f64 {
        match user {
            User::Near => self.so1_hat,
            User::Far => self.so2_hat,
        }
    }

    pub fn stderr(&self, user: User) -> f64 {
        match user {
            User::Near => self.stderr1,
            User::Far => self.stderr2,
        }
    }
}

/// Binomial standard error `sqrt(p (1 - p) / n)`.
pub fn binomial_stderr(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

/// Runs `count` over every block of the stream and sums the per-block
/// tallies.
fn tally<const K: usize>(
    stats: &ChannelStats,
    sim: &SimConfig,
    count: impl Fn(&GainSample) -> [u64; K] + Sync,
) -> [u64; K] {
    let stream = GainStream::new(stats, sim.seed);
    let blocks = sim.realizations.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|block| {
            let start = block * BLOCK;
            let len = (sim.realizations - start).min(BLOCK) as usize;
            let mut buf = vec![GainSample { g1: 0.0, g2: 0.0 }; len];
            stream.fill(start, &mut buf);
            let mut acc = [0u64; K];
            for s in &buf {
                for (a, c) in acc.iter_mut().zip(count(s)) {
                    *a += c;
                }
            }
            acc
        })
        .reduce(
            || [0u64; K],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// Estimates both users' outage probabilities under the proposed decoding
/// order. A realization is in outage for user `i` when its secrecy rate is
/// strictly below the target.
pub fn empirical_sop(
    stats: &ChannelStats,
    alpha: f64,
    targets: &TargetRates,
    sim: &SimConfig,
) -> Result<EmpiricalSop> {
    SimConfig::new(sim.realizations, sim.seed)?;
    let split = PowerSplit::new(alpha)?;
    let rho = stats.rho_t();
    let (rth1, rth2) = (targets.rth1(), targets.rth2());
    let conditioned = sim.condition_on_ordering;
    let [used, out1, out2] = tally(stats, sim, |s| {
        if conditioned && s.g1 <= s.g2 {
            return [0, 0, 0];
        }
        let r = rates_from_sinrs(&sinr_proposed(*s, split, rho));
        [1, (r.rs1 < rth1) as u64, (r.rs2 < rth2) as u64]
    });
    if used == 0 {
        return Err(Error::InvalidParameter {
            name: "realizations",
            value: sim.realizations as f64,
            reason: "no realization satisfied the gain ordering",
        });
    }
    let (p1, p2) = (out1 as f64 / used as f64, out2 as f64 / used as f64);
    Ok(EmpiricalSop {
        so1_hat: p1,
        so2_hat: p2,
        stderr1: binomial_stderr(p1, used),
        stderr2: binomial_stderr(p2, used),
        used,
        outages1: out1,
        outages2: out2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViolationCount {
    /// Realizations with `g1 > g2` where the far user still has positive
    /// secrecy under the conventional order.
    pub violations: u64,
    /// Realizations with `g1 > g2`.
    pub eligible: u64,
    pub total: u64,
    /// `violations / total`.
    pub rate: f64,
}

/// Counts realizations that would contradict the claim that the
/// conventional order never gives the far user positive secrecy.
pub fn empirical_conventional_violation_rate(
    stats: &ChannelStats,
    alpha: f64,
    sim: &SimConfig,
) -> Result<ViolationCount> {
    SimConfig::new(sim.realizations, sim.seed)?;
    let split = PowerSplit::new(alpha)?;
    let rho = stats.rho_t();
    let [eligible, violations] = tally(stats, sim, |s| {
        if s.g1 <= s.g2 {
            return [0, 0];
        }
        let positive = rates_from_sinrs(&sinr_conventional(*s, split, rho)).rs2 > 0.0;
        [1, positive as u64]
    });
    Ok(ViolationCount {
        violations,
        eligible,
        total: sim.realizations,
        rate: violations as f64 / sim.realizations as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationPoint {
    pub stats: ChannelStats,
    pub alpha: f64,
    pub targets: TargetRates,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointComparison {
    pub analytical: f64,
    pub empirical: f64,
    /// Binomial standard error at the analytical probability.
    pub stderr: f64,
    pub deviation: f64,
    /// `3 * stderr + 1e-6`.
    pub bound: f64,
}

impl PointComparison {
    pub fn within_bound(&self) -> bool {
        self.deviation <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmseReport {
    pub points: Vec<PointComparison>,
    pub rmse: f64,
}

impl RmseReport {
    pub fn all_within_bound(&self) -> bool {
        self.points.iter().all(PointComparison::within_bound)
    }
}

/// Slack added to every three-sigma bound to absorb quadrature error.
pub const BOUND_SLACK: f64 = 1e-6;

/// Compares one user's exact outage probability with the Monte Carlo
/// estimate at each point and reports the root-mean-square deviation.
pub fn rmse_vs_analytical(
    points: &[ValidationPoint],
    user: User,
    sim: &SimConfig,
) -> Result<RmseReport> {
    if points.is_empty() {
        return Err(Error::InvalidParameter {
            name: "points",
            value: 0.0,
            reason: "validation grid is empty",
        });
    }
    let compared = points
        .iter()
        .map(|p| {
            let analytical = sop::exact_sop(user, &p.stats, p.alpha, &p.targets)?.value;
            let est = empirical_sop(&p.stats, p.alpha, &p.targets, sim)?;
            let empirical = est.get(user);
            let stderr = binomial_stderr(analytical, est.used);
            Ok(PointComparison {
                analytical,
                empirical,
                stderr,
                deviation: (empirical - analytical).abs(),
                bound: 3.0 * stderr + BOUND_SLACK,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mse = compared
        .iter()
        .map(|c| c.deviation * c.deviation)
        .sum::<f64>()
        / compared.len() as f64;
    Ok(RmseReport {
        points: compared,
        rmse: mse.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats() -> ChannelStats {
        ChannelStats::new(1.0, 0.4, 20.0).unwrap()
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let t = TargetRates::new(1.0, 0.5).unwrap();
        let sim = SimConfig::new(50_000, 9).unwrap();
        let a = empirical_sop(&stats(), 0.4, &t, &sim).unwrap();
        let b = empirical_sop(&stats(), 0.4, &t, &sim).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parallel_matches_serial_count() {
        let t = TargetRates::new(0.7, 0.3).unwrap();
        let sim = SimConfig::new(40_000, 3).unwrap();
        let est = empirical_sop(&stats(), 0.35, &t, &sim).unwrap();
        let samples = crate::channel::sample_gains(&stats(), 40_000, 3).unwrap();
        let split = PowerSplit::new(0.35).unwrap();
        let (mut o1, mut o2) = (0, 0);
        for s in samples {
            let r = rates_from_sinrs(&sinr_proposed(s, split, 20.0));
            o1 += (r.rs1 < 0.7) as u64;
            o2 += (r.rs2 < 0.3) as u64;
        }
        assert_eq!((est.outages1, est.outages2, est.used), (o1, o2, 40_000));
    }

    #[test]
    fn near_boundary_split_is_almost_always_in_outage() {
        let t = TargetRates::new(1.0, 1.0).unwrap();
        let sim = SimConfig::new(20_000, 1).unwrap();
        let est = empirical_sop(&stats(), 1e-6, &t, &sim).unwrap();
        assert!(est.so1_hat >= 0.999);
    }

    #[test]
    fn conditioning_drops_reversed_realizations() {
        let t = TargetRates::new(0.5, 0.5).unwrap();
        let sim = SimConfig::new(30_000, 5).unwrap();
        let all = empirical_sop(&stats(), 0.5, &t, &sim).unwrap();
        let cond = empirical_sop(&stats(), 0.5, &t, &sim.conditioned(true)).unwrap();
        assert_eq!(all.used, 30_000);
        assert!(cond.used < all.used);
        // P(g1 > g2) = lambda1 / (lambda1 + lambda2)
        let expected = 1.0 / 1.4 * 30_000.0;
        assert!((cond.used as f64 - expected).abs() < 4.0 * (30_000.0f64 * 0.714 * 0.286).sqrt());
    }

    #[test]
    fn stderr_formula() {
        assert_eq!(binomial_stderr(0.0, 100), 0.0);
        assert!((binomial_stderr(0.5, 100) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let t = TargetRates::new(1.0, 1.0).unwrap();
        let zero = SimConfig {
            realizations: 0,
            ..SimConfig::default()
        };
        assert!(empirical_sop(&stats(), 0.5, &t, &zero).is_err());
        assert!(empirical_sop(&stats(), 1.0, &t, &SimConfig::default()).is_err());
        assert!(rmse_vs_analytical(&[], User::Near, &SimConfig::default()).is_err());
    }

    #[test]
    fn conventional_violations_never_happen() {
        let sim = SimConfig::new(100_000, 77).unwrap();
        for alpha in [0.1, 0.5, 0.9] {
            let v = empirical_conventional_violation_rate(&stats(), alpha, &sim).unwrap();
            assert_eq!(v.violations, 0);
            assert_eq!(v.rate, 0.0);
            assert!(v.eligible > 50_000);
        }
    }

    #[test]
    fn rmse_of_identical_points_is_the_deviation() {
        let t = TargetRates::new(1.0, 1.0).unwrap();
        let p = ValidationPoint {
            stats: stats(),
            alpha: 0.5,
            targets: t,
        };
        let sim = SimConfig::new(20_000, 11).unwrap();
        let r = rmse_vs_analytical(&[p, p, p], User::Near, &sim).unwrap();
        assert!((r.rmse - r.points[0].deviation).abs() < 1e-15);
    }
}
