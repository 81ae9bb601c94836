//! Power allocation: per-user optimal splits and the min-max fair split.
//!
//! Each user's outage probability is pseudoconvex in the power split, so a
//! golden-section search finds its unique minimizer. The min-max problem
//! `min_a max(so1, so2)` has only three KKT candidates: the near user's
//! minimizer (only U1's constraint active), the far user's minimizer (only
//! U2's), and the split where both outage probabilities are equal (both
//! active). The global optimum is whichever candidate has the smallest
//! worse-user outage.

use crate::channel::ChannelStats;
use crate::error::{Error, Result};
use crate::sop::{self, SopKind, SopPair, TargetRates};
use crate::{ALPHA_MAX, ALPHA_MIN};

/// Interval shrink factor of the golden-section search, `(sqrt 5 - 1) / 2`.
pub const GOLDEN_RATIO_CONJUGATE: f64 = 0.618_033_988_749_894_9;
pub const DEFAULT_GSS_TOLERANCE: f64 = 0.01;
pub const DEFAULT_ROOT_TOLERANCE: f64 = 1e-8;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GssConfig {
    pub lower: f64,
    pub upper: f64,
    pub tolerance: f64,
}

impl GssConfig {
    pub fn new(lower: f64, upper: f64, tolerance: f64) -> Result<Self> {
        if !(0.0 <= lower && lower < upper && upper <= 1.0) {
            return Err(Error::InvalidInterval { lower, upper });
        }
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tolerance",
                value: tolerance,
                reason: "must be finite and positive",
            });
        }
        Ok(GssConfig {
            lower,
            upper,
            tolerance,
        })
    }

    pub fn with_tolerance(tolerance: f64) -> Result<Self> {
        GssConfig::new(0.0, 1.0, tolerance)
    }

    /// Upper bound on the number of shrink steps needed to reach the
    /// tolerance.
    pub fn max_iterations(&self) -> usize {
        let steps = (self.tolerance / (self.upper - self.lower)).ln() / GOLDEN_RATIO_CONJUGATE.ln();
        steps.ceil().max(0.0) as usize + 1
    }

    // The outage expressions are only defined inside [ALPHA_MIN, ALPHA_MAX].
    fn admissible(&self) -> GssConfig {
        GssConfig {
            lower: self.lower.max(ALPHA_MIN),
            upper: self.upper.min(ALPHA_MAX),
            tolerance: self.tolerance,
        }
    }
}

impl Default for GssConfig {
    fn default() -> Self {
        GssConfig {
            lower: 0.0,
            upper: 1.0,
            tolerance: DEFAULT_GSS_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GssResult {
    pub argmin: f64,
    pub minimum: f64,
    pub iterations: usize,
    /// Final bracket, shorter than the tolerance.
    pub bracket: (f64, f64),
}

fn finite_at(value: f64, at: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteObjective { at })
    }
}

/// Golden-section search for the minimizer of a unimodal `objective` on
/// `[config.lower, config.upper]`.
///
/// Each step keeps one interior point and replaces the other, shrinking the
/// bracket by 0.618; the search stops once the bracket is shorter than the
/// tolerance and returns its midpoint. Ties keep the left part.
pub fn gss_minimize<F>(mut objective: F, config: &GssConfig) -> Result<GssResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    GssConfig::new(config.lower, config.upper, config.tolerance)?;
    let r = GOLDEN_RATIO_CONJUGATE;
    let (mut a, mut b) = (config.lower, config.upper);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = finite_at(objective(x1)?, x1)?;
    let mut f2 = finite_at(objective(x2)?, x2)?;
    let mut iterations = 0;
    while b - a >= config.tolerance {
        iterations += 1;
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = finite_at(objective(x1)?, x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = finite_at(objective(x2)?, x2)?;
        }
    }
    let argmin = 0.5 * (a + b);
    let minimum = finite_at(objective(argmin)?, argmin)?;
    Ok(GssResult {
        argmin,
        minimum,
        iterations,
        bracket: (a, b),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub alpha: f64,
    /// Function value at `alpha`.
    pub residual: f64,
    pub iterations: usize,
}

/// Bisection for a sign change of `g` on `[lower, upper]`. Returns `None`
/// when the endpoint values do not bracket a root.
pub fn bisect<F>(mut g: F, lower: f64, upper: f64, tolerance: f64) -> Result<Option<Root>>
where
    F: FnMut(f64) -> Result<f64>,
{
    if lower.partial_cmp(&upper) != Some(std::cmp::Ordering::Less) {
        return Err(Error::InvalidInterval { lower, upper });
    }
    let (mut lo, mut hi) = (lower, upper);
    let g_lo = finite_at(g(lo)?, lo)?;
    let g_hi = finite_at(g(hi)?, hi)?;
    for (x, v) in [(lo, g_lo), (hi, g_hi)] {
        if v.abs() <= tolerance {
            return Ok(Some(Root {
                alpha: x,
                residual: v,
                iterations: 0,
            }));
        }
    }
    if g_lo.signum() == g_hi.signum() {
        return Ok(None);
    }
    let lo_negative = g_lo < 0.0;
    let mut best = Root {
        alpha: lo,
        residual: g_lo,
        iterations: 0,
    };
    for iteration in 1..=MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let v = finite_at(g(mid)?, mid)?;
        if v.abs() < best.residual.abs() {
            best = Root {
                alpha: mid,
                residual: v,
                iterations: iteration,
            };
        }
        if v.abs() <= tolerance || mid <= lo || mid >= hi {
            return Ok(Some(Root {
                alpha: mid,
                residual: v,
                iterations: iteration,
            }));
        }
        if (v < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(best))
}

/// Numerically optimal split for the near user.
pub fn optimal_pa_near(
    stats: &ChannelStats,
    targets: &TargetRates,
    config: &GssConfig,
) -> Result<GssResult> {
    gss_minimize(
        |a| sop::exact_sop_near(stats, a, targets).map(|v| v.value),
        &config.admissible(),
    )
}

/// Numerically optimal split for the far user.
pub fn optimal_pa_far(
    stats: &ChannelStats,
    targets: &TargetRates,
    config: &GssConfig,
) -> Result<GssResult> {
    gss_minimize(
        |a| sop::exact_sop_far(stats, a, targets).map(|v| v.value),
        &config.admissible(),
    )
}

/// A candidate power split, or why it is not one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PaSolution {
    /// An admissible split strictly inside (0, 1).
    Interior(f64),
    /// A zero target rate pushes the optimum onto the boundary value held
    /// here, which violates `0 < alpha < 1`.
    Degenerate(f64),
    /// Outside the admissible range, or no equal-outage crossing exists.
    Infeasible(Option<f64>),
}

impl PaSolution {
    fn classify(alpha: f64) -> PaSolution {
        if (ALPHA_MIN..=ALPHA_MAX).contains(&alpha) {
            PaSolution::Interior(alpha)
        } else {
            PaSolution::Infeasible(Some(alpha))
        }
    }

    pub fn interior(&self) -> Option<f64> {
        match *self {
            PaSolution::Interior(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, PaSolution::Degenerate(_))
    }
}

/// High-SNR optimal split of the near user, `sqrt(Pi1 (Pi1 - 1)) - (Pi1 - 1)`.
/// Independent of the channel statistics; degenerate (0) for a zero target.
pub fn optimal_pa_near_asymptotic(targets: &TargetRates) -> PaSolution {
    let pi = targets.pi1();
    if pi <= 1.0 {
        return PaSolution::Degenerate(0.0);
    }
    PaSolution::classify(-(pi - 1.0) + (pi * (pi - 1.0)).sqrt())
}

/// High-SNR optimal split of the far user, `Pi2 - sqrt(Pi2 (Pi2 - 1))`.
/// Degenerate (1) for a zero target.
pub fn optimal_pa_far_asymptotic(targets: &TargetRates) -> PaSolution {
    let pi = targets.pi2();
    if pi <= 1.0 {
        return PaSolution::Degenerate(1.0);
    }
    PaSolution::classify(pi - (pi * (pi - 1.0)).sqrt())
}

/// Split at which both users see the same exact outage probability, found
/// by bisection on `so1 - so2` over the admissible range.
pub fn equal_sop_alpha(
    stats: &ChannelStats,
    targets: &TargetRates,
    tolerance: f64,
) -> Result<PaSolution> {
    let root = bisect(
        |a| {
            let p = sop::sop_pair_exact(stats, a, targets)?;
            Ok(p.so1 - p.so2)
        },
        ALPHA_MIN,
        ALPHA_MAX,
        tolerance,
    )?;
    Ok(match root {
        Some(r) => PaSolution::classify(r.alpha),
        None => PaSolution::Infeasible(None),
    })
}

/// Closed-form equal-outage split of the high-SNR approximations,
/// `(Pi2 lambda1 + lambda2 (1 - Pi1)) / (lambda1 + lambda2)`.
pub fn equal_sop_alpha_asymptotic(stats: &ChannelStats, targets: &TargetRates) -> PaSolution {
    let (l1, l2) = (stats.lambda1(), stats.lambda2());
    let alpha = (targets.pi2() * l1 + l2 * (1.0 - targets.pi1())) / (l1 + l2);
    PaSolution::classify(alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateRole {
    /// Minimizer of the near user's outage.
    NearOptimum,
    /// Minimizer of the far user's outage.
    FarOptimum,
    /// Equal outage for both users.
    EqualOutage,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub role: CandidateRole,
    pub solution: PaSolution,
    /// Outage pair at the split; present only for interior candidates.
    pub sop: Option<SopPair>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateSet {
    pub near: Candidate,
    pub far: Candidate,
    pub equal: Candidate,
}

impl CandidateSet {
    pub fn iter(&self) -> impl Iterator<Item = &Candidate> {
        [&self.near, &self.far, &self.equal].into_iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinMaxOutcome {
    pub candidates: CandidateSet,
    pub selected: f64,
    pub selected_role: CandidateRole,
    /// `max(so1, so2)` at the selected split.
    pub objective: f64,
    pub pair: SopPair,
    pub kind: SopKind,
}

fn candidate(
    role: CandidateRole,
    solution: PaSolution,
    evaluate: &(impl Fn(f64) -> Result<SopPair> + Sync),
) -> Result<Candidate> {
    let sop = solution.interior().map(evaluate).transpose()?;
    Ok(Candidate {
        role,
        solution,
        sop,
    })
}

fn select(candidates: CandidateSet, kind: SopKind) -> Result<MinMaxOutcome> {
    let mut best: Option<(&Candidate, SopPair)> = None;
    for c in candidates.iter() {
        let Some(pair) = c.sop else { continue };
        let better = match best {
            None => true,
            Some((_, b)) => {
                pair.max_sop() < b.max_sop()
                    || (pair.max_sop() == b.max_sop() && pair.alpha < b.alpha)
            }
        };
        if better {
            best = Some((c, pair));
        }
    }
    let (winner, pair) = best.ok_or(Error::NoFeasibleCandidate)?;
    Ok(MinMaxOutcome {
        candidates,
        selected: pair.alpha,
        selected_role: winner.role,
        objective: pair.max_sop(),
        pair,
        kind,
    })
}

/// Min-max fair power split over the exact outage probabilities.
///
/// The three candidate searches are independent and run in parallel.
/// Zero target rates mark the matching per-user candidate as degenerate and
/// drop it, as does a missing equal-outage crossing.
pub fn minmax_pa(
    stats: &ChannelStats,
    targets: &TargetRates,
    config: &GssConfig,
) -> Result<MinMaxOutcome> {
    let per_user = |near: bool| -> Result<PaSolution> {
        let (pi, boundary) = if near {
            (targets.pi1(), 0.0)
        } else {
            (targets.pi2(), 1.0)
        };
        if pi <= 1.0 {
            return Ok(PaSolution::Degenerate(boundary));
        }
        let found = if near {
            optimal_pa_near(stats, targets, config)?
        } else {
            optimal_pa_far(stats, targets, config)?
        };
        Ok(PaSolution::classify(found.argmin))
    };
    let ((near, far), equal) = rayon::join(
        || rayon::join(|| per_user(true), || per_user(false)),
        || equal_sop_alpha(stats, targets, DEFAULT_ROOT_TOLERANCE),
    );
    let evaluate = |a: f64| sop::sop_pair_exact(stats, a, targets);
    let candidates = CandidateSet {
        near: candidate(CandidateRole::NearOptimum, near?, &evaluate)?,
        far: candidate(CandidateRole::FarOptimum, far?, &evaluate)?,
        equal: candidate(CandidateRole::EqualOutage, equal?, &evaluate)?,
    };
    select(candidates, SopKind::Exact)
}

/// Min-max fair power split over the high-SNR approximations, using the
/// closed-form candidates.
pub fn minmax_pa_asymptotic(stats: &ChannelStats, targets: &TargetRates) -> Result<MinMaxOutcome> {
    let evaluate = |a: f64| sop::sop_pair_asymptotic(stats, a, targets);
    let candidates = CandidateSet {
        near: candidate(
            CandidateRole::NearOptimum,
            optimal_pa_near_asymptotic(targets),
            &evaluate,
        )?,
        far: candidate(
            CandidateRole::FarOptimum,
            optimal_pa_far_asymptotic(targets),
            &evaluate,
        )?,
        equal: candidate(
            CandidateRole::EqualOutage,
            equal_sop_alpha_asymptotic(stats, targets),
            &evaluate,
        )?,
    };
    select(candidates, SopKind::Asymptotic)
}
