//! The experiment subcommands. Each one turns a [`RunConfig`] into a
//! [`Report`] whose checks decide the process exit code.

use rayon::prelude::*;
use secnoma::optimizer::{
    optimal_pa_far, optimal_pa_far_asymptotic, optimal_pa_near, optimal_pa_near_asymptotic,
    CandidateRole,
};
use secnoma::sop::{asymptotic_sop, exact_sop, sop_pair_exact};
use secnoma::{
    derive_stats, empirical_sop, minmax_pa, minmax_pa_asymptotic, ChannelStats, GssConfig,
    PaSolution, TargetRates, User,
};

use crate::config::{Axis, RunConfig, SweepSection};
use crate::error::CliError;
use crate::output::{Cell, Report};

/// Reference values of the average improvement of the min-max split over
/// the fixed split, the near-user optimum and the far-user optimum.
pub const PUBLISHED_GAINS_PCT: [f64; 3] = [55.12, 69.30, 19.11];

/// Slack on the comparison against a dense grid of splits.
pub const GRID_DOMINANCE_SLACK: f64 = 1e-3;

/// Points on the dense grid used by the dominance check.
pub const DOMINANCE_GRID_POINTS: usize = 1000;

const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    DistanceSweep,
    Optimize,
    Minmax,
    GainComparison,
}

impl Command {
    pub fn run(self, config: &RunConfig) -> Result<Report, CliError> {
        let report = match self {
            Command::Validate => cmd_validate(config)?,
            Command::DistanceSweep => cmd_distance_sweep(config)?,
            Command::Optimize => cmd_optimize(config)?,
            Command::Minmax => cmd_minmax(config)?,
            Command::GainComparison => cmd_gain_comparison(config)?,
        };
        report.ensure_finite()?;
        Ok(report)
    }
}

fn gss_config(config: &RunConfig) -> Result<GssConfig, CliError> {
    Ok(GssConfig::with_tolerance(config.power.gss_tolerance)?)
}

fn solution_cell(solution: PaSolution) -> Cell {
    match solution {
        PaSolution::Interior(a) => Cell::Num(a),
        PaSolution::Degenerate(_) => Cell::text("degenerate"),
        PaSolution::Infeasible(_) => Cell::text("infeasible"),
    }
}

fn role_name(role: CandidateRole) -> &'static str {
    match role {
        CandidateRole::NearOptimum => "near_optimum",
        CandidateRole::FarOptimum => "far_optimum",
        CandidateRole::EqualOutage => "equal_outage",
    }
}

fn sweep_points(config: &RunConfig, default: SweepSection) -> Result<Vec<f64>, CliError> {
    Ok(config.sweep_or(default)?.points())
}

fn require(ok: bool, key: &str, reason: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!("{key}: {reason}")))
    }
}

/// Indices where `values[i + 1]` breaks the required direction.
fn monotone_breaks(values: &[f64], increasing: bool, slack: f64) -> Vec<usize> {
    values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| {
            if increasing {
                w[1] < w[0] - slack
            } else {
                w[1] > w[0] + slack
            }
        })
        .map(|(i, _)| i)
        .collect()
}

fn monotone_detail(axis: &str, points: &[f64], breaks: &[usize]) -> String {
    match breaks.first() {
        None => format!("{} points", points.len()),
        Some(&i) => format!(
            "breaks between {axis} = {} and {}",
            points[i],
            points[i + 1]
        ),
    }
}

/// Analytical-vs-simulation check of the near user's outage probability
/// over the target rate, one curve per received SNR.
pub fn cmd_validate(config: &RunConfig) -> Result<Report, CliError> {
    let rths = sweep_points(config, SweepSection::new(Axis::Rth1, 0.5, 3.0, 0.5))?;
    require(
        rths.iter().all(|r| *r >= 0.0),
        "sweep",
        "target rates must be non-negative",
    )?;
    let base = config.system_params()?;
    let sim = config.sim()?;
    let alpha = config.power.alpha;
    let scale = config.fault.analytical_lambda1_scale;
    let mut report = Report::new(
        "validate",
        vec![
            "rho_r_db",
            "rth1_bps_hz",
            "so1_analytical",
            "so1_empirical",
            "abs_deviation",
            "bound_3sigma",
            "within_bound",
            "curve_rmse",
        ],
    );
    report.summarize("alpha", alpha);
    report.summarize("realizations", sim.realizations as f64);
    report.summarize("seed", sim.seed as f64);
    report.summarize("conditioned", sim.condition_on_ordering);
    if scale != 1.0 {
        report.summarize("fault_analytical_lambda1_scale", scale);
    }
    let mut worst_rmse: f64 = 0.0;
    let mut outside = 0usize;
    for &rho_r in &config.validate.rho_r_db {
        let stats = derive_stats(&base.with_received_snr_db(rho_r)?)?;
        let analytical_stats =
            ChannelStats::new(stats.lambda1() * scale, stats.lambda2(), stats.rho_t())?;
        let points = rths
            .par_iter()
            .map(|&rth| {
                let targets = TargetRates::new(rth, config.targets.rth2)?;
                let p = exact_sop(User::Near, &analytical_stats, alpha, &targets)?.value;
                let est = empirical_sop(&stats, alpha, &targets, &sim)?;
                let bound = 3.0 * secnoma::montecarlo::binomial_stderr(p, est.used)
                    + secnoma::montecarlo::BOUND_SLACK;
                Ok((rth, p, est.so1_hat, (est.so1_hat - p).abs(), bound))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let rmse = (points.iter().map(|p| p.3 * p.3).sum::<f64>() / points.len() as f64).sqrt();
        worst_rmse = worst_rmse.max(rmse);
        for (rth, p, hat, dev, bound) in points {
            outside += usize::from(dev > bound);
            report.rows.push(vec![
                rho_r.into(),
                rth.into(),
                p.into(),
                hat.into(),
                dev.into(),
                bound.into(),
                (dev <= bound).into(),
                rmse.into(),
            ]);
        }
    }
    report.summarize("max_curve_rmse", worst_rmse);
    report.check(
        "within_3sigma",
        outside == 0,
        format!(
            "{outside} of {} points outside the bound",
            report.rows.len()
        ),
    );
    report.check(
        "rmse",
        worst_rmse <= config.validate.rmse_limit,
        format!(
            "max curve rmse {worst_rmse:.3e}, limit {:.1e}",
            config.validate.rmse_limit
        ),
    );
    Ok(report)
}

fn both_users(
    stats: &ChannelStats,
    alpha: f64,
    targets: &TargetRates,
    sim: &secnoma::SimConfig,
) -> Result<[f64; 6], CliError> {
    let est = empirical_sop(stats, alpha, targets, sim)?;
    Ok([
        exact_sop(User::Near, stats, alpha, targets)?.value,
        asymptotic_sop(User::Near, stats, alpha, targets)?,
        est.so1_hat,
        exact_sop(User::Far, stats, alpha, targets)?.value,
        asymptotic_sop(User::Far, stats, alpha, targets)?,
        est.so2_hat,
    ])
}

const USER_COLUMNS: [&str; 6] = [
    "so1_exact",
    "so1_asymptotic",
    "so1_empirical",
    "so2_exact",
    "so2_asymptotic",
    "so2_empirical",
];

/// Outage probabilities against the far user's distance, with the
/// transmit power held at the value set by `system.rho_r_db`.
pub fn cmd_distance_sweep(config: &RunConfig) -> Result<Report, CliError> {
    let distances = sweep_points(
        config,
        SweepSection::new(Axis::FarDistance, 60.0, 200.0, 10.0),
    )?;
    let d1 = config.system.near_distance_m;
    require(
        distances.iter().all(|d| *d > d1),
        "sweep",
        &format!("far distances must exceed the near distance {d1} m"),
    )?;
    let base = config.system_params()?;
    let targets = config.targets()?;
    let sim = config.sim()?;
    let alpha = config.power.alpha;
    let rows = distances
        .par_iter()
        .map(|&d2| {
            let stats = derive_stats(&base.with_far_distance(d2)?)?;
            Ok((
                d2,
                secnoma::received_snr_far_db(&stats),
                both_users(&stats, alpha, &targets, &sim)?,
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut columns = vec!["d2_m", "rho_r_db"];
    columns.extend(USER_COLUMNS);
    let mut report = Report::new("distance-sweep", columns);
    report.summarize("alpha", alpha);
    report.summarize(
        "transmit_power_dbm",
        secnoma::channel::watts_to_dbm(base.transmit_power),
    );
    let so1: Vec<f64> = rows.iter().map(|r| r.2[0]).collect();
    let so2: Vec<f64> = rows.iter().map(|r| r.2[3]).collect();
    for (d2, rho_r, values) in rows {
        let mut row: Vec<Cell> = vec![d2.into(), rho_r.into()];
        row.extend(values.map(Cell::from));
        report.rows.push(row);
    }
    let b1 = monotone_breaks(&so1, false, MONOTONE_SLACK);
    let b2 = monotone_breaks(&so2, true, MONOTONE_SLACK);
    report.check(
        "so1_nonincreasing_in_d2",
        b1.is_empty(),
        monotone_detail("d2_m", &distances, &b1),
    );
    report.check(
        "so2_nondecreasing_in_d2",
        b2.is_empty(),
        monotone_detail("d2_m", &distances, &b2),
    );
    Ok(report)
}

/// Outage curves over the power split together with the numerical and
/// closed-form optima of both users.
pub fn cmd_optimize(config: &RunConfig) -> Result<Report, CliError> {
    let alphas = sweep_points(config, SweepSection::new(Axis::Alpha, 0.01, 0.99, 0.01))?;
    require(
        alphas
            .iter()
            .all(|a| (secnoma::ALPHA_MIN..=secnoma::ALPHA_MAX).contains(a)),
        "sweep",
        "power splits must lie strictly between 0 and 1",
    )?;
    let stats = config.stats()?;
    let targets = config.targets()?;
    let sim = config.sim()?;
    let gss = gss_config(config)?;
    let rows = alphas
        .par_iter()
        .map(|&a| both_users(&stats, a, &targets, &sim))
        .collect::<Result<Vec<_>, CliError>>()?;

    let (near, far) = rayon::join(
        || -> Result<PaSolution, CliError> {
            if targets.pi1() <= 1.0 {
                return Ok(PaSolution::Degenerate(0.0));
            }
            Ok(PaSolution::Interior(
                optimal_pa_near(&stats, &targets, &gss)?.argmin,
            ))
        },
        || -> Result<PaSolution, CliError> {
            if targets.pi2() <= 1.0 {
                return Ok(PaSolution::Degenerate(1.0));
            }
            Ok(PaSolution::Interior(
                optimal_pa_far(&stats, &targets, &gss)?.argmin,
            ))
        },
    );
    let (near, far) = (near?, far?);

    let mut columns = vec!["alpha"];
    columns.extend(USER_COLUMNS);
    let mut report = Report::new("optimize", columns);
    report.summarize("rho_r_db", config.system.rho_r_db);
    report.summarize("alpha1_star", solution_cell(near));
    report.summarize("alpha2_star", solution_cell(far));
    report.summarize(
        "alpha1_hat",
        solution_cell(optimal_pa_near_asymptotic(&targets)),
    );
    report.summarize(
        "alpha2_hat",
        solution_cell(optimal_pa_far_asymptotic(&targets)),
    );

    let step = alphas.get(1).map_or(0.0, |a| a - alphas[0]);
    let allowed = config.power.gss_tolerance + 0.5 * step;
    for (user, column, solution) in [(User::Near, 0, near), (User::Far, 3, far)] {
        let label = if user == User::Near { "so1" } else { "so2" };
        let curve: Vec<f64> = rows.iter().map(|r| r[column]).collect();
        let (i_min, _) = curve
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (i, &v)| if v < best.1 { (i, v) } else { best },
            );
        report.summarize(format!("{label}_curve_argmin"), alphas[i_min]);
        if let Some(opt) = solution.interior() {
            let value = exact_sop(user, &stats, opt, &targets)?.value;
            report.summarize(format!("{label}_at_optimum"), value);
            let gap = (alphas[i_min] - opt).abs();
            report.check(
                format!("{label}_curve_minimum_near_optimum"),
                gap <= allowed,
                format!(
                    "curve argmin {} vs optimum {opt:.6}, allowed {allowed}",
                    alphas[i_min]
                ),
            );
        }
    }
    for (a, values) in alphas.iter().zip(rows) {
        let mut row: Vec<Cell> = vec![(*a).into()];
        row.extend(values.map(Cell::from));
        report.rows.push(row);
    }
    Ok(report)
}

fn grid_min_max_sop(stats: &ChannelStats, targets: &TargetRates) -> Result<f64, CliError> {
    let n = DOMINANCE_GRID_POINTS;
    (1..=n)
        .into_par_iter()
        .map(|i| Ok(sop_pair_exact(stats, i as f64 / (n + 1) as f64, targets)?.max_sop()))
        .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))
}

/// Min-max fair split against the near user's target rate.
pub fn cmd_minmax(config: &RunConfig) -> Result<Report, CliError> {
    let rths = sweep_points(config, SweepSection::new(Axis::Rth1, 0.5, 3.0, 0.5))?;
    require(
        rths.iter().all(|r| *r >= 0.0),
        "sweep",
        "target rates must be non-negative",
    )?;
    let stats = config.stats()?;
    let gss = gss_config(config)?;
    let rth2 = config.targets.rth2;
    let rows = rths
        .par_iter()
        .map(|&rth1| {
            let targets = TargetRates::new(rth1, rth2)?;
            let exact = minmax_pa(&stats, &targets, &gss)?;
            let asym = minmax_pa_asymptotic(&stats, &targets).ok();
            let grid = grid_min_max_sop(&stats, &targets)?;
            Ok((rth1, exact, asym, grid))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut report = Report::new(
        "minmax",
        vec![
            "rth1_bps_hz",
            "rth2_bps_hz",
            "alpha1_star",
            "alpha2_star",
            "alpha3_star",
            "alpha_sop",
            "selected_candidate",
            "max_sop",
            "so1",
            "so2",
            "alpha_sop_asymptotic",
            "max_sop_asymptotic",
            "grid_min_max_sop",
            "dominates_grid",
        ],
    );
    report.summarize("rho_r_db", config.system.rho_r_db);
    report.summarize("gss_tolerance", config.power.gss_tolerance);
    let mut misses = Vec::new();
    for (rth1, out, asym, grid) in &rows {
        let dominates = out.objective <= grid + GRID_DOMINANCE_SLACK;
        if !dominates {
            misses.push(*rth1);
        }
        let c = &out.candidates;
        report.rows.push(vec![
            (*rth1).into(),
            rth2.into(),
            solution_cell(c.near.solution),
            solution_cell(c.far.solution),
            solution_cell(c.equal.solution),
            out.selected.into(),
            Cell::text(role_name(out.selected_role)),
            out.objective.into(),
            out.pair.so1.into(),
            out.pair.so2.into(),
            asym.map_or(Cell::text("infeasible"), |a| a.selected.into()),
            asym.map_or(Cell::text("infeasible"), |a| a.objective.into()),
            (*grid).into(),
            dominates.into(),
        ]);
    }
    report.check(
        "grid_dominance",
        misses.is_empty(),
        format!(
            "{} of {} rows exceed the grid minimum by more than {GRID_DOMINANCE_SLACK}",
            misses.len(),
            rows.len()
        ),
    );
    let selected: Vec<f64> = rows.iter().map(|r| r.1.selected).collect();
    let objective: Vec<f64> = rows.iter().map(|r| r.1.objective).collect();
    let b1 = monotone_breaks(&selected, false, config.power.gss_tolerance);
    let b2 = monotone_breaks(&objective, true, MONOTONE_SLACK);
    report.check(
        "alpha_sop_nonincreasing_in_rth1",
        b1.is_empty(),
        monotone_detail("rth1", &rths, &b1),
    );
    report.check(
        "max_sop_nondecreasing_in_rth1",
        b2.is_empty(),
        monotone_detail("rth1", &rths, &b2),
    );
    Ok(report)
}

fn gain_pct(baseline: f64, optimum: f64) -> f64 {
    (baseline - optimum) / baseline * 100.0
}

/// Worst-user outage under the min-max split against a fixed split and
/// each user's own optimum, over the received SNR.
pub fn cmd_gain_comparison(config: &RunConfig) -> Result<Report, CliError> {
    let snrs = sweep_points(config, SweepSection::new(Axis::RhoR, 10.0, 40.0, 5.0))?;
    let base = config.system_params()?;
    let targets = config.targets()?;
    let gss = gss_config(config)?;
    let fixed = config.power.fixed_alpha;
    let rows = snrs
        .par_iter()
        .map(|&rho_r| {
            let stats = derive_stats(&base.with_received_snr_db(rho_r)?)?;
            let out = minmax_pa(&stats, &targets, &gss)?;
            let fixed_sop = sop_pair_exact(&stats, fixed, &targets)?.max_sop();
            Ok((rho_r, out, fixed_sop))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut report = Report::new(
        "gain-comparison",
        vec![
            "rho_r_db",
            "alpha_sop",
            "max_sop_opt",
            "max_sop_fixed",
            "alpha1_star",
            "max_sop_alpha1",
            "alpha2_star",
            "max_sop_alpha2",
            "gain_vs_fixed_pct",
            "gain_vs_alpha1_pct",
            "gain_vs_alpha2_pct",
        ],
    );
    let mut gains: [Vec<f64>; 3] = Default::default();
    let mut violations = Vec::new();
    for (rho_r, out, fixed_sop) in &rows {
        let baselines = [
            Some(*fixed_sop),
            out.candidates.near.sop.map(|p| p.max_sop()),
            out.candidates.far.sop.map(|p| p.max_sop()),
        ];
        let mut row: Vec<Cell> = vec![
            (*rho_r).into(),
            out.selected.into(),
            out.objective.into(),
            (*fixed_sop).into(),
            solution_cell(out.candidates.near.solution),
            baselines[1].map_or(Cell::text("n/a"), Cell::from),
            solution_cell(out.candidates.far.solution),
            baselines[2].map_or(Cell::text("n/a"), Cell::from),
        ];
        for (k, baseline) in baselines.iter().enumerate() {
            match baseline {
                Some(b) => {
                    if out.objective > *b {
                        violations.push(format!("rho_r_db {rho_r} baseline {k}"));
                    }
                    let g = gain_pct(*b, out.objective);
                    gains[k].push(g);
                    row.push(g.into());
                }
                None => row.push(Cell::text("n/a")),
            }
        }
        report.rows.push(row);
    }
    report.summarize("rth1_bps_hz", config.targets.rth1);
    report.summarize("rth2_bps_hz", config.targets.rth2);
    report.summarize("fixed_alpha", fixed);
    let names = ["fixed", "alpha1", "alpha2"];
    for ((name, g), published) in names.iter().zip(&gains).zip(PUBLISHED_GAINS_PCT) {
        let avg = if g.is_empty() {
            Cell::text("n/a")
        } else {
            Cell::Num(g.iter().sum::<f64>() / g.len() as f64)
        };
        report.summarize(format!("avg_gain_vs_{name}_pct"), avg);
        report.summarize(format!("published_gain_vs_{name}_pct"), published);
    }
    report.summarize(
        "published_gain_note",
        Cell::text(
            "averaging protocol unspecified; averages here are uniform over the swept rho_r grid",
        ),
    );
    report.check(
        "dominates_baselines",
        violations.is_empty(),
        if violations.is_empty() {
            format!("{} points, 3 baselines", rows.len())
        } else {
            violations.join("; ")
        },
    );
    Ok(report)
}
