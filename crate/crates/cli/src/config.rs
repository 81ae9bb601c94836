//! Run configuration read from a TOML file.
//!
//! Every key has a default matching the reference setup, so an empty file
//! (or no file at all) is a complete configuration. Keys may be written in
//! `[section]` tables or as dotted keys such as `system.rho_r_db = 20`.

use std::path::Path;

use secnoma::{derive_stats, ChannelStats, SimConfig, SystemParams, TargetRates};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSection,
    pub targets: TargetSection,
    pub power: PowerSection,
    pub sweep: Option<SweepSection>,
    pub validate: ValidateSection,
    pub sim: SimSection,
    pub output: OutputSection,
    pub fault: FaultSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub near_distance_m: f64,
    pub far_distance_m: f64,
    pub path_loss_exponent: f64,
    pub path_loss_constant: f64,
    pub noise_dbm: f64,
    /// Mean received SNR of the far user; fixes the transmit power.
    pub rho_r_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TargetSection {
    pub rth1: f64,
    pub rth2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerSection {
    /// Split used by `validate` and `distance-sweep`.
    pub alpha: f64,
    /// Baseline split of `gain-comparison`.
    pub fixed_alpha: f64,
    pub gss_tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "alpha")]
    Alpha,
    #[serde(rename = "rho_r_db")]
    RhoR,
    #[serde(rename = "d2_m")]
    FarDistance,
    #[serde(rename = "rth1")]
    Rth1,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Alpha => "alpha",
            Axis::RhoR => "rho_r_db",
            Axis::FarDistance => "d2_m",
            Axis::Rth1 => "rth1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepSection {
    pub fn new(axis: Axis, start: f64, stop: f64, step: f64) -> Self {
        SweepSection {
            axis,
            start,
            stop,
            step,
        }
    }

    /// Points `start, start + step, ...` up to and including `stop`,
    /// rounded to 12 decimals so that axis values print cleanly.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| ((self.start + i as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateSection {
    /// One validation curve per received SNR.
    pub rho_r_db: Vec<f64>,
    pub rmse_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub realizations: u64,
    pub seed: u64,
    pub conditioned: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<String>,
    pub format: Format,
}

/// Deliberate corruption of the analytical path, used to check that the
/// validation gate catches a wrong model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FaultSection {
    pub analytical_lambda1_scale: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        SystemSection {
            near_distance_m: 50.0,
            far_distance_m: 100.0,
            path_loss_exponent: 2.5,
            path_loss_constant: 1.0,
            noise_dbm: -60.0,
            rho_r_db: 30.0,
        }
    }
}

impl Default for TargetSection {
    fn default() -> Self {
        TargetSection {
            rth1: 1.0,
            rth2: 1.0,
        }
    }
}

impl Default for PowerSection {
    fn default() -> Self {
        PowerSection {
            alpha: 0.5,
            fixed_alpha: 0.33,
            gss_tolerance: 0.01,
        }
    }
}

impl Default for ValidateSection {
    fn default() -> Self {
        ValidateSection {
            rho_r_db: vec![20.0, 30.0, 40.0],
            rmse_limit: 5e-3,
        }
    }
}

impl Default for SimSection {
    fn default() -> Self {
        let sim = SimConfig::default();
        SimSection {
            realizations: sim.realizations,
            seed: sim.seed,
            conditioned: sim.condition_on_ordering,
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            path: None,
            format: Format::Csv,
        }
    }
}

impl Default for FaultSection {
    fn default() -> Self {
        FaultSection {
            analytical_lambda1_scale: 1.0,
        }
    }
}

impl RunConfig {
    pub fn from_toml(source: &str) -> Result<Self, CliError> {
        let config: RunConfig =
            toml::from_str(source).map_err(|e| CliError::Config(e.to_string()))?;
        config.check(source)?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let source = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&source).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn check(&self, source: &str) -> Result<(), CliError> {
        let fail = |key: &str, reason: &str| Err(CliError::config_at(source, key, reason));
        let s = &self.system;
        let params = SystemParams::new(
            s.near_distance_m,
            s.far_distance_m,
            s.path_loss_exponent,
            s.path_loss_constant,
            s.noise_dbm,
            0.0,
        );
        if let Err(e) = params.and_then(|p| p.with_received_snr_db(s.rho_r_db)) {
            return fail("system", &e.to_string());
        }
        if let Err(e) = TargetRates::new(self.targets.rth1, self.targets.rth2) {
            return fail("targets", &e.to_string());
        }
        for (key, value) in [
            ("power.alpha", self.power.alpha),
            ("power.fixed_alpha", self.power.fixed_alpha),
        ] {
            if !(secnoma::ALPHA_MIN..=secnoma::ALPHA_MAX).contains(&value) {
                return fail(key, "must lie strictly between 0 and 1");
            }
        }
        if !(self.power.gss_tolerance > 0.0 && self.power.gss_tolerance < 1.0) {
            return fail("power.gss_tolerance", "must lie in (0, 1)");
        }
        if let Some(sweep) = &self.sweep {
            if !(sweep.step > 0.0 && sweep.step.is_finite()) {
                return fail("sweep.step", "must be positive");
            }
            if !(sweep.start.is_finite() && sweep.stop.is_finite()) || sweep.stop < sweep.start {
                return fail("sweep.stop", "empty sweep range");
            }
        }
        if self.validate.rho_r_db.is_empty() {
            return fail("validate.rho_r_db", "needs at least one value");
        }
        if self.validate.rho_r_db.iter().any(|v| !v.is_finite()) {
            return fail("validate.rho_r_db", "values must be finite");
        }
        if self.sim.realizations == 0 {
            return fail("sim.realizations", "must be at least 1");
        }
        let scale = self.fault.analytical_lambda1_scale;
        if !(scale > 0.0 && scale.is_finite()) {
            return fail("fault.analytical_lambda1_scale", "must be positive");
        }
        Ok(())
    }

    /// System parameters with the transmit power set by `system.rho_r_db`.
    pub fn system_params(&self) -> Result<SystemParams, CliError> {
        let s = &self.system;
        Ok(SystemParams::new(
            s.near_distance_m,
            s.far_distance_m,
            s.path_loss_exponent,
            s.path_loss_constant,
            s.noise_dbm,
            0.0,
        )?
        .with_received_snr_db(s.rho_r_db)?)
    }

    pub fn stats(&self) -> Result<ChannelStats, CliError> {
        Ok(derive_stats(&self.system_params()?)?)
    }

    pub fn targets(&self) -> Result<TargetRates, CliError> {
        Ok(TargetRates::new(self.targets.rth1, self.targets.rth2)?)
    }

    pub fn sim(&self) -> Result<SimConfig, CliError> {
        Ok(SimConfig::new(self.sim.realizations, self.sim.seed)?.conditioned(self.sim.conditioned))
    }

    /// The configured sweep, or `default` when none is given. A sweep over
    /// a different axis than the command expects is rejected.
    pub fn sweep_or(&self, default: SweepSection) -> Result<SweepSection, CliError> {
        match self.sweep {
            None => Ok(default),
            Some(s) if s.axis == default.axis => Ok(s),
            Some(s) => Err(CliError::Config(format!(
                "sweep.axis: this command sweeps {}, not {}",
                default.axis.name(),
                s.axis.name()
            ))),
        }
    }
}

/// One-based line of `key` (a dotted path or a section name) in `source`,
/// whether it is written as a dotted key or inside a `[section]` table.
pub fn line_of(source: &str, key: &str) -> Option<usize> {
    let (section, leaf) = key.rsplit_once('.').unwrap_or(("", key));
    let mut current = String::new();
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if let Some(header) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = header.trim().to_string();
            if section.is_empty() && current == leaf {
                return Some(i + 1);
            }
            continue;
        }
        let Some((lhs, _)) = line.split_once('=') else {
            continue;
        };
        let full = if current.is_empty() {
            lhs.trim().to_string()
        } else {
            format!("{current}.{}", lhs.trim())
        };
        let matches = if section.is_empty() {
            full == leaf || full.starts_with(&format!("{leaf}."))
        } else {
            full == key
        };
        if matches {
            return Some(i + 1);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_source_gives_reference_defaults() {
        let c = RunConfig::from_toml("").unwrap();
        assert_eq!(c, RunConfig::default());
        let stats = c.stats().unwrap();
        assert!((secnoma::received_snr_far_db(&stats) - 30.0).abs() < 1e-9);
        assert_eq!(c.sim.realizations, 1_000_000);
    }

    #[test]
    fn shipped_reference_file_matches_defaults() {
        let src = include_str!("../../../configs/reference.toml");
        assert_eq!(RunConfig::from_toml(src).unwrap(), RunConfig::default());
    }

    #[test]
    fn dotted_and_table_keys_agree() {
        let a = RunConfig::from_toml("system.rho_r_db = 20\ntargets.rth1 = 2\n").unwrap();
        let b = RunConfig::from_toml("[system]\nrho_r_db = 20\n[targets]\nrth1 = 2\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.system.rho_r_db, 20.0);
    }

    #[test]
    fn syntax_errors_report_the_line() {
        let err = RunConfig::from_toml("[system]\nrho_r_db = 20\nnoise_dbm = = 3\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_toml("[system]\nrho_r = 20\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn empty_sweep_reports_the_line() {
        let src = "[sweep]\naxis = \"rth1\"\nstart = 3.0\nstop = 1.0\nstep = 0.5\n";
        let err = RunConfig::from_toml(src).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert!(err.to_string().contains("empty sweep range"), "{err}");
        assert!(err.to_string().contains("line 4"), "{err}");
    }

    #[test]
    fn nonpositive_step_rejected() {
        let src = "sweep = { axis = \"alpha\", start = 0.1, stop = 0.9, step = 0.0 }\n";
        assert!(RunConfig::from_toml(src).is_err());
    }

    #[test]
    fn distance_ordering_rejected() {
        let err = RunConfig::from_toml("system.far_distance_m = 40\n").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn sweep_points_include_stop() {
        let s = SweepSection::new(Axis::Rth1, 0.5, 3.0, 0.5);
        assert_eq!(s.points(), vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0]);
        let single = SweepSection::new(Axis::Alpha, 0.3, 0.3, 0.1);
        assert_eq!(single.points(), vec![0.3]);
        let fine = SweepSection::new(Axis::Alpha, 0.01, 0.99, 0.01).points();
        assert_eq!(fine.len(), 99);
        assert_eq!(fine[41], 0.42);
    }

    #[test]
    fn mismatched_axis_rejected() {
        let c = RunConfig::from_toml(
            "sweep = { axis = \"alpha\", start = 0.1, stop = 0.9, step = 0.1 }",
        )
        .unwrap();
        assert!(c
            .sweep_or(SweepSection::new(Axis::Rth1, 0.5, 3.0, 0.5))
            .is_err());
        assert!(c
            .sweep_or(SweepSection::new(Axis::Alpha, 0.01, 0.99, 0.01))
            .is_ok());
    }

    #[test]
    fn line_lookup_handles_both_styles() {
        let src = "# header\n[sweep]\nstart = 1\n\nsystem.noise_dbm = 3\n";
        assert_eq!(line_of(src, "sweep.start"), Some(3));
        assert_eq!(line_of(src, "sweep"), Some(2));
        let dotted = "system.noise_dbm = 3\n";
        assert_eq!(line_of(dotted, "system"), Some(1));
        assert_eq!(line_of(dotted, "system.noise_dbm"), Some(1));
        assert_eq!(line_of(src, "targets.rth1"), None);
    }
}
