//! Scenario configuration files.
//!
//! A config file is a JSON document holding either one scenario or a batch
//! `{"name": ..., "scenarios": [...]}`. Frequencies are ratios to the field
//! frequency and times are dimensionless `omega t`.

use std::f64::consts::PI;

use rabi_core::integrator::IntegratorConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Largest `beta^2` run without `--paper-scale` in presets.
pub const DESK_SCALE_BETA_SQ: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Semiclassical,
    Quantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Rwa,
    Intermediate,
    Semianalytic,
    Multiphoton,
}

impl Method {
    pub fn column(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Rwa => "rwa",
            Method::Intermediate => "intermediate",
            Method::Semianalytic => "semianalytic",
            Method::Multiphoton => "multiphoton",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observable {
    #[serde(rename = "P_e")]
    ExcitedProbability,
    #[serde(rename = "n_mean")]
    MeanPhotonNumber,
    #[serde(rename = "P_beta")]
    CoherentSurvival,
    #[serde(rename = "delta_p")]
    DistributionShift,
}

impl Observable {
    pub fn file_stem(self) -> &'static str {
        match self {
            Observable::ExcitedProbability => "P_e",
            Observable::MeanPhotonNumber => "n_mean",
            Observable::CoherentSurvival => "P_beta",
            Observable::DistributionShift => "delta_p",
        }
    }
}

/// Coupling function for the semianalytic method. `Auto` uses the truncated
/// one-photon form at zero detuning and the full form otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemianalyticMode {
    #[default]
    Auto,
    Full,
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialAtom {
    #[default]
    Ground,
    Excited,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self {
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    pub name: String,
    pub model: Model,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// `Omega / omega`.
    pub atomic_ratio: f64,
    /// Semiclassical `G / omega`; alternatively give `t_pi`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_ratio: Option<f64>,
    /// `omega T_pi`, fixing `G / omega = pi / (omega T_pi)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_pi: Option<f64>,
    /// Mean photon number of the initial coherent field (quantum model).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_sq: Option<f64>,
    /// Resonance index `K` for the multiphoton method.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonance_k: Option<u32>,
    pub time_grid: TimeGrid,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Observable>,
    /// Times at which `delta_p` snapshots are taken.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshot_times: Vec<f64>,
    #[serde(default)]
    pub semianalytic_mode: SemianalyticMode,
    #[serde(default)]
    pub initial: InitialAtom,
    /// Adds the semiclassical exact `P_e` (with `G = 2 g beta`) next to a quantum run.
    #[serde(default)]
    pub compare_semiclassical: bool,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_cutoff: Option<f64>,
    /// `omega t` window drawn as an extra zoomed panel by `plot`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zoom: Option<[f64; 2]>,
}

fn default_methods() -> Vec<Method> {
    vec![Method::Exact]
}

fn default_outputs() -> Vec<Observable> {
    vec![Observable::ExcitedProbability]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableConfig {
    pub name: String,
    pub coupling_ratio: f64,
    pub k_max: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioConfig {
    Dynamics(DynamicsConfig),
    Table(TableConfig),
}

impl ScenarioConfig {
    pub fn name(&self) -> &str {
        match self {
            ScenarioConfig::Dynamics(d) => &d.name,
            ScenarioConfig::Table(t) => &t.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Batch {
    pub name: String,
    pub scenarios: Vec<ScenarioConfig>,
}

impl Batch {
    pub fn parse(text: &str) -> CliResult<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("malformed JSON: {e}")))?;
        let batch = if value.get("scenarios").is_some() {
            serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?
        } else {
            let single: ScenarioConfig =
                serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
            Batch {
                name: single.name().to_string(),
                scenarios: vec![single],
            }
        };
        batch.validate()?;
        Ok(batch)
    }

    pub fn validate(&self) -> CliResult<()> {
        check_name(&self.name)?;
        if self.scenarios.is_empty() {
            return Err(CliError::Config(
                "a batch needs at least one scenario".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for s in &self.scenarios {
            if !seen.insert(s.name()) {
                return Err(CliError::Config(format!(
                    "duplicate scenario name {:?}",
                    s.name()
                )));
            }
            match s {
                ScenarioConfig::Dynamics(d) => d.validate()?,
                ScenarioConfig::Table(t) => t.validate()?,
            }
        }
        Ok(())
    }
}

fn check_name(name: &str) -> CliResult<()> {
    let ok = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        && !name.starts_with('.');
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "name {name:?} must be non-empty and use only letters, digits, '-', '_' or '.'"
        )))
    }
}

fn positive(label: &str, x: f64) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{label} must be positive and finite, got {x}"
        )))
    }
}

impl TableConfig {
    pub fn validate(&self) -> CliResult<()> {
        check_name(&self.name)?;
        if !(self.coupling_ratio > 0.0 && self.coupling_ratio < 1.0) {
            return Err(CliError::Config("coupling_ratio must lie in (0, 1)".into()));
        }
        if !(1..=20).contains(&self.k_max) {
            return Err(CliError::Config("k_max must lie in 1..=20".into()));
        }
        Ok(())
    }
}

impl DynamicsConfig {
    /// Semiclassical `G / omega`.
    pub fn coupling(&self) -> f64 {
        match (self.coupling_ratio, self.t_pi) {
            (Some(g), _) => g,
            (None, Some(t)) => PI / t,
            (None, None) => f64::NAN,
        }
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig::with_tolerances(self.tolerances.rel_tol, self.tolerances.abs_tol)
    }

    pub fn validate(&self) -> CliResult<()> {
        check_name(&self.name)?;
        positive("atomic_ratio", self.atomic_ratio)?;
        positive("time_grid.t_max", self.time_grid.t_max)?;
        if self.time_grid.n_samples < 2 {
            return Err(CliError::Config(
                "time_grid.n_samples must be at least 2".into(),
            ));
        }
        match (self.coupling_ratio, self.t_pi) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give either coupling_ratio or t_pi, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config(
                    "coupling_ratio or t_pi is required".into(),
                ))
            }
            (Some(g), None) => {
                if !(g >= 0.0 && g.is_finite()) {
                    return Err(CliError::Config(
                        "coupling_ratio must be finite and non-negative".into(),
                    ));
                }
            }
            (None, Some(t)) => positive("t_pi", t)?,
        }
        if self.methods.is_empty() {
            return Err(CliError::Config("methods must not be empty".into()));
        }
        if self.outputs.is_empty() {
            return Err(CliError::Config("outputs must not be empty".into()));
        }
        if !(self.tolerances.rel_tol > 0.0 && self.tolerances.rel_tol < 1.0)
            || !(self.tolerances.abs_tol > 0.0 && self.tolerances.abs_tol < 1.0)
        {
            return Err(CliError::Config("tolerances must lie in (0, 1)".into()));
        }
        if let Some([a, b]) = self.zoom {
            if !(a < b && a >= 0.0 && b <= self.time_grid.t_max) {
                return Err(CliError::Config(
                    "zoom must be an increasing pair inside [0, t_max]".into(),
                ));
            }
        }
        let zero_detuning = self.atomic_ratio == 1.0;
        match self.model {
            Model::Semiclassical => {
                if self.beta_sq.is_some()
                    || self.tail_cutoff.is_some()
                    || self.compare_semiclassical
                {
                    return Err(CliError::Config(
                        "beta_sq, tail_cutoff and compare_semiclassical apply to the quantum model only".into(),
                    ));
                }
                if self.outputs != [Observable::ExcitedProbability] {
                    return Err(CliError::Config(
                        "the semiclassical model only outputs P_e".into(),
                    ));
                }
                for m in &self.methods {
                    match m {
                        Method::Intermediate if !zero_detuning => {
                            return Err(CliError::Config(
                                "intermediate needs atomic_ratio = 1".into(),
                            ))
                        }
                        Method::Semianalytic
                            if self.semianalytic_mode == SemianalyticMode::Truncated
                                && !zero_detuning =>
                        {
                            return Err(CliError::Config(
                                "the truncated semianalytic mode needs atomic_ratio = 1".into(),
                            ))
                        }
                        Method::Multiphoton => {
                            if self.resonance_k.unwrap_or(0) == 0 {
                                return Err(CliError::Config(
                                    "multiphoton needs resonance_k >= 1".into(),
                                ));
                            }
                            if self.atomic_ratio <= 1.0 {
                                return Err(CliError::Config(
                                    "multiphoton needs atomic_ratio > 1".into(),
                                ));
                            }
                        }
                        Method::Rwa if self.initial != InitialAtom::Ground => {
                            return Err(CliError::Config(
                                "the RWA formula assumes the atom starts in |g>".into(),
                            ))
                        }
                        _ => {}
                    }
                }
                if (self.coupling() == 0.0) && zero_detuning {
                    return Err(CliError::Config(
                        "G = 0 at zero detuning is degenerate".into(),
                    ));
                }
            }
            Model::Quantum => {
                if self.methods != [Method::Exact] {
                    return Err(CliError::Config(
                        "the quantum model supports only the exact method".into(),
                    ));
                }
                match self.beta_sq {
                    Some(b) => positive("beta_sq", b)?,
                    None => return Err(CliError::Config("the quantum model needs beta_sq".into())),
                }
                if let Some(c) = self.tail_cutoff {
                    if !(c > 0.0 && c < 1.0) {
                        return Err(CliError::Config("tail_cutoff must lie in (0, 1)".into()));
                    }
                }
                let wants_delta = self.outputs.contains(&Observable::DistributionShift);
                if wants_delta && self.snapshot_times.is_empty() {
                    return Err(CliError::Config("delta_p needs snapshot_times".into()));
                }
                if !wants_delta && !self.snapshot_times.is_empty() {
                    return Err(CliError::Config(
                        "snapshot_times given without the delta_p output".into(),
                    ));
                }
                let inside = self
                    .snapshot_times
                    .iter()
                    .all(|&t| t >= 0.0 && t <= self.time_grid.t_max);
                let ordered = self.snapshot_times.windows(2).all(|w| w[1] > w[0]);
                if !(inside && ordered) {
                    return Err(CliError::Config(
                        "snapshot_times must be strictly increasing and inside [0, t_max]".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SINGLE: &str = r#"{
        "kind": "dynamics", "name": "demo", "model": "semiclassical",
        "methods": ["exact", "rwa"], "atomic_ratio": 1.0, "t_pi": 50,
        "time_grid": {"t_max": 100, "n_samples": 11}
    }"#;

    #[test]
    fn single_scenario_becomes_a_batch() {
        let b = Batch::parse(SINGLE).unwrap();
        assert_eq!(b.name, "demo");
        let ScenarioConfig::Dynamics(d) = &b.scenarios[0] else {
            panic!()
        };
        assert!((d.coupling() - PI / 50.0).abs() < 1e-15);
        assert_eq!(d.outputs, vec![Observable::ExcitedProbability]);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(Batch::parse("{"), Err(CliError::Config(_))));
        let unknown = SINGLE.replace("\"t_pi\"", "\"tpi\"");
        assert!(Batch::parse(&unknown).is_err());
        let few = SINGLE.replace("\"n_samples\": 11", "\"n_samples\": 1");
        assert!(Batch::parse(&few).is_err());
        let detuned = SINGLE
            .replace("\"rwa\"", "\"intermediate\"")
            .replace("1.0", "1.2");
        assert!(Batch::parse(&detuned).is_err());
        let quantum = SINGLE.replace("semiclassical", "quantum");
        assert!(Batch::parse(&quantum).is_err());
        let path = SINGLE.replace("\"demo\"", "\"../x\"");
        assert!(Batch::parse(&path).is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let b = Batch::parse(SINGLE).unwrap();
        let text = serde_json::to_string(&b).unwrap();
        assert_eq!(Batch::parse(&text).unwrap(), b);
    }
}
