//! Built-in scenario batches reproducing the published table and figures.
//!
//! Quantum runs with `beta^2` above [`DESK_SCALE_BETA_SQ`] are only included
//! with `--paper-scale`.

use crate::config::*;
use crate::error::{CliError, CliResult};

pub const PRESET_NAMES: [&str; 5] = ["table1", "fig2", "fig3", "fig4", "fig5"];

/// Field strength of the three-photon figures, `G / omega`.
const THREE_PHOTON_G: f64 = 0.2;
/// Atomic frequency used for the three-photon figures.
const THREE_PHOTON_OMEGA: f64 = 2.98497;

pub fn preset(name: &str, paper_scale: bool) -> CliResult<Batch> {
    let scenarios = match name {
        "table1" => vec![ScenarioConfig::Table(TableConfig {
            name: "table1".into(),
            coupling_ratio: THREE_PHOTON_G,
            k_max: 4,
        })],
        "fig2" => fig2(),
        "fig3" => fig3(paper_scale),
        "fig4" => fig4(paper_scale),
        "fig5" => fig5(paper_scale),
        _ => {
            return Err(CliError::Config(format!(
                "unknown preset {name:?}; expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    let batch = Batch {
        name: name.to_string(),
        scenarios,
    };
    batch.validate()?;
    Ok(batch)
}

fn base(
    name: String,
    model: Model,
    atomic_ratio: f64,
    t_max: f64,
    n_samples: usize,
) -> DynamicsConfig {
    DynamicsConfig {
        name,
        model,
        methods: vec![Method::Exact],
        atomic_ratio,
        coupling_ratio: None,
        t_pi: None,
        beta_sq: None,
        resonance_k: None,
        time_grid: TimeGrid { t_max, n_samples },
        outputs: vec![Observable::ExcitedProbability],
        snapshot_times: Vec::new(),
        semianalytic_mode: SemianalyticMode::Auto,
        initial: InitialAtom::Ground,
        compare_semiclassical: false,
        tolerances: Tolerances::default(),
        tail_cutoff: None,
        zoom: None,
    }
}

fn photon_sizes(paper_scale: bool) -> Vec<f64> {
    if paper_scale {
        vec![5000.0, 30000.0]
    } else {
        vec![5000.0]
    }
}

/// One-photon resonance at three coupling strengths, every semiclassical method.
fn fig2() -> Vec<ScenarioConfig> {
    [500.0, 50.0, 15.0]
        .into_iter()
        .map(|t_pi: f64| {
            let t_max = 3.0 * t_pi;
            let mut d = base(
                format!("tpi{t_pi}"),
                Model::Semiclassical,
                1.0,
                t_max,
                (20.0 * t_max) as usize + 1,
            );
            d.t_pi = Some(t_pi);
            d.methods = vec![
                Method::Exact,
                Method::Rwa,
                Method::Intermediate,
                Method::Semianalytic,
            ];
            d.zoom = Some([(t_pi - 10.0).max(0.0), t_pi + 10.0]);
            ScenarioConfig::Dynamics(d)
        })
        .collect()
}

/// Quantum one-photon dynamics against the semiclassical curve.
fn fig3(paper_scale: bool) -> Vec<ScenarioConfig> {
    photon_sizes(paper_scale)
        .into_iter()
        .map(|b2| {
            let mut d = base(format!("quantum_b{b2}"), Model::Quantum, 1.0, 3000.0, 6001);
            d.t_pi = Some(50.0);
            d.beta_sq = Some(b2);
            d.compare_semiclassical = true;
            d.outputs = vec![
                Observable::ExcitedProbability,
                Observable::MeanPhotonNumber,
                Observable::CoherentSurvival,
            ];
            d.zoom = Some([0.0, 200.0]);
            ScenarioConfig::Dynamics(d)
        })
        .collect()
}

/// Three-photon resonance, semiclassical and quantum.
fn fig4(paper_scale: bool) -> Vec<ScenarioConfig> {
    let mut semi = base(
        "semiclassical".into(),
        Model::Semiclassical,
        THREE_PHOTON_OMEGA,
        2.5e4,
        50001,
    );
    semi.coupling_ratio = Some(THREE_PHOTON_G);
    semi.methods = vec![Method::Exact, Method::Multiphoton];
    semi.resonance_k = Some(1);
    semi.zoom = Some([6200.0, 6400.0]);
    let mut out = vec![ScenarioConfig::Dynamics(semi)];
    for b2 in photon_sizes(paper_scale) {
        let mut d = base(
            format!("quantum_b{b2}"),
            Model::Quantum,
            THREE_PHOTON_OMEGA,
            2.5e4,
            12501,
        );
        d.coupling_ratio = Some(THREE_PHOTON_G);
        d.beta_sq = Some(b2);
        d.compare_semiclassical = true;
        d.outputs = vec![Observable::ExcitedProbability, Observable::MeanPhotonNumber];
        out.push(ScenarioConfig::Dynamics(d));
    }
    out
}

/// Photon-distribution snapshots after one- and three-photon evolution.
fn fig5(paper_scale: bool) -> Vec<ScenarioConfig> {
    let mut out = Vec::new();
    for b2 in photon_sizes(paper_scale) {
        let mut one = base(
            format!("one_photon_b{b2}"),
            Model::Quantum,
            1.0,
            2600.0,
            2601,
        );
        one.t_pi = Some(50.0);
        one.beta_sq = Some(b2);
        one.outputs = vec![
            Observable::ExcitedProbability,
            Observable::DistributionShift,
        ];
        one.snapshot_times = vec![150.0, 2600.0];
        out.push(ScenarioConfig::Dynamics(one));

        let mut three = base(
            format!("three_photon_b{b2}"),
            Model::Quantum,
            THREE_PHOTON_OMEGA,
            25500.0,
            2551,
        );
        three.coupling_ratio = Some(THREE_PHOTON_G);
        three.beta_sq = Some(b2);
        three.outputs = vec![
            Observable::ExcitedProbability,
            Observable::DistributionShift,
        ];
        three.snapshot_times = vec![18900.0, 25500.0];
        out.push(ScenarioConfig::Dynamics(three));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in PRESET_NAMES {
            for paper in [false, true] {
                preset(name, paper).unwrap();
            }
        }
        assert!(preset("fig9", false).is_err());
    }

    #[test]
    fn paper_scale_adds_the_large_field() {
        let desk = preset("fig3", false).unwrap();
        let paper = preset("fig3", true).unwrap();
        assert_eq!(desk.scenarios.len() + 1, paper.scenarios.len());
    }
}
