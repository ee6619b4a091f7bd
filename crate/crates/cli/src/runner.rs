//! Executes scenario batches and writes CSV files plus `manifest.json`.
//!
//! Layout: `<out>/manifest.json` and `<out>/<scenario>/<observable>.csv`.
//! Numbers are written as `{:.16e}` with LF line endings, so repeated runs
//! produce byte-identical CSV files.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rabi_core::integrator::IntegratorConfig;
use rabi_core::quantum::{
    coherent_initial, compute_window, distribution_delta, quantum_solve_with, summarize, AtomState,
    QuantumParams, QuantumState, DEFAULT_TAIL_CUTOFF,
};
use rabi_core::semiclassical::{
    diagonal_initial, exact_solve, intermediate_solve, multiphoton_solve,
    resonance_coefficients_auto, resonance_table, rwa_series, semianalytic_solve, QtMode,
};
use rabi_core::{derive_params, linspace, ComplexPair, SemiclassicalParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::*;
use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Measured cost of the quantum solver, seconds per (Fock state x unit of `omega t`).
const QUANTUM_COST: f64 = 1.4e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub generator: String,
    pub scenarios: Vec<ScenarioRecord>,
}

impl Manifest {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        if text.trim().is_empty() {
            return Err(CliError::Config(format!("{} is empty", path.display())));
        }
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn files(&self) -> impl Iterator<Item = (&ScenarioRecord, &FileRecord)> {
        self.scenarios
            .iter()
            .flat_map(|s| s.files.iter().map(move |f| (s, f)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub name: String,
    pub config: ScenarioConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived: Option<DerivedRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonance: Option<ResonanceRecord>,
    /// Fock window `[N1, N2]` of a quantum run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    /// Largest `|norm - 1|` over the samples of a quantum run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_drift: Option<f64>,
    pub files: Vec<FileRecord>,
    pub wall_time_s: f64,
}

/// Derived semiclassical quantities, in units of `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedRecord {
    pub coupling: f64,
    pub detuning: f64,
    pub rabi: f64,
    pub r_plus: f64,
    pub r_minus: f64,
    pub upsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub single_photon_coupling: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceRecord {
    pub k: u32,
    pub l_k: f64,
    pub delta: f64,
    pub x_k: f64,
    pub omega_t_k: f64,
    pub linewidth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    pub observable: String,
    /// Path relative to the manifest directory.
    pub path: String,
    pub x_column: String,
    pub columns: Vec<String>,
    #[serde(default)]
    pub log_y: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zoom: Option<[f64; 2]>,
}

/// Rough wall-clock estimate for the quantum scenarios of a batch, in seconds.
pub fn estimate_seconds(batch: &Batch) -> f64 {
    batch
        .scenarios
        .iter()
        .filter_map(|s| match s {
            ScenarioConfig::Dynamics(d) if d.model == Model::Quantum => {
                let beta = d.beta_sq?.sqrt();
                let w = compute_window(beta, d.tail_cutoff.unwrap_or(DEFAULT_TAIL_CUTOFF)).ok()?;
                let extra = if d.compare_semiclassical { 1.05 } else { 1.0 };
                Some(QUANTUM_COST * w.len() as f64 * d.time_grid.t_max * extra)
            }
            _ => None,
        })
        .sum()
}

/// Runs every scenario of `batch` into `out` on `jobs` threads (0 = all cores)
/// and writes the manifest.
pub fn run_batch(batch: &Batch, out: &Path, jobs: usize) -> CliResult<Manifest> {
    batch.validate()?;
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let records: Vec<CliResult<ScenarioRecord>> = pool.install(|| {
        batch
            .scenarios
            .par_iter()
            .map(|s| run_scenario(s, out))
            .collect()
    });
    let scenarios = records.into_iter().collect::<CliResult<Vec<_>>>()?;
    let manifest = Manifest {
        name: batch.name.clone(),
        generator: format!("rabi-dyn {}", env!("CARGO_PKG_VERSION")),
        scenarios,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(out.join(MANIFEST_FILE), text + "\n")?;
    Ok(manifest)
}

pub fn run_scenario(scenario: &ScenarioConfig, out: &Path) -> CliResult<ScenarioRecord> {
    let start = Instant::now();
    let dir = out.join(scenario.name());
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    info!("running {}", scenario.name());
    let mut record = match scenario {
        ScenarioConfig::Table(t) => run_table(t, &dir)?,
        ScenarioConfig::Dynamics(d) => match d.model {
            Model::Semiclassical => run_semiclassical(d, &dir)?,
            Model::Quantum => run_quantum(d, &dir)?,
        },
    };
    record.config = scenario.clone();
    for f in &mut record.files {
        f.path = format!("{}/{}", scenario.name(), f.path);
    }
    record.wall_time_s = start.elapsed().as_secs_f64();
    info!(
        "{} finished in {:.1} s",
        scenario.name(),
        record.wall_time_s
    );
    Ok(record)
}

fn empty_record(name: &str, config: ScenarioConfig) -> ScenarioRecord {
    ScenarioRecord {
        name: name.to_string(),
        config,
        derived: None,
        resonance: None,
        window: None,
        tolerances: None,
        norm_drift: None,
        files: Vec::new(),
        wall_time_s: 0.0,
    }
}

/// Writes a CSV with a header and rows of `{:.16e}` numbers.
pub fn write_csv(
    path: &Path,
    header: &[String],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `x` followed by each column, one row per sample.
fn write_columns(
    path: &Path,
    x_name: &str,
    x: &[f64],
    columns: &[(String, Vec<f64>)],
) -> CliResult<()> {
    let mut header = vec![x_name.to_string()];
    header.extend(columns.iter().map(|(n, _)| n.clone()));
    let rows = (0..x.len()).map(|i| {
        let mut row = Vec::with_capacity(columns.len() + 1);
        row.push(x[i]);
        row.extend(columns.iter().map(|(_, v)| v[i]));
        row
    });
    write_csv(path, &header, rows)
}

fn file_record(
    observable: &str,
    x_column: &str,
    columns: &[(String, Vec<f64>)],
    zoom: Option<[f64; 2]>,
) -> FileRecord {
    FileRecord {
        observable: observable.to_string(),
        path: format!("{observable}.csv"),
        x_column: x_column.to_string(),
        columns: columns.iter().map(|(n, _)| n.clone()).collect(),
        log_y: false,
        zoom,
    }
}

fn semiclassical_params(d: &DynamicsConfig) -> CliResult<SemiclassicalParams> {
    Ok(SemiclassicalParams::from_ratios(
        d.atomic_ratio,
        d.coupling(),
    )?)
}

fn derived_record(
    p: &SemiclassicalParams,
    single_photon_coupling: Option<f64>,
) -> CliResult<DerivedRecord> {
    let dp = derive_params(p)?;
    Ok(DerivedRecord {
        coupling: p.coupling,
        detuning: dp.detuning,
        rabi: dp.rabi,
        r_plus: dp.r_plus,
        r_minus: dp.r_minus,
        upsilon: dp.upsilon,
        single_photon_coupling,
    })
}

fn initial_pair(atom: InitialAtom) -> ComplexPair {
    match atom {
        InitialAtom::Ground => ComplexPair::ground(),
        InitialAtom::Excited => ComplexPair::excited(),
    }
}

fn run_table(t: &TableConfig, dir: &Path) -> CliResult<ScenarioRecord> {
    let ks: Vec<u32> = (1..=t.k_max).collect();
    let rows = resonance_table(t.coupling_ratio, &ks)?;
    let header: Vec<String> = ["K", "Omega_K", "abs_L_K", "omega_T_K", "delta", "linewidth"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    write_csv(
        &dir.join("table.csv"),
        &header,
        rows.iter().map(|r| {
            vec![
                f64::from(r.k),
                r.omega_k,
                r.l_k_abs,
                r.t_k,
                r.delta,
                r.linewidth,
            ]
        }),
    )?;
    let mut rec = empty_record(&t.name, ScenarioConfig::Table(t.clone()));
    rec.files.push(FileRecord {
        observable: "table".into(),
        path: "table.csv".into(),
        x_column: "K".into(),
        columns: vec!["abs_L_K".into()],
        log_y: true,
        zoom: None,
    });
    Ok(rec)
}

fn run_semiclassical(d: &DynamicsConfig, dir: &Path) -> CliResult<ScenarioRecord> {
    let p = semiclassical_params(d)?;
    let dp = derive_params(&p)?;
    let cfg = d.integrator();
    let times = linspace(0.0, d.time_grid.t_max, d.time_grid.n_samples);
    let c0 = initial_pair(d.initial);
    let mut rec = empty_record(&d.name, ScenarioConfig::Dynamics(d.clone()));
    rec.derived = Some(derived_record(&p, None)?);
    rec.tolerances = Some(d.tolerances);

    let mut columns = Vec::with_capacity(d.methods.len());
    for &m in &d.methods {
        let values = match m {
            Method::Exact => exact_solve(&p, c0, &times, &cfg)?.probability,
            Method::Rwa => rwa_series(&p, &times)?,
            Method::Intermediate => intermediate_solve(&p, c0, &times)?,
            Method::Semianalytic => {
                let mode = match d.semianalytic_mode {
                    SemianalyticMode::Full => QtMode::Full,
                    SemianalyticMode::Truncated => QtMode::OnePhotonTruncated,
                    SemianalyticMode::Auto if dp.detuning == 0.0 => QtMode::OnePhotonTruncated,
                    SemianalyticMode::Auto => QtMode::Full,
                };
                semianalytic_solve(&p, c0, &times, mode, &cfg)?
            }
            Method::Multiphoton => {
                let k = d.resonance_k.unwrap_or(1);
                let data = resonance_coefficients_auto(&p, k)?;
                rec.resonance = Some(ResonanceRecord {
                    k,
                    l_k: data.l_k,
                    delta: data.delta,
                    x_k: data.x_k,
                    omega_t_k: data.t_k,
                    linewidth: data.linewidth,
                });
                multiphoton_solve(&p, &data, diagonal_initial(c0, &dp), &times)?.probability
            }
        };
        columns.push((m.column().to_string(), values.values().to_vec()));
    }
    write_columns(&dir.join("P_e.csv"), "omega_t", &times, &columns)?;
    rec.files
        .push(file_record("P_e", "omega_t", &columns, d.zoom));
    Ok(rec)
}

/// Merges the output grid with the snapshot times. Each entry carries the grid
/// index and snapshot index it serves.
fn merged_times(grid: &[f64], snaps: &[f64]) -> Vec<(f64, Option<usize>, Option<usize>)> {
    let mut out = Vec::with_capacity(grid.len() + snaps.len());
    let (mut i, mut j) = (0, 0);
    while i < grid.len() || j < snaps.len() {
        let g = grid.get(i).copied().unwrap_or(f64::INFINITY);
        let s = snaps.get(j).copied().unwrap_or(f64::INFINITY);
        if g == s {
            out.push((g, Some(i), Some(j)));
            i += 1;
            j += 1;
        } else if g < s {
            out.push((g, Some(i), None));
            i += 1;
        } else {
            out.push((s, None, Some(j)));
            j += 1;
        }
    }
    out
}

fn run_quantum(d: &DynamicsConfig, dir: &Path) -> CliResult<ScenarioRecord> {
    let beta_sq = d.beta_sq.unwrap_or(0.0);
    let beta = beta_sq.sqrt();
    let sc = semiclassical_params(d)?;
    let qp = QuantumParams::from_semiclassical(&sc, beta)?;
    let cutoff = d.tail_cutoff.unwrap_or(DEFAULT_TAIL_CUTOFF);
    let window = compute_window(beta, cutoff)?;
    let atom = match d.initial {
        InitialAtom::Ground => AtomState::Ground,
        InitialAtom::Excited => AtomState::Excited,
    };
    let s0 = coherent_initial(beta, window, atom)?;
    let cfg: IntegratorConfig = d.integrator();
    if beta_sq > DESK_SCALE_BETA_SQ {
        let est = QUANTUM_COST * window.len() as f64 * d.time_grid.t_max;
        warn!(
            "{}: {} Fock states, roughly {:.0} s",
            d.name,
            window.len(),
            est
        );
    }

    let grid = linspace(0.0, d.time_grid.t_max, d.time_grid.n_samples);
    let plan = merged_times(&grid, &d.snapshot_times);
    let times: Vec<f64> = plan.iter().map(|e| e.0).collect();
    let n = grid.len();
    let (mut pe, mut nm, mut pb) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    let mut snaps: Vec<Vec<f64>> = Vec::with_capacity(d.snapshot_times.len());
    let mut drift: f64 = 0.0;
    let mut step = 0;
    quantum_solve_with(&qp, &s0, &times, &cfg, |_, s: &QuantumState| {
        let (_, gi, si) = plan[step];
        step += 1;
        if gi.is_some() {
            let o = summarize(s, beta);
            pe.push(o.p_e);
            nm.push(o.n_mean);
            pb.push(o.p_beta);
            drift = drift.max((o.norm - 1.0).abs());
        }
        if si.is_some() {
            snaps.push(distribution_delta(s, &s0)?);
        }
        Ok(())
    })?;

    let mut rec = empty_record(&d.name, ScenarioConfig::Dynamics(d.clone()));
    rec.derived = Some(derived_record(&sc, Some(qp.coupling))?);
    rec.window = Some([window.n1, window.n2]);
    rec.tolerances = Some(d.tolerances);
    rec.norm_drift = Some(drift);

    for &obs in &d.outputs {
        let stem = obs.file_stem();
        let columns: Vec<(String, Vec<f64>)> = match obs {
            Observable::ExcitedProbability => {
                let mut c = vec![("quantum".to_string(), pe.clone())];
                if d.compare_semiclassical {
                    let e = exact_solve(&sc, initial_pair(d.initial), &grid, &cfg)?;
                    c.push(("semiclassical".to_string(), e.probability.values().to_vec()));
                }
                c
            }
            Observable::MeanPhotonNumber => vec![
                ("n_mean".to_string(), nm.clone()),
                (
                    "beta_sq_minus_n".to_string(),
                    nm.iter().map(|x| beta_sq - x).collect(),
                ),
            ],
            Observable::CoherentSurvival => vec![("P_beta".to_string(), pb.clone())],
            Observable::DistributionShift => {
                let ns: Vec<f64> = window.photon_numbers().map(|k| k as f64).collect();
                let mut c = vec![("p_n0".to_string(), s0.photon_distribution())];
                for (t, v) in d.snapshot_times.iter().zip(&snaps) {
                    c.push((format!("delta_p_{t}"), v.clone()));
                }
                write_columns(&dir.join(format!("{stem}.csv")), "n", &ns, &c)?;
                rec.files.push(file_record(stem, "n", &c, None));
                continue;
            }
        };
        write_columns(&dir.join(format!("{stem}.csv")), "omega_t", &grid, &columns)?;
        rec.files
            .push(file_record(stem, "omega_t", &columns, d.zoom));
    }
    Ok(rec)
}

/// Default output directory for a batch.
pub fn default_out_dir(batch: &Batch) -> PathBuf {
    PathBuf::from("out").join(&batch.name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_keeps_order_and_shared_points() {
        let m = merged_times(&[0.0, 1.0, 2.0], &[0.5, 2.0]);
        let t: Vec<f64> = m.iter().map(|e| e.0).collect();
        assert_eq!(t, vec![0.0, 0.5, 1.0, 2.0]);
        assert_eq!(m[3], (2.0, Some(2), Some(1)));
        assert_eq!(m[1], (0.5, None, Some(0)));
    }
}
