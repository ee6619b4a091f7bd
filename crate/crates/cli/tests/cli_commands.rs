use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rabi_dyn::runner::MANIFEST_FILE;
use rabi_dyn::Manifest;

fn rabi_dyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rabi-dyn"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const CONFIG: &str = r#"{
    "name": "demo",
    "scenarios": [
        {"kind": "dynamics", "name": "one_photon", "model": "semiclassical",
         "methods": ["exact", "rwa", "semianalytic"], "atomic_ratio": 1.0, "t_pi": 50,
         "time_grid": {"t_max": 150, "n_samples": 301}, "zoom": [40, 60]},
        {"kind": "dynamics", "name": "quantum", "model": "quantum", "atomic_ratio": 1.0,
         "t_pi": 50, "beta_sq": 100, "compare_semiclassical": true,
         "outputs": ["P_e", "n_mean", "P_beta", "delta_p"], "snapshot_times": [25, 50],
         "time_grid": {"t_max": 100, "n_samples": 101}}
    ]
}"#;

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn run_writes_csvs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = dir.path().join("out");
    let o = rabi_dyn(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let m = Manifest::load(&out.join(MANIFEST_FILE)).unwrap();
    assert_eq!(m.scenarios.len(), 2);
    assert_eq!(m.files().count(), 5);
    let q = &m.scenarios[1];
    assert!(q.window.is_some() && q.norm_drift.unwrap() < 1e-8);

    let pe = fs::read_to_string(out.join("one_photon/P_e.csv")).unwrap();
    assert!(pe.starts_with("omega_t,exact,rwa,semianalytic\n"));
    assert!(!pe.contains('\r'));
    assert_eq!(pe.lines().count(), 302);
    // full double precision: 17 significant digits per value
    let first_value = pe.lines().nth(2).unwrap().split(',').nth(1).unwrap();
    assert_eq!(
        first_value
            .split('e')
            .next()
            .unwrap()
            .replace(['.', '-'], "")
            .len(),
        17
    );

    let dp = fs::read_to_string(out.join("quantum/delta_p.csv")).unwrap();
    assert!(dp.starts_with("n,p_n0,delta_p_25,delta_p_50\n"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(
        code(&rabi_dyn(&[
            "run",
            &cfg,
            "--out",
            a.to_str().unwrap(),
            "--jobs",
            "1"
        ])),
        0
    );
    assert_eq!(
        code(&rabi_dyn(&[
            "run",
            &cfg,
            "--out",
            b.to_str().unwrap(),
            "--jobs",
            "2"
        ])),
        0
    );
    let m = Manifest::load(&a.join(MANIFEST_FILE)).unwrap();
    for (_, f) in m.files() {
        assert_eq!(
            fs::read(a.join(&f.path)).unwrap(),
            fs::read(b.join(&f.path)).unwrap(),
            "{}",
            f.path
        );
    }
}

#[test]
fn invalid_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    for text in [
        "not json",
        r#"{"kind": "dynamics", "name": "x", "model": "semiclassical", "atomic_ratio": 1.0, "t_pi": 50,
            "time_grid": {"t_max": 10, "n_samples": 1}}"#,
        r#"{"kind": "dynamics", "name": "x", "model": "semiclassical", "atomic_ratio": 1.0, "t_pi": 50,
            "time_grid": {"t_max": -1, "n_samples": 10}}"#,
        r#"{"kind": "dynamics", "name": "x", "model": "quantum", "methods": ["rwa"], "atomic_ratio": 1.0,
            "t_pi": 50, "beta_sq": 10, "time_grid": {"t_max": 10, "n_samples": 10}}"#,
    ] {
        let cfg = write_config(dir.path(), text);
        let o = rabi_dyn(&[
            "run",
            &cfg,
            "--out",
            dir.path().join("out").to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 1, "{text}");
    }
    assert_eq!(code(&rabi_dyn(&["preset", "fig9"])), 1);
    assert_eq!(code(&rabi_dyn(&["table1", "--coupling", "1.5"])), 1);
}

#[test]
fn solver_failure_exits_two() {
    // a coarse tail cutoff leaves percent-level weight on the window edges
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"kind": "dynamics", "name": "leaky", "model": "quantum", "atomic_ratio": 1.0, "t_pi": 5,
            "beta_sq": 100, "tail_cutoff": 0.01, "time_grid": {"t_max": 200, "n_samples": 21}}"#,
    );
    let o = rabi_dyn(&[
        "run",
        &cfg,
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn io_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&rabi_dyn(&[
            "run",
            dir.path().join("missing.json").to_str().unwrap()
        ])),
        3
    );
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = rabi_dyn(&[
        "preset",
        "table1",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    assert_eq!(
        code(&rabi_dyn(&[
            "plot",
            dir.path().join("nope.json").to_str().unwrap()
        ])),
        3
    );
}

#[test]
fn table1_prints_and_writes_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = rabi_dyn(&[
        "table1",
        "--coupling",
        "0.2",
        "--kmax",
        "4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("2.984971792"));
    let csv = fs::read_to_string(dir.path().join("table1/table.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "K,Omega_K,abs_L_K,omega_T_K,delta,linewidth"
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn plot_script_lists_every_panel() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2");
    assert_eq!(
        code(&rabi_dyn(&[
            "preset",
            "fig2",
            "--out",
            out.to_str().unwrap()
        ])),
        0
    );
    let o = rabi_dyn(&["plot", out.join(MANIFEST_FILE).to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let script = fs::read_to_string(out.join("plot.py")).unwrap();
    // three panels plus their zooms
    assert_eq!(script.matches("\"title\":").count(), 6);
    assert_eq!(script.matches("(zoom)").count(), 3);
    assert!(script.contains("tpi500/P_e.csv"));
}

#[test]
fn empty_manifest_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join(MANIFEST_FILE);
    fs::write(&p, "").unwrap();
    assert_eq!(code(&rabi_dyn(&["plot", p.to_str().unwrap()])), 1);
    fs::write(&p, r#"{"name": "x", "generator": "g", "scenarios": []}"#).unwrap();
    assert_eq!(code(&rabi_dyn(&["plot", p.to_str().unwrap()])), 1);
}

#[test]
fn preset_dump_round_trips() {
    let o = rabi_dyn(&["preset", "fig5", "--dump"]);
    assert_eq!(code(&o), 0);
    let batch = rabi_dyn::Batch::parse(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(batch, rabi_dyn::presets::preset("fig5", false).unwrap());
}

#[test]
fn distribution_panels_are_split() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = dir.path().join("out");
    assert_eq!(
        code(&rabi_dyn(&["run", &cfg, "--out", out.to_str().unwrap()])),
        0
    );
    let m = Manifest::load(&out.join(MANIFEST_FILE)).unwrap();
    let panels = rabi_dyn::plot::panels(&m);
    let dist: Vec<_> = panels.iter().filter(|p| p.x == "n").collect();
    assert_eq!(dist.len(), 3);
    assert!(dist.iter().all(|p| p.ys.len() == 1));
    assert_eq!(dist[0].ys[0], "p_n0");
}
