use num_complex::Complex64;
use rabi_core::integrator::{integrate, FnSystem, IntegratorConfig, OdeProblem};
use rabi_core::linspace;

// Driven two-level system: a unitary flow with a time-dependent generator.
fn driven() -> FnSystem<impl Fn(f64, &[Complex64], &mut [Complex64])> {
    FnSystem::new(2, |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let i = Complex64::i();
        let drive = 0.2 * t.cos();
        dy[0] = -i * (drive * y[1] - 1.5 * y[0]);
        dy[1] = -i * (drive * y[0] + 1.5 * y[1]);
    })
}

#[test]
fn norm_drift_over_long_runs() {
    let y0 = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let p = OdeProblem::new(driven(), 0.0, 3e4, y0).unwrap();
    let traj = integrate(
        &p,
        &IntegratorConfig::default().with_samples(linspace(0.0, 3e4, 3001)),
    )
    .unwrap();
    let drift = traj
        .states
        .iter()
        .map(|y| (y[0].norm_sqr() + y[1].norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(drift <= 1e-8, "drift {drift}");
}

#[test]
fn tightening_tolerances_converges() {
    let y0 = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
    let p = OdeProblem::new(driven(), 0.0, 500.0, y0).unwrap();
    let run = |rtol: f64, atol: f64| {
        let cfg = IntegratorConfig::with_tolerances(rtol, atol).with_samples(vec![500.0]);
        integrate(&p, &cfg).unwrap().states.pop().unwrap()
    };
    let loose = run(1e-7, 1e-9);
    let mid = run(5e-8, 5e-10);
    let tight = run(1e-12, 1e-14);
    let err = |a: &[Complex64]| {
        a.iter()
            .zip(&tight)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    };
    let change = loose
        .iter()
        .zip(&mid)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    assert!(err(&mid) < err(&loose));
    assert!(
        change <= err(&loose) * 1.5,
        "change {change}, loose error {}",
        err(&loose)
    );
}
