//! Adaptive explicit Runge-Kutta integration of complex first-order systems.
//!
//! The stepper is the Dormand-Prince 8(5,3) pair: an 8th-order solution with a
//! combined 5th/3rd-order error estimate and a 7th-order continuous extension
//! used to sample the trajectory on an arbitrary output grid.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A first-order system `dy/dt = f(t, y)` over complex state vectors.
///
/// `rhs` writes into a caller-owned buffer so large systems run without
/// per-evaluation allocation.
pub trait OdeSystem {
    fn dimension(&self) -> usize;
    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]);
}

impl<S: OdeSystem + ?Sized> OdeSystem for &S {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        (**self).rhs(t, y, dy)
    }
}

/// Adapter turning a closure into an [`OdeSystem`].
pub struct FnSystem<F> {
    dimension: usize,
    f: F,
}

impl<F> FnSystem<F>
where
    F: Fn(f64, &[Complex64], &mut [Complex64]),
{
    pub fn new(dimension: usize, f: F) -> Self {
        Self { dimension, f }
    }
}

impl<F> OdeSystem for FnSystem<F>
where
    F: Fn(f64, &[Complex64], &mut [Complex64]),
{
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        (self.f)(t, y, dy)
    }
}

/// An initial value problem on `[t0, t1]`.
pub struct OdeProblem<S> {
    pub system: S,
    pub t0: f64,
    pub t1: f64,
    pub initial_state: Vec<Complex64>,
}

impl<S: OdeSystem> OdeProblem<S> {
    pub fn new(system: S, t0: f64, t1: f64, initial_state: Vec<Complex64>) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::InvalidParams(format!(
                "integration interval [{t0}, {t1}] must be finite with t1 > t0"
            )));
        }
        if system.dimension() == 0 {
            return Err(Error::InvalidParams(
                "system dimension must be at least 1".into(),
            ));
        }
        if initial_state.len() != system.dimension() {
            return Err(Error::InvalidParams(format!(
                "initial state has length {} but the system has dimension {}",
                initial_state.len(),
                system.dimension()
            )));
        }
        if !initial_state.iter().all(|z| z.is_finite()) {
            return Err(Error::NonFiniteState { t: t0 });
        }
        Ok(Self {
            system,
            t0,
            t1,
            initial_state,
        })
    }
}

/// Defaults are `rel_tol = 1e-11`, `abs_tol = 1e-13`: at one decade looser the
/// norm of a unitary flow drifts by about 5e-8 over `omega t = 3e4`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Defaults to a hundredth of the integration interval.
    pub max_step: Option<f64>,
    pub initial_step: Option<f64>,
    pub max_steps: usize,
    /// Output grid. When `None` the trajectory is reported at `t0` and at every
    /// accepted step.
    pub dense_sample_times: Option<Vec<f64>>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            max_step: None,
            initial_step: None,
            max_steps: 50_000_000,
            dense_sample_times: None,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn with_samples(mut self, times: Vec<f64>) -> Self {
        self.dense_sample_times = Some(times);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidParams("rel_tol must lie in (0, 1)".into()));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol < 1.0) {
            return Err(Error::InvalidParams("abs_tol must lie in (0, 1)".into()));
        }
        if let Some(h) = self.max_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidParams("max_step must be positive".into()));
            }
        }
        if let Some(h) = self.initial_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidParams("initial_step must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegrationStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evals: usize,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub stats: IntegrationStats,
}

/// Integrates `problem` and collects the state at every output time.
pub fn integrate<S: OdeSystem>(
    problem: &OdeProblem<S>,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    let stats = integrate_with(problem, cfg, |t, y| {
        times.push(t);
        states.push(y.to_vec());
        Ok(())
    })?;
    Ok(Trajectory {
        times,
        states,
        stats,
    })
}

/// Integrates `problem`, handing each output `(t, y)` to `observer` as it is
/// produced. An error from the observer aborts the integration.
pub fn integrate_with<S, F>(
    problem: &OdeProblem<S>,
    cfg: &IntegratorConfig,
    mut observer: F,
) -> Result<IntegrationStats>
where
    S: OdeSystem,
    F: FnMut(f64, &[Complex64]) -> Result<()>,
{
    cfg.validate()?;
    let (t0, t1) = (problem.t0, problem.t1);
    let samples = cfg.dense_sample_times.as_deref();
    if let Some(s) = samples {
        let ordered = s.windows(2).all(|w| w[1] >= w[0]);
        let inside = s.iter().all(|&t| t.is_finite() && t >= t0 && t <= t1);
        if !(ordered && inside) {
            return Err(Error::InvalidSampleTimes { t0, t1 });
        }
    }

    let mut stepper = Dop853::new(&problem.system, cfg, t0, &problem.initial_state);
    let mut next_sample = 0;

    match samples {
        None => observer(t0, &stepper.y)?,
        Some(s) => {
            while next_sample < s.len() && s[next_sample] == t0 {
                observer(t0, &stepper.y)?;
                next_sample += 1;
            }
        }
    }

    let span = t1 - t0;
    let h_max = cfg.max_step.unwrap_or(span / 100.0).min(span);
    let h_min = 1e-14 * span;
    let mut h = cfg
        .initial_step
        .unwrap_or_else(|| stepper.initial_step(t0, h_max))
        .min(h_max);
    let mut t = t0;
    let mut last_rejected = false;

    while t < t1 {
        if stepper.stats.accepted_steps + stepper.stats.rejected_steps >= cfg.max_steps {
            return Err(Error::TooManySteps(cfg.max_steps));
        }
        let mut last = false;
        if t + 1.01 * h >= t1 {
            h = t1 - t;
            last = true;
        }
        if h < h_min && !last {
            return Err(Error::StepSizeUnderflow { t, step: h });
        }

        let err = stepper.attempt(t, h);
        if !err.is_finite() {
            return Err(Error::NonFiniteState { t });
        }
        let fac11 = err.powf(0.125);
        if err <= 1.0 {
            let t_new = if last { t1 } else { t + h };
            if !stepper.y_new.iter().all(|z| z.is_finite()) {
                return Err(Error::NonFiniteState { t: t_new });
            }
            stepper.accept(t_new);

            match samples {
                None => observer(t_new, &stepper.y_new)?,
                Some(s) => {
                    let mut dense_ready = false;
                    while next_sample < s.len() && s[next_sample] <= t_new {
                        let ts = s[next_sample];
                        if ts == t_new {
                            observer(ts, &stepper.y_new)?;
                        } else {
                            if !dense_ready {
                                stepper.prepare_dense(t, h);
                                dense_ready = true;
                            }
                            stepper.interpolate((ts - t) / h);
                            observer(ts, &stepper.y_dense)?;
                        }
                        next_sample += 1;
                    }
                }
            }

            stepper.facold = err.max(1e-4);
            let fac = (fac11 / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = (h / fac).min(h_max);
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            stepper.advance();
            t = t_new;
            h = h_new;
        } else {
            stepper.stats.rejected_steps += 1;
            last_rejected = true;
            h /= (fac11 / SAFE).min(1.0 / FAC_MIN);
        }
    }
    Ok(stepper.stats)
}

/// Integrates from `t = 0` and reports the state at each of `times`, which must
/// be finite, non-negative and strictly increasing.
pub fn integrate_sampled<S, F>(
    system: S,
    initial_state: Vec<Complex64>,
    times: &[f64],
    cfg: &IntegratorConfig,
    mut observer: F,
) -> Result<IntegrationStats>
where
    S: OdeSystem,
    F: FnMut(f64, &[Complex64]) -> Result<()>,
{
    let t_end = match times.last() {
        Some(&t) => t,
        None => return Err(Error::InvalidTimeSeries("no sample times requested".into())),
    };
    let ordered = times.windows(2).all(|w| w[1] > w[0]);
    if !(ordered && times[0] >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidSampleTimes { t0: 0.0, t1: t_end });
    }
    if t_end == 0.0 {
        if initial_state.len() != system.dimension() {
            return Err(Error::InvalidParams(
                "initial state has the wrong dimension".into(),
            ));
        }
        observer(0.0, &initial_state)?;
        return Ok(IntegrationStats::default());
    }
    let problem = OdeProblem::new(system, 0.0, t_end, initial_state)?;
    let cfg = IntegratorConfig {
        dense_sample_times: Some(times.to_vec()),
        ..cfg.clone()
    };
    integrate_with(&problem, &cfg, observer)
}

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.333;
const FAC_MAX: f64 = 6.0;

struct Dop853<'a, S> {
    system: &'a S,
    rel_tol: f64,
    abs_tol: f64,
    y: Vec<Complex64>,
    y_new: Vec<Complex64>,
    y_stage: Vec<Complex64>,
    y_dense: Vec<Complex64>,
    /// k[0] = f(t, y), k[1..12] are the remaining stages.
    k: Vec<Vec<Complex64>>,
    f_new: Vec<Complex64>,
    extra: [Vec<Complex64>; 3],
    cont: [Vec<Complex64>; 8],
    facold: f64,
    stats: IntegrationStats,
}

type Terms<'b> = &'b [(f64, &'b [Complex64])];

fn combine(out: &mut [Complex64], base: &[Complex64], h: f64, terms: Terms<'_>) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(c, k) in terms {
            acc += k[i] * c;
        }
        *o = base[i] + acc * h;
    }
}

fn weighted(out: &mut [Complex64], terms: Terms<'_>) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(c, k) in terms {
            acc += k[i] * c;
        }
        *o = acc;
    }
}

impl<'a, S: OdeSystem> Dop853<'a, S> {
    fn new(system: &'a S, cfg: &IntegratorConfig, t0: f64, y0: &[Complex64]) -> Self {
        let n = y0.len();
        let zeros = || vec![Complex64::new(0.0, 0.0); n];
        let mut s = Self {
            system,
            rel_tol: cfg.rel_tol,
            abs_tol: cfg.abs_tol,
            y: y0.to_vec(),
            y_new: zeros(),
            y_stage: zeros(),
            y_dense: zeros(),
            k: (0..12).map(|_| zeros()).collect(),
            f_new: zeros(),
            extra: [zeros(), zeros(), zeros()],
            cont: std::array::from_fn(|_| zeros()),
            facold: 1e-4,
            stats: IntegrationStats::default(),
        };
        s.system.rhs(t0, &s.y, &mut s.k[0]);
        s.stats.rhs_evals += 1;
        s
    }

    fn initial_step(&mut self, t0: f64, h_max: f64) -> f64 {
        let n = self.y.len() as f64;
        let mut dnf = 0.0;
        let mut dny = 0.0;
        for (y, f) in self.y.iter().zip(&self.k[0]) {
            let sk = self.abs_tol + self.rel_tol * y.norm();
            dnf += (f.norm() / sk).powi(2);
            dny += (y.norm() / sk).powi(2);
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            (dny / dnf).sqrt() * 0.01
        };
        h = h.min(h_max);

        combine(&mut self.y_stage, &self.y, h, &[(1.0, &self.k[0])]);
        self.system.rhs(t0 + h, &self.y_stage, &mut self.f_new);
        self.stats.rhs_evals += 1;
        let mut der2 = 0.0;
        for ((y, f0), f1) in self.y.iter().zip(&self.k[0]).zip(&self.f_new) {
            let sk = self.abs_tol + self.rel_tol * y.norm();
            der2 += ((f1 - f0).norm() / sk).powi(2);
        }
        let der2 = (der2 / n).sqrt() / h;
        let der12 = der2.max((dnf / n).sqrt());
        let h1 = if der12 <= 1e-15 {
            (h * 1e-3).max(1e-6)
        } else {
            (0.01 / der12).powf(1.0 / 8.0)
        };
        (100.0 * h).min(h1).min(h_max)
    }

    /// Computes all twelve stages and the candidate `y_new`; returns the scaled error.
    fn attempt(&mut self, t: f64, h: f64) -> f64 {
        use tableau::*;
        let sys = self.system;
        let (y, ys) = (&self.y, &mut self.y_stage);

        macro_rules! stage {
            ($idx:expr, $c:expr, [$(($a:expr, $j:expr)),+]) => {{
                {
                    let k = &self.k;
                    combine(ys, y, h, &[$(($a, &k[$j][..])),+]);
                }
                sys.rhs(t + $c * h, ys, &mut self.k[$idx]);
            }};
        }

        stage!(1, C2, [(A21, 0)]);
        stage!(2, C3, [(A31, 0), (A32, 1)]);
        stage!(3, C4, [(A41, 0), (A43, 2)]);
        stage!(4, C5, [(A51, 0), (A53, 2), (A54, 3)]);
        stage!(5, C6, [(A61, 0), (A64, 3), (A65, 4)]);
        stage!(6, C7, [(A71, 0), (A74, 3), (A75, 4), (A76, 5)]);
        stage!(7, C8, [(A81, 0), (A84, 3), (A85, 4), (A86, 5), (A87, 6)]);
        stage!(
            8,
            C9,
            [(A91, 0), (A94, 3), (A95, 4), (A96, 5), (A97, 6), (A98, 7)]
        );
        stage!(
            9,
            C10,
            [
                (A101, 0),
                (A104, 3),
                (A105, 4),
                (A106, 5),
                (A107, 6),
                (A108, 7),
                (A109, 8)
            ]
        );
        stage!(
            10,
            C11,
            [
                (A111, 0),
                (A114, 3),
                (A115, 4),
                (A116, 5),
                (A117, 6),
                (A118, 7),
                (A119, 8),
                (A1110, 9)
            ]
        );
        stage!(
            11,
            1.0,
            [
                (A121, 0),
                (A124, 3),
                (A125, 4),
                (A126, 5),
                (A127, 6),
                (A128, 7),
                (A129, 8),
                (A1210, 9),
                (A1211, 10)
            ]
        );
        self.stats.rhs_evals += 11;

        let k = &self.k;
        let mut err5 = 0.0;
        let mut err3 = 0.0;
        for i in 0..y.len() {
            let bsum = k[0][i] * B1
                + k[5][i] * B6
                + k[6][i] * B7
                + k[7][i] * B8
                + k[8][i] * B9
                + k[9][i] * B10
                + k[10][i] * B11
                + k[11][i] * B12;
            let yn = y[i] + bsum * h;
            self.y_new[i] = yn;
            let sk = self.abs_tol + self.rel_tol * y[i].norm().max(yn.norm());
            let e3 = bsum - k[0][i] * BHH1 - k[8][i] * BHH2 - k[11][i] * BHH3;
            err3 += (e3.norm() / sk).powi(2);
            let e5 = k[0][i] * ER1
                + k[5][i] * ER6
                + k[6][i] * ER7
                + k[7][i] * ER8
                + k[8][i] * ER9
                + k[9][i] * ER10
                + k[10][i] * ER11
                + k[11][i] * ER12;
            err5 += (e5.norm() / sk).powi(2);
        }
        let mut deno = err5 + 0.01 * err3;
        if deno <= 0.0 {
            deno = 1.0;
        }
        h.abs() * err5 * (1.0 / (deno * y.len() as f64)).sqrt()
    }

    fn accept(&mut self, t_new: f64) {
        self.system.rhs(t_new, &self.y_new, &mut self.f_new);
        self.stats.rhs_evals += 1;
        self.stats.accepted_steps += 1;
    }

    /// Builds the continuous extension for the step `[t, t + h]` just accepted.
    fn prepare_dense(&mut self, t: f64, h: f64) {
        use tableau::*;
        let k = &self.k;
        let (y, yn, fnew) = (&self.y, &self.y_new, &self.f_new);
        let [c0, c1, c2, c3, c4, c5, c6, c7] = &mut self.cont;
        for i in 0..y.len() {
            let ydiff = yn[i] - y[i];
            let bspl = k[0][i] * h - ydiff;
            c0[i] = y[i];
            c1[i] = ydiff;
            c2[i] = bspl;
            c3[i] = ydiff - fnew[i] * h - bspl;
        }
        let row = |d: &[f64; 8]| -> [(f64, &[Complex64]); 8] {
            [
                (d[0], &k[0][..]),
                (d[1], &k[5][..]),
                (d[2], &k[6][..]),
                (d[3], &k[7][..]),
                (d[4], &k[8][..]),
                (d[5], &k[9][..]),
                (d[6], &k[10][..]),
                (d[7], &k[11][..]),
            ]
        };
        weighted(c4, &row(&D4[..8].try_into().unwrap()));
        weighted(c5, &row(&D5[..8].try_into().unwrap()));
        weighted(c6, &row(&D6[..8].try_into().unwrap()));
        weighted(c7, &row(&D7[..8].try_into().unwrap()));

        let sys = self.system;
        let [e14, e15, e16] = &mut self.extra;
        let ys = &mut self.y_stage;
        combine(
            ys,
            y,
            h,
            &[
                (A141, &k[0]),
                (A147, &k[6]),
                (A148, &k[7]),
                (A149, &k[8]),
                (A1410, &k[9]),
                (A1411, &k[10]),
                (A1412, &k[11]),
                (A1413, fnew),
            ],
        );
        sys.rhs(t + C14 * h, ys, e14);
        combine(
            ys,
            y,
            h,
            &[
                (A151, &k[0]),
                (A156, &k[5]),
                (A157, &k[6]),
                (A158, &k[7]),
                (A1511, &k[10]),
                (A1512, &k[11]),
                (A1513, fnew),
                (A1514, e14),
            ],
        );
        sys.rhs(t + C15 * h, ys, e15);
        combine(
            ys,
            y,
            h,
            &[
                (A161, &k[0]),
                (A166, &k[5]),
                (A167, &k[6]),
                (A168, &k[7]),
                (A169, &k[8]),
                (A1613, fnew),
                (A1614, e14),
                (A1615, e15),
            ],
        );
        sys.rhs(t + C16 * h, ys, e16);
        self.stats.rhs_evals += 3;

        for (c, d) in [(c4, &D4), (c5, &D5), (c6, &D6), (c7, &D7)] {
            for i in 0..y.len() {
                c[i] =
                    (c[i] + fnew[i] * d[8] + e14[i] * d[9] + e15[i] * d[10] + e16[i] * d[11]) * h;
            }
        }
    }

    /// Evaluates the continuous extension at fraction `s` of the step into `y_dense`.
    fn interpolate(&mut self, s: f64) {
        let s1 = 1.0 - s;
        let [c0, c1, c2, c3, c4, c5, c6, c7] = &self.cont;
        for (i, out) in self.y_dense.iter_mut().enumerate() {
            let conpar = c4[i] + (c5[i] + (c6[i] + c7[i] * s) * s1) * s;
            *out = c0[i] + (c1[i] + (c2[i] + (c3[i] + conpar * s1) * s) * s1) * s;
        }
    }

    fn advance(&mut self) {
        std::mem::swap(&mut self.y, &mut self.y_new);
        std::mem::swap(&mut self.k[0], &mut self.f_new);
    }
}

#[allow(clippy::excessive_precision, clippy::unreadable_literal)]
mod tableau {
    pub const C2: f64 = 0.526001519587677318785587544488E-01;
    pub const C3: f64 = 0.789002279381515978178381316732E-01;
    pub const C4: f64 = 0.118350341907227396726757197510E+00;
    pub const C5: f64 = 0.281649658092772603273242802490E+00;
    pub const C6: f64 = 0.333333333333333333333333333333E+00;
    pub const C7: f64 = 0.25E+00;
    pub const C8: f64 = 0.307692307692307692307692307692E+00;
    pub const C9: f64 = 0.651282051282051282051282051282E+00;
    pub const C10: f64 = 0.6E+00;
    pub const C11: f64 = 0.857142857142857142857142857142E+00;
    pub const C14: f64 = 0.1E+00;
    pub const C15: f64 = 0.2E+00;
    pub const C16: f64 = 0.777777777777777777777777777778E+00;

    pub const A21: f64 = 5.26001519587677318785587544488E-2;
    pub const A31: f64 = 1.97250569845378994544595329183E-2;
    pub const A32: f64 = 5.91751709536136983633785987549E-2;
    pub const A41: f64 = 2.95875854768068491816892993775E-2;
    pub const A43: f64 = 8.87627564304205475450678981324E-2;
    pub const A51: f64 = 2.41365134159266685502369798665E-1;
    pub const A53: f64 = -8.84549479328286085344864962717E-1;
    pub const A54: f64 = 9.24834003261792003115737966543E-1;
    pub const A61: f64 = 3.7037037037037037037037037037E-2;
    pub const A64: f64 = 1.70828608729473871279604482173E-1;
    pub const A65: f64 = 1.25467687566822425016691814123E-1;
    pub const A71: f64 = 3.7109375E-2;
    pub const A74: f64 = 1.70252211019544039314978060272E-1;
    pub const A75: f64 = 6.02165389804559606850219397283E-2;
    pub const A76: f64 = -1.7578125E-2;
    pub const A81: f64 = 3.70920001185047927108779319836E-2;
    pub const A84: f64 = 1.70383925712239993810214054705E-1;
    pub const A85: f64 = 1.07262030446373284651809199168E-1;
    pub const A86: f64 = -1.53194377486244017527936158236E-2;
    pub const A87: f64 = 8.27378916381402288758473766002E-3;
    pub const A91: f64 = 6.24110958716075717114429577812E-1;
    pub const A94: f64 = -3.36089262944694129406857109825E0;
    pub const A95: f64 = -8.68219346841726006818189891453E-1;
    pub const A96: f64 = 2.75920996994467083049415600797E1;
    pub const A97: f64 = 2.01540675504778934086186788979E1;
    pub const A98: f64 = -4.34898841810699588477366255144E1;
    pub const A101: f64 = 4.77662536438264365890433908527E-1;
    pub const A104: f64 = -2.48811461997166764192642586468E0;
    pub const A105: f64 = -5.90290826836842996371446475743E-1;
    pub const A106: f64 = 2.12300514481811942347288949897E1;
    pub const A107: f64 = 1.52792336328824235832596922938E1;
    pub const A108: f64 = -3.32882109689848629194453265587E1;
    pub const A109: f64 = -2.03312017085086261358222928593E-2;
    pub const A111: f64 = -9.3714243008598732571704021658E-1;
    pub const A114: f64 = 5.18637242884406370830023853209E0;
    pub const A115: f64 = 1.09143734899672957818500254654E0;
    pub const A116: f64 = -8.14978701074692612513997267357E0;
    pub const A117: f64 = -1.85200656599969598641566180701E1;
    pub const A118: f64 = 2.27394870993505042818970056734E1;
    pub const A119: f64 = 2.49360555267965238987089396762E0;
    pub const A1110: f64 = -3.0467644718982195003823669022E0;
    pub const A121: f64 = 2.27331014751653820792359768449E0;
    pub const A124: f64 = -1.05344954667372501984066689879E1;
    pub const A125: f64 = -2.00087205822486249909675718444E0;
    pub const A126: f64 = -1.79589318631187989172765950534E1;
    pub const A127: f64 = 2.79488845294199600508499808837E1;
    pub const A128: f64 = -2.85899827713502369474065508674E0;
    pub const A129: f64 = -8.87285693353062954433549289258E0;
    pub const A1210: f64 = 1.23605671757943030647266201528E1;
    pub const A1211: f64 = 6.43392746015763530355970484046E-1;

    pub const A141: f64 = 5.61675022830479523392909219681E-2;
    pub const A147: f64 = 2.53500210216624811088794765333E-1;
    pub const A148: f64 = -2.46239037470802489917441475441E-1;
    pub const A149: f64 = -1.24191423263816360469010140626E-1;
    pub const A1410: f64 = 1.5329179827876569731206322685E-1;
    pub const A1411: f64 = 8.20105229563468988491666602057E-3;
    pub const A1412: f64 = 7.56789766054569976138603589584E-3;
    pub const A1413: f64 = -8.298E-3;
    pub const A151: f64 = 3.18346481635021405060768473261E-2;
    pub const A156: f64 = 2.83009096723667755288322961402E-2;
    pub const A157: f64 = 5.35419883074385676223797384372E-2;
    pub const A158: f64 = -5.49237485713909884646569340306E-2;
    pub const A1511: f64 = -1.08347328697249322858509316994E-4;
    pub const A1512: f64 = 3.82571090835658412954920192323E-4;
    pub const A1513: f64 = -3.40465008687404560802977114492E-4;
    pub const A1514: f64 = 1.41312443674632500278074618366E-1;
    pub const A161: f64 = -4.28896301583791923408573538692E-1;
    pub const A166: f64 = -4.69762141536116384314449447206E0;
    pub const A167: f64 = 7.68342119606259904184240953878E0;
    pub const A168: f64 = 4.06898981839711007970213554331E0;
    pub const A169: f64 = 3.56727187455281109270669543021E-1;
    pub const A1613: f64 = -1.39902416515901462129418009734E-3;
    pub const A1614: f64 = 2.9475147891527723389556272149E0;
    pub const A1615: f64 = -9.15095847217987001081870187138E0;

    pub const B1: f64 = 5.42937341165687622380535766363E-2;
    pub const B6: f64 = 4.45031289275240888144113950566E0;
    pub const B7: f64 = 1.89151789931450038304281599044E0;
    pub const B8: f64 = -5.8012039600105847814672114227E0;
    pub const B9: f64 = 3.1116436695781989440891606237E-1;
    pub const B10: f64 = -1.52160949662516078556178806805E-1;
    pub const B11: f64 = 2.01365400804030348374776537501E-1;
    pub const B12: f64 = 4.47106157277725905176885569043E-2;

    pub const BHH1: f64 = 0.244094488188976377952755905512E+00;
    pub const BHH2: f64 = 0.733846688281611857341361741547E+00;
    pub const BHH3: f64 = 0.220588235294117647058823529412E-01;

    pub const ER1: f64 = 0.1312004499419488073250102996E-01;
    pub const ER6: f64 = -0.1225156446376204440720569753E+01;
    pub const ER7: f64 = -0.4957589496572501915214079952E+00;
    pub const ER8: f64 = 0.1664377182454986536961530415E+01;
    pub const ER9: f64 = -0.3503288487499736816886487290E+00;
    pub const ER10: f64 = 0.3341791187130174790297318841E+00;
    pub const ER11: f64 = 0.8192320648511571246570742613E-01;
    pub const ER12: f64 = -0.2235530786388629525884427845E-01;

    // Continuous extension rows: weights on k1, k6..k12, then f_new, k14, k15, k16.
    pub const D4: [f64; 12] = [
        -0.84289382761090128651353491142E+01,
        0.56671495351937776962531783590E+00,
        -0.30689499459498916912797304727E+01,
        0.23846676565120698287728149680E+01,
        0.21170345824450282767155149946E+01,
        -0.87139158377797299206789907490E+00,
        0.22404374302607882758541771650E+01,
        0.63157877876946881815570249290E+00,
        -0.88990336451333310820698117400E-01,
        0.18148505520854727256656404962E+02,
        -0.91946323924783554000451984436E+01,
        -0.44360363875948939664310572000E+01,
    ];
    pub const D5: [f64; 12] = [
        0.10427508642579134603413151009E+02,
        0.24228349177525818288430175319E+03,
        0.16520045171727028198505394887E+03,
        -0.37454675472269020279518312152E+03,
        -0.22113666853125306036270938578E+02,
        0.77334326684722638389603898808E+01,
        -0.30674084731089398182061213626E+02,
        -0.93321305264302278729567221706E+01,
        0.15697238121770843886131091075E+02,
        -0.31139403219565177677282850411E+02,
        -0.93529243588444783865713862664E+01,
        0.35816841486394083752465898540E+02,
    ];
    pub const D6: [f64; 12] = [
        0.19985053242002433820987653617E+02,
        -0.38703730874935176555105901742E+03,
        -0.18917813819516756882830838328E+03,
        0.52780815920542364900561016686E+03,
        -0.11573902539959630126141871134E+02,
        0.68812326946963000169666922661E+01,
        -0.10006050966910838403183860980E+01,
        0.77771377980534432092869265740E+00,
        -0.27782057523535084065932004339E+01,
        -0.60196695231264120758267380846E+02,
        0.84320405506677161018159903784E+02,
        0.11992291136182789328035130030E+02,
    ];
    pub const D7: [f64; 12] = [
        -0.25693933462703749003312586129E+02,
        -0.15418974869023643374053993627E+03,
        -0.23152937917604549567536039109E+03,
        0.35763911791061412378285349910E+03,
        0.93405324183624310003907691704E+02,
        -0.37458323136451633156875139351E+02,
        0.10409964950896230045147246184E+03,
        0.29840293426660503123344363579E+02,
        -0.43533456590011143754432175058E+02,
        0.96324553959188282948394950600E+02,
        -0.39177261675615439165231486172E+02,
        -0.14972683625798562581422125276E+03,
    ];
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn phase_system() -> FnSystem<impl Fn(f64, &[Complex64], &mut [Complex64])> {
        FnSystem::new(1, |_t, y: &[Complex64], dy: &mut [Complex64]| {
            dy[0] = -Complex64::i() * y[0];
        })
    }

    fn rotation_system() -> FnSystem<impl Fn(f64, &[Complex64], &mut [Complex64])> {
        FnSystem::new(2, |_t, y: &[Complex64], dy: &mut [Complex64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        })
    }

    #[test]
    fn linear_phase_evolution() {
        let p = OdeProblem::new(phase_system(), 0.0, PI, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let traj = integrate(&p, &IntegratorConfig::default().with_samples(vec![PI])).unwrap();
        let end = traj.states.last().unwrap()[0];
        assert!((end - Complex64::new(-1.0, 0.0)).norm() <= 1e-9, "{end}");
    }

    #[test]
    fn harmonic_rotation() {
        let y0 = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let p = OdeProblem::new(rotation_system(), 0.0, PI / 2.0, y0).unwrap();
        let traj = integrate(
            &p,
            &IntegratorConfig::default().with_samples(vec![PI / 2.0]),
        )
        .unwrap();
        let end = &traj.states[0];
        assert!(end[0].norm() <= 1e-9);
        assert!((end[1] + 1.0).norm() <= 1e-9);
    }

    #[test]
    fn dense_output_matches_exact_solution() {
        let samples: Vec<f64> = (0..=400).map(|i| i as f64 * 0.05).collect();
        let p = OdeProblem::new(phase_system(), 0.0, 20.0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let traj = integrate(
            &p,
            &IntegratorConfig::default().with_samples(samples.clone()),
        )
        .unwrap();
        assert_eq!(traj.times, samples);
        for (t, y) in traj.times.iter().zip(&traj.states) {
            let exact = Complex64::cis(-t);
            assert!(
                (y[0] - exact).norm() < 1e-9,
                "t={t}: {}",
                (y[0] - exact).norm()
            );
        }
    }

    #[test]
    fn dense_output_is_high_order() {
        // Force long steps so interpolation error dominates, then compare with
        // step-endpoint accuracy: a degree >= 4 interpolant keeps the gap small.
        let cfg = IntegratorConfig {
            rel_tol: 1e-7,
            abs_tol: 1e-9,
            max_step: Some(10.0),
            ..IntegratorConfig::default()
        };
        let samples: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.01).collect();
        let p = OdeProblem::new(phase_system(), 0.0, 10.0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let traj = integrate(&p, &cfg.with_samples(samples)).unwrap();
        let worst = traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(t, y)| (y[0] - Complex64::cis(-t)).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "worst interpolation error {worst}");
        assert!(traj.stats.accepted_steps < 40, "{:?}", traj.stats);
    }

    #[test]
    fn step_endpoints_without_samples() {
        let p = OdeProblem::new(phase_system(), 0.0, 5.0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let traj = integrate(&p, &IntegratorConfig::default()).unwrap();
        assert_eq!(traj.times[0], 0.0);
        assert_eq!(*traj.times.last().unwrap(), 5.0);
        assert_eq!(traj.times.len(), traj.stats.accepted_steps + 1);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn repeated_and_boundary_samples() {
        let p = OdeProblem::new(phase_system(), 0.0, 1.0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let traj = integrate(
            &p,
            &IntegratorConfig::default().with_samples(vec![0.0, 0.0, 0.5, 1.0]),
        )
        .unwrap();
        assert_eq!(traj.times, vec![0.0, 0.0, 0.5, 1.0]);
        assert_eq!(traj.states[0][0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_bad_samples_and_config() {
        let p = OdeProblem::new(phase_system(), 0.0, 1.0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let bad = IntegratorConfig::default().with_samples(vec![0.5, 0.2]);
        assert!(matches!(
            integrate(&p, &bad),
            Err(Error::InvalidSampleTimes { .. })
        ));
        let outside = IntegratorConfig::default().with_samples(vec![1.5]);
        assert!(matches!(
            integrate(&p, &outside),
            Err(Error::InvalidSampleTimes { .. })
        ));
        let tol = IntegratorConfig::with_tolerances(0.0, 1e-12);
        assert!(matches!(integrate(&p, &tol), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn rejects_bad_problems() {
        assert!(OdeProblem::new(phase_system(), 1.0, 1.0, vec![Complex64::new(1.0, 0.0)]).is_err());
        assert!(OdeProblem::new(phase_system(), 0.0, 1.0, vec![]).is_err());
        assert!(OdeProblem::new(
            phase_system(),
            0.0,
            1.0,
            vec![Complex64::new(f64::NAN, 0.0)]
        )
        .is_err());
    }

    #[test]
    fn non_finite_rhs_is_reported() {
        let sys = FnSystem::new(1, |t: f64, _y: &[Complex64], dy: &mut [Complex64]| {
            dy[0] = if t > 0.5 {
                Complex64::new(f64::NAN, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            };
        });
        let p = OdeProblem::new(sys, 0.0, 1.0, vec![Complex64::new(0.0, 0.0)]).unwrap();
        assert!(matches!(
            integrate(&p, &IntegratorConfig::default()),
            Err(Error::NonFiniteState { .. }) | Err(Error::StepSizeUnderflow { .. })
        ));
    }

    #[test]
    fn finite_time_blowup_underflows() {
        // y' = y^2, y(0) = 1 blows up at t = 1.
        let sys = FnSystem::new(1, |_t, y: &[Complex64], dy: &mut [Complex64]| {
            dy[0] = y[0] * y[0]
        });
        let p = OdeProblem::new(sys, 0.0, 2.0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let err = integrate(&p, &IntegratorConfig::default()).unwrap_err();
        assert!(
            matches!(
                err,
                Error::StepSizeUnderflow { .. } | Error::NonFiniteState { .. }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn observer_error_aborts() {
        let p = OdeProblem::new(phase_system(), 0.0, 1.0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let mut calls = 0;
        let res = integrate_with(&p, &IntegratorConfig::default(), |_, _| {
            calls += 1;
            if calls == 3 {
                Err(Error::WindowLeak {
                    t: 0.0,
                    weight: 1.0,
                })
            } else {
                Ok(())
            }
        });
        assert!(matches!(res, Err(Error::WindowLeak { .. })));
        assert_eq!(calls, 3);
    }
}
