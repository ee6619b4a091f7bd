//! Quantum Rabi dynamics on a truncated Fock window.
//!
//! The state is `sum_n A_n |g, n> + B_n |e, n>` in the interaction picture
//! with respect to the free field, so the amplitudes obey
//! `i A_m' = -(Omega/2) A_m + g (e^{-iwt} sqrt(m+1) B_{m+1} + e^{iwt} sqrt(m) B_{m-1})`
//! and the same with `A`, `B` exchanged and the sign of the first term flipped.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::integrator::{integrate_sampled, IntegratorConfig, OdeSystem};
use crate::model::{SemiclassicalParams, TimeSeries};

/// Default Poisson tail weight below which Fock states are dropped.
pub const DEFAULT_TAIL_CUTOFF: f64 = 1e-30;
/// Largest boundary population tolerated during a run.
pub const MAX_BOUNDARY_WEIGHT: f64 = 1e-20;
/// Upper bound of the window used for the vacuum.
pub const VACUUM_WINDOW_TOP: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumParams {
    pub field_freq: f64,
    pub atomic_freq: f64,
    /// Single-photon coupling `g`.
    pub coupling: f64,
    /// Real coherent amplitude `beta`.
    pub beta: f64,
}

impl QuantumParams {
    pub fn new(field_freq: f64, atomic_freq: f64, coupling: f64, beta: f64) -> Result<Self> {
        let p = Self {
            field_freq,
            atomic_freq,
            coupling,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with the semiclassical coupling `G = 2 g beta` held fixed.
    pub fn from_semiclassical(p: &SemiclassicalParams, beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParams(
                "beta must be positive to match a semiclassical G".into(),
            ));
        }
        Self::new(p.field_freq, p.atomic_freq, p.coupling / (2.0 * beta), beta)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.field_freq, self.atomic_freq, self.coupling, self.beta]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if self.field_freq <= 0.0 || self.atomic_freq <= 0.0 {
            return Err(Error::InvalidParams("frequencies must be positive".into()));
        }
        if self.coupling < 0.0 || self.beta < 0.0 {
            return Err(Error::InvalidParams(
                "g and beta must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// `G = 2 g beta`.
    pub fn semiclassical_coupling(&self) -> f64 {
        2.0 * self.coupling * self.beta
    }

    pub fn semiclassical(&self) -> Result<SemiclassicalParams> {
        SemiclassicalParams::new(
            self.field_freq,
            self.atomic_freq,
            self.semiclassical_coupling(),
        )
    }
}

/// Inclusive range `[n1, n2]` of retained Fock states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockWindow {
    pub n1: usize,
    pub n2: usize,
}

impl FockWindow {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n2 < n1 {
            return Err(Error::InvalidParams(format!(
                "empty Fock window [{n1}, {n2}]"
            )));
        }
        Ok(Self { n1, n2 })
    }

    pub fn len(&self) -> usize {
        self.n2 - self.n1 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn photon_numbers(&self) -> impl Iterator<Item = usize> {
        self.n1..=self.n2
    }
}

/// `ln(e^{-beta^2} beta^{2n} / n!)`.
pub fn poisson_log_weight(beta: f64, n: usize) -> f64 {
    let nf = n as f64;
    if beta == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -beta * beta + 2.0 * nf * beta.ln() - ln_gamma(nf + 1.0)
}

/// `e^{-beta^2/2} beta^n / sqrt(n!)`, evaluated in the log domain.
pub fn coherent_amplitude(beta: f64, n: usize) -> f64 {
    (0.5 * poisson_log_weight(beta, n)).exp()
}

/// Smallest window outside of which every Fock state has Poisson weight below
/// `tail_cutoff`. The vacuum gets `[0, 5]`.
pub fn compute_window(beta: f64, tail_cutoff: f64) -> Result<FockWindow> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParams(
            "beta must be finite and non-negative".into(),
        ));
    }
    if !(tail_cutoff > 0.0 && tail_cutoff < 1.0) {
        return Err(Error::InvalidParams(
            "tail cutoff must lie in (0, 1)".into(),
        ));
    }
    if beta == 0.0 {
        return FockWindow::new(0, VACUUM_WINDOW_TOP);
    }
    // The weights are unimodal with their peak at floor(beta^2).
    let mode = (beta * beta).floor() as usize;
    let cut = tail_cutoff.ln();
    let mut n1 = mode;
    while n1 > 0 && poisson_log_weight(beta, n1 - 1) >= cut {
        n1 -= 1;
    }
    let mut n2 = mode;
    while poisson_log_weight(beta, n2 + 1) >= cut {
        n2 += 1;
    }
    FockWindow::new(n1, n2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomState {
    Ground,
    Excited,
}

/// Amplitudes `A_n` (atom in `|g>`) and `B_n` (atom in `|e>`) for `n` in the
/// window, stored at offset `n - n1`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub window: FockWindow,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl QuantumState {
    pub fn new(window: FockWindow, a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self> {
        if a.len() != window.len() || b.len() != window.len() {
            return Err(Error::InvalidParams(format!(
                "amplitude arrays of length {} and {} do not fit a window of {} states",
                a.len(),
                b.len(),
                window.len()
            )));
        }
        Ok(Self { window, a, b })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.iter().chain(&self.b).map(|z| z.norm_sqr()).sum()
    }

    /// `p_n = |A_n|^2 + |B_n|^2` over the window.
    pub fn photon_distribution(&self) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect()
    }

    /// Population in the outermost Fock states. The lower edge is ignored when
    /// it is the vacuum, which is a true boundary.
    pub fn boundary_weight(&self) -> f64 {
        let last = self.a.len() - 1;
        let mut w = self.a[last].norm_sqr() + self.b[last].norm_sqr();
        if self.window.n1 > 0 {
            w += self.a[0].norm_sqr() + self.b[0].norm_sqr();
        }
        w
    }

    fn write_from(&mut self, y: &[Complex64]) {
        let d = self.a.len();
        self.a.copy_from_slice(&y[..d]);
        self.b.copy_from_slice(&y[d..]);
    }
}

/// Coherent field `|beta>` restricted to `window` and renormalized, with the
/// atom in `atom`.
pub fn coherent_initial(beta: f64, window: FockWindow, atom: AtomState) -> Result<QuantumState> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParams(
            "beta must be finite and non-negative".into(),
        ));
    }
    let mut field: Vec<Complex64> = window
        .photon_numbers()
        .map(|n| Complex64::new(coherent_amplitude(beta, n), 0.0))
        .collect();
    let norm = field.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::InvalidParams(format!(
            "window [{}, {}] holds no weight of the coherent state",
            window.n1, window.n2
        )));
    }
    field.iter_mut().for_each(|z| *z /= norm);
    let zeros = vec![Complex64::new(0.0, 0.0); window.len()];
    let (a, b) = match atom {
        AtomState::Ground => (field, zeros),
        AtomState::Excited => (zeros, field),
    };
    QuantumState::new(window, a, b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumObservables {
    pub p_e: f64,
    pub n_mean: f64,
    /// Probability of finding the field in the initial coherent state.
    pub p_beta: f64,
    pub p_n: Vec<f64>,
}

/// Scalar observables without the photon distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableSummary {
    pub p_e: f64,
    pub n_mean: f64,
    pub p_beta: f64,
    pub norm: f64,
    pub boundary_weight: f64,
}

pub fn summarize(state: &QuantumState, beta: f64) -> ObservableSummary {
    let mut p_e = 0.0;
    let mut n_mean = 0.0;
    let mut norm = 0.0;
    let mut overlap_a = Complex64::new(0.0, 0.0);
    let mut overlap_b = Complex64::new(0.0, 0.0);
    for ((n, a), b) in state.window.photon_numbers().zip(&state.a).zip(&state.b) {
        let (pa, pb) = (a.norm_sqr(), b.norm_sqr());
        p_e += pb;
        norm += pa + pb;
        n_mean += n as f64 * (pa + pb);
        let c = coherent_amplitude(beta, n);
        overlap_a += a * c;
        overlap_b += b * c;
    }
    ObservableSummary {
        p_e,
        n_mean,
        p_beta: overlap_a.norm_sqr() + overlap_b.norm_sqr(),
        norm,
        boundary_weight: state.boundary_weight(),
    }
}

pub fn observables(state: &QuantumState, beta: f64) -> QuantumObservables {
    let s = summarize(state, beta);
    QuantumObservables {
        p_e: s.p_e,
        n_mean: s.n_mean,
        p_beta: s.p_beta,
        p_n: state.photon_distribution(),
    }
}

/// `Delta p_n = p_n(t) - p_n(0)`.
pub fn distribution_delta(state_t: &QuantumState, state_0: &QuantumState) -> Result<Vec<f64>> {
    let (w, w0) = (state_t.window, state_0.window);
    if w != w0 {
        return Err(Error::WindowMismatch(w.n1, w.n2, w0.n1, w0.n2));
    }
    Ok(state_t
        .photon_distribution()
        .iter()
        .zip(state_0.photon_distribution())
        .map(|(p, p0)| p - p0)
        .collect())
}

/// Banded right-hand side over `y = [A; B]`.
struct FockSystem {
    dim: usize,
    half_omega: f64,
    g: f64,
    w: f64,
    /// `sqrt(n1 + j)` for `j = 0..=dim`.
    sqrt_n: Vec<f64>,
}

impl FockSystem {
    fn new(qp: &QuantumParams, window: FockWindow) -> Self {
        let dim = window.len();
        Self {
            dim,
            half_omega: 0.5 * qp.atomic_freq,
            g: qp.coupling,
            w: qp.field_freq,
            sqrt_n: (0..=dim).map(|j| ((window.n1 + j) as f64).sqrt()).collect(),
        }
    }
}

#[inline]
fn band_sweep(
    out: &mut [Complex64],
    own: &[Complex64],
    other: &[Complex64],
    sqrt_n: &[f64],
    diag: Complex64,
    down: Complex64,
    up: Complex64,
) {
    // out_j = diag own_j + down sqrt(n_j + 1) other_{j+1} + up sqrt(n_j) other_{j-1}
    let d = own.len();
    for j in 0..d {
        let mut acc = diag * own[j];
        if j + 1 < d {
            acc += down * (sqrt_n[j + 1] * other[j + 1]);
        }
        if j > 0 {
            acc += up * (sqrt_n[j] * other[j - 1]);
        }
        out[j] = acc;
    }
}

impl OdeSystem for FockSystem {
    fn dimension(&self) -> usize {
        2 * self.dim
    }

    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let (a, b) = y.split_at(self.dim);
        let (da, db) = dy.split_at_mut(self.dim);
        // -i g e^{-iwt} and -i g e^{iwt}
        let e = Complex64::cis(-self.w * t);
        let down = Complex64::new(e.im, -e.re) * self.g;
        let up = Complex64::new(-e.im, -e.re) * self.g;
        let i_half = Complex64::new(0.0, self.half_omega);
        band_sweep(da, a, b, &self.sqrt_n, i_half, down, up);
        band_sweep(db, b, a, &self.sqrt_n, -i_half, down, up);
    }
}

/// Integrates from `initial` at `t = 0`, handing the state at each sample time
/// to `observer`. The state buffer is reused between calls.
pub fn quantum_solve_with<F>(
    qp: &QuantumParams,
    initial: &QuantumState,
    times: &[f64],
    cfg: &IntegratorConfig,
    mut observer: F,
) -> Result<()>
where
    F: FnMut(f64, &QuantumState) -> Result<()>,
{
    qp.validate()?;
    let window = initial.window;
    QuantumState::new(window, initial.a.clone(), initial.b.clone())?;
    let system = FockSystem::new(qp, window);
    let mut y0 = initial.a.clone();
    y0.extend_from_slice(&initial.b);
    let mut buffer = initial.clone();
    integrate_sampled(system, y0, times, cfg, |t, y| {
        buffer.write_from(y);
        let weight = buffer.boundary_weight();
        if weight > MAX_BOUNDARY_WEIGHT {
            return Err(Error::WindowLeak { t, weight });
        }
        observer(t, &buffer)
    })?;
    Ok(())
}

/// Full trajectory of states. Long runs on large windows should use
/// [`quantum_solve_with`] instead.
pub fn quantum_solve(
    qp: &QuantumParams,
    initial: &QuantumState,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<QuantumState>> {
    let mut out = Vec::with_capacity(times.len());
    quantum_solve_with(qp, initial, times, cfg, |_, s| {
        out.push(s.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Sampled scalar observables of a quantum run.
#[derive(Debug, Clone)]
pub struct QuantumSeries {
    pub p_e: TimeSeries,
    pub n_mean: TimeSeries,
    pub p_beta: TimeSeries,
    /// Largest `|norm - 1|` over the samples.
    pub norm_drift: f64,
}

pub fn quantum_observe(
    qp: &QuantumParams,
    initial: &QuantumState,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<QuantumSeries> {
    let n = times.len();
    let (mut pe, mut nm, mut pb) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    let mut drift: f64 = 0.0;
    quantum_solve_with(qp, initial, times, cfg, |_, s| {
        let o = summarize(s, qp.beta);
        pe.push(o.p_e);
        nm.push(o.n_mean);
        pb.push(o.p_beta);
        drift = drift.max((o.norm - 1.0).abs());
        Ok(())
    })?;
    Ok(QuantumSeries {
        p_e: TimeSeries::new("P_e", times.to_vec(), pe)?,
        n_mean: TimeSeries::new("n_mean", times.to_vec(), nm)?,
        p_beta: TimeSeries::new("P_beta", times.to_vec(), pb)?,
        norm_drift: drift,
    })
}
