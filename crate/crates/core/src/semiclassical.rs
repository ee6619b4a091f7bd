//! Semiclassical Rabi dynamics: exact integration, the rotating wave
//! approximation, the one-photon intermediate solution, the reduced
//! semianalytic system and the multiphoton closed forms.

use log::warn;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrator::{integrate_sampled, FnSystem, IntegratorConfig, OdeSystem};
use crate::model::{derive_params, ComplexPair, DerivedParams, SemiclassicalParams, TimeSeries};
use crate::special::{bessel_j, bessel_j_signed, BesselOrder, MAX_BESSEL_ORDER};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Result of [`exact_solve`]: the excitation probability and the lab-frame
/// amplitudes at each sample.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    pub probability: TimeSeries,
    pub states: Vec<ComplexPair>,
}

/// Integrates the lab-frame amplitude equations
/// `i c_e' = (Omega/2) c_e + G cos(omega t) c_g` and
/// `i c_g' = -(Omega/2) c_g + G cos(omega t) c_e` from `t = 0`.
pub fn exact_solve(
    p: &SemiclassicalParams,
    initial: ComplexPair,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<ExactSolution> {
    p.validate()?;
    let system = exact_system(p);
    let mut values = Vec::with_capacity(times.len());
    let mut states = Vec::with_capacity(times.len());
    integrate_sampled(
        system,
        vec![initial.lower, initial.upper],
        times,
        cfg,
        |_, y| {
            values.push(y[1].norm_sqr());
            states.push(ComplexPair::new(y[0], y[1]));
            Ok(())
        },
    )?;
    Ok(ExactSolution {
        probability: TimeSeries::new("P_e", times.to_vec(), values)?,
        states,
    })
}

/// Right-hand side of the lab-frame equations over `[c_g, c_e]`.
pub fn exact_system(p: &SemiclassicalParams) -> impl OdeSystem {
    let (w, half, g) = (p.field_freq, 0.5 * p.atomic_freq, p.coupling);
    FnSystem::new(2, move |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let drive = g * (w * t).cos();
        dy[0] = -I * (y[1] * drive - y[0] * half);
        dy[1] = -I * (y[0] * drive + y[1] * half);
    })
}

/// `(G/R)^2 sin^2(R t / 2)`, valid for an atom starting in `|g>`.
pub fn rwa_probability(p: &SemiclassicalParams, t: f64) -> Result<f64> {
    let d = derive_params(p)?;
    let ratio = p.coupling / d.rabi;
    Ok(ratio * ratio * (0.5 * d.rabi * t).sin().powi(2))
}

pub fn rwa_series(p: &SemiclassicalParams, times: &[f64]) -> Result<TimeSeries> {
    let values = times
        .iter()
        .map(|&t| rwa_probability(p, t))
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new("P_e", times.to_vec(), values)
}

/// Amplitudes in the slowly varying basis that diagonalizes the rotating-frame
/// Hamiltonian at zeroth order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalPair {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl DiagonalPair {
    pub const fn new(plus: Complex64, minus: Complex64) -> Self {
        Self { plus, minus }
    }
}

/// Rotating-frame amplitudes from diagonal ones:
/// `C_g = e^{-iRt/2} sqrt(R-/R) A+ + e^{iRt/2} sqrt(R+/R) A-` and
/// `C_e = e^{-iRt/2} sqrt(R+/R) A+ - e^{iRt/2} sqrt(R-/R) A-`.
pub fn from_diagonal(a: DiagonalPair, t: f64, d: &DerivedParams) -> ComplexPair {
    let (sp, sm) = ((d.r_plus / d.rabi).sqrt(), (d.r_minus / d.rabi).sqrt());
    let em = Complex64::cis(-0.5 * d.rabi * t);
    let ep = em.conj();
    ComplexPair::new(
        em * a.plus * sm + ep * a.minus * sp,
        em * a.plus * sp - ep * a.minus * sm,
    )
}

/// Inverse of [`from_diagonal`]; the substitution is unitary.
pub fn to_diagonal(c: ComplexPair, t: f64, d: &DerivedParams) -> DiagonalPair {
    let (sp, sm) = ((d.r_plus / d.rabi).sqrt(), (d.r_minus / d.rabi).sqrt());
    let ep = Complex64::cis(0.5 * d.rabi * t);
    DiagonalPair::new(
        (c.lower * sm + c.upper * sp) * ep,
        (c.lower * sp - c.upper * sm) * ep.conj(),
    )
}

/// `|C_e|^2` reconstructed from diagonal amplitudes.
pub fn excited_probability(a: DiagonalPair, t: f64, d: &DerivedParams) -> f64 {
    from_diagonal(a, t, d).upper.norm_sqr()
}

/// Diagonal amplitudes at `t = 0` for a lab-frame initial state.
pub fn diagonal_initial(c: ComplexPair, d: &DerivedParams) -> DiagonalPair {
    to_diagonal(c, 0.0, d)
}

/// Constants of the zero-detuning intermediate solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntermediateCoefficients {
    /// `sqrt(1 + J_1(Upsilon)^2)`.
    pub s: f64,
    pub j1: f64,
    pub b1: Complex64,
    pub b2: Complex64,
}

impl IntermediateCoefficients {
    pub fn new(j1: f64, initial: ComplexPair) -> Self {
        let s = (1.0 + j1 * j1).sqrt();
        let norm = 2.0 * std::f64::consts::SQRT_2 * s;
        let (cg, ce) = (initial.lower, initial.upper);
        Self {
            s,
            j1,
            b1: (cg * (s - 1.0 + j1) + ce * (s - 1.0 - j1)) / norm,
            b2: (cg * (s + 1.0 - j1) + ce * (s + 1.0 + j1)) / norm,
        }
    }

    /// `(a+, a-)` at time `t` for coupling `g`.
    pub fn amplitudes(&self, g: f64, t: f64) -> (Complex64, Complex64) {
        let fast = Complex64::cis(0.5 * g * self.s * t);
        let slow = Complex64::cis(0.5 * g * t);
        let a_plus = slow * (self.b1 * fast + self.b2 * fast.conj());
        let a_minus = slow.conj() / self.j1
            * (self.b1 * (1.0 + self.s) * fast + self.b2 * (1.0 - self.s) * fast.conj());
        (a_plus, a_minus)
    }
}

/// Zero-detuning closed-form solution that keeps the leading counter-rotating
/// correction through `J_1(Upsilon)`.
pub fn intermediate_solve(
    p: &SemiclassicalParams,
    initial: ComplexPair,
    times: &[f64],
) -> Result<TimeSeries> {
    let d = derive_params(p)?;
    if d.detuning != 0.0 {
        return Err(Error::NotApplicable(
            "the intermediate solution is derived for zero detuning only".into(),
        ));
    }
    let j1 = bessel_j(BesselOrder::new(1)?, d.upsilon)?;
    let coeffs = IntermediateCoefficients::new(j1, initial);
    let (g, w) = (p.coupling, p.field_freq);
    let values = times
        .iter()
        .map(|&t| {
            let (ap, am) = coeffs.amplitudes(g, t);
            let phase = Complex64::cis(-(d.upsilon * (2.0 * w * t).sin() + g * t));
            0.5 * (phase * ap - am).norm_sqr()
        })
        .collect();
    TimeSeries::new("P_e", times.to_vec(), values)
}

/// Coupling function used by [`semianalytic_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QtMode {
    /// `Q = (G/2R) e^{iRt} e^{i Upsilon sin 2wt} (R+ e^{2iwt} - R- e^{-2iwt})`, no approximation.
    Full,
    /// Zero-detuning form keeping only `J_0`, `J_1`, `J_2`.
    OnePhotonTruncated,
}

/// Integrates the reduced system `a+' = -i Q a-`, `a-' = -i Q* a+` and maps
/// back through `A+- = e^{-+ i Upsilon sin(2wt)/2} a+-`.
pub fn semianalytic_solve(
    p: &SemiclassicalParams,
    initial: ComplexPair,
    times: &[f64],
    mode: QtMode,
    cfg: &IntegratorConfig,
) -> Result<TimeSeries> {
    let d = derive_params(p)?;
    let (w, g, u) = (p.field_freq, p.coupling, d.upsilon);
    let coupling: Box<dyn Fn(f64) -> Complex64> = match mode {
        QtMode::Full => {
            let (r, rp, rm) = (d.rabi, d.r_plus, d.r_minus);
            Box::new(move |t: f64| {
                let e2 = Complex64::cis(2.0 * w * t);
                Complex64::cis(r * t + u * (2.0 * w * t).sin())
                    * (e2 * rp - e2.conj() * rm)
                    * (g / (2.0 * r))
            })
        }
        QtMode::OnePhotonTruncated => {
            if d.detuning != 0.0 {
                return Err(Error::NotApplicable(
                    "the truncated coupling is derived for zero detuning only".into(),
                ));
            }
            if u > 0.3 {
                warn!("Upsilon = {u:.3} is not small; the truncated coupling is unreliable");
            }
            let j: Vec<f64> = (0..3)
                .map(|n| bessel_j(BesselOrder::new(n)?, u))
                .collect::<Result<_>>()?;
            Box::new(move |t: f64| {
                I * (0.5 * g)
                    * (Complex64::new((j[0] - j[2]) * (2.0 * w * t).sin(), 0.0) + I * j[1])
                    * Complex64::cis(g * t)
            })
        }
    };
    let system = FnSystem::new(2, move |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let q = coupling(t);
        dy[0] = -I * q * y[1];
        dy[1] = -I * q.conj() * y[0];
    });
    let a0 = diagonal_initial(initial, &d);
    let mut values = Vec::with_capacity(times.len());
    integrate_sampled(system, vec![a0.plus, a0.minus], times, cfg, |t, y| {
        let wobble = Complex64::cis(0.5 * u * (2.0 * w * t).sin());
        let a = DiagonalPair::new(y[0] * wobble.conj(), y[1] * wobble);
        values.push(excited_probability(a, t, &d));
        Ok(())
    })?;
    TimeSeries::new("P_e", times.to_vec(), values)
}

/// Multiphoton quantities for the `(2K+1)`-photon resonance.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceData {
    pub k: u32,
    /// `Lambda_n` for `n = 0..=n_max`.
    pub lambda: Vec<f64>,
    /// `L_k` for `k = 1..=n_max`, stored at index `k - 1`.
    pub l: Vec<f64>,
    pub delta: f64,
    /// `2 omega + R`.
    pub f1: f64,
    /// `L_K`.
    pub l_k: f64,
    /// `R + 2 delta - 2 omega K`.
    pub x_k: f64,
    /// `sqrt(L_K^2 + X_K^2 / 4)`.
    pub theta_k: f64,
    /// `omega + sqrt(4 (omega K - delta)^2 - G^2)` for this `delta`; `None` when
    /// the radicand is negative.
    pub omega_k: Option<f64>,
    /// `pi / (2 |L_K|)`.
    pub t_k: f64,
    /// `4 |L_K|`.
    pub linewidth: f64,
}

impl ResonanceData {
    pub fn n_max(&self) -> usize {
        self.l.len()
    }

    /// `L_k` for `1 <= k <= n_max`.
    pub fn l_at(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.l.get(i)).copied()
    }

    /// Copy with `X_K` replaced, e.g. to probe the line shape.
    pub fn with_detuning(&self, x_k: f64) -> Self {
        Self {
            x_k,
            theta_k: self.l_k.hypot(0.5 * x_k),
            ..self.clone()
        }
    }
}

fn coefficient_series(
    p: &SemiclassicalParams,
    d: &DerivedParams,
    n_max: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if n_max + 1 > MAX_BESSEL_ORDER as usize {
        return Err(Error::OrderTooLarge(n_max as u32 + 1));
    }
    let j: Vec<f64> = (0..=n_max as i64 + 1)
        .map(|n| bessel_j_signed(n, d.upsilon))
        .collect::<Result<_>>()?;
    let jj = |n: i64| {
        if n < 0 {
            bessel_j_signed(n, d.upsilon)
        } else {
            Ok(j[n as usize])
        }
    };
    let scale = p.coupling / (2.0 * d.rabi);
    let mut lambda = vec![-0.5 * p.coupling * j[1]];
    let mut l = Vec::with_capacity(n_max);
    for n in 1..=n_max as i64 {
        lambda.push(scale * (d.r_plus * jj(n - 1)? - d.r_minus * jj(n + 1)?));
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        l.push(sign * scale * (d.r_plus * jj(n + 1)? - d.r_minus * jj(n - 1)?));
    }
    Ok((lambda, l))
}

/// Coefficients `Lambda_n`, `L_k` and the derived resonance quantities for index `K`.
pub fn resonance_coefficients(
    p: &SemiclassicalParams,
    k: u32,
    n_max: usize,
) -> Result<ResonanceData> {
    if k == 0 {
        return Err(Error::InvalidParams(
            "resonance index K must be at least 1".into(),
        ));
    }
    if n_max < k as usize + 2 {
        return Err(Error::InvalidParams(format!(
            "n_max = {n_max} must be at least K + 2"
        )));
    }
    let d = derive_params(p)?;
    if d.detuning < 3.0 * p.coupling {
        warn!(
            "detuning {:.4} is not large compared with G = {:.4}; multiphoton formulas are approximate",
            d.detuning, p.coupling
        );
    }
    let (lambda, l) = coefficient_series(p, &d, n_max)?;
    let kk = k as usize;

    let sum: f64 = lambda.iter().map(|x| x * x).sum::<f64>()
        + l.iter()
            .enumerate()
            .filter(|(i, _)| i + 1 != kk)
            .map(|(_, x)| x * x)
            .sum::<f64>();
    let tail = lambda[n_max].powi(2)
        + if n_max == kk {
            0.0
        } else {
            l[n_max - 1].powi(2)
        };
    if tail > 1e-6 * sum {
        return Err(Error::SeriesNotConverged { n_max });
    }

    let w = p.field_freq;
    let f1 = 2.0 * w + d.rabi;
    // (sqrt(f1^2 + 4S) - f1)/2 without cancellation
    let delta = 2.0 * sum / ((f1 * f1 + 4.0 * sum).sqrt() + f1);
    let l_k = l[kk - 1];
    let x_k = d.rabi + 2.0 * delta - 2.0 * w * f64::from(k);
    let radicand = 4.0 * (w * f64::from(k) - delta).powi(2) - p.coupling * p.coupling;
    Ok(ResonanceData {
        k,
        lambda,
        l,
        delta,
        f1,
        l_k,
        x_k,
        theta_k: l_k.hypot(0.5 * x_k),
        omega_k: (radicand > 0.0).then(|| w + radicand.sqrt()),
        t_k: std::f64::consts::FRAC_PI_2 / l_k.abs(),
        linewidth: 4.0 * l_k.abs(),
    })
}

/// [`resonance_coefficients`] starting at `n_max = K + 10`, doubled until the
/// series converges.
pub fn resonance_coefficients_auto(p: &SemiclassicalParams, k: u32) -> Result<ResonanceData> {
    let cap = MAX_BESSEL_ORDER as usize - 1;
    let mut n_max = (k as usize + 10).min(cap);
    loop {
        match resonance_coefficients(p, k, n_max) {
            Err(Error::SeriesNotConverged { .. }) if n_max < cap => n_max = (2 * n_max).min(cap),
            other => return other,
        }
    }
}

/// Frequency shift `delta` from the exact root of the quadratic.
pub fn frequency_shift(p: &SemiclassicalParams, k: u32, n_max: usize) -> Result<f64> {
    Ok(resonance_coefficients(p, k, n_max)?.delta)
}

/// Self-consistent `Omega_K = omega + sqrt(4 (omega K - delta)^2 - G^2)`.
///
/// `delta` depends on `Omega` through `R`, so the formula is iterated from
/// `delta = 0` until `Omega_K` moves by less than `1e-8 omega`.
pub fn resonant_frequency(field_freq: f64, coupling: f64, k: u32) -> Result<f64> {
    const MAX_ITER: usize = 100;
    if k == 0 {
        return Err(Error::InvalidParams(
            "resonance index K must be at least 1".into(),
        ));
    }
    let w = field_freq;
    let mut delta = 0.0;
    let mut omega_k = f64::NAN;
    for _ in 0..MAX_ITER {
        let radicand = 4.0 * (w * f64::from(k) - delta).powi(2) - coupling * coupling;
        if !(radicand > 0.0) {
            return Err(Error::NoResonance { k });
        }
        let next = w + radicand.sqrt();
        if (next - omega_k).abs() < 1e-8 * w {
            return Ok(next);
        }
        omega_k = next;
        let p = SemiclassicalParams::new(w, omega_k, coupling)?;
        delta = resonance_coefficients_auto(&p, k)?.delta;
    }
    Err(Error::NoConvergence(MAX_ITER))
}

/// Constants of the multiphoton solution, written as
/// `A+ ~ S1 e^{i Theta t} + S2 e^{-i Theta t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiphotonCoefficients {
    pub s1: Complex64,
    pub s2: Complex64,
}

impl MultiphotonCoefficients {
    pub fn new(data: &ResonanceData, initial: DiagonalPair) -> Self {
        let (th, x, l) = (data.theta_k, data.x_k, data.l_k);
        let (ap, am) = (initial.plus, initial.minus);
        Self {
            s1: (ap * (th - 0.5 * x) - am * l) / (2.0 * th),
            s2: (ap * (th + 0.5 * x) + am * l) / (2.0 * th),
        }
    }

    /// Bracket of `A+` without its fast phase factors.
    pub fn plus_envelope(&self, theta: f64, t: f64) -> Complex64 {
        let e = Complex64::cis(theta * t);
        self.s1 * e + self.s2 * e.conj()
    }
}

/// Solution of [`multiphoton_solve`].
#[derive(Debug, Clone)]
pub struct MultiphotonSolution {
    /// `P_e ~ |A+ - (G/2Delta) e^{iRt} A-|^2`.
    pub probability: TimeSeries,
    /// `|A+|^2`, the population of the upper diagonal branch.
    pub upper_branch: TimeSeries,
    pub amplitudes: Vec<DiagonalPair>,
}

/// Closed-form diagonal amplitudes at time `t`.
pub fn multiphoton_amplitudes(
    data: &ResonanceData,
    upsilon: f64,
    field_freq: f64,
    initial: DiagonalPair,
    t: f64,
) -> DiagonalPair {
    let (th, x, l, delta) = (data.theta_k, data.x_k, data.l_k, data.delta);
    let (c, s_over) = if th > 0.0 {
        ((th * t).cos(), (th * t).sin() / th)
    } else {
        (1.0, t)
    };
    let (ap, am) = (initial.plus, initial.minus);
    let wobble = Complex64::cis(0.5 * upsilon * (2.0 * field_freq * t).sin());
    let drift = Complex64::cis((0.5 * x - delta) * t);
    let plus =
        wobble.conj() * drift * (ap * Complex64::new(c, -0.5 * x * s_over) - I * am * (l * s_over));
    let minus =
        wobble * drift.conj() * (am * Complex64::new(c, 0.5 * x * s_over) - I * ap * (l * s_over));
    DiagonalPair::new(plus, minus)
}

/// Evaluates the multiphoton closed forms for resonance index `data.k`.
pub fn multiphoton_solve(
    p: &SemiclassicalParams,
    data: &ResonanceData,
    initial: DiagonalPair,
    times: &[f64],
) -> Result<MultiphotonSolution> {
    let d = derive_params(p)?;
    if d.detuning <= 0.0 {
        return Err(Error::NotApplicable(
            "multiphoton solutions need positive detuning".into(),
        ));
    }
    if d.detuning < 3.0 * p.coupling {
        warn!("detuning is not large compared with G; the multiphoton probability is approximate");
    }
    let ratio = p.coupling / (2.0 * d.detuning);
    let mut pe = Vec::with_capacity(times.len());
    let mut upper = Vec::with_capacity(times.len());
    let mut amps = Vec::with_capacity(times.len());
    for &t in times {
        let a = multiphoton_amplitudes(data, d.upsilon, p.field_freq, initial, t);
        pe.push((a.plus - Complex64::cis(d.rabi * t) * a.minus * ratio).norm_sqr());
        upper.push(a.plus.norm_sqr());
        amps.push(a);
    }
    Ok(MultiphotonSolution {
        probability: TimeSeries::new("P_e", times.to_vec(), pe)?,
        upper_branch: TimeSeries::new("A_plus_sq", times.to_vec(), upper)?,
        amplitudes: amps,
    })
}

/// One row of the multiphoton resonance table, in units of `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceRow {
    pub k: u32,
    pub omega_k: f64,
    pub l_k_abs: f64,
    /// `omega T_K`.
    pub t_k: f64,
    pub delta: f64,
    pub linewidth: f64,
}

/// Resonance parameters for each `K` at coupling `G/omega`.
pub fn resonance_table(coupling_ratio: f64, ks: &[u32]) -> Result<Vec<ResonanceRow>> {
    if !(coupling_ratio > 0.0 && coupling_ratio < 1.0) {
        return Err(Error::InvalidParams("G/omega must lie in (0, 1)".into()));
    }
    ks.iter()
        .map(|&k| {
            let omega_k = resonant_frequency(1.0, coupling_ratio, k)?;
            let data = resonance_coefficients_auto(
                &SemiclassicalParams::new(1.0, omega_k, coupling_ratio)?,
                k,
            )?;
            Ok(ResonanceRow {
                k,
                omega_k,
                l_k_abs: data.l_k.abs(),
                t_k: data.t_k,
                delta: data.delta,
                linewidth: data.linewidth,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::linspace;
    use std::f64::consts::PI;

    fn params(omega: f64, g: f64) -> SemiclassicalParams {
        SemiclassicalParams::new(1.0, omega, g).unwrap()
    }

    #[test]
    fn rwa_examples() {
        let p = params(1.0, 0.1);
        assert!((rwa_probability(&p, PI / 0.1).unwrap() - 1.0).abs() < 1e-15);
        let p = params(1.1, 0.1);
        let r = 0.02f64.sqrt();
        assert!((rwa_probability(&p, PI / r).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(
            rwa_probability(&params(1.0, 0.0), 1.0),
            Err(Error::DegenerateParams)
        );
    }

    #[test]
    fn decoupled_atom_stays_down() {
        let sol = exact_solve(
            &params(1.3, 0.0),
            ComplexPair::ground(),
            &linspace(0.0, 50.0, 11),
            &Default::default(),
        )
        .unwrap();
        assert!(sol.probability.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn diagonal_substitution_at_zero_detuning() {
        let d = derive_params(&params(1.0, 0.2)).unwrap();
        let a = diagonal_initial(ComplexPair::ground(), &d);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a.plus - h).norm() < 1e-15 && (a.minus - h).norm() < 1e-15);
    }

    #[test]
    fn intermediate_starts_from_initial_state() {
        let p = params(1.0, PI / 50.0);
        let c = ComplexPair::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let ts = intermediate_solve(&p, c, &[0.0]).unwrap();
        assert!((ts.values()[0] - 0.64).abs() < 1e-14);
        let off = params(1.2, 0.1);
        assert!(matches!(
            intermediate_solve(&off, c, &[0.0]),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn intermediate_coefficients_reconstruct_start() {
        // a+(0) = A+(0) and a-(0) = A-(0), which are both 1/sqrt(2) from |g>.
        let c = IntermediateCoefficients::new(0.05, ComplexPair::ground());
        let (ap, am) = c.amplitudes(0.1, 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((ap - h).norm() < 1e-15 && (am - h).norm() < 1e-15);
        assert!(c.s >= 1.0);
    }

    #[test]
    fn coefficients_vanish_without_coupling() {
        let data = resonance_coefficients(&params(3.0, 0.0), 1, 12).unwrap();
        assert!(data.lambda.iter().chain(&data.l).all(|&x| x == 0.0));
        assert_eq!(data.delta, 0.0);
        assert_eq!(data.omega_k, Some(3.0));
    }

    #[test]
    fn lambda_zero_matches_definition() {
        let p = params(2.98497, 0.2);
        let data = resonance_coefficients(&p, 1, 12).unwrap();
        let d = derive_params(&p).unwrap();
        let j1 = bessel_j(BesselOrder::new(1).unwrap(), d.upsilon).unwrap();
        assert_eq!(data.lambda[0], -0.1 * j1);
        assert_eq!(data.linewidth, 4.0 * data.l_k.abs());
        assert!(data.theta_k >= data.l_k.abs() && data.theta_k >= 0.5 * data.x_k.abs());
    }

    #[test]
    fn first_order_shift_agrees_with_root() {
        let p = params(2.98497, 0.2);
        let data = resonance_coefficients(&p, 1, 12).unwrap();
        let sum: f64 = data.lambda.iter().map(|x| x * x).sum::<f64>()
            + data.l.iter().skip(1).map(|x| x * x).sum::<f64>();
        assert!(sum <= 1e-3 * data.f1 * data.f1);
        let first = sum / data.f1;
        assert!((first - data.delta).abs() <= 0.01 * data.delta);
    }

    #[test]
    fn rejects_bad_resonance_requests() {
        let p = params(3.0, 0.2);
        assert!(resonance_coefficients(&p, 0, 10).is_err());
        assert!(resonance_coefficients(&p, 3, 4).is_err());
        assert!(matches!(
            resonance_coefficients(&p, 1, 200),
            Err(Error::OrderTooLarge(_))
        ));
        assert!(matches!(
            resonant_frequency(1.0, 2.5, 1),
            Err(Error::NoResonance { k: 1 })
        ));
    }

    #[test]
    fn bare_resonance_without_coupling() {
        assert_eq!(resonant_frequency(1.0, 0.0, 2).unwrap(), 5.0);
    }

    #[test]
    fn multiphoton_initial_condition() {
        let p = params(2.98497, 0.2);
        let data = resonance_coefficients_auto(&p, 1).unwrap();
        let a0 = DiagonalPair::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        let sol = multiphoton_solve(&p, &data, a0, &[0.0]).unwrap();
        assert_eq!(sol.amplitudes[0], a0);
    }

    #[test]
    fn envelope_forms_agree() {
        let p = params(2.98497, 0.2);
        let data = resonance_coefficients_auto(&p, 1)
            .unwrap()
            .with_detuning(3e-4);
        let d = derive_params(&p).unwrap();
        let a0 = diagonal_initial(ComplexPair::ground(), &d);
        let c = MultiphotonCoefficients::new(&data, a0);
        assert!((c.s1 + c.s2 - a0.plus).norm() < 1e-15);
        for t in [0.0, 10.0, 1234.5, 9000.0] {
            let a = multiphoton_amplitudes(&data, d.upsilon, 1.0, a0, t);
            let phase = Complex64::cis(
                -0.5 * d.upsilon * (2.0 * t).sin() + (0.5 * data.x_k - data.delta) * t,
            );
            let b = phase * c.plus_envelope(data.theta_k, t);
            assert!((a.plus - b).norm() < 1e-12, "t={t}");
        }
    }
}
