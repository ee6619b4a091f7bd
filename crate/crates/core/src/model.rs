//! Model parameters and state representations shared by every solver.
//!
//! Frequencies are stored as raw angular frequencies; nothing here assumes
//! `omega = 1`. Callers working in dimensionless units simply pass ratios.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Parameters of the driven two-level atom `H = (Omega/2) sz + G cos(omega t) sx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalParams {
    /// Field angular frequency `omega`.
    pub field_freq: f64,
    /// Atomic transition frequency `Omega`.
    pub atomic_freq: f64,
    /// Semiclassical coupling `G`.
    pub coupling: f64,
}

impl SemiclassicalParams {
    pub fn new(field_freq: f64, atomic_freq: f64, coupling: f64) -> Result<Self> {
        let p = Self {
            field_freq,
            atomic_freq,
            coupling,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters from the dimensionless ratios `Omega/omega` and `G/omega`
    /// with `omega = 1`.
    pub fn from_ratios(atomic_ratio: f64, coupling_ratio: f64) -> Result<Self> {
        Self::new(1.0, atomic_ratio, coupling_ratio)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = self.field_freq.is_finite()
            && self.atomic_freq.is_finite()
            && self.coupling.is_finite();
        if !all_finite {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if self.field_freq <= 0.0 {
            return Err(Error::InvalidParams(
                "field frequency must be positive".into(),
            ));
        }
        if self.atomic_freq <= 0.0 {
            return Err(Error::InvalidParams(
                "atomic frequency must be positive".into(),
            ));
        }
        if self.coupling < 0.0 {
            return Err(Error::InvalidParams("coupling must be non-negative".into()));
        }
        Ok(())
    }

    pub fn detuning(&self) -> f64 {
        self.atomic_freq - self.field_freq
    }

    pub fn derive(&self) -> Result<DerivedParams> {
        derive_params(self)
    }
}

/// Quantities derived from [`SemiclassicalParams`] that every analytic formula uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// `Delta = Omega - omega`.
    pub detuning: f64,
    /// `R = sqrt(G^2 + Delta^2)`.
    pub rabi: f64,
    /// `R+ = (R + Delta) / 2`.
    pub r_plus: f64,
    /// `R- = (R - Delta) / 2`.
    pub r_minus: f64,
    /// Dimensionless `Upsilon = G^2 / (2 omega R)`, the Bessel argument.
    pub upsilon: f64,
}

pub fn derive_params(p: &SemiclassicalParams) -> Result<DerivedParams> {
    p.validate()?;
    let detuning = p.detuning();
    let rabi = p.coupling.hypot(detuning);
    if rabi == 0.0 {
        return Err(Error::DegenerateParams);
    }
    // R- = (R - Delta)/2 cancels catastrophically for Delta >> G; use R+ R- = G^2/4.
    let (r_plus, r_minus) = if detuning >= 0.0 {
        let r_plus = 0.5 * (rabi + detuning);
        (r_plus, 0.25 * p.coupling * p.coupling / r_plus)
    } else {
        let r_minus = 0.5 * (rabi - detuning);
        (0.25 * p.coupling * p.coupling / r_minus, r_minus)
    };
    Ok(DerivedParams {
        detuning,
        rabi,
        r_plus,
        r_minus,
        upsilon: p.coupling * p.coupling / (2.0 * p.field_freq * rabi),
    })
}

/// Amplitudes of a two-level state: `lower` on `|g>`, `upper` on `|e>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPair {
    pub lower: Complex64,
    pub upper: Complex64,
}

impl ComplexPair {
    pub const fn new(lower: Complex64, upper: Complex64) -> Self {
        Self { lower, upper }
    }

    pub const fn ground() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub const fn excited() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.lower.norm_sqr() + self.upper.norm_sqr()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }
}

/// Maps lab-frame amplitudes to the rotating frame:
/// `C_e = c_e e^{i omega t / 2}`, `C_g = c_g e^{-i omega t / 2}`.
pub fn transform_to_rotating(c: ComplexPair, t: f64, field_freq: f64) -> ComplexPair {
    let phase = Complex64::cis(0.5 * field_freq * t);
    ComplexPair::new(c.lower * phase.conj(), c.upper * phase)
}

/// Inverse of [`transform_to_rotating`].
pub fn transform_from_rotating(c: ComplexPair, t: f64, field_freq: f64) -> ComplexPair {
    let phase = Complex64::cis(0.5 * field_freq * t);
    ComplexPair::new(c.lower * phase, c.upper * phase.conj())
}

/// A sampled real observable.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    label: String,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidTimeSeries(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTimeSeries(
                "times must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            times,
            values,
            label: label.into(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    /// Largest value and the time at which it occurs.
    pub fn max(&self) -> Option<(f64, f64)> {
        self.iter()
            .fold(None, |best: Option<(f64, f64)>, (t, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((t, v)),
            })
    }

    /// Largest pointwise `|self - other|`; both series must share a time grid.
    pub fn max_abs_diff(&self, other: &TimeSeries) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::InvalidTimeSeries("time grids differ".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn into_parts(self) -> (String, Vec<f64>, Vec<f64>) {
        (self.label, self.times, self.values)
    }
}

/// `n` evenly spaced points on `[start, end]`, endpoints included.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (n - 1) as f64;
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        end
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn derive_at_zero_detuning() {
        let d = derive_params(&SemiclassicalParams::new(1.0, 1.0, 0.2).unwrap()).unwrap();
        assert_eq!(d.detuning, 0.0);
        assert_relative_eq!(d.rabi, 0.2, max_relative = 1e-15);
        assert_relative_eq!(d.r_plus, 0.1, max_relative = 1e-15);
        assert_relative_eq!(d.r_minus, 0.1, max_relative = 1e-15);
        assert_relative_eq!(d.upsilon, 0.1, max_relative = 1e-15);
    }

    #[test]
    fn derive_at_large_detuning() {
        // direct arithmetic: R = sqrt(4.04), R- = (R - 2)/2, Upsilon = 0.04 / (2 R)
        let d = derive_params(&SemiclassicalParams::new(1.0, 3.0, 0.2).unwrap()).unwrap();
        let r = 4.04f64.sqrt();
        assert_eq!(d.detuning, 2.0);
        assert_relative_eq!(d.rabi, r, max_relative = 1e-15);
        assert_relative_eq!(d.rabi, 2.009975, max_relative = 1e-6);
        assert_relative_eq!(d.r_minus, 0.0049876, max_relative = 1e-4);
        assert_relative_eq!(d.upsilon, 0.0099504, max_relative = 1e-4);
        assert_relative_eq!(d.upsilon, 0.04 / (2.0 * r), max_relative = 1e-15);
    }

    #[test]
    fn degenerate_when_r_vanishes() {
        let p = SemiclassicalParams::new(1.0, 1.0, 0.0).unwrap();
        assert_eq!(derive_params(&p), Err(Error::DegenerateParams));
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(SemiclassicalParams::new(0.0, 1.0, 0.1).is_err());
        assert!(SemiclassicalParams::new(1.0, -1.0, 0.1).is_err());
        assert!(SemiclassicalParams::new(1.0, 1.0, -0.1).is_err());
        assert!(SemiclassicalParams::new(1.0, f64::NAN, 0.1).is_err());
        assert!(SemiclassicalParams::new(f64::INFINITY, 1.0, 0.1).is_err());
    }

    #[test]
    fn rotating_frame_examples() {
        let c = transform_to_rotating(ComplexPair::ground(), 0.0, 1.0);
        assert_eq!(c, ComplexPair::ground());

        let c = transform_to_rotating(ComplexPair::excited(), PI, 1.0);
        assert!(c.lower.norm() < 1e-16);
        assert!((c.upper - Complex64::i()).norm() < 1e-15);

        let c0 = ComplexPair::new(Complex64::new(0.6, 0.1), Complex64::new(-0.2, 0.7661));
        let back = transform_from_rotating(transform_to_rotating(c0, 2.7, 1.3), 2.7, 1.3);
        assert!((back.lower - c0.lower).norm() < 1e-15);
        assert!((back.upper - c0.upper).norm() < 1e-15);
    }

    #[test]
    fn time_series_validation() {
        assert!(TimeSeries::new("x", vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(TimeSeries::new("x", vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        let ts = TimeSeries::new("x", vec![0.0, 1.0, 2.0], vec![0.1, 0.9, 0.3]).unwrap();
        assert_eq!(ts.max(), Some((1.0, 0.9)));
    }

    #[test]
    fn linspace_hits_endpoints() {
        let v = linspace(0.0, 3.0, 4);
        assert_eq!(v, vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(linspace(0.0, 1500.0, 15001).last(), Some(&1500.0));
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }
}
