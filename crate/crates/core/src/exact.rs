//! Closed-form reference states.

use crate::error::{Result, SolverError};

/// Self-similar Maxwellian-molecule solution with scale
/// `S(t) = 1 - amplitude * exp(-rate * t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BkwParams {
    pub amplitude: f64,
    pub rate: f64,
}

impl Default for BkwParams {
    fn default() -> Self {
        Self {
            amplitude: 0.4,
            rate: 4.0,
        }
    }
}

impl BkwParams {
    pub fn new(amplitude: f64, rate: f64) -> Result<Self> {
        let p = Self { amplitude, rate };
        p.validate()?;
        Ok(p)
    }

    /// The density is nonnegative only while `S(t) >= 3/5`; with
    /// `rate >= 0` and `S(0) >= 3/5` that holds for all `t >= 0`.
    pub fn validate(&self) -> Result<()> {
        let s0 = self.s0();
        if !(0.6..=1.0).contains(&s0) || !self.amplitude.is_finite() {
            return Err(SolverError::InvalidParameter(format!(
                "BKW initial scale S0 = 1 - amplitude must lie in [3/5, 1], got {s0}"
            )));
        }
        if !(self.rate.is_finite() && self.rate >= 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "BKW rate must be nonnegative, got {}",
                self.rate
            )));
        }
        Ok(())
    }

    pub fn s0(&self) -> f64 {
        1.0 - self.amplitude
    }

    pub fn scale(&self, t: f64) -> f64 {
        1.0 - self.amplitude * (-self.rate * t).exp()
    }
}

/// `f(t, v) = (2 pi S)^{-3/2} [(5S - 3)/(2S) + (1 - S)/(2 S^2) |v|^2] exp(-|v|^2 / (2S))`.
pub fn bkw(t: f64, v: [f64; 3], p: &BkwParams) -> f64 {
    let s = p.scale(t);
    let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let poly = (5.0 * s - 3.0) / (2.0 * s) + (1.0 - s) / (2.0 * s * s) * v2;
    (2.0 * std::f64::consts::PI * s).powf(-1.5) * poly * (-v2 / (2.0 * s)).exp()
}

/// Shell-shaped initial datum for the Coulomb runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellParams {
    pub sigma: f64,
    pub sharpness: f64,
}

impl Default for ShellParams {
    fn default() -> Self {
        Self {
            sigma: 0.3,
            sharpness: 10.0,
        }
    }
}

impl ShellParams {
    pub fn new(sigma: f64, sharpness: f64) -> Result<Self> {
        if !(sigma > 0.0 && sharpness > 0.0 && sigma.is_finite() && sharpness.is_finite()) {
            return Err(SolverError::InvalidParameter(format!(
                "shell parameters must be positive, got sigma = {sigma}, S = {sharpness}"
            )));
        }
        Ok(Self { sigma, sharpness })
    }
}

/// `f0(v) = S^{-2} exp(-S (|v| - sigma)^2 / sigma^2)`, unnormalized.
pub fn coulomb_shell(v: [f64; 3], p: &ShellParams) -> f64 {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let d = (r - p.sigma) / p.sigma;
    (-p.sharpness * d * d).exp() / (p.sharpness * p.sharpness)
}
