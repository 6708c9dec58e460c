//! Closed-form single-photon transport through the ring with the emitter
//! coupled only to the counterclockwise mode.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{apply_direction, SystemConfig};

/// Inputs to the transport amplitude; every entry is an angular frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SptInput {
    pub delta1: f64,
    pub delta2: f64,
    pub kappa_in: f64,
    pub kappa_ex: f64,
    pub gamma: f64,
    pub g: f64,
    pub h: f64,
}

impl SptInput {
    /// Inputs at cavity detuning `delta1`; a backward probe sees no emitter.
    pub fn from_config(config: &SystemConfig, delta1: f64) -> Self {
        let config = apply_direction(config);
        let (delta1, delta2) = config.detunings(delta1);
        let r = &config.rates;
        SptInput {
            delta1,
            delta2,
            kappa_in: r.kappa_in,
            kappa_ex: r.kappa_ex,
            gamma: r.gamma,
            g: r.g,
            h: r.h,
        }
    }

    /// `Δ̃₁ = Δ₁ + iκ_tot`
    pub fn complex_cavity_detuning(&self) -> Complex64 {
        Complex64::new(self.delta1, self.kappa_in + self.kappa_ex)
    }

    /// `Δ̃₂ = Δ₂ + iγ`
    pub fn complex_emitter_detuning(&self) -> Complex64 {
        Complex64::new(self.delta2, self.gamma)
    }
}

pub fn spt_transmission(input: &SptInput) -> Result<Complex64> {
    for (name, v) in [
        ("kappa_in", input.kappa_in),
        ("kappa_ex", input.kappa_ex),
        ("gamma", input.gamma),
        ("g", input.g),
        ("h", input.h),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Domain(format!("{name} must be finite and >= 0, got {v}")));
        }
    }
    let d1 = input.complex_cavity_detuning();
    let d2 = input.complex_emitter_detuning();
    let g2 = input.g * input.g;
    let h2 = input.h * input.h;
    let d1_prime = Complex64::new(input.delta1, input.kappa_in - input.kappa_ex);
    let num = d1 * (d1_prime * d2 - g2) - d2 * h2;
    let den = d1 * (d1 * d2 - g2) - d2 * h2;
    if den.norm() <= 1e-15 {
        return Err(Error::Singular(format!("transport denominator |{den}| vanishes")));
    }
    Ok(num / den)
}

/// `T = |t_ω|²`.
pub fn spt_power(input: &SptInput) -> Result<f64> {
    spt_transmission(input).map(|t| t.norm_sqr())
}
