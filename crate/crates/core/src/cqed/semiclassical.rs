//! Mean-field steady state with the emitter inversion frozen at `σ_z`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{apply_direction, SystemConfig};
use crate::numerics::I;

/// Complex field amplitudes of the semiclassical fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalState {
    pub a: Complex64,
    pub b: Complex64,
    pub sigma_minus: Complex64,
}

struct Terms {
    d1: Complex64,
    d2: Complex64,
    den: Complex64,
    kappa_ex: f64,
    sigma_z: f64,
    g: f64,
    h: f64,
}

fn terms(config: &SystemConfig, delta1: f64, delta2: f64) -> Result<Terms> {
    let r = &config.rates;
    let d1 = Complex64::new(delta1, r.kappa_tot());
    let d2 = Complex64::new(delta2, r.gamma);
    let den = d1 * (d1 * d2 + config.sigma_z * r.g * r.g) - d2 * r.h * r.h;
    if !den.is_finite() || den.norm() <= 1e-15 {
        return Err(Error::Singular(format!("semiclassical denominator |{den}| vanishes")));
    }
    Ok(Terms {
        d1,
        d2,
        den,
        kappa_ex: r.kappa_ex,
        sigma_z: config.sigma_z,
        g: r.g,
        h: r.h,
    })
}

/// `⟨a⟩ = iα_in√(2κ_ex) Δ̃₁Δ̃₂ / [Δ̃₁(Δ̃₁Δ̃₂ + σ_z g²) − Δ̃₂h²]` at explicit
/// detunings `(Δ₁, Δ₂)`. The drive is in units of `sqrt(rad/s)`.
pub fn semiclassical_amplitude(config: &SystemConfig, delta1: f64, delta2: f64) -> Result<Complex64> {
    let config = apply_direction(config);
    let t = terms(&config, delta1, delta2)?;
    Ok(I * config.drive_amplitude * (2.0 * t.kappa_ex).sqrt() * t.d1 * t.d2 / t.den)
}

/// Fixed point of the linearised equations of motion: `⟨a⟩` as above,
/// `⟨b⟩ = h⟨a⟩/Δ̃₁` and `⟨σ⁻⟩ = −gσ_z⟨a⟩/Δ̃₂`.
pub fn semiclassical_state(config: &SystemConfig, delta1: f64, delta2: f64) -> Result<SemiclassicalState> {
    let resolved = apply_direction(config);
    let t = terms(&resolved, delta1, delta2)?;
    let a = I * resolved.drive_amplitude * (2.0 * t.kappa_ex).sqrt() * t.d1 * t.d2 / t.den;
    Ok(SemiclassicalState {
        a,
        b: t.h * a / t.d1,
        sigma_minus: -t.g * t.sigma_z * a / t.d2,
    })
}

/// Port-2 amplitude `t_ω = a_out/α_in`, evaluated in closed form so that it
/// stays defined at `α_in = 0`.
pub fn semiclassical_transmission(config: &SystemConfig, delta1: f64, delta2: f64) -> Result<Complex64> {
    let config = apply_direction(config);
    let r = &config.rates;
    let t = terms(&config, delta1, delta2)?;
    let d1_prime = Complex64::new(delta1, r.kappa_in - r.kappa_ex);
    let num = t.d1 * (d1_prime * t.d2 + t.sigma_z * t.g * t.g) - t.d2 * t.h * t.h;
    Ok(num / t.den)
}

/// Amplitude at probe detuning `delta1` from the cavity resonance.
pub fn semiclassical_transmission_at(config: &SystemConfig, delta1: f64) -> Result<Complex64> {
    let (d1, d2) = config.detunings(delta1);
    semiclassical_transmission(config, d1, d2)
}

/// `a_out = α_in − √(2κ_ex)⟨a⟩`
pub fn output_field(config: &SystemConfig, a: Complex64) -> Complex64 {
    Complex64::new(config.drive_amplitude, 0.0) - (2.0 * config.rates.kappa_ex).sqrt() * a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::*;
    use crate::spt::{spt_transmission, SptInput};
    use std::f64::consts::TAU;

    fn config(emitter_decay: f64, h: f64, sigma_z: f64, alpha_in: f64) -> SystemConfig {
        let geo = RingGeometry::new(10.5e-6, 1.5, TAU * 3e12, TAU * 300e12).unwrap();
        let k = TAU * 30e9;
        let rates = RateSet::bridged(
            k,
            k,
            TAU * 6e6,
            EmitterSpec::Decay(emitter_decay),
            BackscatterSpec::Rate(h),
            geo.resonance(),
            geo.fsr(),
        )
        .unwrap();
        SystemConfig::new(geo, rates, alpha_in, Direction::Forward, sigma_z, BridgeForm::Exact).unwrap()
    }

    #[test]
    fn bare_resonance_amplitude() {
        let cfg = config(0.0, 0.0, -1.0, 0.1);
        let a = semiclassical_amplitude(&cfg, 0.0, 0.0).unwrap();
        let expected = I * 0.1 * (2.0 * cfg.rates.kappa_ex).sqrt() / (I * cfg.rates.kappa_tot());
        assert!((a - expected).norm() < 1e-12 * expected.norm());
        assert!(semiclassical_transmission(&cfg, 0.0, 0.0).unwrap().norm() < 1e-12);
    }

    #[test]
    fn zero_drive_zero_field() {
        let cfg = config(TAU * 600e6, TAU * 30e9, -1.0, 0.0);
        assert_eq!(semiclassical_amplitude(&cfg, 1e9, 1e9).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn closed_form_matches_input_output() {
        let cfg = config(TAU * 600e6, TAU * 30e9, -0.4, 0.1);
        let k = cfg.rates.kappa_tot();
        for x in [-3.0, -0.7, 0.0, 0.25, 2.0] {
            let (d1, d2) = cfg.detunings(x * k);
            let a = semiclassical_amplitude(&cfg, d1, d2).unwrap();
            let via_field = output_field(&cfg, a) / cfg.drive_amplitude;
            let closed = semiclassical_transmission(&cfg, d1, d2).unwrap();
            assert!((via_field - closed).norm() < 1e-12, "{via_field} vs {closed}");
        }
    }

    #[test]
    fn ground_state_inversion_matches_transport() {
        let cfg = config(TAU * 600e6, TAU * 300e9, -1.0, 0.1);
        let k = cfg.rates.kappa_tot();
        for i in 0..=200 {
            let d = (-10.0 + 0.1 * f64::from(i)) * k;
            let sc = semiclassical_transmission_at(&cfg, d).unwrap();
            let spt = spt_transmission(&SptInput::from_config(&cfg, d)).unwrap();
            assert!((sc.norm_sqr() - spt.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_point_solves_equations_of_motion() {
        let cfg = config(TAU * 600e6, TAU * 30e9, -1.0, 0.1);
        let r = cfg.rates;
        let (d1, d2) = cfg.detunings(0.3 * r.kappa_tot());
        let s = semiclassical_state(&cfg, d1, d2).unwrap();
        let dt1 = Complex64::new(d1, r.kappa_tot());
        let dt2 = Complex64::new(d2, r.gamma);
        let drive = 0.1 * (2.0 * r.kappa_ex).sqrt();
        let da = I * dt1 * s.a + drive - I * r.g * s.sigma_minus - I * r.h * s.b;
        let ds = I * dt2 * s.sigma_minus + I * r.g * (-1.0) * s.a;
        let db = I * dt1 * s.b - I * r.h * s.a;
        let scale = drive;
        for res in [da, ds, db] {
            assert!(res.norm() < 1e-10 * scale, "residual {res}");
        }
    }

    #[test]
    fn backward_probe_ignores_emitter() {
        let cfg = config(TAU * 600e6, 0.0, -1.0, 0.1).with_direction(Direction::Backward);
        assert!(semiclassical_transmission_at(&cfg, 0.0).unwrap().norm() < 1e-12);
    }
}
