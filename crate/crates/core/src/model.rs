//! Physical parameters of the ring/emitter/scatterer system and the
//! conversions between transfer-matrix coefficients and coupled-mode rates.
//!
//! Every rate is an angular frequency in rad/s. Values quoted as
//! "frequency over 2π" (Hz) are converted with [`angular_from_hz`] exactly
//! once, when a configuration is ingested.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn angular_from_hz(hz: f64) -> f64 {
    TAU * hz
}

pub fn hz_from_angular(omega: f64) -> f64 {
    omega / TAU
}

fn nonnegative(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain(format!("{name} must be finite and >= 0, got {value}")))
    }
}

fn positive(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain(format!("{name} must be finite and > 0, got {value}")))
    }
}

/// Ring geometry. The free spectral range is a configured quantity; the
/// round-trip time is always derived from it as `1 / F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingGeometry {
    radius_m: f64,
    n_eff: f64,
    fsr: f64,
    resonance: f64,
    modal_number: u32,
}

impl RingGeometry {
    /// `fsr` and `resonance` are angular frequencies. The modal number is
    /// `Ω n_eff R / c` rounded to the nearest integer.
    pub fn new(radius_m: f64, n_eff: f64, fsr: f64, resonance: f64) -> Result<Self> {
        positive("radius", radius_m)?;
        positive("effective index", n_eff)?;
        positive("free spectral range", fsr)?;
        positive("resonance frequency", resonance)?;
        let exact = resonance * n_eff * radius_m / SPEED_OF_LIGHT;
        let m = exact.round();
        if m < 1.0 || m > f64::from(u32::MAX) {
            return Err(Error::Domain(format!(
                "modal number {exact:.3} is outside [1, {}]",
                u32::MAX
            )));
        }
        Ok(RingGeometry {
            radius_m,
            n_eff,
            fsr,
            resonance,
            modal_number: m as u32,
        })
    }

    pub fn radius_m(&self) -> f64 {
        self.radius_m
    }

    pub fn n_eff(&self) -> f64 {
        self.n_eff
    }

    /// Free spectral range `F` (rad/s).
    pub fn fsr(&self) -> f64 {
        self.fsr
    }

    /// Round-trip time `τ_rt = 1 / F`.
    pub fn round_trip_time(&self) -> f64 {
        1.0 / self.fsr
    }

    /// Cold-cavity resonance `Ω` (rad/s).
    pub fn resonance(&self) -> f64 {
        self.resonance
    }

    pub fn modal_number(&self) -> u32 {
        self.modal_number
    }

    /// Propagation constant `β = n_eff ω / c` at angular frequency `omega`.
    pub fn propagation_constant(&self, omega: f64) -> f64 {
        self.n_eff * omega / SPEED_OF_LIGHT
    }
}

/// How the emitter is specified: by its decay rate into the resonator `Γ`,
/// by the coherent coupling `g`, or by both (which must then agree).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EmitterSpec {
    Decay(f64),
    Coupling(f64),
    Both { decay: f64, coupling: f64 },
}

/// How backscattering is specified: dimensionless strength `ε`, rate `h`,
/// or both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BackscatterSpec {
    Strength(f64),
    Rate(f64),
    Both { strength: f64, rate: f64 },
}

/// Relative tolerance for `g² = Γ(2F − κ_tot)` and `h = εF` when both sides
/// are supplied independently.
pub const BRIDGE_CONSISTENCY_RTOL: f64 = 1e-3;

fn relative_mismatch(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Coupled-mode rates, all angular (rad/s). Both the transfer-matrix view
/// (`Γ`, `ε`) and the Hamiltonian view (`g`, `h`) are always populated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    pub kappa_in: f64,
    pub kappa_ex: f64,
    /// Emitter dissipation `γ`.
    pub gamma: f64,
    /// Emitter decay into the resonator `Γ`.
    pub emitter_decay: f64,
    pub g: f64,
    pub h: f64,
    pub epsilon: f64,
    pub omega_qe: f64,
}

impl RateSet {
    /// Builds a rate set, filling in whichever half of each `(Γ, g)` and
    /// `(ε, h)` pair was not supplied.
    pub fn bridged(
        kappa_in: f64,
        kappa_ex: f64,
        gamma: f64,
        emitter: EmitterSpec,
        backscatter: BackscatterSpec,
        omega_qe: f64,
        fsr: f64,
    ) -> Result<Self> {
        nonnegative("kappa_in", kappa_in)?;
        nonnegative("kappa_ex", kappa_ex)?;
        nonnegative("gamma", gamma)?;
        nonnegative("omega_qe", omega_qe)?;
        positive("free spectral range", fsr)?;
        let kappa_tot = kappa_in + kappa_ex;
        let (emitter_decay, g) = match emitter {
            EmitterSpec::Decay(decay) => (decay, bridge_emitter(decay, fsr, kappa_tot)?),
            EmitterSpec::Coupling(g) => (emitter_decay_from_coupling(g, fsr, kappa_tot)?, g),
            EmitterSpec::Both { decay, coupling } => {
                let implied = bridge_emitter(decay, fsr, kappa_tot)?;
                nonnegative("g", coupling)?;
                if relative_mismatch(implied, coupling) > BRIDGE_CONSISTENCY_RTOL {
                    return Err(Error::Domain(format!(
                        "g = {coupling:.6e} rad/s disagrees with sqrt(Gamma (2F - kappa_tot)) = {implied:.6e} rad/s"
                    )));
                }
                (decay, coupling)
            }
        };
        let (epsilon, h) = match backscatter {
            BackscatterSpec::Strength(eps) => (eps, bridge_scatterer(eps, fsr)?),
            BackscatterSpec::Rate(h) => (scatterer_strength_from_rate(h, fsr)?, h),
            BackscatterSpec::Both { strength, rate } => {
                let implied = bridge_scatterer(strength, fsr)?;
                nonnegative("h", rate)?;
                if relative_mismatch(implied, rate) > BRIDGE_CONSISTENCY_RTOL {
                    return Err(Error::Domain(format!(
                        "h = {rate:.6e} rad/s disagrees with epsilon F = {implied:.6e} rad/s"
                    )));
                }
                (strength, rate)
            }
        };
        if epsilon >= FRAC_PI_2 {
            return Err(Error::Domain(format!("scatterer strength epsilon = {epsilon} must be below pi/2")));
        }
        Ok(RateSet {
            kappa_in,
            kappa_ex,
            gamma,
            emitter_decay,
            g,
            h,
            epsilon,
            omega_qe,
        })
    }

    pub fn kappa_tot(&self) -> f64 {
        self.kappa_in + self.kappa_ex
    }
}

/// Waveguide–ring coupler: self-coupling `t`, cross-coupling `κ_c` and
/// round-trip amplitude attenuation `α`. `t` and `κ_c` are real with
/// `t² + κ_c² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplerCoefficients {
    t: f64,
    kappa_c: f64,
    alpha: f64,
}

impl CouplerCoefficients {
    pub fn new(t: f64, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("coupler t = {t} must lie in [0, 1]")));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!("round-trip attenuation alpha = {alpha} must lie in [0, 1]")));
        }
        Ok(CouplerCoefficients {
            t,
            kappa_c: (1.0 - t * t).sqrt(),
            alpha,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn kappa_c(&self) -> f64 {
        self.kappa_c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Which form of the coefficient/rate relation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BridgeForm {
    /// `α = exp(−κ_in τ_rt)`, `t = exp(−κ_ex τ_rt)`.
    #[default]
    Exact,
    /// `α ≈ 1 − κ_in τ_rt`, `t ≈ 1 − κ_ex τ_rt`.
    FirstOrder,
}

/// Converts coupler coefficients into `(κ_in, κ_ex)` using the exact
/// exponential relation.
pub fn bridge_coupler_to_rates(coupler: &CouplerCoefficients, fsr: f64) -> Result<(f64, f64)> {
    bridge_coupler_to_rates_with(coupler, fsr, BridgeForm::Exact)
}

pub fn bridge_coupler_to_rates_with(coupler: &CouplerCoefficients, fsr: f64, form: BridgeForm) -> Result<(f64, f64)> {
    positive("free spectral range", fsr)?;
    positive("coupler alpha", coupler.alpha)?;
    positive("coupler t", coupler.t)?;
    let rate = |x: f64| match form {
        BridgeForm::Exact => -x.ln() * fsr,
        BridgeForm::FirstOrder => (1.0 - x) * fsr,
    };
    Ok((rate(coupler.alpha), rate(coupler.t)))
}

/// Inverse of [`bridge_coupler_to_rates_with`].
pub fn rates_to_coupler(kappa_in: f64, kappa_ex: f64, fsr: f64, form: BridgeForm) -> Result<CouplerCoefficients> {
    nonnegative("kappa_in", kappa_in)?;
    nonnegative("kappa_ex", kappa_ex)?;
    positive("free spectral range", fsr)?;
    let tau = 1.0 / fsr;
    let coeff = |k: f64| match form {
        BridgeForm::Exact => Ok((-k * tau).exp()),
        BridgeForm::FirstOrder => {
            let c = 1.0 - k * tau;
            if c > 0.0 {
                Ok(c)
            } else {
                Err(Error::Domain(format!("first-order coefficient 1 - kappa tau = {c} is not positive")))
            }
        }
    };
    CouplerCoefficients::new(coeff(kappa_ex)?, coeff(kappa_in)?)
}

/// `g = sqrt(Γ (2F − κ_tot))`.
pub fn bridge_emitter(emitter_decay: f64, fsr: f64, kappa_tot: f64) -> Result<f64> {
    nonnegative("Gamma", emitter_decay)?;
    Ok((emitter_decay * emitter_bridge_factor(fsr, kappa_tot)?).sqrt())
}

/// `Γ = g² / (2F − κ_tot)`.
pub fn emitter_decay_from_coupling(g: f64, fsr: f64, kappa_tot: f64) -> Result<f64> {
    nonnegative("g", g)?;
    Ok(g * g / emitter_bridge_factor(fsr, kappa_tot)?)
}

fn emitter_bridge_factor(fsr: f64, kappa_tot: f64) -> Result<f64> {
    let factor = 2.0 * fsr - kappa_tot;
    if factor > 0.0 && factor.is_finite() {
        Ok(factor)
    } else {
        Err(Error::Domain(format!(
            "2F = {:.6e} must exceed kappa_tot = {kappa_tot:.6e}",
            2.0 * fsr
        )))
    }
}

/// `h = ε F`.
pub fn bridge_scatterer(epsilon: f64, fsr: f64) -> Result<f64> {
    nonnegative("epsilon", epsilon)?;
    positive("free spectral range", fsr)?;
    Ok(epsilon * fsr)
}

/// `ε = h / F`.
pub fn scatterer_strength_from_rate(h: f64, fsr: f64) -> Result<f64> {
    nonnegative("h", h)?;
    positive("free spectral range", fsr)?;
    Ok(h / fsr)
}

/// Single-pass transmission of the chirally coupled emitter,
/// `(Δ₂ + i(γ − Γ)) / (Δ₂ + i(γ + Γ))`.
pub fn qe_transmission(delta2: f64, gamma: f64, emitter_decay: f64) -> Result<Complex64> {
    nonnegative("gamma", gamma)?;
    nonnegative("Gamma", emitter_decay)?;
    if delta2 == 0.0 && gamma == 0.0 && emitter_decay == 0.0 {
        return Err(Error::Singular("emitter transmission at delta2 = gamma = Gamma = 0".into()));
    }
    Ok(Complex64::new(delta2, gamma - emitter_decay) / Complex64::new(delta2, gamma + emitter_decay))
}

/// Polar split of the emitter transmission, `t_qe = exp(iφ_pha) exp(−φ_dis)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAmplitude {
    /// `arg t_qe` in `(−π, π]`.
    pub phase: f64,
    /// `−ln |t_qe|`, nonnegative for a passive emitter.
    pub attenuation: f64,
}

impl PhaseAmplitude {
    pub fn recompose(&self) -> Complex64 {
        Complex64::from_polar((-self.attenuation).exp(), self.phase)
    }
}

pub fn qe_phase_amplitude(t_qe: Complex64) -> Result<PhaseAmplitude> {
    let modulus = t_qe.norm();
    if modulus == 0.0 {
        return Err(Error::Singular("emitter transmission is zero: attenuation is infinite".into()));
    }
    let mut phase = t_qe.arg();
    // atan2 returns -π for a negative real part with a -0.0 imaginary part.
    if phase <= -PI {
        phase += TAU;
    }
    Ok(PhaseAmplitude {
        phase,
        attenuation: -modulus.ln(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveResonance {
    pub omega: f64,
    /// False when the phase lies outside `(−π, π]` or the shifted resonance
    /// is not positive; the small-shift approximation does not hold there.
    pub within_validity: bool,
}

/// `Ω_eff = Ω (1 − φ_pha / (2π m))`, valid for `Ω/ω ≈ 1`.
pub fn effective_resonance(resonance: f64, phase: f64, modal_number: u32) -> Result<EffectiveResonance> {
    if modal_number == 0 {
        return Err(Error::Domain("modal number must be at least 1".into()));
    }
    let omega = resonance * (1.0 - phase / (TAU * f64::from(modal_number)));
    let within_validity = phase > -PI && phase <= PI && omega > 0.0;
    if !within_validity {
        log::warn!("effective resonance for phase {phase} and m = {modal_number} is outside the small-shift regime");
    }
    Ok(EffectiveResonance { omega, within_validity })
}

/// Propagation direction of the probe photon. Forward light (port 1)
/// excites the counterclockwise mode, which the emitter couples to;
/// backward light (port 2) sees the emitter-free clockwise mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            other => Err(Error::config("direction", format!("expected \"forward\" or \"backward\", got {other:?}"))),
        }
    }
}

pub const MAX_DRIVE_AMPLITUDE: f64 = 0.5;
pub const DRIVE_WARNING_THRESHOLD: f64 = 0.2;

/// Full description of one physical configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub geometry: RingGeometry,
    pub rates: RateSet,
    pub coupler: CouplerCoefficients,
    /// Probe amplitude `α_in`.
    pub drive_amplitude: f64,
    pub direction: Direction,
    /// Constant `⟨σ_z⟩` used by the semiclassical steady state.
    pub sigma_z: f64,
}

impl SystemConfig {
    /// Assembles a configuration, deriving the coupler from the rates with
    /// the given bridge form.
    pub fn new(
        geometry: RingGeometry,
        rates: RateSet,
        drive_amplitude: f64,
        direction: Direction,
        sigma_z: f64,
        form: BridgeForm,
    ) -> Result<Self> {
        let coupler = rates_to_coupler(rates.kappa_in, rates.kappa_ex, geometry.fsr(), form)?;
        Self::with_coupler(geometry, rates, coupler, drive_amplitude, direction, sigma_z)
    }

    /// Assembles a configuration from an explicitly given coupler, which must
    /// agree with the rates to first order in `κ τ_rt`.
    pub fn with_coupler(
        geometry: RingGeometry,
        rates: RateSet,
        coupler: CouplerCoefficients,
        drive_amplitude: f64,
        direction: Direction,
        sigma_z: f64,
    ) -> Result<Self> {
        if !(drive_amplitude.is_finite() && (0.0..=MAX_DRIVE_AMPLITUDE).contains(&drive_amplitude)) {
            return Err(Error::config(
                "drive.alpha_in",
                format!("must lie in [0, {MAX_DRIVE_AMPLITUDE}], got {drive_amplitude}"),
            ));
        }
        if drive_amplitude > DRIVE_WARNING_THRESHOLD {
            log::warn!("alpha_in = {drive_amplitude} is not small; the single-photon picture may not hold");
        }
        if !(sigma_z.is_finite() && (-1.0..=1.0).contains(&sigma_z)) {
            return Err(Error::config("sigma_z", format!("must lie in [-1, 1], got {sigma_z}")));
        }
        check_coupler_consistency(&coupler, &rates, geometry.fsr())?;
        Ok(SystemConfig {
            geometry,
            rates,
            coupler,
            drive_amplitude,
            direction,
            sigma_z,
        })
    }

    /// `(Δ₁, Δ₂)` for a probe detuned by `delta1` from the cavity resonance.
    pub fn detunings(&self, delta1: f64) -> (f64, f64) {
        (delta1, delta1 + self.geometry.resonance() - self.rates.omega_qe)
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }
}

/// Checks `t ≈ exp(−κ_ex τ_rt)` and `α ≈ exp(−κ_in τ_rt)` up to the
/// second-order difference between the exact and first-order forms.
fn check_coupler_consistency(coupler: &CouplerCoefficients, rates: &RateSet, fsr: f64) -> Result<()> {
    let tau = 1.0 / fsr;
    for (name, coeff, kappa) in [("t", coupler.t, rates.kappa_ex), ("alpha", coupler.alpha, rates.kappa_in)] {
        let x = kappa * tau;
        let tol = (x * x).max(1e-12);
        if (coeff - (-x).exp()).abs() > tol {
            return Err(Error::Domain(format!(
                "coupler {name} = {coeff} is inconsistent with the rate (expected ~{:.12})",
                (-x).exp()
            )));
        }
    }
    Ok(())
}

/// Removes the emitter for backward propagation (`g = Γ = 0`); forward
/// configurations are returned unchanged.
pub fn apply_direction(config: &SystemConfig) -> SystemConfig {
    let mut out = *config;
    if config.direction == Direction::Backward {
        out.rates.g = 0.0;
        out.rates.emitter_decay = 0.0;
    }
    out
}
