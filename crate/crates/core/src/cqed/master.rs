//! Transmission from the full quantum steady state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{apply_direction, SystemConfig};

use super::liouvillian::{build_liouvillian, DEFAULT_MAX_LIOUVILLIAN_DIM};
use super::operators::{build_hamiltonian, HilbertSpace};
use super::steady::{steady_state, EvolutionSettings, Physicality, SteadyStateMethod};

/// Frequency unit of the master equation. The drive `α_in` is read in
/// units of its square root, so the unit fixes how weak the probe is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum RateUnit {
    /// Emitter dissipation `γ`: `α_in²` is the probe flux per emitter
    /// lifetime.
    #[default]
    Gamma,
    /// `κ_tot` of the configuration.
    KappaTot,
    /// A fixed angular frequency in rad/s.
    Angular(f64),
}

impl RateUnit {
    pub fn resolve(&self, config: &SystemConfig) -> Result<f64> {
        let u = match *self {
            RateUnit::Gamma => config.rates.gamma,
            RateUnit::KappaTot => config.rates.kappa_tot(),
            RateUnit::Angular(u) => u,
        };
        if !(u.is_finite() && u > 0.0) {
            return Err(Error::Domain(format!("rate unit must be positive, got {u}")));
        }
        Ok(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MasterOptions {
    pub space: HilbertSpace,
    pub rate_unit: RateUnit,
    pub max_liouvillian_dim: usize,
    pub method: SteadyStateMethod,
    pub evolution: EvolutionSettings,
}

impl Default for MasterOptions {
    fn default() -> Self {
        MasterOptions {
            space: HilbertSpace { levels_a: 4, levels_b: 4 },
            rate_unit: RateUnit::default(),
            max_liouvillian_dim: DEFAULT_MAX_LIOUVILLIAN_DIM,
            method: SteadyStateMethod::default(),
            evolution: EvolutionSettings::default(),
        }
    }
}

impl MasterOptions {
    pub fn with_levels(mut self, levels: usize) -> Result<Self> {
        self.space = HilbertSpace::new(levels, levels)?;
        Ok(self)
    }
}

/// Expectation values and transmission at one detuning. The drive is read
/// as `α_in` in units of `sqrt(rate unit)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateResult {
    pub a: Complex64,
    pub b: Complex64,
    pub sigma_minus: Complex64,
    /// `a_out = α_in − √(2κ_ex)⟨a⟩`
    pub a_out: Complex64,
    /// `|a_out / α_in|²`
    pub transmission: f64,
    pub residual: f64,
    pub method: SteadyStateMethod,
    pub physicality: Physicality,
}

/// Solves the master equation at probe detuning `delta1` (rad/s).
pub fn master_transmission(config: &SystemConfig, delta1: f64, opts: &MasterOptions) -> Result<SteadyStateResult> {
    if config.drive_amplitude == 0.0 {
        return Err(Error::Domain("master-equation transmission needs alpha_in > 0".into()));
    }
    let config = apply_direction(config);
    let space = HilbertSpace::new(opts.space.levels_a, opts.space.levels_b)?;
    let unit = opts.rate_unit.resolve(&config)?;
    let h = build_hamiltonian(&config, delta1, &space, unit)?;
    let l = build_liouvillian(&h, &config.rates, &space, unit, opts.max_liouvillian_dim)?;
    let ss = steady_state(&l, space.dim(), opts.method, &opts.evolution)?;
    let ops = space.operators()?;
    let a = ss.rho.expect(&ops.a.matrix)?;
    let b = ss.rho.expect(&ops.b.matrix)?;
    let sigma_minus = ss.rho.expect(&ops.sigma_minus.matrix)?;
    let alpha = config.drive_amplitude;
    let a_out = Complex64::new(alpha, 0.0) - (2.0 * config.rates.kappa_ex / unit).sqrt() * a;
    Ok(SteadyStateResult {
        a,
        b,
        sigma_minus,
        a_out,
        transmission: (a_out / alpha).norm_sqr(),
        residual: ss.relative_residual,
        method: ss.method,
        physicality: ss.rho.physicality(&space)?,
    })
}
