//! Operators on the truncated joint space `(mode a) ⊗ (mode b) ⊗ (emitter)`.
//!
//! Fock states of each mode are indexed by photon number; the emitter
//! basis is `{|g⟩, |e⟩}` in that order, so `σ⁻ = |g⟩⟨e|`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{apply_direction, SystemConfig};
use crate::numerics::{kron_all, CMatrix, I, ZERO};

/// Truncated joint Hilbert space. `levels_a` and `levels_b` count the Fock
/// levels kept per mode (photon numbers `0..levels`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSpace {
    pub levels_a: usize,
    pub levels_b: usize,
}

pub const EMITTER_LEVELS: usize = 2;
pub const MIN_DIMENSION: usize = 8;

impl HilbertSpace {
    pub fn new(levels_a: usize, levels_b: usize) -> Result<Self> {
        let space = HilbertSpace { levels_a, levels_b };
        if levels_a == 0 || levels_b == 0 || space.dim() < MIN_DIMENSION {
            return Err(Error::config(
                "truncation",
                format!(
                    "joint dimension {}x{}x2 = {} is below the minimum of {MIN_DIMENSION}",
                    levels_a,
                    levels_b,
                    space.dim()
                ),
            ));
        }
        Ok(space)
    }

    pub fn dim(&self) -> usize {
        self.levels_a * self.levels_b * EMITTER_LEVELS
    }

    /// Joint index of `|n_a, n_b, s⟩` with `s = 0` ground and `s = 1` excited.
    pub fn index(&self, n_a: usize, n_b: usize, s: usize) -> usize {
        (n_a * self.levels_b + n_b) * EMITTER_LEVELS + s
    }

    pub fn operators(&self) -> Result<JointOperators> {
        let ia = CMatrix::identity(self.levels_a);
        let ib = CMatrix::identity(self.levels_b);
        let is = CMatrix::identity(EMITTER_LEVELS);
        let sm = sigma_minus();
        Ok(JointOperators {
            a: OperatorMatrix::new(OperatorLabel::A, kron_all(&[&lowering(self.levels_a)?, &ib, &is])?),
            b: OperatorMatrix::new(OperatorLabel::B, kron_all(&[&ia, &lowering(self.levels_b)?, &is])?),
            sigma_minus: OperatorMatrix::new(OperatorLabel::SigmaMinus, kron_all(&[&ia, &ib, &sm])?),
            sigma_z: OperatorMatrix::new(
                OperatorLabel::SigmaZ,
                kron_all(&[&ia, &ib, &CMatrix::from_diag(&[Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)])])?,
            ),
        })
    }
}

/// Single-mode annihilation operator on `levels` Fock states.
pub fn lowering(levels: usize) -> Result<CMatrix> {
    CMatrix::from_fn(levels, levels, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

fn sigma_minus() -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 1)] = Complex64::new(1.0, 0.0);
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorLabel {
    A,
    B,
    SigmaMinus,
    SigmaPlus,
    SigmaZ,
    Identity,
    Hamiltonian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub label: OperatorLabel,
    pub matrix: CMatrix,
}

impl OperatorMatrix {
    pub fn new(label: OperatorLabel, matrix: CMatrix) -> Self {
        OperatorMatrix { label, matrix }
    }

    pub fn dagger(&self) -> OperatorMatrix {
        let label = match self.label {
            OperatorLabel::SigmaMinus => OperatorLabel::SigmaPlus,
            OperatorLabel::SigmaPlus => OperatorLabel::SigmaMinus,
            other => other,
        };
        OperatorMatrix::new(label, self.matrix.adjoint())
    }
}

#[derive(Debug, Clone)]
pub struct JointOperators {
    pub a: OperatorMatrix,
    pub b: OperatorMatrix,
    pub sigma_minus: OperatorMatrix,
    pub sigma_z: OperatorMatrix,
}

/// Hamiltonian in the frame rotating at the probe frequency, expressed in
/// units of `rate_unit` (rad/s):
///
/// `H = −Δ₁ a†a − Δ₂ σ⁺σ⁻ − Δ₁ b†b + i√(2κ_ex) α_in (a† − a)
///      + g (a†σ⁻ + σ⁺a) + h (a†b + b†a)`.
///
/// The drive amplitude `α_in` is read in units of `sqrt(rate_unit)`.
pub fn build_hamiltonian(config: &SystemConfig, delta1: f64, space: &HilbertSpace, rate_unit: f64) -> Result<OperatorMatrix> {
    if !(rate_unit.is_finite() && rate_unit > 0.0) {
        return Err(Error::Domain(format!("rate unit must be positive, got {rate_unit}")));
    }
    let config = apply_direction(config);
    let r = &config.rates;
    let (d1, d2) = config.detunings(delta1);
    let (d1, d2, g, h) = (d1 / rate_unit, d2 / rate_unit, r.g / rate_unit, r.h / rate_unit);
    let drive = (2.0 * r.kappa_ex / rate_unit).sqrt() * config.drive_amplitude;

    let ops = space.operators()?;
    let a = &ops.a.matrix;
    let b = &ops.b.matrix;
    let sm = &ops.sigma_minus.matrix;
    let ad = a.adjoint();
    let bd = b.adjoint();
    let sp = sm.adjoint();

    let mut hm = CMatrix::zeros(space.dim(), space.dim());
    let re = |x: f64| Complex64::new(x, 0.0);
    hm.add_scaled(re(-d1), &ad.matmul(a)?)?;
    hm.add_scaled(re(-d2), &sp.matmul(sm)?)?;
    hm.add_scaled(re(-d1), &bd.matmul(b)?)?;
    hm.add_scaled(I * drive, &ad.sub(a)?)?;
    hm.add_scaled(re(g), &ad.matmul(sm)?.add(&sp.matmul(a)?)?)?;
    hm.add_scaled(re(h), &ad.matmul(b)?.add(&bd.matmul(a)?)?)?;
    Ok(OperatorMatrix::new(OperatorLabel::Hamiltonian, hm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::*;
    use crate::numerics::hermitian_eigen;
    use std::f64::consts::TAU;

    fn config(emitter_decay: f64, h: f64, alpha_in: f64) -> SystemConfig {
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
        SystemConfig::new(geo, rates, alpha_in, Direction::Forward, -1.0, BridgeForm::Exact).unwrap()
    }

    #[test]
    fn too_small_space_rejected() {
        assert!(HilbertSpace::new(1, 2).is_err());
        assert!(HilbertSpace::new(0, 8).is_err());
        assert_eq!(HilbertSpace::new(2, 2).unwrap().dim(), 8);
    }

    #[test]
    fn commutator_is_identity_except_corner() {
        let space = HilbertSpace::new(4, 4).unwrap();
        let ops = space.operators().unwrap();
        let a = &ops.a.matrix;
        let comm = a.matmul(&a.adjoint()).unwrap().sub(&a.adjoint().matmul(a).unwrap()).unwrap();
        for na in 0..4 {
            for nb in 0..4 {
                for s in 0..2 {
                    let i = space.index(na, nb, s);
                    let expected = if na == 3 { -3.0 } else { 1.0 };
                    assert!((comm[(i, i)].re - expected).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn empty_hamiltonian_vanishes() {
        let cfg = config(0.0, 0.0, 0.0);
        let h = build_hamiltonian(&cfg, 0.0, &HilbertSpace::new(3, 3).unwrap(), 1.0).unwrap();
        assert_eq!(h.matrix.norm_fro(), 0.0);
    }

    #[test]
    fn drive_matrix_element() {
        let cfg = config(0.0, 0.0, 0.1);
        let space = HilbertSpace::new(3, 3).unwrap();
        let h = build_hamiltonian(&cfg, 0.0, &space, 1.0).unwrap();
        let expected = Complex64::new(0.0, -(2.0 * cfg.rates.kappa_ex).sqrt() * 0.1);
        let vac = space.index(0, 0, 0);
        let one_a = space.index(1, 0, 0);
        assert!((h.matrix[(vac, one_a)] - expected).norm() < 1e-9 * expected.norm());
        // nothing but the drive survives on resonance without couplings
        let a = space.operators().unwrap().a.matrix;
        let drive_only = a.adjoint().sub(&a).unwrap().scale(-expected).unwrap();
        assert!(h.matrix.max_abs_diff(&drive_only) < 1e-9 * expected.norm());
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let cfg = config(TAU * 600e6, TAU * 30e9, 0.1);
        let space = HilbertSpace::new(4, 4).unwrap();
        let h = build_hamiltonian(&cfg, 0.37 * cfg.rates.kappa_tot(), &space, cfg.rates.kappa_tot()).unwrap();
        assert!(h.matrix.hermiticity_deviation() < 1e-12);
    }

    #[test]
    fn single_excitation_vacuum_rabi_splitting() {
        // With no drive, no detuning and h = 0, the block spanned by
        // |1,0,g⟩, |0,1,g⟩, |0,0,e⟩ has eigenvalues {−g, 0, +g}.
        let cfg = config(TAU * 600e6, 0.0, 0.0);
        let space = HilbertSpace::new(4, 4).unwrap();
        let unit = cfg.rates.kappa_tot();
        let h = build_hamiltonian(&cfg, 0.0, &space, unit).unwrap();
        let idx = [space.index(1, 0, 0), space.index(0, 1, 0), space.index(0, 0, 1)];
        let block = CMatrix::from_fn(3, 3, |i, j| h.matrix[(idx[i], idx[j])]).unwrap();
        let eig = hermitian_eigen(&block).unwrap();
        let g = cfg.rates.g / unit;
        assert!((eig.values[0] + g).abs() < 1e-12);
        assert!(eig.values[1].abs() < 1e-12);
        assert!((eig.values[2] - g).abs() < 1e-12);
    }
}
