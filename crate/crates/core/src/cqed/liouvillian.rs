use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::RateSet;
use crate::numerics::{kron_add_into, CMatrix, I};

use super::operators::{HilbertSpace, OperatorMatrix};

/// Default cap on the superoperator dimension `D²`.
pub const DEFAULT_MAX_LIOUVILLIAN_DIM: usize = 4096;

/// Superoperator `L` with `vec(ρ̇) = L vec(ρ)`, where `vec` stacks rows
/// (`ρ_ij` sits at index `i·D + j`), so `vec(AρB) = (A ⊗ Bᵀ) vec(ρ)`.
///
/// Dissipators carry no factor ½: `κ_tot (2aρa† − a†aρ − ρa†a)` for both
/// modes and `γ (2σ⁻ρσ⁺ − σ⁺σ⁻ρ − ρσ⁺σ⁻)` for the emitter, so `κ_tot` and
/// `γ` are amplitude decay rates. Rates are divided by `rate_unit` to match
/// a Hamiltonian built in the same unit.
pub fn build_liouvillian(
    hamiltonian: &OperatorMatrix,
    rates: &RateSet,
    space: &HilbertSpace,
    rate_unit: f64,
    max_dim: usize,
) -> Result<CMatrix> {
    let d = space.dim();
    if hamiltonian.matrix.rows() != d || !hamiltonian.matrix.is_square() {
        return Err(Error::Domain(format!(
            "Hamiltonian is {}x{}, expected {d}x{d}",
            hamiltonian.matrix.rows(),
            hamiltonian.matrix.cols()
        )));
    }
    let n = d
        .checked_mul(d)
        .ok_or_else(|| Error::Resource("Liouvillian dimension overflows".into()))?;
    if n > max_dim {
        return Err(Error::Resource(format!(
            "Liouvillian dimension {n} exceeds the cap of {max_dim}"
        )));
    }
    let ops = space.operators()?;
    let kappa = rates.kappa_tot() / rate_unit;
    let gamma = rates.gamma / rate_unit;
    let channels = [
        (kappa, &ops.a.matrix),
        (kappa, &ops.b.matrix),
        (gamma, &ops.sigma_minus.matrix),
    ];

    let h = &hamiltonian.matrix;
    // L = A_left ⊗ 1 + 1 ⊗ A_rightᵀ + Σ 2r c ⊗ c̄
    let mut left = h.scale(-I)?;
    let mut right = h.scale(I)?;
    for &(rate, c) in &channels {
        if rate == 0.0 {
            continue;
        }
        let cdc = c.adjoint().matmul(c)?;
        left.add_scaled(Complex64::new(-rate, 0.0), &cdc)?;
        right.add_scaled(Complex64::new(-rate, 0.0), &cdc)?;
    }
    let id = CMatrix::identity(d);
    let one = Complex64::new(1.0, 0.0);
    let mut l = CMatrix::zeros(n, n);
    kron_add_into(&mut l, one, &left, &id)?;
    kron_add_into(&mut l, one, &id, &right.transpose())?;
    for &(rate, c) in &channels {
        if rate == 0.0 {
            continue;
        }
        kron_add_into(&mut l, Complex64::new(2.0 * rate, 0.0), c, &c.conj())?;
    }
    Ok(l)
}
