//! Steady states of the master equation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigen, lu_solve_real, nullspace_hermitian_pair, CMatrix, Rk4, ZERO};

use super::operators::HilbertSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SteadyStateMethod {
    /// Trace-constrained linear solve of `L vec(ρ) = 0` in real
    /// Hermitian coordinates.
    #[default]
    LinearSolve,
    /// Smallest eigenvector of `L†L`.
    NullSpace,
    /// RK4 integration from the vacuum until `ρ̇` is negligible.
    TimeEvolution,
}

/// Settings for the time-evolution path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSettings {
    /// Fraction of `1/‖L‖` used as the step size.
    pub step_fraction: f64,
    /// Stop once `‖vec(ρ̇)‖₂` falls below this (in units of the rate unit).
    pub derivative_tol: f64,
    pub max_steps: usize,
}

impl Default for EvolutionSettings {
    fn default() -> Self {
        EvolutionSettings {
            step_fraction: 0.1,
            derivative_tol: 1e-13,
            max_steps: 5_000_000,
        }
    }
}

/// `min |U_ii| / max |U_ii|` below which the constrained system is taken to
/// be singular, i.e. the null space has more than one dimension.
pub const PIVOT_RATIO_FLOOR: f64 = 1e-13;

/// Hermitian, unit-trace matrix on the joint space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

/// Deviations from a physical density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Physicality {
    pub trace_deviation: f64,
    pub hermiticity_deviation: f64,
    pub min_eigenvalue: f64,
    /// Population of the highest retained Fock level of mode a.
    pub top_fock_population_a: f64,
    pub top_fock_population_b: f64,
}

pub const TRACE_TOL: f64 = 1e-8;
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const MIN_EIGENVALUE_TOL: f64 = -1e-8;
pub const TRUNCATION_TOL: f64 = 1e-6;

impl Physicality {
    pub fn is_physical(&self) -> bool {
        self.trace_deviation < TRACE_TOL
            && self.hermiticity_deviation < HERMITICITY_TOL
            && self.min_eigenvalue > MIN_EIGENVALUE_TOL
    }

    /// True when the highest Fock level of both modes is essentially empty.
    pub fn truncation_adequate(&self) -> bool {
        self.top_fock_population_a < TRUNCATION_TOL && self.top_fock_population_b < TRUNCATION_TOL
    }
}

impl DensityMatrix {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Domain("density matrix must be square".into()));
        }
        Ok(DensityMatrix { matrix })
    }

    /// Reshapes a row-stacked vector, rescales to unit trace and removes the
    /// anti-Hermitian rounding residue.
    pub fn from_vectorized(v: &[Complex64], dim: usize) -> Result<Self> {
        let m = CMatrix::from_vec(dim, dim, v.to_vec())?;
        let tr = m.trace();
        if tr.norm() < 1e-300 {
            return Err(Error::Singular("steady-state vector has zero trace".into()));
        }
        let m = m.scale(1.0 / tr)?;
        let herm = m.add(&m.adjoint())?.scale(Complex64::new(0.5, 0.0))?;
        Ok(DensityMatrix { matrix: herm })
    }

    pub fn vacuum(space: &HilbertSpace) -> Self {
        let d = space.dim();
        let mut m = CMatrix::zeros(d, d);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        DensityMatrix { matrix: m }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `tr(ρ A)`
    pub fn expect(&self, op: &CMatrix) -> Result<Complex64> {
        Ok(self.matrix.matmul(op)?.trace())
    }

    pub fn physicality(&self, space: &HilbertSpace) -> Result<Physicality> {
        let eig = hermitian_eigen(&self.matrix)?;
        let mut top_a = 0.0;
        let mut top_b = 0.0;
        for na in 0..space.levels_a {
            for nb in 0..space.levels_b {
                for s in 0..2 {
                    let i = space.index(na, nb, s);
                    let p = self.matrix[(i, i)].re;
                    if na + 1 == space.levels_a {
                        top_a += p;
                    }
                    if nb + 1 == space.levels_b {
                        top_b += p;
                    }
                }
            }
        }
        Ok(Physicality {
            trace_deviation: (self.matrix.trace() - 1.0).norm(),
            hermiticity_deviation: self.matrix.hermiticity_deviation(),
            min_eigenvalue: eig.values[0],
            top_fock_population_a: top_a,
            top_fock_population_b: top_b,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// `‖L vec(ρ)‖₂ / ‖L‖_F`
    pub relative_residual: f64,
    pub method: SteadyStateMethod,
}

/// Relative residual a steady state must reach to be accepted.
pub const RESIDUAL_TOL: f64 = 1e-10;

pub fn steady_state(l: &CMatrix, dim: usize, method: SteadyStateMethod, evolution: &EvolutionSettings) -> Result<SteadyState> {
    if l.rows() != dim * dim || !l.is_square() {
        return Err(Error::Domain(format!(
            "Liouvillian is {}x{}, expected {n}x{n}",
            l.rows(),
            l.cols(),
            n = dim * dim
        )));
    }
    let rho = match method {
        SteadyStateMethod::LinearSolve => solve_linear(l, dim)?,
        SteadyStateMethod::NullSpace => DensityMatrix::from_vectorized(&nullspace_hermitian_pair(l)?, dim)?,
        SteadyStateMethod::TimeEvolution => evolve(l, dim, evolution)?,
    };
    let relative_residual = residual(l, &rho);
    if !(relative_residual < RESIDUAL_TOL) {
        return Err(Error::Convergence(format!(
            "steady-state residual {relative_residual:.3e} exceeds {RESIDUAL_TOL:e} ({method:?})"
        )));
    }
    Ok(SteadyState {
        rho,
        relative_residual,
        method,
    })
}

pub fn residual(l: &CMatrix, rho: &DensityMatrix) -> f64 {
    let r = l.matvec(rho.matrix().as_slice());
    let norm_l = l.norm_fro();
    let norm_r = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm_l == 0.0 {
        norm_r
    } else {
        norm_r / norm_l
    }
}

/// Real coordinates of a Hermitian `ρ`, reusing the row-stacked index
/// layout: slot `(i, i)` holds `ρ_ii`, and for `i < j` slot `(i, j)` holds
/// `Re ρ_ij` while slot `(j, i)` holds `Im ρ_ij`.
fn solve_linear(l: &CMatrix, d: usize) -> Result<DensityMatrix> {
    let n = d * d;
    let mut real = vec![0.0_f64; n * n];
    let mut coeff = vec![ZERO; n];
    for p in 0..d {
        for q in p..d {
            let row = l.row(p * d + q);
            for i in 0..d {
                coeff[i * d + i] = row[i * d + i];
                for j in (i + 1)..d {
                    let (lij, lji) = (row[i * d + j], row[j * d + i]);
                    coeff[i * d + j] = lij + lji;
                    coeff[j * d + i] = Complex64::new(0.0, 1.0) * (lij - lji);
                }
            }
            let re_row = &mut real[(p * d + q) * n..(p * d + q + 1) * n];
            for (r, c) in re_row.iter_mut().zip(&coeff) {
                *r = c.re;
            }
            if p != q {
                let im_row = &mut real[(q * d + p) * n..(q * d + p + 1) * n];
                for (r, c) in im_row.iter_mut().zip(&coeff) {
                    *r = c.im;
                }
            }
        }
    }
    // The diagonal rows sum to zero (trace preservation); swap one for the
    // normalization condition.
    let first = &mut real[0..n];
    first.fill(0.0);
    for i in 0..d {
        first[i * d + i] = 1.0;
    }
    let mut rhs = vec![0.0; n];
    rhs[0] = 1.0;
    let sol = lu_solve_real(n, &real, &rhs).map_err(|e| match e {
        Error::NonFinite(_) => Error::Degenerate("constrained steady-state system is singular".into()),
        other => other,
    })?;
    if sol.pivot_ratio < PIVOT_RATIO_FLOOR {
        return Err(Error::Degenerate(format!(
            "pivot ratio {:.3e} indicates more than one steady state",
            sol.pivot_ratio
        )));
    }
    let x = sol.x;
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = Complex64::new(x[i * d + i], 0.0);
        for j in (i + 1)..d {
            let z = Complex64::new(x[i * d + j], x[j * d + i]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    DensityMatrix::from_matrix(m)
}

fn evolve(l: &CMatrix, d: usize, settings: &EvolutionSettings) -> Result<DensityMatrix> {
    let norm = l.norm_one().max(l.norm_inf());
    if norm == 0.0 {
        return Ok(DensityMatrix::from_vectorized(&vacuum_vec(d), d)?);
    }
    let h = settings.step_fraction / norm;
    let mut x = vacuum_vec(d);
    let mut rk = Rk4::new(d * d);
    let mut f = |x: &[Complex64], dx: &mut [Complex64]| l.matvec_into(x, dx);
    for _ in 0..settings.max_steps {
        let deriv = rk.step(&mut f, &mut x, h)?;
        let rate = deriv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if rate < settings.derivative_tol {
            return DensityMatrix::from_vectorized(&x, d);
        }
    }
    Err(Error::Convergence(format!(
        "time evolution did not become stationary within {} steps",
        settings.max_steps
    )))
}

fn vacuum_vec(d: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; d * d];
    v[0] = Complex64::new(1.0, 0.0);
    v
}
