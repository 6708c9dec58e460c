//! Transfer-matrix description of the ring.
//!
//! Field labels follow the coupler convention: `a₀`/`b₀` are the waveguide
//! input (port 1) and output (port 2), `c₀`/`d₀` the port-2 input and
//! port-1 output; `a₁`, `b₁` are the counterclockwise ring fields leaving
//! and arriving at the coupler, `c₁`, `d₁` the clockwise ones; primed
//! fields sit at the emitter/scatterer site. The closed-form case
//! formulas are the production path; [`matrix_path`] composes the 4×4
//! matrices explicitly and is used to validate them.

use std::f64::consts::FRAC_PI_2;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{apply_direction, qe_transmission, SystemConfig};
use crate::numerics::{ONE, ZERO};

/// Smallest admissible denominator modulus in the case formulas.
pub const SINGULARITY_FLOOR: f64 = 1e-15;

/// Largest `|Δ₁| / κ_tot` for which `θ = Δ₁ τ_rt` stays in the
/// small-phase regime the rate bridge assumes.
pub const MAX_DETUNING_OVER_KAPPA: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix4(pub [[Complex64; 4]; 4]);

impl TransferMatrix4 {
    pub fn identity() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        TransferMatrix4(m)
    }

    pub fn apply(&self, v: [Complex64; 4]) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for (o, row) in out.iter_mut().zip(&self.0) {
            *o = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Determinant of the 2×2 diagonal block starting at `(k, k)`.
    pub fn block_determinant(&self, k: usize) -> Complex64 {
        let m = &self.0;
        m[k][k] * m[k + 1][k + 1] - m[k][k + 1] * m[k + 1][k]
    }

    pub fn determinant(&self) -> Complex64 {
        fn det3(m: [[Complex64; 3]; 3]) -> Complex64 {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        let m = &self.0;
        (0..4)
            .map(|col| {
                let mut minor = [[ZERO; 3]; 3];
                for (r, row) in minor.iter_mut().enumerate() {
                    let mut c = 0;
                    for j in (0..4).filter(|&j| j != col) {
                        row[c] = m[r + 1][j];
                        c += 1;
                    }
                }
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][col] * det3(minor)
            })
            .sum()
    }
}

impl Mul for TransferMatrix4 {
    type Output = TransferMatrix4;

    fn mul(self, rhs: TransferMatrix4) -> TransferMatrix4 {
        let mut out = [[ZERO; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, o) in row.iter_mut().enumerate() {
                *o = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        TransferMatrix4(out)
    }
}

/// Lossless point scatterer, `t_s = cos ε`, `r_s = i sin ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScattererCoefficients {
    pub t_s: Complex64,
    pub r_s: Complex64,
    pub epsilon: f64,
}

impl ScattererCoefficients {
    pub fn from_strength(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && (0.0..FRAC_PI_2).contains(&epsilon)) {
            return Err(Error::Domain(format!("scatterer strength {epsilon} must lie in [0, pi/2)")));
        }
        Ok(ScattererCoefficients {
            t_s: Complex64::new(epsilon.cos(), 0.0),
            r_s: Complex64::new(0.0, epsilon.sin()),
            epsilon,
        })
    }

    /// Weak-scatterer expansion `t_s ≈ 1 − ε²/2`, `r_s ≈ iε`.
    pub fn expanded(epsilon: f64) -> Self {
        ScattererCoefficients {
            t_s: Complex64::new(1.0 - 0.5 * epsilon * epsilon, 0.0),
            r_s: Complex64::new(0.0, epsilon),
            epsilon,
        }
    }
}

/// Coupling matrix: `(a₀, b₀, c₀, d₀)ᵀ = M_cpl (a₁, b₁, c₁, d₁)ᵀ`.
pub fn build_coupling_matrix(coupler: &crate::model::CouplerCoefficients) -> Result<TransferMatrix4> {
    let kappa = Complex64::new(coupler.kappa_c(), 0.0);
    if kappa.norm() == 0.0 {
        return Err(Error::Singular("coupler with zero cross-coupling has no transfer matrix".into()));
    }
    let t = Complex64::new(coupler.t(), 0.0);
    let pre = ONE / kappa.conj();
    let m = [
        [-pre, t.conj() * pre, ZERO, ZERO],
        [-t * pre, pre, ZERO, ZERO],
        [ZERO, ZERO, -pre, t.conj() * pre],
        [ZERO, ZERO, -t * pre, pre],
    ];
    Ok(TransferMatrix4(m))
}

/// Propagation matrix: `(a₁, b₁, c₁, d₁)ᵀ = M_pro (a₁′, b₁′, c₁′, d₁′)ᵀ`.
pub fn build_propagation_matrix(theta1: f64, theta2: f64, alpha1: f64, alpha2: f64) -> Result<TransferMatrix4> {
    for (name, a) in [("alpha1", alpha1), ("alpha2", alpha2)] {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::Singular(format!("{name} = {a} must lie in (0, 1]")));
        }
    }
    let e = |theta: f64| Complex64::from_polar(1.0, theta);
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = e(-theta1) / alpha1;
    m[1][1] = e(theta2) * alpha2;
    m[2][2] = e(-theta2) / alpha2;
    m[3][3] = e(theta1) * alpha1;
    Ok(TransferMatrix4(m))
}

fn ratio(num: Complex64, den: Complex64) -> Result<Complex64> {
    if den.norm() < SINGULARITY_FLOOR {
        return Err(Error::Singular(format!(
            "transmission denominator |{den}| below {SINGULARITY_FLOOR:e}"
        )));
    }
    Ok(num / den)
}

/// All-pass response with the round trip `α e^{iθ}` multiplied by `inner`.
fn all_pass(t: f64, round_trip: Complex64) -> Result<Complex64> {
    ratio(-t + round_trip, -1.0 + t * round_trip)
}

/// Factor `(t_s − t α e^{iθ}) / (1 − t_s t α e^{iθ})` picked up by the
/// counterclockwise wave once the scatterer feeds the clockwise mode back.
fn scatterer_factor(t: f64, round_trip: Complex64, sc: &ScattererCoefficients) -> Result<Complex64> {
    ratio(sc.t_s - t * round_trip, 1.0 - sc.t_s * t * round_trip)
}

/// Bare ring.
pub fn transmission_case1(theta: f64, t: f64, alpha: f64) -> Result<Complex64> {
    all_pass(t, alpha * Complex64::from_polar(1.0, theta))
}

/// Ring with a scatterer coupling the two directions.
pub fn transmission_case2(theta: f64, t: f64, alpha: f64, sc: &ScattererCoefficients) -> Result<Complex64> {
    let rt = alpha * Complex64::from_polar(1.0, theta);
    all_pass(t, rt * scatterer_factor(t, rt, sc)?)
}

/// Ring with the chirally coupled emitter acting as a phase–amplitude
/// modulator on the counterclockwise wave.
pub fn transmission_case3(theta: f64, t: f64, alpha: f64, t_qe: Complex64) -> Result<Complex64> {
    all_pass(t, alpha * Complex64::from_polar(1.0, theta) * t_qe)
}

/// Emitter and scatterer at the same site; the scatterer acts first.
pub fn transmission_case4(
    theta: f64,
    t: f64,
    alpha: f64,
    sc: &ScattererCoefficients,
    t_qe: Complex64,
) -> Result<Complex64> {
    let rt = alpha * Complex64::from_polar(1.0, theta);
    all_pass(t, rt * t_qe * scatterer_factor(t, rt, sc)?)
}

/// Round-trip phase relative to resonance, `θ = Δ₁ τ_rt`.
pub fn detuning_to_phase(delta1: f64, round_trip_time: f64) -> f64 {
    delta1 * round_trip_time
}

/// Transmission amplitude at detuning `delta1` (rad/s), choosing the
/// simplest applicable case. A backward probe sees no emitter.
pub fn tm_transmission(config: &SystemConfig, delta1: f64) -> Result<Complex64> {
    let config = apply_direction(config);
    let rates = &config.rates;
    if delta1.abs() > MAX_DETUNING_OVER_KAPPA * rates.kappa_tot() {
        return Err(Error::Domain(format!(
            "|delta1| exceeds {MAX_DETUNING_OVER_KAPPA} kappa_tot; the round-trip phase is no longer small"
        )));
    }
    let (d1, d2) = config.detunings(delta1);
    let theta = detuning_to_phase(d1, config.geometry.round_trip_time());
    let t = config.coupler.t();
    let alpha = config.coupler.alpha();
    let has_emitter = rates.emitter_decay > 0.0;
    let has_scatterer = rates.epsilon > 0.0;
    match (has_emitter, has_scatterer) {
        (false, false) => transmission_case1(theta, t, alpha),
        (false, true) => transmission_case2(theta, t, alpha, &ScattererCoefficients::from_strength(rates.epsilon)?),
        (true, false) => transmission_case3(theta, t, alpha, qe_transmission(d2, rates.gamma, rates.emitter_decay)?),
        (true, true) => transmission_case4(
            theta,
            t,
            alpha,
            &ScattererCoefficients::from_strength(rates.epsilon)?,
            qe_transmission(d2, rates.gamma, rates.emitter_decay)?,
        ),
    }
}

pub mod matrix_path {
    //! Transmission obtained by composing `M_cpl · M_pro` and closing the
    //! system with the element relations at the emitter/scatterer site and
    //! the boundary condition `c₀ = 0`.

    use super::*;

    /// Relations at the site linking `(b₁′, d₁′)` to `(a₁′, c₁′)`.
    #[derive(Debug, Clone, Copy)]
    pub enum SiteElement {
        Empty,
        Scatterer(ScattererCoefficients),
        Emitter(Complex64),
        EmitterAndScatterer(ScattererCoefficients, Complex64),
    }

    impl SiteElement {
        /// Columns give `(a₁′, b₁′, c₁′, d₁′)` for unit `a₁′` and unit `c₁′`.
        fn closure(&self) -> [[Complex64; 2]; 4] {
            let (b, d) = match *self {
                SiteElement::Empty => ([ONE, ZERO], [ZERO, ONE]),
                SiteElement::Scatterer(sc) => ([sc.t_s, sc.r_s], [sc.r_s, sc.t_s]),
                SiteElement::Emitter(tq) => ([tq, ZERO], [ZERO, ONE]),
                SiteElement::EmitterAndScatterer(sc, tq) => ([tq * sc.t_s, tq * sc.r_s], [sc.r_s, sc.t_s]),
            };
            [[ONE, ZERO], b, [ZERO, ONE], d]
        }
    }

    /// `b₀ / a₀` for port-1 input, with the ring split into arcs with phases
    /// `θ₁`, `θ₂` and amplitude factors `α₁`, `α₂`.
    pub fn transmission(
        coupler: &crate::model::CouplerCoefficients,
        theta1: f64,
        theta2: f64,
        alpha1: f64,
        alpha2: f64,
        site: SiteElement,
    ) -> Result<Complex64> {
        let m = build_coupling_matrix(coupler)? * build_propagation_matrix(theta1, theta2, alpha1, alpha2)?;
        let s = site.closure();
        // Port fields as linear functions of (a₁′, c₁′).
        let mut port = [[ZERO; 2]; 4];
        for (r, row) in port.iter_mut().enumerate() {
            for (col, p) in row.iter_mut().enumerate() {
                *p = (0..4).map(|k| m.0[r][k] * s[k][col]).sum();
            }
        }
        // c₀ = port[2][0] a₁′ + port[2][1] c₁′ = 0.
        let (a1p, c1p) = if port[2][1].norm() > 0.0 {
            (ONE, -port[2][0] / port[2][1])
        } else {
            (ONE, ZERO)
        };
        let a0 = port[0][0] * a1p + port[0][1] * c1p;
        let b0 = port[1][0] * a1p + port[1][1] * c1p;
        ratio(b0, a0)
    }
}
