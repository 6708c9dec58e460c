//! Dense complex linear algebra and time integration.
//!
//! Matrices are stored row-major. Tensor products always order their
//! factors left to right, so an operator on the joint space
//! `(mode a) ⊗ (mode b) ⊗ (emitter)` is `kron(kron(A, B), S)`.
//!
//! Factorizations (LU, Hermitian eigendecomposition) are delegated to
//! `faer`; everything else is implemented here.

use std::ops::{Index, IndexMut};

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Upper bound on the number of entries any single matrix may hold.
pub const MAX_ENTRIES: usize = 1 << 28;

/// Relative threshold below which a singular value is counted as zero
/// when deciding whether a null space is one-dimensional.
pub const DEGENERACY_RTOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

fn checked_len(rows: usize, cols: usize) -> Result<usize> {
    rows.checked_mul(cols)
        .filter(|&n| n <= MAX_ENTRIES)
        .ok_or_else(|| Error::Resource(format!("{rows}x{cols} matrix exceeds {MAX_ENTRIES} entries")))
}

fn ensure_finite(data: &[Complex64], what: &str) -> Result<()> {
    if data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_owned()))
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let len = checked_len(rows, cols).expect("matrix too large");
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; len],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = CMatrix::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        let len = checked_len(rows, cols)?;
        if data.len() != len {
            return Err(Error::Domain(format!(
                "expected {len} entries for a {rows}x{cols} matrix, got {}",
                data.len()
            )));
        }
        ensure_finite(&data, "matrix construction")?;
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let len = checked_len(rows, cols)?;
        let mut data = Vec::with_capacity(len);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ensure_finite(&data, "matrix construction")?;
        Ok(CMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute column sum; an upper bound on the spectral norm
    /// times `sqrt(rows)` and cheap to evaluate.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max |M - M†|` over all entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Result<CMatrix> {
        let data: Vec<_> = self.data.iter().map(|&z| z * s).collect();
        ensure_finite(&data, "scale")?;
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// `self += s * other`, in place.
    pub fn add_scaled(&mut self, s: Complex64, other: &CMatrix) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
        ensure_finite(&self.data, "add_scaled")
    }

    fn check_same_shape(&self, other: &CMatrix) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Domain(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &CMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<CMatrix> {
        self.check_same_shape(other)?;
        let data: Vec<_> = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        ensure_finite(&data, "elementwise op")?;
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::Domain(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        ensure_finite(&out.data, "matmul")?;
        Ok(out)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub(crate) fn to_faer(&self) -> Mat<Complex64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let rows = a
        .rows
        .checked_mul(b.rows)
        .ok_or_else(|| Error::Resource("kron row count overflows".into()))?;
    let cols = a
        .cols
        .checked_mul(b.cols)
        .ok_or_else(|| Error::Resource("kron column count overflows".into()))?;
    checked_len(rows, cols)?;
    let mut out = CMatrix::zeros(rows, cols);
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let s = a[(ia, ja)];
            if s == ZERO {
                continue;
            }
            for ib in 0..b.rows {
                let dst = (ia * b.rows + ib) * cols + ja * b.cols;
                for (o, &v) in out.data[dst..dst + b.cols].iter_mut().zip(b.row(ib)) {
                    *o = s * v;
                }
            }
        }
    }
    ensure_finite(&out.data, "kron")?;
    Ok(out)
}

/// `out += s (A ⊗ B)`, visiting only the nonzero entries of both factors.
pub fn kron_add_into(out: &mut CMatrix, s: Complex64, a: &CMatrix, b: &CMatrix) -> Result<()> {
    if out.rows != a.rows * b.rows || out.cols != a.cols * b.cols {
        return Err(Error::Domain("kron_add_into: output has the wrong shape".into()));
    }
    let b_nz: Vec<(usize, usize, Complex64)> = (0..b.rows)
        .flat_map(|i| (0..b.cols).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let v = b[(i, j)];
            (v != ZERO).then_some((i, j, v))
        })
        .collect();
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let av = a[(ia, ja)];
            if av == ZERO {
                continue;
            }
            let sa = s * av;
            for &(ib, jb, bv) in &b_nz {
                out[(ia * b.rows + ib, ja * b.cols + jb)] += sa * bv;
            }
        }
    }
    ensure_finite(&out.data, "kron_add_into")
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all(factors: &[&CMatrix]) -> Result<CMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::Domain("kron of an empty factor list".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, f| kron(&acc, f))
}

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in nondecreasing order.
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns, matching `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Eigendecomposition of a Hermitian matrix. Only the lower triangle is read.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::Domain("eigendecomposition of a non-square matrix".into()));
    }
    let evd = m
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Convergence(format!("hermitian eigendecomposition: {e:?}")))?;
    let n = m.rows();
    let s = evd.S();
    let u = evd.U();
    let values: Vec<f64> = (0..n).map(|k| s[k].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| u[(i, j)])?;
    Ok(HermitianEigen { values, vectors })
}

/// Unit vector spanning the null space of a square matrix, taken as the
/// eigenvector of `L†L` with the smallest eigenvalue.
///
/// Fails with [`Error::Degenerate`] when the two smallest singular values
/// are both indistinguishable from zero.
pub fn nullspace_hermitian_pair(l: &CMatrix) -> Result<Vec<Complex64>> {
    if !l.is_square() {
        return Err(Error::Domain("null space of a non-square matrix".into()));
    }
    let n = l.rows();
    let gram = l.adjoint().matmul(l)?;
    let evd = hermitian_eigen(&gram)?;
    let sigma_max = evd.values[n - 1].max(0.0).sqrt();
    let threshold = DEGENERACY_RTOL * sigma_max;
    if n >= 2 && evd.values[1].max(0.0).sqrt() <= threshold {
        return Err(Error::Degenerate(format!(
            "second singular value {:.3e} is below {:.3e}",
            evd.values[1].max(0.0).sqrt(),
            threshold
        )));
    }
    Ok(evd.vector(0))
}

/// Outcome of a dense real LU solve.
#[derive(Debug, Clone)]
pub struct RealSolve {
    pub x: Vec<f64>,
    /// `min |U_ii| / max |U_ii|`; a crude rank indicator.
    pub pivot_ratio: f64,
}

/// Solves `A x = b` for a dense real `n x n` matrix given row-major.
pub fn lu_solve_real(n: usize, a_row_major: &[f64], b: &[f64]) -> Result<RealSolve> {
    if a_row_major.len() != n * n || b.len() != n {
        return Err(Error::Domain("lu_solve_real: inconsistent dimensions".into()));
    }
    let a = Mat::<f64>::from_fn(n, n, |i, j| a_row_major[i * n + j]);
    let lu = a.partial_piv_lu();
    let u = lu.U();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for k in 0..n {
        let p = u[(k, k)].abs();
        lo = lo.min(p);
        hi = hi.max(p);
    }
    let rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
    let sol = faer::linalg::solvers::Solve::solve(&lu, &rhs);
    let x: Vec<f64> = (0..n).map(|i| sol[(i, 0)]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("lu_solve_real".into()));
    }
    let pivot_ratio = if hi > 0.0 { lo / hi } else { 0.0 };
    Ok(RealSolve { x, pivot_ratio })
}

/// Classical fourth-order Runge–Kutta stepper over complex state vectors.
pub struct Rk4 {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Rk4 {
            k1: vec![ZERO; dim],
            k2: vec![ZERO; dim],
            k3: vec![ZERO; dim],
            k4: vec![ZERO; dim],
            tmp: vec![ZERO; dim],
        }
    }

    /// Advances `x` by one step of size `h`. Returns the derivative at the
    /// start of the step (handy for stationarity checks).
    pub fn step<F>(&mut self, f: &mut F, x: &mut [Complex64], h: f64) -> Result<&[Complex64]>
    where
        F: FnMut(&[Complex64], &mut [Complex64]),
    {
        let half = 0.5 * h;
        f(x, &mut self.k1);
        for ((t, &xi), &k) in self.tmp.iter_mut().zip(x.iter()).zip(&self.k1) {
            *t = xi + k * half;
        }
        f(&self.tmp, &mut self.k2);
        for ((t, &xi), &k) in self.tmp.iter_mut().zip(x.iter()).zip(&self.k2) {
            *t = xi + k * half;
        }
        f(&self.tmp, &mut self.k3);
        for ((t, &xi), &k) in self.tmp.iter_mut().zip(x.iter()).zip(&self.k3) {
            *t = xi + k * h;
        }
        f(&self.tmp, &mut self.k4);
        let sixth = h / 6.0;
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]) * sixth;
        }
        ensure_finite(x, "rk4 step")?;
        Ok(&self.k1)
    }
}

/// Integrates `dx/dt = f(x)` from `x0` over `[0, t_end]` with steps no
/// larger than `h_t`.
pub fn rk4_evolve<F>(mut f: F, x0: &[Complex64], t_end: f64, h_t: f64) -> Result<Vec<Complex64>>
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    if !(h_t > 0.0) || !(t_end >= 0.0) {
        return Err(Error::Domain(format!("rk4_evolve: need h_t > 0 and t_end >= 0 (h_t = {h_t}, t_end = {t_end})")));
    }
    let steps = (t_end / h_t).ceil() as usize;
    let mut x = x0.to_vec();
    if steps == 0 {
        return Ok(x);
    }
    let h = t_end / steps as f64;
    let mut rk = Rk4::new(x.len());
    for _ in 0..steps {
        rk.step(&mut f, &mut x, h)?;
    }
    Ok(x)
}
