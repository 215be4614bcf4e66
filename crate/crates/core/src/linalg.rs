//! Dense complex matrices over `2^n`-dimensional qubit spaces.
//!
//! Only what the discrimination quantities need: Kronecker products, a
//! cyclic Jacobi eigensolver for Hermitian matrices, the trace norm, the
//! sign operator attaining it, and `Tr(AB)` without forming `AB`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{re, Real};

/// Largest supported qubit count for dense operators (4096 x 4096).
pub const MAX_QUBITS: usize = 12;
pub const MAX_DIM: usize = 1 << MAX_QUBITS;

/// Sweep cap for the Jacobi eigensolver.
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Square complex matrix, row-major, side length a power of two.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    if dim > MAX_DIM {
        return Err(Error::QubitCount {
            n: dim.trailing_zeros() as usize,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = re(T::one());
        }
        Ok(m)
    }

    pub fn from_diag(diag: &[T]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = re(d);
        }
        Ok(m)
    }

    /// Builds a matrix from row-major entries; rejects non-square input,
    /// non-power-of-two sides and non-finite entries.
    pub fn from_row_major(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        let m = Self { dim, data };
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(dim, data)
    }

    /// `|v><v|` for a state vector `v`.
    pub fn outer(v: &[Complex<T>]) -> Result<Self> {
        let mut m = Self::zeros(v.len())?;
        for (i, a) in v.iter().enumerate() {
            for (j, b) in v.iter().enumerate() {
                m[(i, j)] = a * b.conj();
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits `n` with `dim = 2^n`.
    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    /// `max_ij |A_ij - conj(A_ji)|`.
    pub fn hermiticity_deviation(&self) -> T {
        let n = self.dim;
        let mut dev = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = self.hermiticity_deviation();
        if dev > T::HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "max_abs_diff: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        same_dim(self, rhs)?;
        let n = self.dim;
        let mut out = Self::zeros(n)?;
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re.is_zero() && a.im.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        Ok(out)
    }

    /// `U A U^H`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self> {
        same_dim(self, rhs)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

fn same_dim<T>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(())
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_add(rhs).expect("matrix add: dimension mismatch")
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_sub(rhs).expect("matrix sub: dimension mismatch")
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs).expect("matrix mul: dimension mismatch")
    }
}

/// Kronecker product `A ⊗ B`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let dim = a
        .dim
        .checked_mul(b.dim)
        .filter(|&d| d <= MAX_DIM)
        .ok_or(Error::QubitCount {
            n: a.n_qubits() + b.n_qubits(),
            max: MAX_QUBITS,
        })?;
    let mut out = ComplexMatrix::zeros(dim)?;
    let (da, db) = (a.dim, b.dim);
    for i in 0..da {
        for j in 0..da {
            let x = a.data[i * da + j];
            if x.re.is_zero() && x.im.is_zero() {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.data[(i * db + k) * dim + j * db + l] = x * b.data[k * db + l];
                }
            }
        }
    }
    Ok(out)
}

/// `Tr(AB) = Σ_ij A_ij B_ji`, without forming the product.
pub fn trace_product<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<Complex<T>> {
    same_dim(a, b)?;
    let n = a.dim;
    let mut acc = re(T::zero());
    for i in 0..n {
        for j in 0..n {
            acc = acc + a.data[i * n + j] * b.data[j * n + i];
        }
    }
    Ok(acc)
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching unit eigenvectors stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
    pub sweeps: usize,
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.dim;
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a.data[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi. Each rotation is a phase change making `a_pq`
/// real followed by the classical real plane rotation annihilating it.
fn jacobi<T: Real>(input: &ComplexMatrix<T>, want_vectors: bool) -> Result<HermitianEigen<T>> {
    input.ensure_hermitian()?;
    let n = input.dim;
    let mut a = input.clone();
    // symmetrize so rounding noise in the input cannot stall convergence
    for i in 0..n {
        a.data[i * n + i] = re(a.data[i * n + i].re);
        for j in i + 1..n {
            let avg = (a.data[i * n + j] + a.data[j * n + i].conj()).unscale(T::lit(2.0));
            a.data[i * n + j] = avg;
            a.data[j * n + i] = avg.conj();
        }
    }
    let mut v = if want_vectors {
        Some(ComplexMatrix::identity(n)?)
    } else {
        None
    };
    let tol = T::JACOBI_TOL * a.frobenius_norm().max(T::one());
    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a);
    while off >= tol {
        if sweeps == MAX_JACOBI_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off.to_f64().unwrap_or(f64::NAN),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.data[p * n + q];
                let g = apq.norm();
                if g <= T::min_positive_value() {
                    continue;
                }
                let app = a.data[p * n + p].re;
                let aqq = a.data[q * n + q].re;
                // phase e^{iφ} = a_pq / |a_pq|
                let phase = apq.unscale(g);
                let theta = (aqq - app) / (g + g);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
                let gpp = re(cs);
                let gpq = re(sn);
                let gqp = phase.conj() * (-sn);
                let gqq = phase.conj() * cs;
                // A <- A G
                for r in 0..n {
                    let x = a.data[r * n + p];
                    let y = a.data[r * n + q];
                    a.data[r * n + p] = x * gpp + y * gqp;
                    a.data[r * n + q] = x * gpq + y * gqq;
                }
                // A <- G^H A
                for col in 0..n {
                    let x = a.data[p * n + col];
                    let y = a.data[q * n + col];
                    a.data[p * n + col] = gpp.conj() * x + gqp.conj() * y;
                    a.data[q * n + col] = gpq.conj() * x + gqq.conj() * y;
                }
                a.data[p * n + q] = re(T::zero());
                a.data[q * n + p] = re(T::zero());
                a.data[p * n + p] = re(a.data[p * n + p].re);
                a.data[q * n + q] = re(a.data[q * n + q].re);
                if let Some(v) = v.as_mut() {
                    for r in 0..n {
                        let x = v.data[r * n + p];
                        let y = v.data[r * n + q];
                        v.data[r * n + p] = x * gpp + y * gqp;
                        v.data[r * n + q] = x * gpq + y * gqq;
                    }
                }
            }
        }
        off = off_diagonal_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a.data[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = match v {
        Some(v) => {
            let mut sorted = ComplexMatrix::zeros(n)?;
            for (dst, &src) in order.iter().enumerate() {
                for r in 0..n {
                    sorted.data[r * n + dst] = v.data[r * n + src];
                }
            }
            sorted
        }
        None => ComplexMatrix::zeros(1)?,
    };
    Ok(HermitianEigen {
        values,
        vectors,
        sweeps,
    })
}

pub fn hermitian_eigen<T: Real>(a: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    jacobi(a, true)
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<T>> {
    Ok(jacobi(a, false)?.values)
}

/// `‖A‖₁ = Σ|λ_i|` for Hermitian `A`.
pub fn trace_norm<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    Ok(hermitian_eigenvalues(a)?.into_iter().map(T::abs).sum())
}

/// `sign(A) = V · diag(sign λ_i) · V^H`, with zero eigenvalues mapped to 0.
///
/// An eigenvalue counts as zero when `|λ| <= JACOBI_TOL · max(1, ‖A‖_F)`.
pub fn sign_operator<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let eig = hermitian_eigen(a)?;
    let n = a.dim;
    let zero_tol = T::JACOBI_TOL * a.frobenius_norm().max(T::one());
    let signs: Vec<T> = eig
        .values
        .iter()
        .map(|&l| if l.abs() <= zero_tol { T::zero() } else { l.signum() })
        .collect();
    let mut m = ComplexMatrix::zeros(n)?;
    let vecs = &eig.vectors;
    for i in 0..n {
        for j in 0..n {
            let mut acc = re(T::zero());
            for (k, &s) in signs.iter().enumerate() {
                if !s.is_zero() {
                    acc = acc + vecs[(i, k)] * vecs[(j, k)].conj() * s;
                }
            }
            m[(i, j)] = acc;
        }
    }
    Ok(m)
}

/// Pauli and Clifford single-qubit matrices used across the crate and tests.
pub mod gates {
    use super::ComplexMatrix;
    use crate::scalar::{c, Real};

    pub fn id2<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::identity(2).unwrap()
    }

    pub fn x<T: Real>() -> ComplexMatrix<T> {
        let (o, l) = (T::zero(), T::one());
        ComplexMatrix::from_rows(&[vec![c(o, o), c(l, o)], vec![c(l, o), c(o, o)]]).unwrap()
    }

    pub fn y<T: Real>() -> ComplexMatrix<T> {
        let (o, l) = (T::zero(), T::one());
        ComplexMatrix::from_rows(&[vec![c(o, o), c(o, -l)], vec![c(o, l), c(o, o)]]).unwrap()
    }

    pub fn z<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_diag(&[T::one(), -T::one()]).unwrap()
    }

    pub fn h<T: Real>() -> ComplexMatrix<T> {
        let s = T::FRAC_1_SQRT_2();
        let o = T::zero();
        ComplexMatrix::from_rows(&[vec![c(s, o), c(s, o)], vec![c(s, o), c(-s, o)]]).unwrap()
    }

    /// `RZ(θ) = diag(e^{-iθ/2}, e^{iθ/2})`.
    pub fn rz<T: Real>(theta: T) -> ComplexMatrix<T> {
        let half = theta / T::lit(2.0);
        let o = T::zero();
        let mut m = ComplexMatrix::zeros(2).unwrap();
        m[(0, 0)] = c(half.cos(), -half.sin());
        m[(1, 1)] = c(half.cos(), half.sin());
        m[(0, 1)] = c(o, o);
        m
    }
}
