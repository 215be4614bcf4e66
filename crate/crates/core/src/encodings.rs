//! Class-conditional states for the two binary encodings and the signal
//! operator `Δρ = ρ₊ − ρ₋`.
//!
//! States are prepared as state vectors and only outer-producted into
//! density matrices when a dense representation is requested.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, MAX_QUBITS};
use crate::scalar::{c, re, Real};

pub const DEFAULT_THETA: f64 = std::f64::consts::FRAC_PI_4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    Product,
    Entangling,
}

impl EncodingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EncodingKind::Product => "product",
            EncodingKind::Entangling => "entangling",
        }
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub kind: EncodingKind,
    pub n: usize,
    /// RZ angle in radians; ignored by the product encoding.
    #[serde(default = "default_theta")]
    pub theta: f64,
}

fn default_theta() -> f64 {
    DEFAULT_THETA
}

impl EncodingSpec {
    pub fn product(n: usize) -> Self {
        Self {
            kind: EncodingKind::Product,
            n,
            theta: DEFAULT_THETA,
        }
    }

    pub fn entangling(n: usize, theta: f64) -> Self {
        Self {
            kind: EncodingKind::Entangling,
            n,
            theta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_QUBITS {
            return Err(Error::QubitCount {
                n: self.n,
                max: MAX_QUBITS,
            });
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "theta must be finite, got {}",
                self.theta
            )));
        }
        if self.kind == EncodingKind::Entangling && self.n < 2 {
            return Err(Error::InvalidArgument(
                "entangling encoding needs at least 2 qubits for the CNOT ring".into(),
            ));
        }
        Ok(())
    }

    /// Pure class states `(|ψ₊>, |ψ₋>)`.
    pub fn prepare_statevectors<T: Real>(&self) -> Result<(StateVector<T>, StateVector<T>)> {
        self.validate()?;
        match self.kind {
            EncodingKind::Product => product_statevectors(self.n),
            EncodingKind::Entangling => entangling_statevectors(self.n, T::lit(self.theta)),
        }
    }

    pub fn prepare_pair<T: Real>(&self) -> Result<(DensityMatrix<T>, DensityMatrix<T>)> {
        let (plus, minus) = self.prepare_statevectors()?;
        Ok((plus.density()?, minus.density()?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate<T> {
    H(usize),
    Rz { qubit: usize, theta: T },
    Cnot { control: usize, target: usize },
    Z(usize),
}

impl<T: Real> Gate<T> {
    fn check(&self, n: usize) -> Result<()> {
        let out_of_range = |q: usize| -> Result<()> {
            if q >= n {
                Err(Error::InvalidGate(format!("qubit {q} out of range for n={n}")))
            } else {
                Ok(())
            }
        };
        match *self {
            Gate::H(q) | Gate::Z(q) | Gate::Rz { qubit: q, .. } => out_of_range(q),
            Gate::Cnot { control, target } => {
                out_of_range(control)?;
                out_of_range(target)?;
                if control == target {
                    return Err(Error::InvalidGate(format!("CNOT with control = target = {control}")));
                }
                Ok(())
            }
        }
    }

    fn single_qubit_matrix(&self) -> Option<(usize, [[Complex<T>; 2]; 2])> {
        let o = re(T::zero());
        let l = re(T::one());
        match *self {
            Gate::H(q) => {
                let s = re(T::FRAC_1_SQRT_2());
                Some((q, [[s, s], [s, -s]]))
            }
            Gate::Z(q) => Some((q, [[l, o], [o, -l]])),
            Gate::Rz { qubit, theta } => {
                let half = theta / T::lit(2.0);
                Some((qubit, [[c(half.cos(), -half.sin()), o], [o, c(half.cos(), half.sin())]]))
            }
            Gate::Cnot { .. } => None,
        }
    }

    /// Left action on a length-`2^n` amplitude slice.
    fn apply_in_place(&self, n: usize, amps: &mut [Complex<T>]) {
        if let Some((q, g)) = self.single_qubit_matrix() {
            let bit = 1usize << (n - 1 - q);
            for b in (0..amps.len()).filter(|b| b & bit == 0) {
                let (a0, a1) = (amps[b], amps[b | bit]);
                amps[b] = g[0][0] * a0 + g[0][1] * a1;
                amps[b | bit] = g[1][0] * a0 + g[1][1] * a1;
            }
        } else if let Gate::Cnot { control, target } = *self {
            let cbit = 1usize << (n - 1 - control);
            let tbit = 1usize << (n - 1 - target);
            for b in (0..amps.len()).filter(|b| b & cbit != 0 && b & tbit == 0) {
                amps.swap(b, b | tbit);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|0...0>`.
    pub fn zero_state(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCount { n, max: MAX_QUBITS });
        }
        let mut amps = vec![re(T::zero()); 1 << n];
        amps[0] = re(T::one());
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::NotPowerOfTwo(len));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::QubitCount { n, max: MAX_QUBITS });
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn apply_gate(&mut self, gate: Gate<T>) -> Result<()> {
        gate.check(self.n)?;
        gate.apply_in_place(self.n, &mut self.amps);
        Ok(())
    }

    pub fn density(&self) -> Result<DensityMatrix<T>> {
        Ok(DensityMatrix(ComplexMatrix::outer(&self.amps)?))
    }
}

/// Unit-trace Hermitian positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T>(ComplexMatrix<T>);

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity and unit trace. Positivity is checked by
    /// [`DensityMatrix::check_positive`], which costs an eigensolve.
    pub fn new(mat: ComplexMatrix<T>) -> Result<Self> {
        let dev = mat.hermiticity_deviation();
        if dev > T::STATE_TOL {
            return Err(Error::InvalidState(format!("Hermiticity deviation {dev:e}")));
        }
        let tr = mat.trace();
        if (tr - re(T::one())).norm() > T::STATE_TOL {
            return Err(Error::InvalidState(format!("trace {} + {}i", tr.re, tr.im)));
        }
        Ok(Self(mat))
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        let dim = 1usize << n;
        let m = ComplexMatrix::identity(dim)?.scale(T::one() / T::lit(dim as f64));
        Self::new(m)
    }

    pub(crate) fn from_trusted(mat: ComplexMatrix<T>) -> Self {
        Self(mat)
    }

    pub fn check_positive(&self) -> Result<T> {
        let min = hermitian_eigenvalues(&self.0)?[0];
        if min < -T::lit(1e-9) {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(min)
    }

    pub fn purity(&self) -> T {
        self.0.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.0
    }

    pub fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    /// Applies `U ρ U^H` for a single gate, without forming `U`.
    pub fn apply_gate(&mut self, gate: Gate<T>) -> Result<()> {
        let n = self.n_qubits();
        gate.check(n)?;
        // U ρ U^H = (U (U ρ)^H)^H
        let half = left_apply_columns(&self.0, &gate)?;
        self.0 = left_apply_columns(&half.adjoint(), &gate)?.adjoint();
        Ok(())
    }
}

fn left_apply_columns<T: Real>(m: &ComplexMatrix<T>, gate: &Gate<T>) -> Result<ComplexMatrix<T>> {
    let dim = m.dim();
    let n = m.n_qubits();
    let mut data = m.as_slice().to_vec();
    let mut col = vec![re(T::zero()); dim];
    for j in 0..dim {
        for i in 0..dim {
            col[i] = data[i * dim + j];
        }
        gate.apply_in_place(n, &mut col);
        for i in 0..dim {
            data[i * dim + j] = col[i];
        }
    }
    ComplexMatrix::from_row_major(dim, data)
}

/// `Δρ = ρ₊ − ρ₋`: Hermitian and traceless.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalOperator<T>(ComplexMatrix<T>);

impl<T: Real> SignalOperator<T> {
    pub fn new(mat: ComplexMatrix<T>) -> Result<Self> {
        let dev = mat.hermiticity_deviation();
        if dev > T::STATE_TOL {
            return Err(Error::InvalidState(format!(
                "signal operator not Hermitian (deviation {dev:e})"
            )));
        }
        let tr = mat.trace().norm();
        if tr > T::STATE_TOL {
            return Err(Error::InvalidState(format!("signal operator trace {tr:e}")));
        }
        Ok(Self(mat))
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.0
    }

    pub fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }
}

pub fn signal_operator<T: Real>(
    rho_plus: &DensityMatrix<T>,
    rho_minus: &DensityMatrix<T>,
) -> Result<SignalOperator<T>> {
    SignalOperator::new(rho_plus.matrix().try_sub(rho_minus.matrix())?)
}

fn product_statevectors<T: Real>(n: usize) -> Result<(StateVector<T>, StateVector<T>)> {
    let mut plus = StateVector::zero_state(n)?;
    for q in 0..n {
        plus.apply_gate(Gate::H(q))?;
    }
    let mut minus = plus.clone();
    for q in 0..n {
        minus.apply_gate(Gate::Z(q))?;
    }
    Ok((plus, minus))
}

/// `|ψ₊> = CNOT-ring · RZ(θ)^⊗n · H^⊗n |0>`, `|ψ₋> = Z₀ |ψ₊>`.
fn entangling_statevectors<T: Real>(n: usize, theta: T) -> Result<(StateVector<T>, StateVector<T>)> {
    let mut plus = StateVector::zero_state(n)?;
    for q in 0..n {
        plus.apply_gate(Gate::H(q))?;
    }
    for q in 0..n {
        plus.apply_gate(Gate::Rz { qubit: q, theta })?;
    }
    for q in 0..n {
        plus.apply_gate(Gate::Cnot {
            control: q,
            target: (q + 1) % n,
        })?;
    }
    let mut minus = plus.clone();
    minus.apply_gate(Gate::Z(0))?;
    Ok((plus, minus))
}

/// `(|+><+|^⊗n, |−><−|^⊗n)`.
pub fn prepare_product_pair<T: Real>(n: usize) -> Result<(DensityMatrix<T>, DensityMatrix<T>)> {
    EncodingSpec::product(n).prepare_pair()
}

pub fn prepare_entangling_pair<T: Real>(spec: &EncodingSpec) -> Result<(DensityMatrix<T>, DensityMatrix<T>)> {
    if spec.kind != EncodingKind::Entangling {
        return Err(Error::InvalidArgument(format!(
            "expected an entangling encoding spec, got {}",
            spec.kind
        )));
    }
    spec.prepare_pair()
}
