//! Independent single-qubit depolarizing noise `N_p = D_p^{⊗n}`.
//!
//! Two routes: the Kraus sum acting on density matrices, and the diagonal
//! contraction `P -> λ(p)^{w(P)} P` acting on Pauli coefficients.

use serde::{Deserialize, Serialize};

use crate::encodings::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::metrics::SignalCoefficients;
use crate::pauli::{Letter, PauliString};
use crate::scalar::Real;

/// End of the physically monotone regime: `λ(3/4) = 0`.
pub const FULL_CONTRACTION_P: f64 = 0.75;

/// Depolarizing probability `p ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct NoiseParam(f64);

impl NoiseParam {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::NoiseParam(p));
        }
        Ok(Self(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `λ(p) = 1 − 4p/3`, the factor on every non-identity single-qubit Pauli.
    pub fn lambda<T: Real>(self) -> T {
        T::one() - T::lit(4.0) * T::lit(self.0) / T::lit(3.0)
    }
}

impl TryFrom<f64> for NoiseParam {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<NoiseParam> for f64 {
    fn from(p: NoiseParam) -> f64 {
        p.0
    }
}

/// `λ(p)` with range validation.
pub fn lambda(p: f64) -> Result<f64> {
    Ok(NoiseParam::new(p)?.lambda())
}

/// `P ρ P^H` for a Pauli string, using `P|b> = φ_b |b ^ x>`.
pub fn pauli_conjugate<T: Real>(p: &PauliString, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let dim = rho.dim();
    if dim != 1 << p.n() {
        return Err(Error::DimensionMismatch {
            expected: 1 << p.n(),
            found: dim,
        });
    }
    let x = p.x_mask() as usize;
    let phases: Vec<_> = (0..dim).map(|b| p.column_entry::<T>(b).1).collect();
    let mut out = ComplexMatrix::zeros(dim)?;
    for r in 0..dim {
        let (rs, pr) = (r ^ x, phases[r ^ x]);
        for col in 0..dim {
            let cs = col ^ x;
            out[(r, col)] = pr * rho[(rs, cs)] * phases[cs].conj();
        }
    }
    Ok(out)
}

/// Applies `D_p` to every qubit through the four-term Kraus sum
/// `(1 − p) ρ + (p/3) Σ_α σ_α ρ σ_α`.
pub fn depolarize_density<T: Real>(rho: &DensityMatrix<T>, p: NoiseParam) -> Result<DensityMatrix<T>> {
    let n = rho.n_qubits();
    let keep = T::one() - T::lit(p.value());
    let flip = T::lit(p.value()) / T::lit(3.0);
    let mut m = rho.matrix().clone();
    if p.value() == 0.0 {
        return Ok(rho.clone());
    }
    for q in 0..n {
        let mut acc = m.scale(keep);
        for letter in [Letter::X, Letter::Y, Letter::Z] {
            let sigma = PauliString::single(n, q, letter)?;
            acc = acc.try_add(&pauli_conjugate(&sigma, &m)?.scale(flip))?;
        }
        m = acc;
    }
    Ok(DensityMatrix::from_trusted(m))
}

/// Scales every entry by `λ(p)^{w(P)}`; a weight-0 entry is left unchanged.
pub fn contract_signal<T: Real>(coeffs: &SignalCoefficients<T>, p: NoiseParam) -> SignalCoefficients<T> {
    let lam: T = p.lambda();
    coeffs.map(|pauli, mu| mu * lam.powi(pauli.weight() as i32))
}
