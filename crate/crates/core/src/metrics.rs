//! Exact (infinite-shot) discrimination quantities.
//!
//! Coefficients use the unnormalised convention `μ_P = Tr(P Δρ)` throughout,
//! so a bias `A` maps to accuracy `1/2 + A/4` with `A ∈ [0, 2]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::encodings::{SignalOperator, StateVector};
use crate::error::{Error, Result};
use crate::linalg::trace_norm;
use crate::noise::{NoiseParam, FULL_CONTRACTION_P};
use crate::pauli::{enumerate_k_local, k_local_feasible, pauli_expectation, PauliString, WeightSpectrum};
use crate::scalar::Real;

/// Pauli coefficients `μ_P = Tr(P Δρ)` of a signal operator, keyed in
/// canonical order. Strings absent from the table have coefficient zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalCoefficients<T> {
    n: usize,
    entries: BTreeMap<PauliString, T>,
}

impl<T: Real> SignalCoefficients<T> {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, p: PauliString, mu: T) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.n(),
            });
        }
        if !mu.is_finite() || mu.abs() > T::lit(2.0) + T::HERMITIAN_TOL {
            return Err(Error::InvalidArgument(format!(
                "coefficient {mu} for {p} exceeds the trace-norm bound 2"
            )));
        }
        if p.is_identity() && mu.abs() > T::HERMITIAN_TOL {
            return Err(Error::InvalidArgument(format!(
                "identity coefficient {mu} must vanish for a traceless signal"
            )));
        }
        self.entries.insert(p, mu);
        Ok(())
    }

    pub fn get(&self, p: &PauliString) -> Option<T> {
        self.entries.get(p).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &T)> {
        self.entries.iter()
    }

    pub(crate) fn map(&self, f: impl Fn(&PauliString, T) -> T) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|(p, &v)| (*p, f(p, v))).collect(),
        }
    }

    /// `Tr(P Δρ)` for each listed string.
    pub fn from_operator(signal: &SignalOperator<T>, strings: impl IntoIterator<Item = PauliString>) -> Result<Self> {
        let mut out = Self::empty(signal.n_qubits());
        for p in strings {
            out.insert(p, pauli_expectation(&p, signal.matrix())?)?;
        }
        Ok(out)
    }

    /// All strings of weight `1..=k`.
    pub fn k_local(signal: &SignalOperator<T>, k: usize) -> Result<Self> {
        Self::from_operator(signal, enumerate_k_local(signal.n_qubits(), k)?)
    }

    /// `<ψ₊|P|ψ₊> − <ψ₋|P|ψ₋>` for pure class states; no dense matrices.
    pub fn from_statevectors(
        plus: &StateVector<T>,
        minus: &StateVector<T>,
        strings: impl IntoIterator<Item = PauliString>,
    ) -> Result<Self> {
        if plus.n() != minus.n() {
            return Err(Error::DimensionMismatch {
                expected: plus.n(),
                found: minus.n(),
            });
        }
        let mut out = Self::empty(plus.n());
        for p in strings {
            let mu = p.expectation_pure(plus.amplitudes())? - p.expectation_pure(minus.amplitudes())?;
            out.insert(p, mu)?;
        }
        Ok(out)
    }

    /// Largest `|μ_P|` per weight `0..=n`.
    pub fn weight_maxima(&self) -> Vec<T> {
        let mut max = vec![T::zero(); self.n + 1];
        for (p, v) in &self.entries {
            let w = p.weight();
            max[w] = max[w].max(v.abs());
        }
        max
    }
}

/// `A_k(p)` together with its maximizing string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AkResult<T> {
    pub value: T,
    pub argmax_string: PauliString,
    pub argmax_weight: usize,
}

fn check_locality(n: usize, k: usize) -> Result<()> {
    k_local_feasible(n, k)
}

/// `A_k(p) = max_{1 <= w(P) <= k} |μ_P| · |λ(p)|^{w(P)}`; ties resolve to the
/// first string in canonical order.
pub fn exact_ak<T: Real>(coeffs: &SignalCoefficients<T>, p: NoiseParam, k: usize) -> Result<AkResult<T>> {
    check_locality(coeffs.n, k)?;
    let lam = p.lambda::<T>().abs();
    let factors: Vec<T> = (0..=k).map(|w| lam.powi(w as i32)).collect();
    let mut best: Option<(PauliString, T)> = None;
    for candidate in enumerate_k_local(coeffs.n, k)? {
        let mu = coeffs.get(&candidate).unwrap_or_else(T::zero);
        let v = mu.abs() * factors[candidate.weight()];
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((candidate, v)),
        }
    }
    let (argmax_string, value) = best.ok_or_else(|| Error::Infeasible("empty candidate set".into()))?;
    Ok(AkResult {
        value,
        argmax_weight: argmax_string.weight(),
        argmax_string,
    })
}

/// `A_k(p)` from per-weight maxima, without the argmax.
fn ak_value<T: Real>(weight_max: &[T], lam: T, k: usize) -> T {
    (1..=k)
        .map(|w| weight_max[w] * lam.abs().powi(w as i32))
        .fold(T::zero(), T::max)
}

/// Optimal accuracy of a single ±1 observable with bias `A`: `1/2 + A/4`.
pub fn accuracy_from_bias<T: Real>(bias: T) -> Result<T> {
    let slack = T::HERMITIAN_TOL;
    if !(bias >= -slack && bias <= T::lit(2.0) + slack) {
        return Err(Error::InvalidArgument(format!("bias {bias} outside [0, 2]")));
    }
    let a = bias.max(T::zero()).min(T::lit(2.0));
    Ok(T::lit(0.5) + a / T::lit(4.0))
}

/// Helstrom optimum `1/2 + ‖Δρ‖₁/4` over unconstrained measurements.
pub fn helstrom_accuracy<T: Real>(noisy_signal: &SignalOperator<T>) -> Result<T> {
    Ok(T::lit(0.5) + trace_norm(noisy_signal.matrix())? / T::lit(4.0))
}

/// `(A_k / ‖Δρ‖₁, ‖Δρ‖₁ − A_k)`. Both below `1e-12` counts as fully
/// accessible; zero amplitude against a positive trace norm is fraction 0.
pub fn accessible_fraction_and_gap<T: Real>(ak: T, trace_norm: T) -> (T, T) {
    let tiny = T::lit(1e-12);
    let gap = trace_norm - ak;
    if trace_norm < tiny {
        // A_k <= ‖Δρ‖₁, so a vanishing trace norm means nothing is lost
        return (T::one(), gap);
    }
    if ak.is_zero() {
        return (T::zero(), gap);
    }
    (ak / trace_norm, gap)
}

/// `2^n · max_{1<=l<=k} |λ(p)|^l · W_l`, an upper bound on `A_k(p)`.
pub fn ak_upper_bound<T: Real>(spectrum: &WeightSpectrum<T>, p: NoiseParam, k: usize, n: usize) -> Result<T> {
    if k > n || spectrum.values.len() != n + 1 {
        return Err(Error::Locality { n, k });
    }
    let lam = p.lambda::<T>().abs();
    let scale = T::lit((1u64 << n) as f64);
    Ok(scale
        * (1..=k)
            .map(|l| lam.powi(l as i32) * spectrum.get(l))
            .fold(T::zero(), T::max))
}

/// Target `|A_k(p★) − ε|` for [`breakdown_threshold`].
pub const THRESHOLD_TOL: f64 = 1e-9;

/// Smallest `p★ ∈ [0, 3/4]` with `A_k(p★) = ε`, by bisection.
///
/// `None` when `A_k(0) < ε`: the signal is never resolvable.
pub fn breakdown_threshold<T: Real>(coeffs: &SignalCoefficients<T>, k: usize, eps: T) -> Result<Option<T>> {
    if eps.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidArgument(format!("resolution {eps} must be positive")));
    }
    check_locality(coeffs.n, k)?;
    let maxima = coeffs.weight_maxima();
    let at = |p: T| ak_value(&maxima, T::one() - T::lit(4.0) * p / T::lit(3.0), k);
    if at(T::zero()) < eps {
        return Ok(None);
    }
    let (mut lo, mut hi) = (T::zero(), T::lit(FULL_CONTRACTION_P));
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if at(mid) >= eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // lo is the last point still at or above ε
    let pick = if (at(lo) - eps).abs() <= (at(hi) - eps).abs() {
        lo
    } else {
        hi
    };
    Ok(Some(pick))
}

/// Classical Fisher information at `θ = 0` of a two-outcome measurement on
/// `ρ_θ = ρ̄ + (θ/2) N_p(Δρ)`: `(μ/4)² / (p₊ (1 − p₊))` with
/// `p₊ = (1 + Tr(M ρ̄))/2`.
pub fn fisher_information<T: Real>(mu: T, mean_bias: T) -> Result<T> {
    let p_plus = (T::one() + mean_bias) / T::lit(2.0);
    if !(p_plus > T::zero() && p_plus < T::one()) {
        return Err(Error::DegenerateOutcome(p_plus.to_f64().unwrap_or(f64::NAN)));
    }
    let slope = mu / T::lit(4.0);
    Ok(slope * slope / (p_plus * (T::one() - p_plus)))
}
