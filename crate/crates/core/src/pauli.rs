//! n-qubit Pauli strings in symplectic bit-mask form.
//!
//! Qubit `q` of an `n`-qubit string occupies bit `n - 1 - q` of both masks,
//! so qubit 0 is the most significant bit and the leftmost letter of the
//! text form. The same convention indexes computational basis states.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, MAX_QUBITS};
use crate::scalar::{re, Real};

/// Full 4^n coefficient sweeps are limited to this many qubits.
pub const MAX_FULL_ENUMERATION_QUBITS: usize = 6;
/// Above [`MAX_FULL_ENUMERATION_QUBITS`], k-local enumeration is limited to this locality.
pub const MAX_LARGE_N_LOCALITY: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Z => (false, true),
            Letter::Y => (true, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (false, true) => Letter::Z,
            (true, true) => Letter::Y,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis, stored as `(x-mask, z-mask)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: u8,
    x: u16,
    z: u16,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount { n, max: MAX_QUBITS });
    }
    Ok(())
}

impl PauliString {
    pub fn new(n: usize, x_mask: u32, z_mask: u32) -> Result<Self> {
        check_n(n)?;
        let full = (1u32 << n) - 1;
        if x_mask & !full != 0 || z_mask & !full != 0 {
            return Err(Error::InvalidArgument(format!(
                "masks ({x_mask:#b}, {z_mask:#b}) exceed {n} qubits"
            )));
        }
        Ok(Self {
            n: n as u8,
            x: x_mask as u16,
            z: z_mask as u16,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, 0, 0)
    }

    pub fn from_letters(letters: &[Letter]) -> Result<Self> {
        let n = letters.len();
        check_n(n)?;
        let (mut x, mut z) = (0u32, 0u32);
        for (q, l) in letters.iter().enumerate() {
            let (bx, bz) = l.bits();
            let bit = 1u32 << (n - 1 - q);
            if bx {
                x |= bit;
            }
            if bz {
                z |= bit;
            }
        }
        Self::new(n, x, z)
    }

    /// Single non-identity letter on qubit `q`.
    pub fn single(n: usize, q: usize, letter: Letter) -> Result<Self> {
        if q >= n {
            return Err(Error::InvalidArgument(format!("qubit {q} out of range for n={n}")));
        }
        let mut letters = vec![Letter::I; n];
        letters[q] = letter;
        Self::from_letters(&letters)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn x_mask(&self) -> u32 {
        self.x as u32
    }

    #[inline]
    pub fn z_mask(&self) -> u32 {
        self.z as u32
    }

    pub fn letter(&self, q: usize) -> Letter {
        let bit = 1u16 << (self.n() - 1 - q);
        Letter::from_bits(self.x & bit != 0, self.z & bit != 0)
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n()).map(|q| self.letter(q)).collect()
    }

    /// Number of non-identity tensor factors.
    #[inline]
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Relabels qubits: letter on qubit `q` moves to qubit `perm[q]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: perm.len(),
            });
        }
        let mut letters = vec![Letter::I; self.n()];
        for (q, &dst) in perm.iter().enumerate() {
            letters[dst] = self.letter(q);
        }
        Self::from_letters(&letters)
    }

    /// Number of Y factors mod 4; `P = i^{#Y} X^x Z^z`.
    #[inline]
    fn y_phase(&self) -> u32 {
        (self.x & self.z).count_ones() & 3
    }

    /// Nonzero entry of column `b`: `P|b> = phase · |b ^ x>`.
    #[inline]
    pub fn column_entry<T: Real>(&self, b: usize) -> (usize, Complex<T>) {
        let sign_flips = ((b as u32) & self.z_mask()).count_ones() & 1;
        let quarter_turns = (self.y_phase() + 2 * sign_flips) & 3;
        let phase = match quarter_turns {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        };
        (b ^ self.x as usize, phase)
    }

    /// `P|v>` for a state vector of length `2^n`.
    pub fn apply_to_vector<T: Real>(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.check_len(v.len())?;
        let mut out = vec![re(T::zero()); v.len()];
        for (b, amp) in v.iter().enumerate() {
            let (row, ph) = self.column_entry::<T>(b);
            out[row] = ph * amp;
        }
        Ok(out)
    }

    /// `<v|P|v>` for a (normalised) state vector; real for Hermitian `P`.
    pub fn expectation_pure<T: Real>(&self, v: &[Complex<T>]) -> Result<T> {
        self.check_len(v.len())?;
        let mut acc = re(T::zero());
        for (b, amp) in v.iter().enumerate() {
            let (row, ph) = self.column_entry::<T>(b);
            acc = acc + v[row].conj() * ph * amp;
        }
        Ok(acc.re)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        let dim = 1usize << self.n();
        if len != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: len,
            });
        }
        Ok(())
    }

    /// Canonical order key: ascending weight, then x-mask, then z-mask.
    fn canonical_key(&self) -> (u8, usize, u16, u16) {
        (self.n, self.weight(), self.x, self.z)
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_key().cmp(&other.canonical_key())
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n() {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|ch| match ch {
                'I' => Ok(Letter::I),
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                _ => Err(Error::PauliParse(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::PauliParse(s.to_string()));
        }
        Self::from_letters(&letters)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Whether `(n, k)` falls inside the supported enumeration envelope.
pub fn k_local_feasible(n: usize, k: usize) -> Result<()> {
    check_n(n)?;
    if k < 1 || k > n {
        return Err(Error::Locality { n, k });
    }
    if n > MAX_FULL_ENUMERATION_QUBITS && k > MAX_LARGE_N_LOCALITY {
        return Err(Error::Infeasible(format!(
            "k={k} at n={n}: above {MAX_FULL_ENUMERATION_QUBITS} qubits only k <= {MAX_LARGE_N_LOCALITY} is enumerated"
        )));
    }
    Ok(())
}

/// All strings with `1 <= weight <= k`, in canonical order.
pub fn enumerate_k_local(n: usize, k: usize) -> Result<Vec<PauliString>> {
    k_local_feasible(n, k)?;
    let mut out = Vec::new();
    for w in 1..=k {
        // supports of size w in ascending mask order; letters over {X,Y,Z}
        for support in (0u32..(1 << n)).filter(|m| m.count_ones() as usize == w) {
            let bits: Vec<u32> = (0..n as u32).filter(|b| support & (1 << b) != 0).collect();
            for code in 0..3usize.pow(w as u32) {
                let (mut x, mut z, mut c) = (0u32, 0u32, code);
                for &b in &bits {
                    match c % 3 {
                        0 => x |= 1 << b,
                        1 => z |= 1 << b,
                        _ => {
                            x |= 1 << b;
                            z |= 1 << b;
                        }
                    }
                    c /= 3;
                }
                out.push(PauliString::new(n, x, z)?);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// All 4^n strings including the identity, in canonical order.
pub fn enumerate_all(n: usize) -> Result<Vec<PauliString>> {
    check_n(n)?;
    if n > MAX_FULL_ENUMERATION_QUBITS {
        return Err(Error::Infeasible(format!(
            "full 4^n enumeration limited to n <= {MAX_FULL_ENUMERATION_QUBITS}, got {n}"
        )));
    }
    let mut out = Vec::with_capacity(1 << (2 * n));
    for x in 0u32..(1 << n) {
        for z in 0u32..(1 << n) {
            out.push(PauliString::new(n, x, z)?);
        }
    }
    out.sort();
    Ok(out)
}

/// Dense `2^n x 2^n` matrix of `P`.
pub fn realize_matrix<T: Real>(p: &PauliString) -> Result<ComplexMatrix<T>> {
    let dim = 1usize << p.n();
    let mut m = ComplexMatrix::zeros(dim)?;
    for b in 0..dim {
        let (row, ph) = p.column_entry::<T>(b);
        m[(row, b)] = ph;
    }
    Ok(m)
}

fn check_operator<T: Real>(p: &PauliString, a: &ComplexMatrix<T>) -> Result<()> {
    let dim = 1usize << p.n();
    if a.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: a.dim(),
        });
    }
    Ok(())
}

/// `Tr(P A)` in `O(2^n)`, using the single nonzero per column of `P`.
pub fn pauli_trace<T: Real>(p: &PauliString, a: &ComplexMatrix<T>) -> Result<Complex<T>> {
    check_operator(p, a)?;
    Ok(pauli_trace_unchecked(p, a))
}

fn pauli_trace_unchecked<T: Real>(p: &PauliString, a: &ComplexMatrix<T>) -> Complex<T> {
    let mut acc = re(T::zero());
    for b in 0..a.dim() {
        let (row, ph) = p.column_entry::<T>(b);
        acc = acc + ph * a[(b, row)];
    }
    acc
}

fn real_part<T: Real>(z: Complex<T>) -> Result<T> {
    if z.im.abs() >= T::IMAG_TOL {
        return Err(Error::NotReal(z.im.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(z.re)
}

/// `Tr(P A)` for Hermitian `A`, checked real. This is the unnormalised
/// coefficient used throughout the discrimination metrics.
pub fn pauli_expectation<T: Real>(p: &PauliString, a: &ComplexMatrix<T>) -> Result<T> {
    check_operator(p, a)?;
    a.ensure_hermitian()?;
    real_part(pauli_trace_unchecked(p, a))
}

/// Normalised coefficient `c_P = 2^{-n} Tr(P A)` of Hermitian `A`.
pub fn pauli_coefficient<T: Real>(p: &PauliString, a: &ComplexMatrix<T>) -> Result<T> {
    let scale = T::lit((1u64 << p.n()) as f64);
    Ok(pauli_expectation(p, a)? / scale)
}

/// Every `(P, c_P)` over the full 4^n basis, canonical order.
pub fn pauli_decomposition<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<(PauliString, T)>> {
    a.ensure_hermitian()?;
    let n = a.n_qubits();
    let scale = T::lit(a.dim() as f64);
    enumerate_all(n)?
        .into_iter()
        .map(|p| Ok((p, real_part(pauli_trace_unchecked(&p, a))? / scale)))
        .collect()
}

/// `W_l = Σ_{w(P)=l} |c_P|`, `l = 0..=n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpectrum<T> {
    pub values: Vec<T>,
}

impl<T: Real> WeightSpectrum<T> {
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, weight: usize) -> T {
        self.values[weight]
    }
}

pub fn weight_spectrum<T: Real>(a: &ComplexMatrix<T>) -> Result<WeightSpectrum<T>> {
    let n = a.n_qubits();
    let mut values = vec![T::zero(); n + 1];
    for (p, c) in pauli_decomposition(a)? {
        values[p.weight()] = values[p.weight()] + c.abs();
    }
    Ok(WeightSpectrum { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gates, kron};
    use crate::scalar::c;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Kronecker product of single-qubit matrices; independent of `column_entry`.
    fn kron_oracle(p: &PauliString) -> ComplexMatrix<f64> {
        let mut m = ComplexMatrix::identity(1).unwrap();
        for l in p.letters() {
            let g = match l {
                Letter::I => gates::id2(),
                Letter::X => gates::x(),
                Letter::Y => gates::y(),
                Letter::Z => gates::z(),
            };
            m = kron(&m, &g).unwrap();
        }
        m
    }

    #[test]
    fn weight_examples() {
        assert_eq!(ps("IIII").weight(), 0);
        assert_eq!(ps("XIYZ").weight(), 3);
        assert_eq!(ps("ZZZZ").weight(), 4);
    }

    #[test]
    fn text_form_round_trip() {
        for p in enumerate_all(3).unwrap() {
            assert_eq!(p.to_string().parse::<PauliString>().unwrap(), p);
        }
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
        let p = ps("XIIZ");
        assert_eq!(p.x_mask(), 0b1000);
        assert_eq!(p.z_mask(), 0b0001);
    }

    #[test]
    fn enumeration_examples() {
        let one = enumerate_k_local(1, 1).unwrap();
        let names: Vec<String> = one.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["Z", "X", "Y"]);
        assert_eq!(enumerate_k_local(4, 1).unwrap().len(), 12);
        assert_eq!(enumerate_k_local(4, 2).unwrap().len(), 66);
        assert!(matches!(enumerate_k_local(4, 0), Err(Error::Locality { .. })));
        assert!(matches!(enumerate_k_local(4, 5), Err(Error::Locality { .. })));
        assert!(matches!(enumerate_k_local(8, 4), Err(Error::Infeasible(_))));
        assert_eq!(enumerate_k_local(12, 3).unwrap().len(), 36 + 66 * 9 + 220 * 27);
    }

    #[test]
    fn enumeration_counts_match_binomial_formula() {
        for n in 1..=6 {
            for k in 1..=n {
                let expected: usize = (1..=k).map(|l| binom(n, l) * 3usize.pow(l as u32)).sum();
                let got = enumerate_k_local(n, k).unwrap();
                assert_eq!(got.len(), expected, "n={n} k={k}");
                assert!(got.windows(2).all(|w| w[0] < w[1]));
                assert!(got.iter().all(|p| (1..=k).contains(&p.weight())));
            }
            let mut full = enumerate_k_local(n, n).unwrap();
            full.push(PauliString::identity(n).unwrap());
            full.sort();
            full.dedup();
            assert_eq!(full.len(), 4usize.pow(n as u32));
            assert_eq!(full, enumerate_all(n).unwrap());
        }
    }

    #[test]
    fn realize_examples() {
        let x: ComplexMatrix<f64> = realize_matrix(&ps("X")).unwrap();
        assert_eq!(x, gates::x());
        let ii: ComplexMatrix<f64> = realize_matrix(&ps("II")).unwrap();
        assert_eq!(ii, ComplexMatrix::identity(4).unwrap());
        let zz: ComplexMatrix<f64> = realize_matrix(&ps("ZZ")).unwrap();
        assert_eq!(zz, ComplexMatrix::from_diag(&[1.0, -1.0, -1.0, 1.0]).unwrap());
        let xx: ComplexMatrix<f64> = realize_matrix(&ps("XX")).unwrap();
        assert_eq!(xx, kron(&gates::x(), &gates::x()).unwrap());
    }

    #[test]
    fn realized_matrices_match_kron_and_are_hermitian_unitary() {
        for p in enumerate_all(3).unwrap() {
            let m: ComplexMatrix<f64> = realize_matrix(&p).unwrap();
            assert_eq!(m, kron_oracle(&p), "{p}");
            assert_eq!(m.hermiticity_deviation(), 0.0);
            let sq = &m * &m;
            assert_eq!(sq, ComplexMatrix::identity(8).unwrap());
            let tr = m.trace();
            if p.is_identity() {
                assert_eq!(tr, c(8.0, 0.0));
            } else {
                assert_eq!(tr, c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn coefficient_examples() {
        let x: ComplexMatrix<f64> = gates::x();
        assert_eq!(pauli_coefficient(&ps("X"), &x).unwrap(), 1.0);
        let z: ComplexMatrix<f64> = gates::z();
        assert_eq!(pauli_coefficient(&ps("I"), &z).unwrap(), 0.0);
        // product encoding, n = 2: Δρ = (XI + IX)/2
        let xi = kron(&gates::x::<f64>(), &gates::id2()).unwrap();
        let ix = kron(&gates::id2::<f64>(), &gates::x()).unwrap();
        let delta = (&xi + &ix).scale(0.5);
        assert!((pauli_coefficient(&ps("XI"), &delta).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coefficient_errors() {
        let mut bad: ComplexMatrix<f64> = gates::x();
        bad[(0, 1)] = c(0.0, 1.0);
        assert!(matches!(pauli_coefficient(&ps("X"), &bad), Err(Error::NotHermitian(_))));
        let four = ComplexMatrix::<f64>::identity(4).unwrap();
        assert!(matches!(
            pauli_coefficient(&ps("X"), &four),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spectrum_examples() {
        let w = weight_spectrum(&gates::x::<f64>()).unwrap();
        assert_eq!(w.values, vec![0.0, 1.0]);
        let zero = ComplexMatrix::<f64>::zeros(8).unwrap();
        assert_eq!(weight_spectrum(&zero).unwrap().values, vec![0.0; 4]);
        let xi = kron(&gates::x::<f64>(), &gates::id2()).unwrap();
        let ix = kron(&gates::id2::<f64>(), &gates::x()).unwrap();
        let delta = (&xi + &ix).scale(0.5);
        let w = weight_spectrum(&delta).unwrap();
        assert!((w.values[0]).abs() < 1e-15);
        assert!((w.values[1] - 1.0).abs() < 1e-15);
        assert!((w.values[2]).abs() < 1e-15);
    }

    #[test]
    fn vector_action_matches_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v: Vec<Complex<f64>> = (0..8)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        for p in enumerate_all(3).unwrap() {
            let m = kron_oracle(&p);
            let pv = p.apply_to_vector(&v).unwrap();
            for r in 0..8 {
                let expected: Complex<f64> = (0..8).map(|col| m[(r, col)] * v[col]).sum();
                assert!((pv[r] - expected).norm() < 1e-14);
            }
        }
    }

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix<f64> {
        let dim = 1 << n;
        let mut m = ComplexMatrix::zeros(dim).unwrap();
        for i in 0..dim {
            m[(i, i)] = c(rng.random_range(-1.0..1.0), 0.0);
            for j in i + 1..dim {
                let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn decomposition_reconstructs_operator(seed in any::<u64>(), n in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_hermitian(n, &mut rng);
            let mut rebuilt = ComplexMatrix::zeros(1 << n).unwrap();
            let mut parseval = 0.0;
            for (p, coeff) in pauli_decomposition(&a).unwrap() {
                let pm: ComplexMatrix<f64> = realize_matrix(&p).unwrap();
                rebuilt = &rebuilt + &pm.scale(coeff);
                parseval += coeff * coeff;
            }
            prop_assert!(rebuilt.max_abs_diff(&a) < 1e-10);
            let tr_sq = (&a * &a).trace().re;
            prop_assert!((parseval * (1 << n) as f64 - tr_sq).abs() < 1e-9);
        }

        #[test]
        fn weight_is_permutation_invariant(x in 0u32..64, z in 0u32..64, seed in any::<u64>()) {
            let p = PauliString::new(6, x, z).unwrap();
            let mut perm: Vec<usize> = (0..6).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..6).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let q = p.permute(&perm).unwrap();
            prop_assert_eq!(q.weight(), p.weight());
            prop_assert_eq!(q.weight(), (x | z).count_ones() as usize);
        }

        #[test]
        fn mask_encoding_round_trips(n in 1usize..=12, x in any::<u32>(), z in any::<u32>()) {
            let full = (1u32 << n) - 1;
            let p = PauliString::new(n, x & full, z & full).unwrap();
            let q = PauliString::from_letters(&p.letters()).unwrap();
            prop_assert_eq!(p, q);
            prop_assert_eq!(q.to_string().parse::<PauliString>().unwrap(), p);
        }
    }
}
