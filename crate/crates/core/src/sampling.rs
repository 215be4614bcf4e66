//! Finite-shot estimation of Pauli expectation values.
//!
//! A ±1 Pauli measurement is fully described by `p₊ = (1 + Tr(Pρ))/2`, so a
//! batch of `N` shots is drawn as a binomial count of `+1` outcomes. Every
//! batch owns an [`RngStream`] whose id is derived from task coordinates,
//! which makes results independent of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::encodings::DensityMatrix;
use crate::error::{Error, Result};
use crate::pauli::{pauli_expectation, PauliString};

/// Counter-based deterministic random stream: ChaCha8 keyed by the master
/// seed, with the 64-bit stream selector set to `stream_id`.
#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            rng,
        }
    }

    /// Stream for a task identified by its coordinates.
    pub fn for_task(master_seed: u64, coords: &[u64]) -> Self {
        Self::new(master_seed, stream_id(coords))
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Position of the block counter, in 32-bit words consumed.
    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit hash of a coordinate tuple (order-sensitive).
pub fn stream_id(coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(splitmix64(coords.len() as u64), |h, &c| splitmix64(h ^ splitmix64(c)))
}

/// Shots per Pauli string per class state, for each protocol phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotBudget {
    #[serde(rename = "search")]
    pub n_search: u64,
    #[serde(rename = "eval")]
    pub n_eval: u64,
}

impl ShotBudget {
    pub fn new(n_search: u64, n_eval: u64) -> Result<Self> {
        let b = Self { n_search, n_eval };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_search == 0 || self.n_eval == 0 {
            return Err(Error::InvalidArgument(format!(
                "shot budget must be positive, got search={} eval={}",
                self.n_search, self.n_eval
            )));
        }
        Ok(())
    }
}

impl Default for ShotBudget {
    fn default() -> Self {
        Self {
            n_search: 20_000,
            n_eval: 20_000,
        }
    }
}

/// Born probability of the `+1` outcome, `(1 + Tr(Pρ))/2`, clamped to `[0, 1]`.
pub fn outcome_probability(p: &PauliString, rho: &DensityMatrix<f64>) -> Result<f64> {
    Ok(probability_from_expectation(pauli_expectation(p, rho.matrix())?))
}

pub fn probability_from_expectation(expectation: f64) -> f64 {
    ((1.0 + expectation) / 2.0).clamp(0.0, 1.0)
}

/// Number of `+1` outcomes in `shots` independent measurements.
pub fn sample_plus_count(p_plus: f64, shots: u64, rng: &mut RngStream) -> Result<u64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be at least 1".into()));
    }
    let dist = Binomial::new(shots, p_plus.clamp(0.0, 1.0))
        .map_err(|e| Error::InvalidArgument(format!("binomial parameters: {e}")))?;
    Ok(dist.sample(rng.rng()))
}

/// Sample mean of ±1 outcomes from a `+1` count.
pub fn mean_from_count(plus: u64, shots: u64) -> f64 {
    (2.0 * plus as f64 - shots as f64) / shots as f64
}

/// Mean of `shots` simulated ±1 outcomes of `P` on `ρ`.
pub fn sample_expectation(p: &PauliString, rho: &DensityMatrix<f64>, shots: u64, rng: &mut RngStream) -> Result<f64> {
    let prob = outcome_probability(p, rho)?;
    Ok(mean_from_count(sample_plus_count(prob, shots, rng)?, shots))
}

/// Shot counts behind one estimate of `μ_P = <P>₊ − <P>₋`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MuSample {
    pub shots: u64,
    /// `+1` outcomes measured on `ρ₊`.
    pub plus_on_plus: u64,
    /// `+1` outcomes measured on `ρ₋`.
    pub plus_on_minus: u64,
}

impl MuSample {
    /// Draws `shots` outcomes on each class state, `ρ₊` first.
    pub fn draw(p_plus_state: f64, p_minus_state: f64, shots: u64, rng: &mut RngStream) -> Result<Self> {
        Ok(Self {
            shots,
            plus_on_plus: sample_plus_count(p_plus_state, shots, rng)?,
            plus_on_minus: sample_plus_count(p_minus_state, shots, rng)?,
        })
    }

    /// `2 (n₊ − n₋) / N`, in `[-2, 2]`.
    pub fn mu(&self) -> f64 {
        2.0 * (self.plus_on_plus as f64 - self.plus_on_minus as f64) / self.shots as f64
    }

    /// `½ [P(+1 | ρ₊) + P(−1 | ρ₋)]` when `+1` votes for class `+`
    /// (`orientation = 1`), or with the labels swapped (`orientation = -1`).
    pub fn accuracy(&self, orientation: i8) -> f64 {
        let n = self.shots;
        let (hits_plus, hits_minus) = if orientation >= 0 {
            (self.plus_on_plus, n - self.plus_on_minus)
        } else {
            (n - self.plus_on_plus, self.plus_on_minus)
        };
        (hits_plus + hits_minus) as f64 / (2 * n) as f64
    }
}

/// Difference of sample means of `P` on the two noisy class states, with
/// `shots` outcomes on each.
pub fn estimate_mu(
    p: &PauliString,
    rho_plus: &DensityMatrix<f64>,
    rho_minus: &DensityMatrix<f64>,
    shots: u64,
    rng: &mut RngStream,
) -> Result<f64> {
    let a = outcome_probability(p, rho_plus)?;
    let b = outcome_probability(p, rho_minus)?;
    Ok(MuSample::draw(a, b, shots, rng)?.mu())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence parameter δ={delta} outside (0, 1)"
        )));
    }
    Ok(())
}

/// Hoeffding half-width `sqrt(ln(2/δ) / (2N))`.
pub fn hoeffding_epsilon(shots: u64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be at least 1".into()));
    }
    Ok(((2.0 / delta).ln() / (2.0 * shots as f64)).sqrt())
}

/// `ceil(ln(2/δ) / (2A²))` shots to resolve a bias `A`.
pub fn required_shots(bias: f64, delta: f64) -> Result<u64> {
    check_delta(delta)?;
    if bias.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::BeyondHorizon(bias));
    }
    Ok(((2.0 / delta).ln() / (2.0 * bias * bias)).ceil() as u64)
}

/// Operational resolution `1/sqrt(N_eval)`.
pub fn operational_epsilon(n_eval: u64) -> f64 {
    1.0 / (n_eval as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::{EncodingSpec, DEFAULT_THETA};
    use crate::noise::{depolarize_density, NoiseParam};
    use crate::pauli::PauliString;
    use rand::RngCore;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = RngStream::new(42, 7);
        let mut b = RngStream::new(42, 7);
        let mut c = RngStream::new(42, 8);
        let xa: Vec<u64> = (0..8).map(|_| a.rng().next_u64()).collect();
        let xb: Vec<u64> = (0..8).map(|_| b.rng().next_u64()).collect();
        let xc: Vec<u64> = (0..8).map(|_| c.rng().next_u64()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
        assert_eq!(a.counter(), 16);
        assert_ne!(stream_id(&[1, 2]), stream_id(&[2, 1]));
        assert_ne!(stream_id(&[0]), stream_id(&[0, 0]));
    }

    #[test]
    fn outcome_probability_examples() {
        let (plus, _) = EncodingSpec::product(1).prepare_pair::<f64>().unwrap();
        assert!((outcome_probability(&ps("X"), &plus).unwrap() - 1.0).abs() < 1e-12);
        assert!((outcome_probability(&ps("Z"), &plus).unwrap() - 0.5).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        for p in ["XYZ", "IIZ", "YYI"] {
            assert_eq!(outcome_probability(&ps(p), &mixed).unwrap(), 0.5);
        }
    }

    #[test]
    fn sample_expectation_examples() {
        let (plus, _) = EncodingSpec::product(2).prepare_pair::<f64>().unwrap();
        let mut rng = RngStream::new(1, 1);
        for shots in [1, 17, 20_000] {
            assert_eq!(sample_expectation(&ps("XI"), &plus, shots, &mut rng).unwrap(), 1.0);
        }
        assert!(sample_expectation(&ps("XI"), &plus, 0, &mut rng).is_err());

        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let n = 10_000;
        let bound = 3.0 / (n as f64).sqrt();
        let inside = (0..200)
            .filter(|&s| {
                let mut rng = RngStream::new(9, s);
                sample_expectation(&ps("ZZ"), &mixed, n, &mut rng).unwrap().abs() <= bound
            })
            .count();
        assert!(inside >= 196, "{inside}/200 within 3/sqrt(N)");

        let draw = |seed| {
            let mut r = RngStream::new(seed, 3);
            sample_expectation(&ps("ZI"), &mixed, 999, &mut r).unwrap()
        };
        assert_eq!(draw(5).to_bits(), draw(5).to_bits());
    }

    #[test]
    fn estimate_mu_examples() {
        let (p, m) = EncodingSpec::product(1).prepare_pair::<f64>().unwrap();
        let mut rng = RngStream::new(3, 0);
        assert_eq!(estimate_mu(&ps("X"), &p, &m, 1000, &mut rng).unwrap(), 2.0);
        assert_eq!(estimate_mu(&ps("X"), &m, &p, 1000, &mut rng).unwrap(), -2.0);

        // Tr(Z Δρ) = 0 for the product encoding
        let n = 20_000;
        let bound = 3.0 * 2f64.sqrt() / (n as f64).sqrt();
        let inside = (0..100)
            .filter(|&s| {
                let mut rng = RngStream::new(11, s);
                estimate_mu(&ps("Z"), &p, &m, n, &mut rng).unwrap().abs() <= bound
            })
            .count();
        assert!(inside >= 97);

        let full = NoiseParam::new(0.75).unwrap();
        let (p4, m4) = EncodingSpec::product(4).prepare_pair::<f64>().unwrap();
        let p4 = depolarize_density(&p4, full).unwrap();
        let m4 = depolarize_density(&m4, full).unwrap();
        let mut rng = RngStream::new(2, 2);
        let mu = estimate_mu(&ps("IIIX"), &p4, &m4, n, &mut rng).unwrap();
        assert!(mu.abs() <= bound);
    }

    /// Mean of 200 independent estimates sits within 4/sqrt(200 N) of the
    /// exact noisy coefficient.
    #[test]
    fn estimate_mu_is_unbiased() {
        let spec = EncodingSpec::entangling(4, DEFAULT_THETA);
        let (p, m) = spec.prepare_pair::<f64>().unwrap();
        let noise = NoiseParam::new(0.2).unwrap();
        let (p, m) = (
            depolarize_density(&p, noise).unwrap(),
            depolarize_density(&m, noise).unwrap(),
        );
        let pauli = ps("XIIX");
        let exact = pauli_expectation(&pauli, p.matrix()).unwrap() - pauli_expectation(&pauli, m.matrix()).unwrap();
        let shots = 2_000;
        let streams = 200;
        let mean: f64 = (0..streams)
            .map(|s| estimate_mu(&pauli, &p, &m, shots, &mut RngStream::new(77, s)).unwrap())
            .sum::<f64>()
            / streams as f64;
        let eps = operational_epsilon(streams * shots);
        assert!((mean - exact).abs() <= 4.0 * eps, "mean {mean} exact {exact}");
    }

    #[test]
    fn accuracy_identity_holds_per_sample() {
        let mut rng = RngStream::new(5, 5);
        for (a, b) in [(0.9, 0.2), (0.3, 0.6), (0.5, 0.5)] {
            let s = MuSample::draw(a, b, 1234, &mut rng).unwrap();
            for o in [1i8, -1] {
                let lhs = s.accuracy(o);
                let rhs = 0.5 + o as f64 * s.mu() / 4.0;
                assert!((lhs - rhs).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn hoeffding_examples() {
        let delta = 2.0 / std::f64::consts::E.powi(2);
        let e = hoeffding_epsilon(20_000, delta).unwrap();
        assert!((e - (2.0f64 / 40_000.0).sqrt()).abs() < 1e-15);
        assert!((e - operational_epsilon(20_000)).abs() < 1e-15);
        let e4 = hoeffding_epsilon(80_000, delta).unwrap();
        assert!((e4 - e / 2.0).abs() < 1e-15);
        assert!(hoeffding_epsilon(100, 2.0).is_err());
        assert!(hoeffding_epsilon(100, 0.0).is_err());
        assert!(hoeffding_epsilon(0, 0.5).is_err());
    }

    #[test]
    fn required_shots_examples() {
        assert_eq!(required_shots(0.1, 0.05).unwrap(), 185);
        let a = required_shots(0.05, 0.01).unwrap();
        let b = required_shots(0.1, 0.01).unwrap();
        assert!(a.abs_diff(4 * b) <= 4);
        assert!(matches!(required_shots(0.0, 0.05), Err(Error::BeyondHorizon(_))));
        assert!(matches!(required_shots(-0.2, 0.05), Err(Error::BeyondHorizon(_))));
    }

    #[test]
    fn budget_validation() {
        assert!(ShotBudget::new(0, 5).is_err());
        assert!(ShotBudget::new(5, 0).is_err());
        assert_eq!(ShotBudget::default(), ShotBudget::new(20_000, 20_000).unwrap());
    }
}
