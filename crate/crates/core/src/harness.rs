//! Split-sample protocol and the `(p, k)` sweep.
//!
//! For every grid point the class states are prepared, passed through the
//! Kraus channel, and each weight-`<= k` Pauli string is measured with
//! `n_search` shots per state. The best string by `|μ̂|` is then re-measured
//! with `n_eval` fresh shots, which give both `Â_k` and the empirical
//! accuracy of the single-observable classifier.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encodings::{signal_operator, DensityMatrix, EncodingKind, EncodingSpec, StateVector};
use crate::error::{Error, Result};
use crate::linalg::trace_norm;
use crate::metrics::{
    accessible_fraction_and_gap, accuracy_from_bias, breakdown_threshold, exact_ak, SignalCoefficients,
};
use crate::noise::{depolarize_density, NoiseParam, FULL_CONTRACTION_P};
use crate::pauli::{enumerate_k_local, k_local_feasible, pauli_expectation, PauliString};
use crate::sampling::{operational_epsilon, probability_from_expectation, MuSample, RngStream, ShotBudget};

/// Above this many qubits class states are kept as state vectors and noisy
/// expectations come from the weight contraction instead of the Kraus sum.
pub const DENSE_QUBIT_LIMIT: usize = 8;
/// Trace norms are never attempted above this many qubits.
pub const MAX_TRACE_NORM_QUBITS: usize = 10;

const PHASE_SEARCH: u64 = 0;
const PHASE_EVAL: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub encoding: EncodingSpec,
    pub k_values: Vec<usize>,
    pub p_grid: Vec<f64>,
    pub budget: ShotBudget,
    pub master_seed: u64,
    pub compute_trace_norm: bool,
    /// Admit grid points in `(3/4, 1]`, where `λ(p) < 0`.
    #[serde(default)]
    pub allow_extended_p: bool,
}

/// `points` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points)
            .map(|i| {
                if i == points - 1 {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

/// Sixteen points on `[0, 3/4]`.
pub fn default_p_grid() -> Vec<f64> {
    linspace(0.0, FULL_CONTRACTION_P, 16)
}

impl ExperimentConfig {
    pub fn new(
        encoding: EncodingSpec,
        k_values: Vec<usize>,
        p_grid: Vec<f64>,
        budget: ShotBudget,
        master_seed: u64,
    ) -> Self {
        Self {
            compute_trace_norm: encoding.n <= DENSE_QUBIT_LIMIT,
            encoding,
            k_values,
            p_grid,
            budget,
            master_seed,
            allow_extended_p: false,
        }
    }

    /// The headline product-encoding experiment: n = 4, k ∈ {1,2,3}.
    pub fn fig1() -> Self {
        Self::new(
            EncodingSpec::product(4),
            vec![1, 2, 3],
            default_p_grid(),
            ShotBudget::default(),
            0,
        )
    }

    /// The headline entangling-encoding experiment: n = 4, θ = π/4, k ∈ {1,2,3}.
    pub fn fig2() -> Self {
        Self::new(
            EncodingSpec::entangling(4, crate::encodings::DEFAULT_THETA),
            vec![1, 2, 3],
            default_p_grid(),
            ShotBudget::default(),
            0,
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.encoding.validate().map_err(|e| Error::Config(e.to_string()))?;
        let n = self.encoding.n;
        if self.k_values.is_empty() {
            return Err(Error::Config("k_values must not be empty".into()));
        }
        if self.k_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("k_values must be strictly ascending".into()));
        }
        for &k in &self.k_values {
            k_local_feasible(n, k).map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.p_grid.is_empty() {
            return Err(Error::Config("p_grid must not be empty".into()));
        }
        if self
            .p_grid
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::Config("p_grid must be strictly ascending".into()));
        }
        let p_max = if self.allow_extended_p { 1.0 } else { FULL_CONTRACTION_P };
        if let Some(&bad) = self.p_grid.iter().find(|&&p| !(0.0..=p_max).contains(&p)) {
            return Err(Error::Config(format!(
                "p={bad} outside [0, {p_max}]{}",
                if self.allow_extended_p {
                    ""
                } else {
                    " (extended range requires an explicit override)"
                }
            )));
        }
        self.budget.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.compute_trace_norm && n > MAX_TRACE_NORM_QUBITS {
            return Err(Error::Config(format!(
                "trace norm requested at n={n}; dense eigensolves are limited to n <= {MAX_TRACE_NORM_QUBITS}"
            )));
        }
        Ok(())
    }

    pub fn epsilon(&self) -> f64 {
        operational_epsilon(self.budget.n_eval)
    }
}

/// One `(encoding, p, k)` sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub encoding: EncodingKind,
    pub n: usize,
    pub theta: f64,
    pub p: f64,
    pub k: usize,
    pub trace_norm: Option<f64>,
    #[serde(rename = "A_k_exact")]
    pub a_k_exact: f64,
    #[serde(rename = "A_k_hat")]
    pub a_k_hat: f64,
    #[serde(rename = "P_star")]
    pub p_star: PauliString,
    pub w_star: usize,
    pub acc_empirical: f64,
    pub acc_predicted_exact: f64,
    pub acc_predicted_hat: f64,
    pub accessible_fraction: Option<f64>,
    pub gap: Option<f64>,
    pub epsilon: f64,
    pub n_search: u64,
    pub n_eval: u64,
    pub master_seed: u64,
}

/// Noisy class states, either dense (Kraus route) or pure plus a contraction
/// factor (for sizes where dense matrices are too large).
#[derive(Clone, Debug)]
pub enum NoisyPair {
    Dense {
        plus: DensityMatrix<f64>,
        minus: DensityMatrix<f64>,
    },
    Contracted {
        plus: StateVector<f64>,
        minus: StateVector<f64>,
        lambda: f64,
    },
}

impl NoisyPair {
    pub fn prepare(spec: &EncodingSpec, p: NoiseParam, dense: bool) -> Result<Self> {
        if dense {
            let (a, b) = spec.prepare_pair::<f64>()?;
            Ok(Self::Dense {
                plus: depolarize_density(&a, p)?,
                minus: depolarize_density(&b, p)?,
            })
        } else {
            let (plus, minus) = spec.prepare_statevectors::<f64>()?;
            Ok(Self::Contracted {
                plus,
                minus,
                lambda: p.lambda(),
            })
        }
    }

    /// `(Tr(P ρ₊(p)), Tr(P ρ₋(p)))`.
    pub fn expectations(&self, pauli: &PauliString) -> Result<(f64, f64)> {
        match self {
            Self::Dense { plus, minus } => Ok((
                pauli_expectation(pauli, plus.matrix())?,
                pauli_expectation(pauli, minus.matrix())?,
            )),
            Self::Contracted { plus, minus, lambda } => {
                let f = lambda.powi(pauli.weight() as i32);
                Ok((
                    f * pauli.expectation_pure(plus.amplitudes())?,
                    f * pauli.expectation_pure(minus.amplitudes())?,
                ))
            }
        }
    }

    fn probabilities(&self, pauli: &PauliString) -> Result<(f64, f64)> {
        let (a, b) = self.expectations(pauli)?;
        Ok((probability_from_expectation(a), probability_from_expectation(b)))
    }

    /// `‖ρ₊(p) − ρ₋(p)‖₁`; only available for dense pairs.
    pub fn trace_norm(&self) -> Result<f64> {
        match self {
            Self::Dense { plus, minus } => trace_norm(signal_operator(plus, minus)?.matrix()),
            Self::Contracted { .. } => Err(Error::Infeasible("trace norm needs dense states".into())),
        }
    }
}

/// Identifies a sweep task; all of its random streams derive from this.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaskCoords {
    pub encoding: EncodingKind,
    pub n: usize,
    pub p_index: usize,
    pub k: usize,
}

impl TaskCoords {
    fn stream(&self, master_seed: u64, pauli_index: usize, phase: u64) -> RngStream {
        let tag = match self.encoding {
            EncodingKind::Product => 1,
            EncodingKind::Entangling => 2,
        };
        RngStream::for_task(
            master_seed,
            &[
                tag,
                self.n as u64,
                self.p_index as u64,
                self.k as u64,
                pauli_index as u64,
                phase,
            ],
        )
    }
}

/// Outcome of the selection phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Selection {
    pub p_star: PauliString,
    /// Position of `p_star` in the canonical candidate list.
    pub index: usize,
    pub mu_search: f64,
}

impl Selection {
    /// `+1` if the `+1` outcome votes for class `+`.
    pub fn orientation(&self) -> i8 {
        if self.mu_search < 0.0 {
            -1
        } else {
            1
        }
    }
}

/// Selection phase: `n_search` shots per state on every candidate, argmax of
/// `|μ̂|` with first-in-canonical-order tie-break.
pub fn split_sample_select(
    pair: &NoisyPair,
    candidates: &[PauliString],
    budget: &ShotBudget,
    master_seed: u64,
    coords: TaskCoords,
) -> Result<Selection> {
    let mut best: Option<Selection> = None;
    for (index, pauli) in candidates.iter().enumerate() {
        let (a, b) = pair.probabilities(pauli)?;
        let mut rng = coords.stream(master_seed, index, PHASE_SEARCH);
        let mu = MuSample::draw(a, b, budget.n_search, &mut rng)?.mu();
        match best {
            Some(s) if mu.abs() <= s.mu_search.abs() => {}
            _ => {
                best = Some(Selection {
                    p_star: *pauli,
                    index,
                    mu_search: mu,
                })
            }
        }
    }
    best.ok_or_else(|| Error::Infeasible("empty candidate set".into()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub a_hat: f64,
    pub acc_empirical: f64,
    pub mu_eval: f64,
    pub sample: MuSample,
}

/// Evaluation phase on fresh shots. The eval stream differs from every
/// search stream by its phase coordinate.
pub fn split_sample_evaluate(
    pair: &NoisyPair,
    selection: &Selection,
    budget: &ShotBudget,
    master_seed: u64,
    coords: TaskCoords,
) -> Result<Evaluation> {
    let (a, b) = pair.probabilities(&selection.p_star)?;
    let mut rng = coords.stream(master_seed, selection.index, PHASE_EVAL);
    let sample = MuSample::draw(a, b, budget.n_eval, &mut rng)?;
    let mu_eval = sample.mu();
    Ok(Evaluation {
        a_hat: mu_eval.abs(),
        acc_empirical: sample.accuracy(selection.orientation()),
        mu_eval,
        sample,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub p: f64,
    pub k: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepOutput {
    pub records: Vec<ResultRecord>,
    pub failures: Vec<PointFailure>,
}

/// Signal coefficients at `p = 0` for every string of weight `<= k_max`,
/// computed from the pure class states.
pub fn noiseless_coefficients(spec: &EncodingSpec, k_max: usize) -> Result<SignalCoefficients<f64>> {
    let (plus, minus) = spec.prepare_statevectors::<f64>()?;
    SignalCoefficients::from_statevectors(&plus, &minus, enumerate_k_local(spec.n, k_max)?)
}

struct GridPoint {
    pair: NoisyPair,
    trace_norm: Option<f64>,
}

/// Runs the full sweep on `workers` threads. Output order is k-major,
/// p-minor, and bytes do not depend on `workers`.
pub fn run_sweep(config: &ExperimentConfig, workers: usize) -> Result<SweepOutput> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| sweep_inner(config))
}

fn sweep_inner(config: &ExperimentConfig) -> Result<SweepOutput> {
    let spec = config.encoding;
    let n = spec.n;
    let k_max = *config.k_values.last().expect("validated non-empty");
    let coeffs = noiseless_coefficients(&spec, k_max)?;
    let candidates: Vec<Vec<PauliString>> = config
        .k_values
        .iter()
        .map(|&k| enumerate_k_local(n, k))
        .collect::<Result<_>>()?;
    let dense = n <= DENSE_QUBIT_LIMIT || config.compute_trace_norm;

    let grid: Vec<std::result::Result<GridPoint, String>> = config
        .p_grid
        .par_iter()
        .map(|&p| {
            let noise = NoiseParam::new(p).map_err(|e| e.to_string())?;
            let pair = NoisyPair::prepare(&spec, noise, dense).map_err(|e| e.to_string())?;
            let trace_norm = if config.compute_trace_norm {
                Some(pair.trace_norm().map_err(|e| e.to_string())?)
            } else {
                None
            };
            Ok(GridPoint { pair, trace_norm })
        })
        .collect();

    let tasks: Vec<(usize, usize)> = (0..config.k_values.len())
        .flat_map(|ki| (0..config.p_grid.len()).map(move |pi| (ki, pi)))
        .collect();
    let results: Vec<std::result::Result<ResultRecord, PointFailure>> = tasks
        .par_iter()
        .map(|&(ki, pi)| {
            let k = config.k_values[ki];
            let p = config.p_grid[pi];
            let fail = |message: String| PointFailure { p, k, message };
            let point = grid[pi].as_ref().map_err(|m| fail(m.clone()))?;
            let coords = TaskCoords {
                encoding: spec.kind,
                n,
                p_index: pi,
                k,
            };
            sweep_point(config, &coeffs, &candidates[ki], point, coords, p).map_err(|e| fail(e.to_string()))
        })
        .collect();

    let mut out = SweepOutput::default();
    for r in results {
        match r {
            Ok(rec) => out.records.push(rec),
            Err(f) => out.failures.push(f),
        }
    }
    Ok(out)
}

fn sweep_point(
    config: &ExperimentConfig,
    coeffs: &SignalCoefficients<f64>,
    candidates: &[PauliString],
    point: &GridPoint,
    coords: TaskCoords,
    p: f64,
) -> Result<ResultRecord> {
    let noise = NoiseParam::new(p)?;
    let exact = exact_ak(coeffs, noise, coords.k)?;
    let selection = split_sample_select(&point.pair, candidates, &config.budget, config.master_seed, coords)?;
    let eval = split_sample_evaluate(&point.pair, &selection, &config.budget, config.master_seed, coords)?;
    let (accessible_fraction, gap) = match point.trace_norm {
        Some(tn) => {
            let (f, g) = accessible_fraction_and_gap(exact.value, tn);
            (Some(f), Some(g))
        }
        None => (None, None),
    };
    Ok(ResultRecord {
        encoding: config.encoding.kind,
        n: config.encoding.n,
        theta: config.encoding.theta,
        p,
        k: coords.k,
        trace_norm: point.trace_norm,
        a_k_exact: exact.value,
        a_k_hat: eval.a_hat,
        p_star: selection.p_star,
        w_star: selection.p_star.weight(),
        acc_empirical: eval.acc_empirical,
        acc_predicted_exact: accuracy_from_bias(exact.value)?,
        acc_predicted_hat: 0.5 + 0.25 * eval.a_hat,
        accessible_fraction,
        gap,
        epsilon: config.epsilon(),
        n_search: config.budget.n_search,
        n_eval: config.budget.n_eval,
        master_seed: config.master_seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub encoding: EncodingKind,
    pub n: usize,
    pub theta: f64,
    pub k: usize,
    pub epsilon: f64,
    /// Bisection result on the exact amplitude; `None` if never resolvable.
    pub p_star: Option<f64>,
    /// `(3/4)(1 − ε / max_{w(P)=1} |μ_P|)`, available for `k = 1`.
    pub p_star_closed_form: Option<f64>,
    /// First grid point with `acc_empirical − 1/2 < ε/4`.
    pub sampled_crossing: Option<f64>,
}

/// Threshold `p★` at `ε = 1/sqrt(n_eval)`, with the sampled crossing taken
/// from `records` (matching encoding and `k`) when given.
pub fn threshold_report(
    config: &ExperimentConfig,
    k: usize,
    records: Option<&[ResultRecord]>,
) -> Result<ThresholdReport> {
    config.validate()?;
    let spec = config.encoding;
    let eps = config.epsilon();
    let coeffs = noiseless_coefficients(&spec, k)?;
    let p_star = breakdown_threshold(&coeffs, k, eps)?;
    let closed = if k == 1 {
        let m1 = coeffs.weight_maxima()[1];
        (m1 >= eps).then(|| FULL_CONTRACTION_P * (1.0 - eps / m1))
    } else {
        None
    };
    let sampled = records.and_then(|recs| {
        recs.iter()
            .filter(|r| r.k == k && r.encoding == spec.kind)
            .find(|r| r.acc_empirical - 0.5 < eps / 4.0)
            .map(|r| r.p)
    });
    Ok(ThresholdReport {
        encoding: spec.kind,
        n: spec.n,
        theta: spec.theta,
        k,
        epsilon: eps,
        p_star,
        p_star_closed_form: closed,
        sampled_crossing: sampled,
    })
}
