//! Sampling realization of the instrument protocol: draw an instrument
//! outcome `i` with probability `p(i) = Tr[E_i(rho)]`, measure the observable
//! on the conditional state `rho_i = E_i(rho)/p(i)`, record `X = lambda_i * a`
//! and average. The mean is unbiased for `Tr[L(rho) A]` and the spread of `X`
//! is tracked for standard errors.
//!
//! Shot `j` draws from a counter-based substream keyed by `(seed, j)` and the
//! reduction runs in shot-index order, so results are bit-identical across
//! runs and indifferent to how shots would be scheduled.

use num_complex::Complex64;
use serde::Serialize;

use crate::channels::{validate_observable, validate_state, StatisticalDecomposition};
use crate::correlator::CorrelatorPair;
use crate::dilation::Dilation;
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, quadratic_form, ComplexMatrix};
use crate::rng::CounterRng;

/// Hard floor for outcome probabilities: anything below this is a failure,
/// values between the floor and zero are clipped to zero and renormalized.
const PROBABILITY_FLOOR: f64 = -1e-10;

/// One protocol shot: instrument outcome, measured eigenvalue, coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShotRecord {
    pub outcome: usize,
    pub eigenvalue: f64,
    pub weight: f64,
}

impl ShotRecord {
    /// The per-shot estimator contribution `lambda_i * a`.
    pub fn value(&self) -> f64 {
        self.weight * self.eigenvalue
    }
}

/// Per-outcome tallies of an estimation run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeStats {
    pub outcome: usize,
    pub frequency: u64,
    pub mean_eigenvalue: f64,
}

/// Aggregated result of a sampling run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimatorResult {
    pub shots: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub per_outcome: Vec<OutcomeStats>,
    pub seed: u64,
}

/// Complex correlation estimate assembled from two independent pipelines.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub dim: usize,
    pub shots: u64,
    pub seed: u64,
    pub estimate_re: f64,
    pub estimate_im: f64,
    pub std_error_re: f64,
    pub std_error_im: f64,
    pub l1_cost_real: f64,
    pub l1_cost_imag: f64,
    pub real_pipeline: EstimatorResult,
    pub imag_pipeline: EstimatorResult,
}

impl CorrelationEstimate {
    pub fn estimate(&self) -> Complex64 {
        Complex64::new(self.estimate_re, self.estimate_im)
    }
}

/// Robertson inequality report for a pair of observables.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub dim: usize,
    pub shots: u64,
    pub seed: u64,
    /// Estimate of `Tr[A rho B]`.
    pub forward: CorrelationEstimate,
    /// Estimate of `Tr[B rho A]`.
    pub reverse: CorrelationEstimate,
    pub commutator_re: f64,
    pub commutator_im: f64,
    /// Half the commutator magnitude: the Robertson lower bound.
    pub bound: f64,
    pub bound_std_error: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    /// The product `delta_a * delta_b` tested against the bound.
    pub product: f64,
    /// Five propagated standard errors of the bound.
    pub margin: f64,
    pub verdict: String,
}

/// Exact outcome distribution used by the sampler: `Tr[E_i(rho)]` clipped at
/// zero (hard error below -1e-10) and renormalized.
pub fn outcome_probabilities(
    dec: &StatisticalDecomposition,
    rho: &ComplexMatrix,
) -> Result<Vec<f64>> {
    if dec.is_empty() {
        return Err(Error::InvalidInput("empty decomposition".into()));
    }
    validate_state(rho)?;
    let mut probs = Vec::with_capacity(dec.len());
    for part in dec.parts() {
        let p = part.apply(rho)?.trace().re;
        if p < PROBABILITY_FLOOR {
            return Err(Error::NumericalFailure(format!(
                "outcome probability {p:.3e} below the clipping floor"
            )));
        }
        probs.push(p.max(0.0));
    }
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return Err(Error::NumericalFailure(
            "all outcome probabilities vanish".into(),
        ));
    }
    for p in &mut probs {
        *p /= total;
    }
    Ok(probs)
}

/// Draws one instrument outcome and its conditional output state
/// `rho_i = E_i(rho) / p(i)`.
pub fn sample_instrument(
    dec: &StatisticalDecomposition,
    rho: &ComplexMatrix,
    stream: &mut CounterRng,
) -> Result<(usize, ComplexMatrix)> {
    let probs = outcome_probabilities(dec, rho)?;
    let i = pick(&cumulative(&probs), stream.next_f64());
    let raw = dec.parts()[i].apply(rho)?;
    let p = raw.trace().re;
    Ok((i, raw.scale(Complex64::new(1.0 / p, 0.0))))
}

/// Eigenvalues of an observable merged at tolerance `1e-9 * max(1, ||O||)`,
/// with the member columns of each merged group.
fn merged_spectrum(
    o: &ComplexMatrix,
) -> Result<(Vec<f64>, Vec<Vec<usize>>, crate::linalg::HermitianEigen)> {
    let eig = eig_hermitian(o)?;
    let tol = 1e-9 * o.norm_max().max(1.0);
    let mut values = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, &v) in eig.values.iter().enumerate() {
        match groups.last_mut() {
            Some(group) if (v - eig.values[group[0]]).abs() <= tol => group.push(k),
            _ => {
                groups.push(vec![k]);
                values.push(0.0);
            }
        }
    }
    for (g, group) in groups.iter().enumerate() {
        values[g] = group.iter().map(|&k| eig.values[k]).sum::<f64>() / group.len() as f64;
    }
    Ok((values, groups, eig))
}

/// Born probabilities of the merged eigenvalue groups on `rho`.
fn born_probabilities(
    groups: &[Vec<usize>],
    eig: &crate::linalg::HermitianEigen,
    rho: &ComplexMatrix,
) -> Vec<f64> {
    let mut probs: Vec<f64> = groups
        .iter()
        .map(|group| {
            group
                .iter()
                .map(|&k| quadratic_form(rho, &eig.vectors.column(k)).re)
                .sum::<f64>()
                .max(0.0)
        })
        .collect();
    let total: f64 = probs.iter().sum();
    if total > 0.0 {
        for p in &mut probs {
            *p /= total;
        }
    }
    probs
}

/// Projectively measures an observable on a state: one Born-rule draw.
pub fn measure_observable(
    o: &ComplexMatrix,
    rho: &ComplexMatrix,
    stream: &mut CounterRng,
) -> Result<f64> {
    validate_observable(o)?;
    validate_state(rho)?;
    if o.rows() != rho.rows() {
        return Err(Error::DimensionMismatch(format!(
            "observable side {} does not match state side {}",
            o.rows(),
            rho.rows()
        )));
    }
    let (values, groups, eig) = merged_spectrum(o)?;
    let probs = born_probabilities(&groups, &eig, rho);
    let k = pick(&cumulative(&probs), stream.next_f64());
    Ok(values[k])
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut cum = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cum.push(acc);
    }
    cum
}

/// First index whose cumulative weight exceeds `u`; falls back to the last
/// positive-probability index when rounding leaves `u` past the end.
fn pick(cum: &[f64], u: f64) -> usize {
    let mut last_positive = 0;
    let mut prev = 0.0;
    for (idx, &c) in cum.iter().enumerate() {
        if c > prev {
            last_positive = idx;
        }
        if u < c {
            return idx;
        }
        prev = c;
    }
    last_positive
}

/// Precomputed tables driving the per-shot loop: the outcome distribution and
/// one Born distribution per conditional state. The per-shot work is then two
/// uniform draws and two table walks.
struct PreparedSampler {
    weights: Vec<f64>,
    outcome_cum: Vec<f64>,
    values: Vec<f64>,
    born_cum: Vec<Option<Vec<f64>>>,
}

impl PreparedSampler {
    fn new(dec: &StatisticalDecomposition, rho: &ComplexMatrix, a: &ComplexMatrix) -> Result<Self> {
        validate_observable(a)?;
        let dim_out = dec
            .dim_out()
            .ok_or_else(|| Error::InvalidInput("empty decomposition".into()))?;
        if a.rows() != dim_out {
            return Err(Error::DimensionMismatch(format!(
                "observable side {} does not match map output side {}",
                a.rows(),
                dim_out
            )));
        }
        let probs = outcome_probabilities(dec, rho)?;
        let (values, groups, eig) = merged_spectrum(a)?;
        let mut born_cum = Vec::with_capacity(dec.len());
        for (i, part) in dec.parts().iter().enumerate() {
            if probs[i] <= 0.0 {
                born_cum.push(None);
                continue;
            }
            let raw = part.apply(rho)?;
            let p = raw.trace().re;
            let conditional = raw.scale(Complex64::new(1.0 / p, 0.0));
            born_cum.push(Some(cumulative(&born_probabilities(
                &groups,
                &eig,
                &conditional,
            ))));
        }
        Ok(Self {
            weights: dec.coefficients().to_vec(),
            outcome_cum: cumulative(&probs),
            values,
            born_cum,
        })
    }

    /// The shot with index `shot` under `base`; a pure function of both.
    fn record(&self, base: &CounterRng, shot: u64) -> ShotRecord {
        let mut rng = base.substream(shot);
        let i = pick(&self.outcome_cum, rng.next_f64());
        let born = self.born_cum[i]
            .as_ref()
            .expect("sampled outcome has positive probability");
        let k = pick(born, rng.next_f64());
        ShotRecord {
            outcome: i,
            eigenvalue: self.values[k],
            weight: self.weights[i],
        }
    }
}

/// Folds shot records in index order: Welford mean/variance plus per-outcome
/// tallies. Separated from the generation so chunked producers reduce to the
/// same bits.
struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
    freq: Vec<u64>,
    eigen_sum: Vec<f64>,
}

impl Accumulator {
    fn new(outcomes: usize) -> Self {
        Self {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            freq: vec![0; outcomes],
            eigen_sum: vec![0.0; outcomes],
        }
    }

    fn push(&mut self, record: ShotRecord) {
        self.count += 1;
        let x = record.value();
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self.freq[record.outcome] += 1;
        self.eigen_sum[record.outcome] += record.eigenvalue;
    }

    fn finish(self, seed: u64) -> EstimatorResult {
        let std_error = if self.count > 1 {
            (self.m2.max(0.0) / (self.count as f64 - 1.0) / self.count as f64).sqrt()
        } else {
            0.0
        };
        let per_outcome = self
            .freq
            .iter()
            .zip(&self.eigen_sum)
            .enumerate()
            .map(|(outcome, (&frequency, &sum))| OutcomeStats {
                outcome,
                frequency,
                mean_eigenvalue: if frequency > 0 {
                    sum / frequency as f64
                } else {
                    0.0
                },
            })
            .collect();
        EstimatorResult {
            shots: self.count,
            estimate: self.mean,
            std_error,
            per_outcome,
            seed,
        }
    }
}

/// Runs the full protocol for one HP map decomposition and one observable:
/// sample outcome, measure `A` on the conditional state, record
/// `lambda_i * a`, average. Unbiased for `Tr[L(rho) A]`.
pub fn estimate_hp_expectation(
    dec: &StatisticalDecomposition,
    rho: &ComplexMatrix,
    a: &ComplexMatrix,
    shots: u64,
    seed: u64,
) -> Result<EstimatorResult> {
    if shots == 0 {
        return Err(Error::InvalidInput("shots must be >= 1".into()));
    }
    let prepared = PreparedSampler::new(dec, rho, a)?;
    let base = CounterRng::new(seed);
    let mut acc = Accumulator::new(dec.len());
    for shot in 0..shots {
        acc.push(prepared.record(&base, shot));
    }
    Ok(acc.finish(seed))
}

/// Repeated Born-rule measurement of a single observable on a state.
/// `std_error * sqrt(shots)` recovers the sample spread of the outcomes.
pub fn estimate_observable(
    o: &ComplexMatrix,
    rho: &ComplexMatrix,
    shots: u64,
    seed: u64,
) -> Result<EstimatorResult> {
    if shots == 0 {
        return Err(Error::InvalidInput("shots must be >= 1".into()));
    }
    validate_observable(o)?;
    validate_state(rho)?;
    if o.rows() != rho.rows() {
        return Err(Error::DimensionMismatch(format!(
            "observable side {} does not match state side {}",
            o.rows(),
            rho.rows()
        )));
    }
    let (values, groups, eig) = merged_spectrum(o)?;
    let cum = cumulative(&born_probabilities(&groups, &eig, rho));
    let base = CounterRng::new(seed);
    let mut acc = Accumulator::new(values.len());
    for shot in 0..shots {
        let mut rng = base.substream(shot);
        let k = pick(&cum, rng.next_f64());
        acc.push(ShotRecord {
            outcome: k,
            eigenvalue: values[k],
            weight: 1.0,
        });
    }
    Ok(acc.finish(seed))
}

/// Joint reading of the dilation: Born-samples `A (x) Z` on `V rho V^dag`.
/// Agrees in expectation with [`estimate_hp_expectation`] on the instrument.
pub fn estimate_dilation_expectation(
    dil: &Dilation,
    rho: &ComplexMatrix,
    a: &ComplexMatrix,
    shots: u64,
    seed: u64,
) -> Result<EstimatorResult> {
    validate_state(rho)?;
    validate_observable(a)?;
    if a.rows() != dil.dim_out() {
        return Err(Error::DimensionMismatch(format!(
            "observable side {} does not match dilation output side {}",
            a.rows(),
            dil.dim_out()
        )));
    }
    let dilated = dil.dilated_state(rho)?;
    let obs = a.kron(&dil.ancilla_observable());
    estimate_observable(&obs, &dilated, shots, seed)
}

/// Analytic single-shot variance `sum_i lambda_i^2 p(i) E[a^2|i] - mu^2`,
/// computed from the decomposition itself as an independent check on the
/// sampler's empirical spread.
pub fn analytic_variance(
    dec: &StatisticalDecomposition,
    rho: &ComplexMatrix,
    a: &ComplexMatrix,
) -> Result<f64> {
    validate_observable(a)?;
    let probs = outcome_probabilities(dec, rho)?;
    let (values, groups, eig) = merged_spectrum(a)?;
    let mut mean = 0.0;
    let mut second = 0.0;
    for (i, part) in dec.parts().iter().enumerate() {
        if probs[i] <= 0.0 {
            continue;
        }
        let raw = part.apply(rho)?;
        let p = raw.trace().re;
        let conditional = raw.scale(Complex64::new(1.0 / p, 0.0));
        let born = born_probabilities(&groups, &eig, &conditional);
        let e1: f64 = born.iter().zip(&values).map(|(q, v)| q * v).sum();
        let e2: f64 = born.iter().zip(&values).map(|(q, v)| q * v * v).sum();
        let lambda = dec.coefficients()[i];
        mean += lambda * probs[i] * e1;
        second += lambda * lambda * probs[i] * e2;
    }
    Ok(second - mean * mean)
}

/// Estimates `Tr[A rho B]` by running the protocol on the correlator's two HP
/// components, splitting the shot budget between them.
pub fn estimate_correlation(
    rho: &ComplexMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    shots: u64,
    seed: u64,
) -> Result<CorrelationEstimate> {
    estimate_correlation_split(rho, a, b, shots, seed, 0.5)
}

/// [`estimate_correlation`] with an explicit fraction of shots assigned to
/// the real-part pipeline.
pub fn estimate_correlation_split(
    rho: &ComplexMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    shots: u64,
    seed: u64,
    split: f64,
) -> Result<CorrelationEstimate> {
    validate_state(rho)?;
    validate_observable(a)?;
    validate_observable(b)?;
    let dim = rho.rows();
    if a.rows() != dim || b.rows() != dim {
        return Err(Error::DimensionMismatch(
            "state and observables must share one dimension".into(),
        ));
    }
    if !(split > 0.0 && split < 1.0) {
        return Err(Error::InvalidInput(format!(
            "split must be in (0, 1), got {split}"
        )));
    }
    if shots < 2 {
        return Err(Error::InvalidInput(
            "correlation estimates need at least 2 shots".into(),
        ));
    }
    let shots_re = ((shots as f64 * split).round() as u64).clamp(1, shots - 1);
    let shots_im = shots - shots_re;

    let pair = CorrelatorPair::for_dimension(dim)?;
    let dec_re = pair.real_part().statistical_decomposition()?;
    let dec_im = pair.imag_part().statistical_decomposition()?;
    let obs = a.kron(b);
    let real_pipeline =
        estimate_hp_expectation(&dec_re, rho, &obs, shots_re, derive_seed(seed, 1))?;
    let imag_pipeline =
        estimate_hp_expectation(&dec_im, rho, &obs, shots_im, derive_seed(seed, 2))?;
    Ok(CorrelationEstimate {
        dim,
        shots,
        seed,
        estimate_re: real_pipeline.estimate,
        estimate_im: imag_pipeline.estimate,
        std_error_re: real_pipeline.std_error,
        std_error_im: imag_pipeline.std_error,
        l1_cost_real: dec_re.l1_cost(),
        l1_cost_imag: dec_im.l1_cost(),
        real_pipeline,
        imag_pipeline,
    })
}

fn derive_seed(seed: u64, tag: u64) -> u64 {
    CounterRng::new(seed).substream(tag).next_u64()
}

/// Estimates both orderings of the correlation, the commutator expectation
/// `Tr[A rho B] - Tr[B rho A]`, and the observable spreads, then reports the
/// Robertson inequality `delta_a * delta_b >= |<[A,B]>|/2` with a
/// five-standard-error margin.
pub fn uncertainty_check(
    rho: &ComplexMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    shots: u64,
    seed: u64,
) -> Result<UncertaintyReport> {
    let forward = estimate_correlation(rho, a, b, shots, derive_seed(seed, 11))?;
    let reverse = estimate_correlation(rho, b, a, shots, derive_seed(seed, 12))?;
    let spread_a = estimate_observable(a, rho, shots, derive_seed(seed, 13))?;
    let spread_b = estimate_observable(b, rho, shots, derive_seed(seed, 14))?;
    let delta_a = spread_a.std_error * (shots as f64).sqrt();
    let delta_b = spread_b.std_error * (shots as f64).sqrt();

    let commutator_re = forward.estimate_re - reverse.estimate_re;
    let commutator_im = forward.estimate_im - reverse.estimate_im;
    let se_re = forward.std_error_re.hypot(reverse.std_error_re);
    let se_im = forward.std_error_im.hypot(reverse.std_error_im);
    let bound = 0.5 * commutator_re.hypot(commutator_im);
    // |.| contracts errors, so half the combined component error is an upper bound
    let bound_std_error = 0.5 * se_re.hypot(se_im);
    let margin = 5.0 * bound_std_error;
    let product = delta_a * delta_b;
    let verdict = if product + margin < bound {
        "violated"
    } else if (product - bound).abs() <= margin {
        "holds (saturated)"
    } else {
        "holds"
    };
    Ok(UncertaintyReport {
        dim: rho.rows(),
        shots,
        seed,
        forward,
        reverse,
        commutator_re,
        commutator_im,
        bound,
        bound_std_error,
        delta_a,
        delta_b,
        product,
        margin,
        verdict: verdict.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{transpose_map, LinearMap, StatisticalDecomposition};
    use crate::correlator::exact_correlation;
    use crate::dilation::dilate;
    use crate::linalg::{basis_projector, pauli_x, pauli_y, pauli_z, trace_product};
    use crate::random::{random_hermitian, random_hp_map, random_state};

    fn ground_state() -> ComplexMatrix {
        basis_projector(2, 0)
    }

    fn maximally_mixed() -> ComplexMatrix {
        ComplexMatrix::identity(2).scale(Complex64::new(0.5, 0.0))
    }

    #[test]
    fn single_part_decomposition_always_yields_outcome_zero() {
        let dec = LinearMap::identity(2).statistical_decomposition().unwrap();
        let mut rng = CounterRng::new(70);
        let rho = ground_state();
        let (i, conditional) = sample_instrument(&dec, &rho, &mut rng).unwrap();
        assert_eq!(i, 0);
        assert!(conditional.max_diff(&rho) < 1e-12);
    }

    #[test]
    fn transpose_map_outcome_distribution_on_mixed_state() {
        let dec = transpose_map(2).statistical_decomposition().unwrap();
        let probs = outcome_probabilities(&dec, &maximally_mixed()).unwrap();
        assert!((probs[0] - 0.75).abs() < 1e-12);
        assert!((probs[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn empirical_outcome_frequencies_match_probabilities() {
        let dec = transpose_map(2).statistical_decomposition().unwrap();
        let rho = maximally_mixed();
        let mut rng = CounterRng::new(71);
        let n = 100_000u64;
        let mut count0 = 0u64;
        for _ in 0..n {
            let (i, _) = sample_instrument(&dec, &rho, &mut rng).unwrap();
            if i == 0 {
                count0 += 1;
            }
        }
        let freq = count0 as f64 / n as f64;
        let sigma = (0.75 * 0.25 / n as f64).sqrt();
        assert!((freq - 0.75).abs() < 5.0 * sigma, "freq {freq}");
    }

    #[test]
    fn measuring_identity_always_gives_one() {
        let mut rng = CounterRng::new(72);
        for _ in 0..50 {
            let v = measure_observable(&ComplexMatrix::identity(2), &maximally_mixed(), &mut rng)
                .unwrap();
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn measuring_sigma_z_on_ground_state_is_deterministic() {
        let mut rng = CounterRng::new(73);
        for _ in 0..50 {
            let v = measure_observable(&pauli_z(), &ground_state(), &mut rng).unwrap();
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn measuring_sigma_x_on_ground_state_is_a_fair_coin() {
        let mut rng = CounterRng::new(74);
        let n = 100_000u64;
        let mut plus = 0u64;
        for _ in 0..n {
            let v = measure_observable(&pauli_x(), &ground_state(), &mut rng).unwrap();
            assert!((v.abs() - 1.0).abs() < 1e-12);
            if v > 0.0 {
                plus += 1;
            }
        }
        let freq = plus as f64 / n as f64;
        let sigma = (0.25 / n as f64).sqrt();
        assert!((freq - 0.5).abs() < 5.0 * sigma, "freq {freq}");
    }

    #[test]
    fn identity_channel_estimate_is_exact_with_zero_variance() {
        let dec = LinearMap::identity(2).statistical_decomposition().unwrap();
        let result = estimate_hp_expectation(&dec, &ground_state(), &pauli_z(), 1000, 0).unwrap();
        assert_eq!(result.estimate, 1.0);
        assert_eq!(result.std_error, 0.0);
        assert_eq!(result.per_outcome[0].frequency, 1000);
    }

    #[test]
    fn transpose_map_estimate_converges_to_oracle() {
        let dec = transpose_map(2).statistical_decomposition().unwrap();
        let result =
            estimate_hp_expectation(&dec, &ground_state(), &pauli_z(), 1_000_000, 7).unwrap();
        // oracle: Tr[rho^T sigma_z] = 1
        assert!(
            (result.estimate - 1.0).abs() <= 5.0 * result.std_error,
            "estimate {} +- {}",
            result.estimate,
            result.std_error
        );
    }

    #[test]
    fn imaginary_correlator_part_estimate_converges() {
        let pair = CorrelatorPair::for_dimension(2).unwrap();
        let dec = pair.imag_part().statistical_decomposition().unwrap();
        let obs = pauli_x().kron(&pauli_y());
        let result = estimate_hp_expectation(&dec, &ground_state(), &obs, 500_000, 3).unwrap();
        assert!(
            (result.estimate + 1.0).abs() <= 5.0 * result.std_error,
            "estimate {} +- {}",
            result.estimate,
            result.std_error
        );
    }

    #[test]
    fn estimator_is_deterministic_and_seed_sensitive() {
        let dec = transpose_map(2).statistical_decomposition().unwrap();
        let a = estimate_hp_expectation(&dec, &ground_state(), &pauli_x(), 20_000, 5).unwrap();
        let b = estimate_hp_expectation(&dec, &ground_state(), &pauli_x(), 20_000, 5).unwrap();
        assert_eq!(a, b);
        let c = estimate_hp_expectation(&dec, &ground_state(), &pauli_x(), 20_000, 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn chunked_shot_generation_reduces_to_identical_bits() {
        // emulates a worker pool: records produced in four chunks, reduced in
        // shot-index order, must equal the serial run exactly
        let dec = transpose_map(2).statistical_decomposition().unwrap();
        let rho = maximally_mixed();
        let a = pauli_z();
        let shots = 10_000u64;
        let seed = 9u64;
        let serial = estimate_hp_expectation(&dec, &rho, &a, shots, seed).unwrap();

        let prepared = PreparedSampler::new(&dec, &rho, &a).unwrap();
        let base = CounterRng::new(seed);
        let chunk = shots / 4;
        let mut records: Vec<Vec<ShotRecord>> = Vec::new();
        for w in 0..4 {
            let lo = w * chunk;
            let hi = if w == 3 { shots } else { (w + 1) * chunk };
            records.push((lo..hi).map(|j| prepared.record(&base, j)).collect());
        }
        let mut acc = Accumulator::new(dec.len());
        for chunk_records in records {
            for r in chunk_records {
                acc.push(r);
            }
        }
        let chunked = acc.finish(seed);
        assert_eq!(serial, chunked);
    }

    #[test]
    fn empirical_variance_matches_analytic_value() {
        let dec = transpose_map(2).statistical_decomposition().unwrap();
        let rho = ground_state();
        let a = pauli_z();
        let shots = 200_000u64;
        let result = estimate_hp_expectation(&dec, &rho, &a, shots, 21).unwrap();
        let empirical = result.std_error.powi(2) * shots as f64;
        let analytic = analytic_variance(&dec, &rho, &a).unwrap();
        assert!(analytic > 0.0);
        assert!(
            (empirical - analytic).abs() < 0.1 * analytic,
            "empirical {empirical} vs analytic {analytic}"
        );
    }

    #[test]
    fn joint_dilation_reading_agrees_with_instrument_reading() {
        let mut rng = CounterRng::new(75);
        for trial in 0..3 {
            let map = random_hp_map(2, 2, &mut rng);
            let dec = map.statistical_decomposition().unwrap();
            let dil = dilate(&dec).unwrap();
            let rho = random_state(2, &mut rng);
            let a = random_hermitian(2, &mut rng);
            let shots = 200_000u64;
            let instrument = estimate_hp_expectation(&dec, &rho, &a, shots, 100 + trial).unwrap();
            let joint = estimate_dilation_expectation(&dil, &rho, &a, shots, 200 + trial).unwrap();
            let combined = instrument.std_error.hypot(joint.std_error);
            assert!(
                (instrument.estimate - joint.estimate).abs() <= 5.0 * combined,
                "readings disagree: {} vs {} (combined se {})",
                instrument.estimate,
                joint.estimate,
                combined
            );
        }
    }

    #[test]
    fn correlation_estimate_of_identity_pair() {
        let id = ComplexMatrix::identity(2);
        let est = estimate_correlation(&maximally_mixed(), &id, &id, 40_000, 17).unwrap();
        // the expectation is exactly 1 + 0i; the sampled mean carries
        // statistical error from the +-gamma coefficients
        assert!((est.estimate_re - 1.0).abs() <= 5.0 * est.std_error_re.max(1e-12));
        assert!(est.estimate_im.abs() <= 5.0 * est.std_error_im.max(1e-12));
        // the analytic recombination is exact for the identity observable
        let pair = CorrelatorPair::for_dimension(2).unwrap();
        let dec = pair.real_part().statistical_decomposition().unwrap();
        let probs = outcome_probabilities(&dec, &maximally_mixed()).unwrap();
        let recombined: f64 = dec
            .coefficients()
            .iter()
            .zip(&probs)
            .map(|(l, p)| l * p)
            .sum();
        assert!((recombined - 1.0).abs() < 1e-10);
    }

    #[test]
    fn correlation_estimate_matches_oracle_for_pauli_pair() {
        let est =
            estimate_correlation(&ground_state(), &pauli_x(), &pauli_y(), 400_000, 23).unwrap();
        let oracle = exact_correlation(&ground_state(), &pauli_x(), &pauli_y()).unwrap();
        assert!((est.estimate_re - oracle.re).abs() <= 5.0 * est.std_error_re);
        assert!((est.estimate_im - oracle.im).abs() <= 5.0 * est.std_error_im);
        let est0 =
            estimate_correlation(&ground_state(), &pauli_x(), &pauli_z(), 400_000, 29).unwrap();
        assert!(est0.estimate_re.abs() <= 5.0 * est0.std_error_re);
        assert!(est0.estimate_im.abs() <= 5.0 * est0.std_error_im);
    }

    #[test]
    fn correlation_estimate_works_at_dimension_three() {
        let mut rng = CounterRng::new(77);
        let rho = random_state(3, &mut rng);
        let a = random_hermitian(3, &mut rng);
        let b = random_hermitian(3, &mut rng);
        let oracle = exact_correlation(&rho, &a, &b).unwrap();
        let est = estimate_correlation(&rho, &a, &b, 60_000, 53).unwrap();
        assert!((est.estimate_re - oracle.re).abs() <= 6.0 * est.std_error_re);
        assert!((est.estimate_im - oracle.im).abs() <= 6.0 * est.std_error_im);
    }

    #[test]
    fn unbiasedness_over_random_instances() {
        let mut rng = CounterRng::new(76);
        let mut zs = Vec::new();
        for trial in 0..10 {
            let map = random_hp_map(2, 2, &mut rng);
            let dec = map.statistical_decomposition().unwrap();
            let rho = random_state(2, &mut rng);
            let a = random_hermitian(2, &mut rng);
            let oracle = trace_product(&map.apply(&rho).unwrap(), &a).re;
            let result = estimate_hp_expectation(&dec, &rho, &a, 50_000, 300 + trial).unwrap();
            let z = if result.std_error > 0.0 {
                (result.estimate - oracle) / result.std_error
            } else {
                0.0
            };
            assert!(z.abs() <= 6.0, "z-score {z} too large");
            zs.push(z);
        }
        let mean_z = zs.iter().sum::<f64>() / zs.len() as f64;
        assert!(mean_z.abs() < 2.0, "mean z {mean_z}");
    }

    #[test]
    fn uncertainty_report_saturates_for_conjugate_paulis() {
        let report =
            uncertainty_check(&ground_state(), &pauli_x(), &pauli_y(), 400_000, 31).unwrap();
        assert!((report.bound - 1.0).abs() <= 5.0 * report.bound_std_error);
        assert_eq!(report.verdict, "holds (saturated)");
        assert!((report.delta_a - 1.0).abs() < 0.01);
        assert!((report.delta_b - 1.0).abs() < 0.01);
    }

    #[test]
    fn uncertainty_report_for_equal_observables_holds_trivially() {
        let report =
            uncertainty_check(&ground_state(), &pauli_x(), &pauli_x(), 100_000, 37).unwrap();
        // commutator estimate compatible with zero
        let se = report
            .forward
            .std_error_re
            .hypot(report.reverse.std_error_re)
            .max(
                report
                    .forward
                    .std_error_im
                    .hypot(report.reverse.std_error_im),
            );
        assert!(report.commutator_re.hypot(report.commutator_im) <= 7.0 * se);
        assert_ne!(report.verdict, "violated");
    }

    #[test]
    fn uncertainty_bound_vanishes_on_maximally_mixed_state() {
        let report =
            uncertainty_check(&maximally_mixed(), &pauli_x(), &pauli_y(), 100_000, 41).unwrap();
        assert!(report.bound <= 5.0 * report.bound_std_error + 1e-12);
        assert_ne!(report.verdict, "violated");
    }

    #[test]
    fn hard_negative_probabilities_are_a_numerical_failure() {
        // hand-built invalid instrument: a negated identity part
        let bad = StatisticalDecomposition::new(
            vec![1.0, 1.0],
            vec![
                LinearMap::identity(2).scale(2.0),
                LinearMap::identity(2).scale(-1.0),
            ],
        )
        .unwrap();
        let err = outcome_probabilities(&bad, &ground_state()).unwrap_err();
        assert!(matches!(err, Error::NumericalFailure(_)));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn estimator_rejects_bad_inputs() {
        let dec = LinearMap::identity(2).statistical_decomposition().unwrap();
        assert!(estimate_hp_expectation(&dec, &ground_state(), &pauli_z(), 0, 0).is_err());
        let id3 = ComplexMatrix::identity(3);
        assert!(estimate_hp_expectation(&dec, &ground_state(), &id3, 10, 0).is_err());
        assert!(estimate_correlation(&ground_state(), &pauli_x(), &pauli_y(), 1, 0).is_err());
        let empty = StatisticalDecomposition::new(Vec::new(), Vec::new()).unwrap();
        assert!(estimate_hp_expectation(&empty, &ground_state(), &pauli_z(), 10, 0).is_err());
    }
}
