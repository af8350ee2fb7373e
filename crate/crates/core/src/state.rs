//! Dense statevector over n qubits with Born-rule measurement.
//!
//! Conventions used everywhere in this crate:
//!
//! * qubit 0 is the least-significant bit of the basis-state index;
//! * outcome bitstrings are reported most-significant qubit first, so the
//!   leftmost character of a bitstring belongs to the highest measured
//!   qubit index.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Tolerance on the squared-norm of a statevector.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Pure quantum state of `n_qubits` qubits as a vector of 2^n complex
/// amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// The all-zeros state |0...0⟩.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state |index⟩.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::ZeroQubits);
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::QubitOutOfRange {
                index,
                n_qubits: dim,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Build a state from raw amplitudes. The length must be a power of two
    /// and the squared magnitudes must sum to 1 within [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::BadStateLength(len));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm_sqr.sqrt()));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Build a state from real amplitudes, normalizing them. All-zero input
    /// is rejected.
    pub fn from_real_normalized(values: &[f64]) -> Result<Self> {
        let len = values.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::BadStateLength(len));
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::AllZeroImage);
        }
        let amplitudes = values
            .iter()
            .map(|v| Complex64::new(v / norm, 0.0))
            .collect();
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Tensor product placing `high` on the upper qubit indices and `low`
    /// on the lower ones.
    pub fn tensor(high: &Statevector, low: &Statevector) -> Statevector {
        let shift = low.n_qubits;
        let mut amplitudes =
            Vec::with_capacity(high.amplitudes.len() * low.amplitudes.len());
        for ah in &high.amplitudes {
            for al in &low.amplitudes {
                amplitudes.push(ah * al);
            }
        }
        debug_assert_eq!(amplitudes.len(), 1 << (high.n_qubits + shift));
        Statevector {
            n_qubits: high.n_qubits + shift,
            amplitudes,
        }
    }

    /// A pseudo-random state: complex Gaussian amplitudes, normalized.
    pub fn random<R: Rng>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::ZeroQubits);
        }
        let dim = 1usize << n_qubits;
        let mut amplitudes = Vec::with_capacity(dim);
        for _ in 0..dim {
            amplitudes.push(Complex64::new(gaussian(rng), gaussian(rng)));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    /// Squared norm Σ|cᵢ|².
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner_product(&self, other: &Statevector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩|², the fidelity between two pure states.
    pub fn fidelity_with(&self, other: &Statevector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    /// Born-rule probability of basis state `index`.
    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    /// Marginal outcome distribution over the given qubits. Outcomes with
    /// zero probability are omitted; the returned probabilities sum to 1.
    pub fn outcome_probabilities(
        &self,
        measured: &[usize],
    ) -> Result<BTreeMap<String, f64>> {
        let measured = self.checked_measured(measured)?;
        let mut by_value: BTreeMap<u64, f64> = BTreeMap::new();
        for (index, amp) in self.amplitudes.iter().enumerate() {
            let p = amp.norm_sqr();
            if p > 0.0 {
                *by_value.entry(gather_bits(index, &measured)).or_insert(0.0) += p;
            }
        }
        Ok(by_value
            .into_iter()
            .map(|(v, p)| (render_bits(v, measured.len()), p))
            .collect())
    }

    /// Draw `shots` outcomes over the given qubits, deterministically for a
    /// given seed. Counts sum to `shots`.
    pub fn sample_shots(
        &self,
        measured: &[usize],
        shots: u64,
        seed: u64,
    ) -> Result<BTreeMap<String, u64>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let measured = self.checked_measured(measured)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sampler = self.index_sampler();
        let mut by_value: BTreeMap<u64, u64> = BTreeMap::new();
        for _ in 0..shots {
            let index = sampler.sample(&mut rng);
            *by_value.entry(gather_bits(index, &measured)).or_insert(0) += 1;
        }
        Ok(by_value
            .into_iter()
            .map(|(v, c)| (render_bits(v, measured.len()), c))
            .collect())
    }

    /// Cumulative-weight sampler over basis indices, reusable across draws.
    pub(crate) fn index_sampler(&self) -> WeightedIndex<f64> {
        WeightedIndex::new(self.amplitudes.iter().map(|a| a.norm_sqr()))
            .expect("normalized state has positive total weight")
    }

    /// Draw a single basis index from the Born distribution.
    pub fn sample_basis_index<R: Rng>(&self, rng: &mut R) -> usize {
        self.index_sampler().sample(rng)
    }

    /// Validate measured indices and return them sorted high-to-low, the
    /// order in which bitstrings are rendered.
    fn checked_measured(&self, measured: &[usize]) -> Result<Vec<usize>> {
        if measured.is_empty() {
            return Err(Error::ZeroQubits);
        }
        let mut sorted = measured.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateTargets(measured.to_vec()));
            }
        }
        for &q in &sorted {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        Ok(sorted)
    }
}

/// Pack the bits of `index` at the given qubit positions (sorted
/// high-to-low) into an integer whose MSB is the first listed qubit.
pub(crate) fn gather_bits(index: usize, sorted_desc: &[usize]) -> u64 {
    let mut v = 0u64;
    for &q in sorted_desc {
        v = (v << 1) | ((index >> q) & 1) as u64;
    }
    v
}

/// Render `value` as a bitstring of `len` characters, MSB first.
pub(crate) fn render_bits(value: u64, len: usize) -> String {
    (0..len)
        .rev()
        .map(|k| if (value >> k) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Standard normal draw via Box-Muller.
fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn plus() -> Statevector {
        Statevector::from_amplitudes(vec![
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap()
    }

    fn ghz3() -> Statevector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        amps[7] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Statevector::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn zero_state_is_basis_zero() {
        let s = Statevector::zero(2).unwrap();
        assert_eq!(s.dim(), 4);
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_lengths_and_norms() {
        assert!(matches!(
            Statevector::from_amplitudes(vec![Complex64::new(1.0, 0.0); 3]),
            Err(Error::BadStateLength(3))
        ));
        assert!(matches!(
            Statevector::from_amplitudes(vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0)
            ]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(Statevector::zero(0), Err(Error::ZeroQubits)));
    }

    #[test]
    fn plus_measured_is_half_half() {
        let probs = plus().outcome_probabilities(&[0]).unwrap();
        assert!((probs["0"] - 0.5).abs() < 1e-12);
        assert!((probs["1"] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ghz_full_measurement() {
        let probs = ghz3().outcome_probabilities(&[0, 1, 2]).unwrap();
        assert_eq!(probs.len(), 2);
        assert!((probs["000"] - 0.5).abs() < 1e-12);
        assert!((probs["111"] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ghz_marginal_on_one_qubit() {
        let probs = ghz3().outcome_probabilities(&[0]).unwrap();
        assert!((probs["0"] - 0.5).abs() < 1e-12);
        assert!((probs["1"] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn full_measurement_matches_amplitudes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = Statevector::random(3, &mut rng).unwrap();
        let probs = s.outcome_probabilities(&[0, 1, 2]).unwrap();
        let total: f64 = probs.values().sum();
        assert!((total - 1.0).abs() < 1e-10);
        for (index, amp) in s.amplitudes().iter().enumerate() {
            let key = render_bits(index as u64, 3);
            assert!((probs[&key] - amp.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_outcome_needs_no_randomness() {
        let counts = Statevector::zero(1)
            .unwrap()
            .sample_shots(&[0], 100, 1)
            .unwrap();
        assert_eq!(counts["0"], 100);
        assert_eq!(counts.len(), 1);
    }

    #[test]
    fn plus_sampling_within_binomial_bound() {
        let counts = plus().sample_shots(&[0], 8192, 42).unwrap();
        let f = counts["0"] as f64 / 8192.0;
        let sigma = (0.25f64 / 8192.0).sqrt();
        assert!((f - 0.5).abs() < 3.0 * sigma, "f = {f}");
    }

    #[test]
    fn same_seed_same_counts() {
        let s = ghz3();
        let a = s.sample_shots(&[0, 1, 2], 5000, 9).unwrap();
        let b = s.sample_shots(&[0, 1, 2], 5000, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values().sum::<u64>(), 5000);
    }

    #[test]
    fn sampling_rejects_zero_shots() {
        assert!(matches!(
            plus().sample_shots(&[0], 0, 1),
            Err(Error::ZeroShots)
        ));
    }

    #[test]
    fn measurement_validates_indices() {
        let s = ghz3();
        assert!(matches!(
            s.outcome_probabilities(&[3]),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            s.outcome_probabilities(&[1, 1]),
            Err(Error::DuplicateTargets(_))
        ));
    }

    #[test]
    fn tensor_orders_high_then_low() {
        let one = Statevector::basis(1, 1).unwrap();
        let zero = Statevector::zero(1).unwrap();
        let s = Statevector::tensor(&one, &zero);
        // |1⟩ on qubit 1, |0⟩ on qubit 0 → index 0b10.
        assert_eq!(s.amplitudes()[2], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn inner_product_of_orthogonal_states() {
        let zero = Statevector::zero(1).unwrap();
        let one = Statevector::basis(1, 1).unwrap();
        assert_eq!(zero.fidelity_with(&one).unwrap(), 0.0);
        assert!((zero.fidelity_with(&plus()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn random_states_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=4 {
            let s = Statevector::random(n, &mut rng).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bit_helpers_roundtrip() {
        // index 0b110, qubits [2, 1, 0] → "110"; qubits [0] → "0".
        assert_eq!(render_bits(gather_bits(6, &[2, 1, 0]), 3), "110");
        assert_eq!(render_bits(gather_bits(6, &[0]), 1), "0");
        assert_eq!(render_bits(gather_bits(6, &[1]), 1), "1");
    }
}
