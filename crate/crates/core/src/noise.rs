//! Stochastic gate noise and classical readout errors.
//!
//! Depolarizing channels are realized trajectory-wise: after a k-qubit gate,
//! with probability `p·(4^k−1)/4^k` a uniformly random non-identity Pauli
//! string is applied to the gate's qubits. Averaged over trajectories this
//! reproduces ρ → (1−p)ρ + p·I/2^k on the gate support, which keeps memory
//! at statevector scale instead of density-matrix scale.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::state::{gather_bits, render_bits, Statevector};

/// Per-gate-class depolarizing strengths plus a symmetric readout flip
/// probability. The strength bound for a k-qubit gate is 1 + 1/(4^k − 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NoiseConfig", into = "NoiseConfig")]
pub struct NoiseModel {
    p_1q: f64,
    p_2q: f64,
    p_3q: f64,
    readout_r: f64,
    seed: u64,
}

/// Flat key-value form of [`NoiseModel`] used for JSON configs. Missing
/// keys default to zero noise.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseConfig {
    #[serde(default)]
    pub p_1q: f64,
    #[serde(default)]
    pub p_2q: f64,
    #[serde(default)]
    pub p_3q: f64,
    #[serde(default)]
    pub readout_r: f64,
    #[serde(default)]
    pub seed: u64,
}

impl TryFrom<NoiseConfig> for NoiseModel {
    type Error = Error;

    fn try_from(c: NoiseConfig) -> Result<Self> {
        NoiseModel::new(c.p_1q, c.p_2q, c.p_3q, c.readout_r, c.seed)
    }
}

impl From<NoiseModel> for NoiseConfig {
    fn from(m: NoiseModel) -> Self {
        NoiseConfig {
            p_1q: m.p_1q,
            p_2q: m.p_2q,
            p_3q: m.p_3q,
            readout_r: m.readout_r,
            seed: m.seed,
        }
    }
}

/// Upper bound of the depolarizing strength for a k-qubit support.
pub fn max_strength(qubits: usize) -> f64 {
    let d2 = (4.0f64).powi(qubits as i32);
    1.0 + 1.0 / (d2 - 1.0)
}

impl NoiseModel {
    pub fn new(p_1q: f64, p_2q: f64, p_3q: f64, readout_r: f64, seed: u64) -> Result<Self> {
        for (k, p) in [(1usize, p_1q), (2, p_2q), (3, p_3q)] {
            check_strength(p, k)?;
        }
        if !(0.0..=1.0).contains(&readout_r) {
            return Err(Error::ReadoutOutOfBounds(readout_r));
        }
        Ok(Self {
            p_1q,
            p_2q,
            p_3q,
            readout_r,
            seed,
        })
    }

    /// All strengths and the readout error zero.
    pub fn noiseless(seed: u64) -> Self {
        Self {
            p_1q: 0.0,
            p_2q: 0.0,
            p_3q: 0.0,
            readout_r: 0.0,
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }

    pub fn p_1q(&self) -> f64 {
        self.p_1q
    }

    pub fn p_2q(&self) -> f64 {
        self.p_2q
    }

    pub fn p_3q(&self) -> f64 {
        self.p_3q
    }

    pub fn readout_r(&self) -> f64 {
        self.readout_r
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Depolarizing strength for a gate of the given arity.
    pub fn strength_for_arity(&self, arity: usize) -> f64 {
        match arity {
            1 => self.p_1q,
            2 => self.p_2q,
            _ => self.p_3q,
        }
    }

    fn gate_noise_is_zero(&self) -> bool {
        self.p_1q == 0.0 && self.p_2q == 0.0 && self.p_3q == 0.0
    }
}

fn check_strength(strength: f64, qubits: usize) -> Result<()> {
    let max = max_strength(qubits);
    if !(0.0..=max).contains(&strength) {
        return Err(Error::NoiseStrengthOutOfBounds {
            strength,
            max,
            qubits,
        });
    }
    Ok(())
}

/// Independent RNG for one trajectory, derived from (seed, index) so that
/// workers can run in any order without changing the ensemble.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Stochastic depolarizing step on the gate's qubits: with probability
/// `strength·(4^k−1)/4^k` apply a uniformly random non-identity Pauli
/// string, otherwise leave the state alone.
pub fn depolarize_after_gate<R: Rng>(
    state: &mut Statevector,
    gate: &Gate,
    strength: f64,
    rng: &mut R,
) -> Result<()> {
    let targets = gate.targets();
    let k = targets.len();
    check_strength(strength, k)?;
    gate.validate(state.n_qubits())?;
    if strength == 0.0 {
        return Ok(());
    }
    let n_paulis = 4u32.pow(k as u32);
    let p_flip = strength * f64::from(n_paulis - 1) / f64::from(n_paulis);
    if rng.gen::<f64>() < p_flip {
        let code = rng.gen_range(1..n_paulis);
        apply_pauli_string(state, &targets, code);
    }
    Ok(())
}

/// Apply the Pauli string encoded base-4 in `code` (digit j acts on
/// `targets[j]`; 1 = X, 2 = Y, 3 = Z).
fn apply_pauli_string(state: &mut Statevector, targets: &[usize], code: u32) {
    let amps = state.amplitudes_mut();
    for (j, &q) in targets.iter().enumerate() {
        match (code >> (2 * j)) & 3 {
            0 => {}
            1 => pauli_x(amps, q),
            2 => pauli_y(amps, q),
            _ => pauli_z(amps, q),
        }
    }
}

fn pauli_x(amps: &mut [num_complex::Complex64], q: usize) {
    let mask = 1usize << q;
    for i in 0..amps.len() {
        if i & mask == 0 {
            amps.swap(i, i | mask);
        }
    }
}

fn pauli_z(amps: &mut [num_complex::Complex64], q: usize) {
    let mask = 1usize << q;
    for (i, a) in amps.iter_mut().enumerate() {
        if i & mask != 0 {
            *a = -*a;
        }
    }
}

fn pauli_y(amps: &mut [num_complex::Complex64], q: usize) {
    let i_unit = num_complex::Complex64::new(0.0, 1.0);
    let mask = 1usize << q;
    for i in 0..amps.len() {
        if i & mask == 0 {
            let a0 = amps[i];
            let a1 = amps[i | mask];
            amps[i] = -i_unit * a1;
            amps[i | mask] = i_unit * a0;
        }
    }
}

/// Flip every bit of every sampled shot independently with probability `r`.
/// The total shot count is preserved.
pub fn apply_readout_error<R: Rng>(
    counts: &BTreeMap<String, u64>,
    r: f64,
    rng: &mut R,
) -> Result<BTreeMap<String, u64>> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::ReadoutOutOfBounds(r));
    }
    if r == 0.0 {
        return Ok(counts.clone());
    }
    let mut out: BTreeMap<String, u64> = BTreeMap::new();
    for (bits, &count) in counts {
        for _ in 0..count {
            let flipped: String = bits
                .chars()
                .map(|c| {
                    if rng.gen::<f64>() < r {
                        if c == '0' {
                            '1'
                        } else {
                            '0'
                        }
                    } else {
                        c
                    }
                })
                .collect();
            *out.entry(flipped).or_insert(0) += 1;
        }
    }
    Ok(out)
}

/// Run `shots` noisy trajectories of the circuit: fresh Pauli draws after
/// each gate per the gate-class strength, Born-rule sampling, then readout
/// flips. Deterministic for a given `model.seed()`.
pub fn run_noisy(
    circuit: &Circuit,
    initial: &Statevector,
    model: &NoiseModel,
    shots: u64,
) -> Result<BTreeMap<String, u64>> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    if circuit.measured().is_empty() {
        return Err(Error::ZeroQubits);
    }
    if initial.n_qubits() != circuit.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: initial.n_qubits(),
            right: circuit.n_qubits(),
        });
    }

    // With no gate noise every trajectory evolves identically, so evolve
    // once and sample; readout flips still apply.
    if model.gate_noise_is_zero() {
        let evolved = circuit.run(initial)?;
        let counts = evolved.sample_shots(circuit.measured(), shots, model.seed())?;
        if model.readout_r() > 0.0 {
            // Stream u64::MAX never collides with per-trajectory streams.
            let mut rng = trajectory_rng(model.seed(), u64::MAX);
            return apply_readout_error(&counts, model.readout_r(), &mut rng);
        }
        return Ok(counts);
    }

    let mut measured_desc = circuit.measured().to_vec();
    measured_desc.sort_unstable_by(|a, b| b.cmp(a));
    let n_bits = measured_desc.len();
    let r = model.readout_r();

    let by_value = (0..shots)
        .into_par_iter()
        .try_fold(BTreeMap::<u64, u64>::new, |mut acc, shot| -> Result<_> {
            let mut rng = trajectory_rng(model.seed(), shot);
            let mut state = initial.clone();
            for gate in circuit.gates() {
                gate.apply_to(&mut state)?;
                let strength = model.strength_for_arity(gate.arity());
                if strength > 0.0 {
                    depolarize_after_gate(&mut state, gate, strength, &mut rng)?;
                }
            }
            let index = state.sample_basis_index(&mut rng);
            let mut value = gather_bits(index, &measured_desc);
            if r > 0.0 {
                for bit in 0..n_bits {
                    if rng.gen::<f64>() < r {
                        value ^= 1 << bit;
                    }
                }
            }
            *acc.entry(value).or_insert(0) += 1;
            Ok(acc)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (v, c) in b {
                *a.entry(v).or_insert(0) += c;
            }
            Ok(a)
        })?;

    Ok(by_value
        .into_iter()
        .map(|(v, c)| (render_bits(v, n_bits), c))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn bloch(state: &Statevector) -> [f64; 3] {
        let a0 = state.amplitudes()[0];
        let a1 = state.amplitudes()[1];
        let c = a0.conj() * a1;
        [2.0 * c.re, 2.0 * c.im, a0.norm_sqr() - a1.norm_sqr()]
    }

    #[test]
    fn strength_bounds() {
        assert!((max_strength(1) - 4.0 / 3.0).abs() < 1e-15);
        assert!((max_strength(2) - 16.0 / 15.0).abs() < 1e-15);
        assert!((max_strength(3) - 64.0 / 63.0).abs() < 1e-15);
        assert!(NoiseModel::new(1.34, 0.0, 0.0, 0.0, 0).is_err());
        assert!(NoiseModel::new(0.0, 1.07, 0.0, 0.0, 0).is_err());
        assert!(NoiseModel::new(0.0, 0.0, 0.0, 1.5, 0).is_err());
        assert!(NoiseModel::new(4.0 / 3.0, 16.0 / 15.0, 64.0 / 63.0, 1.0, 0).is_ok());
    }

    #[test]
    fn zero_strength_leaves_state_alone() {
        let mut rng = trajectory_rng(1, 0);
        let before = Statevector::random(2, &mut rng).unwrap();
        let mut state = before.clone();
        depolarize_after_gate(&mut state, &Gate::H { target: 1 }, 0.0, &mut rng).unwrap();
        assert_eq!(state, before);
    }

    #[test]
    fn trajectory_output_stays_in_pauli_orbit_of_zero() {
        // On |0⟩ every trajectory is one of {|0⟩, X|0⟩, Y|0⟩, Z|0⟩}, i.e. a
        // basis state up to phase.
        let mut rng = trajectory_rng(5, 3);
        for _ in 0..200 {
            let mut state = Statevector::zero(1).unwrap();
            depolarize_after_gate(&mut state, &Gate::X { target: 0 }, 1.2, &mut rng)
                .unwrap();
            let p0 = state.probability(0);
            assert!(p0.abs() < 1e-12 || (p0 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn full_depolarization_at_unit_strength() {
        // At p = 1 the channel maps any input to I/2: the trajectory-averaged
        // Bloch vector shrinks to zero up to sampling error.
        let trials = 10_000;
        let mut sum = [0.0f64; 3];
        for t in 0..trials {
            let mut rng = trajectory_rng(7, t);
            let mut state = Statevector::zero(1).unwrap();
            depolarize_after_gate(&mut state, &Gate::X { target: 0 }, 1.0, &mut rng)
                .unwrap();
            let b = bloch(&state);
            for (s, v) in sum.iter_mut().zip(b) {
                *s += v;
            }
        }
        let norm = sum
            .iter()
            .map(|s| (s / trials as f64).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(norm < 0.05, "residual Bloch norm {norm}");
    }

    #[test]
    fn trajectory_average_matches_exact_channel() {
        // Empirical Bloch vector over many trajectories must equal
        // (1−p)·(input Bloch), the exact depolarizing map. Includes the
        // maximal strength 4/3 where the scale factor is −1/3.
        let trials: u64 = 100_000;
        let tol = 3.0 / (trials as f64).sqrt();
        let mut state_rng = trajectory_rng(11, 0);
        for p in [0.1, 0.5, 1.0, 4.0 / 3.0] {
            for case in 0..4u64 {
                let input = Statevector::random(1, &mut state_rng).unwrap();
                let expected = bloch(&input).map(|v| (1.0 - p) * v);
                let sum = (0..trials)
                    .into_par_iter()
                    .fold(
                        || [0.0f64; 3],
                        |mut acc, t| {
                            let mut rng = trajectory_rng(100 + case, t);
                            let mut state = input.clone();
                            depolarize_after_gate(
                                &mut state,
                                &Gate::X { target: 0 },
                                p,
                                &mut rng,
                            )
                            .unwrap();
                            for (a, v) in acc.iter_mut().zip(bloch(&state)) {
                                *a += v;
                            }
                            acc
                        },
                    )
                    .reduce(
                        || [0.0f64; 3],
                        |mut a, b| {
                            for (x, y) in a.iter_mut().zip(b) {
                                *x += y;
                            }
                            a
                        },
                    );
                for (axis, (&s, e)) in sum.iter().zip(expected).enumerate() {
                    let mean = s / trials as f64;
                    assert!(
                        (mean - e).abs() < tol,
                        "p={p} case={case} axis={axis}: {mean} vs {e}"
                    );
                }
            }
        }
    }

    #[test]
    fn depolarize_acts_only_on_gate_support() {
        // A 2-qubit Pauli draw on qubits {0, 2} must leave qubit 1's
        // marginal untouched.
        let mut rng = trajectory_rng(13, 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let single = Statevector::from_amplitudes(vec![
            Complex64::new(h, 0.0),
            Complex64::new(0.0, h),
        ])
        .unwrap();
        let zero = Statevector::zero(1).unwrap();
        let initial = Statevector::tensor(
            &Statevector::tensor(&zero, &single),
            &zero,
        );
        for _ in 0..100 {
            let mut state = initial.clone();
            depolarize_after_gate(
                &mut state,
                &Gate::Cnot {
                    control: 0,
                    target: 2,
                },
                1.0,
                &mut rng,
            )
            .unwrap();
            let probs = state.outcome_probabilities(&[1]).unwrap();
            assert!((probs["0"] - 0.5).abs() < 1e-10);
            assert!((probs["1"] - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn readout_zero_and_one_are_deterministic() {
        let counts: BTreeMap<String, u64> =
            [("01".to_string(), 7u64), ("10".to_string(), 3)].into();
        let mut rng = trajectory_rng(17, 0);
        assert_eq!(apply_readout_error(&counts, 0.0, &mut rng).unwrap(), counts);
        let flipped = apply_readout_error(&counts, 1.0, &mut rng).unwrap();
        assert_eq!(flipped["10"], 7);
        assert_eq!(flipped["01"], 3);
    }

    #[test]
    fn readout_rate_within_binomial_bound() {
        let counts: BTreeMap<String, u64> = [("0".to_string(), 10_000u64)].into();
        let mut rng = trajectory_rng(19, 0);
        let out = apply_readout_error(&counts, 0.01, &mut rng).unwrap();
        assert_eq!(out.values().sum::<u64>(), 10_000);
        let ones = *out.get("1").unwrap_or(&0) as f64;
        let sigma = (10_000.0f64 * 0.01 * 0.99).sqrt();
        assert!((ones - 100.0).abs() < 3.0 * sigma, "ones = {ones}");
    }

    #[test]
    fn readout_composition_matches_combined_rate() {
        // Applying r1 then r2 flips a bit with net probability
        // r1 + r2 − 2·r1·r2.
        let n = 200_000u64;
        let (r1, r2) = (0.2, 0.05);
        let counts: BTreeMap<String, u64> = [("0".to_string(), n)].into();
        let mut rng = trajectory_rng(23, 0);
        let once = apply_readout_error(&counts, r1, &mut rng).unwrap();
        let twice = apply_readout_error(&once, r2, &mut rng).unwrap();
        let rate = *twice.get("1").unwrap_or(&0) as f64 / n as f64;
        let expected = r1 + r2 - 2.0 * r1 * r2;
        let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!((rate - expected).abs() < 3.0 * sigma, "rate = {rate}");
    }

    #[test]
    fn noiseless_run_matches_ideal_distribution() {
        // χ² goodness-of-fit at the 0.001 level against the exact Born
        // distribution of a random 2-qubit state (3 degrees of freedom,
        // critical value 16.266).
        let mut rng = trajectory_rng(29, 0);
        let state = Statevector::random(2, &mut rng).unwrap();
        let mut circuit = Circuit::new(2).unwrap();
        circuit.push(Gate::H { target: 0 }).unwrap();
        circuit.push(Gate::H { target: 0 }).unwrap();
        circuit.set_measured(vec![0, 1]).unwrap();

        let shots = 100_000u64;
        let counts = run_noisy(&circuit, &state, &NoiseModel::noiseless(31), shots).unwrap();
        let probs = state.outcome_probabilities(&[0, 1]).unwrap();
        let chi2: f64 = probs
            .iter()
            .map(|(bits, p)| {
                let expected = p * shots as f64;
                let observed = *counts.get(bits).unwrap_or(&0) as f64;
                (observed - expected).powi(2) / expected
            })
            .sum();
        assert!(chi2 < 16.266, "chi2 = {chi2}");
    }

    #[test]
    fn noisy_run_is_deterministic_and_complete() {
        let mut circuit = Circuit::new(2).unwrap();
        circuit.push(Gate::H { target: 0 }).unwrap();
        circuit
            .push(Gate::Cnot {
                control: 0,
                target: 1,
            })
            .unwrap();
        circuit.set_measured(vec![0, 1]).unwrap();
        let model = NoiseModel::new(0.05, 0.1, 0.0, 0.02, 37).unwrap();
        let initial = Statevector::zero(2).unwrap();
        let a = run_noisy(&circuit, &initial, &model, 4096).unwrap();
        let b = run_noisy(&circuit, &initial, &model, 4096).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values().sum::<u64>(), 4096);
    }

    #[test]
    fn noise_config_roundtrip_and_defaults() {
        let model = NoiseModel::new(0.01, 0.05, 0.0, 0.02, 9).unwrap();
        let json = serde_json::to_string(&model).unwrap();
        let back: NoiseModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, model);

        let partial: NoiseModel = serde_json::from_str(r#"{"readout_r": 0.25}"#).unwrap();
        assert_eq!(partial.readout_r(), 0.25);
        assert_eq!(partial.p_1q(), 0.0);

        let bad: std::result::Result<NoiseModel, _> =
            serde_json::from_str(r#"{"p_1q": 2.0}"#);
        assert!(bad.is_err());
    }
}
