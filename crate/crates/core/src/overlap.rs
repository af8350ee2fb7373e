//! Fidelity estimation between two pure states via the ancilla-assisted
//! swap test or the destructive (ancilla-free) swap test.
//!
//! Register layout, fixed for reproducible bitstrings:
//!
//! * ancilla test — qubit 0 is the ancilla, ψ sits on qubits 1..=n and φ on
//!   qubits n+1..=2n; only the ancilla is measured;
//! * destructive test — ψ sits on qubits 0..n and φ on qubits n..2n, so a
//!   joint outcome bitstring reads φ's bits first, then ψ's. Failure
//!   classification is symmetric in the two halves.

use serde::Serialize;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::noise::{run_noisy, NoiseModel};
use crate::state::Statevector;

/// Which overlap-estimation circuit to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Swap,
    Destructive,
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Protocol::Swap => write!(f, "swap"),
            Protocol::Destructive => write!(f, "destructive"),
        }
    }
}

/// Outcome of one overlap estimation.
///
/// `raw_fidelity` is 2·P(0) − 1 before clamping and may be negative under
/// noise; `fidelity` is clamped to [0, 1] and `overlap` is its square root.
/// `shots == 0` marks exact (probability-level) evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapResult {
    pub p_success: f64,
    pub fidelity: f64,
    pub overlap: f64,
    pub raw_fidelity: f64,
    pub shots: u64,
}

impl OverlapResult {
    fn from_p_success(p_success: f64, shots: u64) -> Self {
        let raw_fidelity = 2.0 * p_success - 1.0;
        let fidelity = raw_fidelity.max(0.0);
        Self {
            p_success,
            fidelity,
            overlap: fidelity.sqrt(),
            raw_fidelity,
            shots,
        }
    }
}

/// Ancilla-assisted swap test on two n-qubit states: H on the ancilla, one
/// CSWAP per qubit pair, H again, ancilla measured. Gate count n + 2.
pub fn build_swap_test(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::ZeroQubits);
    }
    let mut circuit = Circuit::new(2 * n + 1)?;
    circuit.push(Gate::H { target: 0 })?;
    for i in 0..n {
        circuit.push(Gate::Cswap {
            control: 0,
            a: 1 + i,
            b: n + 1 + i,
        })?;
    }
    circuit.push(Gate::H { target: 0 })?;
    circuit.set_measured(vec![0])?;
    Ok(circuit)
}

/// Destructive swap test on two n-qubit states: CNOT from each ψ qubit to
/// its φ partner followed by H on the ψ qubit; everything measured. Gate
/// count 2n.
pub fn build_destructive_swap_test(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::ZeroQubits);
    }
    let mut circuit = Circuit::new(2 * n)?;
    for i in 0..n {
        circuit.push(Gate::Cnot {
            control: i,
            target: n + i,
        })?;
        circuit.push(Gate::H { target: i })?;
    }
    circuit.set_measured((0..2 * n).collect())?;
    Ok(circuit)
}

/// The destructive-test failure rule: a joint outcome fails exactly when
/// the bitwise AND of the two per-state strings has odd Hamming weight.
/// Characters other than '1' count as 0.
pub fn is_failure_outcome(o_psi: &str, o_phi: &str) -> Result<bool> {
    if o_psi.len() != o_phi.len() {
        return Err(Error::OutcomeLengthMismatch(o_psi.len(), o_phi.len()));
    }
    let both_ones = o_psi
        .chars()
        .zip(o_phi.chars())
        .filter(|(a, b)| *a == '1' && *b == '1')
        .count();
    Ok(both_ones % 2 == 1)
}

/// Estimate |⟨ψ|φ⟩|² with the ancilla-assisted swap test.
///
/// `shots == 0` requests exact probabilities (a noise model is then
/// rejected). In sampled mode the noiseless path draws with `seed`; with a
/// noise model the model's own seed governs.
pub fn swap_test_overlap(
    psi: &Statevector,
    phi: &Statevector,
    shots: u64,
    seed: u64,
    noise: Option<&NoiseModel>,
) -> Result<OverlapResult> {
    check_pair(psi, phi, shots, noise)?;
    let n = psi.n_qubits();
    let circuit = build_swap_test(n)?;
    let input = Statevector::tensor(
        &Statevector::tensor(phi, psi),
        &Statevector::zero(1)?,
    );
    let p_success = if shots == 0 {
        let probs = circuit.run(&input)?.outcome_probabilities(&[0])?;
        probs.get("0").copied().unwrap_or(0.0)
    } else {
        let counts = match noise {
            Some(model) => run_noisy(&circuit, &input, model, shots)?,
            None => circuit
                .run(&input)?
                .sample_shots(circuit.measured(), shots, seed)?,
        };
        *counts.get("0").unwrap_or(&0) as f64 / shots as f64
    };
    Ok(OverlapResult::from_p_success(p_success, shots))
}

/// Estimate |⟨ψ|φ⟩|² with the destructive swap test: success probability is
/// one minus the total probability of odd-AND-parity joint outcomes.
pub fn destructive_swap_test_overlap(
    psi: &Statevector,
    phi: &Statevector,
    shots: u64,
    seed: u64,
    noise: Option<&NoiseModel>,
) -> Result<OverlapResult> {
    check_pair(psi, phi, shots, noise)?;
    let n = psi.n_qubits();
    let circuit = build_destructive_swap_test(n)?;
    let input = Statevector::tensor(phi, psi);
    let p_success = if shots == 0 {
        let probs = circuit
            .run(&input)?
            .outcome_probabilities(circuit.measured())?;
        let p_fail: f64 = probs
            .iter()
            .filter(|(bits, _)| joint_outcome_fails(bits, n))
            .map(|(_, p)| p)
            .sum();
        1.0 - p_fail
    } else {
        let counts = match noise {
            Some(model) => run_noisy(&circuit, &input, model, shots)?,
            None => circuit
                .run(&input)?
                .sample_shots(circuit.measured(), shots, seed)?,
        };
        let failures: u64 = counts
            .iter()
            .filter(|(bits, _)| joint_outcome_fails(bits, n))
            .map(|(_, c)| c)
            .sum();
        1.0 - failures as f64 / shots as f64
    };
    Ok(OverlapResult::from_p_success(p_success, shots))
}

/// Run one protocol; small convenience for the pipeline and CLI layers.
pub fn estimate_overlap(
    protocol: Protocol,
    psi: &Statevector,
    phi: &Statevector,
    shots: u64,
    seed: u64,
    noise: Option<&NoiseModel>,
) -> Result<OverlapResult> {
    match protocol {
        Protocol::Swap => swap_test_overlap(psi, phi, shots, seed, noise),
        Protocol::Destructive => destructive_swap_test_overlap(psi, phi, shots, seed, noise),
    }
}

/// Split a 2n-character joint outcome into its per-state halves and apply
/// the parity rule.
fn joint_outcome_fails(joint: &str, n: usize) -> bool {
    let (phi_bits, psi_bits) = joint.split_at(n);
    is_failure_outcome(psi_bits, phi_bits).expect("halves have equal length")
}

fn check_pair(
    psi: &Statevector,
    phi: &Statevector,
    shots: u64,
    noise: Option<&NoiseModel>,
) -> Result<()> {
    if psi.n_qubits() != phi.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: psi.n_qubits(),
            right: phi.n_qubits(),
        });
    }
    if shots == 0 && noise.is_some() {
        return Err(Error::ExactModeWithNoise);
    }
    Ok(())
}
