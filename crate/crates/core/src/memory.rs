//! Associative-memory classification: every reference pattern is held in
//! superposition, entangled with a distinct label, and compared against the
//! target through destructive-swap gates whose pairwise AND parity is
//! accumulated on one auxiliary qubit. A joint label+aux measurement then
//! ranks the references in a single circuit.
//!
//! Register layout (least significant first): auxiliary qubit 0, label
//! qubits 1..=L, reference pattern on the next n qubits, target pattern on
//! the top n qubits. Joint outcome bitstrings therefore read label bits
//! first, then the aux bit.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::noise::{run_noisy, NoiseModel};
use crate::state::Statevector;

/// A labelled set of reference states sharing one pattern size.
#[derive(Debug, Clone)]
pub struct ReferenceBank {
    n: usize,
    states: Vec<Statevector>,
    labels: Vec<String>,
    label_qubits: usize,
}

impl ReferenceBank {
    /// Build a bank from states and distinct label bitstrings (all of equal
    /// length; `d = 1` may use the empty label).
    pub fn new(states: Vec<Statevector>, labels: Vec<String>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyReferences);
        }
        if labels.len() != states.len() {
            return Err(Error::BadLabel {
                label: String::new(),
                reason: format!(
                    "{} label(s) for {} reference(s)",
                    labels.len(),
                    states.len()
                ),
            });
        }
        let n = states[0].n_qubits();
        for s in &states {
            if s.n_qubits() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: s.n_qubits(),
                });
            }
        }
        let label_qubits = labels[0].len();
        if states.len() == 1 && label_qubits == 0 {
            return Ok(Self {
                n,
                states,
                labels,
                label_qubits,
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for label in &labels {
            if label.len() != label_qubits {
                return Err(Error::BadLabel {
                    label: label.clone(),
                    reason: format!("expected {label_qubits} bit(s)"),
                });
            }
            if label.chars().any(|c| c != '0' && c != '1') {
                return Err(Error::BadLabel {
                    label: label.clone(),
                    reason: "labels are bitstrings of 0s and 1s".into(),
                });
            }
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        if label_qubits == 0 {
            return Err(Error::BadLabel {
                label: String::new(),
                reason: "empty labels are only valid for a single reference".into(),
            });
        }
        Ok(Self {
            n,
            states,
            labels,
            label_qubits,
        })
    }

    /// Label each state with its index in binary, ⌈log₂ d⌉ bits wide. A
    /// single reference gets the empty label (no label qubits at all).
    pub fn with_default_labels(states: Vec<Statevector>) -> Result<Self> {
        let d = states.len();
        let labels = if d <= 1 {
            vec![String::new(); d]
        } else {
            let width = (usize::BITS - (d - 1).leading_zeros()) as usize;
            (0..d).map(|i| format!("{i:0width$b}")).collect()
        };
        Self::new(states, labels)
    }

    pub fn d(&self) -> usize {
        self.states.len()
    }

    pub fn pattern_qubits(&self) -> usize {
        self.n
    }

    pub fn label_qubits(&self) -> usize {
        self.label_qubits
    }

    pub fn states(&self) -> &[Statevector] {
        &self.states
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn label_value(&self, i: usize) -> usize {
        self.labels[i]
            .chars()
            .fold(0usize, |v, c| (v << 1) | usize::from(c == '1'))
    }
}

/// The joint memory state (1/√d)·Σᵢ |φᵢ⟩|labelᵢ⟩ on n + L qubits, with the
/// pattern on the high qubits. Unused labels carry zero amplitude.
pub fn build_reference_superposition(bank: &ReferenceBank) -> Result<Statevector> {
    let shift = bank.label_qubits();
    if bank.d() == 1 && shift == 0 {
        return Ok(bank.states()[0].clone());
    }
    let dim = 1usize << (bank.pattern_qubits() + shift);
    let scale = 1.0 / (bank.d() as f64).sqrt();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    for (i, state) in bank.states().iter().enumerate() {
        let label = bank.label_value(i);
        for (p, amp) in state.amplitudes().iter().enumerate() {
            amplitudes[(p << shift) | label] += amp * scale;
        }
    }
    Statevector::from_amplitudes(amplitudes)
}

/// The classification circuit on n (target) + n (reference) + L (labels)
/// + 1 (aux) qubits: destructive-swap gates on every target/reference pair,
/// then one CCNOT per pair accumulating the AND parity on the aux qubit.
/// Labels and aux are measured.
pub fn build_associative_circuit(n: usize, label_qubits: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::ZeroQubits);
    }
    let reference_base = label_qubits + 1;
    let target_base = reference_base + n;
    let mut circuit = Circuit::new(target_base + n)?;
    for i in 0..n {
        circuit.push(Gate::Cnot {
            control: target_base + i,
            target: reference_base + i,
        })?;
        circuit.push(Gate::H {
            target: target_base + i,
        })?;
    }
    for i in 0..n {
        circuit.push(Gate::Ccnot {
            control1: target_base + i,
            control2: reference_base + i,
            target: 0,
        })?;
    }
    circuit.set_measured((0..=label_qubits).collect())?;
    Ok(circuit)
}

/// Success statistics for one reference label.
#[derive(Debug, Clone, Serialize)]
pub struct LabelScore {
    pub label: String,
    /// Raw joint probability P(label, aux = 0).
    pub p_joint_success: f64,
    /// Label marginal P(label).
    pub p_label: f64,
    /// P(aux = 0 | label); equals the standalone destructive-swap-test
    /// success probability against that reference.
    pub p_conditional_success: f64,
}

/// Joint histogram over (label ∥ aux) plus per-label success statistics.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationResult {
    pub histogram: BTreeMap<String, f64>,
    pub counts: Option<BTreeMap<String, u64>>,
    pub per_label: Vec<LabelScore>,
    /// Label with the largest joint success probability, ties resolved
    /// toward the lexicographically smaller label.
    pub winner: String,
    pub shots: u64,
}

impl ClassificationResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    /// Histogram rows for bar-plot reproduction.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("outcome,probability,count\n");
        for (bits, p) in &self.histogram {
            let count = self
                .counts
                .as_ref()
                .and_then(|c| c.get(bits))
                .map(|c| c.to_string())
                .unwrap_or_default();
            out.push_str(&format!("{bits},{p},{count}\n"));
        }
        out
    }
}

/// Classify a target against the bank: evolve |ψ⟩⊗|Φ⟩⊗|0⟩ through the
/// associative circuit and measure labels and aux jointly. `shots == 0`
/// evaluates exact probabilities (noise rejected as usual); otherwise the
/// noiseless path samples with `seed` and a noise model brings its own.
pub fn classify(
    target: &Statevector,
    bank: &ReferenceBank,
    shots: u64,
    seed: u64,
    noise: Option<&NoiseModel>,
) -> Result<ClassificationResult> {
    if target.n_qubits() != bank.pattern_qubits() {
        return Err(Error::DimensionMismatch {
            left: target.n_qubits(),
            right: bank.pattern_qubits(),
        });
    }
    if shots == 0 && noise.is_some() {
        return Err(Error::ExactModeWithNoise);
    }
    let circuit = build_associative_circuit(bank.pattern_qubits(), bank.label_qubits())?;
    let memory = build_reference_superposition(bank)?;
    let initial = Statevector::tensor(
        target,
        &Statevector::tensor(&memory, &Statevector::zero(1)?),
    );

    let (histogram, counts) = if shots == 0 {
        let probs = circuit.run(&initial)?.outcome_probabilities(circuit.measured())?;
        (probs, None)
    } else {
        let counts = match noise {
            Some(model) => run_noisy(&circuit, &initial, model, shots)?,
            None => circuit
                .run(&initial)?
                .sample_shots(circuit.measured(), shots, seed)?,
        };
        let histogram = counts
            .iter()
            .map(|(bits, &c)| (bits.clone(), c as f64 / shots as f64))
            .collect();
        (histogram, Some(counts))
    };

    let mut per_label = Vec::with_capacity(bank.d());
    for label in bank.labels() {
        let success_key = format!("{label}0");
        let failure_key = format!("{label}1");
        let p_joint_success = histogram.get(&success_key).copied().unwrap_or(0.0);
        let p_label = p_joint_success + histogram.get(&failure_key).copied().unwrap_or(0.0);
        let p_conditional_success = if p_label > 0.0 {
            p_joint_success / p_label
        } else {
            0.0
        };
        per_label.push(LabelScore {
            label: label.clone(),
            p_joint_success,
            p_label,
            p_conditional_success,
        });
    }
    let winner = per_label
        .iter()
        .map(|s| (s.label.clone(), s.p_joint_success))
        .max_by(|(la, pa), (lb, pb)| {
            pa.partial_cmp(pb)
                .expect("probabilities are finite")
                .then_with(|| lb.cmp(la))
        })
        .map(|(label, _)| label)
        .expect("bank is non-empty");

    Ok(ClassificationResult {
        histogram,
        counts,
        per_label,
        winner,
        shots,
    })
}
