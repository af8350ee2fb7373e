//! Ordered gate lists with a declared measurement register.

use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::state::Statevector;

/// An ordered list of gates on `n_qubits` qubits plus the set of qubits
/// read out at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    measured: Vec<usize>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::ZeroQubits);
        }
        Ok(Self {
            n_qubits,
            gates: Vec::new(),
            measured: Vec::new(),
        })
    }

    /// Append a gate, validating its targets against the register size.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Declare which qubits are measured. Indices must be distinct and in
    /// range.
    pub fn set_measured(&mut self, measured: Vec<usize>) -> Result<()> {
        for &q in &measured {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        let mut sorted = measured.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicateTargets(measured));
        }
        self.measured = measured;
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn measured(&self) -> &[usize] {
        &self.measured
    }

    /// Apply all gates in order to a copy of `initial`.
    pub fn run(&self, initial: &Statevector) -> Result<Statevector> {
        if initial.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: initial.n_qubits(),
                right: self.n_qubits,
            });
        }
        let mut state = initial.clone();
        for gate in &self.gates {
            gate.apply_to(&mut state)?;
        }
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn empty_circuit_is_identity() {
        let circuit = Circuit::new(2).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
        let state = Statevector::random(2, &mut rng).unwrap();
        let out = circuit.run(&state).unwrap();
        assert_eq!(out, state);
    }

    #[test]
    fn double_hadamard_is_identity() {
        let mut circuit = Circuit::new(1).unwrap();
        circuit.push(Gate::H { target: 0 }).unwrap();
        circuit.push(Gate::H { target: 0 }).unwrap();
        let out = circuit.run(&Statevector::zero(1).unwrap()).unwrap();
        assert!((out.amplitudes()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(out.amplitudes()[1].norm() < 1e-12);
    }

    #[test]
    fn ghz_preparation() {
        let mut circuit = Circuit::new(3).unwrap();
        circuit.push(Gate::H { target: 0 }).unwrap();
        circuit
            .push(Gate::Cnot {
                control: 0,
                target: 1,
            })
            .unwrap();
        circuit
            .push(Gate::Cnot {
                control: 1,
                target: 2,
            })
            .unwrap();
        let out = circuit.run(&Statevector::zero(3).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitudes()[0] - Complex64::new(h, 0.0)).norm() < 1e-12);
        assert!((out.amplitudes()[7] - Complex64::new(h, 0.0)).norm() < 1e-12);
        for i in 1..7 {
            assert!(out.amplitudes()[i].norm() < 1e-12);
        }
    }

    #[test]
    fn push_validates_targets() {
        let mut circuit = Circuit::new(2).unwrap();
        assert!(circuit.push(Gate::H { target: 3 }).is_err());
        assert!(circuit
            .push(Gate::Cnot {
                control: 0,
                target: 0
            })
            .is_err());
        assert!(circuit.set_measured(vec![0, 0]).is_err());
        assert!(circuit.set_measured(vec![5]).is_err());
    }

    #[test]
    fn run_checks_dimensions() {
        let circuit = Circuit::new(3).unwrap();
        let state = Statevector::zero(2).unwrap();
        assert!(matches!(
            circuit.run(&state),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
