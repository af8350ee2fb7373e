//! The gate set used by the overlap protocols: H, X, RY(θ), CNOT, CCNOT and
//! CSWAP, applied in place to a dense statevector.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::Statevector;

/// A single gate application with its qubit indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H { target: usize },
    X { target: usize },
    /// Rotation about y: RY(θ) = exp(−iθσ_y/2).
    Ry { theta: f64, target: usize },
    Cnot { control: usize, target: usize },
    Ccnot { control1: usize, control2: usize, target: usize },
    Cswap { control: usize, a: usize, b: usize },
}

impl Gate {
    /// Qubits the gate acts on. The first listed qubit is the least
    /// significant bit of the local basis used by [`Gate::matrix`].
    pub fn targets(&self) -> Vec<usize> {
        match *self {
            Gate::H { target } | Gate::X { target } | Gate::Ry { target, .. } => {
                vec![target]
            }
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Ccnot {
                control1,
                control2,
                target,
            } => vec![control1, control2, target],
            Gate::Cswap { control, a, b } => vec![control, a, b],
        }
    }

    /// Number of qubits the gate acts on (1, 2 or 3).
    pub fn arity(&self) -> usize {
        match self {
            Gate::H { .. } | Gate::X { .. } | Gate::Ry { .. } => 1,
            Gate::Cnot { .. } => 2,
            Gate::Ccnot { .. } | Gate::Cswap { .. } => 3,
        }
    }

    /// Explicit unitary in the gate's local basis: local bit k is the k-th
    /// entry of [`Gate::targets`]. Row-major, dimension 2^arity.
    pub fn matrix(&self) -> Vec<Vec<Complex64>> {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            Gate::H { .. } => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                vec![vec![h, h], vec![h, -h]]
            }
            Gate::X { .. } => {
                let zero = Complex64::new(0.0, 0.0);
                vec![vec![zero, one], vec![one, zero]]
            }
            Gate::Ry { theta, .. } => {
                let c = Complex64::new((theta / 2.0).cos(), 0.0);
                let s = Complex64::new((theta / 2.0).sin(), 0.0);
                vec![vec![c, -s], vec![s, c]]
            }
            Gate::Cnot { .. } => {
                // Local bit 0 = control, bit 1 = target.
                permutation_matrix(&[0, 3, 2, 1])
            }
            Gate::Ccnot { .. } => {
                // Local bits 0, 1 = controls, bit 2 = target.
                permutation_matrix(&[0, 1, 2, 7, 4, 5, 6, 3])
            }
            Gate::Cswap { .. } => {
                // Local bit 0 = control, bits 1, 2 swapped when it is set.
                permutation_matrix(&[0, 1, 2, 5, 4, 3, 6, 7])
            }
        }
    }

    /// Check targets are distinct and within `n_qubits`.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let targets = self.targets();
        for &q in &targets {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits,
                });
            }
        }
        for i in 0..targets.len() {
            for j in i + 1..targets.len() {
                if targets[i] == targets[j] {
                    return Err(Error::DuplicateTargets(targets));
                }
            }
        }
        Ok(())
    }

    /// Apply the gate in place.
    pub fn apply_to(&self, state: &mut Statevector) -> Result<()> {
        self.validate(state.n_qubits())?;
        let amps = state.amplitudes_mut();
        match *self {
            Gate::H { target } => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                apply_1q(amps, target, |a0, a1| (h * (a0 + a1), h * (a0 - a1)));
            }
            Gate::X { target } => {
                apply_1q(amps, target, |a0, a1| (a1, a0));
            }
            Gate::Ry { theta, target } => {
                let c = (theta / 2.0).cos();
                let s = (theta / 2.0).sin();
                apply_1q(amps, target, |a0, a1| (c * a0 - s * a1, s * a0 + c * a1));
            }
            Gate::Cnot { control, target } => {
                let cmask = 1usize << control;
                let tmask = 1usize << target;
                for i in 0..amps.len() {
                    if i & cmask != 0 && i & tmask == 0 {
                        amps.swap(i, i | tmask);
                    }
                }
            }
            Gate::Ccnot {
                control1,
                control2,
                target,
            } => {
                let cmask = (1usize << control1) | (1usize << control2);
                let tmask = 1usize << target;
                for i in 0..amps.len() {
                    if i & cmask == cmask && i & tmask == 0 {
                        amps.swap(i, i | tmask);
                    }
                }
            }
            Gate::Cswap { control, a, b } => {
                let cmask = 1usize << control;
                let amask = 1usize << a;
                let bmask = 1usize << b;
                for i in 0..amps.len() {
                    if i & cmask != 0 && i & amask != 0 && i & bmask == 0 {
                        amps.swap(i, i ^ amask ^ bmask);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Apply a gate to a state, returning the evolved copy.
pub fn apply_gate(state: &Statevector, gate: &Gate) -> Result<Statevector> {
    let mut out = state.clone();
    gate.apply_to(&mut out)?;
    Ok(out)
}

/// Act with a 2×2 map on every amplitude pair split by `target`.
fn apply_1q<F>(amps: &mut [Complex64], target: usize, f: F)
where
    F: Fn(Complex64, Complex64) -> (Complex64, Complex64),
{
    let step = 1usize << target;
    let mut base = 0;
    while base < amps.len() {
        for low in base..base + step {
            let (a0, a1) = f(amps[low], amps[low + step]);
            amps[low] = a0;
            amps[low + step] = a1;
        }
        base += 2 * step;
    }
}

/// Unitary sending local basis |j⟩ to |image[j]⟩.
fn permutation_matrix(image: &[usize]) -> Vec<Vec<Complex64>> {
    let dim = image.len();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (j, &out) in image.iter().enumerate() {
        m[out][j] = Complex64::new(1.0, 0.0);
    }
    m
}
