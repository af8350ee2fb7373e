//! Swap-test based pattern recognition on simulated quantum hardware.
//!
//! This crate provides the full stack needed to compare classical images as
//! quantum states:
//!
//! * [`state`] / [`gates`] / [`circuit`] — a dense statevector simulator for
//!   the small gate set the protocols use (H, X, RY, CNOT, CCNOT, CSWAP),
//!   with Born-rule measurement and seeded shot sampling.
//! * [`noise`] — per-gate depolarizing channels realized as Monte Carlo Pauli
//!   trajectories, plus classical readout bit flips.
//! * [`overlap`] — the ancilla-assisted swap test and the destructive
//!   (ancilla-free) swap test, both reporting fidelity and overlap.
//! * [`image`] — QPIE amplitude encoding of pixel matrices, binarization,
//!   power-of-two padding and block segmentation, with matrix-text, PGM and
//!   MNIST IDX loaders.
//! * [`pipeline`] — full-image and segment-wise comparison experiments,
//!   the average-overlap score and reference ranking.
//! * [`memory`] — an associative-memory classifier holding all references in
//!   superposition with label qubits.
//! * [`nv`] — the single-qubit rotation-angle fidelity curve and its linear
//!   least-squares fit.

pub mod circuit;
pub mod error;
pub mod gates;
pub mod image;
pub mod imageio;
pub mod memory;
pub mod noise;
pub mod nv;
pub mod overlap;
pub mod pipeline;
pub mod state;

pub use circuit::Circuit;
pub use error::{Error, Result};
pub use gates::Gate;
pub use image::{Image, QuantumImage};
pub use noise::NoiseModel;
pub use overlap::{OverlapResult, Protocol};
pub use pipeline::ComparisonReport;
pub use state::Statevector;
