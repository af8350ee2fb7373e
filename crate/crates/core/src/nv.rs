//! Single-qubit rotation-angle fidelity curves and their linear fit.
//!
//! The reference state is |+⟩ = H|0⟩ and the probe is RY(±θ)|0⟩, with the
//! sign selected by β so that the theoretical fidelity
//! F_th = ½(1 ± sinθ) peaks at θ = π/2 for β = π/2 and at θ = 3π/2 for
//! β = 3π/2. Measured curves are fitted as F = a + b·F_th by ordinary
//! least squares.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::{apply_gate, Gate};
use crate::noise::NoiseModel;
use crate::overlap::destructive_swap_test_overlap;
use crate::state::Statevector;

/// The two rotation-phase settings the protocol distinguishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Beta {
    /// β = π/2: probe RY(+θ)|0⟩, fidelity ½(1 + sinθ).
    HalfPi,
    /// β = 3π/2: probe RY(−θ)|0⟩, fidelity ½(1 − sinθ).
    ThreeHalfPi,
}

impl Beta {
    pub fn angle(self) -> f64 {
        match self {
            Beta::HalfPi => std::f64::consts::FRAC_PI_2,
            Beta::ThreeHalfPi => 3.0 * std::f64::consts::FRAC_PI_2,
        }
    }

    fn rotation_sign(self) -> f64 {
        match self {
            Beta::HalfPi => 1.0,
            Beta::ThreeHalfPi => -1.0,
        }
    }
}

impl std::fmt::Display for Beta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Beta::HalfPi => write!(f, "pi/2"),
            Beta::ThreeHalfPi => write!(f, "3pi/2"),
        }
    }
}

/// Theoretical fidelity ½(1 ± sinθ) between |+⟩ and the rotated probe.
pub fn nv_theoretical_fidelity(theta: f64, beta: Beta) -> f64 {
    0.5 * (1.0 + beta.rotation_sign() * theta.sin())
}

/// Simulate one sweep point: prepare the probe, run the destructive swap
/// test against |+⟩ and report the (clamped) fidelity.
pub fn simulate_nv_point(
    theta: f64,
    beta: Beta,
    shots: u64,
    seed: u64,
    noise: Option<&NoiseModel>,
) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle(theta));
    }
    let zero = Statevector::zero(1)?;
    let probe = apply_gate(
        &zero,
        &Gate::Ry {
            theta: beta.rotation_sign() * theta,
            target: 0,
        },
    )?;
    let reference = apply_gate(&zero, &Gate::H { target: 0 })?;
    let result = destructive_swap_test_overlap(&probe, &reference, shots, seed, noise)?;
    Ok(result.fidelity)
}

/// A measured fidelity-versus-angle curve for one β setting.
#[derive(Debug, Clone, PartialEq)]
pub struct NvCurve {
    pub beta: Beta,
    samples: Vec<(f64, f64)>,
}

impl NvCurve {
    pub fn new(beta: Beta, samples: Vec<(f64, f64)>) -> Result<Self> {
        for &(theta, fidelity) in &samples {
            if !theta.is_finite() {
                return Err(Error::NonFiniteAngle(theta));
            }
            if !(0.0..=1.0).contains(&fidelity) {
                return Err(Error::FidelityOutOfRange(fidelity));
            }
        }
        Ok(Self { beta, samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Two-column CSV: angle, fidelity.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,fidelity\n");
        for (theta, fidelity) in &self.samples {
            out.push_str(&format!("{theta},{fidelity}\n"));
        }
        out
    }

    /// Parse a two-column CSV, tolerating a header line.
    pub fn from_csv(beta: Beta, text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("theta")) {
                continue;
            }
            let mut fields = line.split(',');
            let parse = |field: Option<&str>| {
                field
                    .and_then(|f| f.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::MalformedImage {
                        format: "curve CSV",
                        reason: format!("line {}: {line:?}", lineno + 1),
                    })
            };
            let theta = parse(fields.next())?;
            let fidelity = parse(fields.next())?;
            samples.push((theta, fidelity));
        }
        NvCurve::new(beta, samples)
    }
}

/// Least-squares parameters of F = a + b·F_th.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub residual_rms: f64,
}

impl FitResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit serializes")
    }
}

/// Ordinary least squares of the measured fidelities against the
/// theoretical curve. Needs at least two samples with distinct F_th.
pub fn fit_linear(curve: &NvCurve) -> Result<FitResult> {
    let samples = curve.samples();
    if samples.len() < 2 {
        return Err(Error::DegenerateFit);
    }
    let xs: Vec<f64> = samples
        .iter()
        .map(|&(theta, _)| nv_theoretical_fidelity(theta, curve.beta))
        .collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, f)| f).collect();
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx < 1e-12 {
        return Err(Error::DegenerateFit);
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let b = sxy / sxx;
    let a = mean_y - b * mean_x;
    let residual_rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - a - b * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(FitResult { a, b, residual_rms })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    fn grid(points: usize) -> impl Iterator<Item = f64> {
        (0..points).map(move |k| k as f64 * 2.0 * PI / points as f64)
    }

    #[test]
    fn theoretical_curve_peaks_at_the_optimal_angles() {
        assert!((nv_theoretical_fidelity(PI / 2.0, Beta::HalfPi) - 1.0).abs() < 1e-12);
        assert!(
            (nv_theoretical_fidelity(3.0 * PI / 2.0, Beta::ThreeHalfPi) - 1.0).abs() < 1e-12
        );
        assert!((nv_theoretical_fidelity(0.0, Beta::HalfPi) - 0.5).abs() < 1e-12);
        assert!((nv_theoretical_fidelity(0.0, Beta::ThreeHalfPi) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn the_two_beta_curves_are_complementary() {
        for theta in grid(64) {
            let sum = nv_theoretical_fidelity(theta, Beta::HalfPi)
                + nv_theoretical_fidelity(theta, Beta::ThreeHalfPi);
            assert!((sum - 1.0).abs() < 1e-12);
            for beta in [Beta::HalfPi, Beta::ThreeHalfPi] {
                let f = nv_theoretical_fidelity(theta, beta);
                assert!((0.0..=1.0).contains(&f));
            }
        }
    }

    #[test]
    fn exact_simulation_matches_theory_everywhere() {
        for beta in [Beta::HalfPi, Beta::ThreeHalfPi] {
            for theta in grid(100) {
                let simulated = simulate_nv_point(theta, beta, 0, 0, None).unwrap();
                let theory = nv_theoretical_fidelity(theta, beta);
                assert!(
                    (simulated - theory).abs() < 1e-10,
                    "beta {beta}, theta {theta}: {simulated} vs {theory}"
                );
            }
        }
    }

    #[test]
    fn optimal_and_orthogonal_points() {
        let max = simulate_nv_point(PI / 2.0, Beta::HalfPi, 0, 0, None).unwrap();
        assert!((max - 1.0).abs() < 1e-10);
        let min = simulate_nv_point(3.0 * PI / 2.0, Beta::HalfPi, 0, 0, None).unwrap();
        assert!(min.abs() < 1e-10);
    }

    #[test]
    fn fit_recovers_synthetic_parameters_exactly() {
        for (a, b) in [(0.04, 0.89), (0.10, 0.83)] {
            let samples: Vec<(f64, f64)> = grid(50)
                .map(|theta| {
                    (theta, a + b * nv_theoretical_fidelity(theta, Beta::HalfPi))
                })
                .collect();
            let curve = NvCurve::new(Beta::HalfPi, samples).unwrap();
            let fit = fit_linear(&curve).unwrap();
            assert!((fit.a - a).abs() < 1e-9, "a = {}", fit.a);
            assert!((fit.b - b).abs() < 1e-9, "b = {}", fit.b);
            assert!(fit.residual_rms < 1e-9);
        }
    }

    #[test]
    fn identity_data_fits_identity_line() {
        let samples: Vec<(f64, f64)> = grid(20)
            .map(|theta| (theta, nv_theoretical_fidelity(theta, Beta::ThreeHalfPi)))
            .collect();
        let fit = fit_linear(&NvCurve::new(Beta::ThreeHalfPi, samples).unwrap()).unwrap();
        assert!(fit.a.abs() < 1e-12);
        assert!((fit.b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_designs_are_rejected() {
        // All samples at the same F_th value.
        let curve = NvCurve::new(
            Beta::HalfPi,
            vec![(0.0, 0.5), (PI, 0.5), (2.0 * PI, 0.48)],
        )
        .unwrap();
        assert!(matches!(fit_linear(&curve), Err(Error::DegenerateFit)));
        let single = NvCurve::new(Beta::HalfPi, vec![(1.0, 0.9)]).unwrap();
        assert!(matches!(fit_linear(&single), Err(Error::DegenerateFit)));
    }

    #[test]
    fn curve_validation_and_csv_roundtrip() {
        assert!(matches!(
            NvCurve::new(Beta::HalfPi, vec![(0.1, 1.2)]),
            Err(Error::FidelityOutOfRange(_))
        ));
        assert!(matches!(
            NvCurve::new(Beta::HalfPi, vec![(f64::NAN, 0.5)]),
            Err(Error::NonFiniteAngle(_))
        ));
        let curve = NvCurve::new(Beta::HalfPi, vec![(0.25, 0.5), (1.5, 0.75)]).unwrap();
        let parsed = NvCurve::from_csv(Beta::HalfPi, &curve.to_csv()).unwrap();
        assert_eq!(parsed, curve);
    }

    #[test]
    fn noise_compresses_the_fitted_contrast() {
        // Depolarizing plus readout noise shifts the fit toward a > 0 and
        // b < 1 on average, the signature of contrast loss.
        let model = NoiseModel::new(0.05, 0.05, 0.0, 0.05, 0).unwrap();
        let experiments = 50;
        let points = 16;
        let mut sum_a = 0.0;
        let mut sum_b = 0.0;
        for exp in 0..experiments as u64 {
            let samples: Vec<(f64, f64)> = grid(points)
                .enumerate()
                .map(|(k, theta)| {
                    let m = model.with_seed(exp * points as u64 + k as u64);
                    let f = simulate_nv_point(theta, Beta::HalfPi, 512, 0, Some(&m)).unwrap();
                    (theta, f)
                })
                .collect();
            let fit = fit_linear(&NvCurve::new(Beta::HalfPi, samples).unwrap()).unwrap();
            sum_a += fit.a;
            sum_b += fit.b;
        }
        let mean_a = sum_a / experiments as f64;
        let mean_b = sum_b / experiments as f64;
        assert!(mean_b < 1.0, "mean b = {mean_b}");
        assert!(mean_a > 0.0, "mean a = {mean_a}");
    }
}
