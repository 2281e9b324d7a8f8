//! Closed forms and matrix-path reproductions of the photon-number and
//! quadrature measurement experiments, and the correlations between
//! measurement results and the post-measurement field.

mod photon_number;
mod quadrature;
mod sweep;

pub use photon_number::{
    pn_outcome_density, pn_post_coherence, DualPathDeviation, PhotonNumberQnd, POISSON_RELATIVE_CUTOFF, SUM_TAIL_TOL,
};
pub use quadrature::{
    jump_joint_density, operator_side_covariance, vac_outcome_density, BackAction, FieldJumpReport, JumpProbability,
    QuadratureQnd, VacuumStatistics, MIN_QUADRATURE_DIM,
};
pub use sweep::{
    correlation_magnitude_per_amplitude, correlation_sweep, optimal_resolution, CorrelationSweep, PeakScan,
};

use serde::Serialize;

use crate::error::{QndError, Result};
use crate::povm::{OutcomeGrid, Resolution};
use crate::scalar::{Cplx, Real};

/// Grid mass a photon-number correlation requires.
pub const NUMBER_MASS_TOL: f64 = 1e-9;
/// Grid mass a quadrature correlation requires.
pub const QUADRATURE_MASS_TOL: f64 = 1e-8;

/// Factor `exp(−1/(8δn²))` by which a photon-number measurement of
/// resolution `δn` shrinks the coherent amplitude.
pub fn dephasing_factor<T: Real>(delta_n: Resolution<T>) -> T {
    let d = delta_n.value();
    (-(T::one() / (T::lit(8.0) * d * d))).exp()
}

/// Phase uncertainty `δφ = 1/(2δn)` imposed by the measurement.
pub fn phase_noise<T: Real>(delta_n: Resolution<T>) -> T {
    T::one() / (T::lit(2.0) * delta_n.value())
}

/// `cos 2πn_m`: +1 at integer outcomes, −1 at half-integers.
pub fn quantization<T: Real>(n_m: T) -> T {
    // reduce first so large outcomes keep full precision
    let frac = n_m - n_m.round();
    (T::TAU() * frac).cos()
}

/// One point of an outcome curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample<T: Real> {
    pub a_m: T,
    pub density: T,
    /// Context-dependent post-measurement value.
    pub post_value: Cplx<T>,
}

/// A correlation evaluated in closed form and numerically on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport<T: Real> {
    pub closed_form: Cplx<T>,
    pub numeric: Cplx<T>,
    pub abs_error: T,
    pub grid: OutcomeGrid<T>,
    pub dim: usize,
    /// Trapezoid integral of the outcome density over the grid.
    pub grid_mass: T,
}

impl<T: Real> CorrelationReport<T> {
    pub(crate) fn new(closed_form: Cplx<T>, numeric: Cplx<T>, grid: OutcomeGrid<T>, dim: usize, grid_mass: T) -> Self {
        Self { closed_form, numeric, abs_error: (closed_form - numeric).norm(), grid, dim, grid_mass }
    }
}

pub(crate) fn check_mass<T: Real>(mass: T, tol: f64, grid: &OutcomeGrid<T>) -> Result<()> {
    let m = mass.to_f64().unwrap_or(f64::NAN);
    if (1.0 - m).abs() > tol || !m.is_finite() {
        return Err(QndError::GridCoverage(format!(
            "outcome grid [{}, {}] holds density mass {m:.12}, outside 1 ± {tol:e}",
            grid.lo(),
            grid.hi()
        )));
    }
    Ok(())
}

/// Interior local maxima of sampled `ys`, returned as their `xs` positions.
///
/// Plateaus count once, at their first sample.
pub fn local_maxima<T: Real>(xs: &[T], ys: &[T]) -> Vec<T> {
    let n = ys.len().min(xs.len());
    let mut out = Vec::new();
    let mut k = 1;
    while k + 1 < n {
        if ys[k] > ys[k - 1] {
            let mut j = k;
            while j + 1 < n && ys[j + 1] == ys[k] {
                j += 1;
            }
            if j + 1 < n && ys[j + 1] < ys[k] {
                out.push(xs[k]);
            }
            k = j + 1;
        } else {
            k += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn res(d: f64) -> Resolution<f64> {
        Resolution::new(d).unwrap()
    }

    #[test]
    fn dephasing_values() {
        assert!((dephasing_factor(res(0.5)) - (-0.5_f64).exp()).abs() < 1e-15);
        assert!((dephasing_factor(res(0.5)) - 0.6065).abs() < 1e-4);
        assert!((dephasing_factor(res(0.3)) - (-25.0_f64 / 18.0).exp()).abs() < 1e-15);
        assert!((dephasing_factor(res(0.3)) - 0.24935).abs() < 1e-5);
        assert!(dephasing_factor(res(1e8)) > 1.0 - 1e-15);
    }

    #[test]
    fn phase_noise_values() {
        assert_eq!(phase_noise(res(0.5)), 1.0);
        assert_eq!(phase_noise(res(1.0)), 0.5);
        for d in [0.01, 0.3, 7.0] {
            assert!((phase_noise(res(d)) * d - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn quantization_values() {
        assert_eq!(quantization(7.0), 1.0);
        assert_eq!(quantization(7.5), -1.0);
        assert!(quantization(7.25_f64).abs() < 1e-15);
    }

    #[test]
    fn local_maxima_detection() {
        let xs: Vec<f64> = (0..200).map(|k| k as f64 * 0.05).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (std::f64::consts::TAU * x).cos()).collect();
        let m = local_maxima(&xs, &ys);
        assert_eq!(m.len(), 9);
        for (k, x) in m.iter().enumerate() {
            assert!((x - (k + 1) as f64).abs() < 1e-9);
        }
        assert!(local_maxima(&[0.0, 1.0], &[1.0, 2.0]).is_empty());
        assert_eq!(local_maxima(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0, 1.0, 0.0]), vec![1.0]);
    }
}
