//! Finite-resolution measurement operators of a Hermitian observable, their
//! outcome densities, conditioned states and post-measurement expectations.

mod grid;
mod measurement;

pub use grid::{trapezoid, GridPolicy, OutcomeGrid, Resolution};
pub use measurement::{EigenCoefficients, GaussianMeasurement, GridSample, MeasurementOutcome, SHARP_RESOLUTION_LIMIT};

pub(crate) use measurement::vanishing;

use crate::error::Result;
use crate::fock::{FockOperator, FockState};
use crate::scalar::{Cplx, Real};

/// Probability mass of the photon distribution left beyond a default
/// photon-number grid.
pub const NUMBER_GRID_TAIL: f64 = 1e-12;

/// `(2πδ²)^{−1/4} exp(−(Â − a_m)²/(4δ²))`.
pub fn measurement_operator<T: Real>(
    observable: &FockOperator<T>,
    a_m: T,
    delta: Resolution<T>,
) -> Result<FockOperator<T>> {
    Ok(GaussianMeasurement::new(observable, delta)?.operator(a_m))
}

/// `⟨ψ|P̂²(a_m)|ψ⟩`.
pub fn outcome_density<T: Real>(
    state: &FockState<T>,
    observable: &FockOperator<T>,
    a_m: T,
    delta: Resolution<T>,
) -> Result<T> {
    GaussianMeasurement::new(observable, delta)?.outcome_density(state, a_m)
}

/// `P̂(a_m)|ψ⟩` normalized, together with the outcome density.
pub fn condition_state<T: Real>(
    state: &FockState<T>,
    observable: &FockOperator<T>,
    a_m: T,
    delta: Resolution<T>,
) -> Result<MeasurementOutcome<T>> {
    GaussianMeasurement::new(observable, delta)?.condition(state, a_m)
}

/// Spectral-norm deviation of the integrated `Σ P̂² Δa` from the identity.
pub fn completeness_check<T: Real>(
    observable: &FockOperator<T>,
    grid: &OutcomeGrid<T>,
    delta: Resolution<T>,
) -> Result<T> {
    GaussianMeasurement::new(observable, delta)?.completeness_deviation(grid)
}

/// `⟨ψ|P̂ T̂ P̂|ψ⟩ / ⟨ψ|P̂²|ψ⟩`.
pub fn post_expectation<T: Real>(
    state: &FockState<T>,
    observable: &FockOperator<T>,
    a_m: T,
    delta: Resolution<T>,
    target: &FockOperator<T>,
) -> Result<Cplx<T>> {
    GaussianMeasurement::new(observable, delta)?.post_expectation(state, a_m, target)
}

/// Default photon-number outcome axis for a state.
///
/// Spans `[−mδ, N + mδ]` where `N` is the larger of `⟨n̂⟩ + 6√⟨n̂⟩` and the
/// photon number beyond which less than [`NUMBER_GRID_TAIL`] (or the policy
/// tolerance) of the distribution remains; `m` is the policy margin.
pub fn number_grid<T: Real>(state: &FockState<T>, delta: Resolution<T>, policy: &GridPolicy) -> Result<OutcomeGrid<T>> {
    let d = delta.value().to_f64().unwrap_or(f64::NAN);
    let probs: Vec<f64> = state.photon_distribution().iter().map(|p| p.to_f64().unwrap_or(0.0)).collect();
    let mean: f64 = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    let tail_tol = match *policy {
        GridPolicy::Standard => NUMBER_GRID_TAIL,
        GridPolicy::Tolerance(tol) => tol.min(NUMBER_GRID_TAIL),
    };
    let mut tail = 0.0;
    let mut support = 0;
    for (n, p) in probs.iter().enumerate().rev() {
        tail += p;
        if tail >= tail_tol {
            support = n;
            break;
        }
    }
    let n_eff = (mean + 6.0 * mean.sqrt()).max(support as f64);
    let margin = policy.margin_sigmas() * d;
    let step = policy.step(d, std::f64::consts::TAU, (d / 10.0).min(0.05));
    OutcomeGrid::new(T::lit(-margin), T::lit(n_eff + margin), T::lit(step))
}

/// Default quadrature outcome axis for the vacuum: `±m·√(1/4 + δ²)`, step `δ/20`.
pub fn vacuum_quadrature_grid<T: Real>(delta: Resolution<T>, policy: &GridPolicy) -> Result<OutcomeGrid<T>> {
    let d = delta.value().to_f64().unwrap_or(f64::NAN);
    let half = policy.margin_sigmas() * (0.25 + d * d).sqrt();
    let step = policy.step(d, 0.0, d / 20.0);
    OutcomeGrid::symmetric(T::lit(half), T::lit(step))
}
