use ndarray::Array1;
use rayon::prelude::*;

use crate::error::{QndError, Result};
use crate::fock::{EigenDecomposition, FockOperator, FockState};
use crate::povm::grid::{GridPolicy, OutcomeGrid, Resolution};
use crate::scalar::{czero, Cplx, Real};

/// Resolution below which a non-diagonal observable's truncated eigenbasis,
/// rather than the Gaussian kernel, dominates the error.
pub const SHARP_RESOLUTION_LIMIT: f64 = 1e-3;

/// Result of conditioning a state on one outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome<T: Real> {
    pub a_m: T,
    /// Probability density per unit of the observable.
    pub density: T,
    pub conditioned: FockState<T>,
}

/// One grid point of a sampled outcome axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSample<T: Real> {
    pub a_m: T,
    pub density: T,
    /// Unnormalized `⟨ψ|P̂ T̂ P̂|ψ⟩`; `None` when no target was requested.
    pub weighted: Option<Cplx<T>>,
}

impl<T: Real> GridSample<T> {
    /// `⟨T̂⟩` in the conditioned state, or `None` below the density floor.
    pub fn post_value(&self) -> Option<Cplx<T>> {
        match self.weighted {
            Some(w) if self.density > T::DENSITY_FLOOR => Some(w / self.density),
            _ => None,
        }
    }
}

/// A state expanded in the observable's eigenbasis, reused across outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCoefficients<T: Real> {
    coeffs: Array1<Cplx<T>>,
    weights: Vec<T>,
}

impl<T: Real> EigenCoefficients<T> {
    pub fn coeffs(&self) -> &Array1<Cplx<T>> {
        &self.coeffs
    }

    /// `|⟨λ_k|ψ⟩|²`.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

/// Gaussian-smeared measurement of a Hermitian observable,
/// `P̂(a) = (2πδ²)^{−1/4} exp(−(Â − a)²/(4δ²))`.
///
/// The eigendecomposition of `Â` is computed once; every outcome then costs
/// one kernel evaluation per eigenvalue.
#[derive(Debug, Clone)]
pub struct GaussianMeasurement<T: Real> {
    eigen: EigenDecomposition<T>,
    delta: Resolution<T>,
    diagonal: bool,
}

impl<T: Real> GaussianMeasurement<T> {
    pub fn new(observable: &FockOperator<T>, delta: Resolution<T>) -> Result<Self> {
        let eigen = observable.eigh()?;
        let n = observable.dim();
        let m = observable.entries();
        let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || m[[i, j]] == czero()));
        Ok(Self { eigen, delta, diagonal })
    }

    pub fn eigen(&self) -> &EigenDecomposition<T> {
        &self.eigen
    }

    pub fn delta(&self) -> Resolution<T> {
        self.delta
    }

    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    /// Smallest and largest eigenvalue of the observable.
    pub fn spectrum_bounds(&self) -> (T, T) {
        let v = self.eigen.values();
        (v[0], v[v.len() - 1])
    }

    /// `(2πδ²)^{−1/4}`, also the spectral-norm bound of `P̂`.
    pub fn peak(&self) -> T {
        let d = self.delta.value();
        (T::TAU() * d * d).powf(T::lit(-0.25))
    }

    /// Kernel `g(λ − a)` at one eigenvalue.
    pub fn kernel_at(&self, lambda: T, a_m: T) -> T {
        let d = self.delta.value();
        let u = lambda - a_m;
        self.peak() * (-(u * u) / (T::lit(4.0) * d * d)).exp()
    }

    /// Eigenvalues of `P̂(a_m)`, in the observable's eigenvalue order.
    pub fn kernel(&self, a_m: T) -> Vec<T> {
        let d = self.delta.value();
        let peak = self.peak();
        let scale = T::lit(4.0) * d * d;
        self.eigen.values().iter().map(|&l| peak * (-((l - a_m) * (l - a_m)) / scale).exp()).collect()
    }

    pub fn operator(&self, a_m: T) -> FockOperator<T> {
        let d = self.delta.value();
        let peak = self.peak();
        let scale = T::lit(4.0) * d * d;
        self.eigen.function(|l| peak * (-((l - a_m) * (l - a_m)) / scale).exp())
    }

    /// Warning text when the resolution is below [`SHARP_RESOLUTION_LIMIT`]
    /// for an observable that is not diagonal in the number basis.
    pub fn conditioning_warning(&self) -> Option<String> {
        let d = self.delta.value().to_f64().unwrap_or(f64::NAN);
        (!self.diagonal && d < SHARP_RESOLUTION_LIMIT).then(|| {
            format!(
                "resolution {d:e} is below {SHARP_RESOLUTION_LIMIT:e}: the truncated eigenbasis of the observable \
                 limits accuracy at dim {}",
                self.dim()
            )
        })
    }

    pub fn prepare(&self, state: &FockState<T>) -> Result<EigenCoefficients<T>> {
        if state.dim() != self.dim() {
            return Err(QndError::DimensionMismatch { expected: self.dim(), found: state.dim() });
        }
        let coeffs = self.eigen.to_eigenbasis(state.amplitudes().view());
        let weights = coeffs.iter().map(|c| c.norm_sqr()).collect();
        Ok(EigenCoefficients { coeffs, weights })
    }

    /// `Σ_k g_k²|c_k|²`; nonnegative by construction.
    pub fn density_prepared(&self, prepared: &EigenCoefficients<T>, a_m: T) -> T {
        self.kernel(a_m).iter().zip(prepared.weights.iter()).map(|(g, w)| *g * *g * *w).sum::<T>().max(T::zero())
    }

    /// Unnormalized `P̂(a_m)|ψ⟩` in the number basis.
    pub fn filter_prepared(&self, prepared: &EigenCoefficients<T>, a_m: T) -> Array1<Cplx<T>> {
        let g = self.kernel(a_m);
        let filtered = Array1::from_iter(prepared.coeffs.iter().zip(g.iter()).map(|(c, g)| *c * *g));
        self.eigen.from_eigenbasis(filtered.view())
    }

    /// Density and unnormalized `⟨ψ|P̂ T̂ P̂|ψ⟩` at one outcome.
    pub fn weighted_prepared(
        &self,
        prepared: &EigenCoefficients<T>,
        a_m: T,
        target: &FockOperator<T>,
    ) -> Result<(T, Cplx<T>)> {
        let phi = self.filter_prepared(prepared, a_m);
        let density = phi.iter().map(|z| z.norm_sqr()).sum::<T>();
        let t_phi = target.apply_vec(phi.view())?;
        let value = phi.iter().zip(t_phi.iter()).fold(czero(), |acc, (a, b)| acc + a.conj() * b);
        Ok((density, value))
    }

    pub fn outcome_density(&self, state: &FockState<T>, a_m: T) -> Result<T> {
        Ok(self.density_prepared(&self.prepare(state)?, a_m))
    }

    pub fn condition(&self, state: &FockState<T>, a_m: T) -> Result<MeasurementOutcome<T>> {
        let prepared = self.prepare(state)?;
        let density = self.density_prepared(&prepared, a_m);
        if density <= T::DENSITY_FLOOR {
            return Err(vanishing(a_m, density));
        }
        let conditioned = FockState::from_amplitudes(self.filter_prepared(&prepared, a_m))?;
        Ok(MeasurementOutcome { a_m, density, conditioned })
    }

    /// `⟨ψ|P̂ T̂ P̂|ψ⟩ / ⟨ψ|P̂²|ψ⟩`.
    pub fn post_expectation(&self, state: &FockState<T>, a_m: T, target: &FockOperator<T>) -> Result<Cplx<T>> {
        let prepared = self.prepare(state)?;
        let (density, value) = self.weighted_prepared(&prepared, a_m, target)?;
        if density <= T::DENSITY_FLOOR {
            return Err(vanishing(a_m, density));
        }
        Ok(value / density)
    }

    /// Evaluates every grid point, in parallel, returned in grid order.
    pub fn sample(
        &self,
        state: &FockState<T>,
        grid: &OutcomeGrid<T>,
        target: Option<&FockOperator<T>>,
    ) -> Result<Vec<GridSample<T>>> {
        let prepared = self.prepare(state)?;
        if let Some(t) = target {
            if t.dim() != self.dim() {
                return Err(QndError::DimensionMismatch { expected: self.dim(), found: t.dim() });
            }
        }
        grid.points()
            .into_par_iter()
            .map(|a_m| match target {
                None => Ok(GridSample { a_m, density: self.density_prepared(&prepared, a_m), weighted: None }),
                Some(t) => {
                    let (density, value) = self.weighted_prepared(&prepared, a_m, t)?;
                    Ok(GridSample { a_m, density, weighted: Some(value) })
                }
            })
            .collect()
    }

    /// Rejects grids that miss `[λ_min − 6δ, λ_max + 6δ]` or step beyond `δ/5`.
    pub fn check_coverage(&self, grid: &OutcomeGrid<T>) -> Result<()> {
        let d = self.delta.value();
        let (lo, hi) = self.spectrum_bounds();
        let six = T::lit(6.0);
        let last = grid.point(grid.len() - 1);
        let slack = T::lit(1e-9) * (T::one() + lo.abs().max(hi.abs()));
        if grid.lo() > lo - six * d + slack || last < hi + six * d - slack {
            return Err(QndError::GridCoverage(format!(
                "outcome grid [{}, {}] does not cover spectrum [{lo}, {hi}] with a 6δ = {} margin",
                grid.lo(),
                last,
                six * d
            )));
        }
        if grid.step() > d / T::lit(5.0) * (T::one() + T::lit(1e-12)) {
            return Err(QndError::GridCoverage(format!(
                "outcome grid step {} exceeds δ/5 = {}",
                grid.step(),
                d / T::lit(5.0)
            )));
        }
        Ok(())
    }

    /// `‖Σ P̂²(a) Δa − I‖₂` with the trapezoid rule on `grid`.
    ///
    /// The integrated operator is `V·diag(s)·V†` with `s_k` the integral of the
    /// squared kernel at eigenvalue `λ_k`, so the spectral-norm deviation is
    /// `max_k |s_k − 1|` to within the eigenbasis orthonormality error.
    pub fn completeness_deviation(&self, grid: &OutcomeGrid<T>) -> Result<T> {
        self.check_coverage(grid)?;
        let points = grid.points();
        let deviation = self
            .eigen
            .values()
            .par_iter()
            .map(|&lambda| {
                let sq: Vec<T> = points
                    .iter()
                    .map(|&a| {
                        let g = self.kernel_at(lambda, a);
                        g * g
                    })
                    .collect();
                (grid.trapezoid(&sq) - T::one()).abs()
            })
            .reduce(T::zero, T::max);
        Ok(deviation)
    }

    /// Grid `[λ_min − mδ, λ_max + mδ]` with `m = max(8, policy margin)` and
    /// step `δ/10` (tightened under a tolerance policy).
    pub fn spectrum_grid(&self, policy: &GridPolicy) -> Result<OutcomeGrid<T>> {
        let d = self.delta.value().to_f64().unwrap_or(f64::NAN);
        let (lo, hi) = self.spectrum_bounds();
        let (lo, hi) = (lo.to_f64().unwrap_or(0.0), hi.to_f64().unwrap_or(0.0));
        let margin = policy.margin_sigmas().max(8.0) * d;
        let step = policy.step(d, 0.0, d / 10.0);
        OutcomeGrid::new(T::lit(lo - margin), T::lit(hi + margin), T::lit(step))
    }
}

pub(crate) fn vanishing<T: Real>(a_m: T, density: T) -> QndError {
    QndError::VanishingDensity { a_m: a_m.to_f64().unwrap_or(f64::NAN), density: density.to_f64().unwrap_or(f64::NAN) }
}
