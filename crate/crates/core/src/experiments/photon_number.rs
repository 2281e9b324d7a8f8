use rayon::prelude::*;

use crate::error::{QndError, Result};
use crate::experiments::{check_mass, dephasing_factor, quantization, CorrelationReport, CurveSample, NUMBER_MASS_TOL};
use crate::fock::{FockOperator, FockState};
use crate::poisson;
use crate::povm::{number_grid, GaussianMeasurement, GridPolicy, OutcomeGrid, Resolution};
use crate::scalar::{czero, Cplx, Real};

/// Poisson mass the closed-form sums may leave beyond the truncation.
pub const SUM_TAIL_TOL: f64 = 1e-12;
/// Summands below this fraction of the largest are dropped from the
/// closed-form sums.
pub const POISSON_RELATIVE_CUTOFF: f64 = 1e-16;

/// Photon-number measurement of resolution `δn` on a coherent state `|α⟩`.
#[derive(Debug, Clone)]
pub struct PhotonNumberQnd<T: Real> {
    alpha: Cplx<T>,
    delta_n: Resolution<T>,
    grid: OutcomeGrid<T>,
    dim: usize,
    weights: Vec<(usize, T)>,
}

/// Largest pointwise disagreement between closed form and matrix path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualPathDeviation<T: Real> {
    pub density: T,
    pub post_value: T,
}

impl<T: Real> PhotonNumberQnd<T> {
    /// Setup on the default photon-number grid for `policy`.
    pub fn new(alpha: Cplx<T>, delta_n: Resolution<T>, dim: usize, policy: &GridPolicy) -> Result<Self> {
        let state = FockState::coherent(alpha, dim)?;
        let grid = number_grid(&state, delta_n, policy)?;
        Self::with_grid(alpha, delta_n, dim, grid)
    }

    pub fn with_grid(alpha: Cplx<T>, delta_n: Resolution<T>, dim: usize, grid: OutcomeGrid<T>) -> Result<Self> {
        if dim < 2 {
            return Err(QndError::InvalidDimension { dim, min: 2 });
        }
        let r = alpha.norm().to_f64().unwrap_or(f64::NAN);
        if !r.is_finite() {
            return Err(QndError::InvalidParameter(format!("coherent amplitude {alpha} is not finite")));
        }
        let lambda = r * r;
        let tail = poisson::upper_tail(lambda, dim);
        if tail >= SUM_TAIL_TOL {
            let required = poisson::required_dim(lambda, SUM_TAIL_TOL).max(2);
            return Err(QndError::TruncationTooSmall { dim, required, tail });
        }
        // the floor is applied per summand: far from the mode the Gaussian
        // factor favours weights that are negligible on their own
        let weights = poisson::pmf_table(lambda)
            .iter()
            .enumerate()
            .take(dim)
            .filter(|(_, p)| **p > 0.0)
            .map(|(n, p)| (n, T::lit(*p)))
            .collect();
        Ok(Self { alpha, delta_n, grid, dim, weights })
    }

    pub fn alpha(&self) -> Cplx<T> {
        self.alpha
    }

    pub fn delta_n(&self) -> Resolution<T> {
        self.delta_n
    }

    pub fn grid(&self) -> &OutcomeGrid<T> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Same setup on a different outcome grid.
    pub fn regridded(&self, grid: OutcomeGrid<T>) -> Self {
        Self { grid, ..self.clone() }
    }

    /// `Σ_n p_n exp(−(n + shift − n_m)²/(2δn²))`, without summands below
    /// [`POISSON_RELATIVE_CUTOFF`] of the largest.
    fn gaussian_sum(&self, n_m: T, shift: T) -> T {
        let d = self.delta_n.value();
        let scale = T::lit(2.0) * d * d;
        let terms: Vec<T> = self
            .weights
            .iter()
            .map(|(n, p)| {
                let u = T::of_usize(*n) + shift - n_m;
                *p * (-(u * u) / scale).exp()
            })
            .collect();
        let floor = T::lit(POISSON_RELATIVE_CUTOFF) * terms.iter().copied().fold(T::zero(), T::max);
        terms.into_iter().filter(|t| *t >= floor).sum()
    }

    fn gaussian_norm(&self) -> T {
        let d = self.delta_n.value();
        (T::TAU() * d * d).sqrt()
    }

    /// Closed-form outcome density `P(n_m)`.
    pub fn outcome_density(&self, n_m: T) -> T {
        self.gaussian_sum(n_m, T::zero()) / self.gaussian_norm()
    }

    /// Closed-form coherent amplitude `⟨â⟩_f(n_m)` after the measurement.
    pub fn post_coherence(&self, n_m: T) -> Result<Cplx<T>> {
        let den = self.gaussian_sum(n_m, T::zero());
        if den / self.gaussian_norm() <= T::DENSITY_FLOOR {
            return Err(crate::povm::vanishing(n_m, den / self.gaussian_norm()));
        }
        let num = self.gaussian_sum(n_m, T::lit(0.5));
        Ok(self.alpha * (dephasing_factor(self.delta_n) * num / den))
    }

    /// `−2·exp(−2π²δn²)·exp(−1/(8δn²))·α`.
    pub fn closed_correlation(&self) -> Cplx<T> {
        let d = self.delta_n.value();
        let two_pi_sq = T::lit(2.0) * T::PI() * T::PI();
        self.alpha * (-T::lit(2.0) * (-(two_pi_sq * d * d)).exp() * dephasing_factor(self.delta_n))
    }

    /// Closed-form curve over the grid: density and `⟨â⟩_f`.
    pub fn curve(&self) -> Result<Vec<CurveSample<T>>> {
        self.grid
            .points()
            .into_par_iter()
            .map(|a_m| {
                Ok(CurveSample { a_m, density: self.outcome_density(a_m), post_value: self.post_coherence(a_m)? })
            })
            .collect()
    }

    /// Coherent state, number operator measurement and annihilator at `dim`.
    pub fn matrix_setup(&self) -> Result<(FockState<T>, GaussianMeasurement<T>, FockOperator<T>)> {
        let state = FockState::coherent(self.alpha, self.dim)?;
        let n = FockOperator::number(self.dim)?;
        let measurement = GaussianMeasurement::new(&n, self.delta_n)?;
        Ok((state, measurement, FockOperator::annihilation(self.dim)?))
    }

    /// Matrix-path curve over the grid from the measurement operator.
    pub fn matrix_curve(&self) -> Result<Vec<CurveSample<T>>> {
        let (state, measurement, a) = self.matrix_setup()?;
        measurement
            .sample(&state, &self.grid, Some(&a))?
            .into_iter()
            .map(|s| {
                let post = s.post_value().ok_or_else(|| crate::povm::vanishing(s.a_m, s.density))?;
                Ok(CurveSample { a_m: s.a_m, density: s.density, post_value: post })
            })
            .collect()
    }

    /// Pointwise comparison of [`Self::curve`] and [`Self::matrix_curve`].
    pub fn dual_path_deviation(&self) -> Result<DualPathDeviation<T>> {
        let closed = self.curve()?;
        let matrix = self.matrix_curve()?;
        let mut dev = DualPathDeviation { density: T::zero(), post_value: T::zero() };
        for (c, m) in closed.iter().zip(matrix.iter()) {
            dev.density = dev.density.max((c.density - m.density).abs());
            dev.post_value = dev.post_value.max((c.post_value - m.post_value).norm());
        }
        Ok(dev)
    }

    /// Covariance of quantization `cos 2πn_m` and coherence `⟨â⟩_f` over
    /// outcomes, integrated on the grid from the matrix path.
    ///
    /// Uses `P(n_m)·⟨â⟩_f(n_m) = ⟨α|P̂ â P̂|α⟩`, so no pointwise division is
    /// needed. Fails when the grid holds less than `1 − 1e-9` of the density.
    pub fn quantization_coherence_correlation(&self) -> Result<CorrelationReport<T>> {
        let (state, measurement, a) = self.matrix_setup()?;
        let samples = measurement.sample(&state, &self.grid, Some(&a))?;
        let q: Vec<T> = samples.iter().map(|s| quantization(s.a_m)).collect();
        let dens: Vec<T> = samples.iter().map(|s| s.density).collect();
        let mass = self.grid.trapezoid(&dens);
        check_mass(mass, NUMBER_MASS_TOL, &self.grid)?;
        let weighted: Vec<Cplx<T>> = samples.iter().map(|s| s.weighted.unwrap_or_else(czero)).collect();
        let integrate_c = |vals: Vec<Cplx<T>>| {
            let re: Vec<T> = vals.iter().map(|z| z.re).collect();
            let im: Vec<T> = vals.iter().map(|z| z.im).collect();
            Cplx::new(self.grid.trapezoid(&re), self.grid.trapezoid(&im))
        };
        let mean_q = self.grid.trapezoid(&dens.iter().zip(&q).map(|(p, q)| *p * *q).collect::<Vec<_>>());
        let mean_a = integrate_c(weighted.clone());
        let mean_qa = integrate_c(weighted.iter().zip(&q).map(|(w, q)| *w * *q).collect());
        let numeric = mean_qa - mean_a * mean_q;
        Ok(CorrelationReport::new(self.closed_correlation(), numeric, self.grid, self.dim, mass))
    }
}

/// Closed-form `P(n_m)`.
pub fn pn_outcome_density<T: Real>(params: &PhotonNumberQnd<T>, n_m: T) -> T {
    params.outcome_density(n_m)
}

/// Closed-form `⟨â⟩_f(n_m)`.
pub fn pn_post_coherence<T: Real>(params: &PhotonNumberQnd<T>, n_m: T) -> Result<Cplx<T>> {
    params.post_coherence(n_m)
}
