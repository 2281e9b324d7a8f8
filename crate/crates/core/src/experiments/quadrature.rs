use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QndError, Result};
use crate::experiments::{check_mass, CorrelationReport, CurveSample, QUADRATURE_MASS_TOL};
use crate::fock::{FockOperator, FockState};
use crate::povm::{vacuum_quadrature_grid, GaussianMeasurement, GridPolicy, OutcomeGrid, Resolution};
use crate::scalar::{creal, czero, Cplx, Real};

use super::photon_number::DualPathDeviation;

/// Smallest truncation at which quadrature correlations are evaluated.
pub const MIN_QUADRATURE_DIM: usize = 128;

/// Quadrature measurement of resolution `δx` on the vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureQnd<T: Real> {
    delta_x: Resolution<T>,
    grid: OutcomeGrid<T>,
    dim: usize,
}

/// Total probability of a vacuum-to-one-photon jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpProbability<T: Real> {
    /// Trapezoid integral of the matrix-path `|⟨1|P̂(x_m)|0⟩|²`.
    pub numeric: T,
    /// `√2·δx/(1 + 8δx²)^{3/2}`.
    pub closed_form: T,
    /// Large-resolution asymptote `1/(16δx²)`.
    pub asymptote: T,
}

impl<T: Real> JumpProbability<T> {
    /// `closed_form · 16δx²`, which tends to 1 as `δx` grows.
    pub fn asymptote_ratio(&self) -> T {
        self.closed_form / self.asymptote
    }
}

/// Correlation of squared quadrature outcome and post-measurement photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldJumpReport<T: Real> {
    /// Covariance form; closed form `1/8`.
    pub correlation: CorrelationReport<T>,
    /// `∫ P·x_m²·⟨n̂⟩_f` without the mean-product subtraction.
    pub unsubtracted: T,
    /// `∫ P·x_m²`.
    pub mean_square_outcome: T,
    /// `∫ P·⟨n̂⟩_f`, the average photon number the measurement adds.
    pub mean_photon_number: T,
    /// `1/(16δx²)`.
    pub mean_photon_number_closed: T,
}

/// Quadrature noise before and after the measurement, averaged over outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BackAction<T: Real> {
    /// Variance of the outcome density, `∫ P·x_m²`.
    pub outcome_variance: T,
    /// `1/4 + δx²`.
    pub outcome_variance_closed: T,
    /// `⟨ŷ²⟩` averaged over outcomes.
    pub y_variance_after: T,
    /// `1/4 + 1/(16δx²)`.
    pub y_variance_after_closed: T,
    /// `⟨x̂²⟩` averaged over outcomes; the measured quadrature keeps `1/4`.
    pub x_variance_after: T,
}

/// Jump probability, field–jump covariance and back-action on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VacuumStatistics<T: Real> {
    pub jump: JumpProbability<T>,
    pub field_jump: FieldJumpReport<T>,
    pub back_action: BackAction<T>,
}

/// Matrix-path quantities at one quadrature outcome, all unnormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
struct VacuumSample<T: Real> {
    x_m: T,
    density: T,
    jump: T,
    photons: T,
    x_square: T,
    y_square: T,
}

impl<T: Real> QuadratureQnd<T> {
    /// Setup on the default vacuum quadrature grid for `policy`.
    pub fn new(delta_x: Resolution<T>, dim: usize, policy: &GridPolicy) -> Result<Self> {
        Self::with_grid(delta_x, dim, vacuum_quadrature_grid(delta_x, policy)?)
    }

    pub fn with_grid(delta_x: Resolution<T>, dim: usize, grid: OutcomeGrid<T>) -> Result<Self> {
        if dim < 2 {
            return Err(QndError::InvalidDimension { dim, min: 2 });
        }
        Ok(Self { delta_x, grid, dim })
    }

    pub fn delta_x(&self) -> Resolution<T> {
        self.delta_x
    }

    pub fn grid(&self) -> &OutcomeGrid<T> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn regridded(&self, grid: OutcomeGrid<T>) -> Self {
        Self { grid, ..*self }
    }

    fn d2(&self) -> T {
        let d = self.delta_x.value();
        d * d
    }

    /// Closed-form `P(x_m)`, a Gaussian of variance `1/4 + δx²`.
    pub fn outcome_density(&self, x_m: T) -> T {
        let w = T::one() + T::lit(4.0) * self.d2();
        (T::lit(2.0) / (T::PI() * w)).sqrt() * (-(T::lit(2.0) * x_m * x_m) / w).exp()
    }

    /// Closed-form joint density `P₁(x_m)` of outcome `x_m` and one photon.
    pub fn jump_density(&self, x_m: T) -> T {
        let d2 = self.d2();
        let w = T::one() + T::lit(8.0) * d2;
        let norm = (T::TAU() * d2).sqrt().recip();
        norm * T::lit(32.0) * d2 / (w * w * w) * x_m * x_m * (-(T::lit(4.0) * x_m * x_m) / w).exp()
    }

    /// Outcomes `±√(1 + 8δx²)/2` at which `P₁` peaks.
    pub fn jump_peak(&self) -> T {
        (T::one() + T::lit(8.0) * self.d2()).sqrt() / T::lit(2.0)
    }

    /// `√2·δx/(1 + 8δx²)^{3/2}`.
    pub fn jump_total_closed(&self) -> T {
        let w = T::one() + T::lit(8.0) * self.d2();
        T::SQRT_2() * self.delta_x.value() / (w * w.sqrt())
    }

    /// Closed-form curve: density and `P₁` (as the real part of the post value).
    pub fn curve(&self) -> Vec<CurveSample<T>> {
        self.grid
            .points()
            .into_par_iter()
            .map(|x| CurveSample { a_m: x, density: self.outcome_density(x), post_value: creal(self.jump_density(x)) })
            .collect()
    }

    fn vacuum_samples(&self) -> Result<Vec<VacuumSample<T>>> {
        let vac = FockState::vacuum(self.dim)?;
        let x = FockOperator::quadrature_x(self.dim)?;
        let measurement = GaussianMeasurement::new(&x, self.delta_x)?;
        let prepared = measurement.prepare(&vac)?;
        let roots: Vec<T> = (0..self.dim).map(|n| T::of_usize(n).sqrt()).collect();
        Ok(self
            .grid
            .points()
            .into_par_iter()
            .map(|x_m| {
                let phi = measurement.filter_prepared(&prepared, x_m);
                let density = phi.iter().map(|z| z.norm_sqr()).sum::<T>();
                let photons = phi.iter().enumerate().map(|(n, z)| T::of_usize(n) * z.norm_sqr()).sum::<T>();
                let (x_square, y_square) = quadrature_norms(&phi.to_vec(), &roots);
                VacuumSample { x_m, density, jump: phi[1].norm_sqr(), photons, x_square, y_square }
            })
            .collect())
    }

    /// Matrix-path curve: density and `|⟨1|P̂(x_m)|0⟩|²`.
    pub fn matrix_curve(&self) -> Result<Vec<CurveSample<T>>> {
        Ok(self
            .vacuum_samples()?
            .into_iter()
            .map(|s| CurveSample { a_m: s.x_m, density: s.density, post_value: creal(s.jump) })
            .collect())
    }

    /// Matrix-path `⟨n̂⟩_f(x_m)` over the grid; the sample density is `P(x_m)`.
    pub fn photon_number_curve(&self) -> Result<Vec<CurveSample<T>>> {
        self.vacuum_samples()?
            .into_iter()
            .map(|s| {
                if s.density <= T::DENSITY_FLOOR {
                    return Err(crate::povm::vanishing(s.x_m, s.density));
                }
                Ok(CurveSample { a_m: s.x_m, density: s.density, post_value: creal(s.photons / s.density) })
            })
            .collect()
    }

    pub fn dual_path_deviation(&self) -> Result<DualPathDeviation<T>> {
        let closed = self.curve();
        let matrix = self.matrix_curve()?;
        let mut dev = DualPathDeviation { density: T::zero(), post_value: T::zero() };
        for (c, m) in closed.iter().zip(matrix.iter()) {
            dev.density = dev.density.max((c.density - m.density).abs());
            dev.post_value = dev.post_value.max((c.post_value - m.post_value).norm());
        }
        Ok(dev)
    }

    fn integrate<F: Fn(&VacuumSample<T>) -> T>(&self, samples: &[VacuumSample<T>], f: F) -> T {
        let vals: Vec<T> = samples.iter().map(f).collect();
        self.grid.trapezoid(&vals)
    }

    fn checked_samples(&self) -> Result<(Vec<VacuumSample<T>>, T)> {
        let samples = self.vacuum_samples()?;
        let mass = self.integrate(&samples, |s| s.density);
        check_mass(mass, QUADRATURE_MASS_TOL, &self.grid)?;
        Ok((samples, mass))
    }

    /// Jump probability integrated on the grid, with its closed form and asymptote.
    pub fn jump_total_probability(&self) -> Result<JumpProbability<T>> {
        let (samples, _) = self.checked_samples()?;
        Ok(self.jump_from(&samples))
    }

    /// Covariance of `x_m²` and `⟨n̂⟩_f` over outcomes, from the matrix path.
    ///
    /// `P·⟨n̂⟩_f = ⟨0|P̂ n̂ P̂|0⟩` is integrated directly. Requires
    /// `dim ≥ 128` and a grid holding `1 − 1e-8` of the density.
    pub fn field_jump_correlation(&self) -> Result<FieldJumpReport<T>> {
        self.check_field_dim()?;
        let (samples, mass) = self.checked_samples()?;
        Ok(self.field_from(&samples, mass))
    }

    /// Outcome variance and post-measurement quadrature noise.
    pub fn back_action(&self) -> Result<BackAction<T>> {
        let (samples, _) = self.checked_samples()?;
        Ok(self.back_from(&samples))
    }

    /// All three outcome integrals from a single pass over the grid.
    pub fn statistics(&self) -> Result<VacuumStatistics<T>> {
        self.check_field_dim()?;
        let (samples, mass) = self.checked_samples()?;
        Ok(VacuumStatistics {
            jump: self.jump_from(&samples),
            field_jump: self.field_from(&samples, mass),
            back_action: self.back_from(&samples),
        })
    }

    fn check_field_dim(&self) -> Result<()> {
        if self.dim < MIN_QUADRATURE_DIM {
            return Err(QndError::InvalidDimension { dim: self.dim, min: MIN_QUADRATURE_DIM });
        }
        Ok(())
    }

    fn jump_from(&self, samples: &[VacuumSample<T>]) -> JumpProbability<T> {
        JumpProbability {
            numeric: self.integrate(samples, |s| s.jump),
            closed_form: self.jump_total_closed(),
            asymptote: (T::lit(16.0) * self.d2()).recip(),
        }
    }

    fn field_from(&self, samples: &[VacuumSample<T>], mass: T) -> FieldJumpReport<T> {
        let joint = self.integrate(samples, |s| s.x_m * s.x_m * s.photons);
        let x2 = self.integrate(samples, |s| s.x_m * s.x_m * s.density);
        let photons = self.integrate(samples, |s| s.photons);
        let covariance = joint - x2 * photons;
        FieldJumpReport {
            correlation: CorrelationReport::new(creal(T::lit(0.125)), creal(covariance), self.grid, self.dim, mass),
            unsubtracted: joint,
            mean_square_outcome: x2,
            mean_photon_number: photons,
            mean_photon_number_closed: (T::lit(16.0) * self.d2()).recip(),
        }
    }

    fn back_from(&self, samples: &[VacuumSample<T>]) -> BackAction<T> {
        let quarter = T::lit(0.25);
        BackAction {
            outcome_variance: self.integrate(samples, |s| s.x_m * s.x_m * s.density),
            outcome_variance_closed: quarter + self.d2(),
            y_variance_after: self.integrate(samples, |s| s.y_square),
            y_variance_after_closed: quarter + (T::lit(16.0) * self.d2()).recip(),
            x_variance_after: self.integrate(samples, |s| s.x_square),
        }
    }
}

/// `(‖x̂φ‖², ‖ŷφ‖²)` on the truncated basis; `roots[n] = √n`.
///
/// Both quadratures are tridiagonal:
/// `2(x̂φ)_n = √n φ_{n−1} + √(n+1) φ_{n+1}` and
/// `2i(ŷφ)_n = √(n+1) φ_{n+1} − √n φ_{n−1}`.
fn quadrature_norms<T: Real>(phi: &[Cplx<T>], roots: &[T]) -> (T, T) {
    let dim = phi.len();
    let (mut xs, mut ys) = (T::zero(), T::zero());
    for n in 0..dim {
        let down = if n > 0 { phi[n - 1] * roots[n] } else { czero() };
        let up = if n + 1 < dim { phi[n + 1] * roots[n + 1] } else { czero() };
        xs = xs + (down + up).norm_sqr();
        ys = ys + (up - down).norm_sqr();
    }
    let quarter = T::lit(0.25);
    (quarter * xs, quarter * ys)
}

/// `(1/4)⟨0|x̂²n̂ + 2x̂n̂x̂ + n̂x̂²|0⟩ − ⟨0|x̂²|0⟩⟨0|n̂|0⟩` from truncated matrices.
pub fn operator_side_covariance<T: Real>(dim: usize) -> Result<T> {
    let x = FockOperator::<T>::quadrature_x(dim)?;
    let n = FockOperator::<T>::number(dim)?;
    let x2 = x.checked_mul(&x)?;
    let sym = x2
        .checked_mul(&n)?
        .checked_add(&x.checked_mul(&n)?.checked_mul(&x)?.scale(creal(T::lit(2.0))))?
        .checked_add(&n.checked_mul(&x2)?)?;
    let vac = FockState::vacuum(dim)?;
    let quarter = creal(T::lit(0.25));
    let value: Cplx<T> = quarter * vac.expectation(&sym)? - vac.expectation(&x2)? * vac.expectation(&n)?;
    debug_assert!(value.im.abs() <= T::STRUCTURAL_TOL || value == czero());
    Ok(value.re)
}

/// Closed-form `P(x_m)` for the vacuum.
pub fn vac_outcome_density<T: Real>(params: &QuadratureQnd<T>, x_m: T) -> T {
    params.outcome_density(x_m)
}

/// Closed-form `P₁(x_m)`.
pub fn jump_joint_density<T: Real>(params: &QuadratureQnd<T>, x_m: T) -> T {
    params.jump_density(x_m)
}
