use serde::Serialize;

use crate::error::{QndError, Result};
use crate::scalar::Real;

/// Measurement resolution `δA > 0`, in units of the measured observable.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Resolution<T: Real>(T);

impl<T: Real> Resolution<T> {
    pub fn new(value: T) -> Result<Self> {
        if value > T::zero() && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(QndError::InvalidResolution(value.to_f64().unwrap_or(f64::NAN)))
        }
    }

    pub fn value(self) -> T {
        self.0
    }
}

/// Uniform discretization `lo, lo + step, …` of the continuous outcome axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutcomeGrid<T: Real> {
    lo: T,
    hi: T,
    step: T,
}

impl<T: Real> OutcomeGrid<T> {
    pub fn new(lo: T, hi: T, step: T) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
            return Err(QndError::InvalidGrid("bounds and step must be finite".into()));
        }
        if lo >= hi {
            return Err(QndError::InvalidGrid(format!("lo {lo} must be below hi {hi}")));
        }
        if step <= T::zero() {
            return Err(QndError::InvalidGrid(format!("step {step} must be positive")));
        }
        let grid = Self { lo, hi, step };
        if grid.len() < 3 {
            return Err(QndError::InvalidGrid(format!("grid [{lo}, {hi}] with step {step} has fewer than 3 points")));
        }
        Ok(grid)
    }

    /// Symmetric grid `[−half_width, half_width]`.
    pub fn symmetric(half_width: T, step: T) -> Result<Self> {
        Self::new(-half_width, half_width, step)
    }

    pub fn lo(&self) -> T {
        self.lo
    }

    pub fn hi(&self) -> T {
        self.hi
    }

    pub fn step(&self) -> T {
        self.step
    }

    /// `⌊(hi − lo)/step⌋ + 1`, with a relative slack of `1e-9` so a step that
    /// divides the span exactly keeps its last point.
    pub fn len(&self) -> usize {
        let ratio = ((self.hi - self.lo) / self.step).to_f64().unwrap_or(0.0);
        (ratio + 1e-9 * ratio.max(1.0)).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, k: usize) -> T {
        self.lo + T::of_usize(k) * self.step
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Same bounds, half the step.
    pub fn refined(&self) -> Self {
        Self { step: self.step / T::lit(2.0), ..*self }
    }

    /// Trapezoid rule over samples taken at [`OutcomeGrid::points`].
    pub fn trapezoid(&self, values: &[T]) -> T {
        trapezoid(values, self.step)
    }
}

/// Trapezoid rule for uniformly spaced samples.
pub fn trapezoid<T: Real>(values: &[T], step: T) -> T {
    match values {
        [] | [_] => T::zero(),
        [first, .., last] => {
            let inner: T = values.iter().copied().sum();
            step * (inner - (*first + *last) / T::lit(2.0))
        }
    }
}

/// How default outcome grids are sized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub enum GridPolicy {
    /// Fixed multiples of the resolution: ±6 standard deviations of margin,
    /// `min(δn/10, 0.05)` steps for photon number and `δx/20` for quadratures.
    #[default]
    Standard,
    /// Margins and steps sized so the Gaussian tail beyond the grid and the
    /// trapezoid aliasing error each stay below the given tolerance.
    Tolerance(f64),
}

impl GridPolicy {
    pub fn tolerance(tol: f64) -> Result<Self> {
        if tol > 0.0 && tol < 1.0 {
            Ok(Self::Tolerance(tol))
        } else {
            Err(QndError::InvalidParameter(format!("tolerance {tol} must lie in (0, 1)")))
        }
    }

    /// Margin in standard deviations of the widest Gaussian on the grid.
    pub fn margin_sigmas(&self) -> f64 {
        match *self {
            Self::Standard => 6.0,
            // Gaussian tail e^{-k²/2} below tol, plus headroom for polynomial weights
            Self::Tolerance(tol) => (2.0 * (1.0 / tol).ln()).sqrt() + 2.0,
        }
    }

    /// Step for integrands built from Gaussians of standard deviation `sigma`
    /// modulated at angular frequency `omega`; `standard` is the fixed-rule step.
    pub fn step(&self, sigma: f64, omega: f64, standard: f64) -> f64 {
        match *self {
            Self::Standard => standard,
            // trapezoid aliasing of a Gaussian: 2·exp(−σ²(2π/h − ω)²/2)
            Self::Tolerance(tol) => {
                let reach = (2.0 * (2.0 / tol).ln()).sqrt() / sigma;
                (std::f64::consts::TAU / (omega + reach)).min(standard)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_must_be_positive() {
        assert!(Resolution::new(0.3).is_ok());
        assert_eq!(Resolution::new(0.0).unwrap_err(), QndError::InvalidResolution(0.0));
        assert!(Resolution::new(-1.0).is_err());
        assert!(Resolution::new(f64::NAN).is_err());
    }

    #[test]
    fn grid_point_count() {
        let g = OutcomeGrid::<f64>::new(-3.0, 18.0, 0.03).unwrap();
        assert_eq!(g.len(), 701);
        assert!((g.point(700) - 18.0).abs() < 1e-12);
        let g = OutcomeGrid::new(0.0, 1.0, 0.3).unwrap();
        assert_eq!(g.len(), 4);
        assert!(OutcomeGrid::new(0.0, 1.0, 0.6).is_err());
        assert!(OutcomeGrid::new(1.0, 0.0, 0.1).is_err());
        assert!(OutcomeGrid::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn trapezoid_integrates_gaussian() {
        let g = OutcomeGrid::<f64>::symmetric(10.0, 0.1).unwrap();
        let vals: Vec<f64> =
            g.points().iter().map(|x: &f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()).collect();
        assert!((g.trapezoid(&vals) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tolerance_policy_tightens_with_tolerance() {
        let loose = GridPolicy::tolerance(1e-6).unwrap();
        let tight = GridPolicy::tolerance(1e-14).unwrap();
        assert!(tight.margin_sigmas() > loose.margin_sigmas());
        assert!(tight.step(0.3, 0.0, 1.0) < loose.step(0.3, 0.0, 1.0));
        assert!(GridPolicy::tolerance(0.0).is_err());
        assert_eq!(GridPolicy::Standard.step(0.3, 0.0, 0.03), 0.03);
    }
}
