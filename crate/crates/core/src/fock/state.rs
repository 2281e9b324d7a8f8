use ndarray::Array1;

use crate::error::{QndError, Result};
use crate::fock::operator::FockOperator;
use crate::poisson;
use crate::scalar::{creal, czero, Cplx, Real};

/// Upper-tail mass a coherent state may leave beyond the truncation.
pub const COHERENT_TAIL_TOL: f64 = 1e-10;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(QndError::InvalidDimension { dim, min: 2 });
    }
    Ok(())
}

/// Default truncation for a coherent amplitude: `max(64, ⌈|α|² + 8|α| + 20⌉)`.
pub fn default_coherent_dim<T: Real>(alpha: Cplx<T>) -> usize {
    let r = alpha.norm().to_f64().unwrap_or(0.0);
    let rule = (r * r + 8.0 * r + 20.0).ceil() as usize;
    rule.max(64)
}

/// Unit-norm pure state of one mode in the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState<T: Real> {
    amplitudes: Array1<Cplx<T>>,
}

impl<T: Real> FockState<T> {
    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::number(0, dim)
    }

    /// Number eigenstate `|n⟩`.
    pub fn number(n: usize, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if n >= dim {
            return Err(QndError::TruncationTooSmall { dim, required: n + 1, tail: 1.0 });
        }
        let mut amps = Array1::from_elem(dim, czero());
        amps[n] = creal(T::one());
        Ok(Self { amplitudes: amps })
    }

    /// Coherent state `|α⟩`, renormalized after truncation.
    ///
    /// Fails when the Poisson mass beyond `dim − 1` reaches
    /// [`COHERENT_TAIL_TOL`]; the error reports the smallest adequate `dim`.
    pub fn coherent(alpha: Cplx<T>, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let r = alpha.norm().to_f64().unwrap_or(f64::NAN);
        if !r.is_finite() {
            return Err(QndError::InvalidParameter(format!("coherent amplitude {alpha} is not finite")));
        }
        let lambda = r * r;
        let tail = poisson::upper_tail(lambda, dim);
        if tail >= COHERENT_TAIL_TOL {
            let required = poisson::required_dim(lambda, COHERENT_TAIL_TOL).max(2);
            return Err(QndError::TruncationTooSmall { dim, required, tail });
        }
        let table = poisson::pmf_table(lambda);
        let phase = alpha.arg();
        let amps = Array1::from_iter((0..dim).map(|n| {
            let m = T::lit(table.get(n).copied().unwrap_or(0.0).sqrt());
            Cplx::from_polar(m, T::of_usize(n) * phase)
        }));
        Self::from_amplitudes(amps)
    }

    /// Coherent state at the default truncation ([`default_coherent_dim`]),
    /// raised further if the tail check demands it.
    pub fn coherent_auto(alpha: Cplx<T>) -> Result<Self> {
        let dim = default_coherent_dim(alpha);
        match Self::coherent(alpha, dim) {
            Err(QndError::TruncationTooSmall { required, .. }) => Self::coherent(alpha, required),
            other => other,
        }
    }

    /// Normalizes an arbitrary nonzero amplitude vector.
    pub fn from_amplitudes(amplitudes: Array1<Cplx<T>>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() || !norm.is_finite() {
            return Err(QndError::ZeroNorm);
        }
        let inv = norm.recip();
        Ok(Self { amplitudes: amplitudes.mapv(|z| z * inv) })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<Cplx<T>> {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Cplx<T>> {
        if self.dim() != other.dim() {
            return Err(QndError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.iter().zip(other.amplitudes.iter()).fold(czero(), |acc, (a, b)| acc + a.conj() * b))
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm())
    }

    /// `⟨ψ|Ô|ψ⟩`.
    pub fn expectation(&self, op: &FockOperator<T>) -> Result<Cplx<T>> {
        let applied = op.apply(self)?;
        Ok(self.amplitudes.iter().zip(applied.iter()).fold(czero(), |acc, (a, b)| acc + a.conj() * b))
    }

    /// `⟨Ô²⟩ − ⟨Ô⟩²` for a Hermitian-flagged observable.
    pub fn variance(&self, op: &FockOperator<T>) -> Result<T> {
        if !op.is_hermitian() {
            return Err(QndError::NotHermitian { deviation: op.hermitian_deviation().to_f64().unwrap_or(f64::NAN) });
        }
        let applied = op.apply(self)?;
        let second = applied.iter().map(|z| z.norm_sqr()).sum::<T>();
        let first = self.expectation(op)?.re;
        Ok(second - first * first)
    }

    /// Photon-number probabilities `|⟨n|ψ⟩|²`.
    pub fn photon_distribution(&self) -> Vec<T> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn mean_photon_number(&self) -> T {
        self.photon_distribution().into_iter().enumerate().map(|(n, p)| T::of_usize(n) * p).sum()
    }
}

pub fn make_vacuum<T: Real>(dim: usize) -> Result<FockState<T>> {
    FockState::vacuum(dim)
}

pub fn make_coherent<T: Real>(alpha: Cplx<T>, dim: usize) -> Result<FockState<T>> {
    FockState::coherent(alpha, dim)
}

/// `⟨ψ|Ô|ψ⟩`; free-function form of [`FockState::expectation`].
pub fn expectation<T: Real>(state: &FockState<T>, op: &FockOperator<T>) -> Result<Cplx<T>> {
    state.expectation(op)
}

#[cfg(test)]
mod tests {
    use super::*;

    type State = FockState<f64>;

    #[test]
    fn vacuum_has_no_photons() {
        let v = State::vacuum(8).unwrap();
        let n = FockOperator::number(8).unwrap();
        assert_eq!(v.expectation(&n).unwrap(), creal(0.0));
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert_eq!(State::vacuum(1).unwrap_err(), QndError::InvalidDimension { dim: 1, min: 2 });
    }

    #[test]
    fn zero_amplitude_coherent_state_is_vacuum() {
        let c = State::coherent(creal(0.0), 8).unwrap();
        assert_eq!(c, State::vacuum(8).unwrap());
    }

    #[test]
    fn coherent_mean_photon_number_matches_direct_sum() {
        // direct sum of n·e^{-9}·9^n/n! over n < 64
        let mut oracle = 0.0;
        let mut p = (-9.0_f64).exp();
        for n in 0..64 {
            if n > 0 {
                p *= 9.0 / n as f64;
            }
            oracle += n as f64 * p;
        }
        let c = State::coherent(creal(3.0), 64).unwrap();
        let n = FockOperator::number(64).unwrap();
        let mean = c.expectation(&n).unwrap();
        assert!((mean.re - oracle).abs() < 1e-9);
        assert!((mean.re - 9.0).abs() < 1e-9);
        assert!(mean.im.abs() < 1e-12);
    }

    #[test]
    fn coherent_is_annihilator_eigenstate() {
        let alpha = Cplx::new(3.0, 0.0);
        let c = State::coherent(alpha, 64).unwrap();
        let a = FockOperator::annihilation(64).unwrap();
        let v = c.expectation(&a).unwrap();
        assert!((v - alpha).norm() < 1e-9);

        let alpha = Cplx::new(-1.2, 2.1);
        let c = State::coherent(alpha, 64).unwrap();
        assert!((c.expectation(&a).unwrap() - alpha).norm() < 1e-9);
    }

    #[test]
    fn coherent_truncation_check_reports_required_dim() {
        let err = State::coherent(creal(3.0), 12).unwrap_err();
        match err {
            QndError::TruncationTooSmall { dim, required, tail } => {
                assert_eq!(dim, 12);
                assert!((tail - 0.197).abs() < 1e-3);
                assert!(State::coherent(creal(3.0), required).is_ok());
                assert!(State::coherent(creal(3.0), required - 1).is_err());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn coherent_auto_uses_default_truncation() {
        let c = State::coherent_auto(creal(3.0)).unwrap();
        assert_eq!(c.dim(), 64);
        let c = State::coherent_auto(Cplx::new(8.0, 0.0)).unwrap();
        assert_eq!(c.dim(), 148);
        // large amplitudes stay finite in log space
        let c = State::coherent_auto(creal(40.0)).unwrap();
        assert!((c.norm() - 1.0).abs() < 1e-12);
        assert!((c.mean_photon_number() - 1600.0).abs() < 1e-6);
    }

    #[test]
    fn vacuum_quadrature_expectation_vanishes() {
        let v = State::vacuum(16).unwrap();
        let x = FockOperator::quadrature_x(16).unwrap();
        assert_eq!(v.expectation(&x).unwrap(), creal(0.0));
        assert!((v.variance(&x).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let v = State::vacuum(4).unwrap();
        let n = FockOperator::number(5).unwrap();
        assert_eq!(v.expectation(&n).unwrap_err(), QndError::DimensionMismatch { expected: 5, found: 4 });
    }

    #[test]
    fn zero_vector_cannot_be_normalized() {
        let z = Array1::from_elem(4, creal(0.0));
        assert_eq!(State::from_amplitudes(z).unwrap_err(), QndError::ZeroNorm);
    }
}
