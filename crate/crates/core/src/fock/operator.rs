use std::ops::{Add, Mul, Sub};

use crate::error::{QndError, Result};
use crate::fock::eigen::{self, EigenDecomposition};
use crate::fock::state::{check_dim, FockState};
use crate::scalar::{creal, czero, Cplx, Real};
use ndarray::{Array1, Array2, ArrayView1};

/// Dense operator on a truncated single-mode number basis.
///
/// The `hermitian` flag is set by the constructors of observables and by
/// [`FockOperator::into_hermitian`]; spectral routines only accept flagged
/// operators.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator<T: Real> {
    entries: Array2<Cplx<T>>,
    hermitian: bool,
}

impl<T: Real> FockOperator<T> {
    /// Wraps a square matrix; flagged matrices are checked entrywise against
    /// their adjoint.
    pub fn from_matrix(entries: Array2<Cplx<T>>, hermitian: bool) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(QndError::DimensionMismatch { expected: rows, found: cols });
        }
        check_dim(rows)?;
        let op = Self { entries, hermitian: false };
        if hermitian {
            op.into_hermitian()
        } else {
            Ok(op)
        }
    }

    pub(crate) fn from_parts(entries: Array2<Cplx<T>>, hermitian: bool) -> Self {
        Self { entries, hermitian }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::from_parts(Array2::from_diag_elem(dim, creal(T::one())), true))
    }

    /// Photon number `n̂ = diag(0, 1, …, N−1)`.
    pub fn number(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let diag = Array1::from_iter((0..dim).map(|n| creal(T::of_usize(n))));
        Ok(Self::from_parts(Array2::from_diag(&diag), true))
    }

    /// Annihilation operator with `⟨n−1|â|n⟩ = √n`.
    pub fn annihilation(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut m = Array2::from_elem((dim, dim), czero());
        for n in 1..dim {
            m[[n - 1, n]] = creal(T::of_usize(n).sqrt());
        }
        Ok(Self::from_parts(m, false))
    }

    pub fn creation(dim: usize) -> Result<Self> {
        Ok(Self::annihilation(dim)?.adjoint())
    }

    /// In-phase quadrature `x̂ = (â + â†)/2`; vacuum variance 1/4.
    pub fn quadrature_x(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let half = T::lit(0.5);
        let mut m = Array2::from_elem((dim, dim), czero());
        for n in 1..dim {
            let v = creal(half * T::of_usize(n).sqrt());
            m[[n - 1, n]] = v;
            m[[n, n - 1]] = v;
        }
        Ok(Self::from_parts(m, true))
    }

    /// Out-of-phase quadrature `ŷ = (â − â†)/(2i)`.
    pub fn quadrature_y(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let half = T::lit(0.5);
        let mut m = Array2::from_elem((dim, dim), czero());
        for n in 1..dim {
            let v = half * T::of_usize(n).sqrt();
            // (â − â†)/(2i) = −i(â − â†)/2
            m[[n - 1, n]] = Cplx::new(T::zero(), -v);
            m[[n, n - 1]] = Cplx::new(T::zero(), v);
        }
        Ok(Self::from_parts(m, true))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<Cplx<T>> {
        &self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Largest entrywise deviation `|M − M†|`.
    pub fn hermitian_deviation(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = (self.entries[[i, j]] - self.entries[[j, i]].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Validates Hermiticity (within [`Real::STRUCTURAL_TOL`], relative to the
    /// largest entry when that exceeds one) and sets the flag.
    pub fn into_hermitian(mut self) -> Result<Self> {
        let scale = self.max_abs().max(T::one());
        let dev = self.hermitian_deviation();
        if dev > T::STRUCTURAL_TOL * scale {
            return Err(QndError::NotHermitian { deviation: dev.to_f64().unwrap_or(f64::NAN) });
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.entries.t().mapv(|z| z.conj()), self.hermitian)
    }

    pub fn scale(&self, factor: Cplx<T>) -> Self {
        let keeps = self.hermitian && factor.im == T::zero();
        Self::from_parts(self.entries.mapv(|z| z * factor), keeps)
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other)?.checked_sub(&other.checked_mul(self)?)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self::from_parts(self.entries.dot(&other.entries), false))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self::from_parts(&self.entries + &other.entries, self.hermitian && other.hermitian))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self::from_parts(&self.entries - &other.entries, self.hermitian && other.hermitian))
    }

    /// `Ô|v⟩` for a raw amplitude vector.
    pub fn apply_vec(&self, v: ArrayView1<'_, Cplx<T>>) -> Result<Array1<Cplx<T>>> {
        if v.len() != self.dim() {
            return Err(QndError::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        Ok(self.entries.dot(&v))
    }

    /// `Ô|ψ⟩`, unnormalized.
    pub fn apply(&self, state: &FockState<T>) -> Result<Array1<Cplx<T>>> {
        self.apply_vec(state.amplitudes().view())
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Largest entry modulus restricted to rows and columns `< upto`.
    pub fn block_max_abs(&self, upto: usize) -> T {
        let k = upto.min(self.dim());
        let mut worst = T::zero();
        for i in 0..k {
            for j in 0..k {
                worst = worst.max(self.entries[[i, j]].norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Spectral norm; for Hermitian operators the largest eigenvalue modulus,
    /// otherwise the square root of the largest eigenvalue of `M†M`.
    pub fn spectral_norm(&self) -> Result<T> {
        if self.hermitian {
            let eig = self.eigh()?;
            Ok(eig.values().iter().fold(T::zero(), |m, v| m.max(v.abs())))
        } else {
            let gram = self.adjoint().checked_mul(self)?.into_hermitian()?;
            let eig = gram.eigh()?;
            let top = eig.values().iter().fold(T::zero(), |m, v| m.max(*v));
            Ok(top.max(T::zero()).sqrt())
        }
    }

    /// True when every entry outside the three central diagonals vanishes.
    pub fn is_tridiagonal(&self) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) > 1 && self.entries[[i, j]] != czero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn eigh(&self) -> Result<EigenDecomposition<T>> {
        eigen::eigh(self)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(QndError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

impl<T: Real> Mul for &FockOperator<T> {
    type Output = FockOperator<T>;

    /// Panics on dimension mismatch; use [`FockOperator::checked_mul`] otherwise.
    fn mul(self, rhs: Self) -> FockOperator<T> {
        self.checked_mul(rhs).expect("operator dimensions agree")
    }
}

impl<T: Real> Add for &FockOperator<T> {
    type Output = FockOperator<T>;

    fn add(self, rhs: Self) -> FockOperator<T> {
        self.checked_add(rhs).expect("operator dimensions agree")
    }
}

impl<T: Real> Sub for &FockOperator<T> {
    type Output = FockOperator<T>;

    fn sub(self, rhs: Self) -> FockOperator<T> {
        self.checked_sub(rhs).expect("operator dimensions agree")
    }
}

pub fn op_number<T: Real>(dim: usize) -> Result<FockOperator<T>> {
    FockOperator::number(dim)
}

pub fn op_annihilate<T: Real>(dim: usize) -> Result<FockOperator<T>> {
    FockOperator::annihilation(dim)
}

pub fn op_x<T: Real>(dim: usize) -> Result<FockOperator<T>> {
    FockOperator::quadrature_x(dim)
}

pub fn op_y<T: Real>(dim: usize) -> Result<FockOperator<T>> {
    FockOperator::quadrature_y(dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Op = FockOperator<f64>;

    #[test]
    fn vacuum_quadrature_variance_is_one_quarter() {
        for dim in [2, 3, 8, 64] {
            let x = Op::quadrature_x(dim).unwrap();
            let x2 = &x * &x;
            assert!((x2.entries()[[0, 0]].re - 0.25).abs() < 1e-12);
            assert!(x2.entries()[[0, 0]].im.abs() < 1e-12);
        }
    }

    #[test]
    fn x_matrix_element_between_vacuum_and_one_photon() {
        let x = Op::quadrature_x(8).unwrap();
        assert!((x.entries()[[1, 0]].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn number_identity_holds_off_the_top_row() {
        for dim in [2, 5, 16, 64] {
            let x = Op::quadrature_x(dim).unwrap();
            let y = Op::quadrature_y(dim).unwrap();
            let n = Op::number(dim).unwrap();
            let half = Op::identity(dim).unwrap().scale(creal(0.5));
            let residual = &(&(&(&x * &x) + &(&y * &y)) - &n) - &half;
            assert!(residual.block_max_abs(dim - 1) < 1e-10, "dim {dim}");
            // the last basis state carries the truncation defect
            assert!(residual.max_abs() > 0.1);
        }
    }

    #[test]
    fn canonical_commutators_on_interior() {
        for dim in [2, 7, 32, 128] {
            let a = Op::annihilation(dim).unwrap();
            let ad = Op::creation(dim).unwrap();
            let id = Op::identity(dim).unwrap();
            let c = a.commutator(&ad).unwrap();
            assert!((&c - &id).block_max_abs(dim - 1) < 1e-10);

            let x = Op::quadrature_x(dim).unwrap();
            let y = Op::quadrature_y(dim).unwrap();
            let c = x.commutator(&y).unwrap();
            let target = id.scale(Cplx::new(0.0, 0.5));
            assert!((&c - &target).block_max_abs(dim - 1) < 1e-10);
        }
    }

    #[test]
    fn quadratures_are_hermitian_and_annihilator_is_not() {
        let dim = 12;
        assert!(Op::quadrature_x(dim).unwrap().hermitian_deviation() < 1e-12);
        assert!(Op::quadrature_y(dim).unwrap().hermitian_deviation() < 1e-12);
        let a = Op::annihilation(dim).unwrap();
        assert!(!a.is_hermitian());
        assert!(a.clone().into_hermitian().is_err());
        let via_parts = &Op::quadrature_x(dim).unwrap() + &Op::quadrature_y(dim).unwrap().scale(Cplx::new(0.0, 1.0));
        assert!((&via_parts - &a).max_abs() < 1e-12);
    }

    #[test]
    fn rejects_tiny_dimensions() {
        assert_eq!(Op::number(1).unwrap_err(), QndError::InvalidDimension { dim: 1, min: 2 });
        assert!(Op::quadrature_x(0).is_err());
    }

    #[test]
    fn mismatched_products_are_errors() {
        let a = Op::number(4).unwrap();
        let b = Op::number(5).unwrap();
        assert!(matches!(a.checked_mul(&b), Err(QndError::DimensionMismatch { .. })));
    }

    #[test]
    fn single_precision_constructors() {
        let x = FockOperator::<f32>::quadrature_x(16).unwrap();
        let x2 = &x * &x;
        assert!((x2.entries()[[0, 0]].re - 0.25).abs() < 1e-6);
    }
}
