//! Hermitian eigendecomposition and functions of Hermitian operators.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{QndError, Result};
use crate::fock::operator::FockOperator;
use crate::fock::tridiagonal::SymTridiagonal;
use crate::scalar::{creal, czero, Cplx, Real};

const MAX_JACOBI_SWEEPS: usize = 100;

/// `Ô = V·diag(λ)·V†` with ascending real `λ` and orthonormal columns of `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition<T: Real> {
    values: Vec<T>,
    vectors: Array2<Cplx<T>>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Eigenvectors as columns.
    pub fn vectors(&self) -> &Array2<Cplx<T>> {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Coefficients `V†v` of a vector in the eigenbasis.
    pub fn to_eigenbasis(&self, v: ArrayView1<'_, Cplx<T>>) -> Array1<Cplx<T>> {
        let n = self.dim();
        Array1::from_iter(
            (0..n).map(|k| self.vectors.column(k).iter().zip(v.iter()).fold(czero(), |acc, (a, b)| acc + a.conj() * b)),
        )
    }

    /// `V·c`.
    pub fn from_eigenbasis(&self, coeffs: ArrayView1<'_, Cplx<T>>) -> Array1<Cplx<T>> {
        self.vectors.dot(&coeffs)
    }

    /// `f(Ô) = V·diag(f(λ))·V†` for a real function; the result is Hermitian.
    pub fn function<F: Fn(T) -> T>(&self, f: F) -> FockOperator<T> {
        let n = self.dim();
        let fv: Vec<T> = self.values.iter().map(|&v| f(v)).collect();
        let mut out = Array2::from_elem((n, n), czero());
        for i in 0..n {
            for j in i..n {
                let mut acc = czero();
                for (k, &w) in fv.iter().enumerate() {
                    acc = acc + self.vectors[[i, k]] * self.vectors[[j, k]].conj() * w;
                }
                out[[i, j]] = acc;
                out[[j, i]] = acc.conj();
            }
            out[[i, i]] = creal(out[[i, i]].re);
        }
        FockOperator::from_parts(out, true)
    }

    pub fn reconstruct(&self) -> FockOperator<T> {
        self.function(|v| v)
    }

    /// `max |V†V − I|` entrywise.
    pub fn orthonormality_error(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for a in 0..n {
            for b in a..n {
                let dot = self
                    .vectors
                    .column(a)
                    .iter()
                    .zip(self.vectors.column(b).iter())
                    .fold(czero::<T>(), |acc, (x, y)| acc + x.conj() * y);
                let target = if a == b { T::one() } else { T::zero() };
                worst = worst.max((dot - creal(target)).norm());
            }
        }
        worst
    }

    /// `‖V·diag(λ)·V† − Ô‖_F / ‖Ô‖₂`, an upper bound on the relative
    /// spectral-norm reconstruction error.
    pub fn reconstruction_error(&self, op: &FockOperator<T>) -> Result<T> {
        let diff = self.reconstruct().checked_sub(op)?;
        let scale = self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let num = diff.frobenius_norm();
        Ok(if scale > T::zero() { num / scale } else { num })
    }
}

/// Eigendecomposition of a Hermitian-flagged operator.
///
/// Diagonal operators are sorted directly, unreduced tridiagonal ones go
/// through a phase-normalized real tridiagonal solver, everything else through
/// cyclic complex Jacobi rotations.
pub fn eigh<T: Real>(op: &FockOperator<T>) -> Result<EigenDecomposition<T>> {
    if !op.is_hermitian() {
        return Err(QndError::NotHermitian { deviation: op.hermitian_deviation().to_f64().unwrap_or(f64::NAN) });
    }
    let m = op.entries();
    let n = op.dim();
    if op.is_tridiagonal() {
        let off: Vec<Cplx<T>> = (0..n - 1).map(|i| m[[i + 1, i]]).collect();
        if off.iter().all(|z| *z == czero()) {
            return Ok(diagonal(op));
        }
        if off.iter().all(|z| *z != czero()) {
            return tridiagonal(op, &off);
        }
    }
    jacobi(op)
}

fn diagonal<T: Real>(op: &FockOperator<T>) -> EigenDecomposition<T> {
    let n = op.dim();
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| op.entries()[[i, i]].re).collect();
    order.sort_by(|&a, &b| diag[a].partial_cmp(&diag[b]).expect("finite diagonal"));
    let mut vectors = Array2::from_elem((n, n), czero());
    for (k, &i) in order.iter().enumerate() {
        vectors[[i, k]] = creal(T::one());
    }
    EigenDecomposition { values: order.iter().map(|&i| diag[i]).collect(), vectors }
}

fn tridiagonal<T: Real>(op: &FockOperator<T>, sub: &[Cplx<T>]) -> Result<EigenDecomposition<T>> {
    let n = op.dim();
    // D†HD has real positive off-diagonals for D = diag(phase_k)
    let mut phase = vec![creal(T::one()); n];
    for i in 0..n - 1 {
        let unit = sub[i] / creal(sub[i].norm());
        phase[i + 1] = phase[i] * unit;
    }
    let diag: Vec<T> = (0..n).map(|i| op.entries()[[i, i]].re).collect();
    let off: Vec<T> = sub.iter().map(|z| z.norm()).collect();
    let real = SymTridiagonal::new(diag, off)?;
    let values = real.eigenvalues()?;
    let mut vectors = Array2::from_elem((n, n), czero());
    for (k, &lambda) in values.iter().enumerate() {
        let v = real.eigenvector(lambda);
        for i in 0..n {
            vectors[[i, k]] = phase[i] * v[i];
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

fn jacobi<T: Real>(op: &FockOperator<T>) -> Result<EigenDecomposition<T>> {
    let n = op.dim();
    let mut a = op.entries().clone();
    let mut v: Array2<Cplx<T>> = Array2::from_diag_elem(n, creal(T::one()));
    let frob = op.frobenius_norm();
    let eps = T::epsilon();

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: T =
            (0..n).flat_map(|p| ((p + 1)..n).map(move |q| (p, q))).map(|(p, q)| a[[p, q]].norm_sqr()).sum::<T>().sqrt();
        if off <= eps * frob * T::lit(1e-2) || off == T::zero() {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                let mag = apq.norm();
                if mag == T::zero() {
                    continue;
                }
                let app = a[[p, p]].re;
                let aqq = a[[q, q]].re;
                if mag <= eps * T::lit(1e-3) * (app.abs() + aqq.abs()) {
                    a[[p, q]] = czero();
                    a[[q, p]] = czero();
                    continue;
                }
                let e_phase = apq / creal(mag); // e^{iφ}
                let tau = (app - aqq) / (T::lit(2.0) * mag);
                let t = -tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt());
                let t = if tau == T::zero() { -T::one() } else { t };
                let c = (T::one() + t * t).sqrt().recip();
                let s = t * c;
                let em = e_phase.conj(); // e^{-iφ}
                                         // columns: A ← A·G
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = akp * c - akq * em * s;
                    a[[k, q]] = akp * s + akq * em * c;
                }
                // rows: A ← G†·A
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = apk * c - aqk * e_phase * s;
                    a[[q, k]] = apk * s + aqk * e_phase * c;
                }
                a[[p, q]] = czero();
                a[[q, p]] = czero();
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = vkp * c - vkq * em * s;
                    v[[k, q]] = vkp * s + vkq * em * c;
                }
            }
        }
    }
    if !converged {
        return Err(QndError::NoConvergence(MAX_JACOBI_SWEEPS));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[[i, i]].re).collect();
    order.sort_by(|&x, &y| diag[x].partial_cmp(&diag[y]).expect("finite eigenvalues"));
    let mut vectors = Array2::from_elem((n, n), czero());
    for (k, &i) in order.iter().enumerate() {
        vectors.column_mut(k).assign(&v.column(i));
    }
    Ok(EigenDecomposition { values: order.iter().map(|&i| diag[i]).collect(), vectors })
}
