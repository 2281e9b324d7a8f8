//! Real symmetric tridiagonal eigenproblems.
//!
//! Eigenvalues come from implicit QL with Wilkinson-type shifts; eigenvectors
//! are recovered one at a time by inverse iteration, so a full basis of a
//! large matrix can be streamed without ever being stored.

use crate::error::{QndError, Result};
use crate::scalar::Real;

const MAX_QL_ITER: usize = 60;
const INVERSE_ITER_STEPS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal<T: Real> {
    diag: Vec<T>,
    off: Vec<T>,
}

impl<T: Real> SymTridiagonal<T> {
    /// `off[i]` couples rows `i` and `i + 1`.
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(QndError::InvalidParameter(format!(
                "tridiagonal shape: {} diagonal and {} off-diagonal entries",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    /// Truncated `x̂ = (â + â†)/2`: zero diagonal, `√(n+1)/2` off the diagonal.
    pub fn quadrature(dim: usize) -> Self {
        let half = T::lit(0.5);
        Self { diag: vec![T::zero(); dim], off: (1..dim).map(|n| half * T::of_usize(n).sqrt()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn off(&self) -> &[T] {
        &self.off
    }

    fn norm_bound(&self) -> T {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { T::zero() };
                let right = if i + 1 < n { self.off[i].abs() } else { T::zero() };
                self.diag[i].abs() + left + right
            })
            .fold(T::zero(), T::max)
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(T::zero());
        let two = T::lit(2.0);
        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= T::epsilon() * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > MAX_QL_ITER {
                    return Err(QndError::NoConvergence(MAX_QL_ITER));
                }
                let mut g = (d[l + 1] - d[l]) / (two * e[l]);
                let mut r = g.hypot(T::one());
                g = d[m] - d[l] + e[l] / (g + r.abs().copysign(g));
                let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
                let mut deflated = false;
                let mut i = m;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == T::zero() {
                        d[i + 1] = d[i + 1] - p;
                        e[m] = T::zero();
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + two * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if deflated {
                    continue;
                }
                d[l] = d[l] - p;
                e[l] = g;
                e[m] = T::zero();
            }
        }
        d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        Ok(d)
    }

    /// Unit eigenvector for an (accurately known) eigenvalue, by inverse
    /// iteration. The largest-modulus component is made positive.
    pub fn eigenvector(&self, lambda: T) -> Vec<T> {
        let n = self.dim();
        if n == 1 {
            return vec![T::one()];
        }
        let tiny = T::epsilon() * self.norm_bound().max(T::min_positive_value());
        let lu = TridiagonalLu::factor(self, lambda, tiny);
        // deterministic, generic start vector
        let mut x: Vec<T> = (0..n).map(|i| T::one() + T::lit(((i * 7919 + 13) % 1000) as f64 / 2000.0)).collect();
        for _ in 0..INVERSE_ITER_STEPS {
            lu.solve(&mut x);
            normalize(&mut x);
        }
        let (imax, _) = x
            .iter()
            .enumerate()
            .fold((0, T::zero()), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
        if x[imax] < T::zero() {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        x
    }

    /// `T·v`.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i > 0 {
                    acc = acc + self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc = acc + self.off[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }
}

fn normalize<T: Real>(x: &mut [T]) {
    let scale = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() {
        return;
    }
    x.iter_mut().for_each(|v| *v = *v / scale);
    let norm = x.iter().map(|v| *v * *v).sum::<T>().sqrt();
    x.iter_mut().for_each(|v| *v = *v / norm);
}

/// LU factorization of `T − λI` with partial pivoting (two superdiagonals).
struct TridiagonalLu<T> {
    dl: Vec<T>,
    d: Vec<T>,
    du: Vec<T>,
    du2: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Real> TridiagonalLu<T> {
    fn factor(m: &SymTridiagonal<T>, lambda: T, tiny: T) -> Self {
        let n = m.dim();
        let mut dl = m.off.clone();
        let mut d: Vec<T> = m.diag.iter().map(|v| *v - lambda).collect();
        let mut du = m.off.clone();
        let mut du2 = vec![T::zero(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == T::zero() {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] = d[i + 1] - fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == T::zero() {
            d[n - 1] = tiny;
        }
        Self { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [T]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] = b[i + 1] - self.dl[i] * b[i];
        }
        b[n - 1] = b[n - 1] / self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}
