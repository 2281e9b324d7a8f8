use std::ops::Range;

use rayon::prelude::*;

use crate::error::Result;
use crate::fock::SymTridiagonal;
use crate::scalar::Real;

/// Eigenvectors produced per block when streaming a meter basis.
pub const BASIS_BLOCK: usize = 256;

/// Eigenbasis of the truncated meter quadrature `x̂_M`.
///
/// Eigenvalues are stored; eigenvectors are regenerated on demand in blocks so
/// meters with thousands of levels never hold a dense basis. The `ŷ_M`
/// eigenbasis follows from the same vectors: `ŷ = −D†x̂D` with `D = diag(iⁿ)`,
/// so `ŷ_M` has eigenvalue `−x_k` on `D†u_k`.
#[derive(Debug, Clone)]
pub struct MeterBasis<T: Real> {
    tri: SymTridiagonal<T>,
    values: Vec<T>,
}

impl<T: Real> MeterBasis<T> {
    pub fn new(dim: usize) -> Result<Self> {
        let tri = SymTridiagonal::quadrature(dim);
        let values = tri.eigenvalues()?;
        Ok(Self { tri, values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Eigenvalues of `x̂_M`, ascending.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Real eigenvectors `u_k` for `k` in `range`, in order.
    pub fn vectors(&self, range: Range<usize>) -> Vec<Vec<T>> {
        range.into_par_iter().map(|k| self.tri.eigenvector(self.values[k])).collect()
    }

    /// Calls `f(k_start, block)` over consecutive blocks covering the basis.
    pub fn for_each_block<F: FnMut(usize, &[Vec<T>])>(&self, mut f: F) {
        let n = self.dim();
        let mut start = 0;
        while start < n {
            let end = (start + BASIS_BLOCK).min(n);
            let block = self.vectors(start..end);
            f(start, &block);
            start = end;
        }
    }
}
