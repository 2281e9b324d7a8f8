//! Two-mode simulation of the meter coupling `exp(−i Â_S ŷ_M/δ)` and of the
//! two possible meter readouts.
//!
//! The meter is a truncated mode whose quadratures are diagonalized as real
//! tridiagonal matrices. The coupling is the exact exponential of the
//! truncated `ŷ_M`, so unitarity holds to rounding and the noise-channel
//! readout is an exact unitary on the signal; the pointer readout approaches
//! the continuum measurement operator as the meter dimension grows.

mod basis;

use ndarray::{Array1, Array2};
use rayon::prelude::*;

use crate::error::{QndError, Result};
use crate::fock::{FockOperator, FockState, COHERENT_TAIL_TOL};
use crate::poisson;
use crate::povm::Resolution;
use crate::scalar::{czero, Cplx, Real};

pub use basis::{MeterBasis, BASIS_BLOCK};

/// Smallest admissible meter truncation.
pub const MIN_METER_DIM: usize = 16;
/// Default meter truncation before automatic raising.
pub const DEFAULT_METER_DIM: usize = 128;
/// Largest meter truncation the automatic raise will choose.
pub const MAX_METER_DIM: usize = 16384;

/// Meter mode preparation: truncation and initial coherent amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeterConfig<T: Real> {
    dim_m: usize,
    initial_amplitude: Cplx<T>,
    auto_raise: bool,
}

impl<T: Real> Default for MeterConfig<T> {
    fn default() -> Self {
        Self { dim_m: DEFAULT_METER_DIM, initial_amplitude: czero(), auto_raise: true }
    }
}

impl<T: Real> MeterConfig<T> {
    /// Meter of at least `dim_m` levels, raised as needed by [`couple`].
    pub fn new(dim_m: usize, initial_amplitude: Cplx<T>) -> Result<Self> {
        if dim_m < MIN_METER_DIM {
            return Err(QndError::InvalidDimension { dim: dim_m, min: MIN_METER_DIM });
        }
        Ok(Self { dim_m, initial_amplitude, auto_raise: true })
    }

    /// Meter of exactly `dim_m` levels; [`couple`] fails if it is too small.
    pub fn fixed(dim_m: usize, initial_amplitude: Cplx<T>) -> Result<Self> {
        Ok(Self { auto_raise: false, ..Self::new(dim_m, initial_amplitude)? })
    }

    pub fn dim_m(&self) -> usize {
        self.dim_m
    }

    pub fn initial_amplitude(&self) -> Cplx<T> {
        self.initial_amplitude
    }

    pub fn auto_raise(&self) -> bool {
        self.auto_raise
    }
}

/// Signal ⊗ meter pure state; row `i`, column `m` holds `⟨i, m|Ψ⟩`, so the
/// row-major flattening is the signal-major amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState<T: Real> {
    amplitudes: Array2<Cplx<T>>,
    meter_amplitude: Cplx<T>,
}

impl<T: Real> JointState<T> {
    /// Product state `|ψ_S⟩ ⊗ |β⟩`.
    pub fn product(signal: &FockState<T>, meter: &FockState<T>, meter_amplitude: Cplx<T>) -> Self {
        let (ds, dm) = (signal.dim(), meter.dim());
        let s = signal.amplitudes();
        let m = meter.amplitudes();
        let amplitudes = Array2::from_shape_fn((ds, dm), |(i, k)| s[i] * m[k]);
        Self { amplitudes, meter_amplitude }
    }

    pub fn dim_s(&self) -> usize {
        self.amplitudes.nrows()
    }

    pub fn dim_m(&self) -> usize {
        self.amplitudes.ncols()
    }

    pub fn amplitudes(&self) -> &Array2<Cplx<T>> {
        &self.amplitudes
    }

    /// Signal-major amplitude vector of length `dim_s · dim_m`.
    pub fn flat(&self) -> &[Cplx<T>] {
        self.amplitudes.as_slice().expect("standard layout")
    }

    /// Initial coherent amplitude of the meter.
    pub fn meter_amplitude(&self) -> Cplx<T> {
        self.meter_amplitude
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Reduced signal density-matrix element `ρ_S[row, col]`.
    pub fn reduced_element(&self, row: usize, col: usize) -> Cplx<T> {
        self.amplitudes
            .row(row)
            .iter()
            .zip(self.amplitudes.row(col).iter())
            .fold(czero(), |acc, (a, b)| acc + *a * b.conj())
    }

    /// `Tr(ρ_S Ô)` with the meter traced out.
    pub fn signal_expectation(&self, op: &FockOperator<T>) -> Result<Cplx<T>> {
        if op.dim() != self.dim_s() {
            return Err(QndError::DimensionMismatch { expected: op.dim(), found: self.dim_s() });
        }
        let applied = op.entries().dot(&self.amplitudes);
        Ok(self.amplitudes.iter().zip(applied.iter()).fold(czero(), |acc, (a, b)| acc + a.conj() * b))
    }

    /// `Tr(ρ_S Ô²) − Tr(ρ_S Ô)²` for a Hermitian-flagged observable.
    pub fn signal_variance(&self, op: &FockOperator<T>) -> Result<T> {
        if !op.is_hermitian() {
            return Err(QndError::NotHermitian { deviation: op.hermitian_deviation().to_f64().unwrap_or(f64::NAN) });
        }
        let mean = self.signal_expectation(op)?.re;
        let applied = op.entries().dot(&self.amplitudes);
        let second = applied.iter().map(|z| z.norm_sqr()).sum::<T>();
        Ok(second - mean * mean)
    }

    /// Meter pointer expectation `⟨x̂_M⟩`.
    pub fn meter_x_expectation(&self) -> T {
        let dm = self.dim_m();
        let mut acc = T::zero();
        for row in self.amplitudes.rows() {
            for m in 1..dm {
                // ⟨m−1|x̂|m⟩ = √m/2, counted once for each ordering
                acc = acc + T::of_usize(m).sqrt() * (row[m - 1].conj() * row[m]).re;
            }
        }
        acc
    }
}

/// Pointer-readout outcome at one `x̂_M` eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutResult<T: Real> {
    pub pointer_value: T,
    /// `2δ·(pointer_value − Re β)`, the observable value the pointer indicates.
    pub inferred_a_m: T,
    /// Probability of this discrete outcome.
    pub weight: T,
    pub signal_state: FockState<T>,
}

/// Noise-channel outcome at one `ŷ_M` eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseOutcome<T: Real> {
    pub noise_value: T,
    pub weight: T,
    pub signal_state: FockState<T>,
    /// `|⟨signal_state| exp(−i y Â/δ) |ψ_in⟩|`.
    pub predicted_unitary_overlap: T,
}

fn i_pow<T: Real>(m: usize) -> Cplx<T> {
    match m % 4 {
        0 => Cplx::new(T::one(), T::zero()),
        1 => Cplx::new(T::zero(), T::one()),
        2 => Cplx::new(-T::one(), T::zero()),
        _ => Cplx::new(T::zero(), -T::one()),
    }
}

/// Coherent tails of the displaced meter states, weighted by the signal's
/// eigencomponent probabilities.
struct TailProfile {
    components: Vec<(f64, Vec<f64>)>,
    own_dim: usize,
}

impl TailProfile {
    fn new<T: Real>(values: &[T], coeffs: &Array1<Cplx<T>>, delta: Resolution<T>, initial_amplitude: Cplx<T>) -> Self {
        let d = delta.value().to_f64().unwrap_or(f64::NAN);
        let bre = initial_amplitude.re.to_f64().unwrap_or(0.0);
        let bim = initial_amplitude.im.to_f64().unwrap_or(0.0);
        let components = values
            .iter()
            .zip(coeffs.iter())
            .filter_map(|(a, c)| {
                let w = c.norm_sqr().to_f64().unwrap_or(0.0);
                (w > 0.0).then(|| {
                    let shifted = bre + a.to_f64().unwrap_or(0.0) / (2.0 * d);
                    (w, poisson::pmf_table(shifted * shifted + bim * bim))
                })
            })
            .collect();
        let own_dim = poisson::required_dim(bre * bre + bim * bim, COHERENT_TAIL_TOL);
        Self { components, own_dim }
    }

    fn tail(&self, dim: usize) -> f64 {
        self.components
            .iter()
            .map(|(w, t)| if dim >= t.len() { 0.0 } else { w * t[dim..].iter().rev().sum::<f64>() })
            .sum()
    }

    fn required(&self, floor: usize) -> usize {
        let mut lo = floor.max(MIN_METER_DIM).max(self.own_dim);
        if self.tail(lo) < COHERENT_TAIL_TOL {
            return lo;
        }
        let mut hi = self.components.iter().map(|c| c.1.len()).max().unwrap_or(lo).max(lo + 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.tail(mid) < COHERENT_TAIL_TOL {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// Smallest meter truncation `≥ floor` for which the coherent tails of the
/// displaced meter states, weighted by the signal's eigencomponent
/// probabilities, sum below `1e-10`.
///
/// A component with observable eigenvalue `a` displaces the meter to
/// `β + a/(2δ)`. The result may exceed [`MAX_METER_DIM`]; [`couple`]
/// enforces the cap.
pub fn required_meter_dim<T: Real>(
    signal: &FockState<T>,
    observable: &FockOperator<T>,
    delta: Resolution<T>,
    initial_amplitude: Cplx<T>,
    floor: usize,
) -> Result<usize> {
    let eigen = observable.eigh()?;
    if signal.dim() != eigen.dim() {
        return Err(QndError::DimensionMismatch { expected: eigen.dim(), found: signal.dim() });
    }
    let coeffs = eigen.to_eigenbasis(signal.amplitudes().view());
    Ok(TailProfile::new(eigen.values(), &coeffs, delta, initial_amplitude).required(floor))
}

/// `exp(−i Â_S ŷ_M/δ)(|ψ_S⟩ ⊗ |β⟩)`.
///
/// Each eigencomponent of `Â_S` with eigenvalue `a` receives
/// `exp(−i a ŷ_M/δ)|β⟩`, a displacement of the pointer by `a/(2δ)`. The meter
/// dimension is raised to [`required_meter_dim`] unless the config is fixed.
pub fn couple<T: Real>(
    signal: &FockState<T>,
    observable: &FockOperator<T>,
    delta: Resolution<T>,
    meter: MeterConfig<T>,
) -> Result<JointState<T>> {
    let eigen = observable.eigh()?;
    if signal.dim() != eigen.dim() {
        return Err(QndError::DimensionMismatch { expected: eigen.dim(), found: signal.dim() });
    }
    let beta = meter.initial_amplitude();
    let coeffs = eigen.to_eigenbasis(signal.amplitudes().view());
    let profile = TailProfile::new(eigen.values(), &coeffs, delta, beta);
    let required = profile.required(meter.dim_m());
    let dim_m = if meter.auto_raise() { required.min(MAX_METER_DIM) } else { meter.dim_m() };
    if required > dim_m {
        return Err(QndError::MeterTruncation { dim_m, required, tail: profile.tail(dim_m) });
    }

    let ds = signal.dim();
    let meter_state = FockState::coherent(beta, dim_m)?;
    let beta_amps = meter_state.amplitudes();
    let basis = MeterBasis::<T>::new(dim_m)?;
    let xs = basis.values();
    let d = delta.value();
    let lambdas = eigen.values();

    // rows: exp(−i a_j ŷ_M/δ)|β⟩ with the (−i)^m factor applied at the end
    let mut displaced: Vec<Vec<Cplx<T>>> = vec![vec![czero(); dim_m]; ds];
    basis.for_each_block(|start, block| {
        let overlaps: Vec<Cplx<T>> = block
            .iter()
            .map(|u| u.iter().enumerate().fold(czero(), |acc, (m, v)| acc + i_pow::<T>(m) * beta_amps[m] * *v))
            .collect();
        displaced.par_iter_mut().enumerate().for_each(|(j, row)| {
            for (off, u) in block.iter().enumerate() {
                let x = xs[start + off];
                let z = Cplx::from_polar(T::one(), lambdas[j] * x / d) * overlaps[off];
                for (r, v) in row.iter_mut().zip(u.iter()) {
                    *r = *r + z * *v;
                }
            }
        });
    });
    displaced.par_iter_mut().for_each(|row| {
        for (m, r) in row.iter_mut().enumerate() {
            *r = *r * i_pow::<T>(m).conj();
        }
    });

    let vectors = eigen.vectors();
    let mut amplitudes = Array2::from_elem((ds, dim_m), czero());
    for j in 0..ds {
        let cj = coeffs[j];
        if cj == czero() {
            continue;
        }
        for i in 0..ds {
            let f = vectors[[i, j]] * cj;
            if f == czero() {
                continue;
            }
            let mut row = amplitudes.row_mut(i);
            for (a, v) in row.iter_mut().zip(displaced[j].iter()) {
                *a = *a + f * *v;
            }
        }
    }
    Ok(JointState { amplitudes, meter_amplitude: beta })
}

fn normalized_or_skip<T: Real>(phi: Vec<Cplx<T>>) -> Option<(T, FockState<T>)> {
    let weight = phi.iter().map(|z| z.norm_sqr()).sum::<T>();
    if weight < T::RESOLVABLE_WEIGHT {
        return None;
    }
    FockState::from_amplitudes(Array1::from(phi)).ok().map(|s| (weight, s))
}

/// Projects the meter onto the `x̂_M` eigenbasis.
///
/// Outcomes are returned in ascending pointer order. Outcomes lighter than
/// [`Real::RESOLVABLE_WEIGHT`] are omitted: their conditioned signal is
/// dominated by rounding noise of the joint amplitudes.
pub fn readout_pointer<T: Real>(joint: &JointState<T>, delta: Resolution<T>) -> Result<Vec<ReadoutResult<T>>> {
    let basis = MeterBasis::<T>::new(joint.dim_m())?;
    let two_d = T::lit(2.0) * delta.value();
    let origin = joint.meter_amplitude().re;
    let amps = &joint.amplitudes;
    let mut out = Vec::with_capacity(joint.dim_m());
    basis.for_each_block(|start, block| {
        let results: Vec<Option<ReadoutResult<T>>> = block
            .par_iter()
            .enumerate()
            .map(|(off, u)| {
                let x = basis.values()[start + off];
                let phi: Vec<Cplx<T>> = amps
                    .rows()
                    .into_iter()
                    .map(|row| row.iter().zip(u.iter()).fold(czero(), |acc, (a, v)| acc + *a * *v))
                    .collect();
                normalized_or_skip(phi).map(|(weight, signal_state)| ReadoutResult {
                    pointer_value: x,
                    inferred_a_m: two_d * (x - origin),
                    weight,
                    signal_state,
                })
            })
            .collect();
        out.extend(results.into_iter().flatten());
    });
    Ok(out)
}

/// Projects the meter onto the `ŷ_M` eigenbasis and compares each conditioned
/// signal with the unitary `exp(−i y Â/δ)|ψ_in⟩` predicted for that outcome.
///
/// Outcomes are returned in ascending `y`; light outcomes are omitted as in
/// [`readout_pointer`].
pub fn readout_noise<T: Real>(
    joint: &JointState<T>,
    delta: Resolution<T>,
    signal_in: &FockState<T>,
    observable: &FockOperator<T>,
) -> Result<Vec<NoiseOutcome<T>>> {
    let eigen = observable.eigh()?;
    if signal_in.dim() != joint.dim_s() || eigen.dim() != joint.dim_s() {
        return Err(QndError::DimensionMismatch { expected: joint.dim_s(), found: signal_in.dim() });
    }
    let coeffs = eigen.to_eigenbasis(signal_in.amplitudes().view());
    let basis = MeterBasis::<T>::new(joint.dim_m())?;
    let d = delta.value();
    let amps = &joint.amplitudes;
    let phases: Vec<Cplx<T>> = (0..joint.dim_m()).map(i_pow::<T>).collect();
    let mut out = Vec::with_capacity(joint.dim_m());
    basis.for_each_block(|start, block| {
        let results: Vec<Option<NoiseOutcome<T>>> = block
            .par_iter()
            .enumerate()
            .map(|(off, u)| {
                let y = -basis.values()[start + off];
                let phi: Vec<Cplx<T>> = amps
                    .rows()
                    .into_iter()
                    .map(|row| {
                        row.iter().zip(u.iter()).zip(phases.iter()).fold(czero(), |acc, ((a, v), p)| acc + *a * *p * *v)
                    })
                    .collect();
                let (weight, signal_state) = normalized_or_skip(phi)?;
                let rotated = Array1::from_iter(
                    eigen.values().iter().zip(coeffs.iter()).map(|(a, c)| *c * Cplx::from_polar(T::one(), -y * *a / d)),
                );
                let predicted = eigen.from_eigenbasis(rotated.view());
                let overlap = signal_state
                    .amplitudes()
                    .iter()
                    .zip(predicted.iter())
                    .fold(czero(), |acc, (a, b)| acc + a.conj() * b)
                    .norm();
                Some(NoiseOutcome { noise_value: y, weight, signal_state, predicted_unitary_overlap: overlap })
            })
            .collect();
        out.extend(results.into_iter().flatten());
    });
    out.reverse();
    Ok(out)
}

/// Total-variation distance between a pointer histogram and a continuous
/// outcome density.
///
/// Each outcome owns the cell between the midpoints to its neighbours on the
/// inferred-value axis; the reference mass of a cell is the Simpson integral
/// of `density` over it, and mass the cells miss counts toward the distance.
pub fn pointer_total_variation<T: Real, F: Fn(T) -> T + Sync>(results: &[ReadoutResult<T>], density: F) -> T {
    let n = results.len();
    if n < 2 {
        return T::one();
    }
    let a: Vec<T> = results.iter().map(|r| r.inferred_a_m).collect();
    let half = T::lit(0.5);
    let edges: Vec<T> = (0..=n)
        .map(|k| match k {
            0 => a[0] - half * (a[1] - a[0]),
            k if k == n => a[n - 1] + half * (a[n - 1] - a[n - 2]),
            k => half * (a[k - 1] + a[k]),
        })
        .collect();
    let panels = 16;
    let reference: Vec<T> = (0..n)
        .into_par_iter()
        .map(|k| {
            let (lo, hi) = (edges[k], edges[k + 1]);
            let h = (hi - lo) / T::of_usize(panels);
            let mut s = density(lo) + density(hi);
            for p in 1..panels {
                let w = if p % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
                s = s + w * density(lo + T::of_usize(p) * h);
            }
            s * h / T::lit(3.0)
        })
        .collect();
    let covered: T = reference.iter().copied().sum();
    let diff: T = results.iter().zip(reference.iter()).map(|(r, m)| (r.weight - *m).abs()).sum();
    half * (diff + (T::one() - covered).abs())
}

/// Initial meter state `|β⟩` at the given truncation.
pub fn meter_state<T: Real>(config: &MeterConfig<T>) -> Result<FockState<T>> {
    FockState::coherent(config.initial_amplitude(), config.dim_m())
}
