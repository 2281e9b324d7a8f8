use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QndError, Result};
use crate::experiments::{local_maxima, CorrelationReport, PhotonNumberQnd};
use crate::povm::{GridPolicy, Resolution};
use crate::scalar::{Cplx, Real};

const SCAN_POINTS: usize = 20_000;
const GOLDEN_ITERATIONS: usize = 200;

/// `|C|/|α| = 2·exp(−2π²δn²)·exp(−1/(8δn²))`.
pub fn correlation_magnitude_per_amplitude<T: Real>(delta_n: T) -> T {
    let d2 = delta_n * delta_n;
    T::lit(2.0) * (-(T::lit(2.0) * T::PI() * T::PI() * d2) - (T::lit(8.0) * d2).recip()).exp()
}

/// `(16π²)^{−1/4}`, the resolution maximizing the anti-correlation.
pub fn optimal_resolution<T: Real>() -> T {
    (T::lit(16.0) * T::PI() * T::PI()).powf(T::lit(-0.25))
}

/// Maximum of `|C|/|α|` over a resolution interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakScan<T: Real> {
    pub lo: T,
    pub hi: T,
    pub argmax: T,
    pub peak_value: T,
    /// Interior local maxima found on the scan; 1 for a single-peaked curve.
    pub interior_maxima: usize,
}

impl<T: Real> PeakScan<T> {
    /// Fine uniform scan of `[lo, hi]`, refined by golden-section search
    /// around the best sample.
    pub fn over(lo: T, hi: T) -> Result<Self> {
        if !(lo > T::zero() && hi > lo && hi.is_finite()) {
            return Err(QndError::InvalidParameter(format!("scan interval [{lo}, {hi}] must satisfy 0 < lo < hi")));
        }
        let h = (hi - lo) / T::of_usize(SCAN_POINTS - 1);
        let xs: Vec<T> = (0..SCAN_POINTS).map(|k| lo + T::of_usize(k) * h).collect();
        let ys: Vec<T> = xs.iter().map(|&x| correlation_magnitude_per_amplitude(x)).collect();
        let interior_maxima = local_maxima(&xs, &ys).len();
        let best = ys.iter().enumerate().fold(0, |b, (k, y)| if *y > ys[b] { k } else { b });
        let (mut a, mut b) = (xs[best.saturating_sub(1)], xs[(best + 1).min(SCAN_POINTS - 1)]);
        let ratio = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
        for _ in 0..GOLDEN_ITERATIONS {
            if b - a <= T::epsilon() * b {
                break;
            }
            let c = b - ratio * (b - a);
            let d = a + ratio * (b - a);
            if correlation_magnitude_per_amplitude(c) >= correlation_magnitude_per_amplitude(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let argmax = (a + b) / T::lit(2.0);
        Ok(Self { lo, hi, argmax, peak_value: correlation_magnitude_per_amplitude(argmax), interior_maxima })
    }
}

/// Correlation reports over a list of resolutions, plus the closed-form peak.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationSweep<T: Real> {
    pub deltas: Vec<T>,
    pub reports: Vec<CorrelationReport<T>>,
    pub peak: PeakScan<T>,
}

/// Evaluates the quantization–coherence correlation at each resolution, in
/// parallel, and locates the closed-form maximum of `|C|/|α|` over the
/// swept interval.
pub fn correlation_sweep<T: Real>(
    alpha: Cplx<T>,
    deltas: &[T],
    dim: usize,
    policy: &GridPolicy,
) -> Result<CorrelationSweep<T>> {
    if deltas.is_empty() {
        return Err(QndError::InvalidParameter("empty resolution list".into()));
    }
    let reports = deltas
        .par_iter()
        .map(|&d| PhotonNumberQnd::new(alpha, Resolution::new(d)?, dim, policy)?.quantization_coherence_correlation())
        .collect::<Result<Vec<_>>>()?;
    let lo = deltas.iter().copied().fold(T::infinity(), T::min);
    let hi = deltas.iter().copied().fold(T::neg_infinity(), T::max);
    let peak = if hi > lo { PeakScan::over(lo, hi)? } else { PeakScan::over(lo / T::lit(2.0), lo * T::lit(2.0))? };
    Ok(CorrelationSweep { deltas: deltas.to_vec(), reports, peak })
}
