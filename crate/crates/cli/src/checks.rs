//! Cross-checks between the closed forms, the measurement operators and the
//! two-mode meter simulation.

use num_complex::Complex64;
use serde::Serialize;

use qnd_core::experiments::{PhotonNumberQnd, QuadratureQnd, MIN_QUADRATURE_DIM};
use qnd_core::meter::{
    couple, pointer_total_variation, readout_noise, readout_pointer, required_meter_dim, NoiseOutcome, ReadoutResult,
    MAX_METER_DIM,
};
use qnd_core::{
    dephasing_factor, FockOperatorF64, FockStateF64, GaussianMeasurementF64, GridPolicy, MeterConfigF64, Resolution,
};

use crate::error::CliError;

pub const DUAL_PATH_TOL: f64 = 1e-8;
pub const NUMBER_COMPLETENESS_TOL: f64 = 1e-8;
pub const QUADRATURE_COMPLETENESS_TOL: f64 = 1e-6;
pub const STRUCTURE_TOL: f64 = 1e-12;
pub const UNITARITY_TOL: f64 = 1e-12;
pub const CONSERVATION_TOL: f64 = 1e-10;
pub const DEPHASING_TOL: f64 = 1e-6;
pub const POINTER_OVERLAP_MIN: f64 = 1.0 - 1e-4;
pub const POINTER_TV_TOL: f64 = 2e-3;
pub const NOISE_OVERLAP_MIN: f64 = 1.0 - 1e-8;
pub const NOISE_TV_TOL: f64 = 1e-8;
/// Fraction of pointer mass excluded at each end of the overlap comparison.
pub const CENTRAL_TAIL: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bound {
    AtMost,
    AtLeast,
}

/// A measured value against a one-sided bound.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub observable: &'static str,
    pub value: f64,
    pub bound: f64,
    pub kind: Bound,
}

impl Check {
    pub fn at_most(name: &'static str, observable: &'static str, value: f64, bound: f64) -> Self {
        Self { name, observable, value, bound, kind: Bound::AtMost }
    }

    pub fn at_least(name: &'static str, observable: &'static str, value: f64, bound: f64) -> Self {
        Self { name, observable, value, bound, kind: Bound::AtLeast }
    }

    /// NaN never passes.
    pub fn passed(&self) -> bool {
        match self.kind {
            Bound::AtMost => self.value <= self.bound,
            Bound::AtLeast => self.value >= self.bound,
        }
    }

    pub fn relation(&self) -> &'static str {
        match self.kind {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        }
    }
}

/// Smallest overlap between meter-conditioned signals and the
/// measurement-operator conditioned state, over readouts inside the central
/// `1 − 2·CENTRAL_TAIL` of pointer mass.
pub fn central_pointer_overlap(
    results: &[ReadoutResult<f64>],
    state: &FockStateF64,
    measurement: &GaussianMeasurementF64,
) -> Result<f64, CliError> {
    let mut cumulative = 0.0;
    let mut worst = 1.0_f64;
    for r in results {
        cumulative += r.weight;
        if !(CENTRAL_TAIL..=1.0 - CENTRAL_TAIL).contains(&cumulative) {
            continue;
        }
        let reference = measurement.condition(state, r.inferred_a_m)?.conditioned;
        worst = worst.min(r.signal_state.overlap(&reference)?);
    }
    Ok(worst)
}

/// Total variation between two noise-readout histograms on the same meter
/// basis; an outcome omitted from one side counts with weight zero.
pub fn noise_total_variation(a: &[NoiseOutcome<f64>], b: &[NoiseOutcome<f64>]) -> f64 {
    let (mut i, mut j, mut sum) = (0, 0, 0.0);
    while i < a.len() || j < b.len() {
        let ya = a.get(i).map_or(f64::INFINITY, |o| o.noise_value);
        let yb = b.get(j).map_or(f64::INFINITY, |o| o.noise_value);
        if ya == yb {
            sum += (a[i].weight - b[j].weight).abs();
            i += 1;
            j += 1;
        } else if ya < yb {
            sum += a[i].weight;
            i += 1;
        } else {
            sum += b[j].weight;
            j += 1;
        }
    }
    sum / 2.0
}

/// Couples `state` to a meter through `observable` and checks unitarity,
/// conservation of the observable and the pointer readout against the
/// measurement operator.
fn pointer_checks(
    label: &'static str,
    state: &FockStateF64,
    observable: &FockOperatorF64,
    delta: Resolution<f64>,
    meter_dim: usize,
    out: &mut Vec<Check>,
) -> Result<qnd_core::JointStateF64, CliError> {
    let joint = couple(state, observable, delta, MeterConfigF64::new(meter_dim, Complex64::new(0.0, 0.0))?)?;
    out.push(Check::at_most("joint_norm_error", label, (joint.norm() - 1.0).abs(), UNITARITY_TOL));
    let mean_shift = (state.expectation(observable)?.re - joint.signal_expectation(observable)?.re).abs();
    out.push(Check::at_most("observable_mean_shift", label, mean_shift, CONSERVATION_TOL));
    let var_shift = (state.variance(observable)? - joint.signal_variance(observable)?).abs();
    out.push(Check::at_most("observable_variance_shift", label, var_shift, CONSERVATION_TOL));

    let results = readout_pointer(&joint, delta)?;
    let m = GaussianMeasurementF64::new(observable, delta)?;
    out.push(Check::at_least(
        "pointer_min_overlap",
        label,
        central_pointer_overlap(&results, state, &m)?,
        POINTER_OVERLAP_MIN,
    ));
    let prepared = m.prepare(state)?;
    let tv = pointer_total_variation(&results, |a| m.density_prepared(&prepared, a));
    out.push(Check::at_most("pointer_total_variation", label, tv, POINTER_TV_TOL));
    Ok(joint)
}

/// Reads the meter's noise quadrature for each signal at a shared meter
/// truncation and checks the predicted unitary and signal independence.
fn noise_checks(
    label: &'static str,
    signals: &[FockStateF64],
    observable: &FockOperatorF64,
    delta: Resolution<f64>,
    meter_dim: usize,
    out: &mut Vec<Check>,
) -> Result<(), CliError> {
    let zero = Complex64::new(0.0, 0.0);
    let mut dim_m = meter_dim;
    for s in signals {
        dim_m = dim_m.max(required_meter_dim(s, observable, delta, zero, meter_dim)?);
    }
    let dim_m = dim_m.min(MAX_METER_DIM);
    let cfg = MeterConfigF64::fixed(dim_m, zero)?;
    let mut worst_overlap = 1.0_f64;
    let mut worst_tv = 0.0_f64;
    let mut reference: Option<Vec<NoiseOutcome<f64>>> = None;
    for s in signals {
        let joint = couple(s, observable, delta, cfg)?;
        let outcomes = readout_noise(&joint, delta, s, observable)?;
        worst_overlap = outcomes.iter().fold(worst_overlap, |m, o| m.min(o.predicted_unitary_overlap));
        match &reference {
            None => reference = Some(outcomes),
            Some(r) => worst_tv = worst_tv.max(noise_total_variation(r, &outcomes)),
        }
    }
    out.push(Check::at_least("noise_min_unitary_overlap", label, worst_overlap, NOISE_OVERLAP_MIN));
    out.push(Check::at_most("noise_signal_total_variation", label, worst_tv, NOISE_TV_TOL));
    Ok(())
}

/// Meter-model checks for a photon-number measurement of `|α⟩` and a
/// quadrature measurement of the vacuum.
pub fn meter_checks(
    alpha: Complex64,
    delta_n: Resolution<f64>,
    delta_x: Resolution<f64>,
    dim: usize,
    meter_dim: usize,
) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();

    let coherent = FockStateF64::coherent(alpha, dim)?;
    let n = FockOperatorF64::number(dim)?;
    let joint = pointer_checks("number", &coherent, &n, delta_n, meter_dim, &mut out)?;
    let a = FockOperatorF64::annihilation(dim)?;
    let amplitude = joint.signal_expectation(&a)?.norm();
    let expected = alpha.norm() * dephasing_factor(delta_n);
    out.push(Check::at_most("dephasing_error", "number", (amplitude - expected).abs(), DEPHASING_TOL));
    noise_checks("number", &[coherent, FockStateF64::vacuum(dim)?], &n, delta_n, meter_dim, &mut out)?;

    let qdim = MIN_QUADRATURE_DIM;
    let vacuum = FockStateF64::vacuum(qdim)?;
    let x = FockOperatorF64::quadrature_x(qdim)?;
    pointer_checks("quadrature", &vacuum, &x, delta_x, meter_dim, &mut out)?;
    let displaced = FockStateF64::coherent(Complex64::new(0.5, 1.0), qdim)?;
    noise_checks("quadrature", &[vacuum, displaced], &x, delta_x, meter_dim, &mut out)?;
    Ok(out)
}

/// Structure, completeness and closed-form agreement of the measurement
/// operators for `n̂` (truncation `dim`) and `x̂` (truncation 128).
pub fn povm_checks(
    alpha: Complex64,
    delta_n: Resolution<f64>,
    delta_x: Resolution<f64>,
    dim: usize,
    policy: &GridPolicy,
) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    let n = FockOperatorF64::number(dim)?;
    let x = FockOperatorF64::quadrature_x(MIN_QUADRATURE_DIM)?;
    let cases =
        [("number", &n, delta_n, NUMBER_COMPLETENESS_TOL), ("quadrature", &x, delta_x, QUADRATURE_COMPLETENESS_TOL)];
    for (label, obs, delta, tol) in cases {
        let m = GaussianMeasurementF64::new(obs, delta)?;
        let grid = m.spectrum_grid(policy)?;
        out.push(Check::at_most("completeness_deviation", label, m.completeness_deviation(&grid)?, tol));
        let (lo, hi) = m.spectrum_bounds();
        let (mut herm, mut min_eig) = (0.0_f64, f64::INFINITY);
        for k in 0..=8 {
            let a_m = lo + (hi - lo) * k as f64 / 8.0;
            let p = m.operator(a_m);
            herm = herm.max(p.hermitian_deviation());
            min_eig = min_eig.min(p.eigh()?.values()[0]);
        }
        out.push(Check::at_most("hermitian_deviation", label, herm, STRUCTURE_TOL));
        out.push(Check::at_least("min_eigenvalue", label, min_eig, -STRUCTURE_TOL));
    }

    let eigenstate = FockStateF64::number(dim / 4, dim)?;
    let m = GaussianMeasurementF64::new(&n, delta_n)?;
    let fixed = m.condition(&eigenstate, (dim / 4) as f64 + 0.37)?.conditioned.overlap(&eigenstate)?;
    out.push(Check::at_least("eigenstate_fixed_point_overlap", "number", fixed, 1.0 - STRUCTURE_TOL));

    let pn = PhotonNumberQnd::new(alpha, delta_n, dim, policy)?.dual_path_deviation()?;
    out.push(Check::at_most("closed_form_density_deviation", "number", pn.density, DUAL_PATH_TOL));
    out.push(Check::at_most("closed_form_coherence_deviation", "number", pn.post_value, DUAL_PATH_TOL));
    let q = QuadratureQnd::new(delta_x, MIN_QUADRATURE_DIM, policy)?.dual_path_deviation()?;
    out.push(Check::at_most("closed_form_density_deviation", "quadrature", q.density, DUAL_PATH_TOL));
    out.push(Check::at_most("closed_form_jump_deviation", "quadrature", q.post_value, DUAL_PATH_TOL));
    Ok(out)
}
