//! One function per subcommand: validate, compute, assemble a [`Report`].
//!
//! Data tables cover the requested grid; summary values are always computed
//! on the default grid for the chosen policy, so a narrow display grid never
//! truncates an integral.

use num_complex::Complex64;
use serde_json::json;

use qnd_core::experiments::{
    correlation_sweep, operator_side_covariance, optimal_resolution, PhotonNumberQnd, QuadratureQnd,
    MIN_QUADRATURE_DIM, NUMBER_MASS_TOL, QUADRATURE_MASS_TOL,
};
use qnd_core::{dephasing_factor, phase_noise, FockOperatorF64, GaussianMeasurementF64};

use crate::args::{policy, resolution, MeterArgs, PhotonNumberArgs, PovmArgs, QuadratureArgs, SweepArgs};
use crate::checks::{self, Check, DUAL_PATH_TOL};
use crate::error::CliError;
use crate::output::{Cell, GridInfo, Metadata, Report, RunConfig};

/// Tolerance on each grid-integrated correlation against its closed form.
pub const CORRELATION_TOL: f64 = 1e-6;

/// A finished report plus anything the user should hear about on stderr.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub warnings: Vec<String>,
    /// Cross-checks that exceeded their tolerance; the report is still written.
    pub failures: Vec<String>,
}

impl Outcome {
    fn new(report: Report) -> Self {
        Self { report, warnings: Vec::new(), failures: Vec::new() }
    }
}

fn complex_json(z: Complex64) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

/// False for NaN.
fn within(value: f64, tol: f64) -> bool {
    value <= tol
}

fn check_dim(name: &str, dim: usize, min: usize) -> Result<(), CliError> {
    if dim < min {
        return Err(CliError::InvalidParameter(format!("{name} must be at least {min}, got {dim}")));
    }
    Ok(())
}

pub fn photon_number(args: &PhotonNumberArgs) -> Result<Outcome, CliError> {
    let delta = resolution("--delta-n", args.delta_n)?;
    let policy = policy(args.tolerance)?;
    check_dim("--dim", args.dim, 2)?;
    let grid = args.grid.map(|g| g.to_grid()).transpose()?;
    let default = PhotonNumberQnd::new(args.alpha, delta, args.dim, &policy)?;
    let setup = grid.map_or_else(|| default.clone(), |g| default.regridded(g));

    let config = RunConfig::new("photon-number")
        .with("alpha", [args.alpha.re, args.alpha.im])
        .with("delta_n", args.delta_n)
        .with("dim", args.dim)
        .with("grid", args.grid)
        .with("tolerance", args.tolerance)
        .with("format", args.output.format);
    let mut meta = Metadata::new(config);
    meta.dims.insert("signal", args.dim);
    meta.grid = Some(GridInfo::from(setup.grid()));
    meta.tolerances.insert("dual_path", DUAL_PATH_TOL);
    meta.tolerances.insert("grid_mass", NUMBER_MASS_TOL);
    meta.tolerances.insert("correlation", CORRELATION_TOL);

    let mut report = Report::new(meta, vec!["n_m", "density", "re_a_f", "im_a_f", "abs_a_f"]);
    for s in setup.curve()? {
        let a = s.post_value;
        report.push_row(vec![s.a_m.into(), s.density.into(), a.re.into(), a.im.into(), a.norm().into()]);
    }

    let dev = setup.dual_path_deviation()?;
    let correlation = default.quantization_coherence_correlation()?;
    report.summarize("dephasing_factor", dephasing_factor(delta));
    report.summarize("phase_noise", phase_noise(delta));
    report.summarize("correlation_closed", complex_json(correlation.closed_form));
    report.summarize("correlation_numeric", complex_json(correlation.numeric));
    report.summarize("correlation_abs_error", correlation.abs_error);
    report.summarize("correlation_grid", GridInfo::from(&correlation.grid));
    report.summarize("correlation_grid_mass", correlation.grid_mass);
    report.summarize("dual_path_density_deviation", dev.density);
    report.summarize("dual_path_coherence_deviation", dev.post_value);

    let mut outcome = Outcome::new(report);
    if dev.density > DUAL_PATH_TOL
        || dev.post_value > DUAL_PATH_TOL
        || !(dev.density.is_finite() && dev.post_value.is_finite())
    {
        outcome.failures.push(format!(
            "closed form and measurement-operator path disagree: density {:e}, coherence {:e} (tolerance {DUAL_PATH_TOL:e})",
            dev.density, dev.post_value
        ));
    }
    if !within(correlation.abs_error, CORRELATION_TOL) {
        outcome.failures.push(format!("correlation misses its closed form by {:e}", correlation.abs_error));
    }
    Ok(outcome)
}

pub fn quadrature(args: &QuadratureArgs) -> Result<Outcome, CliError> {
    let delta = resolution("--delta-x", args.delta_x)?;
    let policy = policy(args.tolerance)?;
    check_dim("--dim", args.dim, MIN_QUADRATURE_DIM)?;
    let grid = args.grid.map(|g| g.to_grid()).transpose()?;
    let default = QuadratureQnd::new(delta, args.dim, &policy)?;
    let setup = grid.map_or(default, |g| default.regridded(g));
    let warning = GaussianMeasurementF64::new(&FockOperatorF64::quadrature_x(args.dim)?, delta)?.conditioning_warning();

    let config = RunConfig::new("quadrature")
        .with("delta_x", args.delta_x)
        .with("dim", args.dim)
        .with("grid", args.grid)
        .with("tolerance", args.tolerance)
        .with("format", args.output.format);
    let mut meta = Metadata::new(config);
    meta.dims.insert("signal", args.dim);
    meta.grid = Some(GridInfo::from(setup.grid()));
    meta.tolerances.insert("dual_path", DUAL_PATH_TOL);
    meta.tolerances.insert("grid_mass", QUADRATURE_MASS_TOL);
    meta.tolerances.insert("correlation", CORRELATION_TOL);

    let mut report = Report::new(meta, vec!["x_m", "p_total", "p_total_over_16", "p1"]);
    for s in setup.curve() {
        report.push_row(vec![s.a_m.into(), s.density.into(), (s.density / 16.0).into(), s.post_value.re.into()]);
    }

    let dev = setup.dual_path_deviation()?;
    let stats = default.statistics()?;
    let (jump, field, back) = (stats.jump, stats.field_jump, stats.back_action);
    report.summarize("jump_probability_numeric", jump.numeric);
    report.summarize("jump_probability_closed", jump.closed_form);
    report.summarize("jump_probability_asymptote", jump.asymptote);
    report.summarize("jump_probability_asymptote_ratio", jump.asymptote_ratio());
    report.summarize("jump_density_peak", default.jump_peak());
    report.summarize("field_jump_covariance_closed", field.correlation.closed_form.re);
    report.summarize("field_jump_covariance_numeric", field.correlation.numeric.re);
    report.summarize("field_jump_covariance_abs_error", field.correlation.abs_error);
    report.summarize("field_jump_unsubtracted", field.unsubtracted);
    report.summarize("mean_square_outcome", field.mean_square_outcome);
    report.summarize("mean_photon_number_after", field.mean_photon_number);
    report.summarize("mean_photon_number_after_closed", field.mean_photon_number_closed);
    report.summarize("operator_side_covariance", operator_side_covariance::<f64>(args.dim)?);
    report.summarize("outcome_variance", back.outcome_variance);
    report.summarize("outcome_variance_closed", back.outcome_variance_closed);
    report.summarize("y_variance_after", back.y_variance_after);
    report.summarize("y_variance_after_closed", back.y_variance_after_closed);
    report.summarize("x_variance_after", back.x_variance_after);
    report.summarize("integration_grid", GridInfo::from(default.grid()));
    report.summarize("dual_path_density_deviation", dev.density);
    report.summarize("dual_path_jump_deviation", dev.post_value);

    let mut outcome = Outcome::new(report);
    outcome.warnings.extend(warning);
    if dev.density > DUAL_PATH_TOL
        || dev.post_value > DUAL_PATH_TOL
        || !(dev.density.is_finite() && dev.post_value.is_finite())
    {
        outcome.failures.push(format!(
            "closed form and measurement-operator path disagree: density {:e}, jump density {:e} (tolerance {DUAL_PATH_TOL:e})",
            dev.density, dev.post_value
        ));
    }
    if !within(field.correlation.abs_error, CORRELATION_TOL) {
        outcome.failures.push(format!("field–jump covariance misses 1/8 by {:e}", field.correlation.abs_error));
    }
    Ok(outcome)
}

pub fn sweep_correlation(args: &SweepArgs) -> Result<Outcome, CliError> {
    let policy = policy(args.tolerance)?;
    check_dim("--dim", args.dim, 2)?;
    let deltas = args.delta_n.values();
    for &d in &deltas {
        resolution("--delta-n", d)?;
    }
    let sweep = correlation_sweep(args.alpha, &deltas, args.dim, &policy)?;

    let config = RunConfig::new("sweep-correlation")
        .with("alpha", [args.alpha.re, args.alpha.im])
        .with("delta_n", args.delta_n)
        .with("dim", args.dim)
        .with("tolerance", args.tolerance)
        .with("format", args.output.format);
    let mut meta = Metadata::new(config);
    meta.dims.insert("signal", args.dim);
    meta.tolerances.insert("grid_mass", NUMBER_MASS_TOL);
    meta.tolerances.insert("correlation", CORRELATION_TOL);

    let complex = args.alpha.im != 0.0;
    let mut columns = vec!["delta_n", "c_closed", "c_numeric", "abs_err"];
    if complex {
        columns.extend(["c_closed_im", "c_numeric_im"]);
    }
    let mut report = Report::new(meta, columns);
    let mut worst = 0.0_f64;
    for (d, r) in deltas.iter().zip(&sweep.reports) {
        let mut row: Vec<Cell> = vec![(*d).into(), r.closed_form.re.into(), r.numeric.re.into(), r.abs_error.into()];
        if complex {
            row.extend([r.closed_form.im.into(), r.numeric.im.into()]);
        }
        report.push_row(row);
        worst = if r.abs_error.is_nan() { f64::NAN } else { worst.max(r.abs_error) };
    }
    report.summarize("argmax_delta_n", sweep.peak.argmax);
    report.summarize("peak_abs_c_over_abs_alpha", sweep.peak.peak_value);
    report.summarize("optimal_delta_n_closed", optimal_resolution::<f64>());
    report.summarize("interior_maxima", sweep.peak.interior_maxima);
    report.summarize("scan_interval", [sweep.peak.lo, sweep.peak.hi]);
    report.summarize("max_abs_err", worst);

    let mut outcome = Outcome::new(report);
    if !within(worst, CORRELATION_TOL) {
        outcome.failures.push(format!("grid-integrated correlation misses its closed form by up to {worst:e}"));
    }
    Ok(outcome)
}

fn check_report(meta: Metadata, checks: &[Check]) -> Outcome {
    let mut report = Report::new(meta, vec!["check", "observable", "value", "relation", "bound", "passed"]);
    let mut failures = Vec::new();
    for c in checks {
        report.push_row(vec![
            c.name.into(),
            c.observable.into(),
            c.value.into(),
            c.relation().into(),
            c.bound.into(),
            c.passed().into(),
        ]);
        if !c.passed() {
            failures.push(format!(
                "{} ({}) = {:e}, required {} {:e}",
                c.name,
                c.observable,
                c.value,
                c.relation(),
                c.bound
            ));
        }
    }
    report.summarize("checks", checks.len());
    report.summarize("failed", failures.len());
    Outcome { report, warnings: Vec::new(), failures }
}

fn sharp_warnings(delta_x: qnd_core::Resolution<f64>) -> Result<Vec<String>, CliError> {
    let x = FockOperatorF64::quadrature_x(MIN_QUADRATURE_DIM)?;
    Ok(GaussianMeasurementF64::new(&x, delta_x)?.conditioning_warning().into_iter().collect())
}

pub fn meter_check(args: &MeterArgs) -> Result<Outcome, CliError> {
    let delta_n = resolution("--delta-n", args.delta_n)?;
    let delta_x = resolution("--delta-x", args.delta_x)?;
    check_dim("--dim", args.dim, 2)?;
    check_dim("--meter-dim", args.meter_dim, qnd_core::meter::MIN_METER_DIM)?;
    let warnings = sharp_warnings(delta_x)?;
    let checks = checks::meter_checks(args.alpha, delta_n, delta_x, args.dim, args.meter_dim)?;

    let config = RunConfig::new("meter-check")
        .with("alpha", [args.alpha.re, args.alpha.im])
        .with("delta_n", args.delta_n)
        .with("delta_x", args.delta_x)
        .with("dim", args.dim)
        .with("meter_dim", args.meter_dim)
        .with("format", args.output.format);
    let mut meta = Metadata::new(config);
    meta.dims.insert("signal_number", args.dim);
    meta.dims.insert("signal_quadrature", MIN_QUADRATURE_DIM);
    meta.dims.insert("meter_initial", args.meter_dim);
    meta.tolerances.insert("pointer_overlap_min", checks::POINTER_OVERLAP_MIN);
    meta.tolerances.insert("pointer_total_variation", checks::POINTER_TV_TOL);
    meta.tolerances.insert("noise_overlap_min", checks::NOISE_OVERLAP_MIN);
    meta.tolerances.insert("noise_total_variation", checks::NOISE_TV_TOL);
    meta.tolerances.insert("central_tail", checks::CENTRAL_TAIL);
    let mut outcome = check_report(meta, &checks);
    outcome.warnings = warnings;
    Ok(outcome)
}

pub fn povm_check(args: &PovmArgs) -> Result<Outcome, CliError> {
    let delta_n = resolution("--delta-n", args.delta_n)?;
    let delta_x = resolution("--delta-x", args.delta_x)?;
    let policy = policy(args.tolerance)?;
    check_dim("--dim", args.dim, 2)?;
    let warnings = sharp_warnings(delta_x)?;
    let checks = checks::povm_checks(args.alpha, delta_n, delta_x, args.dim, &policy)?;

    let config = RunConfig::new("povm-check")
        .with("alpha", [args.alpha.re, args.alpha.im])
        .with("delta_n", args.delta_n)
        .with("delta_x", args.delta_x)
        .with("dim", args.dim)
        .with("tolerance", args.tolerance)
        .with("format", args.output.format);
    let mut meta = Metadata::new(config);
    meta.dims.insert("signal_number", args.dim);
    meta.dims.insert("signal_quadrature", MIN_QUADRATURE_DIM);
    meta.tolerances.insert("dual_path", DUAL_PATH_TOL);
    meta.tolerances.insert("completeness_number", checks::NUMBER_COMPLETENESS_TOL);
    meta.tolerances.insert("completeness_quadrature", checks::QUADRATURE_COMPLETENESS_TOL);
    let mut outcome = check_report(meta, &checks);
    outcome.warnings = warnings;
    Ok(outcome)
}
