//! Finite-resolution quantum nondemolition measurements on a single bosonic
//! mode.
//!
//! States and operators live on a truncated number basis ([`fock`]). A
//! measurement of resolution δ is the Gaussian operator
//! `P(a) = (2πδ²)^{-1/4} exp(−(Â − a)²/(4δ²))` ([`povm`]), which is also
//! derived from first principles by coupling the signal to a meter mode and
//! reading the meter out ([`meter`]). [`experiments`] evaluates the
//! photon-number and quadrature measurements both in closed form and along
//! the matrix path.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar for the common cases.
//!
//! ```
//! use qnd_core::{FockStateF64, GaussianMeasurementF64, FockOperatorF64, Resolution};
//! use num_complex::Complex64;
//!
//! let state = FockStateF64::coherent(Complex64::new(3.0, 0.0), 64).unwrap();
//! let n = FockOperatorF64::number(64).unwrap();
//! let m = GaussianMeasurementF64::new(&n, Resolution::new(0.3).unwrap()).unwrap();
//! let p = m.outcome_density(&state, 9.0).unwrap();
//! assert!(p > 0.1);
//! ```

pub mod error;
pub mod experiments;
pub mod fock;
pub mod meter;
pub mod poisson;
pub mod povm;
pub mod scalar;

pub use error::{QndError, Result};
pub use experiments::{
    correlation_sweep, dephasing_factor, phase_noise, quantization, CorrelationReport, CorrelationSweep, CurveSample,
    PhotonNumberQnd, QuadratureQnd,
};
pub use fock::{eigh, make_coherent, make_vacuum, EigenDecomposition, FockOperator, FockState};
pub use meter::{couple, readout_noise, readout_pointer, JointState, MeterConfig};
pub use povm::{GaussianMeasurement, GridPolicy, OutcomeGrid, Resolution};
pub use scalar::{Cplx, Real};

pub type FockStateF64 = FockState<f64>;
pub type FockStateF32 = FockState<f32>;
pub type FockOperatorF64 = FockOperator<f64>;
pub type FockOperatorF32 = FockOperator<f32>;
pub type EigenDecompositionF64 = EigenDecomposition<f64>;
pub type EigenDecompositionF32 = EigenDecomposition<f32>;
pub type ResolutionF64 = Resolution<f64>;
pub type ResolutionF32 = Resolution<f32>;
pub type OutcomeGridF64 = OutcomeGrid<f64>;
pub type OutcomeGridF32 = OutcomeGrid<f32>;
pub type GaussianMeasurementF64 = GaussianMeasurement<f64>;
pub type GaussianMeasurementF32 = GaussianMeasurement<f32>;
pub type JointStateF64 = JointState<f64>;
pub type JointStateF32 = JointState<f32>;
pub type MeterConfigF64 = MeterConfig<f64>;
pub type MeterConfigF32 = MeterConfig<f32>;
pub type PhotonNumberQndF64 = PhotonNumberQnd<f64>;
pub type QuadratureQndF64 = QuadratureQnd<f64>;
pub type CorrelationReportF64 = CorrelationReport<f64>;
