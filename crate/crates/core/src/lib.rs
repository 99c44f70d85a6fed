//! Quaternionic Ginibre matrices and their right spectra.
//!
//! The crate samples Gaussian quaternionic matrices, computes the complex
//! right eigenvalues through the complex adjoint, samples the associated
//! conjugate-symmetric log-gas, evaluates logarithmic potentials in closed
//! form and by quadrature, and tests the limiting laws with KS statistics.

pub mod cmatrix;
pub mod eig;
pub mod error;
pub mod loggas;
pub mod matrix_model;
pub mod potential_theory;
pub mod quadrature;
pub mod quaternion;
pub mod rng;
pub mod spectral_stats;
pub mod verify;

pub use cmatrix::ComplexMatrix;
pub use eig::{eigenvalues, pair_spectrum, right_spectrum, sample_spectra, SpectrumSample};
pub use error::{Error, Result};
pub use loggas::{GasState, McmcConfig, McmcRun, McmcSummary, Potential};
pub use matrix_model::{complex_adjoint, sample_ginibre_quaternion, ComplexAdjoint, EnsembleConfig, QuaternionMatrix};
pub use num_complex::Complex64;
pub use potential_theory::{CircleMeasureDensity, DiscreteMeasure};
pub use quaternion::Quaternion;
pub use rng::RandomStream;
pub use spectral_stats::{ClassSample, EmpiricalMeasure, KsReport};
pub use verify::CriterionReport;
