//! Orthonormal cardinal B-spline scaling functions and wavelets.

pub mod bspline;
pub mod coefficients;
pub mod error;
pub mod euler_frobenius;
pub mod numeric;
pub mod transform;
pub mod wavelet_system;

/// Library version, part of every cache key.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use bspline::SplineOrder;
pub use coefficients::{CoefficientKind, CoefficientTable, RecurrenceLimits, TableMethod};
pub use error::{Error, Result, Stage};
pub use euler_frobenius::EFSpectrum;
pub use transform::{derive_filters, dwt_analyze, dwt_synthesize, DwtResult, FilterPair};
pub use wavelet_system::{
    asymptotic_profile, build_system, verify, AsymptoticProfile, BuildOptions, CoefficientMode, VerificationReport,
    WaveletSystem,
};
