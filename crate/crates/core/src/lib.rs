//! Eigenvalue-sum bounds for the polyharmonic Dirichlet operator and the
//! higher-order Stokes operator, with the exact and finite-difference spectra
//! and property checks needed to test them.

// index loops read naturally in the matrix kernels; negated float comparisons also reject NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod eigen;
pub mod error;
pub mod geometry;
pub mod lemmas;
pub mod numeric;
pub mod report;
pub mod spectra;

pub use error::{BoundError, EigenError, GeometryError, LemmaError, ReportError, SpectrumError};
pub use geometry::{summarize, Domain, GeometrySummary, RearrangementConstants, Shape};
pub use spectra::{Method, Operator, Spectrum, SpectrumSums};
