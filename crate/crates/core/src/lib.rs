//! Steklov and mixed Steklov-Neumann spectra of warped products `B ×_h F`.
//!
//! The spectrum of the warped product is assembled from one-dimensional
//! drift-Laplacian Dirichlet-to-Neumann problems on a collar base
//! `Σ × [0, ℓ]`, one per pair of fiber eigenvalue λ and cross-section mode μ.
//! A direct two-dimensional finite-difference solver for surfaces of
//! revolution provides an independent check of that reduction.
//!
//! Module map:
//!
//! * [`spectra_closed`]: exact spectra of the closed manifolds used as fibers and cross-sections.
//! * [`warp_profile`]: plateau warping functions and warped metric descriptions.
//! * [`eigencore`]: dense/banded symmetric linear algebra and Schur complements.
//! * [`sturm_dtn`]: weighted 1D Dirichlet-to-Neumann problems on the base.
//! * [`warped_assembler`]: union over fiber eigenvalues, σ₁ of the volume-preserving construction.
//! * [`direct_oracle`]: tensor-grid solver for `[0, L] ×_h S¹`.
//! * [`experiments`]: sweeps, bound checks, configs, CSV and the acceptance suite.

pub mod direct_oracle;
pub mod eigencore;
mod error;
pub mod experiments;
mod par;
pub mod spectra_closed;
pub mod spectrum;
pub mod sturm_dtn;
pub mod warp_profile;
pub mod warped_assembler;

pub use error::{Error, Result};
pub use spectra_closed::ClosedSpectrum;
pub use spectrum::{Source, SpectrumEntry, SpectrumWithProvenance};
pub use sturm_dtn::{BaseGeometry, EndCondition, Mesh, MeshSpec, SturmProblem};
pub use warp_profile::{MetricMode, Warp, WarpProfile, WarpedMetricSpec};
