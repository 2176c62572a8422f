//! Grunsky coefficients and Grunsky norms of normalized univalent functions,
//! the abelian-differential supremum of a Beltrami coefficient, and a
//! verification harness comparing the two along Teichmüller disks.
//!
//! The crate is organised bottom-up:
//!
//! * [`series`]: truncated univariate and bivariate power series.
//! * [`grunsky`]: Grunsky coefficients, the weighted Grunsky matrix and its norm.
//! * [`takagi`]: the largest singular value of a complex symmetric matrix
//!   together with an attaining unit vector.
//! * [`quadrature`]: Gauss–Legendre and polar quadrature on the unit disk.
//! * [`abelian`]: Beltrami coefficients, their moments, and the abelian supremum.
//! * [`families`]: the closed-form catalog of maps with known extensions.
//! * [`verify`]: sandwich, Golusin, metric and Fredholm checks.
//! * [`io`]: the JSON coefficient file format.

pub mod abelian;
pub mod error;
pub mod families;
pub mod grunsky;
pub mod io;
pub mod quadrature;
pub mod series;
pub mod takagi;
pub mod verify;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Default truncation ladder for Grunsky norms.
pub const DEFAULT_LADDER: [usize; 6] = [2, 4, 8, 16, 32, 48];

/// Default grid of disk parameters `r` used by the verification harness.
pub const DEFAULT_RADII: [f64; 8] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];
