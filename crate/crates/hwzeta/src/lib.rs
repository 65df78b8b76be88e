//! Generalized Hasse-Witt matrices of projective hypersurfaces over
//! finite fields, and verification of the associated mod-p zeta
//! congruences against an independent point-counting oracle.
//!
//! Module layout:
//! - [`field`]: exact arithmetic in F_{p^m} and field embeddings;
//! - [`instance`]: the hypersurface instance format and validation;
//! - [`lattice`]: lattice-point combinatorics (U^I_min, nu-solutions,
//!   relation lattices);
//! - [`poly`]: sparse multivariate polynomials over F_p;
//! - [`hwmatrix`]: symbolic and evaluated Hasse-Witt matrices,
//!   Frobenius products and det(I - tM);
//! - [`zeta`]: point counting, zeta/P series, rescaling and reduction;
//! - [`verify`]: theorem-level checkers (congruences, hypergeometric
//!   annihilation, generic invertibility);
//! - [`battery`]: the seeded randomized acceptance battery.

pub mod battery;
pub mod error;
pub mod field;
pub mod hwmatrix;
pub mod instance;
pub mod lattice;
pub mod poly;
pub mod verify;
pub mod zeta;

pub use error::{Error, Result};
