//! Eigenvalue condition numbers (phase rigidity, Petermann factor) of
//! non-Hermitian matrices, computed through the adjugate reformulation
//! `r_i = p'(omega_i) / A_i`, together with exceptional-point analysis:
//! quasi-degenerate clustering, Schur normal forms, asymptotic rigidity
//! predictions, equipartition checks, and first-order secular shifts.

pub mod adjugate;
pub mod charpoly;
pub mod ep;
pub mod error;
pub mod linalg;
pub mod models;
pub mod oracle;
pub mod spectral;

pub use error::Error;
pub use linalg::{Matrix, Vector, C64};
