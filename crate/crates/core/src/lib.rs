//! Distances and fidelities between ensembles of quantum states.
//!
//! Two families of measures are provided. The Kantorovich measures are
//! optimal-transport values with the trace distance or the square-root
//! fidelity as ground cost, solved exactly as transportation programs. The
//! extended-Hilbert-space (EHS) measures compare ensembles through their
//! block-diagonal pointer representations and reduce to small convex
//! programs over pairs of marginal-constrained joint tables.
//!
//! Generalized measurements and POVMs are compared through the ensembles
//! they produce, either on a maximally entangled probe or in the worst case.
//!
//! The [`oracle`] module holds brute-force and Monte Carlo checkers used by
//! the test suites.

pub mod channels;
pub mod ehs;
pub mod ensembles;
mod error;
pub mod kantorovich;
pub mod linalg;
mod lp;
pub mod oracle;

pub use error::{Error, Result};
pub use num_complex::Complex64;
