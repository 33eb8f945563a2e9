//! Closed characteristics, symplectic capacities and volumes for Hamiltonians
//! of classical-mechanics type, together with executable checks of Viterbo's
//! inequality `vol X >= c(X)^n / n!` for the families handled here:
//!
//! * [`bodies`]: Hamiltonian and norm descriptors, exact and Monte Carlo
//!   volumes, Legendre transforms of 2-homogeneous functions.
//! * [`quadratic`]: linear Hamiltonian flows, symplectic frequencies,
//!   ellipsoid capacities and the ellipsoid-inside-the-body arguments for
//!   `T(p) + V(q)` Hamiltonians.
//! * [`pl_flow`]: an exact event-driven integrator for
//!   `H = |p|_1^2 + |q|_inf^2`, turning-point angle sequences and the
//!   explicit closed trajectories of that Hamiltonian.
//! * [`profiles`]: action/energy profiles of one-degree-of-freedom systems and
//!   the minimal critical action of their direct sums.
//! * [`verify`]: Viterbo reports, the inequality chain, configuration
//!   documents, report pipelines and figure data.
//!
//! Sampling-heavy loops run on rayon when the `parallel` feature is enabled;
//! every such loop has a sequential path producing bit-identical results.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bodies;
pub mod error;
pub mod exec;
pub mod pl_flow;
pub mod profiles;
pub mod quadratic;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
