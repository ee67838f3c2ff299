//! Joint quasiprobability (JQP) analysis for systems of up to three
//! spin-1/2 particles.
//!
//! The library computes JQP tables in symmetric operator ordering, applies a
//! two-part classicality criterion (non-negativity of the full
//! three-direction table, or of a table over two of the three prescribed
//! directions per spin), cross-checks separability with the Peres partial
//! transpose test, and locates critical parameter values of the studied
//! state families by bisection.
//!
//! Module map:
//! - [`linalg`]: dense complex matrix kernels (Kronecker, partial trace,
//!   partial transpose, Jacobi eigenvalues).
//! - [`spin`]: spin-1/2 component operators, frames, symmetric ordering.
//! - [`states`]: validated density matrices for the studied families.
//! - [`table`]: JQP tables, marginalization, extrema.
//! - [`classify`]: criterion stages, PPT check, threshold scans.
//! - [`report`]: request/report documents used by the CLI.

pub mod classify;
pub mod linalg;
pub mod report;
pub mod spin;
pub mod states;
pub mod table;
