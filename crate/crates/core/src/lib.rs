//! Numerical toolkit for linear q-difference opers: apparent-singularity
//! criteria, Birkhoff canonical solutions and connection matrices, Bethe-ansatz
//! oper construction and counting for quantum toroidal gl2 (and its gln
//! generalization), and the q->1 differential limit.
//!
//! The crate is organized in layers:
//!
//! * [`numkernel`] - complex polynomial / rational-function arithmetic, root
//!   finding, small dense linear algebra, q-special functions.
//! * [`qoper`] - scalar q-difference operators, companion systems, the
//!   t_k^(m) minor calculus and all apparent-singularity criteria.
//! * [`connection`] - canonical series solutions at 0/infinity, meromorphic
//!   continuation, connection matrices, and the q-hypergeometric
//!   theta-quotient verification.
//! * [`bethe_gl2`] - toroidal gl2 Bethe systems, oper construction from Bethe
//!   roots, relaxed opers and solution counting, unfolded/lambda-oper checks.
//! * [`bethe_gln`] - rank-n Miura factors, oper assembly, apparent-point and
//!   counting reports.
//! * [`cl_limit`] - the q->1 limit of second-order opers and the no-log
//!   condition.

pub mod bethe_gl2;
pub mod bethe_gln;
pub mod cl_limit;
pub mod connection;
pub mod error;
pub mod numkernel;
pub mod qoper;
pub mod schema;

#[doc(hidden)]
pub mod testkit;

pub use error::{Error, Result};

/// Shorthand used across the crate for double-precision complex scalars.
pub type C64 = num_complex::Complex64;
