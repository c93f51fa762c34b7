//! A laboratory for a linear authentication code used with network-coded
//! multicast, and for the linear attacks that defeat it.
//!
//! * [`field`]: F_q and F_{q^l} arithmetic, Frobenius, coordinate isomorphism.
//! * [`linalg`]: matrices over those fields, elimination and solution counts.
//! * [`auth`]: key generation, tagging, verification, packet combination.
//! * [`net`]: DAG multicast simulation with local/global encoding kernels.
//! * [`attack`]: affine forgery, pollution, and the coalition key-recovery system.
//! * [`scenario`]: config-driven experiments and deterministic reports.

pub mod attack;
pub mod auth;
pub mod error;
pub mod field;
pub mod linalg;
pub mod net;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
pub use field::{ExtField, Fel};
pub use linalg::Matrix;
