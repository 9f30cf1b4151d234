//! Jump-phenomenon analysis of the forced asymmetric Duffing oscillator
//!
//! ```text
//! y'' + 2 zeta y' + gamma y^3 = F0 + F cos(Omega t)
//! ```
//!
//! The crate derives the steady-state polynomial f(Omega, A0) and the jump
//! polynomial J(A0) exactly, locates vertical tangencies of the response
//! curve, finds the parameter values where their number changes, and checks
//! the predictions against direct time integration.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod interval;
pub mod jump;
pub mod output;
pub mod poly;
pub mod signed;
pub mod sim;
pub mod singular;
pub mod steady;

pub use error::{Error, Result};
pub use interval::Interval;
pub use signed::SignedLog;
