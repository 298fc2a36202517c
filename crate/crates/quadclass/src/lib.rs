//! Class groups of imaginary quadratic fields and the counting machinery
//! around them: reduced binary quadratic forms and Gauss composition,
//! quadratic character sieves over prime windows, representation counts
//! for `4(pp')^g = u^2 + d v^2`, rank-2 lattice reduction and point
//! counting, and moment/exponent statistics for the g-part of class
//! numbers.
//!
//! The crate is organised as a library; `examples/` holds one runnable
//! program per major capability and the `quadclass` binary exposes the
//! same operations as subcommands (`classgroup`, `sweep`, `repcount`,
//! `tg`, `lattice`, `moments`, `verify`).

pub mod cli;
pub mod lattice;
pub mod moments;
pub mod quadforms;
pub mod repcount;
pub mod sieve;
pub mod verify;

pub(crate) mod arith;

mod error;
pub use error::{Error, Result};
