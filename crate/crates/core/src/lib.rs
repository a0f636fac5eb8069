//! Exact hermitian lattices over the unramified quadratic extension of Q_p, the
//! vertex complex of the associated Bruhat-Tits building, and supports of
//! special cycles inside it.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod algorithm;
pub mod building;
pub mod cycles;
pub mod error;
pub mod lattices;
pub mod oracle;
mod par;
pub mod scalars;

pub use error::{Error, Result};
