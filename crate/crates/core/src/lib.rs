//! Explicit simplicial, equivariant and moduli-space forms on products of `SU(N)`.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod form;
pub mod lie;
pub mod moduli;
pub mod quadrature;
pub mod simplicial;
pub mod word;

pub use error::{Error, Result};
