//! Exact computations for the erasing substitution `rho` on binary words and
//! the interval map it induces on `[0,1]`.

pub mod error;
pub mod fibers;
pub mod geometry;
pub mod lazy;
pub mod periodic;
pub mod rational;
pub mod real_map;
pub mod special;
pub mod substitution;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
