//! Discrete approximations of pushforward measures with certified
//! Wasserstein error bounds.

pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod experiments;
mod extfloat;
pub mod funcmodel;
pub mod measures;
pub mod quantize;
pub mod validate;

pub use error::{Error, Result};
