#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod exec;
pub mod fftensor;
pub mod groups;
pub mod rates;
mod serde_biguint;
mod serde_rational;
pub mod slicerank;
pub mod stpp;
pub mod sumfree;
