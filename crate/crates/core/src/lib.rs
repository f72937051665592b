//! Achievable rate regions of two-user Gaussian broadcast and
//! multiple-access channels with finite QAM inputs and low-resolution
//! (b-bit) receiver quantization.
//!
//! The quantized channel is treated exactly as a discrete memoryless channel:
//! [`dmc`] integrates the Gaussian noise over quantizer cells and
//! [`infotheory`] turns the transition table into mutual informations.
//! [`qbc`] and [`qmac`] assemble those into rate regions, [`search`] tunes
//! the power-law quantizer, and [`baselines`] provides the unquantized
//! references.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cli;
pub mod dmc;
pub mod error;
pub mod experiments;
pub mod infotheory;
pub mod qbc;
pub mod qmac;
pub mod quantizer;
pub mod region;
pub mod report;
pub mod search;
pub mod signals;

pub use error::{Error, Result};
pub use num_complex::Complex64;
