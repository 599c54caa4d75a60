//! Compactly supported cone-adapted shearlet frames.
//!
//! * [`filter_design`]: maximally flat low-pass filters, spectral factorization and decay constants.
//! * [`scaling_function`]: the refinable scaling function in frequency and time.
//! * [`frame_certification`]: explicit lower and upper frame bounds.
//! * [`shearlet_transform`]: the digital transform on the periodic square.
//! * [`cartoon_bench`]: cartoon-like test images and N-term approximation rates.

// `!(x > y)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cartoon_bench;
pub mod error;
pub mod extended;
pub mod filter_design;
pub mod frame_certification;
pub mod scaling_function;
pub mod shearlet_transform;

pub use error::{ConeletError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
