//! Two-factor spot electricity price model: a fractional Ornstein–Uhlenbeck
//! base component plus mean-reverting jumps driven by a marked Hawkes process.

pub mod error;
pub mod fgn;
pub mod forecast;
pub mod filter;
pub mod fou;
pub mod fracest;
pub mod gev;
pub mod hawkes;
pub mod metrics;
pub mod numeric;
pub mod optim;
pub mod rng;
pub mod series;
pub mod synthetic;

pub use error::{Error, Result};
