//! Uniform quantum Birkhoff normal form for a two-mode harmonic oscillator
//! with complex frequencies, together with the numerical checks of the
//! estimates that make it converge.

pub mod error;
pub mod freq;
pub mod oracle;
pub mod qnf;
pub mod stats;
pub mod suites;
pub mod symcalc;

pub use error::{Error, ErrorClass, Result};
pub use freq::{FrequencyPair, GammaParams};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
