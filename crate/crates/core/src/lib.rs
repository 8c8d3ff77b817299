//! Linear fractional self-maps of the unit ball of C^N and the spectra of
//! their composition operators on the Hardy space H^2(B_N).

pub mod classify;
pub mod error;
pub mod lfm;
pub mod linalg;
pub mod oracle;
pub mod spectra;
mod serde_util;
mod tolerance;

pub use error::{Error, Result};
pub use lfm::LinearFractionalMap;
pub use tolerance::Tolerances;
