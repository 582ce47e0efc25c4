//! Exact polyhedral engine for two-parameter families of horospherical
//! pseudo-moment polytopes.

pub mod error;
pub mod exactnum;
pub mod family;
pub mod horo;
pub mod mmp;
pub mod plane;
pub mod polytope;
pub mod projection;
pub mod sarkisov;

pub use error::{Error, Result};
