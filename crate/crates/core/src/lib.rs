pub mod celliptic;
pub mod corpus;
pub mod error;
pub mod exponents;
pub mod grid;
pub mod harness;
pub mod lift_staircase;
pub mod lift_truncation;
pub mod maximal;
pub mod norms;
pub mod poisson;
pub mod profiles;
pub mod reduce;

pub use error::{Error, Result};
