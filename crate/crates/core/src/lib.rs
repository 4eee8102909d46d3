pub mod cq_state;
pub mod error;
pub mod examples;
pub mod finite_field;
pub mod projection;
pub mod quantum;
pub mod rate_region;
pub mod sim;

pub use error::{Error, Result};
