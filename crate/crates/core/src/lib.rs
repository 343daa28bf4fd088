pub mod bound;
pub mod cli;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod proposition;
pub mod protocol;
pub mod search;
pub mod special;

pub use error::{Error, Result};
