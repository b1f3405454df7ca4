pub mod error;
pub mod fields;
pub mod forest;
pub mod harness;
pub mod hopf;
pub mod linalg;
pub mod path;
pub mod rde;
pub mod realize;
pub mod scalar;
pub mod words;

pub use error::{Error, Result};
