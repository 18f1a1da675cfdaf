pub mod contact;
pub mod curvature;
pub mod error;
pub mod kernel;
pub mod soliton;
pub mod tensor;
pub mod verdict;
pub mod workbench;

pub use error::{Error, Result};
