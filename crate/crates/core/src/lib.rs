pub mod archimedean_cert;
pub mod ends;
pub mod error;
pub mod flag_system;
pub mod minimal_cover;
pub mod monodromy;
pub mod periodic_map;
pub mod word;

pub use error::{Error, Result};
