pub mod cli;
pub mod composite;
pub mod error;
pub mod layers;
pub mod material;
pub mod oracle;
pub mod outer;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
