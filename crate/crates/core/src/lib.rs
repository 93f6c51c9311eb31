pub mod acceptance;
pub mod error;
pub mod grid;
pub mod hilbert;
pub mod john;
pub mod lorentz;
pub mod lp;
pub mod scalar;
pub mod snumbers;
pub mod step;
pub mod volterra;
pub mod zigzag;

pub use error::{Result, SnumError};
