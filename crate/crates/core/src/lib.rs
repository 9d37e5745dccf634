pub mod error;
pub mod numerics;
pub mod special;
pub mod qdilog;
pub mod jones;
pub mod potential;
pub mod asymptotics;
pub mod slrep;

pub use error::{Error, Result};
pub use numerics::{Chp, ContourPath, Segment};
pub use rug;
pub use rug::{Complex, Float};
