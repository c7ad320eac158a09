pub mod bailey;
pub mod checks;
pub mod error;
pub mod identities;
pub mod lattice;
pub mod qtools;
pub mod report;
pub mod series;

pub use error::{Error, Result};
pub use report::{Status, VerificationReport};
pub use series::{int, rat, Exponent, LaurentSeries, Mismatch};
