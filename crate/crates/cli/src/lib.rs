//! Command-line front end of the `lowdeg` library: point-set input, result
//! files, certificates, Jacobian self-checks and plot data.

pub mod certify;
pub mod error;
pub mod fit;
pub mod io;
pub mod jacobian;
pub mod plot;
