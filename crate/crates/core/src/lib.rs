//! Compile semilinear functions into chemical reaction networks, simulate
//! them under stochastic mass-action kinetics, and certify stable
//! computation by exhaustive reachability.

pub mod bench;
pub mod cli;
pub mod compiler;
pub mod crn;
pub mod format;
pub mod kinetics;
pub mod semilinear;
pub mod verifier;
