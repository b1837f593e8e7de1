//! Weighted Lovász theta for non-commutative graphs.

pub mod cstar;
pub mod error;
pub mod io;
pub mod linalg;
pub mod random;
pub mod sdp;
pub mod subspace;
pub mod theta;
pub mod verify;

pub use cstar::{complement, S0Algebra};
pub use error::{Error, Result};
pub use linalg::{CMat, CVec, C64};
pub use sdp::{SdpOptions, SdpStatus};
pub use subspace::{NcGraph, OperatorSubspace};
pub use theta::{theta, theta_dual, Form, ThetaResult, WeightMatrix};
pub use verify::{run_suite, Suite, SuiteReport, VerifyConfig};
