pub mod error;
pub mod formal;
pub mod hamiltonian;
pub mod manifolds;
pub mod melnikov;
pub mod numeric;
pub mod ode;
pub mod stokes;
pub mod sweep;

pub use error::{Error, Result};
