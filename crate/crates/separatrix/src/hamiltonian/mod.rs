//! Polynomial Hamiltonian families in `(x1, y1, x2, y2)`, their symplectic
//! structure, and the saddle-center equilibrium.

mod equilibrium;
mod model;
mod phase;

pub use equilibrium::{default_guess, find_equilibrium, EquilibriumData};
pub use model::{Exponents, PolyHamiltonian, CONSTANT_NAMES, CUBIC_MODEL, VARIABLE_NAMES};
pub use phase::PhasePoly;

use crate::numeric::{Real, C};

/// A point `(x1, y1, x2, y2)` with complex components.
pub type PhasePoint<T> = [C<T>; 4];

/// `Omega(u, w) = u_x1 w_y1 - u_y1 w_x1 + u_x2 w_y2 - u_y2 w_x2`.
pub fn symplectic_pair<T: Real>(u: &[C<T>], w: &[C<T>]) -> C<T> {
    u[0] * w[1] - u[1] * w[0] + u[2] * w[3] - u[3] * w[2]
}
