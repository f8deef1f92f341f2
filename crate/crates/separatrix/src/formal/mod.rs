//! Exact-rational formal series for the separatrix, the angle, the
//! variational solutions and their re-expansion at the complex singularity.

mod angle;
mod evaluate;
mod laurent;
mod separatrix;
mod xi;
mod zpoly;

pub use evaluate::{evaluate_formal, pole_distance};
pub(crate) use laurent::z_laurent;
pub use laurent::{derivative, eval_laurent, reexpand_at_singularity, Laurent, LaurentExpansion};
pub use separatrix::{
    check_potential, formal_separatrix, formal_separatrix_with, z_of, zprime, CoeffTable, Elimination,
    FormalSeparatrix,
};
pub use angle::{eval_odd_profile, formal_u, integrate_odd_profile, sech_power_integral, FormalU};
pub use xi::{formal_xi2, formal_xi4, FormalXi2, FormalXi4, Xi4Term};
pub use zpoly::{EpsSeries, PowerSeries, ZPoly};
