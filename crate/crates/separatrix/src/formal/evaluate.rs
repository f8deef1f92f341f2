use num_traits::Zero;

use super::separatrix::FormalSeparatrix;
use crate::error::{Error, Result};
use crate::hamiltonian::PhasePoint;
use crate::numeric::{Real, C};

/// Distance from `s` to the nearest pole `(2j+1) i pi` of the profiles.
pub fn pole_distance<T: Real>(s: C<T>) -> T {
    let pi = T::pi();
    let two_pi = pi + pi;
    // nearest odd multiple of pi on the imaginary axis
    let j = ((s.im - pi) / two_pi).round();
    let pole = pi + two_pi * j;
    let di = s.im - pole;
    (s.re * s.re + di * di).sqrt()
}

/// Partial sums `(x, y, 0, 0)` of the formal separatrix at time `t`,
/// refusing to evaluate within `margin` of a pole in `s = eps t`.
pub fn evaluate_formal<T: Real>(
    sep: &FormalSeparatrix,
    eps: T,
    t: C<T>,
    order: usize,
    margin: T,
) -> Result<PhasePoint<T>> {
    let s = t * C::new(eps, T::zero());
    if pole_distance(s) < margin {
        return Err(Error::Singularity { re: s.re.to_f64(), im: s.im.to_f64() });
    }
    let [x, xs, _] = sep.x_and_derivatives(eps, s, order.min(sep.order));
    Ok([x, xs * C::new(eps, T::zero()), C::zero(), C::zero()])
}
