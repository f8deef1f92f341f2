use crate::error::{Error, Result};
use crate::numeric::{cabs, Real, C};

/// Piecewise-linear path through complex time, traversed in vertex order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPath<T> {
    vertices: Vec<C<T>>,
}

impl<T: Real> ComplexPath<T> {
    pub fn new(vertices: Vec<C<T>>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::Precondition("a path needs at least two vertices".into()));
        }
        if vertices.windows(2).any(|w| cabs(w[1] - w[0]).is_zero()) {
            return Err(Error::Precondition("consecutive path vertices coincide".into()));
        }
        Ok(ComplexPath { vertices })
    }

    /// Straight segment between two times.
    pub fn segment(a: C<T>, b: C<T>) -> Result<Self> {
        ComplexPath::new(vec![a, b])
    }

    /// Real segment `[a, b]`.
    pub fn real(a: T, b: T) -> Result<Self> {
        ComplexPath::segment(C::new(a, T::zero()), C::new(b, T::zero()))
    }

    pub fn vertices(&self) -> &[C<T>] {
        &self.vertices
    }

    pub fn start(&self) -> C<T> {
        self.vertices[0]
    }

    pub fn end(&self) -> C<T> {
        self.vertices[self.vertices.len() - 1]
    }

    pub fn segments(&self) -> impl Iterator<Item = (C<T>, C<T>)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> T {
        self.segments().fold(T::zero(), |acc, (a, b)| acc + cabs(b - a))
    }
}
