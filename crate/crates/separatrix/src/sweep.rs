//! Data-parallel maps over independent jobs, with a sequential fallback when
//! the `parallel` feature is off. Output order always follows input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f` to every item, in parallel when enabled.
#[cfg(feature = "parallel")]
pub fn map<I, O, F>(items: Vec<I>, f: F) -> Vec<O>
where
    I: Send,
    O: Send,
    F: Fn(I) -> O + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<I, O, F>(items: Vec<I>, f: F) -> Vec<O>
where
    F: Fn(I) -> O,
{
    items.into_iter().map(f).collect()
}

/// Sequential map, for benchmarks and for callers that already run in a pool.
pub fn map_sequential<I, O, F: Fn(I) -> O>(items: Vec<I>, f: F) -> Vec<O> {
    items.into_iter().map(f).collect()
}

/// Run two closures, concurrently when enabled.
#[cfg(feature = "parallel")]
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    rayon::join(a, b)
}

#[cfg(not(feature = "parallel"))]
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA,
    B: FnOnce() -> RB,
{
    (a(), b())
}

/// Build a pool with `jobs` threads and run `f` inside it; `None` keeps the global pool.
#[cfg(feature = "parallel")]
pub fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match jobs {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_jobs<R>(_jobs: Option<usize>, f: impl FnOnce() -> R) -> R {
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let v: Vec<u64> = (0..100).collect();
        let a = map(v.clone(), |x| x * x);
        let b = map_sequential(v, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(with_jobs(Some(2), || join(|| 1, || 2)), (1, 2));
    }
}
