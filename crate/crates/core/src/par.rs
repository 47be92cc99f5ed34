//! Data-parallel mapping with a sequential fallback.
//!
//! With the `parallel` feature (on by default) [`map`] distributes work over
//! the rayon pool; without it, it is [`map_sequential`]. Results are always
//! returned in input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Whether [`map`] runs on the rayon pool in this build.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_sequential(items, f)
}

pub fn map_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let squares = map(&items, |x| x * x);
        assert_eq!(squares, map_sequential(&items, |x| x * x));
        assert_eq!(squares[999], 999 * 999);
    }
}
