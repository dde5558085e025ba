//! Order-preserving maps over independent evaluation points.
//!
//! With the `parallel` feature the work is spread over the current rayon
//! pool; without it the same closures run sequentially. Either way the
//! output order matches the input order, and each item is computed by the
//! same code, so results do not depend on the thread count.

use crate::error::Result;

#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Like [`map`], always single-threaded.
pub fn map_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Fallible [`map`]; the reported error is the first one in input order.
pub fn try_map<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    map(items, f).into_iter().collect()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn keeps_input_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let ys = map(&xs, |x| x * x);
        assert_eq!(ys, map_sequential(&xs, |x| x * x));
    }

    #[test]
    fn first_error_in_order_wins() {
        let xs: Vec<i32> = (0..100).collect();
        let r = try_map(&xs, |&x| {
            if x % 30 == 29 {
                Err(Error::Domain(format!("{x}")))
            } else {
                Ok(x)
            }
        });
        assert_eq!(r, Err(Error::Domain("29".into())));
    }
}
