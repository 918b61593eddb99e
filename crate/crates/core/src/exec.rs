//! Execution policy for batch work.
//!
//! Every batch kernel maps an index range to values and collects them in index
//! order; the caller then reduces sequentially. Results are therefore identical
//! under both policies. Without the `parallel` feature, `Exec::Parallel` runs
//! sequentially.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// `(lo..hi).map(f)` collected in order.
    pub fn map_range<T, F>(self, lo: usize, hi: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (lo..hi).into_par_iter().map(f).collect();
        }
        (lo..hi).map(f).collect()
    }

    /// `items.iter().map(f)` collected in order.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Applies `f` to consecutive chunks of `data` together with the chunk offset.
    pub fn for_chunks_mut<T, F>(self, data: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        let chunk = chunk.max(1);
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            data.par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, c)| f(i * chunk, c));
            return;
        }
        for (i, c) in data.chunks_mut(chunk).enumerate() {
            f(i * chunk, c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_policies_agree() {
        let f = |i: usize| (i as f64).sqrt();
        assert_eq!(
            Exec::Sequential.map_range(0, 1000, f),
            Exec::Parallel.map_range(0, 1000, f)
        );
        let mut a = vec![0u64; 1000];
        let mut b = vec![0u64; 1000];
        Exec::Sequential.for_chunks_mut(&mut a, 7, |o, c| {
            for (j, x) in c.iter_mut().enumerate() {
                *x = (o + j) as u64 * 3;
            }
        });
        Exec::Parallel.for_chunks_mut(&mut b, 7, |o, c| {
            for (j, x) in c.iter_mut().enumerate() {
                *x = (o + j) as u64 * 3;
            }
        });
        assert_eq!(a, b);
    }
}
