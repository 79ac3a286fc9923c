//! Deterministic floating-point reductions.
//!
//! Every reduction in the crate goes through a fixed combination tree so the
//! result does not depend on the number of worker threads: work is cut into
//! blocks of a fixed size, each block is summed with Neumaier compensation,
//! and the block partials are combined pairwise in index order.

use rayon::prelude::*;

/// Block length used when splitting a reduction across workers.
pub const BLOCK: usize = 256;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Pairwise (cascade) summation in index order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sum `term(i)` for `i in 0..len` with a thread-count independent result.
pub fn deterministic_sum<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let blocks = len.div_ceil(BLOCK);
    let partials: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(len);
            (start..end).map(&term).collect::<CompensatedSum>().value()
        })
        .collect();
    pairwise_sum(&partials)
}

/// Maximum of `term(i)`; `None` for an empty range.
pub fn deterministic_max<F>(len: usize, term: F) -> Option<f64>
where
    F: Fn(usize) -> f64 + Sync,
{
    (0..len)
        .into_par_iter()
        .map(|i| term(i))
        .reduce_with(f64::max)
}
