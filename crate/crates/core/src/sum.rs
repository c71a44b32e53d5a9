//! Compensated accumulation with a fixed reduction order.
//!
//! Every energy in the crate is a long sum of positive and cancelling terms.
//! Terms are accumulated with Neumaier's variant of Kahan summation, and
//! parallel work is always reduced row by row in index order, so a run with
//! one thread and a run with many threads produce bit-identical results.

use rayon::prelude::*;

use crate::scalar::Scalar;

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}

impl<T: Scalar> Extend<T> for CompensatedSum<T> {
    fn extend<I: IntoIterator<Item = T>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn compensated_sum<T: Scalar, I: IntoIterator<Item = T>>(iter: I) -> T {
    let mut acc = CompensatedSum::new();
    acc.extend(iter);
    acc.value()
}

/// Evaluates `row(k)` for `k in 0..rows` in parallel and reduces the row
/// results in index order with compensated summation.
pub fn ordered_par_sum<T, F>(rows: usize, row: F) -> T
where
    T: Scalar,
    F: Fn(usize) -> T + Sync + Send,
{
    let partial: Vec<T> = (0..rows).into_par_iter().map(row).collect();
    compensated_sum(partial)
}

/// Fallible variant of [`ordered_par_sum`]; the first error in index order
/// is reported.
pub fn try_ordered_par_sum<T, E, F>(rows: usize, row: F) -> Result<T, E>
where
    T: Scalar,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    let partial: Vec<Result<T, E>> = (0..rows).into_par_iter().map(row).collect();
    let mut acc = CompensatedSum::new();
    for p in partial {
        acc.add(p?);
    }
    Ok(acc.value())
}
