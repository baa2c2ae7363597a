//! Error-free floating point accumulation.
//!
//! Keeps a running sum as a list of non-overlapping partials (Shewchuk), so
//! two accumulators holding the same multiset of addends always round to the
//! same value and their difference is exactly zero.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_value(x: f64) -> Self {
        let mut s = Self::new();
        s.add(x);
        s
    }

    /// Adds `x` exactly. `x` must be finite.
    pub fn add(&mut self, mut x: f64) {
        debug_assert!(x.is_finite());
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        if x != 0.0 || self.partials.is_empty() {
            self.partials.push(x);
        }
    }

    pub fn add_sum(&mut self, other: &ExactSum) {
        for &x in &other.partials {
            self.add(x);
        }
    }

    pub fn sub_sum(&mut self, other: &ExactSum) {
        for &x in &other.partials {
            self.add(-x);
        }
    }

    pub fn partials(&self) -> &[f64] {
        &self.partials
    }

    pub fn is_zero(&self) -> bool {
        self.partials.iter().all(|&x| x == 0.0)
    }

    /// Correctly rounded value of the exact sum.
    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            lo = y - (hi - x);
            if lo != 0.0 {
                break;
            }
        }
        // half-way case: the remaining partials decide the rounding direction
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}
