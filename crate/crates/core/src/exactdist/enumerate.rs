//! Revolving-door enumeration of `k`-subsets of `{0, …, n-1}`.
//!
//! Consecutive subsets differ by exactly one element leaving and one
//! entering, so a running subset sum costs O(1) per step.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub struct RevolvingDoor {
    // c[1..=k] hold the current subset, c[k+1] = n is a sentinel; c[0] unused.
    c: Vec<usize>,
    k: usize,
    done: bool,
}

impl RevolvingDoor {
    /// Starts at `{0, …, k-1}`. `k = 0` or `k = n` yield a single subset.
    pub fn new(n: usize, k: usize) -> Self {
        assert!(k <= n, "cannot choose {k} of {n}");
        let mut c = vec![0; k + 2];
        for (j, slot) in c.iter_mut().enumerate().take(k + 1).skip(1) {
            *slot = j - 1;
        }
        c[k + 1] = n;
        Self { c, k, done: k == 0 || k == n }
    }

    pub fn current(&self) -> &[usize] {
        &self.c[1..=self.k]
    }

    fn swap(&self, old: [usize; 2], new: [usize; 2]) -> (usize, usize) {
        let out = if new.contains(&old[0]) { old[1] } else { old[0] };
        let into = if old.contains(&new[0]) { new[1] } else { new[0] };
        (out, into)
    }
}

impl Iterator for RevolvingDoor {
    /// `(leaving, entering)` element pair.
    type Item = (usize, usize);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let k = self.k;
        let c = &mut self.c;

        let mut try_decrease;
        if k % 2 == 1 {
            if c[1] + 1 < c[2] {
                c[1] += 1;
                return Some((c[1] - 1, c[1]));
            }
            try_decrease = true;
        } else {
            if c[1] > 0 {
                c[1] -= 1;
                return Some((c[1] + 1, c[1]));
            }
            try_decrease = false;
        }

        let mut j = 2;
        loop {
            if j > k {
                self.done = true;
                return None;
            }
            if try_decrease {
                if c[j] >= j {
                    let old = [c[j - 1], c[j]];
                    c[j] = c[j - 1];
                    c[j - 1] = j - 2;
                    let new = [c[j - 1], c[j]];
                    return Some(self.swap(old, new));
                }
            } else if c[j] + 1 < c[j + 1] {
                let old = [c[j - 1], c[j]];
                c[j - 1] = c[j];
                c[j] += 1;
                let new = [c[j - 1], c[j]];
                return Some(self.swap(old, new));
            }
            j += 1;
            try_decrease = !try_decrease;
        }
    }
}
