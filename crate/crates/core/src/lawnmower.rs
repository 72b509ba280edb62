//! Deterministic sweep of every configuration, one unit rotation per step.

use serde::Serialize;

use crate::error::Result;
use crate::torus::{CodePoint, Move, SearchSpace};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lawnmower {
    pub n: u128,
    /// Expected steps to the target from a uniform start, `(N - 1)/2`.
    pub mean: f64,
}

/// Baseline statistics; needs an exact `N`.
pub fn lawnmower_stats(space: &SearchSpace) -> Result<Lawnmower> {
    let n = space.n_exact()?;
    // (N - 1)/2 is exact in f64 whenever N - 1 is.
    let mean = (n - 1) as f64 / 2.0;
    Ok(Lawnmower { n, mean })
}

impl Lawnmower {
    /// Probability the target is still unfound after step `n`:
    /// `1 - (n+1)/N` for `n < N`, zero afterwards.
    pub fn survival(&self, n: u128) -> f64 {
        if n + 1 >= self.n {
            0.0
        } else {
            1.0 - (n + 1) as f64 / self.n as f64
        }
    }

    /// The sweep from `start`, visiting all `N` configurations.
    pub fn sweep(&self, space: &SearchSpace, start: CodePoint) -> Sweep {
        Sweep {
            q: space.q(),
            m: space.m(),
            n: self.n,
            step: 0,
            current: Some(start),
        }
    }
}

/// Odometer-style sweep: the fastest disc is the last digit; after every
/// full turn the next slower disc advances by one. Each step is a single
/// `+1` rotation of one disc.
#[derive(Debug, Clone)]
pub struct Sweep {
    q: usize,
    m: usize,
    n: u128,
    step: u128,
    current: Option<CodePoint>,
}

impl Sweep {
    /// Disc rotated between step `s` and `s + 1`: the number of trailing
    /// zero base-`Q` digits of `s + 1`, counted from the fast end.
    fn disc_for(&self, s: u128) -> usize {
        let mut x = s + 1;
        let mut k = 0;
        while x % self.q as u128 == 0 && k + 1 < self.m {
            x /= self.q as u128;
            k += 1;
        }
        self.m - 1 - k
    }
}

impl Iterator for Sweep {
    type Item = CodePoint;

    fn next(&mut self) -> Option<CodePoint> {
        let out = self.current.take()?;
        if self.step + 1 < self.n {
            let mut next = out.clone();
            next.apply(
                Move {
                    axis: self.disc_for(self.step),
                    delta: 1,
                },
                self.q,
            );
            self.current = Some(next);
        }
        self.step += 1;
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn means_are_exact() {
        for (q, m, want) in [(3, 2, 4.0), (4, 2, 7.5), (10, 6, 499_999.5)] {
            let s = SearchSpace::new(q, m, 1).unwrap();
            assert_eq!(lawnmower_stats(&s).unwrap().mean, want);
        }
    }

    #[test]
    fn survival_closure() {
        let lm = lawnmower_stats(&SearchSpace::new(4, 2, 1).unwrap()).unwrap();
        assert_eq!(lm.survival(0), 1.0 - 1.0 / 16.0);
        assert_eq!(lm.survival(15), 0.0);
        assert_eq!(lm.survival(14), 1.0 / 16.0);
        assert_eq!(lm.survival(100), 0.0);
        let total: f64 = (0..16).map(|n| lm.survival(n)).sum();
        assert_eq!(total, lm.mean);
    }

    #[test]
    fn sweep_is_a_hamiltonian_path() {
        for (q, m) in [(3, 2), (5, 3), (4, 1)] {
            let s = SearchSpace::new(q, m, 1).unwrap();
            let lm = lawnmower_stats(&s).unwrap();
            let start = CodePoint::from_index(&s, 7 % lm.n);
            let path: Vec<CodePoint> = lm.sweep(&s, start).collect();
            assert_eq!(path.len() as u128, lm.n);
            let unique: HashSet<_> = path.iter().collect();
            assert_eq!(unique.len() as u128, lm.n);
            for w in path.windows(2) {
                let changed: Vec<usize> = (0..s.m())
                    .filter(|&i| w[0].digits()[i] != w[1].digits()[i])
                    .collect();
                assert_eq!(changed.len(), 1);
                let i = changed[0];
                assert_eq!(w[1].digits()[i], (w[0].digits()[i] + 1) % s.q());
            }
        }
    }

    #[test]
    fn sweep_hit_times_are_uniform() {
        // Over all starts, the target is hit at each step 0..N-1 exactly once.
        let s = SearchSpace::new(3, 2, 1).unwrap();
        let lm = lawnmower_stats(&s).unwrap();
        let target = CodePoint::origin(&s);
        let mut times: Vec<usize> = (0..lm.n)
            .map(|i| {
                lm.sweep(&s, CodePoint::from_index(&s, i))
                    .position(|p| p == target)
                    .unwrap()
            })
            .collect();
        times.sort();
        assert_eq!(times, (0..9).collect::<Vec<_>>());
    }
}
