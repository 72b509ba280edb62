//! The periodic code torus `{0..Q-1}^M`, its step set, and the Fourier
//! spectrum of the single-step operator.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::budget::Budgets;
use crate::error::{Error, Result};

/// Parameters of the search space: alphabet size `q`, word length `m`,
/// and maximum step magnitude `l`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchSpace {
    q: usize,
    m: usize,
    l: usize,
    #[serde(rename = "n")]
    n_exact: Option<u128>,
    #[serde(skip)]
    n_float: f64,
}

impl SearchSpace {
    /// Validates `(q, m, l)`. `Q^M` is kept exactly when it fits 128 bits;
    /// otherwise only the floating mirror is available and [`Self::n_exact`]
    /// reports `Overflow`.
    pub fn new(q: u64, m: u64, l: u64) -> Result<Self> {
        if q < 3 {
            return Err(Error::InvalidAlphabet(q));
        }
        if m < 1 {
            return Err(Error::InvalidLength(m));
        }
        if l < 1 || 2 * l >= q {
            return Err(Error::InvalidStepRange { q, l });
        }
        let (q, m, l) = (to_usize(q)?, to_usize(m)?, to_usize(l)?);
        let n_exact = u32::try_from(m)
            .ok()
            .and_then(|m| (q as u128).checked_pow(m));
        let n_float = (q as f64).powi(m.min(i32::MAX as usize) as i32);
        Ok(Self {
            q,
            m,
            l,
            n_exact,
            n_float,
        })
    }

    /// Like [`Self::new`] but also demands an exact `N`.
    pub fn new_exact(q: u64, m: u64, l: u64) -> Result<Self> {
        let space = Self::new(q, m, l)?;
        space.n_exact()?;
        Ok(space)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Number of configurations `Q^M`, exactly.
    pub fn n_exact(&self) -> Result<u128> {
        self.n_exact.ok_or(Error::Overflow {
            q: self.q as u64,
            m: self.m as u64,
        })
    }

    /// Number of configurations as a float, for analytics.
    pub fn n(&self) -> f64 {
        self.n_float
    }

    /// Exact `N` as a machine index, for operations that address every state.
    pub(crate) fn n_index(&self) -> Result<usize> {
        let n = self.n_exact()?;
        usize::try_from(n).map_err(|_| Error::Overflow {
            q: self.q as u64,
            m: self.m as u64,
        })
    }

    /// Number of equally likely moves, `2lM`.
    pub fn degree(&self) -> usize {
        2 * self.l * self.m
    }

    /// Even `Q` with unit steps: the walk alternates between two sublattices.
    pub fn is_bipartite(&self) -> bool {
        self.q % 2 == 0 && self.l == 1
    }

    /// Per-axis cosine sums `a[k] = sum_{j=1..l} cos(2 pi j k / Q)`.
    ///
    /// `j*k` is reduced mod `Q` before forming the angle.
    pub fn axis_terms(&self) -> Vec<f64> {
        let q = self.q;
        (0..q)
            .map(|k| {
                (1..=self.l)
                    .map(|j| (2.0 * PI * ((j * k) % q) as f64 / q as f64).cos())
                    .sum()
            })
            .collect()
    }

    /// Per-axis gaps `g[k] = l - a[k] = sum_{j=1..l} 2 sin^2(pi j k / Q)`,
    /// free of the cancellation in `l - a[k]` for small `k/Q`.
    pub fn axis_gaps(&self) -> Vec<f64> {
        let q = self.q;
        (0..q)
            .map(|k| {
                (1..=self.l)
                    .map(|j| 2.0 * (PI * ((j * k) % q) as f64 / q as f64).sin().powi(2))
                    .sum()
            })
            .collect()
    }

    /// Smallest nonzero `1 - lambda` over all modes.
    pub fn spectral_gap(&self) -> f64 {
        let scale = (self.l * self.m) as f64;
        self.axis_gaps()[1..]
            .iter()
            .map(|g| g / scale)
            .fold(f64::INFINITY, f64::min)
    }

    /// The `2lM` moves as `(axis, signed increment)`, axis-major, then `+1, ..., +l, -1, ..., -l`.
    pub fn step_set(&self) -> Vec<Move> {
        (0..self.m)
            .flat_map(|axis| (0..2 * self.l).map(move |i| self.move_at(axis * 2 * self.l + i)))
            .collect()
    }

    /// The `i`-th move of [`Self::step_set`], computed without allocating.
    #[inline]
    pub fn move_at(&self, i: usize) -> Move {
        let two_l = 2 * self.l;
        let axis = i / two_l;
        let r = i % two_l;
        let delta = if r < self.l {
            (r + 1) as i64
        } else {
            -((r - self.l + 1) as i64)
        };
        Move { axis, delta }
    }

    /// `lambda(q) = (1/(lM)) sum_m sum_j cos(2 pi j k_m / Q)`.
    pub fn structure_function(&self, k: &[usize]) -> Result<f64> {
        self.check_mode(k)?;
        let terms = self.axis_terms();
        Ok(lambda_from_terms(&terms, k, self.l, self.m))
    }

    fn check_mode(&self, k: &[usize]) -> Result<()> {
        if k.len() != self.m {
            return Err(Error::InvalidArgument(format!(
                "mode has {} components, space has M = {}",
                k.len(),
                self.m
            )));
        }
        if let Some((axis, &value)) = k.iter().enumerate().find(|(_, &v)| v >= self.q) {
            return Err(Error::OutOfRangeMode {
                axis,
                value: value as u64,
                q: self.q as u64,
            });
        }
        Ok(())
    }

    /// Streams all `Q^M` modes in row-major order (last component fastest).
    pub fn enumerate_modes(&self, budgets: &Budgets) -> Result<ModeIter> {
        let n = self.n_exact()?;
        Budgets::check("mode enumeration", n, budgets.modes)?;
        Ok(self.modes_range(0, n as u64))
    }

    /// Streams modes with row-major index in `[start, end)`. Used to split
    /// mode sums across workers; callers are responsible for the budget.
    pub fn modes_range(&self, start: u64, end: u64) -> ModeIter {
        let mut digits = vec![0usize; self.m];
        let mut rest = start;
        for d in digits.iter_mut().rev() {
            *d = (rest % self.q as u64) as usize;
            rest /= self.q as u64;
        }
        ModeIter {
            terms: self.axis_terms(),
            gaps: self.axis_gaps(),
            q: self.q,
            l: self.l,
            m: self.m,
            digits,
            next: start,
            end,
        }
    }
}

fn to_usize(v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::InvalidArgument(format!("{v} exceeds the platform word")))
}

#[inline]
fn lambda_from_terms(terms: &[f64], k: &[usize], l: usize, m: usize) -> f64 {
    let s: f64 = k.iter().map(|&km| terms[km]).sum();
    s / (l * m) as f64
}

impl fmt::Display for SearchSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q={} M={} l={}", self.q, self.m, self.l)
    }
}

/// One move of the walk: add `delta` (mod Q) to digit `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Move {
    pub axis: usize,
    pub delta: i64,
}

impl Move {
    pub fn inverse(self) -> Move {
        Move {
            axis: self.axis,
            delta: -self.delta,
        }
    }
}

/// A lock configuration: `M` digits, each in `[0, Q)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CodePoint {
    digits: Vec<usize>,
}

impl CodePoint {
    pub fn new(space: &SearchSpace, digits: Vec<usize>) -> Result<Self> {
        if digits.len() != space.m() {
            return Err(Error::InvalidCodePoint(format!(
                "{} digits given, M = {}",
                digits.len(),
                space.m()
            )));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= space.q()) {
            return Err(Error::InvalidCodePoint(format!(
                "digit {d} outside [0, {})",
                space.q()
            )));
        }
        Ok(Self { digits })
    }

    pub fn origin(space: &SearchSpace) -> Self {
        Self {
            digits: vec![0; space.m()],
        }
    }

    /// Parses comma-separated digits, e.g. `"0,2,1"`.
    pub fn parse(space: &SearchSpace, text: &str) -> Result<Self> {
        let digits = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidCodePoint(format!("cannot parse digit {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, digits)
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    /// Applies `mv` modulo `q`.
    pub fn apply(&mut self, mv: Move, q: usize) {
        let d = &mut self.digits[mv.axis];
        *d = (*d as i64 + mv.delta).rem_euclid(q as i64) as usize;
    }

    /// Row-major index (first digit most significant). Requires exact `N`.
    pub fn index(&self, q: usize) -> u128 {
        self.digits
            .iter()
            .fold(0u128, |acc, &d| acc * q as u128 + d as u128)
    }

    pub fn from_index(space: &SearchSpace, mut index: u128) -> Self {
        let mut digits = vec![0usize; space.m()];
        for d in digits.iter_mut().rev() {
            *d = (index % space.q() as u128) as usize;
            index /= space.q() as u128;
        }
        Self { digits }
    }
}

impl fmt::Display for CodePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// A Fourier mode `k` with its eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeIndex {
    pub k: Vec<usize>,
    pub lambda: f64,
}

/// Streaming iterator over a contiguous row-major range of modes.
#[derive(Debug, Clone)]
pub struct ModeIter {
    terms: Vec<f64>,
    gaps: Vec<f64>,
    q: usize,
    l: usize,
    m: usize,
    digits: Vec<usize>,
    next: u64,
    end: u64,
}

impl ModeIter {
    /// Advances and returns only the eigenvalue, skipping the `k` clone.
    #[inline]
    pub fn next_lambda(&mut self) -> Option<f64> {
        if self.next >= self.end {
            return None;
        }
        let lambda = lambda_from_terms(&self.terms, &self.digits, self.l, self.m);
        self.advance();
        Some(lambda)
    }

    /// Advances and returns `1 - lambda`, computed from the per-axis gaps
    /// so that slow modes keep full relative precision.
    #[inline]
    pub fn next_rate(&mut self) -> Option<f64> {
        if self.next >= self.end {
            return None;
        }
        let rate = lambda_from_terms(&self.gaps, &self.digits, self.l, self.m);
        self.advance();
        Some(rate)
    }

    #[inline]
    fn advance(&mut self) {
        self.next += 1;
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.q {
                return;
            }
            *d = 0;
        }
    }
}

impl Iterator for ModeIter {
    type Item = ModeIndex;

    fn next(&mut self) -> Option<ModeIndex> {
        if self.next >= self.end {
            return None;
        }
        let k = self.digits.clone();
        let lambda = lambda_from_terms(&self.terms, &k, self.l, self.m);
        self.advance();
        Some(ModeIndex { k, lambda })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for ModeIter {}
