//! Coefficient arrays indexed by walk step, and the power-series
//! arithmetic used to move between them.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// Probability of standing on the origin at step `n`, started there.
    ReturnProb,
    /// Expected number of distinct sites visited in steps `0..=n`.
    DistinctSites,
    /// Probability the target is still unfound after step `n`.
    Survival,
    /// Probability the target is first found at step `n`.
    FirstPassage,
}

/// `values[n]` for `n = 0..=H`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesCoefficients {
    pub kind: SeriesKind,
    pub values: Vec<f64>,
}

impl SeriesCoefficients {
    pub fn new(kind: SeriesKind, values: Vec<f64>) -> Self {
        Self { kind, values }
    }

    /// Largest index `H`.
    pub fn horizon(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Checks the structural invariants of this kind, allowing `tol` of
    /// floating slack. `n_sites` bounds distinct-site counts.
    pub fn check_invariants(&self, n_sites: f64, tol: f64) -> Result<()> {
        let v = &self.values;
        let fail = |msg: String| Err(Error::NumericalInstability(format!("{:?}: {msg}", self.kind)));
        match self.kind {
            SeriesKind::ReturnProb => {
                if v.first().is_some_and(|&x| x != 1.0) {
                    return fail(format!("values[0] = {} != 1", v[0]));
                }
                if let Some((n, x)) = v
                    .iter()
                    .enumerate()
                    .find(|(_, &x)| !(-tol..=1.0 + tol).contains(&x))
                {
                    return fail(format!("values[{n}] = {x} outside [0, 1]"));
                }
            }
            SeriesKind::DistinctSites => {
                if v.first().is_some_and(|&x| x != 1.0) {
                    return fail(format!("values[0] = {} != 1", v[0]));
                }
                for (n, w) in v.windows(2).enumerate() {
                    if w[1] < w[0] - tol {
                        return fail(format!("decreases at n = {}: {} -> {}", n + 1, w[0], w[1]));
                    }
                }
                for (n, &x) in v.iter().enumerate() {
                    if x > ((n + 1) as f64).min(n_sites) + tol {
                        return fail(format!("values[{n}] = {x} exceeds min(n+1, N)"));
                    }
                }
            }
            SeriesKind::Survival => {
                for (n, w) in v.windows(2).enumerate() {
                    if w[1] > w[0] + tol {
                        return fail(format!("increases at n = {}: {} -> {}", n + 1, w[0], w[1]));
                    }
                }
                if let Some((n, x)) = v
                    .iter()
                    .enumerate()
                    .find(|(_, &x)| !(-tol..=1.0 + tol).contains(&x))
                {
                    return fail(format!("values[{n}] = {x} outside [0, 1]"));
                }
            }
            SeriesKind::FirstPassage => {
                let mut total = 0.0;
                for (n, &x) in v.iter().enumerate() {
                    if x < -tol {
                        return fail(format!("values[{n}] = {x} negative"));
                    }
                    total += x;
                    if total > 1.0 + tol {
                        return fail(format!("partial sum {total} exceeds 1 at n = {n}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// First `len` coefficients of `1 / a(z)`; requires `a[0] != 0`.
///
/// Ascending recurrence `b[n] = -(1/a0) sum_{k=1..n} a[k] b[n-k]`.
pub fn reciprocal(a: &[f64], len: usize) -> Vec<f64> {
    assert!(!a.is_empty() && a[0] != 0.0, "reciprocal needs a nonzero constant term");
    let inv0 = 1.0 / a[0];
    let mut b = vec![0.0; len];
    if len == 0 {
        return b;
    }
    b[0] = inv0;
    for n in 1..len {
        let top = n.min(a.len() - 1);
        let mut acc = 0.0;
        for k in 1..=top {
            acc += a[k] * b[n - k];
        }
        b[n] = -acc * inv0;
    }
    b
}

/// Multiplies by `1/(1-z)` in place.
pub fn cumulative_sum(a: &mut [f64]) {
    let mut acc = 0.0;
    for x in a.iter_mut() {
        acc += *x;
        *x = acc;
    }
}

/// First `len` coefficients of `a(z) * b(z)`.
pub fn convolve(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| {
            let lo = n.saturating_sub(b.len().saturating_sub(1));
            let hi = n.min(a.len().saturating_sub(1));
            (lo..=hi).map(|k| a[k] * b[n - k]).sum()
        })
        .collect()
}
