//! Exact survival and first-passage statistics from the Fourier spectrum
//! of the walk.
//!
//! The return-probability generating function is
//! `G(0;z) = (1/N) sum_q 1/(1 - z lambda(q))`, so its coefficients are
//! `P0(n) = (1/N) sum_q lambda(q)^n`. Distinct sites follow from
//! `sum_n S_n z^n = 1 / ((1-z)^2 G(0;z))`, survival from `P_n = 1 - S_n/N`.
//! Mean first-passage time from a uniform start is the eigenvalue sum
//! `sum_{q != 0} 1/(1 - lambda(q))`.

use serde::Serialize;

use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::quad;
use crate::series::{cumulative_sum, reciprocal, SeriesCoefficients, SeriesKind};
use crate::torus::SearchSpace;

/// Modes per work unit in parallel mode sums. Fixing the partition
/// (instead of tying it to the thread count) keeps results bit-stable.
const MODE_CHUNK: u64 = 4096;

/// Largest horizon the default survival horizon will pick.
pub const MAX_DEFAULT_HORIZON: usize = 100_000;

/// `min(10^5, ceil(20 N))`.
pub fn default_horizon(space: &SearchSpace) -> usize {
    let h = (20.0 * space.n()).ceil();
    if h >= MAX_DEFAULT_HORIZON as f64 {
        MAX_DEFAULT_HORIZON
    } else {
        h as usize
    }
}

/// Splits `[0, n)` into fixed-size chunks, maps each (in parallel), and
/// combines the results by pairwise tree reduction in index order.
pub(crate) fn chunked_reduce<A, F, C>(n: u64, chunk: u64, map: F, combine: C) -> Option<A>
where
    A: Send,
    F: Fn(u64, u64) -> A + Sync,
    C: Fn(A, A) -> A,
{
    use rayon::prelude::*;

    let chunks = n.div_ceil(chunk);
    let mut parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| map(c * chunk, ((c + 1) * chunk).min(n)))
        .collect();
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(combine(a, b)),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop()
}

/// `P0(n)` for `n = 0..=horizon`: the probability that a walk started at
/// the origin stands on the origin at step `n`.
pub fn return_probability_series(
    space: &SearchSpace,
    horizon: usize,
    budgets: &Budgets,
) -> Result<SeriesCoefficients> {
    let n_modes = space.n_exact()?;
    Budgets::check("mode enumeration", n_modes, budgets.modes)?;
    let n_modes = n_modes as u64;
    let len = horizon + 1;

    let sums = chunked_reduce(
        n_modes,
        MODE_CHUNK,
        |start, end| {
            let mut acc = vec![0.0f64; len];
            let mut modes = space.modes_range(start, end);
            while let Some(lambda) = modes.next_lambda() {
                let mut p = 1.0f64;
                for slot in acc.iter_mut() {
                    *slot += p;
                    p *= lambda;
                    // Remaining powers cannot move any coefficient.
                    if p.abs() < 1e-30 {
                        break;
                    }
                }
            }
            acc
        },
        |mut a, b| {
            a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
            a
        },
    )
    .expect("a valid space has at least one mode");

    let inv_n = 1.0 / n_modes as f64;
    let mut values: Vec<f64> = sums.into_iter().map(|s| s * inv_n).collect();
    values[0] = 1.0;
    Ok(SeriesCoefficients::new(SeriesKind::ReturnProb, values))
}

/// `S_n` for `n = 0..=horizon`, from `1 / ((1-z)^2 G(0;z))`.
pub fn distinct_sites_series(
    space: &SearchSpace,
    horizon: usize,
    budgets: &Budgets,
) -> Result<SeriesCoefficients> {
    let ret = return_probability_series(space, horizon, budgets)?;
    distinct_sites_from_return(space, &ret)
}

/// Distinct-site counts from an already computed return-probability series.
pub fn distinct_sites_from_return(
    space: &SearchSpace,
    ret: &SeriesCoefficients,
) -> Result<SeriesCoefficients> {
    let mut s = reciprocal(&ret.values, ret.len());
    cumulative_sum(&mut s);
    cumulative_sum(&mut s);
    let series = SeriesCoefficients::new(SeriesKind::DistinctSites, s);
    series.check_invariants(space.n(), 1e-9 * space.n())?;
    Ok(series)
}

/// Survival `P_n = 1 - S_n/N` and first passage `F_n = P_n - P_{n+1}`,
/// both for `n = 0..=horizon`.
pub fn survival_series(
    space: &SearchSpace,
    horizon: usize,
    budgets: &Budgets,
) -> Result<(SeriesCoefficients, SeriesCoefficients)> {
    let distinct = distinct_sites_series(space, horizon + 1, budgets)?;
    Ok(survival_from_distinct(space, &distinct))
}

/// Converts `S_0..=S_{H+1}` into `(P_0..=P_H, F_0..=F_H)`.
pub fn survival_from_distinct(
    space: &SearchSpace,
    distinct: &SeriesCoefficients,
) -> (SeriesCoefficients, SeriesCoefficients) {
    let inv_n = 1.0 / space.n();
    let p: Vec<f64> = distinct.values.iter().map(|s| 1.0 - s * inv_n).collect();
    let f: Vec<f64> = p.windows(2).map(|w| w[0] - w[1]).collect();
    let mut p = p;
    p.pop();
    (
        SeriesCoefficients::new(SeriesKind::Survival, p),
        SeriesCoefficients::new(SeriesKind::FirstPassage, f),
    )
}

/// Exact mean first-passage time to a fixed target from a uniform start,
/// `sum_{q != 0} 1 / (1 - lambda(q))`.
pub fn mean_fpt_spectral(space: &SearchSpace, budgets: &Budgets) -> Result<f64> {
    let n_modes = space.n_exact()?;
    Budgets::check("mode enumeration", n_modes, budgets.modes)?;
    let total = chunked_reduce(
        n_modes as u64,
        MODE_CHUNK,
        |start, end| {
            let mut modes = space.modes_range(start, end);
            let mut acc = 0.0;
            if start == 0 {
                // k = 0 has lambda = 1 and no relaxation.
                modes.next_rate();
            }
            while let Some(rate) = modes.next_rate() {
                acc += 1.0 / rate;
            }
            acc
        },
        |a, b| a + b,
    )
    .unwrap_or(0.0);
    Ok(total)
}

/// The eigenvalue sum through its factorized Laplace form,
/// `int_0^inf [e^{-t} phi(t)^M - 1] dt`, costing `O(Q)` per node.
pub fn mean_fpt_factorized(space: &SearchSpace, rel_tol: f64) -> Result<f64> {
    if !(rel_tol > 1e-12 && rel_tol < 1e-2) {
        return Err(Error::InvalidArgument(format!(
            "rel_tol = {rel_tol} outside (1e-12, 1e-2)"
        )));
    }
    let m = space.m() as f64;
    let scale = (space.l() * space.m()) as f64;
    // Per-axis decay rates (1 - a_k/l)/M, k != 0.
    let rates: Vec<f64> = space.axis_gaps()[1..].iter().map(|g| g / scale).collect();
    let gap = space.spectral_gap();
    // (1 + e)^M - 1 with e = sum_k exp(-t rate_k), free of cancellation.
    let integrand = |t: f64| {
        let e: f64 = rates.iter().map(|r| (-t * r).exp()).sum();
        (m * e.ln_1p()).exp_m1()
    };

    let seg_tol = rel_tol / 20.0;
    let mut total = 0.0;
    let mut err = 0.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    loop {
        let est = quad::integrate(integrand, a, b, &[], 0.0, seg_tol)?;
        total += est.value;
        err += est.error;
        // Remaining mass is sum_q e^{-b mu_q}/mu_q <= f(b)/gap.
        let tail = integrand(b) / gap;
        if tail <= 0.01 * rel_tol * total {
            total += tail;
            err += tail;
            break;
        }
        if b > 1e15 {
            return Err(Error::QuadratureNotConverged(format!(
                "tail still {tail:e} at t = {b:e}"
            )));
        }
        a = b;
        b *= 2.0;
    }
    if err > rel_tol * total {
        return Err(Error::QuadratureNotConverged(format!(
            "error estimate {err:e} exceeds {rel_tol:e} relative"
        )));
    }
    Ok(total)
}

/// Parity-averaged sequence `(P_n + P_{n+1}) / 2`.
pub fn parity_smoothed(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Lower and upper survival bounds of the tail-fit window.
pub const FIT_WINDOW: (f64, f64) = (1e-4, 1e-1);

/// Minimum number of in-window points for a tail fit.
pub const FIT_MIN_POINTS: usize = 8;

/// Relaxation time from a least-squares fit of `ln P_n` against `n` over
/// the points with `P_n` in [`FIT_WINDOW`]. With `smooth_parity` the fit
/// runs on `(P_n + P_{n+1})/2`, which removes the `(-1)^n` component of
/// bipartite walks.
pub fn relaxation_time_fit(survival: &SeriesCoefficients, smooth_parity: bool) -> Result<f64> {
    let smoothed;
    let values: &[f64] = if smooth_parity {
        smoothed = parity_smoothed(&survival.values);
        &smoothed
    } else {
        &survival.values
    };
    let (lo, hi) = FIT_WINDOW;
    let points: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, &p)| (lo..=hi).contains(&p))
        .map(|(n, &p)| (n as f64, p.ln()))
        .collect();
    if points.len() < FIT_MIN_POINTS {
        return Err(Error::WindowTooShort(format!(
            "{} points with P in [{lo}, {hi}] (need {FIT_MIN_POINTS}); last P = {:?}",
            points.len(),
            values.last()
        )));
    }
    let count = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / count;
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(x, y)| {
        (sxy + (x - mean_x) * (y - mean_y), sxx + (x - mean_x).powi(2))
    });
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return Err(Error::WindowTooShort(format!("non-decaying fit, slope {slope}")));
    }
    Ok(-1.0 / slope)
}

/// `sum_n P_n` over the series plus the geometric tail `P_H r / (1 - r)`,
/// `r = exp(-1/tau)`.
pub fn survival_sum_with_tail(survival: &SeriesCoefficients, tau: f64) -> f64 {
    let head: f64 = survival.values.iter().sum();
    let last = survival.values.last().copied().unwrap_or(0.0);
    let r = (-1.0 / tau).exp();
    head + last * r / (1.0 - r)
}

/// Constant feeding the leading-order relaxation-time law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum TauConstant {
    /// Lattice Green constant `G` (or `G_l`), for `M >= 3`: `tau = N G`.
    Green(f64),
    /// Logarithmic constant `c`, for `M = 2`: `tau = N ln(c N) / pi`.
    Log(f64),
}

/// Constant of the `M = 2` law.
pub const LOG_CONSTANT_C: f64 = 1.8456;

/// Leading-order relaxation time for large `Q`.
pub fn tau_closed_form(space: &SearchSpace, constant: TauConstant) -> Result<f64> {
    let n = space.n();
    match (space.m(), constant) {
        (1, _) => Err(Error::UnsupportedM(1)),
        (2, TauConstant::Log(c)) => Ok(n * (c * n).ln() / std::f64::consts::PI),
        (2, TauConstant::Green(_)) => Err(Error::InvalidArgument(
            "M = 2 takes the logarithmic constant c, not a Green constant".into(),
        )),
        (_, TauConstant::Green(g)) => Ok(n * g),
        (m, TauConstant::Log(_)) => Err(Error::InvalidArgument(format!(
            "M = {m} takes a Green constant, not the logarithmic constant"
        ))),
    }
}

/// Random-walk versus lawnmower summary for one space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FptSummary {
    /// Exact mean first-passage time of the random walk, in steps.
    pub mean_fpt: f64,
    /// Tail-fit relaxation time, when a survival series was affordable.
    pub tau_fit: Option<f64>,
    /// Leading-order closed form, when one exists for this `M`.
    pub tau_closed_form: Option<f64>,
    /// `mean_fpt / ((N - 1)/2)`.
    pub ratio_to_lawnmower: f64,
}
