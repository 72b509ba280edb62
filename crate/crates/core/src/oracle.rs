//! Brute-force ground truth for small instances: exhaustive trajectory
//! enumeration for distinct-site counts, and the absorbing Markov chain
//! for first-passage quantities.
//!
//! Nothing here shares code with [`crate::spectral`] beyond the step set.

use nalgebra::{DMatrix, DVector};
use num_integer::Integer;
use serde::Serialize;

use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::series::{SeriesCoefficients, SeriesKind};
use crate::torus::{CodePoint, Move, SearchSpace};

/// A nonnegative rational `num / den` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExactRatio {
    pub num: u128,
    pub den: u128,
}

impl ExactRatio {
    pub fn new(num: u128, den: u128) -> Self {
        let g = num.gcd(&den).max(1);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Expected distinct sites `S_0..=S_{n_max}` by visiting every trajectory
/// from the origin. `S_n` has denominator `(2lM)^n` before reduction.
pub fn enumerate_distinct_sites(
    space: &SearchSpace,
    n_max: usize,
    budgets: &Budgets,
) -> Result<Vec<ExactRatio>> {
    let degree = space.degree() as u128;
    let required = u32::try_from(n_max)
        .ok()
        .and_then(|n| degree.checked_pow(n))
        .unwrap_or(u128::MAX);
    Budgets::check("trajectory enumeration", required, budgets.trajectories)?;

    let moves = space.step_set();
    let mut sums = vec![0u128; n_max + 1];
    let mut path = vec![CodePoint::origin(space)];
    walk_all(space.q(), &moves, n_max, &mut path, 1, &mut sums);

    Ok(sums
        .into_iter()
        .enumerate()
        .map(|(n, total)| ExactRatio::new(total, degree.pow(n as u32)))
        .collect())
}

fn walk_all(
    q: usize,
    moves: &[Move],
    n_max: usize,
    path: &mut Vec<CodePoint>,
    distinct: u128,
    sums: &mut [u128],
) {
    let depth = path.len() - 1;
    sums[depth] += distinct;
    if depth == n_max {
        return;
    }
    for &mv in moves {
        let mut next = path[depth].clone();
        next.apply(mv, q);
        let fresh = !path.contains(&next);
        path.push(next);
        walk_all(q, moves, n_max, path, distinct + fresh as u128, sums);
        path.pop();
    }
}

/// Exact first-passage quantities for one target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactFpt {
    /// Mean hitting time of the target from each configuration, by row-major index.
    pub per_start_hitting_times: Vec<f64>,
    /// Average of `per_start_hitting_times` (target included, contributing 0).
    pub mean_uniform_start: f64,
    /// `full_distribution[n]`: probability the first visit happens exactly at
    /// step `n`, from a uniform start (`n = 0` is start-on-target).
    pub full_distribution: Option<Vec<f64>>,
}

/// Neighbour of state `index` under `mv`, on the row-major layout.
fn neighbour(index: usize, mv: Move, q: usize, strides: &[usize]) -> usize {
    let stride = strides[mv.axis];
    let digit = (index / stride) % q;
    let moved = (digit as i64 + mv.delta).rem_euclid(q as i64) as usize;
    index - digit * stride + moved * stride
}

fn strides(space: &SearchSpace) -> Vec<usize> {
    let mut s = vec![1usize; space.m()];
    for axis in (0..space.m().saturating_sub(1)).rev() {
        s[axis] = s[axis + 1] * space.q();
    }
    s
}

/// Mean hitting times by a dense solve of `(I - P_sub) t = 1` over the
/// non-target states; optionally the first-visit distribution up to `horizon`.
pub fn absorbing_chain_fpt(
    space: &SearchSpace,
    target: &CodePoint,
    horizon: Option<usize>,
    budgets: &Budgets,
) -> Result<ExactFpt> {
    Budgets::check("dense hitting-time solve", space.n_exact()?, budgets.dense_states)?;
    let n = space.n_index()?;
    let q = space.q();
    let target_index = target.index(q) as usize;
    let moves = space.step_set();
    let strides = strides(space);
    let w = 1.0 / moves.len() as f64;

    // Reduced coordinates skip the target.
    let reduced = |i: usize| if i < target_index { i } else { i - 1 };
    let size = n - 1;
    let mut a = DMatrix::<f64>::identity(size, size);
    for i in (0..n).filter(|&i| i != target_index) {
        for &mv in &moves {
            let j = neighbour(i, mv, q, &strides);
            if j != target_index {
                a[(reduced(i), reduced(j))] -= w;
            }
        }
    }
    // The walk is symmetric, so I - P_sub is symmetric positive definite.
    let solution = a
        .cholesky()
        .ok_or_else(|| Error::SolverSingular(format!("I - P_sub not positive definite on {space}")))?
        .solve(&DVector::from_element(size, 1.0));

    let mut times = Vec::with_capacity(n);
    for i in 0..n {
        times.push(if i == target_index {
            0.0
        } else {
            solution[reduced(i)]
        });
    }
    let mean_uniform_start = times.iter().sum::<f64>() / n as f64;

    let full_distribution = match horizon {
        Some(h) => Some(propagate(space, target, h, budgets)?.first_visit),
        None => None,
    };
    Ok(ExactFpt {
        per_start_hitting_times: times,
        mean_uniform_start,
        full_distribution,
    })
}

struct Propagation {
    survival: Vec<f64>,
    first_visit: Vec<f64>,
}

/// Evolves the uniform start distribution with the target absorbing.
fn propagate(
    space: &SearchSpace,
    target: &CodePoint,
    horizon: usize,
    budgets: &Budgets,
) -> Result<Propagation> {
    let n = space.n_exact()?;
    Budgets::check("exact propagation states", n, budgets.propagation_states)?;
    Budgets::check(
        "exact propagation work",
        n.saturating_mul(horizon as u128 + 1),
        budgets.propagation_work,
    )?;
    let n = space.n_index()?;
    let q = space.q();
    let target_index = target.index(q) as usize;
    let moves = space.step_set();
    let strides = strides(space);
    let w = 1.0 / moves.len() as f64;

    let mut mass = vec![1.0 / n as f64; n];
    let mut survival = Vec::with_capacity(horizon + 1);
    let mut first_visit = Vec::with_capacity(horizon + 1);
    first_visit.push(mass[target_index]);
    mass[target_index] = 0.0;
    survival.push(mass.iter().sum());

    let mut next = vec![0.0; n];
    for _ in 0..horizon {
        // Symmetric walk: inflow to i is the average over its neighbours.
        for (i, slot) in next.iter_mut().enumerate() {
            *slot = w * moves
                .iter()
                .map(|&mv| mass[neighbour(i, mv, q, &strides)])
                .sum::<f64>();
        }
        first_visit.push(next[target_index]);
        next[target_index] = 0.0;
        std::mem::swap(&mut mass, &mut next);
        survival.push(mass.iter().sum());
    }
    Ok(Propagation {
        survival,
        first_visit,
    })
}

/// `P_0..=P_horizon` by exact probability-mass propagation.
pub fn exact_survival_iteration(
    space: &SearchSpace,
    target: &CodePoint,
    horizon: usize,
    budgets: &Budgets,
) -> Result<SeriesCoefficients> {
    let run = propagate(space, target, horizon, budgets)?;
    Ok(SeriesCoefficients::new(SeriesKind::Survival, run.survival))
}
