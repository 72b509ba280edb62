//! Random-walk search against the lawnmower sweep on one space.

use serde::Serialize;

use crate::budget::Budgets;
use crate::error::Result;
use crate::green;
use crate::lawnmower::lawnmower_stats;
use crate::simulator::{FptEstimate, WalkStats};
use crate::spectral::{self, FptSummary, TauConstant, LOG_CONSTANT_C};
use crate::torus::SearchSpace;

/// Relative tolerance for quadrature-backed values in comparisons.
pub const COMPARE_REL_TOL: f64 = 1e-10;

/// Largest `N * H` for which the comparison also runs a survival tail fit.
pub const FIT_WORK_CAP: f64 = 2e9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub summary: FptSummary,
    /// `(N - 1)/2`.
    pub lawnmower_mean: f64,
    /// `mean_fpt / N`.
    pub finite_green: f64,
    /// How `mean_fpt` was evaluated: `"mode_sum"` or `"factorized"`.
    pub mean_method: &'static str,
    /// Constant used for the closed form, if any.
    pub closed_form_constant: Option<TauConstant>,
    /// Why there is no closed form, if there is none.
    pub closed_form_note: Option<String>,
    /// `(tau_closed_form - mean_fpt) / mean_fpt`.
    pub closed_form_deviation: Option<f64>,
    pub monte_carlo: Option<FptEstimate>,
}

/// Assembles exact, closed-form, and (optionally) simulated search times.
pub fn compare_strategies(
    space: &SearchSpace,
    sim: Option<&WalkStats>,
    budgets: &Budgets,
) -> Result<Comparison> {
    let lawnmower = lawnmower_stats(space)?;
    let n_modes = space.n_exact()?;
    let (mean_fpt, mean_method) = if n_modes <= budgets.modes {
        (spectral::mean_fpt_spectral(space, budgets)?, "mode_sum")
    } else {
        (spectral::mean_fpt_factorized(space, COMPARE_REL_TOL)?, "factorized")
    };

    let (closed_form_constant, closed_form_note) = match (space.m(), space.l()) {
        (1, _) => (None, Some("no closed form for M = 1".to_string())),
        (2, 1) => (Some(TauConstant::Log(LOG_CONSTANT_C)), None),
        (2, _) => (
            None,
            Some("no closed form available for M = 2 with l > 1".to_string()),
        ),
        (m, l) => {
            let g = green::watson_constant_l(m, l, COMPARE_REL_TOL)?;
            (Some(TauConstant::Green(g.value)), None)
        }
    };
    let tau_closed_form = closed_form_constant
        .map(|c| spectral::tau_closed_form(space, c))
        .transpose()?;

    let tau_fit = fit_if_affordable(space, mean_fpt, budgets);

    Ok(Comparison {
        summary: FptSummary {
            mean_fpt,
            tau_fit,
            tau_closed_form,
            ratio_to_lawnmower: mean_fpt / lawnmower.mean,
        },
        lawnmower_mean: lawnmower.mean,
        finite_green: mean_fpt / space.n(),
        mean_method,
        closed_form_constant,
        closed_form_note,
        closed_form_deviation: tau_closed_form.map(|t| (t - mean_fpt) / mean_fpt),
        monte_carlo: sim.map(WalkStats::fpt_estimate),
    })
}

/// Tail fit over a horizon of about ten mean first-passage times, skipped
/// when the series would be too expensive.
fn fit_if_affordable(space: &SearchSpace, mean_fpt: f64, budgets: &Budgets) -> Option<f64> {
    let horizon = ((10.0 * mean_fpt).ceil() as usize).min(spectral::default_horizon(space));
    if space.n() * horizon as f64 > FIT_WORK_CAP {
        return None;
    }
    let (survival, _) = spectral::survival_series(space, horizon, budgets).ok()?;
    spectral::relaxation_time_fit(&survival, space.is_bipartite()).ok()
}
