//! Lattice Green constants: the expected number of visits to the origin
//! of an infinite-lattice walk in `M` dimensions, plus the finite-torus
//! counterpart.
//!
//! For the step-range-`l` walk the `M`-fold integral
//! `pi^{-M} int_{[0,pi]^M} dx / (1 - lambda(x))` is rewritten with
//! `1/(1-lambda) = int_0^inf e^{-t(1-lambda)} dt`, which factorizes over
//! axes:
//!
//! ```text
//! G_l = M int_0^inf psi(x)^M dx,
//! psi(x) = (1/pi) int_0^pi exp((x/l) (sum_{j=1..l} cos(j theta) - l)) dtheta.
//! ```
//!
//! `psi` is the exponentially scaled per-axis kernel, bounded by 1; for
//! `l = 1` it is `e^{-x} I0(x)`. The outer integrand decays like
//! `x^{-M/2}`, which is integrable for `M >= 3`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bessel::i0e;
use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::quad;
use crate::spectral;
use crate::torus::SearchSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GreenMethod {
    LaplaceBessel,
    FiniteLattice,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenResult {
    pub value: f64,
    pub error_estimate: f64,
    pub method: GreenMethod,
}

/// Split point between the direct outer range and the mapped tail.
const TAIL_START: f64 = 16.0;

fn check_tol(rel_tol: f64) -> Result<()> {
    if rel_tol > 0.0 && rel_tol < 0.1 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("rel_tol = {rel_tol} outside (0, 0.1)")))
    }
}

/// `M int_0^inf kernel(x)^M dx`, with `[TAIL_START, inf)` mapped onto
/// `(0, 1]` by `x = TAIL_START / s^2`. For `M >= 3` the mapped integrand
/// stays bounded as `s -> 0`.
fn outer_integral<K: Fn(f64) -> f64>(m: usize, kernel: K, rel_tol: f64) -> Result<GreenResult> {
    let mf = m as f64;
    let mi = m as i32;
    let tol = rel_tol / 4.0;
    let head = quad::integrate(|x| kernel(x).powi(mi), 0.0, TAIL_START, &[1.0, 4.0], 0.0, tol)?;
    let tail = quad::integrate(
        |s: f64| {
            let x = TAIL_START / (s * s);
            kernel(x).powi(mi) * 2.0 * TAIL_START / (s * s * s)
        },
        0.0,
        1.0,
        &[],
        0.0,
        tol,
    )?;
    let value = mf * (head.value + tail.value);
    let error_estimate = mf * (head.error + tail.error);
    if error_estimate > rel_tol * value {
        return Err(Error::QuadratureNotConverged(format!(
            "error {error_estimate:e} on value {value}"
        )));
    }
    Ok(GreenResult {
        value,
        error_estimate,
        method: GreenMethod::LaplaceBessel,
    })
}

/// Watson-type constant `G` for the nearest-neighbour walk, `M >= 3`.
pub fn watson_constant(m: usize, rel_tol: f64) -> Result<GreenResult> {
    if m < 3 {
        return Err(Error::DivergentIntegral(m as u64));
    }
    check_tol(rel_tol)?;
    outer_integral(m, i0e, rel_tol)
}

/// Scaled per-axis kernel of the step-range-`l` walk,
/// `(1/pi) int_0^pi exp((x/l)(sum_j cos(j theta) - l)) dtheta`.
pub fn step_range_kernel(x: f64, l: usize) -> Result<f64> {
    if x <= 0.0 {
        return Ok(1.0);
    }
    let lf = l as f64;
    let f = |theta: f64| {
        // 1 - cos(j theta) as 2 sin^2(j theta / 2), exact near theta = 0.
        let s: f64 = (1..=l).map(|j| 2.0 * (0.5 * j as f64 * theta).sin().powi(2)).sum();
        (-(x / lf) * s).exp()
    };
    // Beyond theta_c the exponent is below -50, since
    // sum_j (1 - cos j theta) >= 1 - cos theta >= 2 theta^2 / pi^2.
    let theta_c = PI * (25.0 * lf / x).sqrt();
    let est = if theta_c >= PI {
        quad::integrate(f, 0.0, PI, &[], 0.0, 1e-12)?
    } else {
        quad::integrate(f, 0.0, theta_c, &[0.1 * theta_c], 0.0, 1e-12)?
    };
    Ok(est.value / PI)
}

/// Green constant `G_l` of the step-range-`l` walk, `M >= 3`.
pub fn watson_constant_l(m: usize, l: usize, rel_tol: f64) -> Result<GreenResult> {
    if m < 3 {
        return Err(Error::DivergentIntegral(m as u64));
    }
    if l < 1 {
        return Err(Error::InvalidArgument("l must be at least 1".into()));
    }
    check_tol(rel_tol)?;
    // The quadrature closure cannot propagate errors; stash the first one.
    let failure = std::cell::RefCell::new(None);
    let kernel = |x: f64| match step_range_kernel(x, l) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let result = outer_integral(m, kernel, rel_tol);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    result
}

/// Large-`M` expansion `1 + 1/(2M) + 3/(4M^2)`.
pub fn watson_asymptotic(m: usize) -> f64 {
    let mf = m as f64;
    1.0 + 1.0 / (2.0 * mf) + 3.0 / (4.0 * mf * mf)
}

/// Large-`l` estimate `1 + 1/(2Ml)`.
pub fn step_range_asymptotic(m: usize, l: usize) -> f64 {
    1.0 + 1.0 / (2.0 * (m * l) as f64)
}

/// Finite-torus Green value `g_Q = (1/N) sum_{q != 0} 1/(1 - lambda(q))`,
/// by direct mode sum. Mean first-passage time is `N g_Q`.
pub fn finite_lattice_green(space: &SearchSpace, budgets: &Budgets) -> Result<GreenResult> {
    let total = spectral::mean_fpt_spectral(space, budgets)?;
    let value = total / space.n();
    Ok(GreenResult {
        value,
        error_estimate: value * f64::EPSILON * space.n().log2().max(1.0),
        method: GreenMethod::FiniteLattice,
    })
}

/// [`finite_lattice_green`] through the factorized quadrature, for tori
/// too large to enumerate.
pub fn finite_lattice_green_factorized(space: &SearchSpace, rel_tol: f64) -> Result<GreenResult> {
    let total = spectral::mean_fpt_factorized(space, rel_tol)?;
    let value = total / space.n();
    Ok(GreenResult {
        value,
        error_estimate: value * rel_tol,
        method: GreenMethod::FiniteLattice,
    })
}
