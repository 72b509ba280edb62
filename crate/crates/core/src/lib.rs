//! Search times for a forgotten combination: random-walk search on the
//! periodic `Q`-ary code torus versus a deterministic lawnmower sweep.
//!
//! * [`torus`]: search space, step set, structure function, mode stream.
//! * [`spectral`]: exact return, distinct-site, survival and first-passage
//!   series, mean first-passage time, relaxation-time fits.
//! * [`green`]: lattice Green constants by quadrature and on finite tori.
//! * [`simulator`]: seeded Monte Carlo walks.
//! * [`lawnmower`] and [`compare`]: the deterministic baseline and the
//!   strategy comparison.
//! * [`oracle`]: brute-force enumeration and absorbing-chain ground truth.
//! * [`cli`]: the `codewalk` command-line front end.

pub mod bessel;
pub mod budget;
pub mod cli;
pub mod compare;
pub mod error;
pub mod green;
pub mod lawnmower;
pub mod oracle;
pub mod quad;
pub mod series;
pub mod simulator;
pub mod spectral;
pub mod torus;

pub use budget::Budgets;
pub use error::{Error, Result};
pub use series::{SeriesCoefficients, SeriesKind};
pub use torus::{CodePoint, ModeIndex, Move, SearchSpace};
