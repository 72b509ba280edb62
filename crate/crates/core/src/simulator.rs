//! Seeded Monte Carlo of random-walk search.
//!
//! Each replica starts uniformly over all `N` configurations and takes
//! uniformly chosen moves from the `2lM` step set until it lands on the
//! target or runs out of horizon. Replica `r` draws from ChaCha8 stream `r`
//! keyed by the run seed, so results do not depend on the thread schedule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::series::{SeriesCoefficients, SeriesKind};
use crate::torus::{CodePoint, SearchSpace};

/// Replicas handed to one worker at a time.
const BATCH: u64 = 256;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub space: SearchSpace,
    pub target: CodePoint,
    pub replicas: u64,
    pub horizon: u64,
    pub seed: u64,
    pub record_distinct: bool,
    pub distinct_sample_stride: u64,
}

impl SimConfig {
    pub fn new(space: SearchSpace, target: CodePoint, replicas: u64, horizon: u64, seed: u64) -> Self {
        Self {
            space,
            target,
            replicas,
            horizon,
            seed,
            record_distinct: false,
            distinct_sample_stride: 1,
        }
    }

    pub fn with_distinct(mut self, stride: u64) -> Self {
        self.record_distinct = true;
        self.distinct_sample_stride = stride;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.replicas < 1 {
            return Err(Error::InvalidArgument("replicas must be at least 1".into()));
        }
        if self.horizon < 1 {
            return Err(Error::InvalidArgument("horizon must be at least 1".into()));
        }
        if self.distinct_sample_stride < 1 {
            return Err(Error::InvalidArgument("distinct sample stride must be at least 1".into()));
        }
        // Re-validate the target against this space.
        CodePoint::new(&self.space, self.target.digits().to_vec())?;
        Ok(())
    }

    /// Steps at which distinct-site counts are sampled: `0, stride, 2 stride, ... <= horizon`.
    pub fn checkpoints(&self) -> Vec<u64> {
        (0..=self.horizon / self.distinct_sample_stride)
            .map(|i| i * self.distinct_sample_stride)
            .collect()
    }
}

/// Output of [`simulate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkStats {
    /// First hit step per replica; `None` when censored at the horizon.
    pub fpt_samples: Vec<Option<u64>>,
    /// Per-replica distinct-site counts at [`SimConfig::checkpoints`].
    pub distinct_curves: Option<Vec<Vec<u64>>>,
    pub checkpoints: Vec<u64>,
    pub seed: u64,
    pub replica_count: u64,
    pub horizon: u64,
}

/// Sample mean of uncensored first-passage times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FptEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub observed: u64,
    pub censored: u64,
}

impl WalkStats {
    pub fn censored(&self) -> u64 {
        self.fpt_samples.iter().filter(|s| s.is_none()).count() as u64
    }

    pub fn fpt_estimate(&self) -> FptEstimate {
        let hits: Vec<f64> = self.fpt_samples.iter().flatten().map(|&t| t as f64).collect();
        let count = hits.len() as f64;
        let mean = hits.iter().sum::<f64>() / count;
        let var = hits.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (count - 1.0).max(1.0);
        FptEstimate {
            mean,
            standard_error: (var / count).sqrt(),
            observed: hits.len() as u64,
            censored: self.censored(),
        }
    }

    /// Mean distinct-site count over replicas, one value per checkpoint,
    /// with the standard error of that mean.
    pub fn mean_distinct_curve(&self) -> Option<Vec<(f64, f64)>> {
        let curves = self.distinct_curves.as_ref()?;
        let r = curves.len() as f64;
        Some(
            (0..self.checkpoints.len())
                .map(|i| {
                    let mean = curves.iter().map(|c| c[i] as f64).sum::<f64>() / r;
                    let var = curves.iter().map(|c| (c[i] as f64 - mean).powi(2)).sum::<f64>()
                        / (r - 1.0).max(1.0);
                    (mean, (var / r).sqrt())
                })
                .collect(),
        )
    }

    /// Equal-width histogram of uncensored samples: `(bin_width, counts)`.
    pub fn histogram(&self, max_bins: u64) -> (u64, Vec<u64>) {
        let max = self.fpt_samples.iter().flatten().copied().max().unwrap_or(0);
        let width = (max + 1).div_ceil(max_bins.max(1)).max(1);
        let mut counts = vec![0u64; ((max / width) + 1) as usize];
        for &t in self.fpt_samples.iter().flatten() {
            counts[(t / width) as usize] += 1;
        }
        (width, counts)
    }
}

/// Visited-set bit array that only clears the words it touched.
struct VisitedSet {
    words: Vec<u64>,
    touched: Vec<usize>,
}

impl VisitedSet {
    fn new(bits: usize) -> Self {
        Self {
            words: vec![0; bits.div_ceil(64)],
            touched: Vec::new(),
        }
    }

    /// Marks `i`; returns true when it was not yet marked.
    #[inline]
    fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let word = &mut self.words[w];
        if *word & b != 0 {
            return false;
        }
        if *word == 0 {
            self.touched.push(w);
        }
        *word |= b;
        true
    }

    fn clear(&mut self) {
        for &w in &self.touched {
            self.words[w] = 0;
        }
        self.touched.clear();
    }
}

struct Replica {
    fpt: Option<u64>,
    curve: Option<Vec<u64>>,
}

fn run_replica(
    config: &SimConfig,
    replica: u64,
    strides: &[usize],
    visited: &mut Option<VisitedSet>,
) -> Replica {
    let space = &config.space;
    let q = space.q();
    let degree = space.degree();
    let target = config.target.digits();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(replica);

    let mut digits: Vec<usize> = (0..space.m()).map(|_| rng.random_range(0..q)).collect();
    let mut mismatches = digits.iter().zip(target).filter(|(a, b)| a != b).count();
    let mut fpt = (mismatches == 0).then_some(0);

    let stride = config.distinct_sample_stride;
    let mut curve = None;
    let mut index = 0usize;
    let mut distinct = 0u64;
    if let Some(set) = visited.as_mut() {
        set.clear();
        index = digits.iter().zip(strides).map(|(d, s)| d * s).sum();
        set.insert(index);
        distinct = 1;
        curve = Some(vec![1u64]);
    } else if fpt.is_some() {
        return Replica { fpt, curve };
    }

    for n in 1..=config.horizon {
        let mv = space.move_at(rng.random_range(0..degree));
        let old = digits[mv.axis];
        let new = (old as i64 + mv.delta).rem_euclid(q as i64) as usize;
        digits[mv.axis] = new;
        let t = target[mv.axis];
        mismatches = mismatches + (old == t) as usize - (new == t) as usize;

        if let Some(set) = visited.as_mut() {
            index = index + new * strides[mv.axis] - old * strides[mv.axis];
            distinct += set.insert(index) as u64;
            if n % stride == 0 {
                curve.as_mut().expect("curve exists with a visited set").push(distinct);
            }
        }
        if mismatches == 0 && fpt.is_none() {
            fpt = Some(n);
            if visited.is_none() {
                break;
            }
        }
    }
    Replica { fpt, curve }
}

/// Runs `config.replicas` independent searches.
pub fn simulate(config: &SimConfig, budgets: &Budgets) -> Result<WalkStats> {
    config.validate()?;
    let space = &config.space;
    let state_bits = if config.record_distinct {
        let n = space.n_exact().map_err(|_| Error::MemoryBudget {
            what: "visited-set",
            required: u128::MAX,
            budget: budgets.visited_bits,
        })?;
        if n > budgets.visited_bits {
            return Err(Error::MemoryBudget {
                what: "visited-set",
                required: n,
                budget: budgets.visited_bits,
            });
        }
        Some(space.n_index()?)
    } else {
        None
    };
    let mut strides = vec![1usize; space.m()];
    if state_bits.is_some() {
        for axis in (0..space.m() - 1).rev() {
            strides[axis] = strides[axis + 1] * space.q();
        }
    }

    let batches = config.replicas.div_ceil(BATCH);
    let results: Vec<Vec<Replica>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut visited = state_bits.map(VisitedSet::new);
            let end = ((b + 1) * BATCH).min(config.replicas);
            (b * BATCH..end)
                .map(|r| run_replica(config, r, &strides, &mut visited))
                .collect()
        })
        .collect();

    let mut fpt_samples = Vec::with_capacity(config.replicas as usize);
    let mut curves = config.record_distinct.then(Vec::new);
    for rep in results.into_iter().flatten() {
        fpt_samples.push(rep.fpt);
        if let (Some(all), Some(c)) = (curves.as_mut(), rep.curve) {
            all.push(c);
        }
    }
    Ok(WalkStats {
        fpt_samples,
        distinct_curves: curves,
        checkpoints: if config.record_distinct {
            config.checkpoints()
        } else {
            Vec::new()
        },
        seed: config.seed,
        replica_count: config.replicas,
        horizon: config.horizon,
    })
}

/// Empirical survival with 95% normal-approximation binomial half-widths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalSurvival {
    pub survival: SeriesCoefficients,
    pub half_widths: Vec<f64>,
}

/// `P_hat_n` = fraction of replicas whose first hit is later than `n`.
pub fn empirical_survival(stats: &WalkStats, horizon: u64) -> Result<EmpiricalSurvival> {
    if horizon > stats.horizon {
        return Err(Error::InvalidArgument(format!(
            "survival horizon {horizon} beyond simulated horizon {}",
            stats.horizon
        )));
    }
    let h = horizon as usize;
    let mut hits_at = vec![0u64; h + 1];
    for &t in stats.fpt_samples.iter().flatten() {
        if t <= horizon {
            hits_at[t as usize] += 1;
        }
    }
    let r = stats.fpt_samples.len() as f64;
    let mut alive = stats.fpt_samples.len() as u64;
    let mut values = Vec::with_capacity(h + 1);
    let mut half_widths = Vec::with_capacity(h + 1);
    for hits in hits_at {
        alive -= hits;
        let p = alive as f64 / r;
        values.push(p);
        half_widths.push(Z95 * (p * (1.0 - p) / r).sqrt());
    }
    Ok(EmpiricalSurvival {
        survival: SeriesCoefficients::new(SeriesKind::Survival, values),
        half_widths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(q: u64, m: u64, replicas: u64, horizon: u64, seed: u64) -> SimConfig {
        let space = SearchSpace::new(q, m, 1).unwrap();
        let target = CodePoint::origin(&space);
        SimConfig::new(space, target, replicas, horizon, seed)
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let c = config(5, 2, 2000, 500, 42).with_distinct(10);
        let a = simulate(&c, &Budgets::default()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| simulate(&c, &Budgets::default()).unwrap());
        assert_eq!(a, b);
        let other = simulate(&SimConfig { seed: 43, ..c }, &Budgets::default()).unwrap();
        assert_ne!(a.fpt_samples, other.fpt_samples);
    }

    #[test]
    fn invalid_configs_rejected() {
        let b = Budgets::default();
        assert!(simulate(&config(5, 2, 0, 10, 1), &b).is_err());
        assert!(simulate(&config(5, 2, 10, 0, 1), &b).is_err());
        let mut c = config(5, 2, 10, 10, 1);
        c.distinct_sample_stride = 0;
        c.record_distinct = true;
        assert!(simulate(&c, &b).is_err());
    }

    #[test]
    fn visited_set_budget() {
        let c = config(11, 9, 1, 10, 1).with_distinct(1);
        assert!(matches!(
            simulate(&c, &Budgets::default()),
            Err(Error::MemoryBudget { .. })
        ));
        // Without distinct tracking the same space is fine.
        let c = config(11, 9, 4, 10, 1);
        assert!(simulate(&c, &Budgets::default()).is_ok());
    }

    #[test]
    fn samples_and_curves_respect_bounds() {
        let c = config(4, 2, 500, 60, 9).with_distinct(3);
        let stats = simulate(&c, &Budgets::default()).unwrap();
        for s in stats.fpt_samples.iter().flatten() {
            assert!(*s <= 60);
        }
        for curve in stats.distinct_curves.as_ref().unwrap() {
            assert_eq!(curve.len(), stats.checkpoints.len());
            for (w, &n) in curve.windows(2).zip(&stats.checkpoints[1..]) {
                assert!(w[0] <= w[1]);
                assert!(w[1] <= (n + 1).min(16));
            }
        }
    }

    #[test]
    fn empirical_survival_edges() {
        let c = config(6, 3, 3000, 40, 5);
        let stats = simulate(&c, &Budgets::default()).unwrap();
        let est = empirical_survival(&stats, 40).unwrap();
        // Censored fraction equals P_hat at the horizon.
        assert_eq!(est.survival.values[40], stats.censored() as f64 / 3000.0);
        let p0 = est.survival.values[0];
        assert!((p0 - (1.0 - 1.0 / 216.0)).abs() < 4.0 * est.half_widths[0].max(1e-3));
        assert!(empirical_survival(&stats, 41).is_err());

        let censored = WalkStats {
            fpt_samples: vec![None; 10],
            distinct_curves: None,
            checkpoints: vec![],
            seed: 0,
            replica_count: 10,
            horizon: 5,
        };
        let est = empirical_survival(&censored, 5).unwrap();
        assert!(est.survival.values.iter().all(|&p| p == 1.0));
    }

    #[test]
    fn histogram_counts_every_hit() {
        let stats = simulate(&config(5, 1, 1000, 1000, 3), &Budgets::default()).unwrap();
        let (width, counts) = stats.histogram(20);
        assert!(width >= 1);
        assert_eq!(counts.iter().sum::<u64>(), 1000 - stats.censored());
    }
}
