//! Statistical agreement between the simulator and the analytic engine.

use codewalk::simulator::{empirical_survival, simulate, SimConfig};
use codewalk::spectral::{distinct_sites_series, mean_fpt_spectral, relaxation_time_fit};
use codewalk::{Budgets, CodePoint, SearchSpace};

fn space(q: u64, m: u64, l: u64) -> SearchSpace {
    SearchSpace::new(q, m, l).unwrap()
}

#[test]
fn distinct_sites_within_three_standard_errors() {
    let s = space(5, 2, 1);
    let b = Budgets::default();
    let config = SimConfig::new(s.clone(), CodePoint::origin(&s), 100_000, 16, 11).with_distinct(1);
    let stats = simulate(&config, &b).unwrap();
    let curve = stats.mean_distinct_curve().unwrap();
    let exact = distinct_sites_series(&s, 16, &b).unwrap();
    for n in [1usize, 2, 4, 8, 16] {
        let (mean, se) = curve[n];
        assert!(
            (mean - exact.values[n]).abs() <= 3.0 * se,
            "n={n}: {mean} +- {se} vs {}",
            exact.values[n]
        );
    }
    assert_eq!(curve[0], (1.0, 0.0));
}

/// Mean first-passage time over the oracle sweep with l = 1, one rerun on a miss.
#[test]
fn simulated_means_match_across_sweep() {
    let b = Budgets::default();
    for q in 3..=12u64 {
        for m in 1..=3u64 {
            if q.pow(m as u32) > 2000 {
                continue;
            }
            let s = space(q, m, 1);
            let exact = mean_fpt_spectral(&s, &b).unwrap();
            let horizon = (60.0 * s.n()) as u64;
            let z = |seed| {
                let c = SimConfig::new(s.clone(), CodePoint::origin(&s), 20_000, horizon, seed);
                let est = simulate(&c, &b).unwrap().fpt_estimate();
                assert_eq!(est.censored, 0, "{s}");
                (est.mean - exact).abs() / est.standard_error
            };
            let first = z(q * 100 + m);
            if first > 3.0 {
                let second = z(q * 100 + m + 50);
                assert!(second <= 3.0, "{s}: |z| = {first:.2} then {second:.2}");
            }
        }
    }
}

#[test]
fn censoring_matches_empirical_survival() {
    let s = space(16, 2, 1);
    let b = Budgets::default();
    let horizon = 300;
    let stats = simulate(&SimConfig::new(s.clone(), CodePoint::origin(&s), 5000, horizon, 4), &b).unwrap();
    let emp = empirical_survival(&stats, horizon).unwrap();
    let censored = stats.censored() as f64 / 5000.0;
    assert_eq!(emp.survival.values[horizon as usize], censored);
}

#[test]
fn simulated_tail_decays_at_the_mean_time() {
    let s = space(16, 2, 1);
    let b = Budgets::default();
    let horizon = 8000u64;
    let stats = simulate(&SimConfig::new(s.clone(), CodePoint::origin(&s), 100_000, horizon, 21), &b).unwrap();
    let emp = empirical_survival(&stats, horizon).unwrap();
    let tau = relaxation_time_fit(&emp.survival, true).unwrap();
    let exact = mean_fpt_spectral(&s, &b).unwrap();
    assert!((tau - exact).abs() < 0.05 * exact, "tau {tau} vs {exact}");
}
