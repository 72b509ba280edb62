//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Run alone with `cargo test --test acceptance`.

use std::time::{Duration, Instant};

use codewalk::compare::compare_strategies;
use codewalk::green::{
    finite_lattice_green, finite_lattice_green_factorized, watson_asymptotic, watson_constant,
};
use codewalk::lawnmower::lawnmower_stats;
use codewalk::oracle::{absorbing_chain_fpt, enumerate_distinct_sites, exact_survival_iteration};
use codewalk::simulator::{empirical_survival, simulate, SimConfig, Z95};
use codewalk::spectral::{
    default_horizon, distinct_sites_series, mean_fpt_factorized, mean_fpt_spectral,
    relaxation_time_fit, survival_series, LOG_CONSTANT_C,
};
use codewalk::{Budgets, CodePoint, SearchSpace};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn space(q: u64, m: u64, l: u64) -> SearchSpace {
    SearchSpace::new(q, m, l).expect("valid space")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Every valid space of the oracle sweep, with a target away from the origin.
fn oracle_sweep() -> Vec<(SearchSpace, CodePoint)> {
    let mut out = Vec::new();
    for q in 3..=12u64 {
        for m in 1..=3u64 {
            for l in 1..=3u64 {
                if 2 * l >= q || q.pow(m as u32) > 2000 {
                    continue;
                }
                let s = space(q, m, l);
                let digits = (0..m as usize).map(|i| (i + 1) % q as usize).collect();
                let t = CodePoint::new(&s, digits).unwrap();
                out.push((s, t));
            }
        }
    }
    out
}

fn oracle_equivalence() -> Outcome {
    let b = Budgets::default();
    let mut worst_mean = 0.0f64;
    let mut worst_surv = 0.0f64;
    let sweep = oracle_sweep();
    for (s, t) in &sweep {
        let exact = absorbing_chain_fpt(s, t, None, &b).map_err(|e| format!("{s}: {e}"))?;
        let spectral = mean_fpt_spectral(s, &b).map_err(|e| format!("{s}: {e}"))?;
        let d = rel(spectral, exact.mean_uniform_start);
        worst_mean = worst_mean.max(d);
        if d > 1e-9 {
            return Err(format!("{s}: mean {spectral} vs exact {}", exact.mean_uniform_start));
        }
        let p_exact = exact_survival_iteration(s, t, 200, &b).map_err(|e| e.to_string())?;
        let (p_spec, _) = survival_series(s, 200, &b).map_err(|e| e.to_string())?;
        for (n, (x, y)) in p_exact.values.iter().zip(&p_spec.values).enumerate() {
            let d = (x - y).abs();
            worst_surv = worst_surv.max(d);
            if d > 1e-10 {
                return Err(format!("{s}: survival at n={n}: {y} vs exact {x}"));
            }
        }
    }
    Ok(format!(
        "{} spaces; worst mean rel dev {worst_mean:.2e} (tol 1e-9), worst survival dev {worst_surv:.2e} (tol 1e-10)",
        sweep.len()
    ))
}

fn distinct_sites_oracle() -> Outcome {
    let b = Budgets::default();
    let mut worst = 0.0f64;
    for (q, m, l) in [(5, 2, 1), (7, 1, 1), (7, 1, 2)] {
        let s = space(q, m, l);
        let exact = enumerate_distinct_sites(&s, 8, &b).map_err(|e| e.to_string())?;
        let series = distinct_sites_series(&s, 8, &b).map_err(|e| e.to_string())?;
        for (n, (e, v)) in exact.iter().zip(&series.values).enumerate() {
            let d = (e.to_f64() - v).abs();
            worst = worst.max(d);
            if d > 1e-12 {
                return Err(format!("{s}: S_{n} = {v} vs exact {e}"));
            }
        }
    }
    Ok(format!("worst deviation {worst:.2e} (tol 1e-12)"))
}

fn watson_constants() -> Outcome {
    let mut got = Vec::new();
    for (m, want) in [(3, 1.516), (4, 1.239), (5, 1.156)] {
        let g = watson_constant(m, 1e-10).map_err(|e| e.to_string())?.value;
        if (g - want).abs() > 0.001 {
            return Err(format!("M={m}: {g:.6} vs {want} (tol 0.001)"));
        }
        got.push(format!("M={m}: {g:.6}"));
    }
    Ok(got.join(", "))
}

fn asymptotic_expansion() -> Outcome {
    let mut prev = f64::INFINITY;
    let mut got = Vec::new();
    for m in [6usize, 8, 10, 12] {
        let g = watson_constant(m, 1e-12).map_err(|e| e.to_string())?.value;
        let gap = (g - watson_asymptotic(m)).abs();
        let bound = 4.0 / (m as f64).powi(3);
        if gap >= prev {
            return Err(format!("gap at M={m} ({gap:.3e}) not below previous ({prev:.3e})"));
        }
        if gap > bound {
            return Err(format!("gap at M={m} ({gap:.3e}) above 4/M^3 = {bound:.3e}"));
        }
        prev = gap;
        got.push(format!("M={m}: {gap:.2e}"));
    }
    Ok(format!("gaps {}", got.join(", ")))
}

fn two_dimensional_law() -> Outcome {
    let mut got = Vec::new();
    for q in [32u64, 64, 128] {
        let s = space(q, 2, 1);
        let exact = mean_fpt_factorized(&s, 1e-10).map_err(|e| e.to_string())?;
        let n = s.n();
        let law = n * (LOG_CONSTANT_C * n).ln() / std::f64::consts::PI;
        let d = rel(law, exact);
        if d > 0.02 {
            return Err(format!("Q={q}: law {law:.2} vs exact {exact:.2} ({:.3}%)", 100.0 * d));
        }
        got.push(format!("Q={q}: {:.4}%", 100.0 * d));
    }
    Ok(format!("relative deviations {} (tol 2%)", got.join(", ")))
}

fn ratio_trend() -> Outcome {
    let b = Budgets::default();
    let q = 64u64;
    let mut ratios = [Vec::new(), Vec::new()];
    for (slot, l) in [(0usize, 1u64), (1, 3)] {
        for m in 3..=6u64 {
            let s = space(q, m, l);
            let g = match s.n_exact() {
                Ok(n) if n <= b.modes => finite_lattice_green(&s, &b),
                _ => finite_lattice_green_factorized(&s, 1e-10),
            }
            .map_err(|e| e.to_string())?
            .value;
            let ratio = compare_strategies(&s, None, &b)
                .map_err(|e| e.to_string())?
                .summary
                .ratio_to_lawnmower;
            let n = s.n();
            let expected = 2.0 * g * n / (n - 1.0);
            if rel(ratio, expected) > 1e-8 {
                return Err(format!("{s}: ratio {ratio} vs 2 g_Q N/(N-1) = {expected}"));
            }
            ratios[slot].push(ratio);
        }
    }
    for r in &ratios {
        if r.windows(2).any(|w| w[1] >= w[0]) || r.iter().any(|&x| x <= 2.0) {
            return Err(format!("ratios not decreasing toward 2: {r:?}"));
        }
    }
    if ratios[1].iter().zip(&ratios[0]).any(|(a, b)| a >= b) {
        return Err(format!("l=3 ratios {:?} not below l=1 {:?}", ratios[1], ratios[0]));
    }
    let fmt = |r: &[f64]| r.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" > ");
    Ok(format!("l=1: {}; l=3: {}", fmt(&ratios[0]), fmt(&ratios[1])))
}

/// 50 checkpoints spread over the range where the exact survival is above 1e-3.
fn checkpoints(survival: &[f64]) -> Vec<usize> {
    let end = survival.iter().position(|&p| p < 1e-3).unwrap_or(survival.len() - 1).max(49);
    (0..50).map(|k| (k * end + 24) / 49).collect()
}

fn monte_carlo_once(s: &SearchSpace, seed: u64) -> Result<(bool, String), String> {
    let b = Budgets::default();
    let exact = mean_fpt_spectral(s, &b).map_err(|e| e.to_string())?;
    let horizon = (50.0 * s.n()) as u64;
    let (p, _) = survival_series(s, 20 * s.n() as usize, &b).map_err(|e| e.to_string())?;
    let marks = checkpoints(&p.values);
    let replicas = 100_000u64;
    let config = SimConfig::new(s.clone(), CodePoint::origin(s), replicas, horizon, seed);
    let stats = simulate(&config, &b).map_err(|e| e.to_string())?;
    let est = stats.fpt_estimate();
    let z = (est.mean - exact).abs() / est.standard_error;

    let last = *marks.last().unwrap();
    let emp = empirical_survival(&stats, last as u64).map_err(|e| e.to_string())?;
    let inside = marks
        .iter()
        .filter(|&&n| {
            let want = p.values[n];
            let band = Z95 * (want * (1.0 - want) / replicas as f64).sqrt();
            (emp.survival.values[n] - want).abs() <= band
        })
        .count();
    let ok = z <= 3.0 && est.censored == 0 && inside >= 47;
    Ok((
        ok,
        format!("{s}: |z| = {z:.2}, {inside}/50 in band, censored {}", est.censored),
    ))
}

fn monte_carlo_concordance() -> Outcome {
    let mut lines = Vec::new();
    for (q, m) in [(3u64, 1u64), (3, 2), (16, 2)] {
        let s = space(q, m, 1);
        let (ok, msg) = monte_carlo_once(&s, 1)?;
        if ok {
            lines.push(msg);
            continue;
        }
        let (ok2, msg2) = monte_carlo_once(&s, 2)?;
        if !ok2 {
            return Err(format!("two consecutive failures: {msg}; rerun {msg2}"));
        }
        lines.push(format!("{msg2} (after rerun)"));
    }
    Ok(lines.join("; "))
}

fn exponential_tail() -> Outcome {
    let b = Budgets::default();
    let mut got = Vec::new();
    for (q, m) in [(16u64, 2u64), (8, 3)] {
        let s = space(q, m, 1);
        let (p, _) = survival_series(&s, default_horizon(&s), &b).map_err(|e| e.to_string())?;
        let tau = relaxation_time_fit(&p, s.is_bipartite()).map_err(|e| e.to_string())?;
        let mean = mean_fpt_spectral(&s, &b).map_err(|e| e.to_string())?;
        let d = rel(tau, mean);
        if d > 0.05 {
            return Err(format!("{s}: tau {tau:.2} vs mean {mean:.2} ({:.2}%)", 100.0 * d));
        }
        got.push(format!("{s}: tau {tau:.2} vs {mean:.2} ({:.2}%)", 100.0 * d));
    }
    Ok(format!("{} (tol 5%)", got.join(", ")))
}

fn lawnmower_baseline() -> Outcome {
    let mut got = Vec::new();
    for (q, m, n) in [(3u64, 2u64, 9u128), (4, 2, 16), (10, 6, 1_000_000)] {
        let lm = lawnmower_stats(&space(q, m, 1)).map_err(|e| e.to_string())?;
        let want = (n - 1) as f64 / 2.0;
        if lm.n != n || lm.mean != want {
            return Err(format!("N={n}: mean {} vs {want}", lm.mean));
        }
        if lm.survival(n - 1) != 0.0 || lm.survival(n - 2) <= 0.0 {
            return Err(format!("N={n}: survival does not reach 0 exactly at N-1"));
        }
        got.push(format!("N={n}: {}", lm.mean));
    }
    Ok(got.join(", "))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "oracle equivalence", limit: Duration::from_secs(120), run: oracle_equivalence },
        Criterion { id: 2, name: "distinct-sites enumeration", limit: Duration::from_secs(30), run: distinct_sites_oracle },
        Criterion { id: 3, name: "Watson constants", limit: Duration::from_secs(30), run: watson_constants },
        Criterion { id: 4, name: "asymptotic expansion", limit: Duration::from_secs(30), run: asymptotic_expansion },
        Criterion { id: 5, name: "M = 2 logarithmic law", limit: Duration::from_secs(30), run: two_dimensional_law },
        Criterion { id: 6, name: "ratio trend toward 2", limit: Duration::from_secs(60), run: ratio_trend },
        Criterion { id: 7, name: "Monte Carlo concordance", limit: Duration::from_secs(120), run: monte_carlo_concordance },
        Criterion { id: 8, name: "exponential tail", limit: Duration::from_secs(30), run: exponential_tail },
        Criterion { id: 9, name: "lawnmower baseline", limit: Duration::from_secs(5), run: lawnmower_baseline },
    ];

    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if elapsed <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow ({:.1?} > {:?})", elapsed, c.limit)),
            Err(e) => (false, e),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} [{}] {}: {} ({:.2}s)",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
