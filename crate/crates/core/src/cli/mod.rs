//! Command-line front end.
//!
//! Exit codes: 0 success, 1 internal failure, 2 invalid parameters,
//! 3 a resource budget refused the run, 4 an oracle check failed.

mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::budget::Budgets;
use crate::compare::{compare_strategies, COMPARE_REL_TOL};
use crate::error::Error;
use crate::green;
use crate::lawnmower::lawnmower_stats;
use crate::oracle;
use crate::simulator::{simulate, SimConfig};
use crate::spectral::{self, TauConstant, LOG_CONSTANT_C};
use crate::torus::{CodePoint, SearchSpace};

pub use output::{fmt_g17, RunManifest};
use output::{json_document, num, nums, opt_num, Table};

#[derive(Debug, Parser)]
#[command(
    name = "codewalk",
    version,
    about = "Random-walk versus lawnmower search on the Q-ary code torus"
)]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact distinct-site, survival and first-passage series.
    Analyze(AnalyzeArgs),
    /// Lattice Green constants for a word length.
    Constants(ConstantsArgs),
    /// Monte Carlo random-walk search.
    Simulate(SimulateArgs),
    /// Random walk against the lawnmower sweep.
    Compare(CompareArgs),
    /// Cross-check the analytic engine against exact small-space oracles.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Args)]
struct SpaceArgs {
    /// Alphabet size Q (letters per disc).
    #[arg(short = 'Q', long = "alphabet")]
    q: u64,
    /// Word length M (number of discs).
    #[arg(short = 'M', long = "length")]
    m: u64,
    /// Largest rotation per move, l; needs 2l < Q.
    #[arg(short = 'l', long = "step-range", default_value_t = 1)]
    l: u64,
}

impl SpaceArgs {
    fn space(&self) -> Result<SearchSpace, Error> {
        SearchSpace::new(self.q, self.m, self.l)
    }

    fn params(&self) -> Map<String, Value> {
        let mut p = Map::new();
        p.insert("alphabet".into(), json!(self.q));
        p.insert("length".into(), json!(self.m));
        p.insert("step_range".into(), json!(self.l));
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Last step n of the series (default: min(100000, 20N)).
    #[arg(long)]
    horizon: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct ConstantsArgs {
    /// Word length M.
    #[arg(short = 'M', long = "length")]
    m: u64,
    /// Step range l.
    #[arg(short = 'l', long = "step-range", default_value_t = 1)]
    l: u64,
    /// Alphabet sizes for the finite-lattice column (repeatable).
    #[arg(short = 'Q', long = "alphabet", num_args = 1.., default_values_t = [16u64, 32, 64])]
    q: Vec<u64>,
    /// Relative tolerance of the quadratures.
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long, default_value_t = 10_000)]
    replicas: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target word as comma-separated digits (default: all zeros).
    #[arg(long)]
    target: Option<String>,
    /// Step cap per walk (default: min(50N, 1e9)).
    #[arg(long)]
    horizon: Option<u64>,
    /// Also track distinct configurations visited.
    #[arg(long)]
    record_distinct: bool,
    /// Steps between distinct-site samples (default: horizon/100).
    #[arg(long)]
    stride: Option<u64>,
    /// Histogram bins for the first-passage times.
    #[arg(long, default_value_t = 100)]
    bins: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Add a Monte Carlo estimate of the random-walk mean.
    #[arg(long)]
    with_simulation: bool,
    #[arg(long, default_value_t = 10_000)]
    replicas: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Survival table length (CSV output) and simulation step cap.
    #[arg(long)]
    horizon: Option<usize>,
    /// Also write the side-by-side survival table to this CSV file.
    #[arg(long)]
    survival_csv: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Target word as comma-separated digits (default: all zeros).
    #[arg(long)]
    target: Option<String>,
    /// Steps of survival compared against exact propagation.
    #[arg(long, default_value_t = 200)]
    horizon: usize,
    /// Longest enumerated walk (reduced to fit the trajectory budget).
    #[arg(long, default_value_t = 8)]
    enumerate_steps: usize,
    /// Perturbs the analytic mean; used to exercise the failure path.
    #[arg(long, hide = true, default_value_t = 0.0, allow_negative_numbers = true)]
    inject_fault: f64,
    #[command(flatten)]
    out: OutputArgs,
}

/// Tolerances of the oracle subcommand.
pub const ORACLE_MEAN_REL_TOL: f64 = 1e-9;
pub const ORACLE_SURVIVAL_ABS_TOL: f64 = 1e-10;
pub const ORACLE_DISTINCT_ABS_TOL: f64 = 1e-12;

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Verification(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Lib(e) if e.is_usage() => 2,
            Failure::Lib(e) if e.is_budget() => 3,
            Failure::Lib(_) | Failure::Io(_) => 1,
            Failure::Verification(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Verification(msg) => write!(f, "verification failed: {msg}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.jobs {
        Some(0) => Err(Failure::Lib(Error::InvalidArgument(
            "--jobs must be at least 1".into(),
        ))),
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Failure::Io(std::io::Error::other(e))),
        },
        None => dispatch(&cli.command),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("codewalk: {f}");
            f.exit_code()
        }
    }
}

fn dispatch(command: &Command) -> Result<(), Failure> {
    let budgets = Budgets::from_env()?;
    match command {
        Command::Analyze(a) => analyze(a, &budgets),
        Command::Constants(a) => constants(a, &budgets),
        Command::Simulate(a) => simulate_cmd(a, &budgets),
        Command::Compare(a) => compare(a, &budgets),
        Command::Oracle(a) => oracle_cmd(a, &budgets),
    }
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &out.output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn space_json(space: &SearchSpace) -> Value {
    let n = space
        .n_exact()
        .map_or_else(|_| num(space.n()), |n| json!(n.to_string()));
    json!({
        "alphabet": space.q(),
        "length": space.m(),
        "step_range": space.l(),
        "configurations": n,
        "degree": space.degree(),
    })
}

fn parse_target(space: &SearchSpace, text: &Option<String>) -> Result<CodePoint, Error> {
    match text {
        Some(t) => CodePoint::parse(space, t),
        None => Ok(CodePoint::origin(space)),
    }
}

fn analyze(a: &AnalyzeArgs, budgets: &Budgets) -> Result<(), Failure> {
    let space = a.space.space()?;
    let horizon = a.horizon.unwrap_or_else(|| spectral::default_horizon(&space));
    let distinct = spectral::distinct_sites_series(&space, horizon + 1, budgets)?;
    let (survival, first) = spectral::survival_from_distinct(&space, &distinct);
    let s = &distinct.values[..=horizon];

    let mut params = a.space.params();
    params.insert("horizon".into(), json!(horizon));
    params.insert("format".into(), json!(a.out.format.name()));

    let text = match a.out.format {
        Format::Csv => {
            let mut table = Table::new(&["n", "distinct_sites", "survival", "first_passage"]);
            for n in 0..=horizon {
                table.push(vec![
                    n.to_string(),
                    fmt_g17(s[n]),
                    fmt_g17(survival.values[n]),
                    fmt_g17(first.values[n]),
                ]);
            }
            table.document("analyze", params, None)
        }
        Format::Json => {
            let data = json!({
                "space": space_json(&space),
                "horizon": horizon,
                "n": (0..=horizon).collect::<Vec<_>>(),
                "distinct_sites": nums(s),
                "survival": nums(&survival.values),
                "first_passage": nums(&first.values),
            });
            json_document("analyze", params, None, data)
        }
    };
    emit(&a.out, &text)
}

fn green_json(name: &str, r: &green::GreenResult) -> Value {
    json!({
        "name": name,
        "value": num(r.value),
        "error_estimate": num(r.error_estimate),
        "method": r.method,
    })
}

fn constants(a: &ConstantsArgs, budgets: &Budgets) -> Result<(), Failure> {
    if a.m < 1 {
        return Err(Error::InvalidLength(a.m).into());
    }
    let m = a.m as usize;
    let l = a.l as usize;
    if l < 1 {
        return Err(Error::InvalidArgument("step range must be at least 1".into()).into());
    }

    let mut entries = Vec::new();
    let mut note = Value::Null;
    match m {
        1 => return Err(Error::DivergentIntegral(1).into()),
        2 => {
            if l == 1 {
                entries.push(json!({
                    "name": "c",
                    "value": num(LOG_CONSTANT_C),
                    "error_estimate": Value::Null,
                    "method": "fitted",
                }));
                note = json!("M = 2 has no Green constant; the mean search time is N ln(cN)/pi");
            } else {
                note = json!("no closed form available for M = 2 with l > 1");
            }
        }
        _ => {
            let g = green::watson_constant(m, a.rel_tol)?;
            entries.push(green_json("G", &g));
            entries.push(json!({
                "name": "G_asymptotic",
                "value": num(green::watson_asymptotic(m)),
                "error_estimate": Value::Null,
                "method": green::GreenMethod::Asymptotic,
            }));
            if l > 1 {
                let gl = green::watson_constant_l(m, l, a.rel_tol)?;
                entries.push(green_json("G_l", &gl));
                entries.push(json!({
                    "name": "G_l_asymptotic",
                    "value": num(green::step_range_asymptotic(m, l)),
                    "error_estimate": Value::Null,
                    "method": green::GreenMethod::Asymptotic,
                }));
            }
        }
    }

    let mut finite = Vec::new();
    for &q in &a.q {
        let space = SearchSpace::new(q, a.m, a.l)?;
        let r = match space.n_exact() {
            Ok(n) if n <= budgets.modes => green::finite_lattice_green(&space, budgets)?,
            _ => green::finite_lattice_green_factorized(&space, COMPARE_REL_TOL.max(a.rel_tol))?,
        };
        finite.push((q, r));
    }

    let mut params = Map::new();
    params.insert("length".into(), json!(a.m));
    params.insert("step_range".into(), json!(a.l));
    params.insert("alphabets".into(), json!(a.q));
    params.insert("rel_tol".into(), num(a.rel_tol));
    params.insert("format".into(), json!(a.out.format.name()));

    let text = match a.out.format {
        Format::Json => {
            let finite_json: Vec<Value> = finite
                .iter()
                .map(|(q, r)| {
                    json!({
                        "alphabet": q,
                        "value": num(r.value),
                        "error_estimate": num(r.error_estimate),
                        "method": r.method,
                    })
                })
                .collect();
            let data = json!({
                "length": a.m,
                "step_range": a.l,
                "constants": entries,
                "note": note,
                "finite_lattice": finite_json,
            });
            json_document("constants", params, None, data)
        }
        Format::Csv => {
            let mut table = Table::new(&["name", "alphabet", "value", "error_estimate", "method"]);
            let cell = |v: &Value| match v {
                Value::Null => String::new(),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            for e in &entries {
                table.push(vec![
                    cell(&e["name"]),
                    String::new(),
                    cell(&e["value"]),
                    cell(&e["error_estimate"]),
                    cell(&e["method"]),
                ]);
            }
            for (q, r) in &finite {
                table.push(vec![
                    "finite_lattice".into(),
                    q.to_string(),
                    fmt_g17(r.value),
                    fmt_g17(r.error_estimate),
                    "finite_lattice".into(),
                ]);
            }
            table.document("constants", params, None)
        }
    };
    emit(&a.out, &text)
}

fn default_sim_horizon(space: &SearchSpace) -> u64 {
    (50.0 * space.n()).ceil().min(1e9) as u64
}

fn simulate_cmd(a: &SimulateArgs, budgets: &Budgets) -> Result<(), Failure> {
    let space = a.space.space()?;
    let target = parse_target(&space, &a.target)?;
    let horizon = a.horizon.unwrap_or_else(|| default_sim_horizon(&space));
    let mut config = SimConfig::new(space.clone(), target.clone(), a.replicas, horizon, a.seed);
    if a.record_distinct {
        let stride = a.stride.unwrap_or((horizon / 100).max(1));
        config = config.with_distinct(stride);
    }
    if a.bins < 1 {
        return Err(Error::InvalidArgument("--bins must be at least 1".into()).into());
    }
    let stats = simulate(&config, budgets)?;
    let est = stats.fpt_estimate();
    let (width, counts) = stats.histogram(a.bins);

    let mut params = a.space.params();
    params.insert("replicas".into(), json!(a.replicas));
    params.insert("target".into(), json!(target.to_string()));
    params.insert("horizon".into(), json!(horizon));
    params.insert("record_distinct".into(), json!(a.record_distinct));
    params.insert("stride".into(), json!(config.distinct_sample_stride));
    params.insert("bins".into(), json!(a.bins));
    params.insert("format".into(), json!(a.out.format.name()));

    let text = match a.out.format {
        Format::Json => {
            let distinct = stats.mean_distinct_curve().map(|curve| {
                let means: Vec<f64> = curve.iter().map(|c| c.0).collect();
                let ses: Vec<f64> = curve.iter().map(|c| c.1).collect();
                json!({
                    "checkpoints": stats.checkpoints,
                    "mean": nums(&means),
                    "standard_error": nums(&ses),
                })
            });
            let data = json!({
                "space": space_json(&space),
                "target": target.to_string(),
                "replicas": a.replicas,
                "horizon": horizon,
                "first_passage": {
                    "mean": num(est.mean),
                    "standard_error": num(est.standard_error),
                    "observed": est.observed,
                    "censored": est.censored,
                },
                "histogram": { "bin_width": width, "counts": counts },
                "distinct_sites": distinct,
            });
            json_document("simulate", params, Some(a.seed), data)
        }
        Format::Csv => match stats.mean_distinct_curve() {
            Some(curve) => {
                let mut table = Table::new(&["n", "mean_distinct_sites", "standard_error"]);
                for (n, (m, se)) in stats.checkpoints.iter().zip(curve) {
                    table.push(vec![n.to_string(), fmt_g17(m), fmt_g17(se)]);
                }
                table.document("simulate", params, Some(a.seed))
            }
            None => {
                let mut table = Table::new(&["bin_start", "bin_end", "count"]);
                for (i, c) in counts.iter().enumerate() {
                    let start = i as u64 * width;
                    table.push(vec![start.to_string(), (start + width).to_string(), c.to_string()]);
                }
                table.document("simulate", params, Some(a.seed))
            }
        },
    };
    emit(&a.out, &text)
}

fn survival_table(space: &SearchSpace, horizon: usize, budgets: &Budgets) -> Result<Table, Failure> {
    let lm = lawnmower_stats(space)?;
    let (survival, _) = spectral::survival_series(space, horizon, budgets)?;
    let mut table = Table::new(&["n", "lawnmower", "random_walk"]);
    for (n, p) in survival.values.iter().enumerate() {
        table.push(vec![n.to_string(), fmt_g17(lm.survival(n as u128)), fmt_g17(*p)]);
    }
    Ok(table)
}

fn compare(a: &CompareArgs, budgets: &Budgets) -> Result<(), Failure> {
    let space = a.space.space()?;
    let table_horizon = a.horizon.unwrap_or_else(|| spectral::default_horizon(&space));

    let sim = if a.with_simulation {
        let horizon = a
            .horizon
            .map_or_else(|| default_sim_horizon(&space), |h| h as u64);
        let config = SimConfig::new(space.clone(), CodePoint::origin(&space), a.replicas, horizon, a.seed);
        Some(simulate(&config, budgets)?)
    } else {
        None
    };
    let cmp = compare_strategies(&space, sim.as_ref(), budgets)?;

    let mut params = a.space.params();
    params.insert("with_simulation".into(), json!(a.with_simulation));
    if a.with_simulation {
        params.insert("replicas".into(), json!(a.replicas));
    }
    params.insert("horizon".into(), json!(table_horizon));
    params.insert("format".into(), json!(a.out.format.name()));
    let seed = a.with_simulation.then_some(a.seed);

    if let Some(path) = &a.survival_csv {
        let table = survival_table(&space, table_horizon, budgets)?;
        std::fs::write(path, table.document("compare", params.clone(), seed))?;
    }

    let text = match a.out.format {
        Format::Csv => survival_table(&space, table_horizon, budgets)?.document("compare", params, seed),
        Format::Json => {
            let constant = cmp.closed_form_constant.map(|c| match c {
                TauConstant::Green(g) => json!({ "kind": "green", "value": num(g) }),
                TauConstant::Log(c) => json!({ "kind": "log", "value": num(c) }),
            });
            let mc = cmp.monte_carlo.map(|e| {
                json!({
                    "mean": num(e.mean),
                    "standard_error": num(e.standard_error),
                    "observed": e.observed,
                    "censored": e.censored,
                })
            });
            let data = json!({
                "space": space_json(&space),
                "lawnmower_mean": num(cmp.lawnmower_mean),
                "random_walk_mean": num(cmp.summary.mean_fpt),
                "mean_method": cmp.mean_method,
                "ratio_to_lawnmower": num(cmp.summary.ratio_to_lawnmower),
                "finite_green": num(cmp.finite_green),
                "tau_fit": opt_num(cmp.summary.tau_fit),
                "tau_closed_form": opt_num(cmp.summary.tau_closed_form),
                "closed_form_constant": constant,
                "closed_form_deviation": opt_num(cmp.closed_form_deviation),
                "closed_form_note": cmp.closed_form_note,
                "monte_carlo": mc,
            });
            json_document("compare", params, seed, data)
        }
    };
    emit(&a.out, &text)
}

struct Check {
    name: &'static str,
    detail: Value,
    max_deviation: f64,
    tolerance: f64,
}

impl Check {
    fn pass(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

fn oracle_cmd(a: &OracleArgs, budgets: &Budgets) -> Result<(), Failure> {
    let space = a.space.space()?;
    let target = parse_target(&space, &a.target)?;
    let mut checks = Vec::new();

    let exact = oracle::absorbing_chain_fpt(&space, &target, None, budgets)?;
    let analytic = spectral::mean_fpt_spectral(&space, budgets)? + a.inject_fault;
    let rel = (analytic - exact.mean_uniform_start).abs() / exact.mean_uniform_start.abs().max(f64::MIN_POSITIVE);
    checks.push(Check {
        name: "mean_first_passage",
        detail: json!({ "exact": num(exact.mean_uniform_start), "analytic": num(analytic) }),
        max_deviation: rel,
        tolerance: ORACLE_MEAN_REL_TOL,
    });

    let exact_p = oracle::exact_survival_iteration(&space, &target, a.horizon, budgets)?;
    let (spec_p, _) = spectral::survival_series(&space, a.horizon, budgets)?;
    let dev = exact_p
        .values
        .iter()
        .zip(&spec_p.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0f64, f64::max);
    checks.push(Check {
        name: "survival",
        detail: json!({ "horizon": a.horizon }),
        max_deviation: dev,
        tolerance: ORACLE_SURVIVAL_ABS_TOL,
    });

    // Largest walk length whose trajectory count fits the budget.
    let degree = space.degree() as u128;
    let mut steps = 0usize;
    while steps < a.enumerate_steps
        && degree
            .checked_pow(steps as u32 + 1)
            .is_some_and(|c| c <= budgets.trajectories)
    {
        steps += 1;
    }
    let enumerated = oracle::enumerate_distinct_sites(&space, steps, budgets)?;
    let series = spectral::distinct_sites_series(&space, steps, budgets)?;
    let dev = enumerated
        .iter()
        .zip(&series.values)
        .map(|(e, s)| (e.to_f64() - s).abs())
        .fold(0.0f64, f64::max);
    checks.push(Check {
        name: "distinct_sites_enumeration",
        detail: json!({
            "steps": steps,
            "exact": enumerated.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        }),
        max_deviation: dev,
        tolerance: ORACLE_DISTINCT_ABS_TOL,
    });

    let all_pass = checks.iter().all(Check::pass);
    let mut params = a.space.params();
    params.insert("target".into(), json!(target.to_string()));
    params.insert("horizon".into(), json!(a.horizon));
    params.insert("enumerate_steps".into(), json!(a.enumerate_steps));
    if a.inject_fault != 0.0 {
        params.insert("inject_fault".into(), num(a.inject_fault));
    }
    params.insert("format".into(), json!(a.out.format.name()));

    let text = match a.out.format {
        Format::Json => {
            let list: Vec<Value> = checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "max_deviation": num(c.max_deviation),
                        "tolerance": num(c.tolerance),
                        "pass": c.pass(),
                        "detail": c.detail,
                    })
                })
                .collect();
            let data = json!({
                "space": space_json(&space),
                "checks": list,
                "all_pass": all_pass,
            });
            json_document("oracle", params, None, data)
        }
        Format::Csv => {
            let mut table = Table::new(&["check", "max_deviation", "tolerance", "pass"]);
            for c in &checks {
                table.push(vec![
                    c.name.to_string(),
                    fmt_g17(c.max_deviation),
                    fmt_g17(c.tolerance),
                    c.pass().to_string(),
                ]);
            }
            table.document("oracle", params, None)
        }
    };
    emit(&a.out, &text)?;

    if all_pass {
        Ok(())
    } else {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.pass()).map(|c| c.name).collect();
        Err(Failure::Verification(failed.join(", ")))
    }
}
