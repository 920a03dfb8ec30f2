//! `lechat`: batch front end over scenario config documents.
//!
//! Every subcommand prints a JSON summary on stdout. With `--out DIR` (or
//! `LECHAT_OUT_DIR`) it also writes CSV files with fixed headers:
//!
//! | file | header |
//! |------|--------|
//! | `properties.csv` | `subject,property,holds,detail` |
//! | `maximizers.csv` | `index,x1..xn,value,selected` |
//! | `lechatelier.csv` | `role,x1..xn` |
//! | `path.csv` | `t,x1..xn,payoff,cost` |
//! | `myopic.csv` | `t,x1..xn` |
//! | `horizons.csv` | `t,myopic_x1..myopic_xn,forward_x1..forward_xn` |
//! | `suite.csv` | `index,instance_seed,verdict` (failures only) |
//!
//! `xn` runs over the lattice dimension. Exit status: 0 when everything
//! holds, 2 when a hypothesis is rejected, 3 when a conclusion is violated,
//! 1 on input errors.

use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lechat_core::config::ModelConfig;
use lechat_core::cost::CostFunction;
use lechat_core::dynamic_solver::{theorem3_check, theorem4_check};
use lechat_core::harness::{fixtures, run_suite, EXPLORATORY, THEOREMS};
use lechat_core::lechatelier::{prop3_forall_check, theorem2_select};
use lechat_core::models::{
    run_demo, FactorDemandModel, InvestmentModel, LaborSupplyModel, PricingModel, WishfulModel,
    DEMOS,
};
use lechat_core::myopic::{equilibrium_sequence, theorem5_check, theorem6_check};
use lechat_core::properties::{
    check_additively_separable, check_increasing_differences, check_join_path_inequality,
    check_log_increasing_differences, check_minimally_monotone, check_monotone,
    check_monotone_triples, check_objective_quasi_supermodular, check_objective_supermodular,
    check_separable_convex, check_single_crossing, check_single_dipped_at_zero,
    check_strict_single_crossing, check_strictly_minimally_monotone, check_strictly_monotone,
};
use lechat_core::static_solver::{prop1_forall_check, rejected_or, theorem1_star_select};
use lechat_core::stochastic::{theorem1_prime_select, theorem2_prime_select, theorem3_prime_check};
use lechat_core::{
    solve_dynamic, CheckOptions, CostLottery, DynamicModel, DynamicScenario, Error, GridLattice,
    Point, PropertyReport, Scenario, ScenarioConfig, SelectionMode, SolveOptions, Strictness,
    TheoremReport, Utility, Verdict,
};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "lechat",
    version,
    about = "Monotone comparative statics with adjustment costs"
)]
struct Cli {
    /// Worker threads for parallel enumeration and suites.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario config (JSON).
    config: PathBuf,
    /// Directory for CSV output.
    #[arg(long, env = "LECHAT_OUT_DIR")]
    out: Option<PathBuf>,
    /// Run solvers even when a hypothesis fails (reproduces counterexamples).
    #[arg(long)]
    unsafe_skip_hypotheses: bool,
    /// Comparison slack for property checks; models use at least their own.
    #[arg(long, default_value_t = 0.0)]
    tolerance: f64,
}

#[derive(Args)]
struct RiskArg {
    /// Risk attitude over adjustment costs: `linear` or `cara:<alpha>`.
    /// Overrides the lottery's utility, or wraps the deterministic cost in a
    /// degenerate lottery.
    #[arg(long)]
    risk: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DynVerdict {
    None,
    Thm3,
    Thm4,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Caged,
    Monotone,
    Arbitrary,
}

#[derive(Subcommand)]
enum Command {
    /// Property table for the objective and every cost in the scenario.
    CheckProperties {
        #[command(flatten)]
        common: Common,
    },
    /// Join selection x̂ = x̲ ∨ x′ with its verdicts.
    SolveStatic {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        risk: RiskArg,
        /// Constraint-shift form; the config must give `initial_set` and `new_set`.
        #[arg(long)]
        star: bool,
    },
    /// Short-run/long-run triple (x̲, x̂, x̄).
    Lechatelier {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        risk: RiskArg,
        /// Long-run point x̄ as comma-separated coordinates.
        #[arg(long, value_delimiter = ',')]
        x_bar: Option<Vec<f64>>,
    },
    /// Optimal path of the dynamic problem.
    SolveDynamic {
        #[command(flatten)]
        common: Common,
        /// Discount factor when the config has no dynamic block.
        #[arg(long, default_value_t = 0.9)]
        delta: f64,
        /// Path verdict to evaluate.
        #[arg(long, value_enum, default_value = "thm3")]
        verdict: DynVerdict,
    },
    /// Equilibrium sequence of short-lived agents.
    SolveMyopic {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.9)]
        delta: f64,
        #[arg(long, value_enum, default_value = "monotone")]
        mode: Mode,
    },
    /// Myopic against forward-looking paths.
    CompareHorizons {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.9)]
        delta: f64,
    },
    /// Run a verification suite (`fixtures` runs the counterexample fixtures).
    Verify {
        theorem: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for repro configs of failing instances and suite.csv.
        #[arg(long, env = "LECHAT_OUT_DIR")]
        out: Option<PathBuf>,
    },
    /// Run an application demo.
    Demo {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(DEMOS))]
        model: String,
        #[arg(long, default_value_t = 0.9)]
        delta: f64,
        /// Print the demo's scenario config instead of running it.
        #[arg(long)]
        print_config: bool,
    },
    /// Print the JSON schema of the scenario config.
    Schema,
}

/// Result of a subcommand: the summary and the verdicts that set the exit
/// status.
struct Outcome {
    summary: Value,
    verdicts: Vec<Verdict>,
}

impl Outcome {
    fn exit_code(&self) -> u8 {
        if self.verdicts.contains(&Verdict::Violated) {
            3
        } else if self.verdicts.contains(&Verdict::Rejected) {
            2
        } else {
            0
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(o) => {
            emit(&pretty(&o.summary));
            ExitCode::from(o.exit_code())
        }
        Err(CliError::Core(Error::Hypothesis(rep))) => {
            eprintln!("rejected: {}", rep.summary());
            emit(&pretty(
                &json!({ "verdict": Verdict::Rejected, "hypothesis": rep }),
            ));
            ExitCode::from(2)
        }
        Err(CliError::Core(e @ Error::Certification(_))) => {
            eprintln!("violated: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("summary serializes")
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("summary serializes")
}

fn run(cmd: Command) -> CliResult<Outcome> {
    match cmd {
        Command::CheckProperties { common } => check_properties(&common),
        Command::SolveStatic { common, risk, star } => solve_static(&common, &risk, star),
        Command::Lechatelier {
            common,
            risk,
            x_bar,
        } => lechatelier(&common, &risk, x_bar),
        Command::SolveDynamic {
            common,
            delta,
            verdict,
        } => solve_dynamic_cmd(&common, delta, verdict),
        Command::SolveMyopic {
            common,
            delta,
            mode,
        } => solve_myopic(&common, delta, mode),
        Command::CompareHorizons { common, delta } => compare_horizons(&common, delta),
        Command::Verify {
            theorem,
            count,
            seed,
            out,
        } => verify(&theorem, count, seed, out.as_deref()),
        Command::Demo {
            model,
            delta,
            print_config,
        } => demo(&model, delta, print_config),
        Command::Schema => Ok(Outcome {
            summary: ScenarioConfig::json_schema(),
            verdicts: vec![],
        }),
    }
}

struct Loaded {
    scenario: Scenario,
    opts: SolveOptions,
}

fn load(common: &Common) -> CliResult<Loaded> {
    let text = std::fs::read_to_string(&common.config).map_err(|source| CliError::Io {
        path: common.config.clone(),
        source,
    })?;
    let scenario = ScenarioConfig::from_json(&text)?.resolve()?;
    if !(common.tolerance >= 0.0 && common.tolerance.is_finite()) {
        return Err(CliError::Usage(format!(
            "tolerance must be a nonnegative number, got {}",
            common.tolerance
        )));
    }
    let check = CheckOptions {
        tolerance: scenario.check.tolerance.max(common.tolerance),
    };
    let opts = SolveOptions {
        check_hypotheses: !common.unsafe_skip_hypotheses,
        check,
    };
    Ok(Loaded { scenario, opts })
}

fn lattice_of(s: &Scenario) -> &GridLattice {
    s.problem.objective.lattice()
}

/// Lottery from the config, with `--risk` applied.
fn lottery(s: &Scenario, risk: &RiskArg) -> CliResult<Option<CostLottery>> {
    let utility = risk.risk.as_deref().map(Utility::parse).transpose()?;
    Ok(match (&s.lottery, utility) {
        (Some(lot), Some(u)) => Some(CostLottery::new(lot.states.clone(), u)?),
        (Some(lot), None) => Some(lot.clone()),
        (None, Some(u)) => Some(CostLottery::degenerate(s.problem.cost.clone(), u)?),
        (None, None) => None,
    })
}

fn dynamic_of(s: &Scenario, delta: f64) -> DynamicScenario {
    if let Some(d) = &s.dynamic {
        return d.clone();
    }
    let mut d = match &s.model {
        Some(m) => m.dynamic(delta),
        None => {
            let p = &s.problem;
            let mut d = DynamicScenario::stationary(
                p.objective.clone(),
                p.theta_lo,
                p.theta_hi,
                p.cost.clone(),
                delta,
            );
            d.x0 = p.x_lo.clone();
            d
        }
    };
    d.lottery = s.lottery.clone();
    d
}

fn out_dir(dir: Option<&FsPath>) -> CliResult<Option<&FsPath>> {
    if let Some(d) = dir {
        std::fs::create_dir_all(d).map_err(|source| CliError::Io {
            path: d.to_path_buf(),
            source,
        })?;
    }
    Ok(dir)
}

fn write_csv(
    dir: Option<&FsPath>,
    name: &str,
    header: &[String],
    rows: &[Vec<String>],
) -> CliResult<()> {
    let Some(dir) = out_dir(dir)? else {
        return Ok(());
    };
    let mut w = csv::Writer::from_path(dir.join(name))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: dir.join(name),
        source,
    })?;
    Ok(())
}

fn coord_header(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}x{i}")).collect()
}

fn coords(p: &Point) -> Vec<String> {
    p.coords().iter().map(f64::to_string).collect()
}

/// Checks that can be inapplicable (for example log-ID with nonpositive
/// values) are reported with their reason.
fn optional(r: lechat_core::Result<PropertyReport>) -> Value {
    match r {
        Ok(r) => to_value(&r),
        Err(e) => json!({ "applicable": false, "reason": e.to_string() }),
    }
}

fn cost_reports(
    cost: &CostFunction,
    l: &GridLattice,
    opts: &CheckOptions,
) -> CliResult<Vec<Value>> {
    let table = cost.bind(l)?;
    let mut v: Vec<Value> = [
        check_minimally_monotone(&table, opts),
        check_strictly_minimally_monotone(&table, opts),
        check_monotone(&table, opts),
        check_strictly_monotone(&table, opts),
        check_monotone_triples(&table, opts),
    ]
    .iter()
    .map(to_value)
    .collect();
    v.push(optional(check_additively_separable(cost, l, opts)));
    v.push(optional(check_separable_convex(cost, l, opts)));
    v.push(optional(check_join_path_inequality(&table, opts)));
    if l.dims() == 1 {
        v.push(optional(check_single_dipped_at_zero(&table, opts)));
    }
    Ok(v)
}

fn check_properties(common: &Common) -> CliResult<Outcome> {
    let Loaded { scenario: s, opts } = load(common)?;
    let o = &s.problem.objective;
    let c = &opts.check;
    let objective: Vec<Value> = vec![
        to_value(&check_objective_supermodular(o, c)),
        to_value(&check_objective_quasi_supermodular(o, c)),
        to_value(&check_increasing_differences(o, c)),
        optional(check_log_increasing_differences(o, c)),
        to_value(&check_single_crossing(o, c)),
        to_value(&check_strict_single_crossing(o, c)),
    ];
    let l = lattice_of(&s);
    let mut costs: Vec<(String, CostFunction)> = vec![("cost".into(), s.problem.cost.clone())];
    if let Some(d) = &s.dynamic {
        for (t, c) in d.cost_prefix.iter().enumerate() {
            costs.push((format!("cost_period_{}", t + 1), c.clone()));
        }
        if d.cost_tail != s.problem.cost {
            costs.push(("cost_tail".into(), d.cost_tail.clone()));
        }
    }
    if let Some(lot) = &s.lottery {
        for (k, st) in lot.states.iter().enumerate() {
            costs.push((format!("lottery_state_{k}"), st.cost.clone()));
        }
    }
    let mut cost_table = serde_json::Map::new();
    for (name, cost) in &costs {
        cost_table.insert(name.clone(), Value::Array(cost_reports(cost, l, c)?));
    }

    let mut rows = Vec::new();
    let mut push = |subject: &str, vals: &[Value]| {
        for v in vals {
            if let Ok(r) = serde_json::from_value::<ReportRow>(v.clone()) {
                let detail = r.detail();
                rows.push(vec![
                    subject.to_string(),
                    r.property,
                    r.holds.to_string(),
                    detail,
                ]);
            }
        }
    };
    push("objective", &objective);
    for (name, vals) in &cost_table {
        push(name, vals.as_array().expect("array"));
    }
    let header = ["subject", "property", "holds", "detail"].map(String::from);
    write_csv(common.out.as_deref(), "properties.csv", &header, &rows)?;
    Ok(Outcome {
        summary: json!({
            "lattice": { "dims": l.dims(), "members": l.len() },
            "parameters": o.params().labels(),
            "objective": objective,
            "costs": cost_table,
        }),
        verdicts: vec![],
    })
}

/// The serialized shape of a property report, for CSV rows.
#[derive(serde::Deserialize)]
struct ReportRow {
    property: String,
    holds: bool,
    #[serde(default)]
    witness: Option<Value>,
    #[serde(default)]
    note: Option<String>,
}

impl ReportRow {
    fn detail(&self) -> String {
        let mut s = String::new();
        if let Some(w) = &self.witness {
            s.push_str(&w.to_string());
        }
        if let Some(n) = &self.note {
            if !s.is_empty() {
                s.push(' ');
            }
            s.push_str(n);
        }
        s
    }
}

fn verdict_of(ok: bool) -> Verdict {
    if ok {
        Verdict::Holds
    } else {
        Verdict::Violated
    }
}

fn natural(s: &Scenario, p: &Point) -> Option<Value> {
    let m = s.model.as_ref()?;
    Some(to_value(&m.natural(p)))
}

fn solve_static(common: &Common, risk: &RiskArg, star: bool) -> CliResult<Outcome> {
    let Loaded { scenario: s, opts } = load(common)?;
    let lot = lottery(&s, risk)?;
    let p = &s.problem;
    let sel = match (&lot, star) {
        (Some(_), true) => {
            return Err(CliError::Usage(
                "--star does not combine with a lottery".into(),
            ))
        }
        (Some(l), false) => theorem1_prime_select(p, l, &opts)?,
        (None, true) => theorem1_star_select(p, &opts)?,
        (None, false) => lechat_core::static_solver::theorem1_select(p, &opts)?,
    };
    let main = verdict_of(sel.conclusion_holds());
    let mut verdicts = vec![main];
    let mut extra = Vec::new();
    if lot.is_none() && p.theta_lo != p.theta_hi {
        for mode in [Strictness::StrictScd, Strictness::StrictCost] {
            let name = match mode {
                Strictness::StrictScd => "prop1a",
                Strictness::StrictCost => "prop1b",
            };
            // Supplementary: a rejection here does not change the exit status.
            let r = rejected_or(name, prop1_forall_check(p, mode, &opts))?;
            if r.verdict == Verdict::Violated {
                verdicts.push(Verdict::Violated);
            }
            extra.push(r);
        }
    }
    let l = lattice_of(&s);
    let rows: Vec<Vec<String>> = sel
        .argmax
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let mut r = vec![i.to_string()];
            r.extend(coords(x));
            r.push(sel.value.to_string());
            r.push((*x == sel.x_hat).to_string());
            r
        })
        .collect();
    let mut header = vec!["index".to_string()];
    header.extend(coord_header("", l.dims()));
    header.extend(["value", "selected"].map(String::from));
    write_csv(common.out.as_deref(), "maximizers.csv", &header, &rows)?;
    Ok(Outcome {
        summary: json!({
            "theorem": if lot.is_some() { "thm1p" } else if star { "thm1star" } else { "thm1" },
            "verdict": main,
            "selection": sel,
            "natural_x_hat": natural(&s, &sel.x_hat),
            "supplementary": extra,
        }),
        verdicts,
    })
}

fn lechatelier(common: &Common, risk: &RiskArg, x_bar: Option<Vec<f64>>) -> CliResult<Outcome> {
    let Loaded { scenario: s, opts } = load(common)?;
    let lot = lottery(&s, risk)?;
    let p = &s.problem;
    let x_bar = x_bar.map(Point::new);
    let res = match &lot {
        Some(l) => {
            if x_bar.is_some() {
                return Err(CliError::Usage(
                    "--x-bar does not combine with a lottery".into(),
                ));
            }
            theorem2_prime_select(p, l, &opts)?
        }
        None => theorem2_select(p, x_bar.as_ref(), &opts)?,
    };
    let main = verdict_of(res.conclusion_holds());
    let mut verdicts = vec![main];
    let mut extra = Vec::new();
    if lot.is_none() {
        let r = rejected_or("prop3", prop3_forall_check(p, x_bar.as_ref(), &opts))?;
        if r.verdict == Verdict::Violated {
            verdicts.push(Verdict::Violated);
        }
        extra.push(r);
    }
    let rows: Vec<Vec<String>> = [
        ("x_lo", &res.x_lo),
        ("x_prime", &res.x_prime),
        ("x_hat", &res.x_hat),
        ("x_bar", &res.x_bar),
    ]
    .iter()
    .map(|(role, x)| std::iter::once(role.to_string()).chain(coords(x)).collect())
    .collect();
    let mut header = vec!["role".to_string()];
    header.extend(coord_header("", lattice_of(&s).dims()));
    write_csv(common.out.as_deref(), "lechatelier.csv", &header, &rows)?;
    let nat = s.model.as_ref().map(|_| {
        json!({
            "x_lo": natural(&s, &res.x_lo),
            "x_hat": natural(&s, &res.x_hat),
            "x_bar": natural(&s, &res.x_bar),
        })
    });
    Ok(Outcome {
        summary: json!({
            "theorem": if lot.is_some() { "thm2p" } else { "thm2" },
            "verdict": main,
            "result": res,
            "natural": nat,
            "supplementary": extra,
        }),
        verdicts,
    })
}

fn path_rows(model: &DynamicModel, ids: &[usize]) -> Vec<Vec<String>> {
    let mut prev = model.x0;
    ids.iter()
        .enumerate()
        .map(|(i, &x)| {
            let t = i + 1;
            let mut r = vec![t.to_string()];
            r.extend(model.lattice.coords(x).iter().map(f64::to_string));
            r.push(model.payoff(t, prev, x).to_string());
            r.push(model.period_cost(t, prev, x).to_string());
            prev = x;
            r
        })
        .collect()
}

fn dyn_report(res: lechat_core::Result<TheoremReport>, name: &str) -> CliResult<TheoremReport> {
    match rejected_or(name, res) {
        Err(Error::PolicyCycle(c)) => {
            let mut r = TheoremReport::new(name, vec![]);
            r.verdict = Verdict::Inconclusive;
            r.note(format!("optimal policy cycles through {c:?}"));
            Ok(r)
        }
        other => Ok(other?),
    }
}

fn solve_dynamic_cmd(common: &Common, delta: f64, verdict: DynVerdict) -> CliResult<Outcome> {
    let Loaded { scenario: s, opts } = load(common)?;
    let d = dynamic_of(&s, delta);
    let model = DynamicModel::new(&d)?;
    let sol = solve_dynamic(&d)?;
    let h = d.report_horizon.max(sol.path.points.len());
    let rows = path_rows(&model, &sol.path.head(h));
    let mut header = vec!["t".to_string()];
    header.extend(coord_header("", model.lattice.dims()));
    header.extend(["payoff", "cost"].map(String::from));
    write_csv(common.out.as_deref(), "path.csv", &header, &rows)?;
    let report = match (verdict, d.lottery.is_some()) {
        (DynVerdict::None, _) => None,
        (DynVerdict::Thm3, true) => Some(dyn_report(theorem3_prime_check(&d, &opts), "thm3p")?),
        (DynVerdict::Thm3, false) => Some(dyn_report(theorem3_check(&d, &opts), "thm3")?),
        (DynVerdict::Thm4, true) => {
            return Err(CliError::Usage(
                "the monotone-path verdict does not take a lottery".into(),
            ))
        }
        (DynVerdict::Thm4, false) => Some(dyn_report(theorem4_check(&d, &opts), "thm4")?),
    };
    Ok(Outcome {
        verdicts: report.iter().map(|r| r.verdict).collect(),
        summary: json!({
            "x0": to_value(&model.lattice.point(model.x0)),
            "value": sol.value,
            "path": sol.path,
            "continuation": sol.path.continuation,
            "bellman_residual": sol.bellman_residual,
            "iterations": sol.iterations,
            "verdicts": report,
        }),
    })
}

fn solve_myopic(common: &Common, delta: f64, mode: Mode) -> CliResult<Outcome> {
    let Loaded { scenario: s, opts } = load(common)?;
    let d = dynamic_of(&s, delta);
    let sel = match mode {
        Mode::Caged => SelectionMode::Caged,
        Mode::Monotone => SelectionMode::Monotone,
        Mode::Arbitrary => SelectionMode::Arbitrary,
    };
    let seq = equilibrium_sequence(&d, sel)?;
    let report = match sel {
        SelectionMode::Arbitrary => None,
        m => Some(dyn_report(theorem5_check(&d, m, &opts), "thm5")?),
    };
    let l = lattice_of(&s);
    let h = d.report_horizon.max(seq.points.len());
    let rows: Vec<Vec<String>> = (1..=h)
        .map(|t| {
            std::iter::once(t.to_string())
                .chain(l.coords(seq.id_at(t)).iter().map(f64::to_string))
                .collect()
        })
        .collect();
    let mut header = vec!["t".to_string()];
    header.extend(coord_header("", l.dims()));
    write_csv(common.out.as_deref(), "myopic.csv", &header, &rows)?;
    let mut verdicts: Vec<Verdict> = report.iter().map(|r| r.verdict).collect();
    verdicts.push(verdict_of(seq.certified));
    Ok(Outcome {
        summary: json!({ "sequence": seq, "verdicts": report }),
        verdicts,
    })
}

fn compare_horizons(common: &Common, delta: f64) -> CliResult<Outcome> {
    let Loaded { scenario: s, opts } = load(common)?;
    let d = dynamic_of(&s, delta);
    let r = dyn_report(theorem6_check(&d, &opts), "thm6")?;
    let n = lattice_of(&s).dims();
    let find = |name: &str| r.paths.iter().find(|p| p.name == name);
    if let (Some(my), Some(fw)) = (find("myopic"), find("forward")) {
        let at = |p: &lechat_core::report::NamedPath, t: usize| -> Vec<f64> {
            p.points
                .get(t)
                .or(p.continuation.as_ref())
                .or(p.points.last())
                .cloned()
                .unwrap_or_default()
        };
        let h = my.points.len().max(fw.points.len());
        let rows: Vec<Vec<String>> = (0..h)
            .map(|t| {
                std::iter::once((t + 1).to_string())
                    .chain(at(my, t).iter().chain(at(fw, t).iter()).map(f64::to_string))
                    .collect()
            })
            .collect();
        let mut header = vec!["t".to_string()];
        header.extend(coord_header("myopic_", n));
        header.extend(coord_header("forward_", n));
        write_csv(common.out.as_deref(), "horizons.csv", &header, &rows)?;
    }
    Ok(Outcome {
        verdicts: vec![r.verdict],
        summary: to_value(&r),
    })
}

fn verify(theorem: &str, count: usize, seed: u64, out: Option<&FsPath>) -> CliResult<Outcome> {
    if theorem == "fixtures" {
        let fx = fixtures()?;
        let verdicts = fx.iter().map(|f| verdict_of(f.passed)).collect();
        return Ok(Outcome {
            summary: json!({ "fixtures": fx }),
            verdicts,
        });
    }
    if !THEOREMS.contains(&theorem) && !EXPLORATORY.contains(&theorem) {
        return Err(CliError::Usage(format!(
            "unknown suite {theorem:?}; expected one of {}, {} or fixtures",
            THEOREMS.join(", "),
            EXPLORATORY.join(", ")
        )));
    }
    let rep = run_suite(theorem, count, seed)?;
    if let Some(dir) = out_dir(out)? {
        for f in &rep.failures {
            let path = dir.join(format!("{theorem}_repro_{}.json", f.index));
            std::fs::write(&path, f.repro.to_json())
                .map_err(|source| CliError::Io { path, source })?;
        }
    }
    let rows: Vec<Vec<String>> = rep
        .failures
        .iter()
        .map(|f| {
            let v = f.verdict.map_or("error".to_string(), |v| v.to_string());
            vec![f.index.to_string(), f.instance_seed.to_string(), v]
        })
        .collect();
    let header = ["index", "instance_seed", "verdict"].map(String::from);
    write_csv(out, "suite.csv", &header, &rows)?;
    let verdicts = vec![verdict_of(rep.passed)];
    Ok(Outcome {
        summary: to_value(&rep),
        verdicts,
    })
}

fn demo_config(model: &str) -> ScenarioConfig {
    let m = match model {
        "pricing" => ModelConfig::Pricing(PricingModel::demo()),
        "factor_demand" => ModelConfig::FactorDemand(FactorDemandModel::demo_substitutes()),
        "labor_supply" => ModelConfig::LaborSupply(LaborSupplyModel::demo()),
        "investment" => ModelConfig::Investment(InvestmentModel::demo_lumpy()),
        _ => ModelConfig::Wishful(WishfulModel::demo()),
    };
    ScenarioConfig {
        model: Some(m),
        ..Default::default()
    }
}

fn demo(model: &str, delta: f64, print_config: bool) -> CliResult<Outcome> {
    if print_config {
        return Ok(Outcome {
            summary: to_value(&demo_config(model)),
            verdicts: vec![],
        });
    }
    let d = run_demo(model, delta)?;
    Ok(Outcome {
        verdicts: vec![verdict_of(d.passed)],
        summary: to_value(&d),
    })
}
