//! The `bgraph` command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or runtime errors (including a failed
//! switching verification), 2 when the instance is infeasible.

pub mod error;
pub mod output;
pub mod parse;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use bgraph::battery::{battery, Instance};
use bgraph::exactcount::{
    exact_bgraph_count, exact_class_table, exact_graph_count, exact_induced_probability,
    exact_p_simple, ClassKey, ExactConfig,
};
use bgraph::formulas::{
    count_restricted_pairings, g_asymptotic, g_bgraph_asymptotic, independent_set_probability,
    induced_probability_asymptotic, FormulaConfig, FormulaOutput,
};
use bgraph::montecarlo::{
    estimate_class_conditional, estimate_defect_means, estimate_induced_probability,
    estimate_p_simple, trial_rng, McConfig,
};
use bgraph::numeric::ln_rational;
use bgraph::pairing::{defect_census, Sampler};
use bgraph::parallel::Execution;
use bgraph::switching::{double_count_table, SwitchingKind};
use bgraph::{feasibility, Bipartition, DegreeSequence, InducedSubgraphSpec};
use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::json;

pub use error::CliError;
use output::{Record, Sink};

#[derive(Debug, Parser)]
#[command(
    name = "bgraph",
    version,
    about = "Induced-subgraph probabilities for random graphs with given degrees"
)]
struct Cli {
    /// Write CSV instead of JSON lines.
    #[arg(long, global = true)]
    csv: bool,
    /// Run data-parallel loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct InstanceArgs {
    /// Degree spec, e.g. `3,3,2,1` or `3^100`.
    #[arg(long, short = 'd')]
    degrees: String,
    /// 1-based indices of the independent side L, or `none`.
    #[arg(long, default_value = "none")]
    left: String,
    /// Subgraph file: header `S: i1 ... is`, then one `u v` edge per line.
    #[arg(long)]
    subgraph: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct McArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Seed for the trial generators; a fresh one is drawn and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Asymptotic formula values with their error scales.
    Formula {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Probability that this many vertices of a regular graph are independent.
        #[arg(long)]
        independent_set_size: Option<u64>,
    },
    /// Exact counts and probabilities by exhaustive oracles.
    Exact {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Also list the defect class sizes of the restricted pairings.
        #[arg(long)]
        class_table: bool,
    },
    /// Sample restricted pairings with their defect censuses.
    Sample {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte Carlo estimates.
    #[command(subcommand)]
    Estimate(EstimateCommand),
    /// Check the switching double-count identities exhaustively.
    VerifySwitchings {
        /// Degree spec; omit to run the built-in battery.
        #[arg(long, short = 'd')]
        degrees: Option<String>,
        #[arg(long, default_value = "none")]
        left: String,
        /// Switching kinds to check (default: all).
        #[arg(long = "kind")]
        kinds: Vec<String>,
    },
    /// Independent-set probability of regular graphs over a grid of (n, d, s).
    Sweep {
        /// Vertex counts: `INT`, `A..B` or `A..B:STEP`, comma separated.
        #[arg(long)]
        n: String,
        #[arg(long)]
        d: String,
        #[arg(long, default_value = "0")]
        s: String,
        /// Largest `n d` for which the exact oracle runs.
        #[arg(long, default_value_t = 36)]
        exact_max_points: u64,
        /// Also estimate by Monte Carlo with this many trials.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
enum EstimateCommand {
    /// Probability that a restricted pairing is simple.
    PSimple(McArgs),
    /// Means of the defect counts.
    DefectMeans(McArgs),
    /// 2-path moments conditional on a defect class.
    ClassConditional {
        #[command(flatten)]
        mc: McArgs,
        /// Class `l0,l1,l2`.
        #[arg(long, default_value = "0,0,0")]
        class: String,
    },
    /// Probability that the induced subgraph on S equals H (needs --subgraph).
    Induced(McArgs),
}

struct Ctx<'a> {
    sink: Sink<'a>,
    err: &'a mut dyn Write,
    execution: Execution,
}

struct Parsed {
    label: String,
    ds: DegreeSequence,
    bip: Bipartition,
    sub: Option<InducedSubgraphSpec>,
}

impl InstanceArgs {
    fn parse(&self) -> Result<Parsed, CliError> {
        let ds = parse::parse_degrees(&self.degrees)?;
        let bip = parse::parse_left(&self.left, ds.n())?;
        let sub = match &self.subgraph {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                Some(parse::parse_subgraph(&text, ds.n())?)
            }
            None => None,
        };
        let mut label = self.degrees.clone();
        if !bip.left().is_empty() {
            label.push_str(&format!(" L={}", self.left));
        }
        if let Some(path) = &self.subgraph {
            label.push_str(&format!(" H={}", path.display()));
        }
        Ok(Parsed {
            label,
            ds,
            bip,
            sub,
        })
    }
}

fn require_feasible(p: &Parsed) -> Result<(), CliError> {
    let f = feasibility(&p.ds, &p.bip);
    if f.is_feasible() {
        Ok(())
    } else {
        Err(CliError::Infeasible(format!("instance is infeasible: {f}")))
    }
}

fn seed_or_fresh(seed: Option<u64>, err: &mut dyn Write) -> Result<u64, CliError> {
    Ok(match seed {
        Some(s) => s,
        None => {
            let s = rand::random();
            writeln!(err, "seed: {s}")?;
            s
        }
    })
}

fn formula_record(
    label: &str,
    quantity: &str,
    out: &FormulaOutput,
    err: &mut dyn Write,
) -> Result<Record, CliError> {
    for flag in &out.flags {
        writeln!(err, "warning: {quantity}: {flag:?}")?;
    }
    Ok(Record::real(label, quantity, out.value(), out.point.ln()).hint(out.error_hint))
}

fn cmd_formula(ctx: &mut Ctx, inst: &InstanceArgs, s: Option<u64>) -> Result<(), CliError> {
    let p = inst.parse()?;
    require_feasible(&p)?;
    let cfg = FormulaConfig::default();
    if let Some(s) = s {
        let d = p.ds.regular_degree().ok_or_else(|| {
            CliError::Usage("--independent-set-size needs a regular degree sequence".into())
        })?;
        let out = independent_set_probability(p.ds.n() as u64, d, s, &cfg)?;
        let r = formula_record(&p.label, "p_independent", &out.full, ctx.err)?;
        ctx.sink.emit(&r)?;
        let r = formula_record(&p.label, "p_independent_stirling", &out.stirling, ctx.err)?;
        return ctx.sink.emit(&r);
    }
    if let Some(sub) = &p.sub {
        let out = induced_probability_asymptotic(&p.ds, sub, &cfg)?;
        let r = formula_record(&p.label, "p_induced", &out, ctx.err)?;
        return ctx.sink.emit(&r);
    }
    let r = formula_record(&p.label, "g", &g_asymptotic(&p.ds, &cfg), ctx.err)?;
    ctx.sink.emit(&r)?;
    if !p.bip.left().is_empty() {
        let out = g_bgraph_asymptotic(&p.ds, &p.bip, &cfg)?;
        let r = formula_record(&p.label, "g_bgraph", &out, ctx.err)?;
        ctx.sink.emit(&r)?;
        let mu = bgraph::mu_parameters(&p.ds, &p.bip)?;
        let sum = mu.to_f64().iter().sum::<f64>();
        let r = Record::real(&p.label, "p_simple", (-sum).exp(), -sum).hint(p.ds.error_scale());
        ctx.sink.emit(&r)?;
    }
    Ok(())
}

fn rational_record(label: &str, quantity: &str, r: &num_rational::BigRational) -> Record {
    Record::real(
        label,
        quantity,
        r.to_f64().unwrap_or(f64::NAN),
        ln_rational(r),
    )
}

fn cmd_exact(ctx: &mut Ctx, inst: &InstanceArgs, class_table: bool) -> Result<(), CliError> {
    let p = inst.parse()?;
    require_feasible(&p)?;
    let cfg = ExactConfig {
        execution: ctx.execution,
        ..ExactConfig::default()
    };
    let label = p.label.as_str();
    if let Some(sub) = &p.sub {
        let prob = exact_induced_probability(&p.ds, sub, &cfg)?;
        return ctx.sink.emit(&rational_record(label, "p_induced", &prob));
    }
    if p.bip.left().is_empty() {
        ctx.sink
            .emit(&Record::count(label, "g", &exact_graph_count(&p.ds, &cfg)?))?;
    } else {
        ctx.sink.emit(&Record::count(
            label,
            "g_bgraph",
            &exact_bgraph_count(&p.ds, &p.bip, &cfg)?,
        ))?;
        ctx.sink.emit(&Record::count(
            label,
            "pairings",
            &count_restricted_pairings(&p.ds, &p.bip)?,
        ))?;
        ctx.sink.emit(&rational_record(
            label,
            "p_simple",
            &exact_p_simple(&p.ds, &p.bip, &cfg)?,
        ))?;
    }
    if class_table {
        let table = exact_class_table(&p.ds, &p.bip, &cfg)?;
        for (key, count) in table.classes.iter().filter(|(k, _)| !k.has_higher_defect) {
            ctx.sink
                .emit(&Record::count(label, format!("class{key}"), count))?;
        }
        ctx.sink.emit(&Record::count(
            label,
            "class_higher_defect",
            &table.higher_defect_total(),
        ))?;
    }
    Ok(())
}

fn cmd_sample(
    ctx: &mut Ctx,
    inst: &InstanceArgs,
    count: u64,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let p = inst.parse()?;
    require_feasible(&p)?;
    let seed = seed_or_fresh(seed, ctx.err)?;
    let sampler = Sampler::new(&p.ds, &p.bip)?;
    for i in 0..count {
        let pairing = sampler.sample(&mut trial_rng(seed, i));
        let census = serde_json::to_value(defect_census(&pairing)).expect("census serializes");
        for (quantity, value) in [("pairing", json!(pairing.to_text())), ("census", census)] {
            let mut r = Record::new(&p.label, format!("{quantity}[{i}]"), value);
            r.seed = Some(seed);
            ctx.sink.emit(&r)?;
        }
    }
    Ok(())
}

fn parse_class(s: &str) -> Result<ClassKey, CliError> {
    let parts: Vec<u64> = s
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("class: expected l0,l1,l2, found {s:?}")))?;
    let [l0, l1, l2] = parts[..] else {
        return Err(CliError::Usage(format!(
            "class: expected l0,l1,l2, found {s:?}"
        )));
    };
    Ok(ClassKey::new(l0, l1, l2))
}

fn cmd_estimate(ctx: &mut Ctx, what: &EstimateCommand) -> Result<(), CliError> {
    let mc = match what {
        EstimateCommand::PSimple(mc)
        | EstimateCommand::DefectMeans(mc)
        | EstimateCommand::Induced(mc) => mc,
        EstimateCommand::ClassConditional { mc, .. } => mc,
    };
    let p = mc.instance.parse()?;
    require_feasible(&p)?;
    let cfg =
        McConfig::new(mc.trials, seed_or_fresh(mc.seed, ctx.err)?).with_execution(ctx.execution);
    let label = p.label.as_str();
    let mut records = Vec::new();
    match what {
        EstimateCommand::PSimple(_) => {
            let r = estimate_p_simple(&p.ds, &p.bip, &cfg)?;
            records.push(Record::estimate(label, "p_simple", &r.estimate));
            let sum: f64 = r.mu.iter().sum();
            records.push(
                Record::real(label, "p_simple_predicted", r.predicted, -sum)
                    .hint(p.ds.error_scale()),
            );
        }
        EstimateCommand::DefectMeans(_) => {
            let r = estimate_defect_means(&p.ds, &p.bip, &cfg)?;
            for (name, e) in [
                ("B0", r.b0),
                ("B1", r.b1),
                ("B2", r.b2),
                ("T1", r.t1),
                ("T2", r.t2),
                ("I", r.double_loops),
            ] {
                records.push(Record::estimate(label, name, &e));
            }
            for (i, mu) in r.mu.iter().enumerate() {
                records.push(Record::real(label, format!("mu{i}"), *mu, mu.ln()));
            }
        }
        EstimateCommand::ClassConditional { class, .. } => {
            let r = estimate_class_conditional(&p.ds, &p.bip, parse_class(class)?, &cfg)?;
            let mut hits = Record::new(label, "hits", r.hits);
            hits.seed = Some(r.seed);
            hits.trials = Some(r.trials);
            records.push(hits);
            for i in 0..4 {
                records.push(Record::estimate(label, format!("a{}", i + 1), &r.a[i]));
                records.push(Record::estimate(label, format!("b{}", i + 1), &r.b[i]));
            }
            records.push(Record::new(
                label,
                "identity_violations",
                r.identity_violations,
            ));
            for (name, v) in [
                ("a1_predicted", r.predicted_a1),
                ("a3_predicted", r.predicted_a3),
            ] {
                if let Some(v) = v {
                    records.push(Record::real(label, name, v, v.ln()));
                }
            }
        }
        EstimateCommand::Induced(_) => {
            let sub = p
                .sub
                .as_ref()
                .ok_or_else(|| CliError::Usage("estimate induced needs --subgraph".into()))?;
            let e = estimate_induced_probability(&p.ds, sub, &cfg)?;
            records.push(Record::estimate(label, "p_induced", &e));
        }
    }
    for r in &records {
        ctx.sink.emit(r)?;
    }
    Ok(())
}

fn cmd_verify(
    ctx: &mut Ctx,
    degrees: Option<&str>,
    left: &str,
    kinds: &[String],
) -> Result<(), CliError> {
    let instances = match degrees {
        Some(spec) => {
            let ds = parse::parse_degrees(spec)?;
            let bip = parse::parse_left(left, ds.n())?;
            let f = feasibility(&ds, &bip);
            if !f.is_feasible() {
                return Err(CliError::Infeasible(format!("instance is infeasible: {f}")));
            }
            vec![Instance {
                name: spec.to_string(),
                ds,
                bip,
            }]
        }
        None => battery(),
    };
    let kinds: Vec<SwitchingKind> = if kinds.is_empty() {
        SwitchingKind::ALL.to_vec()
    } else {
        kinds.iter().map(|k| k.parse()).collect::<Result<_, _>>()?
    };
    let cfg = ExactConfig {
        execution: ctx.execution,
        ..ExactConfig::default()
    };
    let mut failures = 0;
    for inst in &instances {
        for &kind in &kinds {
            let table = double_count_table(&inst.ds, &inst.bip, kind, &cfg)?;
            for row in &table.rows {
                failures += u64::from(!row.holds());
                let value = json!({
                    "forward_sum": row.forward_sum,
                    "inverse_sum": row.inverse_sum,
                    "high_size": row.high_size,
                    "low_size": row.low_size,
                    "holds": row.holds(),
                });
                let q = format!("double_count {kind} {}->{}", row.high, row.low);
                ctx.sink.emit(&Record::new(&inst.name, q, value))?;
            }
            let leaks = table.class_violations + table.restriction_violations;
            failures += leaks;
            ctx.sink.emit(&Record::new(
                &inst.name,
                format!("class_violations {kind}"),
                leaks,
            ))?;
        }
    }
    if failures > 0 {
        return Err(CliError::Runtime(format!(
            "{failures} switching checks failed"
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    ctx: &mut Ctx,
    n: &str,
    d: &str,
    s: &str,
    exact_max_points: u64,
    trials: Option<u64>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let ns = parse::parse_range_list(n, "n")?;
    let ds_ = parse::parse_range_list(d, "d")?;
    let ss = parse::parse_range_list(s, "s")?;
    let seed = match trials {
        Some(_) => Some(seed_or_fresh(seed, ctx.err)?),
        None => None,
    };
    let fcfg = FormulaConfig::default();
    let ecfg = ExactConfig {
        execution: ctx.execution,
        ..ExactConfig::default()
    };
    for &n in &ns {
        for &d in &ds_ {
            for &s in &ss {
                let label = format!("n={n},d={d},s={s}");
                if (n * d) % 2 == 1 || 2 * s >= n || d as usize >= n as usize {
                    writeln!(ctx.err, "skipping {label}: outside the formula's range")?;
                    continue;
                }
                let d32 =
                    u32::try_from(d).map_err(|_| CliError::Usage(format!("d = {d} too large")))?;
                let out = independent_set_probability(n, d32, s, &fcfg)?;
                let r = formula_record(&label, "p_independent_formula", &out.full, ctx.err)?;
                ctx.sink.emit(&r)?;
                let r = formula_record(&label, "p_independent_stirling", &out.stirling, ctx.err)?;
                ctx.sink.emit(&r)?;
                let ds = DegreeSequence::regular(n as usize, d32);
                let spec = InducedSubgraphSpec::empty(n as usize, (0..s as usize).collect())?;
                if n * d <= exact_max_points {
                    let prob = exact_induced_probability(&ds, &spec, &ecfg)?;
                    ctx.sink
                        .emit(&rational_record(&label, "p_independent_exact", &prob))?;
                }
                if let (Some(trials), Some(seed)) = (trials, seed) {
                    let cfg = McConfig::new(trials, seed).with_execution(ctx.execution);
                    match estimate_induced_probability(&ds, &spec, &cfg) {
                        Ok(e) => {
                            ctx.sink
                                .emit(&Record::estimate(&label, "p_independent_mc", &e))?
                        }
                        Err(e) => writeln!(ctx.err, "{label}: {e}")?,
                    }
                }
            }
        }
    }
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let mut ctx = Ctx {
        sink: Sink::new(out, cli.csv)?,
        err,
        execution: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    match &cli.command {
        Command::Formula {
            instance,
            independent_set_size,
        } => cmd_formula(&mut ctx, instance, *independent_set_size)?,
        Command::Exact {
            instance,
            class_table,
        } => cmd_exact(&mut ctx, instance, *class_table)?,
        Command::Sample {
            instance,
            count,
            seed,
        } => cmd_sample(&mut ctx, instance, *count, *seed)?,
        Command::Estimate(what) => cmd_estimate(&mut ctx, what)?,
        Command::VerifySwitchings {
            degrees,
            left,
            kinds,
        } => cmd_verify(&mut ctx, degrees.as_deref(), left, kinds)?,
        Command::Sweep {
            n,
            d,
            s,
            exact_max_points,
            trials,
            seed,
        } => cmd_sweep(&mut ctx, n, d, s, *exact_max_points, *trials, *seed)?,
    }
    ctx.sink.finish()
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
