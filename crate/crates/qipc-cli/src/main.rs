//! `qipc` command line: worked examples, scenario runner and the seeded
//! property-verification suite.

mod report;
mod scenario;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context as AnyhowContext, Result};
use clap::{Args, Parser, Subcommand};

use qipc::ipc::{
    chi_alice, ipc_modified, leak, memory_gap, min_leak_over_eve, new_ipc_mem, old_ipc,
    old_ipc_generalized, old_ipc_mem, sharp_relation_residual, MemoryContext,
};
use qipc::scenarios::{
    concurrence_crossing, probe_conjecture, run_example1, run_example2, uniform_grid,
    Example2Config, QubitBasis,
};
use qipc::states::Context;

use report::{fmt_value, round6, unit};

#[derive(Parser)]
#[command(
    name = "qipc",
    about = "Quantum context-incompatibility toolkit: information leakage of successive measurements",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Four-context averaging game on the maximally mixed qubit.
    Example1(Example1Args),
    /// Memory sweep over the correlated-pair family, emitted as CSV.
    Example2(Example2Args),
    /// Evaluate the measures requested by a scenario file.
    Run(RunArgs),
    /// Run the seeded property suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Example1Args {
    /// Emit a machine-readable JSON object instead of the table.
    #[arg(long)]
    json: bool,
    /// Display values in bits instead of nats.
    #[arg(long)]
    bits: bool,
}

#[derive(Args)]
struct Example2Args {
    /// Marginal weight of the first eigenvector.
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    /// Lower end of the purity grid (must be at least 0.5).
    #[arg(long = "p-min", default_value_t = 0.5)]
    p_min: f64,
    /// Upper end of the purity grid.
    #[arg(long = "p-max", default_value_t = 1.0)]
    p_max: f64,
    /// Number of grid points.
    #[arg(long = "p-steps", default_value_t = 101)]
    p_steps: usize,
    /// Schmidt basis of the pair (x, y or z).
    #[arg(long, default_value = "y")]
    basis: String,
    /// Write the CSV here; without it the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (JSON).
    scenario: PathBuf,
    /// Emit a machine-readable JSON object instead of the report.
    #[arg(long)]
    json: bool,
    /// Display values in bits instead of nats.
    #[arg(long)]
    bits: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Seed shared by every suite.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trials per suite.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Only run suites whose name contains this substring.
    #[arg(long)]
    suite: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Example1(args) => cmd_example1(&args),
        Command::Example2(args) => cmd_example2(&args),
        Command::Run(args) => cmd_run(&args),
        Command::Verify(args) => cmd_verify(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_example1(args: &Example1Args) -> Result<ExitCode> {
    let result = run_example1()?;
    if args.json {
        let contexts: Vec<serde_json::Value> = result
            .contexts
            .iter()
            .map(|(x, y, old, new)| {
                serde_json::json!({
                    "x": x,
                    "y": y,
                    "old_ipc": round6(display_scale(*old, args.bits)),
                    "ipc_modified": round6(display_scale(*new, args.bits)),
                })
            })
            .collect();
        let object = serde_json::json!({
            "unit": unit(args.bits),
            "contexts": contexts,
            "old_avg": round6(display_scale(result.old_avg, args.bits)),
            "new_avg": round6(display_scale(result.new_avg, args.bits)),
        });
        println!("{}", serde_json::to_string_pretty(&object)?);
    } else {
        println!("context averaging on the maximally mixed qubit ({}):", unit(args.bits));
        for (x, y, old, new) in &result.contexts {
            println!(
                "  X=s_{x} Y=s_{y}: old_ipc = {}  ipc_modified = {}",
                fmt_value(*old, args.bits),
                fmt_value(*new, args.bits)
            );
        }
        println!("old_avg = {}", fmt_value(result.old_avg, args.bits));
        println!("new_avg = {}", fmt_value(result.new_avg, args.bits));
    }
    Ok(ExitCode::SUCCESS)
}

fn display_scale(x: f64, bits: bool) -> f64 {
    if bits {
        x / std::f64::consts::LN_2
    } else {
        x
    }
}

fn cmd_example2(args: &Example2Args) -> Result<ExitCode> {
    if args.p_min < 0.5 {
        bail!("--p-min must be at least 0.5: below it the pair family has no valid Schmidt weight");
    }
    if args.p_max > 1.0 || args.p_max < args.p_min {
        bail!("--p-max must lie in [--p-min, 1.0]");
    }
    if args.p_steps == 0 {
        bail!("--p-steps must be positive");
    }
    let cfg = Example2Config {
        alpha: args.alpha,
        p_grid: uniform_grid(args.p_min, args.p_max, args.p_steps),
        eigenbasis: QubitBasis::parse(&args.basis)?,
    };
    let sweep = run_example2(&cfg)?;

    let mut csv = String::new();
    csv.push_str(
        "p,concurrence,mutual_info,leak_no_mem,leak_with_mem,leak_diff,concurrence_norm,mutual_info_norm,leak_diff_norm\n",
    );
    for row in &sweep.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt_value(row.p, false),
            fmt_value(row.concurrence, false),
            fmt_value(row.mutual_info_in_m, false),
            fmt_value(row.leak_no_mem, false),
            fmt_value(row.leak_with_mem, false),
            fmt_value(row.leak_difference, false),
            fmt_value(row.normalized_concurrence, false),
            fmt_value(row.normalized_mutual_info, false),
            fmt_value(row.normalized_leak_difference, false),
        ));
    }

    match &args.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            file.write_all(csv.as_bytes())?;
            println!("wrote {} rows to {}", sweep.rows.len(), path.display());
            for column in &sweep.degenerate_columns {
                println!("note: column {column} has zero maximum and was left unnormalised");
            }
            if let Some(p_star) = concurrence_crossing(args.alpha) {
                println!("concurrence zero crossing (closed form): p* = {}", fmt_value(p_star, false));
            } else {
                println!("concurrence zero crossing (closed form): none in [0.5, 1]");
            }
            let probe = probe_conjecture(&cfg, false)?;
            for column in &probe.columns {
                match &column.counterexample {
                    None => println!("monotone non-decreasing: {}", column.name),
                    Some(((p0, v0), (p1, v1))) => println!(
                        "NOT monotone: {} drops from {} at p={} to {} at p={}",
                        column.name,
                        fmt_value(*v0, false),
                        fmt_value(*p0, false),
                        fmt_value(*v1, false),
                        fmt_value(*p1, false)
                    ),
                }
            }
        }
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode> {
    let scenario = scenario::load(&args.scenario)?;
    let state = scenario.state.build().context("state")?;
    let x_obs = scenario.observables.x.build().context("observable x")?;
    let y_obs = scenario.observables.y.build().context("observable y")?;

    let default_spec = scenario::InstrumentSpec::Parent;
    let alice_spec = scenario.alice.as_ref().unwrap_or(&default_spec);
    let alice = alice_spec.build(&x_obs).context("alice instrument")?;
    if alice.in_dim() != state.dim() {
        bail!(
            "alice instrument acts on dimension {}, state has {}",
            alice.in_dim(),
            state.dim()
        );
    }

    let mut lines: Vec<(String, f64)> = Vec::new();
    let mut notes: Vec<String> = Vec::new();

    let eve = match scenario.eve.as_ref() {
        Some(spec) => Some(spec.build(&y_obs).context("eve instrument")?),
        None => None,
    };

    for output in &scenario.outputs {
        match output.as_str() {
            "old_ipc" => {
                lines.push(("old_ipc".into(), old_ipc(&state, &x_obs, &y_obs)?));
            }
            "old_ipc_generalized" => {
                let eve = eve_or_parent(&eve, &y_obs)?;
                let value = old_ipc_generalized(&state, &alice, &eve)?;
                if value < -1e-9 {
                    notes.push(
                        "old_ipc_generalized is negative: the spectrum-based information \
                         content is not monotone under the eavesdropper's channel"
                            .into(),
                    );
                }
                lines.push(("old_ipc_generalized".into(), value));
            }
            "chi_alice" => {
                lines.push(("chi_alice".into(), chi_alice(&state, &alice)?.0));
            }
            "leak" => {
                let eve = eve_or_parent(&eve, &y_obs)?;
                let report = leak(&state, &alice, &eve)?;
                lines.push(("leak.chi_alice".into(), report.chi_alice));
                lines.push(("leak.chi_after_eve".into(), report.chi_after_eve));
                lines.push(("leak".into(), report.leak));
            }
            "min_leak" => {
                let report = min_leak_over_eve(&state, &alice, &y_obs)?;
                lines.push(("min_leak".into(), report.leak));
            }
            "ipc_modified" => {
                let context = Context::new(state.clone(), x_obs.clone(), y_obs.clone())?;
                lines.push(("ipc_modified".into(), ipc_modified(&context)?));
            }
            "sharp_relation_residual" => {
                lines.push((
                    "sharp_relation_residual".into(),
                    sharp_relation_residual(&state, &x_obs, &y_obs)?,
                ));
            }
            "old_ipc_mem" | "new_ipc_mem" | "memory_gap" => {
                let memory = scenario
                    .memory
                    .as_ref()
                    .ok_or_else(|| anyhow::anyhow!("output `{output}` needs a memory block"))?;
                let mc = MemoryContext::new(memory.build()?, x_obs.clone(), y_obs.clone())?;
                match output.as_str() {
                    "old_ipc_mem" => lines.push(("old_ipc_mem".into(), old_ipc_mem(&mc)?)),
                    "new_ipc_mem" => lines.push(("new_ipc_mem".into(), new_ipc_mem(&mc)?)),
                    _ => {
                        let gap = memory_gap(&mc)?;
                        lines.push(("memory_gap.old".into(), gap.old_gap));
                        lines.push(("memory_gap.new".into(), gap.new_gap));
                    }
                }
            }
            other => bail!("unknown output `{other}`"),
        }
    }

    if args.json {
        let mut object = serde_json::Map::new();
        object.insert("unit".into(), serde_json::json!(unit(args.bits)));
        for (name, value) in &lines {
            object.insert(
                name.clone(),
                serde_json::json!(round6(display_scale(*value, args.bits))),
            );
        }
        if !notes.is_empty() {
            object.insert("notes".into(), serde_json::json!(notes));
        }
        println!("{}", serde_json::to_string_pretty(&serde_json::Value::Object(object))?);
    } else {
        println!("scenario: {} ({})", args.scenario.display(), unit(args.bits));
        for (name, value) in &lines {
            println!("{name} = {}", fmt_value(*value, args.bits));
        }
        for note in &notes {
            println!("note: {note}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn eve_or_parent(
    eve: &Option<qipc::instruments::Instrument>,
    y_obs: &qipc::measurements::Observable,
) -> Result<qipc::instruments::Instrument> {
    match eve {
        Some(inst) => Ok(inst.clone()),
        None => Ok(qipc::instruments::parent_instrument(y_obs)?),
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let outcomes = qipc::verify::run_filtered(args.suite.as_deref(), args.seed, args.trials)?;
    if outcomes.is_empty() {
        bail!(
            "no suite matches `{}` (available: {})",
            args.suite.as_deref().unwrap_or(""),
            qipc::verify::available().join(", ")
        );
    }
    println!(
        "{:<22} {:>7} {:>14} {:>11}  status",
        "suite", "trials", "max_violation", "tolerance"
    );
    let mut failures = 0usize;
    for outcome in &outcomes {
        println!(
            "{:<22} {:>7} {:>14.3e} {:>11.1e}  {}",
            outcome.name,
            outcome.trials,
            outcome.max_violation,
            outcome.tolerance,
            if outcome.passed { "pass" } else { "FAIL" }
        );
        if !outcome.passed {
            failures += 1;
        }
    }
    if failures == 0 {
        println!("all {} suites passed", outcomes.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{failures} suite(s) failed");
        Ok(ExitCode::FAILURE)
    }
}
