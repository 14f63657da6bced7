//! `langevin-lab`: runs declared experiments, verification suites and the
//! KL step-size planner.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod experiments;
mod report;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use langevin_core::bounds::{kl_ula_bound, plan_kl};

use config::Config;
use experiments::{Options, Outcome};
use report::{num, svg_line_chart};
use suites::Suite;

const DEFAULT_OUT: &str = "langevin-lab-out";

#[derive(Parser)]
#[command(
    name = "langevin-lab",
    version,
    about = "Numerical laboratory for Langevin sampling bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiments declared in a TOML config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: RunArgs,
    },
    /// Run a built-in verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[command(flatten)]
        opts: RunArgs,
    },
    /// Plan a step size and iteration count reaching KL accuracy `delta`.
    Plan {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "L")]
        smoothness: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        h0: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Output directory; overrides the config's `output_dir`.
    #[arg(long, env = "LANGEVIN_LAB_OUT")]
    out_dir: Option<PathBuf>,
    /// Run independent experiments concurrently.
    #[arg(long)]
    parallel: bool,
    /// Skip SVG plots.
    #[arg(long)]
    no_plots: bool,
    /// Evaluate the KL bound even above its step-size cap (testing only).
    #[arg(long, hide = true)]
    unchecked_step_size: bool,
}

fn main() -> ExitCode {
    match real_main(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, opts } => {
            let cfg = Config::load(&config)?;
            let base = config.parent().map(Path::to_path_buf).unwrap_or_default();
            let out_dir = opts
                .out_dir
                .clone()
                .or_else(|| cfg.output_dir.as_ref().map(|d| base.join(d)))
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
            run_config(&cfg, &out_dir, &opts)
        }
        Command::Verify { suite, opts } => {
            let cfg = Config::parse(&suite.config_text(), &format!("suite `{}`", suite.name()))?;
            let out_dir = opts
                .out_dir
                .clone()
                .unwrap_or_else(|| Path::new(DEFAULT_OUT).join(suite.name()));
            run_config(&cfg, &out_dir, &opts)
        }
        Command::Plan {
            alpha,
            smoothness,
            n,
            delta,
            h0,
        } => {
            let p = plan_kl(alpha, smoothness, n, delta, h0)?;
            let rep = kl_ula_bound(alpha, smoothness, n, p.eps, p.k, h0)?;
            println!("eps = {}", num(p.eps));
            println!("k = {}", p.k);
            println!("regime = {}", p.regime);
            println!("bound = {} (delta = {})", num(rep.bound.value()), num(delta));
            Ok(rep.bound.value() <= delta)
        }
    }
}

fn run_config(cfg: &Config, out_dir: &Path, args: &RunArgs) -> Result<bool> {
    if cfg.experiments.is_empty() {
        println!("no experiments declared");
        return Ok(true);
    }
    let opts = Options {
        tolerances: cfg.tolerances,
        unchecked_step_size: args.unchecked_step_size,
    };
    let results: Vec<Result<Outcome>> = if args.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = cfg
                .experiments
                .iter()
                .map(|e| s.spawn(|| experiments::run(e, &opts)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("experiment thread panicked"))
                .collect()
        })
    } else {
        cfg.experiments.iter().map(|e| experiments::run(e, &opts)).collect()
    };
    std::fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let mut all_ok = true;
    let mut errors = Vec::new();
    let mut failed = Vec::new();
    for (exp, result) in cfg.experiments.iter().zip(results) {
        let out = match result {
            Ok(o) => o,
            Err(e) => {
                eprintln!("[{}] error: {e:#}", exp.name);
                errors.push(exp.name.clone());
                continue;
            }
        };
        let csv_path = out_dir.join(format!("{}.csv", out.name));
        write(&csv_path, &out.csv)?;
        for (suffix, body) in &out.extra {
            write(&out_dir.join(format!("{}_{suffix}.csv", out.name)), body)?;
        }
        let want_plot = cfg.plots && !args.no_plots && exp.plot.unwrap_or(true);
        if let (true, Some(plot)) = (want_plot, &out.plot) {
            write(&out_dir.join(format!("{}.svg", out.name)), &svg_line_chart(plot))?;
        }
        let status = if out.passed() { "ok" } else { "VIOLATED" };
        println!(
            "[{}] {}: {status}, {} checks, {} violations -> {}",
            out.name,
            out.kind.name(),
            out.checked,
            out.violations,
            csv_path.display()
        );
        for note in &out.notes {
            println!("  {note}");
        }
        for f in &out.failures {
            println!("  violation: {f}");
        }
        if !out.passed() {
            all_ok = false;
            failed.push(format!("{} ({} violations)", out.name, out.violations));
        }
    }
    if !failed.is_empty() {
        println!("bound violations in: {}", failed.join(", "));
    }
    if !errors.is_empty() {
        anyhow::bail!("{} experiment(s) failed to run: {}", errors.len(), errors.join(", "));
    }
    Ok(all_ok)
}

fn write(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).with_context(|| format!("cannot write {}", path.display()))
}
