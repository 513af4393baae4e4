use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use strichartz_harness::catalog::{list_experiments, render_text};
use strichartz_harness::run::{exit_code, output_dir, run};
use strichartz_harness::{ExperimentConfig, HarnessError, Report};

#[derive(Parser)]
#[command(name = "strichartz", version, about = "Run and re-check numerical experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config and write its report.
    Run {
        config: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Show the experiment catalog.
    List {
        /// Emit JSON instead of text.
        #[arg(long)]
        machine: bool,
    },
    /// Re-evaluate every assertion in a JSON report.
    Check { report: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<i32, HarnessError> {
    match command {
        Command::Run { config, seed, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            let report = run(&cfg)?;
            let dir = output_dir(&cfg, out.as_deref());
            let written = report.write(&dir)?;
            summarize(&report);
            println!("wrote {}", written[0].display());
            Ok(exit_code(&report))
        }
        Command::List { machine } => {
            let entries = list_experiments();
            if machine {
                let json = serde_json::to_string_pretty(&entries).map_err(|e| HarnessError::Report(e.to_string()))?;
                println!("{json}");
            } else {
                print!("{}", render_text(&entries));
            }
            Ok(0)
        }
        Command::Check { report } => {
            let r = Report::load(&report)?;
            let summary = r.check();
            for name in &summary.inconsistent {
                println!("inconsistent: {name} (recorded verdict disagrees with its fields)");
            }
            for name in &summary.failed {
                println!("failed: {name}");
            }
            println!(
                "{}: {} assertions, {} failed, {} inconsistent",
                r.metadata.experiment,
                summary.total,
                summary.failed.len(),
                summary.inconsistent.len()
            );
            Ok(if summary.ok() { 0 } else { 1 })
        }
    }
}

fn summarize(report: &Report) {
    for a in &report.assertions {
        let mark = if a.pass { "pass" } else { "FAIL" };
        println!("{mark} {:<40} observed {} expected {} tol {}", a.name, a.observed, a.expected, a.tolerance);
    }
    println!("{} in {:.2} s", report.metadata.experiment, report.metadata.timing.elapsed_seconds);
}
