use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fdecoll_cli::config::{write_config, ProblemConfig};
use fdecoll_cli::runner::{run, run_file, RunError};
use fdecoll_cli::{benchmarks, load_config};

/// Spline collocation for nonlinear multi-term fractional differential equations.
#[derive(Parser)]
#[command(name = "fdecoll", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Number of subintervals (overrides `N`).
    #[arg(long)]
    n: Option<usize>,
    /// Number of EOC grid levels (overrides `refinements`).
    #[arg(long)]
    refinements: Option<usize>,
    /// Fixed-point tolerance (overrides `tol`).
    #[arg(long)]
    tol: Option<f64>,
}

impl Overrides {
    fn apply(&self, c: &mut ProblemConfig) {
        if let Some(n) = self.n {
            c.solver.intervals = n;
        }
        if let Some(r) = self.refinements {
            c.solver.refinements = r;
        }
        if let Some(t) = self.tol {
            c.solver.tol = t;
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve a configured problem and write solution.csv, run.log and eoc.csv.
    Solve {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a convergence study (at least two levels; five when unset).
    Eoc {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// List the built-in benchmarks, optionally exporting or running them.
    Benchmarks {
        /// Write each benchmark's configuration file into DIR.
        #[arg(long, value_name = "DIR")]
        export: Option<PathBuf>,
        /// Run every benchmark, writing results into DIR/<name>.
        #[arg(long, value_name = "DIR")]
        run: Option<PathBuf>,
    },
}

fn report(output: &fdecoll_cli::RunOutput, out: &Path) {
    print!("{}", output.log);
    if !output.eoc.is_empty() {
        print!("{}", output.eoc_csv());
    }
    println!("wrote {}", out.display());
}

fn execute(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Solve { config, overrides } => {
            let output = run_file(&config, &overrides.out, |c| overrides.apply(c))?;
            report(&output, &overrides.out);
        }
        Command::Eoc { config, overrides } => {
            let output = run_file(&config, &overrides.out, |c| {
                overrides.apply(c);
                if c.solver.refinements < 2 {
                    c.solver.refinements = 5;
                }
            })?;
            print!("{}", output.eoc_csv());
        }
        Command::Benchmarks { export, run: run_dir } => {
            print!("{}", benchmarks::listing());
            if let Some(dir) = export {
                std::fs::create_dir_all(&dir).map_err(|source| RunError::Io {
                    path: dir.clone(),
                    source,
                })?;
                for b in benchmarks::registry() {
                    let path = dir.join(format!("{}.cfg", b.name));
                    std::fs::write(&path, write_config(&b.config)).map_err(|source| RunError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    // exported files must load back unchanged
                    debug_assert_eq!(load_config(&path).ok().as_ref(), Some(&b.config));
                }
                println!("exported to {}", dir.display());
            }
            if let Some(dir) = run_dir {
                for b in benchmarks::registry() {
                    let output = run(&b.config)?;
                    let target = dir.join(b.name);
                    output.write(&target)?;
                    let slopes: Vec<String> = output
                        .eoc
                        .iter()
                        .filter_map(|r| r.eoc)
                        .map(|s| format!("{s:.3}"))
                        .collect();
                    println!("{}: eoc [{}] -> {}", b.name, slopes.join(", "), target.display());
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
