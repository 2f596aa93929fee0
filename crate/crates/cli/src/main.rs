use std::path::PathBuf;
use std::process::ExitCode;

use brstkit_cli::problem::Window;
use brstkit_cli::{load, run, summary, Outcome, Task};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "brstkit", version, about = "BRST cohomology of polynomial constraint systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline on a problem file.
    Run {
        file: PathBuf,
        /// Overrides the file's window, as `D,S,G,N`.
        #[arg(long)]
        window: Option<Window>,
        /// Overrides the file's tasks, comma separated.
        #[arg(long, value_delimiter = ',')]
        tasks: Option<Vec<Task>>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Also checks the bracket axioms on random elements.
        #[arg(long)]
        seed: Option<u64>,
        /// Writes the JSON report here in addition to stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Parse and validate a problem file only.
    Check { file: PathBuf },
}

fn read(file: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(file).map_err(|e| {
        eprintln!("{}: {e}", file.display());
        ExitCode::from(Outcome::InputError as u8)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { file } => {
            let text = match read(&file) {
                Ok(t) => t,
                Err(code) => return code,
            };
            match load(&text) {
                Ok(p) => {
                    println!(
                        "ok: {} variables, {} constraints, tasks {}",
                        p.spec.variables.len(),
                        p.constraints.len(),
                        p.spec.tasks.iter().map(|t| t.name()).collect::<Vec<_>>().join(",")
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{}:\n{e}", file.display());
                    ExitCode::from(Outcome::InputError as u8)
                }
            }
        }
        Command::Run { file, window, tasks, format, seed, output } => {
            let text = match read(&file) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let mut problem = match load(&text) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("{}:\n{e}", file.display());
                    return ExitCode::from(Outcome::InputError as u8);
                }
            };
            if let Some(w) = window {
                problem.spec.window = w;
            }
            if let Some(mut t) = tasks {
                t.sort();
                t.dedup();
                problem.spec.tasks = t;
            }
            let report = run(&problem, seed);
            let json = report.to_json();
            if let Some(path) = output {
                if let Err(e) = std::fs::write(&path, &json) {
                    eprintln!("{}: {e}", path.display());
                    return ExitCode::from(Outcome::InternalError as u8);
                }
            }
            match format {
                Format::Json => println!("{json}"),
                Format::Text => print!("{}", summary::render(&report)),
            }
            ExitCode::from(report.outcome() as u8)
        }
    }
}
