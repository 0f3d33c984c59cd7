use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use corrlab_cli::{run_file, run_suite, schema, Kind, Overrides};

#[derive(Parser)]
#[command(name = "corrlab", version, about = "Run correspondence and product-system checks")]
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
    /// Run one scenario file.
    Run {
        file: PathBuf,
        /// Absolute tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "json")]
        report: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every scenario in a directory.
    Suite {
        dir: PathBuf,
        #[arg(long, default_value_t = 4)]
        jobs: usize,
        #[arg(long, value_enum, default_value = "text")]
        report: Format,
    },
    /// Print the JSON schema of a scenario kind.
    Schema { kind: String },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            file,
            tol,
            seed,
            report,
            out,
        } => match run_file(&file, &Overrides { tol, seed }) {
            Ok(r) => {
                let text = match report {
                    Format::Json => r.to_json() + "\n",
                    Format::Text => r.to_text(),
                };
                if let Err(e) = emit(&text, out.as_ref()) {
                    eprintln!("{e}");
                    return code(2);
                }
                if let Some(m) = &r.message {
                    eprintln!("{}: {m}", r.name);
                }
                code(r.verdict.exit_code())
            }
            Err(e) => {
                eprintln!("{}: {e}", file.display());
                code(e.exit_code())
            }
        },
        Command::Suite { dir, jobs, report } => match run_suite(&dir, jobs) {
            Ok(s) => {
                for w in &s.warnings {
                    eprintln!("warning: {w}");
                }
                match report {
                    Format::Json => println!("{}", s.to_json()),
                    Format::Text => print!("{}", s.to_text()),
                }
                code(s.verdict.exit_code())
            }
            Err(e) => {
                eprintln!("{e}");
                code(e.exit_code())
            }
        },
        Command::Schema { kind } => match Kind::parse(&kind) {
            Some(k) => {
                println!("{}", serde_json::to_string_pretty(&schema(k)).expect("schemas serialize"));
                code(0)
            }
            None => {
                let names: Vec<&str> = Kind::ALL.iter().map(|k| k.name()).collect();
                eprintln!("unknown kind {kind:?}; expected one of {}", names.join(", "));
                code(2)
            }
        },
    }
}
