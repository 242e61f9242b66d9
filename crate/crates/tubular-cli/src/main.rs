use clap::Parser;
use std::io::Write;
use tubular_cli::{machine, run};

use run::{Cli, Outcome};

fn main() {
    let cli = Cli::parse();
    match run::dispatch(&cli) {
        Ok(Outcome { text, unknown_only }) => {
            // tolerate a closed pipe downstream
            if writeln!(std::io::stdout(), "{text}").is_err() {
                std::process::exit(0);
            }
            if unknown_only && cli.strict {
                std::process::exit(2);
            }
        }
        Err(err) => {
            if cli.format == run::Format::Machine {
                let _ = writeln!(std::io::stdout(), "{}", machine::error_document(&err));
            } else {
                eprintln!("error: {err}");
            }
            std::process::exit(1);
        }
    }
}
