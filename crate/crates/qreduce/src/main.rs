use clap::Parser;
use std::process;

use qreduce::cli::{run, Cli};
use qreduce::Error;

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::BudgetExceeded { .. } => 3,
                Error::UnknownVerifier(_)
                | Error::InvalidParameter(_)
                | Error::Domain { .. }
                | Error::OutOfRange { .. } => 2,
                _ => 1,
            };
            process::exit(code);
        }
    }
}
