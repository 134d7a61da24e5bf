mod args;
mod run;

use clap::error::ErrorKind;
use clap::Parser;

use scenery_core::error::Error;

fn main() {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are successes; anything else is a usage error.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run::run(cli) {
        eprintln!("error: {err}");
        let code = match err {
            Error::CapExceeded { .. } => 2,
            _ => 1,
        };
        std::process::exit(code);
    }
}
