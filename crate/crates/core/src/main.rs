use clap::Parser;

use hodgekit::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let outcome = run(&cli);
    if !outcome.log.is_empty() {
        eprintln!("{}", outcome.log);
    }
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.output) {
                eprintln!("cannot write {}: {e}", path.display());
                std::process::exit(2);
            }
        }
        None => print!("{}", outcome.output),
    }
    std::process::exit(outcome.code);
}
