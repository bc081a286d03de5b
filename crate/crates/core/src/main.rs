use clap::Parser;
use multl1::cli::{execute, run::configure_threads, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = configure_threads().and_then(|_| execute(&cli.command)) {
        eprintln!("multl1: {e}");
        std::process::exit(e.exit_code());
    }
}
