use clap::Parser;
use lamicone_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(run) => {
            print!("{}", run.output);
            std::process::exit(run.code);
        }
        Err(e) => {
            eprintln!("lamicone: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
