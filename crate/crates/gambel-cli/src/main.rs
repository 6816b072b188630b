use clap::Parser;
use gambel_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = gambel_cli::init_threads() {
        eprintln!("gambel: {e}");
        std::process::exit(e.exit_code());
    }
    if let Err(e) = run(cli) {
        eprintln!("gambel: {e}");
        std::process::exit(e.exit_code());
    }
}
