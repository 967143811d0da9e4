use clap::Parser;

fn main() {
    let cli = quasi1d_cli::Cli::parse();
    if let Err(e) = quasi1d_cli::run(cli) {
        eprintln!("{}", e.record());
        std::process::exit(e.exit_code());
    }
}
