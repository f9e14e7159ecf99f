use clap::Parser;

fn main() {
    let cli = forested_cli::Cli::parse();
    std::process::exit(forested_cli::run(&cli));
}
