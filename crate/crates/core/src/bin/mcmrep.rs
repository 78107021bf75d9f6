use clap::Parser;

fn main() {
    let cli = mcmrep::cli::Cli::parse();
    std::process::exit(mcmrep::cli::main_with(cli));
}
