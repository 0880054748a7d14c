use clap::Parser;

fn main() {
    let cli = circlang_cli::args::Cli::parse();
    std::process::exit(circlang_cli::run(cli));
}
