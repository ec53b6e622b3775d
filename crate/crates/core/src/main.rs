use clap::Parser;

fn main() {
    let cli = permancova::cli::Cli::parse();
    std::process::exit(permancova::cli::run(cli));
}
