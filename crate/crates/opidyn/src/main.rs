use clap::Parser;

fn main() {
    let cli = opidyn::cli::Cli::parse();
    std::process::exit(opidyn::cli::run(cli));
}
