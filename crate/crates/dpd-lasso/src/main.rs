use clap::Parser;
use dpd_lasso::cli;

fn main() {
    let invocation = cli::CliInvocation::parse();
    std::process::exit(cli::run(&invocation));
}
