use clap::Parser;
use kummer_cli::{run, Cli, Command};

fn main() {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Verify(args) => run::run_verify(args),
        Command::Eval(args) => run::run_eval(args),
        Command::Sweep(args) => run::run_sweep(args),
        Command::Forensics(args) => run::run_forensics(args),
    };
    std::process::exit(code);
}
