use std::io;
use std::time::Instant;

use clap::Parser;
use dmbl_bench::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    let code = run(&cli, &mut io::stdout().lock(), &mut io::stderr().lock());
    eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
    std::process::exit(code);
}
