use std::io::{self, Write};
use std::path::PathBuf;

use aua::cli::{run, CONFIG_ENV};

fn main() {
    let config = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run(std::env::args_os(), config.as_deref(), &mut out, &mut err);
    let _ = out.flush();
    std::process::exit(code);
}
