use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use vistest::cli::{run, OUT_DIR_ENV};

fn main() -> ExitCode {
    let out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let code = run(
        std::env::args_os(),
        out_dir,
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
