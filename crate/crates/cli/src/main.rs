use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    if let Err(e) = hallmhd_cli::init_threads() {
        eprintln!("{e}");
        return ExitCode::from(1);
    }
    let code =
        hallmhd_cli::main_with_args(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
