use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut stdout = std::io::stdout().lock();
    let code = caseforge::cli::run(std::env::args_os(), &mut stdout, &mut std::io::stderr().lock());
    let _ = stdout.flush();
    ExitCode::from(code as u8)
}
