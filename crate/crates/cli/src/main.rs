use std::panic;
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<_> = std::env::args_os().collect();
    let code = panic::catch_unwind(|| {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        orthosefe::run(args, &mut out)
    })
    .unwrap_or(orthosefe::INTERNAL_ERROR);
    ExitCode::from(code as u8)
}
