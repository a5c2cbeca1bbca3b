use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let probe = std::env::var(kfield::cli::PROBE_ENV).ok();
    let out = kfield::cli::run(std::env::args_os(), probe.as_deref());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code as u8)
}
