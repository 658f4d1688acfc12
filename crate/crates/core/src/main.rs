use std::process::ExitCode;

fn main() -> ExitCode {
    let seed = std::env::var("POC_SEED").ok();
    let out = poc_mobility::cli::run(std::env::args_os(), seed.as_deref());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code as u8)
}
