use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    if let Some(n) = std::env::var("HEFFTER_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let code = heffter_core::cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
