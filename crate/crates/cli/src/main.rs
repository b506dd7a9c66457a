use std::io::Write;

use vrvw_cli::{run, EXIT_USAGE};

fn main() {
    if let Ok(v) = std::env::var("VRVW_THREADS") {
        let threads = match v.parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => {
                eprintln!("error: VRVW_THREADS must be a positive integer, got {v:?}");
                std::process::exit(EXIT_USAGE);
            }
        };
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: thread pool: {e}");
            std::process::exit(EXIT_USAGE);
        }
    }
    let (stdout, stderr) = (std::io::stdout(), std::io::stderr());
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    let code = run(std::env::args_os(), &mut out, &mut err);
    let _ = out.flush();
    std::process::exit(code);
}
