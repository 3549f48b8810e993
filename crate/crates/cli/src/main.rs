use std::io::Write;

use atf_cli::commands::run;
use atf_cli::service::serve;

fn main() {
    let out = run(std::env::args_os());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::io::stdout().flush().ok();
    let Some(req) = out.serve else { std::process::exit(out.code) };
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().expect("tokio runtime");
    if let Err(e) = rt.block_on(serve(&req.bind, req.port, req.data_dir)) {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
