use std::io;

fn main() {
    let precision = std::env::var(bsdlab::cli::PRECISION_VAR).ok();
    let code =
        bsdlab::run(std::env::args_os(), precision.as_deref(), &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(code);
}
