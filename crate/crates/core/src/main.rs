use std::io::Write;

fn main() {
    let result = su3paths::cli::dispatch(std::env::args_os());
    print!("{}", result.stdout());
    eprint!("{}", result.stderr());
    let _ = std::io::stdout().flush();
    std::process::exit(result.code);
}
