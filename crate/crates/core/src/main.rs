use std::io::{self, BufRead, Write};

fn main() {
    let stdin = io::stdin();
    let mut input: Box<dyn BufRead> = Box::new(stdin.lock());
    let (stdout, stderr) = (io::stdout(), io::stderr());
    let code = hytw::cli::run(std::env::args_os(), &mut input, &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    std::process::exit(code);
}
