use clap::Parser;
use filtra::cli::{run, Cli, EXIT_INVALID, EXIT_OK};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors share the invalid-input code; exit 2 means "cap exceeded"
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_INVALID } else { EXIT_OK });
        }
    };
    std::process::exit(run(cli));
}
