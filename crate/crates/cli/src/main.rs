mod config;
mod inputs;
mod run;

use clap::Parser;

fn main() {
    let cli = match config::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { run::EXIT_USAGE } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run::run(&cli.command, &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
