use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let args = amphough_cli::Args::parse();
    match amphough_cli::run(&args) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::SUCCESS
        }
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("amphough: error: {msg}");
            ExitCode::FAILURE
        }
    }
}
