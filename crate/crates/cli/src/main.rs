use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = horosark::Cli::parse();
    let stdout = std::io::stdout();
    match horosark::run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
