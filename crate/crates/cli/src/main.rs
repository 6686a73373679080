use std::process::ExitCode;

use collapse_cli::{execute, parse_env_config, verdict, CliError};

fn fail(e: CliError) -> ExitCode {
    let code = e.exit_code();
    match e {
        CliError::Clap(e) => {
            let _ = e.print();
        }
        e => eprintln!("error: {e}"),
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cfg = match parse_env_config(std::env::args_os()) {
        Ok(cfg) => cfg,
        Err(e) => return fail(e),
    };
    let (report, text) = match execute(&cfg) {
        Ok(done) => done,
        Err(e) => return fail(e),
    };
    print!("{text}");
    if let Some(path) = &cfg.output {
        println!("report: {}", path.display());
    }
    match verdict(&report) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
