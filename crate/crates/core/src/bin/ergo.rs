use std::process::ExitCode;

use gbm_ergodicity::cli_io::{
    execute, parse_config, write_outputs, ConfigError, EXIT_RUNTIME, EXIT_VALIDATION,
};

fn main() -> ExitCode {
    let cfg = match parse_config(std::env::args_os(), std::env::var("ERGO_SEED").ok()) {
        Ok(cfg) => cfg,
        Err(ConfigError::Cli(e)) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    };
    let out = match execute(&cfg) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME as u8);
        }
    };
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    match write_outputs(&cfg.out, &out) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: writing {}: {e}", cfg.out.display());
            ExitCode::from(EXIT_RUNTIME as u8)
        }
    }
}
