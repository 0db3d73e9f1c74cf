use clap::Parser;
use disperse_lab::cli::{exit_code, run, thread_count, write_output, Cli, SweepConfig};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = SweepConfig::from_cli(cli).and_then(|config| {
        if let Some(n) = thread_count(config.threads)? {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| disperse_lab::Error::Usage(e.to_string()))?;
        }
        let outcome = run(&config)?;
        write_output(config.output.as_deref(), &outcome.body)?;
        Ok(outcome.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
