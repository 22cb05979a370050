use std::process::ExitCode;

use clap::Parser;
use vqelab_cli::{run, thread_count_from_env, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match start(&cli) {
        Ok(dir) => {
            println!("{}", dir);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("vqelab: {e:#}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn start(cli: &Cli) -> Result<String, CliError> {
    if let Some(threads) = thread_count_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Runtime(e.into()))?;
    }
    let manifest = run(&cli.command)?;
    Ok(manifest.config.out_dir.display().to_string())
}
