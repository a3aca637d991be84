use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use weakcoupling_cli::{config, run, CliError, Command};

/// Weak-coupling experiments: Fermi-surface spectra, Birman–Schwinger curves, fits and certificates.
#[derive(Parser)]
#[command(version)]
struct Args {
    command: Command,
    /// TOML experiment configuration; defaults apply to every missing key.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (overrides the `threads` key).
    #[arg(long)]
    threads: Option<usize>,
    /// section.key=value, applied after the config file; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = config::load(args.config.as_deref(), &args.overrides).and_then(|mut cfg| {
        if let Some(t) = args.threads {
            cfg.threads = t;
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads.max(1))
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?;
        pool.install(|| run(args.command, &cfg, &args.out))
    });
    match outcome {
        Ok(files) => {
            for f in files {
                println!("{}", args.out.join(f).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
