use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

mod config;
mod run;

use config::{selftest_config, validate, Cli, Command, KernelsAction};
use run::CliError;

fn init_logging() {
    let env = env_logger::Env::new().filter_or("BLS_LOG", "warn");
    env_logger::Builder::from_env(env)
        .format(|buf, record| {
            let line = serde_json::json!({
                "level": record.level().as_str(),
                "target": record.target(),
                "message": record.args().to_string(),
            });
            writeln!(buf, "{line}")
        })
        .init();
}

/// Writes a line to stdout, ignoring a closed pipe.
fn say(text: &str) {
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("{}", err.to_json());
    ExitCode::from(err.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Invalid(vec![e.render().to_string().trim().to_string()])),
    };
    init_logging();

    let cfg = match cli.command {
        Some(Command::Kernels { action: KernelsAction::Selftest { seed, out } }) => {
            selftest_config(seed, out, cli.args.threads)
        }
        None => match validate(&cli.args) {
            Ok(c) => c,
            Err(errs) => return fail(&CliError::Invalid(errs)),
        },
    };
    if cli.args.check {
        say(&serde_json::to_string_pretty(&cfg).expect("configuration serialises"));
        return ExitCode::SUCCESS;
    }
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }

    let start = Instant::now();
    match run::run(&cfg) {
        Ok(summary) => {
            say(&format!("{summary} [{:.3} s]", start.elapsed().as_secs_f64()));
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
