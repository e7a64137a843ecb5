use clap::Parser;
use magdirac::report::{execute, Status};
use std::path::PathBuf;
use std::process::ExitCode;

/// Run a magdirac job file and write `<stem>.json` (and `<stem>.csv` for spectra).
#[derive(Debug, Parser)]
#[command(name = "magdirac", version)]
struct Cli {
    /// Job description in JSON.
    job: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Use several threads, capped by MAGDIRAC_THREADS.
    #[arg(long)]
    parallel: bool,
    /// Debug logging.
    #[arg(long)]
    verbose: bool,
}

fn thread_count(parallel: bool) -> usize {
    if !parallel {
        return 1;
    }
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var("MAGDIRAC_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        Some(cap) if cap > 0 => cap.min(available),
        _ => available,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "debug" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let threads = thread_count(cli.parallel);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    log::debug!("running with {threads} thread(s)");

    match pool.install(|| execute(&cli.job, &cli.out)) {
        Ok((env, paths)) => {
            for p in &paths {
                log::info!("wrote {}", p.display());
            }
            for n in &env.notes {
                log::warn!("{n}");
            }
            println!("{}: {:?}", env.kind, env.status);
            if env.status != Status::Pass {
                eprintln!("status: {:?}", env.status);
            }
            ExitCode::from(env.status.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
