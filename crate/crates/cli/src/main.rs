mod args;
mod output;
mod run;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, DEFAULT_OUT_DIR, OUT_DIR_ENV};
use output::{strip_out_dir, RunManifest, Sink};
use run::{Ctx, Failure};

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Count(_) => "count",
        Command::Pollard(_) => "pollard",
        Command::Freiman(_) => "freiman",
        Command::Regularity(r) => match r {
            args::RegularityCommand::Decompose(_) => "regularity decompose",
            args::RegularityCommand::Pair(_) => "regularity pair",
            args::RegularityCommand::Counting(_) => "regularity counting",
            args::RegularityCommand::Dirichlet(_) => "regularity dirichlet",
        },
        Command::Dissociate(_) => "dissociate",
        Command::Cluster(_) => "cluster",
        Command::Isoperimetry(_) => "isoperimetry",
        Command::Cayley(_) => "cayley",
        Command::Missing(_) => "missing",
        Command::Selftest => "selftest",
    }
}

fn seed_of(c: &Command) -> Option<u64> {
    use args::RegularityCommand as R;
    match c {
        Command::Pollard(a) => Some(a.seed),
        Command::Regularity(R::Decompose(a)) => Some(a.seed),
        Command::Regularity(R::Pair(a)) => Some(a.seed),
        Command::Regularity(R::Counting(a)) => Some(a.seed),
        Command::Dissociate(a) => Some(a.seed),
        Command::Cluster(a) => Some(a.seed),
        Command::Cayley(a) => Some(a.seed),
        Command::Missing(a) => Some(a.seed),
        _ => None,
    }
}

fn dispatch(ctx: &mut Ctx, c: &Command) -> run::RunResult {
    match c {
        Command::Count(a) => run::count(ctx, a),
        Command::Pollard(a) => run::pollard(ctx, a),
        Command::Freiman(a) => run::freiman(ctx, a),
        Command::Regularity(r) => run::regularity(ctx, r),
        Command::Dissociate(a) => run::dissociate(ctx, a),
        Command::Cluster(a) => run::cluster(ctx, a),
        Command::Isoperimetry(a) => run::isoperimetry(ctx, a),
        Command::Cayley(a) => run::cayley(ctx, a),
        Command::Missing(a) => run::missing(ctx, a),
        Command::Selftest => selftest::run(ctx),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };

    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(64);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }

    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));

    let start = Instant::now();
    let mut ctx = Ctx {
        sink: Sink::new(out_dir.clone()),
        seed: seed_of(&cli.command),
        failed: Vec::new(),
    };
    let result = dispatch(&mut ctx, &cli.command);
    let mut code = match &result {
        Ok(()) if ctx.failed.is_empty() => 0,
        Ok(()) => 2,
        Err(f) => f.exit_code(),
    };
    if let Err(f) = &result {
        eprintln!("error: {}", f.message());
    }
    for msg in &ctx.failed {
        eprintln!("check failed: {msg}");
    }

    let Ctx { sink, seed, .. } = ctx;
    let outputs = match sink.finish() {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: writing outputs: {e}");
            code = Failure::Io(String::new()).exit_code();
            Vec::new()
        }
    };
    let manifest = RunManifest {
        schema_version: addcomb::SCHEMA_VERSION,
        tool: "addcomb",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: subcommand_name(&cli.command).to_string(),
        argv: strip_out_dir(&argv[1..]),
        seed,
        threads: rayon::current_num_threads(),
        out_dir: out_dir.display().to_string(),
        outputs,
        exit_code: code,
        wall_ms: start.elapsed().as_millis(),
    };
    if let Err(e) = manifest.write(&out_dir) {
        eprintln!("error: writing manifest: {e}");
        if code == 0 {
            code = 1;
        }
    }
    ExitCode::from(code as u8)
}
