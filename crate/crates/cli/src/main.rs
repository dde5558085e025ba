#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::process::ExitCode;

use clap::Parser;
use wirepol::materials::MaterialDatabase;

use args::{Cli, Command, MaterialCommand};

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    pub fn context(self, at: &str) -> Self {
        match self {
            Failure::Usage(m) => Failure::Usage(format!("{at}: {m}")),
            Failure::Numerical(m) => Failure::Numerical(format!("{at}: {m}")),
            Failure::Io(m) => Failure::Io(format!("{at}: {m}")),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<wirepol::Error> for Failure {
    fn from(e: wirepol::Error) -> Self {
        use wirepol::Error as E;
        let msg = e.to_string();
        match e {
            E::Io(_) | E::Parse { .. } | E::MaterialData(_) => Failure::Io(msg),
            E::Domain(_)
            | E::TemperatureOutOfRange(_)
            | E::UnknownMaterial(_)
            | E::InvalidScan(_) => Failure::Usage(msg),
            E::Range { .. }
            | E::OrderTooLarge { .. }
            | E::PartialWave { .. }
            | E::NotConverged { .. }
            | E::Degenerate(_)
            | E::Quadrature { .. }
            | E::Identifiability(_) => Failure::Numerical(msg),
        }
    }
}

/// Arguments that shape the output: everything except the thread count,
/// output destinations and the config path (whose entries are already
/// spliced in).
fn canonical_command(args: &[OsString]) -> String {
    const DROP_WITH_VALUE: [&str; 5] = ["--threads", "--output", "-o", "--output-dir", "--config"];
    let mut out = Vec::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        let s = a.to_string_lossy();
        if skip {
            skip = false;
            continue;
        }
        if DROP_WITH_VALUE.contains(&s.as_ref()) {
            skip = true;
            continue;
        }
        if DROP_WITH_VALUE
            .iter()
            .any(|d| s.starts_with(&format!("{d}=")))
        {
            continue;
        }
        out.push(s.into_owned());
    }
    out.join(" ")
}

fn configure_threads(threads: Option<usize>) -> Result<(), Failure> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(Failure::Usage("--threads must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot configure {n} threads: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    eprintln!("warning: built without parallel support; --threads {n} ignored");
    Ok(())
}

fn run() -> Result<(), Failure> {
    let args = config::expand(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage {
                Err(Failure::Usage("invalid arguments".into()))
            } else {
                Ok(())
            };
        }
    };
    configure_threads(cli.threads)?;
    let ctx = commands::Context {
        db: MaterialDatabase::from_env_or_builtin()?,
        policy: cli.bounded_terms.unwrap_or_default(),
        command_line: canonical_command(&args),
    };
    match &cli.command {
        Command::Point(a) => commands::point(&ctx, a),
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::Compare(a) => commands::compare(&ctx, a),
        Command::Polsim(a) => commands::polsim(&ctx, a),
        Command::Material {
            action: MaterialCommand::Show(a),
        } => commands::material_show(&ctx, a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("wirepol: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
