use std::path::{Path, PathBuf};
use std::process::ExitCode;

use nlslab::run;

const USAGE: &str = "\
nlslab: spectral simulation and verification for the nonlinear Schrodinger equation

usage:
  nlslab run <config> [--out DIR]        execute a run, write CSV/snapshots/manifest
  nlslab verify <config>                 run the configured check suite
  nlslab sweep <config> --set key=v1,v2 [--set ...] [--jobs N]
                                         run the Cartesian product of overrides
  nlslab print-defaults                  print the default config

NLSLAB_JOBS sets the sweep worker count when --jobs is absent.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("nlslab: {e}");
            ExitCode::from(1)
        }
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("nlslab: {msg}");
    eprint!("{USAGE}");
    ExitCode::from(2)
}

fn dispatch(args: &[String]) -> nlslab::Result<ExitCode> {
    match args.first().map(String::as_str) {
        Some("run") => cmd_run(&args[1..]),
        Some("verify") => cmd_verify(&args[1..]),
        Some("sweep") => cmd_sweep(&args[1..]),
        Some("print-defaults") => {
            if args.len() > 1 {
                return Ok(usage_error("print-defaults takes no arguments"));
            }
            print!("{}", nlslab::config::ExperimentConfig::default().to_text());
            Ok(ExitCode::SUCCESS)
        }
        Some(other) => Ok(usage_error(&format!("unknown command {other:?}"))),
        None => Ok(usage_error("missing command")),
    }
}

fn cmd_run(args: &[String]) -> nlslab::Result<ExitCode> {
    let mut config: Option<&str> = None;
    let mut out: Option<PathBuf> = None;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        match a.as_str() {
            "--out" => match it.next() {
                Some(dir) => out = Some(PathBuf::from(dir)),
                None => return Ok(usage_error("--out expects a directory")),
            },
            _ if config.is_none() && !a.starts_with("--") => config = Some(a),
            _ => return Ok(usage_error(&format!("unexpected argument {a:?}"))),
        }
    }
    let Some(config) = config else {
        return Ok(usage_error("run expects a config file"));
    };
    run::cmd_run(Path::new(config), out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: &[String]) -> nlslab::Result<ExitCode> {
    let [config] = args else {
        return Ok(usage_error("verify expects exactly one config file"));
    };
    let suite = run::cmd_verify(Path::new(config))?;
    print!("{}", suite.to_text());
    let (_, failed, inconclusive) = suite.counts();
    if failed > 0 {
        Ok(ExitCode::from(1))
    } else {
        if inconclusive > 0 {
            eprintln!("nlslab: warning: {inconclusive} check(s) inconclusive");
        }
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_sweep(args: &[String]) -> nlslab::Result<ExitCode> {
    let mut config: Option<&str> = None;
    let mut sets: Vec<String> = Vec::new();
    let mut jobs: Option<usize> = None;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        match a.as_str() {
            "--set" => match it.next() {
                // shape check only; whether the key exists and the values
                // parse is the sweep's own (runtime) business
                Some(s) if s.split_once('=').is_some_and(|(k, v)| !k.is_empty() && !v.is_empty()) => {
                    sets.push(s.clone())
                }
                _ => return Ok(usage_error("--set expects key=v1,v2,...")),
            },
            "--jobs" => match it.next().and_then(|s| s.parse::<usize>().ok()) {
                Some(n) if n >= 1 => jobs = Some(n),
                _ => return Ok(usage_error("--jobs expects a positive integer")),
            },
            _ if config.is_none() && !a.starts_with("--") => config = Some(a),
            _ => return Ok(usage_error(&format!("unexpected argument {a:?}"))),
        }
    }
    let Some(config) = config else {
        return Ok(usage_error("sweep expects a config file"));
    };
    let all_ok = run::cmd_sweep(Path::new(config), &sets, jobs)?;
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
