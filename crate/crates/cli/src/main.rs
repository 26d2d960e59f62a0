mod cli;
mod commands;
mod suite;

use std::io::{IsTerminal, Write};
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use cli::{Cli, Command, Format};
use commands::{is_inconclusive, matches_expectation, CmdResult, Failure, Outcome};

const GLOBAL_VALUE_FLAGS: [&str; 4] = ["--format", "--output", "--config", "--expect"];
const NESTED: [&str; 2] = ["poly", "witness"];

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Index just past the subcommand path (`witness square`, `seminorm`, …).
fn path_end(args: &[String]) -> (usize, usize) {
    let mut i = 1;
    let mut found = 0;
    let mut want = 1;
    while i < args.len() && found < want {
        let a = &args[i];
        if GLOBAL_VALUE_FLAGS.contains(&a.as_str()) {
            i += 2;
            continue;
        }
        if a.starts_with('-') {
            i += 1;
            continue;
        }
        if found == 0 && NESTED.contains(&a.as_str()) {
            want = 2;
        }
        found += 1;
        i += 1;
    }
    (i.min(args.len()), found)
}

fn config_flags(map: &serde_json::Map<String, Value>) -> CmdResult<(Vec<String>, Vec<String>)> {
    let mut flags = Vec::new();
    let mut command = Vec::new();
    for (key, v) in map {
        if key == "command" {
            match v {
                Value::String(s) => command.extend(s.split_whitespace().map(str::to_string)),
                Value::Array(items) => command.extend(items.iter().filter_map(|x| x.as_str().map(str::to_string))),
                _ => return Err(Failure::usage("config `command` must be a string or a list")),
            }
            continue;
        }
        if key == "config" {
            return Err(Failure::usage("config files cannot include other config files"));
        }
        let flag = format!("--{}", key.replace('_', "-"));
        let mut push = |v: &Value| -> CmdResult<()> {
            match v {
                Value::Bool(true) => flags.push(flag.clone()),
                Value::Bool(false) | Value::Null => {}
                Value::Number(n) => flags.extend([flag.clone(), n.to_string()]),
                Value::String(s) => flags.extend([flag.clone(), s.clone()]),
                _ => return Err(Failure::usage(format!("config key `{key}` must be a scalar or a list of scalars"))),
            }
            Ok(())
        };
        match v {
            Value::Array(items) => items.iter().try_for_each(&mut push)?,
            other => push(other)?,
        }
    }
    Ok((command, flags))
}

/// Splice the flags of a JSON config file in front of the explicit ones, so
/// the command line wins.
fn merged_args(mut args: Vec<String>) -> CmdResult<Vec<String>> {
    let Some(path) = config_path(&args) else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::usage(format!("cannot read config {path}: {e}")))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("malformed config {path}: {e}")))?;
    let Value::Object(map) = value else { return Err(Failure::usage("config must be a JSON object")) };
    let (command, flags) = config_flags(&map)?;
    let (mut at, found) = path_end(&args);
    if found == 0 {
        if command.is_empty() {
            return Err(Failure::usage("no subcommand given on the command line or in the config"));
        }
        let n = command.len();
        args.splice(at..at, command);
        at += n;
    }
    args.splice(at..at, flags);
    Ok(args)
}

fn render(out: &Outcome, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&out.report).expect("json") + "\n",
        Format::Csv => out.csv.clone(),
        Format::Pretty => out.pretty.clone(),
    }
}

fn emit(cli: &Cli, out: &Outcome) -> CmdResult<()> {
    let format = cli.format.unwrap_or(if cli.output.is_none() && std::io::stdout().is_terminal() { Format::Pretty } else { Format::Json });
    let text = render(out, format);
    match &cli.output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure { code: 3, message: format!("cannot write {}: {e}", p.display()) }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| Failure { code: 3, message: e.to_string() })
        }
    }
}

fn configure_threads() -> CmdResult<()> {
    if let Ok(v) = std::env::var("GSDYN_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| Failure::usage(format!("GSDYN_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(Failure::usage("GSDYN_THREADS must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure { code: 3, message: e.to_string() })?;
    }
    Ok(())
}

fn real_main() -> CmdResult<i32> {
    let args = merged_args(std::env::args().collect())?;
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return Ok(code);
        }
    };
    configure_threads()?;
    if let Command::Suite(s) = &cli.command {
        if cli.expect.is_some() {
            return Err(Failure::usage("--expect does not apply to suites; put expectations in the suite file"));
        }
        let suite = suite::load(&s.file)?;
        let res = suite::run(&suite, s.brief);
        emit(&cli, &res.outcome)?;
        return Ok(res.code);
    }
    let out = commands::run(&cli.command)?;
    emit(&cli, &out)?;
    let verdict = out.verdict.as_deref();
    if let Some(expect) = &cli.expect {
        let Some(actual) = verdict else {
            return Err(Failure::usage("--expect given but this command reports no verdict"));
        };
        if is_inconclusive(Some(actual)) && !matches_expectation(expect, actual) {
            eprintln!("inconclusive: expected {expect}");
            return Ok(3);
        }
        if !matches_expectation(expect, actual) {
            eprintln!("verdict mismatch: expected {expect}, got {actual}");
            return Ok(1);
        }
        return Ok(0);
    }
    Ok(if is_inconclusive(verdict) { 3 } else { 0 })
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
