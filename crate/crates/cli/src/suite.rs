//! Suite files: a list of command lines with expected verdicts.
//!
//! ```json
//! {"name": "smoke", "entries": [
//!   {"name": "square", "args": ["witness", "square", "--m-max", "60"], "expect": "super_geometric"}
//! ]}
//! ```

use std::fmt::Write as _;
use std::path::Path;

use clap::Parser;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cli::{Cli, Command};
use crate::commands::{self, is_inconclusive, matches_expectation, CmdResult, Failure, Outcome};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub name: String,
    pub args: Vec<String>,
    #[serde(default)]
    pub expect: Option<String>,
    #[serde(default, alias = "allow-inconclusive")]
    pub allow_inconclusive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Error,
}

pub fn load(path: &Path) -> CmdResult<Suite> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read suite {}: {e}", path.display())))?;
    let suite: Suite = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("malformed suite {}: {e}", path.display())))?;
    for (i, e) in suite.entries.iter().enumerate() {
        let cli = parse_entry(e).map_err(|f| Failure::usage(format!("suite entry {i} ({}): {}", e.name, f.message)))?;
        if matches!(cli.command, Command::Suite(_)) {
            return Err(Failure::usage(format!("suite entry {i} ({}) is itself a suite", e.name)));
        }
    }
    Ok(suite)
}

fn parse_entry(e: &Entry) -> CmdResult<Cli> {
    let argv = std::iter::once("gsdyn".to_string()).chain(e.args.iter().cloned());
    Cli::try_parse_from(argv).map_err(|err| Failure::usage(err.to_string().trim().to_string()))
}

fn run_entry(e: &Entry) -> (Status, Option<String>, Value) {
    let cli = match parse_entry(e) {
        Ok(c) => c,
        Err(f) => return (Status::Error, None, json!({"error": f.message})),
    };
    let expect = e.expect.clone().or(cli.expect.clone());
    match commands::run(&cli.command) {
        Ok(Outcome { report, verdict, .. }) => {
            let status = if is_inconclusive(verdict.as_deref()) {
                Status::Inconclusive
            } else {
                match (&expect, &verdict) {
                    (Some(x), Some(v)) if matches_expectation(x, v) => Status::Pass,
                    (Some(_), _) => Status::Fail,
                    (None, _) => Status::Pass,
                }
            };
            (status, verdict, report)
        }
        Err(f) if f.code == 3 => (Status::Inconclusive, Some("inconclusive".into()), json!({"error": f.message})),
        Err(f) => (Status::Error, None, json!({"error": f.message, "exit_code": f.code})),
    }
}

pub struct SuiteOutcome {
    pub outcome: Outcome,
    pub code: i32,
}

pub fn run(suite: &Suite, brief: bool) -> SuiteOutcome {
    let results: Vec<(Status, Option<String>, Value)> = suite.entries.par_iter().map(run_entry).collect();
    let mut counts = [0usize; 4];
    let mut entries = Vec::with_capacity(results.len());
    let mut csv = String::from("index,name,expect,actual,status\n");
    let mut pretty = format!("suite {}\n", if suite.name.is_empty() { "(unnamed)" } else { &suite.name });
    let mut code = 0;
    for (i, (e, (status, actual, report))) in suite.entries.iter().zip(results).enumerate() {
        counts[status as usize] += 1;
        let blocking = match status {
            Status::Pass => 0,
            Status::Inconclusive if e.allow_inconclusive => 0,
            Status::Inconclusive => 3,
            Status::Fail | Status::Error => 1,
        };
        code = code.max(blocking);
        let tag = match status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Inconclusive => "inconclusive",
            Status::Error => "ERROR",
        };
        let expect = e.expect.clone().unwrap_or_default();
        let act = actual.clone().unwrap_or_default();
        let _ = writeln!(csv, "{i},{},{expect},{act},{}", e.name, tag.to_lowercase());
        let _ = writeln!(pretty, "  [{tag:<12}] {:<32} expect {:<18} got {}", e.name, expect, act);
        let mut entry = json!({
            "index": i,
            "name": e.name,
            "args": e.args,
            "expect": e.expect,
            "allow_inconclusive": e.allow_inconclusive,
            "actual": actual,
            "status": status,
        });
        if !brief || matches!(status, Status::Error) {
            entry["report"] = report;
        }
        entries.push(entry);
    }
    let summary = json!({
        "total": suite.entries.len(),
        "pass": counts[Status::Pass as usize],
        "fail": counts[Status::Fail as usize],
        "inconclusive": counts[Status::Inconclusive as usize],
        "error": counts[Status::Error as usize],
    });
    let _ = writeln!(
        pretty,
        "{} entries: {} pass, {} fail, {} inconclusive, {} error",
        suite.entries.len(),
        counts[0],
        counts[1],
        counts[2],
        counts[3]
    );
    let report = json!({"suite": suite.name, "entries": entries, "summary": summary});
    SuiteOutcome { outcome: Outcome { report, verdict: None, csv, pretty }, code }
}
