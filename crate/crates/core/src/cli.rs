//! `pocmob` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::algebra::RelationPolicy;
use crate::mechfile::parse_file;
use crate::mobility::analyze_mechanism;
use crate::oracle::{check_agreement, seed_list, DEFAULT_SEED};
use crate::relation::build_relation_graph;
use crate::report::{render_human, structured, to_json, StructuredReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ANALYSIS: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "pocmob", version, about = "Mobility analysis of parallel mechanisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze mechanism description files.
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Policy {
    General,
    Strict,
}

#[derive(clap::Args, Debug)]
struct AnalyzeArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Print every step of the procedure.
    #[arg(long)]
    trace: bool,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Check the result numerically with random geometry.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    #[arg(long, value_enum, default_value_t = Policy::General)]
    policy: Policy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse errors outrank analysis errors, which outrank oracle disagreement.
fn worse(a: i32, b: i32) -> i32 {
    let weight = |c| match c {
        EXIT_PARSE => 3,
        EXIT_ANALYSIS => 2,
        EXIT_ORACLE => 1,
        _ => 0,
    };
    if weight(b) > weight(a) {
        b
    } else {
        a
    }
}

struct FileResult {
    code: i32,
    human: String,
    structured: Option<StructuredReport>,
    stderr: String,
}

fn fail(code: i32, msg: String) -> FileResult {
    FileResult {
        code,
        human: String::new(),
        structured: None,
        stderr: msg,
    }
}

fn analyze_file(path: &Path, args: &AnalyzeArgs, base_seed: u64) -> FileResult {
    let shown = path.display();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_PARSE, format!("error: cannot read {shown}: {e}\n")),
    };
    let parsed = match parse_file(&text) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_PARSE, format!("error: {shown}: {e}\n")),
    };
    let mut stderr = String::new();
    for w in &parsed.warnings {
        stderr.push_str(&format!("warning: {shown}: {w}\n"));
    }
    let policy = match args.policy {
        Policy::General => RelationPolicy::GeneralPosition,
        Policy::Strict => RelationPolicy::Strict,
    };
    let mech = parsed.mechanism;
    let report = match analyze_mechanism(&mech, policy) {
        Ok(r) => r,
        Err(e) => {
            stderr.push_str(&format!("error: {shown}: {e}\n"));
            return FileResult { code: EXIT_ANALYSIS, human: String::new(), structured: None, stderr };
        }
    };
    let agreement = if args.oracle {
        let g = build_relation_graph(&mech).expect("graph built during analysis");
        Some(check_agreement(&report, &mech, &g, &seed_list(base_seed, args.seeds)))
    } else {
        None
    };
    let code = match &agreement {
        Some(a) if !a.all_agree() => EXIT_ORACLE,
        _ => EXIT_OK,
    };
    FileResult {
        code,
        human: render_human(&report, args.trace, agreement.as_ref()),
        structured: Some(structured(&report, agreement.as_ref())),
        stderr,
    }
}

/// Run the command line with explicit arguments and `POC_SEED` value.
pub fn run<I, T>(args: I, seed_env: Option<&str>) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                RunOutput { code, stdout: String::new(), stderr: text }
            } else {
                RunOutput { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let Command::Analyze(args) = cli.command;
    let base_seed = match seed_env {
        None => DEFAULT_SEED,
        Some(s) => match s.trim().parse::<u64>() {
            Ok(v) => v,
            Err(_) => {
                return RunOutput {
                    code: EXIT_PARSE,
                    stdout: String::new(),
                    stderr: format!("error: POC_SEED must be an unsigned integer, found '{s}'\n"),
                }
            }
        },
    };

    let results = crate::par::map(&args.files, |p| analyze_file(p, &args, base_seed));
    let mut code = EXIT_OK;
    let mut stderr = String::new();
    let mut human = Vec::new();
    let mut reports = Vec::new();
    for r in results {
        code = worse(code, r.code);
        stderr.push_str(&r.stderr);
        if !r.human.is_empty() {
            human.push(r.human);
        }
        reports.extend(r.structured);
    }
    let stdout = match args.format {
        Format::Human => human.join("\n"),
        Format::Structured => to_json(&reports) + "\n",
    };
    RunOutput { code, stdout, stderr }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_priority() {
        assert_eq!(worse(EXIT_ORACLE, EXIT_ANALYSIS), EXIT_ANALYSIS);
        assert_eq!(worse(EXIT_PARSE, EXIT_ANALYSIS), EXIT_PARSE);
        assert_eq!(worse(EXIT_OK, EXIT_ORACLE), EXIT_ORACLE);
        assert_eq!(worse(EXIT_ORACLE, EXIT_OK), EXIT_ORACLE);
    }

    #[test]
    fn missing_file_names_it() {
        let out = run(["pocmob", "analyze", "missing.mech"], None);
        assert_eq!(out.code, EXIT_PARSE);
        assert!(out.stderr.contains("missing.mech"));
    }

    #[test]
    fn bad_seed_variable() {
        let out = run(["pocmob", "analyze", "x.mech"], Some("abc"));
        assert_eq!(out.code, EXIT_PARSE);
    }
}
