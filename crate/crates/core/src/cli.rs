//! Command-line front end. Exit codes: 0 success, 2 semantic failure, 1 error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use crate::case::{load_case, validate_case, AssuranceCase};
use crate::checks::{parse_rule_set, CheckName, Checker, SemanticRuleSet};
use crate::engine::{SolveOptions, Solver, DEFAULT_DEPTH_LIMIT};
use crate::logic::parse_query;
use crate::report::{render_html, render_text, Report};
use crate::translator::{translate_case, EXPORT_SUFFIXES};

pub const DEPTH_LIMIT_VAR: &str = "CASEFORGE_DEPTH_LIMIT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "caseforge", version, about = "Translate and check assurance cases")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the five program files of a case.
    Export {
        case: PathBuf,
        /// Directory for the files; defaults to the case's directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run semantic checks and print a report.
    Check {
        case: PathBuf,
        #[arg(long)]
        rules: Option<PathBuf>,
        /// indefeasibility, theory-application, consistency, adequacy,
        /// completeness or harmony; repeatable. Default: all.
        #[arg(long = "check", value_name = "NAME")]
        checks: Vec<String>,
        #[arg(long)]
        html: Option<PathBuf>,
    },
    /// Solve a query against the translated case. A leading `not ` asks
    /// for a failure explanation instead.
    Query {
        case: PathBuf,
        query: String,
        #[arg(long, default_value_t = 10)]
        max_answers: usize,
        #[arg(long)]
        html: Option<PathBuf>,
    },
}

/// Error reported on standard error with exit code 1.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cfg.command {
        Command::Export { case, out_dir } => cmd_export(&case, out_dir.as_deref(), stdout, stderr),
        Command::Check { case, rules, checks, html } => {
            cmd_check(&case, rules.as_deref(), &checks, html.as_deref(), stdout, stderr)
        }
        Command::Query { case, query, max_answers, html } => {
            cmd_query(&case, &query, max_answers, html.as_deref(), stdout, stderr)
        }
    };
    match result {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn solve_options() -> Result<SolveOptions, Failure> {
    let depth_limit = match std::env::var(DEPTH_LIMIT_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Failure(format!("{DEPTH_LIMIT_VAR} must be a positive integer, got `{v}`")))?,
        Err(_) => DEFAULT_DEPTH_LIMIT,
    };
    Ok(SolveOptions { depth_limit, ..Default::default() })
}

fn read_case(path: &Path, stderr: &mut dyn Write) -> Result<AssuranceCase, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let case = load_case(&bytes).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let diagnostics = validate_case(&case);
    if !diagnostics.is_empty() {
        for d in &diagnostics {
            let _ = writeln!(stderr, "{}: {d}", path.display());
        }
        return Err(Failure(format!("{}: {} validation error(s)", path.display(), diagnostics.len())));
    }
    Ok(case)
}

/// File name without `.json` and then `.case`.
pub fn case_stem(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let name = name.strip_suffix(".json").unwrap_or(&name);
    name.strip_suffix(".case").unwrap_or(name).to_string()
}

/// `SOURCE_DATE_EPOCH` as an RFC 3339 time, for reproducible reports.
fn report_timestamp() -> Option<String> {
    let secs = std::env::var("SOURCE_DATE_EPOCH").ok()?.trim().parse::<u64>().ok()?;
    Some(humantime::format_rfc3339_seconds(UNIX_EPOCH + Duration::from_secs(secs)).to_string())
}

fn write_html(path: Option<&Path>, report: &Report) -> Result<(), Failure> {
    if let Some(p) = path {
        std::fs::write(p, render_html(report)).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn cmd_export(case_path: &Path, out_dir: Option<&Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let case = read_case(case_path, stderr)?;
    let bundle = translate_case(&case)?;
    let dir = match out_dir {
        Some(d) => d.to_path_buf(),
        None => case_path.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let stem = case_stem(case_path);
    std::fs::create_dir_all(&dir).map_err(|e| Failure(format!("{}: {e}", dir.display())))?;
    debug_assert_eq!(bundle.files().map(|(s, _)| s), EXPORT_SUFFIXES);
    for (suffix, text) in bundle.files() {
        let path = dir.join(format!("{stem}.{suffix}"));
        std::fs::write(&path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
        writeln!(stdout, "{}", path.display())?;
    }
    Ok(EXIT_OK)
}

fn cmd_check(
    case_path: &Path,
    rules_path: Option<&Path>,
    names: &[String],
    html: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    let explicit: Vec<CheckName> = names.iter().map(|n| n.parse()).collect::<Result<_, _>>()?;
    let case = read_case(case_path, stderr)?;
    let rules: Option<SemanticRuleSet> = match rules_path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
            Some(parse_rule_set(&text).map_err(|e| Failure(format!("{}: {e}", p.display())))?)
        }
        None => None,
    };

    let selected: Vec<CheckName> = if explicit.is_empty() {
        // Run everything that can run; say on stderr what was skipped.
        CheckName::ALL
            .into_iter()
            .filter(|c| match (c.section(), &rules) {
                (None, _) => true,
                (Some(_), None) => {
                    let _ = writeln!(stderr, "note: skipping {c}: no rules file");
                    false
                }
                (Some(s), Some(r)) if r.is_section_empty(s) => {
                    let _ = writeln!(stderr, "note: skipping {c}: no {s} rules");
                    false
                }
                _ => true,
            })
            .collect()
    } else {
        let mut seen = Vec::new();
        for c in explicit {
            if !seen.contains(&c) {
                seen.push(c);
            }
        }
        seen
    };

    let checker = Checker::new(&case, solve_options()?)?;
    let verdicts = checker.run(&selected, rules.as_ref())?;
    let mut report = Report::new("check", case_stem(case_path));
    report.timestamp = report_timestamp();
    report.verdicts = verdicts;
    stdout.write_all(render_text(&report).as_bytes())?;
    write_html(html, &report)?;
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_query(
    case_path: &Path,
    text: &str,
    max_answers: usize,
    html: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    let trimmed = text.trim();
    let trimmed = trimmed.strip_prefix("?-").map_or(trimmed, str::trim_start);
    let (negated, body) = match trimmed.strip_prefix("not ") {
        Some(rest) => (true, rest),
        None => (false, trimmed),
    };
    let query = parse_query(body)?;
    let case = read_case(case_path, stderr)?;
    let program = translate_case(&case)?.solving_program();
    let mut solver = Solver::new(&program, SolveOptions { max_answers, ..solve_options()? })?;

    let mut report = Report::new(format!("query {text}"), case_stem(case_path));
    report.timestamp = report_timestamp();
    let mut lines = Vec::new();
    if negated {
        if let Some(a) = solver.prove_negation(&query)? {
            lines.push("answer 1: holds".to_string());
            report.trees.push(a.justification);
        }
    } else {
        for (i, a) in solver.solve(&query)?.into_iter().enumerate() {
            lines.push(format!("answer {}: {}", i + 1, a.bindings));
            report.trees.push(a.justification);
        }
    }
    let found = !report.trees.is_empty();
    if !found {
        lines.push("no answers".to_string());
    }
    for l in lines {
        writeln!(stdout, "{l}")?;
    }
    stdout.write_all(render_text(&report).as_bytes())?;
    write_html(html, &report)?;
    Ok(if found { EXIT_OK } else { EXIT_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> String {
        format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("caseforge").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn stems_drop_case_and_json() {
        assert_eq!(case_stem(Path::new("x/arducopter.case.json")), "arducopter");
        assert_eq!(case_stem(Path::new("plain.json")), "plain");
        assert_eq!(case_stem(Path::new("odd")), "odd");
    }

    #[test]
    fn unknown_check_is_a_usage_error() {
        let (code, out, err) = run_args(&["check", "--check", "bogus", &fixture("train.case.json")]);
        assert_eq!(code, EXIT_ERROR);
        assert!(out.is_empty());
        assert!(err.contains("unknown check"), "{err}");
    }

    #[test]
    fn missing_rules_for_requested_check() {
        let (code, _, err) = run_args(&["check", "--check", "consistency", &fixture("train.case.json")]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("needs a rules file"), "{err}");
    }

    #[test]
    fn default_run_skips_rule_checks_without_rules() {
        let (code, out, err) = run_args(&["check", &fixture("safedriver.case.json")]);
        assert_eq!(code, EXIT_OK, "{out}{err}");
        assert!(err.contains("note: skipping consistency"));
        assert!(out.starts_with("check [safedriver]: 2 pass, 0 fail\n"), "{out}");
    }

    #[test]
    fn malformed_query_exits_one() {
        let (code, _, err) = run_args(&["query", &fixture("train.case.json"), "safe(("]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn query_with_no_answers_exits_two() {
        let (code, out, _) = run_args(&["query", &fixture("train.case.json"), "fast(X)"]);
        assert_eq!(code, EXIT_FAILED);
        assert!(out.starts_with("no answers\n"));
    }
}
