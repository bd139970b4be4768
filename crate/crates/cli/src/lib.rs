//! The `tropcyl` command line. [`run`] does all the work and returns the exit
//! code with the text for stdout and stderr, so it can be tested in process.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use tropcyl_core::io::{
    base_report, count_report, curve_class_json, error_json, extend_report, is_input_error, parse_pair, parse_spine,
    table_report, trace_report, uint_json, validate_report,
};
use tropcyl_core::num::parse_q;
use tropcyl_core::{
    build_base, count, count_spine, count_table, cylinder_in_b, del_pezzo_base, extend, spine_family, validate_spine,
    CountQuery, Error, Spine, TropicalBase, Q, DEFAULT_MAX_STEPS,
};

#[derive(Debug, Parser)]
#[command(name = "tropcyl", version, about = "Tropical cylinders in log Calabi-Yau surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Describe the tropical base of a Looijenga pair.
    Base { pair_file: PathBuf },
    /// Check the spine conditions.
    Validate { pair_file: PathBuf, spine_file: PathBuf },
    /// Extend a spine to both ends and build its tropical cylinder.
    Extend {
        pair_file: PathBuf,
        spine_file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
    },
    /// Count cylinders of class L(l,m,n) on the del Pezzo base.
    Count {
        #[arg(long, allow_hyphen_values = true)]
        l: i64,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        /// Height of the spine vertex; also counts the explicit spine.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
    },
    /// Compare the count with the count read in reverse orientation.
    Symmetry {
        #[arg(long, allow_hyphen_values = true)]
        l: i64,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Sample the tropicalization of the explicit family.
    Trace {
        #[arg(long, allow_hyphen_values = true)]
        l: i64,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Comma separated parameters, e.g. `-1,0,1/2`.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
        t: Vec<String>,
    },
    /// Table of counts for l = 0..=l_max, checked against the oracle.
    Table {
        #[arg(long)]
        l_max: i64,
        /// `a..b` (inclusive) or a single value.
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        m_range: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    /// Malformed arguments or input files.
    Input(String, Option<Value>),
    /// Well-formed input on which the computation fails.
    Domain(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if is_input_error(&e) {
            Failure::Input(e.to_string(), Some(error_json(&e)))
        } else {
            Failure::Domain(error_json(&e))
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display()), None))
}

fn load_base(path: &Path) -> Result<TropicalBase, Failure> {
    Ok(build_base(parse_pair(&read(path)?)?)?)
}

fn rational(s: &str) -> Result<Q, Failure> {
    Ok(parse_q(s)?)
}

fn parse_m_range(s: &str) -> Result<Vec<i64>, Failure> {
    let bad = || Failure::Input(format!("bad m range {s:?}, expected a..b or a single integer"), None);
    let int = |x: &str| x.trim().parse::<i64>().map_err(|_| bad());
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (int(a)?, int(b.trim_start_matches('='))?);
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![int(s)?]),
    }
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn execute(command: Command) -> Result<Value, Failure> {
    match command {
        Command::Base { pair_file } => Ok(base_report(&load_base(&pair_file)?)),
        Command::Validate { pair_file, spine_file } => {
            let base = load_base(&pair_file)?;
            let tree = parse_spine(&base, &read(&spine_file)?)?;
            let violations = validate_spine(&base, &tree);
            let report = validate_report(&violations);
            if violations.is_empty() {
                Ok(report)
            } else {
                Err(Failure::Domain(report))
            }
        }
        Command::Extend { pair_file, spine_file, max_steps } => {
            if max_steps == 0 {
                return Err(Failure::Input("--max-steps must be positive".into(), None));
            }
            let base = load_base(&pair_file)?;
            let spine = Spine::new(parse_spine(&base, &read(&spine_file)?)?)?;
            let result = extend(&base, &spine, max_steps)?;
            let cylinder = cylinder_in_b(&base, &result.extended)?;
            Ok(extend_report(&result, &cylinder))
        }
        Command::Count { l, m, n, b } => {
            let q = CountQuery::new(l, m, n);
            let mut report = count_report(q)?;
            if let Some(b) = b {
                let b = rational(&b)?;
                let base = del_pezzo_base();
                let spine = spine_family(l, m, n, &b)?;
                let spine_count = count_spine(&base, &spine)?;
                let result = extend(&base, &spine, DEFAULT_MAX_STEPS)?;
                report["b"] = json!(tropcyl_core::num::format_q(&b));
                report["spine_count"] = uint_json(&spine_count);
                report["curve_class"] = curve_class_json(&result.curve_class);
            }
            if report["match"] != Value::Bool(true) {
                return Err(Failure::Domain(report));
            }
            Ok(report)
        }
        Command::Symmetry { l, m, n } => {
            let q = CountQuery::new(l, m, n);
            let forward = count(q)?;
            let backward = tropcyl_core::count::count_backward(q)?;
            let report = json!({
                "l": l, "m": m, "n": n,
                "forward": uint_json(&forward),
                "backward": uint_json(&backward),
                "symmetry": forward == backward,
            });
            if forward == backward {
                Ok(report)
            } else {
                Err(Failure::Domain(report))
            }
        }
        Command::Trace { l, m, n, b, t } => {
            let b = rational(&b)?;
            let ts = t.iter().map(|s| rational(s)).collect::<Result<Vec<_>, _>>()?;
            Ok(trace_report(l, m, n, &b, &ts))
        }
        Command::Table { l_max, m_range, out } => {
            let ms = parse_m_range(&m_range)?;
            let tables = ms.iter().map(|&m| Ok((m, count_table(l_max, m)?))).collect::<Result<Vec<_>, Failure>>()?;
            let report = table_report(&tables, l_max);
            if let Some(path) = out {
                fs::write(&path, render(&report))
                    .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()), None))?;
            }
            Ok(report)
        }
    }
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(cli.command) {
        Ok(report) => Outcome { code: 0, stdout: render(&report), stderr: String::new() },
        Err(Failure::Domain(report)) => Outcome { code: 1, stdout: render(&report), stderr: String::new() },
        Err(Failure::Input(msg, report)) => Outcome {
            code: 2,
            stdout: report.as_ref().map(render).unwrap_or_default(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_ranges() {
        assert_eq!(parse_m_range("-2..1").ok(), Some(vec![-2, -1, 0, 1]));
        assert_eq!(parse_m_range("3").ok(), Some(vec![3]));
        assert_eq!(parse_m_range("-1..=0").ok(), Some(vec![-1, 0]));
        assert!(parse_m_range("2..1").is_err());
        assert!(parse_m_range("x").is_err());
    }

    #[test]
    fn count_command() {
        let o = run(["tropcyl", "count", "--l", "5", "--m", "3", "--n", "2"]);
        assert_eq!(o.code, 0);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["count"], json!(10));
        assert_eq!(v["oracle"], json!(10));
        assert_eq!(v["match"], json!(true));
    }

    #[test]
    fn usage_errors_exit_2() {
        let o = run(["tropcyl", "count", "--l", "5"]);
        assert_eq!(o.code, 2);
        assert!(!o.stderr.is_empty());
        assert_eq!(run(["tropcyl", "table", "--l-max", "0"]).code, 1);
    }
}
