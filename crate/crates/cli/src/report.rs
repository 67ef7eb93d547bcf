//! Command outcomes, exit codes and the JSON report.

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use serde::Serialize;
use serde_json::Value;

pub const PROPERTY_FAILURE: u8 = 1;
pub const BAD_INPUT: u8 = 2;
pub const QUADRATIC_MISMATCH: u8 = 3;
pub const NOT_NORMAL_FORM: u8 = 4;

/// What a command produced: its text report, the JSON fields and the exit
/// code.
pub struct Outcome {
    pub verdict: String,
    pub residuals: Value,
    pub text: String,
    /// Main artifact when no output file was given.
    pub output: Option<String>,
    pub code: u8,
    pub error: Option<String>,
}

impl Outcome {
    pub fn ok(verdict: &str, residuals: Value, text: String) -> Self {
        Self { verdict: verdict.into(), residuals, text, output: None, code: 0, error: None }
    }

    pub fn emit(self, command: &str, inputs: Value, timing_ms: f64, json: bool) -> ExitCode {
        if let Some(e) = &self.error {
            eprintln!("error: {e}");
        }
        if json {
            let report = JsonReport {
                command,
                inputs,
                verdict: &self.verdict,
                residuals: &self.residuals,
                timing_ms,
                output: self.output.as_deref(),
                error: self.error.as_deref(),
            };
            let line = serde_json::to_string(&report).expect("report serializes");
            write_stdout(&format!("{line}\n"));
        } else {
            write_stdout(&self.text);
            if let Some(out) = &self.output {
                write_stdout(out);
            }
        }
        ExitCode::from(self.code)
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn write_stdout(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|()| out.flush());
}

#[derive(Serialize)]
struct JsonReport<'a> {
    command: &'a str,
    inputs: Value,
    verdict: &'a str,
    residuals: &'a Value,
    timing_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

/// A command that stopped early.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    pub fn into_outcome(self) -> Outcome {
        Outcome {
            verdict: "ERROR".into(),
            residuals: Value::Null,
            text: String::new(),
            output: None,
            code: self.code,
            error: Some(self.message),
        }
    }
}

impl From<bgnf::Error> for Failure {
    fn from(e: bgnf::Error) -> Self {
        let code = match e {
            bgnf::Error::QuadraticMismatch(_) => QUADRATIC_MISMATCH,
            bgnf::Error::NotNormalForm { .. } => NOT_NORMAL_FORM,
            _ => BAD_INPUT,
        };
        Failure::new(code, e.to_string())
    }
}

pub type CmdResult = Result<Outcome, Failure>;

pub fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(BAD_INPUT, format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::new(BAD_INPUT, format!("{}: {e}", path.display())))
}

/// Prefixes a parse error with the file name.
pub fn in_file(path: &Path) -> impl Fn(bgnf::Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}
