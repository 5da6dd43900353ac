//! Client for an external answer set solver speaking clingo's JSON output.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use serde_json::Value;
use thiserror::Error;

use crate::asp::{parse_symbol, GroundAtom, Interpretation, Program, RuleKind};

/// Environment variable naming the solver executable.
pub const SOLVER_ENV: &str = "ASP_SOLVER";

/// Exit codes the solver uses for normal termination.
const ACCEPTED_EXIT_CODES: [i32; 4] = [0, 10, 20, 30];

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("no answer set solver configured (use --solver or set {SOLVER_ENV})")]
    NotConfigured,
    #[error("cannot run solver `{command}`: {message}")]
    Spawn { command: String, message: String },
    #[error("solver exited with status {code}: {stderr}")]
    Exit { code: i32, stderr: String },
    #[error("unexpected solver output: {0}")]
    Protocol(String),
}

/// One witness reported by the solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub atoms: Interpretation,
    pub costs: Vec<i64>,
}

/// An external solver invoked as `<command> --outf=2 <n>` with the program
/// on standard input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverClient {
    command: PathBuf,
}

impl SolverClient {
    pub fn new(command: impl Into<PathBuf>) -> Self {
        SolverClient { command: command.into() }
    }

    /// The solver named by [`SOLVER_ENV`], if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(SOLVER_ENV).filter(|v| !v.is_empty()).map(SolverClient::new)
    }

    pub fn command(&self) -> &Path {
        &self.command
    }

    /// Up to `n` models (`0` for all). With `optimize`, only witnesses whose
    /// costs equal the final optimum are kept. Models come back sorted by
    /// their canonical atom list.
    pub fn solve(&self, program: &str, n: usize, optimize: bool) -> Result<Vec<Model>, SolverError> {
        let mut command = Command::new(&self.command);
        command.arg("--outf=2").arg(n.to_string());
        if optimize {
            command.arg("--opt-mode=optN");
        }
        let spawn_error = |e: std::io::Error| SolverError::Spawn {
            command: self.command.display().to_string(),
            message: e.to_string(),
        };
        let mut child = command
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(spawn_error)?;
        let mut stdin = child.stdin.take().expect("stdin is piped");
        let input = program.to_string();
        let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
        let output = child.wait_with_output().map_err(spawn_error)?;
        // the solver may stop reading early; its exit status is what matters
        let _ = writer.join();
        let code = output.status.code().unwrap_or(-1);
        if !ACCEPTED_EXIT_CODES.contains(&code) {
            return Err(SolverError::Exit { code, stderr: String::from_utf8_lossy(&output.stderr).trim().to_string() });
        }
        let stdout = String::from_utf8_lossy(&output.stdout);
        let mut models = parse_output(&stdout, optimize)?;
        models.sort_by(|a, b| a.atoms.iter().cmp(b.atoms.iter()));
        models.dedup();
        if n > 0 {
            models.truncate(n);
        }
        Ok(models)
    }
}

fn protocol(message: impl Into<String>) -> SolverError {
    SolverError::Protocol(message.into())
}

fn costs(value: Option<&Value>) -> Result<Vec<i64>, SolverError> {
    match value {
        None => Ok(Vec::new()),
        Some(Value::Array(items)) => {
            items.iter().map(|c| c.as_i64().ok_or_else(|| protocol(format!("cost {c} is not an integer")))).collect()
        }
        Some(other) => Err(protocol(format!("`Costs` is {other}"))),
    }
}

/// Reads witnesses from `--outf=2` output.
pub fn parse_output(text: &str, optimize: bool) -> Result<Vec<Model>, SolverError> {
    let json: Value = serde_json::from_str(text).map_err(|e| protocol(format!("not JSON ({e})")))?;
    if json.get("Result").and_then(Value::as_str) == Some("UNSATISFIABLE") {
        return Ok(Vec::new());
    }
    let witnesses = match json.pointer("/Call/0/Witnesses") {
        None => return Ok(Vec::new()),
        Some(Value::Array(items)) => items,
        Some(other) => return Err(protocol(format!("`Witnesses` is {other}"))),
    };
    let mut models = Vec::new();
    for witness in witnesses {
        let values = witness
            .get("Value")
            .and_then(Value::as_array)
            .ok_or_else(|| protocol("witness without a `Value` list"))?;
        let mut atoms = Interpretation::new();
        for value in values {
            let text = value.as_str().ok_or_else(|| protocol(format!("atom {value} is not a string")))?;
            let symbol = parse_symbol(text).map_err(|e| protocol(format!("atom `{text}`: {e}")))?;
            atoms.insert(GroundAtom::from_shown(&symbol));
        }
        models.push(Model { atoms, costs: costs(witness.get("Costs"))? });
    }
    if optimize {
        if let Some(best) = json.pointer("/Models/Costs") {
            let best = costs(Some(best))?;
            models.retain(|m| m.costs == best);
        }
    }
    Ok(models)
}

/// Program text handed to the solver: every rule except show directives,
/// followed by the facts. Projection happens on the returned answer sets.
pub fn solver_input(program: &Program, facts: &Interpretation) -> String {
    let mut text = String::new();
    for rule in program.rules.iter().filter(|r| r.kind() != RuleKind::Show) {
        text.push_str(&rule.to_string());
        text.push('\n');
    }
    text.push_str(&facts.to_facts());
    text
}
