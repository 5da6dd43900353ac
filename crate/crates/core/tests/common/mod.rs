//! Helpers shared by the integration tests.
#![allow(dead_code)]

pub mod oracle;

use std::path::{Path, PathBuf};

use asp_mustache::asp::{parse_facts, Interpretation};
use asp_mustache::solver::SolverClient;

pub fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

/// The union of the given fact fixtures.
pub fn facts(names: &[&str]) -> Interpretation {
    let text: String = names.iter().map(|n| fixture(n)).collect();
    parse_facts(&text).unwrap_or_else(|e| panic!("facts {names:?}: {e}"))
}

/// An available solver: `ASP_SOLVER`, `clingo` on the path, or the Python
/// clingo module behind a wrapper script kept in the returned directory.
pub fn find_solver() -> Option<(SolverClient, Option<tempfile::TempDir>)> {
    if let Some(client) = SolverClient::from_env() {
        return Some((client, None));
    }
    let runs = |program: &str, args: &[&str]| {
        std::process::Command::new(program)
            .args(args)
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::null())
            .status()
            .is_ok_and(|s| s.success())
    };
    if runs("clingo", &["--version"]) {
        return Some((SolverClient::new("clingo"), None));
    }
    if !runs("python3", &["-m", "clingo", "--version"]) {
        return None;
    }
    let dir = tempfile::tempdir().ok()?;
    let script = dir.path().join("clingo");
    std::fs::write(&script, "#!/bin/sh\nexec python3 -m clingo \"$@\"\n").ok()?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).ok()?;
    }
    Some((SolverClient::new(script), Some(dir)))
}

