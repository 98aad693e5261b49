//! Scenario runner behind the `proxlab` binary.
//!
//! A run executes commands in order against one context, so a `build-ams`
//! command feeds the `proximalize`, `verify-bounds` and `sweep` commands
//! after it. Every command writes `NN-<command>.csv` and
//! `NN-<command>.meta.json` into the output directory; the run ends with
//! `summary.json`.

use std::path::{Path, PathBuf};

use proxlab_core::ams::SemigroupSpec;
use serde_json::json;

pub mod commands;
pub mod report;
pub mod scenario;

use commands::Context;
use report::{pretty, write_file, Report, VERSION};
use scenario::{CommandDef, Overrides};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("schema error {0}")]
    Schema(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Engine(#[from] proxlab_core::Error),
}

/// Exit status of a run.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_ASSERTION: i32 = 2;

#[derive(Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub reports: Vec<Report>,
    /// CSV path of each report, in command order.
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(Report::passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_ASSERTION
        }
    }
}

/// Runs `commands` and writes their reports into `dir`. Command-line
/// overrides in `over` beat the values in the commands.
pub fn run_commands(
    spec: Option<SemigroupSpec>,
    seed: u64,
    mut commands: Vec<CommandDef>,
    dir: &Path,
    over: Overrides,
) -> Result<RunOutcome, CliError> {
    let mut ctx = Context {
        spec,
        seed: over.seed.unwrap_or(seed),
        set: None,
    };
    if let (Some(s), Some(seed)) = (ctx.spec.as_mut(), over.seed) {
        s.seed = seed;
    }
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut reports = Vec::new();
    let mut files = Vec::new();
    let mut entries = Vec::new();
    for (i, cmd) in commands.iter_mut().enumerate() {
        *cmd.overrides_mut() = over;
        let rep = commands::dispatch(cmd, &mut ctx)?;
        let stem = format!("{:02}-{}", i + 1, cmd.name());
        let path = rep.write(dir, &stem)?;
        entries.push(json!({
            "index": i + 1,
            "command": cmd.name(),
            "csv": format!("{stem}.csv"),
            "passed": rep.passed(),
            "summary": rep.summary_value(),
        }));
        files.push(path);
        reports.push(rep);
    }
    let outcome = RunOutcome {
        dir: dir.to_path_buf(),
        reports,
        files,
    };
    let summary = json!({
        "seed": ctx.seed,
        "commands": entries,
        "passed": outcome.passed(),
        "version": VERSION,
    });
    write_file(&dir.join("summary.json"), &pretty(&summary))?;
    Ok(outcome)
}

/// Output directory of a scenario: the override, or the scenario's
/// `output` resolved against the scenario file's directory.
pub fn output_dir(scenario_path: &Path, output: &Path, out_override: Option<&Path>) -> PathBuf {
    match out_override {
        Some(p) => p.to_path_buf(),
        None if output.is_absolute() => output.to_path_buf(),
        None => scenario_path
            .parent()
            .unwrap_or(Path::new("."))
            .join(output),
    }
}

/// Loads and runs a scenario file.
pub fn run_scenario(
    path: &Path,
    out_override: Option<&Path>,
    over: Overrides,
) -> Result<RunOutcome, CliError> {
    let (sc, spec) = scenario::load(path)?;
    let dir = output_dir(path, &sc.output, out_override);
    run_commands(Some(spec), sc.seed, sc.commands, &dir, over)
}
