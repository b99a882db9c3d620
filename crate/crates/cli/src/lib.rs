//! Command-line front end for `eprb-core`.
//!
//! [`run`] parses arguments, computes the result, writes it in the chosen
//! format and returns the process exit code.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::Value;

use args::{Cli, Command, Format, GlobalArgs};
use commands::Outcome;
use error::CliError;
use manifest::RunManifest;
use output::to_json_bytes;

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// code. Results go to `stdout` or `--out`; diagnostics go to `stderr`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let recorded: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match dispatch(&cli, recorded, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "eprb: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(
    cli: &Cli,
    argv: Vec<String>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    if let Command::Replay(r) = &cli.command {
        return replay(&r.manifest_path, stderr);
    }
    let started_at = manifest::now_rfc3339();
    let outcome = compute(cli)?;
    let manifest = RunManifest {
        command: command_name(&cli.command).to_string(),
        params: serde_json::to_value(&cli.command)?
            .as_object()
            .and_then(|o| o.values().next().cloned())
            .unwrap_or(Value::Null),
        argv,
        seed: cli.global.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_at,
        format: format_name(cli.global.format).to_string(),
        checksums: manifest::checksums(&outcome.result, &outcome.csv)?,
    };
    emit(&cli.global, &outcome, &manifest, stdout, stderr)?;
    Ok(outcome.exit_code)
}

fn compute(cli: &Cli) -> Result<Outcome, CliError> {
    let work = || match &cli.command {
        Command::Correlate(a) => commands::correlate(a, &cli.global),
        Command::Sweep(a) => commands::sweep(a, &cli.global),
        Command::Chsh(a) => commands::chsh(a, &cli.global),
        Command::Audit(a) => commands::audit(a, &cli.global),
        Command::Replay(_) => Err(CliError::Internal("replay cannot be nested".into())),
    };
    match cli.global.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?
            .install(work),
        None => work(),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Correlate(_) => "correlate",
        Command::Sweep(_) => "sweep",
        Command::Chsh(_) => "chsh",
        Command::Audit(_) => "audit",
        Command::Replay(_) => "replay",
    }
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn emit(
    global: &GlobalArgs,
    outcome: &Outcome,
    manifest: &RunManifest,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let to_stdout = global.out == "-";
    let mut manifest_json = to_json_bytes(manifest)?;
    manifest_json.push(b'\n');
    let payload = match global.format {
        Format::Json => {
            let envelope = serde_json::json!({
                "manifest": serde_json::to_value(manifest)?,
                "result": outcome.result,
            });
            let mut bytes = to_json_bytes(&envelope)?;
            bytes.push(b'\n');
            bytes
        }
        Format::Csv => outcome.csv.clone(),
    };
    if to_stdout {
        stdout.write_all(&payload)?;
    } else {
        fs::write(&global.out, &payload)?;
    }
    if global.format == Format::Csv {
        match (&global.manifest, to_stdout) {
            (Some(path), _) => fs::write(path, &manifest_json)?,
            (None, false) => fs::write(sidecar_path(&global.out), &manifest_json)?,
            (None, true) => stderr.write_all(&manifest_json)?,
        }
    } else if let Some(path) = &global.manifest {
        fs::write(path, &manifest_json)?;
    }
    Ok(())
}

/// Manifest location next to a CSV output file.
pub fn sidecar_path(out: &str) -> PathBuf {
    PathBuf::from(format!("{out}.manifest.json"))
}

fn replay(path: &Path, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let text = fs::read(path)?;
    let value: Value = serde_json::from_slice(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    // Accept either a bare manifest or a JSON output envelope.
    let value = value.get("manifest").cloned().unwrap_or(value);
    let recorded: RunManifest = serde_json::from_value(value)
        .map_err(|e| CliError::Usage(format!("{}: not a run manifest: {e}", path.display())))?;
    let argv = std::iter::once("eprb".to_string()).chain(recorded.argv.iter().cloned());
    let cli = Cli::try_parse_from(argv)
        .map_err(|e| CliError::Usage(format!("recorded arguments no longer parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Usage("a manifest cannot record a replay".into()));
    }
    let outcome = compute(&cli)?;
    let fresh = manifest::checksums(&outcome.result, &outcome.csv)?;
    if fresh != recorded.checksums {
        return Err(CliError::ReplayMismatch(format!(
            "recorded {:?}, recomputed {:?}",
            recorded.checksums, fresh
        )));
    }
    writeln!(stderr, "replay ok: {} checksums match", fresh.len())?;
    Ok(0)
}
