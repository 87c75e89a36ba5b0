//! Package-manager subprocesses (npm-compatible command line).

use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use crate::repl::env::manifest_dependencies;

/// Lines of output kept for failure messages.
const TAIL_LINES: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum PmError {
    #[error("package manager `{0}` not found; set SNIPKIT_NPM")]
    Missing(String),
    #[error("cannot run package manager: {0}")]
    Spawn(std::io::Error),
    #[error("package manager exited with {code}:\n{tail}")]
    Failed { code: i32, tail: String },
    #[error("package manager timed out after {secs:.1}s:\n{tail}", secs = .timeout.as_secs_f64())]
    Timeout { timeout: Duration, tail: String },
    #[error("`{0}` is not installed in this environment")]
    NotInstalled(String),
    #[error("cannot read project manifest: {0}")]
    Manifest(std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmOutput {
    pub tail: String,
}

#[derive(Debug, Clone)]
pub struct PackageManager {
    pub program: PathBuf,
    /// Directory holding package folders or tarballs named after packages.
    pub registry: Option<PathBuf>,
    pub offline: bool,
}

impl PackageManager {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        Self { program: program.into(), registry: None, offline: false }
    }

    /// What to hand to `install`: a local folder or tarball when the local
    /// registry has one, the bare name otherwise.
    pub fn install_spec(&self, name: &str) -> String {
        if let Some(registry) = &self.registry {
            let safe = name.replace('/', "__");
            for candidate in [registry.join(&safe), registry.join(format!("{safe}.tgz"))] {
                if candidate.exists() {
                    let abs = candidate.canonicalize().unwrap_or(candidate);
                    return abs.to_string_lossy().into_owned();
                }
            }
        }
        name.to_string()
    }

    fn base_args(&self) -> Vec<String> {
        let mut args = vec!["--no-audit".to_string(), "--no-fund".to_string()];
        if self.offline {
            args.push("--offline".to_string());
        }
        args
    }

    /// `install <spec>` in `dir`; `on_line` sees output as it arrives.
    pub fn install(&self, dir: &Path, name: &str, timeout: Duration, on_line: &mut dyn FnMut(&str)) -> Result<PmOutput, PmError> {
        let mut args = vec!["install".to_string(), self.install_spec(name), "--install-links".to_string()];
        args.extend(self.base_args());
        self.run(dir, &args, timeout, on_line)
    }

    /// `uninstall <name>`; refuses names missing from the manifest, since
    /// npm itself silently succeeds on those.
    pub fn uninstall(&self, dir: &Path, name: &str, timeout: Duration, on_line: &mut dyn FnMut(&str)) -> Result<PmOutput, PmError> {
        let deps = manifest_dependencies(dir).map_err(PmError::Manifest)?;
        if !deps.contains(name) {
            return Err(PmError::NotInstalled(name.to_string()));
        }
        let mut args = vec!["uninstall".to_string(), name.to_string()];
        args.extend(self.base_args());
        self.run(dir, &args, timeout, on_line)
    }

    pub fn run(&self, dir: &Path, args: &[String], timeout: Duration, on_line: &mut dyn FnMut(&str)) -> Result<PmOutput, PmError> {
        let mut child = Command::new(&self.program)
            .args(args)
            .current_dir(dir)
            .env("npm_config_update_notifier", "false")
            .env("npm_config_progress", "false")
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => PmError::Missing(self.program.display().to_string()),
                _ => PmError::Spawn(e),
            })?;

        let (tx, rx) = mpsc::channel::<String>();
        let readers: Vec<_> = [
            child.stdout.take().map(|s| Box::new(s) as Box<dyn Read + Send>),
            child.stderr.take().map(|s| Box::new(s) as Box<dyn Read + Send>),
        ]
        .into_iter()
        .flatten()
        .map(|stream| {
            let tx = tx.clone();
            thread::spawn(move || {
                for line in BufReader::new(stream).lines() {
                    let Ok(line) = line else { break };
                    if tx.send(line).is_err() {
                        break;
                    }
                }
            })
        })
        .collect();
        drop(tx);

        let started = Instant::now();
        let mut tail: VecDeque<String> = VecDeque::new();
        let mut push = |line: String, on_line: &mut dyn FnMut(&str)| {
            on_line(&line);
            if tail.len() == TAIL_LINES {
                tail.pop_front();
            }
            tail.push_back(line);
        };
        let status = loop {
            let left = timeout.saturating_sub(started.elapsed());
            if left.is_zero() {
                let _ = child.kill();
                let _ = child.wait();
                // Readers are left detached: grandchildren may still hold the pipes.
                drop(readers);
                while let Ok(line) = rx.try_recv() {
                    push(line, on_line);
                }
                return Err(PmError::Timeout { timeout, tail: Vec::from(tail).join("\n") });
            }
            match rx.recv_timeout(left.min(Duration::from_millis(100))) {
                Ok(line) => push(line, on_line),
                Err(mpsc::RecvTimeoutError::Timeout) => {}
                Err(mpsc::RecvTimeoutError::Disconnected) => {
                    if let Some(status) = child.try_wait().map_err(PmError::Spawn)? {
                        break status;
                    }
                    thread::sleep(Duration::from_millis(10));
                }
            }
        };
        for handle in readers {
            let _ = handle.join();
        }
        while let Ok(line) = rx.try_recv() {
            push(line, on_line);
        }
        let tail = Vec::from(tail).join("\n");
        if status.success() {
            Ok(PmOutput { tail })
        } else {
            Err(PmError::Failed { code: status.code().unwrap_or(-1), tail })
        }
    }
}
