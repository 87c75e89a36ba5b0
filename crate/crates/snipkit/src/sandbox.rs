//! Client side of the sandbox-runner protocol.
//!
//! The runner is a long-lived JavaScript process that keeps one evaluation
//! context. Requests and responses are single-line JSON documents on its
//! stdin/stdout; anything the evaluated code prints goes to the runner's
//! stderr and is surfaced here as console output. Response id 0 carries
//! out-of-band errors (unhandled rejections), id -1 answers a request the
//! runner could not parse.
//!
//! [`StubEngine`] answers from a canned script instead, either in process or
//! behind `snipkit stub-runner`, so the shell can be exercised without a
//! JavaScript runtime.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub const OUT_OF_BAND_ID: i64 = 0;
pub const MALFORMED_ID: i64 = -1;

/// After a response arrives, wait this long for trailing console lines.
const CONSOLE_GRACE: Duration = Duration::from_millis(25);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Eval,
    Reset,
    Ping,
    Shutdown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRequest {
    pub id: i64,
    pub op: Op,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorPayload {
    pub name: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stack_top_line: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalResponse {
    pub id: i64,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_repr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorPayload>,
}

#[derive(Debug, thiserror::Error)]
pub enum SandboxError {
    #[error("no sandbox runner configured (set SNIPKIT_RUNNER)")]
    NotConfigured,
    #[error("cannot start sandbox runner: {0}")]
    Spawn(std::io::Error),
    #[error("execution timed out after {0:?}")]
    Timeout(Duration),
    #[error("sandbox runner exited")]
    Crashed,
    #[error("sandbox protocol error: {0}")]
    Protocol(String),
}

/// Something that arrived from the runner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Incoming {
    Line(String),
    Console(String),
    Closed,
}

pub trait Transport: Send {
    fn send(&mut self, line: &str) -> Result<(), SandboxError>;
    /// Next message, or `None` once `timeout` elapses.
    fn recv(&mut self, timeout: Duration) -> Option<Incoming>;
    fn kill(&mut self);
}

/// A runner child process.
pub struct ProcessTransport {
    child: Child,
    stdin: Option<ChildStdin>,
    rx: Receiver<Incoming>,
}

impl ProcessTransport {
    /// Spawns `program args...` in `cwd`.
    pub fn spawn(program: &Path, args: &[String], cwd: &Path) -> Result<Self, SandboxError> {
        let mut child = Command::new(program)
            .args(args)
            .current_dir(cwd)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(SandboxError::Spawn)?;
        let (tx, rx) = mpsc::channel();
        let stdout = child.stdout.take().expect("piped stdout");
        let stderr = child.stderr.take().expect("piped stderr");
        let out_tx = tx.clone();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if out_tx.send(Incoming::Line(line)).is_err() {
                    return;
                }
            }
            let _ = out_tx.send(Incoming::Closed);
        });
        thread::spawn(move || {
            for line in BufReader::new(stderr).lines() {
                let Ok(line) = line else { break };
                if tx.send(Incoming::Console(line)).is_err() {
                    return;
                }
            }
        });
        let stdin = child.stdin.take();
        Ok(Self { child, stdin, rx })
    }
}

impl Transport for ProcessTransport {
    fn send(&mut self, line: &str) -> Result<(), SandboxError> {
        let stdin = self.stdin.as_mut().ok_or(SandboxError::Crashed)?;
        writeln!(stdin, "{line}").and_then(|_| stdin.flush()).map_err(|_| SandboxError::Crashed)
    }

    fn recv(&mut self, timeout: Duration) -> Option<Incoming> {
        match self.rx.recv_timeout(timeout) {
            Ok(msg) => Some(msg),
            Err(RecvTimeoutError::Timeout) => None,
            Err(RecvTimeoutError::Disconnected) => Some(Incoming::Closed),
        }
    }

    fn kill(&mut self) {
        self.stdin = None;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Drop for ProcessTransport {
    fn drop(&mut self) {
        self.kill();
    }
}

/// One canned answer of a stub script.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CannedEval {
    /// Matched against the submitted code with surrounding whitespace trimmed.
    pub code: String,
    #[serde(default)]
    pub console: Vec<String>,
    #[serde(default)]
    pub value_repr: Option<String>,
    #[serde(default)]
    pub error: Option<ErrorPayload>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StubScript {
    #[serde(default)]
    pub evals: Vec<CannedEval>,
}

impl StubScript {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Canned-response runner. Entries with the same code are used in order;
/// the last one repeats once they run out. Unknown code evaluates to
/// `undefined`.
#[derive(Debug, Clone)]
pub struct StubEngine {
    script: StubScript,
    used: Vec<bool>,
}

impl StubEngine {
    pub fn new(script: StubScript) -> Self {
        let used = vec![false; script.evals.len()];
        Self { script, used }
    }

    /// Handles one request line: console output and the response line.
    pub fn handle(&mut self, line: &str) -> (Vec<String>, EvalResponse, bool) {
        let Ok(request) = serde_json::from_str::<EvalRequest>(line) else {
            let error = ErrorPayload { name: "ProtocolError".into(), message: "malformed request".into(), stack_top_line: None };
            return (Vec::new(), EvalResponse { id: MALFORMED_ID, ok: false, value_repr: None, error: Some(error) }, false);
        };
        let ok = |value_repr: Option<String>| EvalResponse { id: request.id, ok: true, value_repr, error: None };
        match request.op {
            Op::Reset | Op::Ping => (Vec::new(), ok(None), false),
            Op::Shutdown => (Vec::new(), ok(None), true),
            Op::Eval => {
                let code = request.code.as_deref().unwrap_or_default().trim();
                let matching: Vec<usize> =
                    (0..self.script.evals.len()).filter(|&i| self.script.evals[i].code.trim() == code).collect();
                let pick = matching.iter().copied().find(|&i| !self.used[i]).or(matching.last().copied());
                let Some(i) = pick else {
                    return (Vec::new(), ok(Some("undefined".into())), false);
                };
                self.used[i] = true;
                let canned = &self.script.evals[i];
                let response = match &canned.error {
                    Some(error) => EvalResponse { id: request.id, ok: false, value_repr: None, error: Some(error.clone()) },
                    None => ok(Some(canned.value_repr.clone().unwrap_or_else(|| "undefined".into()))),
                };
                (canned.console.clone(), response, false)
            }
        }
    }

    /// Serves the protocol over stdio until shutdown or end of input.
    pub fn serve(mut self, input: impl BufRead, mut out: impl Write, mut console: impl Write) -> std::io::Result<()> {
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (printed, response, stop) = self.handle(&line);
            for text in printed {
                writeln!(console, "{text}")?;
            }
            console.flush()?;
            writeln!(out, "{}", serde_json::to_string(&response).expect("serializable"))?;
            out.flush()?;
            if stop {
                break;
            }
        }
        Ok(())
    }
}

/// In-process transport around a [`StubEngine`].
pub struct StubTransport {
    engine: StubEngine,
    queue: std::collections::VecDeque<Incoming>,
    closed: bool,
}

impl StubTransport {
    pub fn new(script: StubScript) -> Self {
        Self { engine: StubEngine::new(script), queue: Default::default(), closed: false }
    }
}

impl Transport for StubTransport {
    fn send(&mut self, line: &str) -> Result<(), SandboxError> {
        if self.closed {
            return Err(SandboxError::Crashed);
        }
        let (console, response, stop) = self.engine.handle(line);
        self.queue.extend(console.into_iter().map(Incoming::Console));
        self.queue.push_back(Incoming::Line(serde_json::to_string(&response).expect("serializable")));
        if stop {
            self.closed = true;
            self.queue.push_back(Incoming::Closed);
        }
        Ok(())
    }

    fn recv(&mut self, _timeout: Duration) -> Option<Incoming> {
        self.queue.pop_front().or(Some(Incoming::Closed).filter(|_| self.closed))
    }

    fn kill(&mut self) {
        self.closed = true;
    }
}

/// Result of one request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub response: EvalResponse,
    /// Console output printed while the request ran.
    pub console: Vec<String>,
    /// Out-of-band errors that arrived meanwhile.
    pub async_errors: Vec<ErrorPayload>,
}

/// How to (re)start the runner.
#[derive(Debug, Clone)]
pub enum SandboxConfig {
    Process { program: PathBuf, args: Vec<String> },
    Stub(StubScript),
    Unconfigured,
}

pub struct SandboxClient {
    transport: Box<dyn Transport>,
    next_id: i64,
    pub timeout: Duration,
}

impl SandboxClient {
    pub fn new(transport: Box<dyn Transport>, timeout: Duration) -> Self {
        Self { transport, next_id: 1, timeout }
    }

    pub fn start(config: &SandboxConfig, cwd: &Path, timeout: Duration) -> Result<Self, SandboxError> {
        let transport: Box<dyn Transport> = match config {
            SandboxConfig::Process { program, args } => Box::new(ProcessTransport::spawn(program, args, cwd)?),
            SandboxConfig::Stub(script) => Box::new(StubTransport::new(script.clone())),
            SandboxConfig::Unconfigured => return Err(SandboxError::NotConfigured),
        };
        Ok(Self::new(transport, timeout))
    }

    fn request(&mut self, op: Op, code: Option<&str>) -> Result<Reply, SandboxError> {
        let id = self.next_id;
        self.next_id += 1;
        let line = serde_json::to_string(&EvalRequest { id, op, code: code.map(str::to_string) }).expect("serializable");
        self.transport.send(&line)?;

        let deadline = Instant::now() + self.timeout;
        let mut console = Vec::new();
        let mut async_errors = Vec::new();
        let response = loop {
            let left = deadline.saturating_duration_since(Instant::now());
            match self.transport.recv(left) {
                None => return Err(SandboxError::Timeout(self.timeout)),
                Some(Incoming::Closed) => return Err(SandboxError::Crashed),
                Some(Incoming::Console(text)) => console.push(text),
                Some(Incoming::Line(text)) => {
                    let response: EvalResponse = serde_json::from_str(&text)
                        .map_err(|e| SandboxError::Protocol(format!("unparseable response `{text}`: {e}")))?;
                    match response.id {
                        OUT_OF_BAND_ID => async_errors.extend(response.error),
                        MALFORMED_ID => {
                            let why = response.error.map(|e| e.message).unwrap_or_default();
                            return Err(SandboxError::Protocol(format!("runner rejected request: {why}")));
                        }
                        got if got == id => break response,
                        got => return Err(SandboxError::Protocol(format!("expected response {id}, got {got}"))),
                    }
                }
            }
        };
        // Console output is on another stream; give stragglers a moment.
        while let Some(msg) = self.transport.recv(CONSOLE_GRACE) {
            match msg {
                Incoming::Console(text) => console.push(text),
                Incoming::Line(text) => {
                    if let Ok(r) = serde_json::from_str::<EvalResponse>(&text) {
                        if r.id == OUT_OF_BAND_ID {
                            async_errors.extend(r.error);
                        }
                    }
                }
                Incoming::Closed => break,
            }
        }
        Ok(Reply { response, console, async_errors })
    }

    pub fn eval(&mut self, code: &str) -> Result<Reply, SandboxError> {
        self.request(Op::Eval, Some(code))
    }

    pub fn reset(&mut self) -> Result<Reply, SandboxError> {
        self.request(Op::Reset, None)
    }

    pub fn ping(&mut self) -> Result<Reply, SandboxError> {
        self.request(Op::Ping, None)
    }

    /// Stops the runner without asking.
    pub fn kill(&mut self) {
        self.transport.kill();
    }

    pub fn shutdown(mut self) {
        let _ = self.request(Op::Shutdown, None);
        self.transport.kill();
    }
}
