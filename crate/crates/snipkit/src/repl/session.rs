//! The interaction loop and dot-commands.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Duration;

use snipkit_core::js::{needs_continuation, parse, sort_snippets, SourceType};
use snipkit_core::search::{query_packages, InvertedIndex, RankingMode, SearchError};
use snipkit_core::Snippet;

use super::editor::{EditorAction, EditorState};
use super::env::ReplEnvironment;
use super::keys::Key;
use super::line::{LineAction, LineEditor};
use super::list::{ListEntry, PackageListView};
use super::ui::{with_spinner, Channel, Ui};
use crate::db::Database;
use crate::pm::PackageManager;
use crate::sandbox::{Reply, SandboxClient, SandboxConfig, SandboxError};

/// Values longer than this are cut when printed.
pub const PRINT_CAP: usize = 10_000;
pub const PROMPT: &str = "> ";
pub const CONTINUATION_PROMPT: &str = "... ";
const ASK_PROMPT: &str = "? ";
pub const REPLAY_START: &str = "replaying";
pub const REPLAY_DONE: &str = "replay finished";

pub const HELP: &str = "\
commands:
  .packages <words>   search packages, ranked by predicted runnability
  .samples [package]  code snippets for a package (default: installed ones);
                      F2/F3 or ctrl-p/ctrl-n cycle, enter runs
  .install <package>  install into this session's project
  .uninstall <package>
  .editor             edit the session code, then rerun it from scratch
  .reset              forget all definitions (packages stay installed)
  .save <file>        write the session code to a file (relative to the project)
  .help               this text
  .exit               leave";

pub struct ReplOptions {
    pub workspace: PathBuf,
    pub keep_env: bool,
    pub sandbox: SandboxConfig,
    pub pm: PackageManager,
    /// Command line of an external editor; the file name is appended.
    pub external_editor: Option<String>,
    pub install_timeout: Duration,
    pub eval_timeout: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Exit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Accepted,
    Rejected,
    /// No usable sandbox; already reported.
    Unavailable,
}

struct SnippetCycle {
    items: Vec<Snippet>,
    pos: usize,
}

/// Text a snippet contributes to the prompt.
fn snippet_text(s: &Snippet) -> &str {
    s.correction.as_ref().map(|c| c.corrected_text.as_str()).unwrap_or(&s.raw_text)
}

fn cap(text: &str) -> String {
    match text.char_indices().nth(PRINT_CAP) {
        None => text.to_string(),
        Some((cut, _)) => {
            let total = text.chars().count();
            format!("{}… ({} more characters)", &text[..cut], total - PRINT_CAP)
        }
    }
}

/// Splits code into top-level statements (with their leading comments),
/// each paired with its 1-based starting line.
pub fn statement_chunks(code: &str) -> Vec<(u32, String)> {
    let outcome = parse(code, SourceType::Script);
    let mut chunks = Vec::new();
    let mut from = 0;
    for stmt in &outcome.statements {
        let end = stmt.span.end.max(from);
        let text = code[from..end].trim();
        if !text.is_empty() {
            chunks.push((stmt.line, text.to_string()));
        }
        from = end;
    }
    let rest = code[from..].trim();
    if !rest.is_empty() {
        match chunks.last_mut() {
            Some((_, last)) => {
                last.push('\n');
                last.push_str(rest);
            }
            None => chunks.push((1, rest.to_string())),
        }
    }
    chunks
}

pub struct Session<'a> {
    ui: &'a mut dyn Ui,
    db: &'a Database,
    index: &'a InvertedIndex,
    opts: ReplOptions,
    env: ReplEnvironment,
    sandbox: Option<SandboxClient>,
    line: LineEditor,
    cycle: Option<SnippetCycle>,
    pending: String,
}

/// Runs an interactive session until `.exit` or the end of input.
pub fn run_repl(ui: &mut dyn Ui, db: &Database, index: &InvertedIndex, opts: ReplOptions) -> anyhow::Result<()> {
    let env = ReplEnvironment::create(&opts.workspace)?;
    ui.emit(Channel::Info, &format!("environment {}", env.root_dir.display()));
    ui.emit(Channel::Info, "type .help for commands");
    let mut session = Session {
        ui,
        db,
        index,
        opts,
        env,
        sandbox: None,
        line: LineEditor::new(),
        cycle: None,
        pending: String::new(),
    };
    session.main_loop();
    session.finish()
}

impl<'a> Session<'a> {
    fn info(&mut self, text: &str) {
        self.ui.emit(Channel::Info, text);
    }

    fn error(&mut self, text: &str) {
        self.ui.emit(Channel::Error, text);
    }

    fn main_loop(&mut self) {
        loop {
            let prompt = if self.pending.is_empty() { PROMPT } else { CONTINUATION_PROMPT };
            self.ui.draw_prompt(prompt, &self.line);
            let Some(key) = self.ui.next_key() else { break };
            match self.line.handle(key) {
                LineAction::Pending => {}
                LineAction::Submit(text) => {
                    self.ui.accept_prompt(prompt, &text);
                    if self.submit(text) == Flow::Exit {
                        break;
                    }
                }
                LineAction::PreviousSnippet => self.step_cycle(-1),
                LineAction::NextSnippet => self.step_cycle(1),
                LineAction::Cancelled => self.pending.clear(),
                LineAction::Eof => break,
            }
        }
    }

    fn finish(mut self) -> anyhow::Result<()> {
        if let Some(client) = self.sandbox.take() {
            client.shutdown();
        }
        let root = self.env.root_dir.clone();
        if self.opts.keep_env {
            self.ui.emit(Channel::Info, &format!("environment kept at {}", root.display()));
        }
        self.env.teardown(self.opts.keep_env).map_err(|e| anyhow::anyhow!("removing {}: {e}", root.display()))
    }

    fn submit(&mut self, text: String) -> Flow {
        if self.pending.is_empty() {
            let trimmed = text.trim();
            if trimmed.is_empty() {
                return Flow::Continue;
            }
            if trimmed.starts_with('.') {
                return self.command(trimmed);
            }
        }
        let code = if self.pending.is_empty() { text } else { format!("{}\n{text}", self.pending) };
        if needs_continuation(&code) {
            self.pending = code;
            return Flow::Continue;
        }
        self.pending.clear();
        self.execute(&code);
        Flow::Continue
    }

    fn command(&mut self, input: &str) -> Flow {
        let (name, arg) = match input.split_once(char::is_whitespace) {
            Some((n, a)) => (n, a.trim()),
            None => (input, ""),
        };
        match name {
            ".packages" => self.cmd_packages(arg),
            ".samples" => self.cmd_samples(arg),
            ".install" | ".uninstall" if arg.is_empty() => self.error(&format!("usage: {name} <package>")),
            ".install" => self.cmd_install(arg),
            ".uninstall" => self.cmd_uninstall(arg),
            ".editor" => self.cmd_editor(),
            ".reset" => self.cmd_reset(),
            ".save" => self.cmd_save(arg),
            ".help" => self.info(HELP),
            ".exit" => return Flow::Exit,
            _ => {
                self.error(&format!("unknown command {name}"));
                self.info(HELP);
            }
        }
        Flow::Continue
    }

    /// Reads a yes/no answer; anything but y/yes (including escape) is no.
    fn ask(&mut self, question: &str) -> bool {
        self.info(&format!("{question} (y/n)"));
        let mut editor = LineEditor::new();
        loop {
            self.ui.draw_prompt(ASK_PROMPT, &editor);
            let Some(key) = self.ui.next_key() else { return false };
            if key == Key::Esc {
                self.ui.accept_prompt(ASK_PROMPT, "");
                return false;
            }
            match editor.handle(key) {
                LineAction::Submit(answer) => {
                    self.ui.accept_prompt(ASK_PROMPT, &answer);
                    let answer = answer.trim().to_ascii_lowercase();
                    return answer == "y" || answer == "yes";
                }
                LineAction::Cancelled | LineAction::Eof => return false,
                _ => {}
            }
        }
    }

    // ---- packages ----------------------------------------------------

    fn cmd_packages(&mut self, query: &str) {
        if query.is_empty() {
            self.error("usage: .packages <search words>");
            return;
        }
        let ranked = match query_packages(query, self.index, RankingMode::Runnability) {
            Ok(r) => r,
            Err(SearchError::EmptyQuery) => {
                self.error(&format!("`{query}` has no searchable words"));
                return;
            }
        };
        if ranked.is_empty() {
            self.info(&format!("no packages found for `{query}`"));
            return;
        }
        let entries: Vec<ListEntry> = ranked
            .entries
            .iter()
            .map(|e| ListEntry {
                name: e.name.clone(),
                description: self.db.record(&e.name).map(|r| r.description).unwrap_or_default(),
                stars: e.stars,
                probability: e.probability,
            })
            .collect();
        self.info(&format!("{} packages match `{query}`, most likely to work first", entries.len()));
        let mut view = PackageListView::new(entries, self.ui.list_height());
        let chosen = loop {
            self.ui.draw_list(&view);
            match self.ui.next_key() {
                Some(Key::Up | Key::CtrlP) => view.move_by(-1),
                Some(Key::Down | Key::CtrlN) => view.move_by(1),
                Some(Key::PageUp) => view.page_up(),
                Some(Key::PageDown) => view.page_down(),
                Some(Key::Home) => view.home(),
                Some(Key::End) => view.end(),
                Some(Key::Enter) => break view.selected().map(|e| e.name.clone()),
                Some(Key::Esc | Key::CtrlC) | None => break None,
                Some(_) => {}
            }
        };
        self.ui.close_list();
        if let Some(name) = chosen {
            if self.ask(&format!("install {name}?")) {
                self.cmd_install(&name);
            }
        }
    }

    fn cmd_install(&mut self, name: &str) {
        if let Err(e) = self.env.ensure_exists() {
            self.error(&e.to_string());
            return;
        }
        let (pm, dir, timeout) = (&self.opts.pm, &self.env.root_dir, self.opts.install_timeout);
        let result = with_spinner(self.ui, &format!("installing {name}"), |tx| {
            pm.install(dir, name, timeout, &mut |line| {
                let _ = tx.send(line.to_string());
            })
        });
        match result {
            Ok(_) => {
                self.after_pm_change();
                if self.env.installed.contains(name) {
                    self.info(&format!("installed {name}"));
                } else {
                    self.error(&format!("install finished but {name} is not listed in package.json"));
                }
            }
            Err(e) => {
                self.after_pm_change();
                self.error(&format!("install of {name} failed: {e}"));
            }
        }
    }

    fn cmd_uninstall(&mut self, name: &str) {
        if let Err(e) = self.env.ensure_exists() {
            self.error(&e.to_string());
            return;
        }
        let (pm, dir, timeout) = (&self.opts.pm, &self.env.root_dir, self.opts.install_timeout);
        let result = with_spinner(self.ui, &format!("removing {name}"), |tx| {
            pm.uninstall(dir, name, timeout, &mut |line| {
                let _ = tx.send(line.to_string());
            })
        });
        self.after_pm_change();
        match result {
            Ok(_) => self.info(&format!("uninstalled {name}")),
            Err(e) => self.error(&format!("uninstall of {name} failed: {e}")),
        }
    }

    fn after_pm_change(&mut self) {
        if let Err(e) = self.env.refresh_installed() {
            self.error(&e.to_string());
        }
    }

    // ---- snippets ----------------------------------------------------

    fn cmd_samples(&mut self, arg: &str) {
        let packages: Vec<String> = if arg.is_empty() {
            if self.env.installed.is_empty() {
                self.info("nothing installed yet: find a package with .packages <words>, or name one with .samples <package>");
                return;
            }
            self.env.installed.iter().cloned().collect()
        } else {
            let name = arg.to_lowercase();
            if !self.db.contains(&name) {
                self.error(&format!("package {name} not found in the corpus"));
                return;
            }
            vec![name]
        };
        let mut items = Vec::new();
        for name in &packages {
            match self.db.snippets(name) {
                Ok(snippets) => items.extend(sort_snippets(snippets)),
                // Installed packages need not be in the corpus.
                Err(_) if arg.is_empty() => {}
                Err(e) => {
                    self.error(&e.to_string());
                    return;
                }
            }
        }
        if items.is_empty() {
            self.info(&format!("no code snippets for {}", packages.join(", ")));
            self.cycle = None;
            return;
        }
        self.cycle = Some(SnippetCycle { items, pos: 0 });
        self.show_snippet();
    }

    fn step_cycle(&mut self, delta: isize) {
        let Some(cycle) = &mut self.cycle else {
            self.info("no snippets loaded; use .samples first");
            return;
        };
        let n = cycle.items.len();
        cycle.pos = (cycle.pos as isize + delta).rem_euclid(n as isize) as usize;
        self.show_snippet();
    }

    fn show_snippet(&mut self) {
        let Some(cycle) = &self.cycle else { return };
        let snippet = &cycle.items[cycle.pos];
        let text = snippet_text(snippet).to_string();
        let (errors, comment_only) =
            snippet.correction.as_ref().map(|c| (c.error_count, c.comment_only)).unwrap_or((0, false));
        let header = format!(
            "[{}/{}] {} snippet {} · {} lint error{}{} · F2/F3 to cycle, enter to run",
            cycle.pos + 1,
            cycle.items.len(),
            snippet.package_name,
            snippet.ordinal,
            errors,
            if errors == 1 { "" } else { "s" },
            if comment_only { " · fully commented out" } else { "" },
        );
        self.info(&header);
        self.line.set_text(&text);
        self.env.last_viewed_snippet = Some(text);
    }

    // ---- evaluation --------------------------------------------------

    fn client(&mut self) -> Option<&mut SandboxClient> {
        if self.sandbox.is_none() {
            match SandboxClient::start(&self.opts.sandbox, &self.env.root_dir, self.opts.eval_timeout) {
                Ok(client) => self.sandbox = Some(client),
                Err(SandboxError::NotConfigured) => {
                    self.error("no JavaScript runner configured; set SNIPKIT_RUNNER or pass --runner");
                    return None;
                }
                Err(e) => {
                    self.error(&format!("cannot start the JavaScript runner: {e}"));
                    return None;
                }
            }
        }
        self.sandbox.as_mut()
    }

    fn eval_raw(&mut self, code: &str) -> Result<Reply, SandboxError> {
        if self.client().is_none() {
            return Err(SandboxError::NotConfigured);
        }
        let client = self.sandbox.as_mut().expect("started");
        with_spinner(self.ui, "running", |_tx| client.eval(code))
    }

    fn show_reply(&mut self, reply: &Reply) {
        for line in &reply.console {
            self.ui.emit(Channel::Console, line);
        }
        for err in &reply.async_errors {
            self.error(&format!("uncaught (async) {}: {}", err.name, err.message));
        }
        if let Some(err) = &reply.response.error {
            self.error(&format!("{}: {}", err.name, err.message));
            if let Some(at) = &err.stack_top_line {
                self.error(&format!("    {}", at.trim()));
            }
            if err.message.contains("has already been declared") {
                self.info("hint: .reset clears every definition so the name can be declared again");
            }
        } else if let Some(value) = &reply.response.value_repr {
            self.ui.emit(Channel::Value, &cap(value));
        }
    }

    fn execute(&mut self, code: &str) -> Outcome {
        if let Err(e) = self.env.ensure_exists() {
            self.error(&e.to_string());
            return Outcome::Unavailable;
        }
        match self.eval_raw(code) {
            Ok(reply) => {
                self.show_reply(&reply);
                if reply.response.ok {
                    self.env.session_buffer.push(code.to_string());
                    Outcome::Accepted
                } else {
                    Outcome::Rejected
                }
            }
            Err(SandboxError::NotConfigured) => Outcome::Unavailable,
            Err(e) => {
                self.recover(e);
                Outcome::Unavailable
            }
        }
    }

    /// Runner died or hung: start a new one and offer to rebuild state.
    fn recover(&mut self, cause: SandboxError) {
        match &cause {
            SandboxError::Timeout(t) => self.error(&format!("execution timed out after {:.1}s", t.as_secs_f64())),
            SandboxError::Crashed => self.error("the JavaScript runner stopped unexpectedly"),
            other => self.error(&format!("JavaScript runner failed: {other}")),
        }
        if let Some(mut client) = self.sandbox.take() {
            client.kill();
        }
        self.info("started a fresh runner; the session code is kept");
        if !self.env.session_buffer.is_empty() {
            let n = self.env.session_buffer.len();
            if self.ask(&format!("replay {n} session entr{}?", if n == 1 { "y" } else { "ies" })) {
                let entries: Vec<(u32, String)> = self.env.session_buffer.iter().map(|c| (0, c.clone())).collect();
                self.replay(entries);
            }
        }
    }

    /// Resets the runner and re-executes `entries`, stopping at the first
    /// failure. The session buffer is left alone.
    fn replay(&mut self, entries: Vec<(u32, String)>) {
        if let Some(client) = self.client() {
            if let Err(e) = client.reset() {
                self.recover_silently(e);
            }
        } else {
            return;
        }
        self.info(&format!("{REPLAY_START} {} entries", entries.len()));
        for (line, code) in &entries {
            match self.eval_raw(code) {
                Ok(reply) => {
                    self.show_reply(&reply);
                    if !reply.response.ok {
                        let at = if *line > 0 { format!(" at line {line}") } else { String::new() };
                        self.error(&format!("replay stopped{at}"));
                        return;
                    }
                }
                Err(e) => {
                    self.error(&format!("replay stopped: {e}"));
                    self.recover_silently(e);
                    return;
                }
            }
        }
        self.info(REPLAY_DONE);
    }

    fn recover_silently(&mut self, _cause: SandboxError) {
        if let Some(mut client) = self.sandbox.take() {
            client.kill();
        }
    }

    // ---- editor, reset, save -----------------------------------------

    fn cmd_editor(&mut self) {
        let mut text = self.env.session_buffer.join("\n");
        if self.env.session_buffer.is_empty() {
            if let Some(snippet) = self.env.last_viewed_snippet.clone() {
                if self.ask("the session is empty; load the last snippet you viewed?") {
                    text = snippet;
                }
            }
        }
        let edited = match self.opts.external_editor.clone() {
            Some(cmd) => self.external_edit(&cmd, &text),
            None => self.builtin_edit(&text),
        };
        let Some(edited) = edited else {
            self.info("editor closed without saving");
            return;
        };
        let chunks = statement_chunks(&edited);
        // Kept even when the replay fails, so the next edit starts from it.
        self.env.session_buffer = chunks.iter().map(|(_, c)| c.clone()).collect();
        self.replay(chunks);
    }

    fn builtin_edit(&mut self, text: &str) -> Option<String> {
        let mut editor = EditorState::new(text);
        let result = loop {
            self.ui.draw_editor(&editor);
            let Some(key) = self.ui.next_key() else { break None };
            match editor.handle(key) {
                EditorAction::Continue => {}
                EditorAction::Save => break Some(editor.text()),
                EditorAction::Cancel => break None,
            }
        };
        self.ui.close_editor();
        result
    }

    fn external_edit(&mut self, command: &str, text: &str) -> Option<String> {
        let path = self.env.root_dir.join(".snipkit-edit.js");
        if let Err(e) = fs::write(&path, text) {
            self.error(&format!("cannot write {}: {e}", path.display()));
            return None;
        }
        let mut words = command.split_whitespace();
        let program = words.next()?;
        self.ui.suspend();
        let status = Command::new(program).args(words).arg(&path).status();
        self.ui.resume();
        let result = match status {
            Ok(s) if s.success() => fs::read_to_string(&path).ok(),
            Ok(s) => {
                self.error(&format!("editor exited with {s}"));
                None
            }
            Err(e) => {
                self.error(&format!("cannot run editor `{program}`: {e}"));
                None
            }
        };
        let _ = fs::remove_file(&path);
        result
    }

    fn cmd_reset(&mut self) {
        if let Some(client) = self.sandbox.as_mut() {
            if let Err(e) = client.reset() {
                self.recover_silently(e);
            }
        }
        self.env.session_buffer.clear();
        self.info("state reset; installed packages are kept");
    }

    fn cmd_save(&mut self, arg: &str) {
        if arg.is_empty() {
            self.error("usage: .save <file>");
            return;
        }
        let path = resolve(&self.env.root_dir, arg);
        let mut text = self.env.session_buffer.join("\n");
        text.push('\n');
        match fs::write(&path, text) {
            Ok(()) => self.info(&format!("saved {} entries to {}", self.env.session_buffer.len(), path.display())),
            Err(e) => self.error(&format!("cannot write {}: {e}", path.display())),
        }
    }
}

fn resolve(root: &Path, arg: &str) -> PathBuf {
    let p = Path::new(arg);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        root.join(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_follow_statements() {
        let chunks = statement_chunks("// setup\nconst a = 1;\n\nfunction f() {\n  return a;\n}\nconsole.log(f());\n// end\n");
        assert_eq!(
            chunks,
            vec![
                (2, "// setup\nconst a = 1;".to_string()),
                (4, "function f() {\n  return a;\n}".to_string()),
                (7, "console.log(f());\n// end".to_string()),
            ]
        );
        assert_eq!(statement_chunks("// only\n"), vec![(1, "// only".to_string())]);
        assert!(statement_chunks("  \n").is_empty());
    }

    #[test]
    fn cap_truncates_long_values() {
        let long = "x".repeat(PRINT_CAP + 5);
        let shown = cap(&long);
        assert!(shown.ends_with("(5 more characters)"));
        assert_eq!(cap("short"), "short");
    }
}
