mod common;

use std::path::{Path, PathBuf};
use std::time::Duration;

use common::{environment_dir, fixture_db, fixtures};
use snipkit::db::Database;
use snipkit::model::{build_index, default_model};
use snipkit::repl::{parse_transcript, run_repl, Channel, ReplOptions, TranscriptUi, Ui};
use snipkit::repl::keys::Key;
use snipkit::sandbox::{CannedEval, ErrorPayload, SandboxConfig, StubScript};
use snipkit_core::forest::{featurize, predict};
use snipkit_core::search::InvertedIndex;

struct Harness {
    _tmp: tempfile::TempDir,
    db: Database,
    index: InvertedIndex,
    workspace: PathBuf,
}

impl Harness {
    fn new() -> Self {
        let tmp = tempfile::tempdir().unwrap();
        let db = fixture_db(&tmp.path().join("db"));
        let index = build_index(&db.records().unwrap(), &default_model(), db.manifest().snapshot_time).unwrap();
        let workspace = tmp.path().join("ws");
        Self { _tmp: tmp, db, index, workspace }
    }

    fn options(&self, sandbox: SandboxConfig) -> ReplOptions {
        ReplOptions {
            workspace: self.workspace.clone(),
            keep_env: false,
            sandbox,
            pm: common::fixture_npm(),
            external_editor: None,
            install_timeout: Duration::from_secs(120),
            eval_timeout: Duration::from_secs(10),
        }
    }

    fn run_with(&self, ui: &mut dyn Ui, opts: ReplOptions) {
        run_repl(ui, &self.db, &self.index, opts).expect("session ends cleanly");
    }

    fn run(&self, script: &str, sandbox: SandboxConfig) -> Vec<String> {
        let mut ui = TranscriptUi::new(parse_transcript(script).unwrap(), None);
        self.run_with(&mut ui, self.options(sandbox));
        ui.log().to_vec()
    }
}

fn stub(evals: Vec<CannedEval>) -> SandboxConfig {
    SandboxConfig::Stub(StubScript { evals })
}

fn ok(code: &str, console: &[&str]) -> CannedEval {
    CannedEval {
        code: code.into(),
        console: console.iter().map(|s| s.to_string()).collect(),
        value_repr: Some("undefined".into()),
        error: None,
    }
}

fn failing(code: &str, name: &str, message: &str) -> CannedEval {
    CannedEval {
        code: code.into(),
        console: Vec::new(),
        value_repr: None,
        error: Some(ErrorPayload { name: name.into(), message: message.into(), stack_top_line: None }),
    }
}

fn has(log: &[String], needle: &str) -> bool {
    log.iter().any(|l| l.contains(needle))
}

/// Console lines of every replay in the log, in order.
fn replays(log: &[String]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut current: Option<Vec<String>> = None;
    for line in log {
        if line.starts_with("sys| replaying ") {
            current = Some(Vec::new());
        } else if line == "sys| replay finished" {
            out.extend(current.take());
        } else if let (Some(cur), Some(text)) = (current.as_mut(), line.strip_prefix("out| ")) {
            cur.push(text.to_string());
        }
    }
    out
}

#[test]
fn commands_without_arguments_explain_themselves() {
    let h = Harness::new();
    let log = h.run(".packages\n.install\n.samples\n.frobnicate\n.exit\n", SandboxConfig::Unconfigured);
    assert!(has(&log, "err| usage: .packages <search words>"));
    assert!(has(&log, "err| usage: .install <package>"));
    assert!(has(&log, "sys| nothing installed yet"));
    assert!(has(&log, "err| unknown command .frobnicate"));
    assert!(has(&log, "sys|   .packages <words>"));
    assert!(!h.workspace.read_dir().unwrap().any(|_| true), "environment removed on exit");
}

#[test]
fn package_list_leads_with_the_likeliest_starred_match() {
    let h = Harness::new();
    let model = default_model();
    let now = h.db.manifest().snapshot_time;
    let mentions_csv = |text: &str| text.to_lowercase().split(|c: char| !c.is_ascii_alphanumeric()).any(|w| w == "csv");
    let best = h
        .db
        .records()
        .unwrap()
        .into_iter()
        .filter(|r| r.stars > 0 && (mentions_csv(&r.description) || r.keywords.iter().any(|k| mentions_csv(k))))
        .map(|r| (predict(&model, &featurize(&r, now)).unwrap(), r.stars, r.name))
        // Equal probabilities fall back to stars.
        .max_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .unwrap();

    let log = h.run(".packages csv\n@key esc\n.exit\n", SandboxConfig::Unconfigured);
    let first_row = log
        .iter()
        .find_map(|l| l.strip_prefix("list| >"))
        .unwrap_or_else(|| panic!("{log:#?}"));
    assert!(first_row.trim_start().starts_with(&format!("1. {} (", best.2)), "{first_row} vs {best:?}");
    assert!(!has(&log, "install "), "escape leaves the list without asking");
    assert_eq!(log.last().map(String::as_str), Some("in| > .exit"));
}

#[test]
fn snippet_cycling_wraps_around() {
    let h = Harness::new();
    let single = h.db.package_names().find(|n| h.db.snippets(n).unwrap().len() == 1).unwrap().to_string();
    let log = h.run(&format!(".samples {single}\n@key f3\n@key f2\n@key ctrl-c\n.samples not-a-package\n.exit\n"), SandboxConfig::Unconfigured);
    let headers: Vec<&String> = log.iter().filter(|l| l.starts_with("sys| [")).collect();
    assert_eq!(headers.len(), 3);
    assert!(headers.iter().all(|h| h.starts_with(&format!("sys| [1/1] {single} snippet "))));
    assert!(has(&log, "err| package not-a-package not found"));
}

#[test]
fn redeclaration_points_at_reset() {
    let h = Harness::new();
    let sandbox = stub(vec![
        ok("const a = 1", &[]),
        failing("const a = 1", "SyntaxError", "Identifier 'a' has already been declared"),
        failing("require('left-pad-9000')", "Error", "Cannot find module 'left-pad-9000' [MODULE_NOT_FOUND]"),
    ]);
    let log = h.run("const a = 1\nconst a = 1\nrequire('left-pad-9000')\n.exit\n", sandbox);
    assert!(has(&log, "err| SyntaxError: Identifier 'a' has already been declared"));
    assert!(has(&log, "sys| hint: .reset"));
    assert!(has(&log, "MODULE_NOT_FOUND"));
}

#[test]
fn multi_line_input_is_sent_as_one_entry() {
    let h = Harness::new();
    let sandbox = stub(vec![ok("function f() {\nreturn 1;\n}", &["seen"])]);
    let log = h.run("function f() {\nreturn 1;\n}\n.exit\n", sandbox);
    assert!(has(&log, "in| ... }"));
    assert!(has(&log, "out| seen"));
}

#[test]
fn editor_loads_last_snippet_and_resaving_replays_the_same() {
    let h = Harness::new();
    let sandbox = SandboxConfig::Stub(StubScript::load(&fixtures().join("repl/stub.json")).unwrap());
    let script = ".samples csv-kit\n@key ctrl-c\n.editor\ny\n@key ctrl-s\n.editor\n@key ctrl-s\n.save out.js\n.exit\n";
    let mut ui = TranscriptUi::new(parse_transcript(script).unwrap(), None);
    let mut opts = h.options(sandbox);
    opts.keep_env = true;
    h.run_with(&mut ui, opts);
    let log = ui.log();

    let runs = replays(log);
    assert_eq!(runs.len(), 2, "{log:#?}");
    assert_eq!(runs[0], ["name,age", "ada,36"]);
    assert_eq!(runs[0], runs[1]);

    let env = environment_dir(log).unwrap();
    assert!(has(log, "sys| environment kept at"));
    let saved = std::fs::read_to_string(env.join("out.js")).unwrap();
    assert!(saved.starts_with("const { stringify } = require('csv-kit');\n"));
    std::fs::remove_dir_all(env).unwrap();
}

#[test]
fn editor_cancel_changes_nothing() {
    let h = Harness::new();
    let log = h.run(".editor\n@text x\n@key esc\n.exit\n", SandboxConfig::Unconfigured);
    assert!(has(&log, "sys| editor closed without saving"));
    assert!(replays(&log).is_empty());
}

#[test]
fn unwritable_save_target_is_reported() {
    let h = Harness::new();
    let log = h.run(".save no/such/dir/out.js\n.save\n.exit\n", SandboxConfig::Unconfigured);
    assert!(has(&log, "err| cannot write "));
    assert!(has(&log, "err| usage: .save <file>"));
}

#[test]
fn missing_runner_is_reported_once_per_attempt() {
    let h = Harness::new();
    let log = h.run("1 + 1\n.exit\n", SandboxConfig::Unconfigured);
    assert!(has(&log, "err| no JavaScript runner configured"));
}

/// Removes the environment's package.json after `after` keys were read.
struct Sabotage {
    inner: TranscriptUi,
    after: usize,
    read: usize,
    env: Option<PathBuf>,
}

impl Ui for Sabotage {
    fn next_key(&mut self) -> Option<Key> {
        if self.read == self.after {
            if let Some(env) = &self.env {
                std::fs::remove_file(env.join("package.json")).unwrap();
            }
        }
        self.read += 1;
        self.inner.next_key()
    }
    fn emit(&mut self, channel: Channel, text: &str) {
        if let Some(dir) = text.strip_prefix("environment ") {
            self.env.get_or_insert_with(|| Path::new(dir).to_path_buf());
        }
        self.inner.emit(channel, text)
    }
    fn draw_prompt(&mut self, prompt: &str, line: &snipkit::repl::line::LineEditor) {
        self.inner.draw_prompt(prompt, line)
    }
    fn accept_prompt(&mut self, prompt: &str, text: &str) {
        self.inner.accept_prompt(prompt, text)
    }
    fn draw_list(&mut self, view: &snipkit::repl::list::PackageListView) {
        self.inner.draw_list(view)
    }
    fn close_list(&mut self) {
        self.inner.close_list()
    }
    fn draw_editor(&mut self, editor: &snipkit::repl::editor::EditorState) {
        self.inner.draw_editor(editor)
    }
    fn close_editor(&mut self) {
        self.inner.close_editor()
    }
    fn busy(&mut self, label: &str, tick: usize) {
        self.inner.busy(label, tick)
    }
    fn clear_busy(&mut self) {
        self.inner.clear_busy()
    }
    fn list_height(&self) -> usize {
        self.inner.list_height()
    }
}

#[test]
fn lost_environment_is_an_error_not_a_crash() {
    let h = Harness::new();
    let keys = parse_transcript("1\n.help\n.exit\n").unwrap();
    let mut ui = Sabotage { inner: TranscriptUi::new(keys, None), after: 0, read: 0, env: None };
    h.run_with(&mut ui, h.options(stub(vec![])));
    let log = ui.inner.log();
    assert!(has(log, "err| environment directory "), "{log:#?}");
    assert!(has(log, "sys| commands:"), "prompt still usable afterwards");
}

/// Answers every request except code mentioning `boom`, which kills it.
fn fragile_runner() -> SandboxConfig {
    let script = r#"while IFS= read -r line; do
  case "$line" in *boom*) exit 3;; esac
  id=$(printf '%s' "$line" | sed 's/^{"id":\([-0-9]*\).*/\1/')
  printf '{"id":%s,"ok":true,"value_repr":"undefined"}\n' "$id"
done"#;
    SandboxConfig::Process { program: "sh".into(), args: vec!["-c".into(), script.into()] }
}

#[test]
fn crashed_runner_is_restarted_and_replay_offered() {
    let h = Harness::new();
    let log = h.run("let x = 1\nboom()\ny\nlet after = 2\n.exit\n", fragile_runner());
    assert!(has(&log, "err| the JavaScript runner stopped unexpectedly"));
    assert!(has(&log, "sys| replay 1 session entry? (y/n)"));
    assert_eq!(replays(&log).len(), 1, "{log:#?}");
    assert!(!log.iter().skip_while(|l| !l.contains("replay finished")).any(|l| l.starts_with("err| ")));
}

#[test]
fn hung_runner_times_out() {
    let h = Harness::new();
    let mut opts = h.options(SandboxConfig::Process {
        program: "sh".into(),
        args: vec!["-c".into(), "while read l; do sleep 30; done".into()],
    });
    opts.eval_timeout = Duration::from_millis(300);
    let mut ui = TranscriptUi::new(parse_transcript("while (true) {}\n.exit\n").unwrap(), None);
    h.run_with(&mut ui, opts);
    assert!(has(ui.log(), "err| execution timed out after 0.3s"));
    assert!(!has(ui.log(), "replay"), "nothing to replay yet");
}
