//! Command-line interface.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use snipkit_core::forest::{train_forest, Hyperparams};
use snipkit_core::js::{correct_snippet, lint, LintConfig};
use snipkit_core::search::{query_packages, RankingMode};
use snipkit_core::{Extraction, Timestamp};

use crate::db::{ingest_corpus, Database};
use crate::labels::{label_oracle, read_labels, training_examples, write_labels};
use crate::model::{build_index, load_model, load_or_build_index, rescore, save_index};
use crate::pm::PackageManager;
use crate::repl::{parse_transcript, run_repl, ReplOptions, TerminalUi, TranscriptUi, Ui};
use crate::report::{error_report, render_error_report, render_stats};
use crate::sandbox::{SandboxConfig, StubEngine, StubScript};

/// Separates snippets in `extract` output (ASCII record separator).
pub const RECORD_DELIMITER: &str = "\u{1e}";

#[derive(Debug, Parser)]
#[command(name = "snipkit", version, about = "Find npm packages, mine their README snippets and try them in a REPL")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Args)]
pub struct DbArg {
    /// Corpus database directory.
    #[arg(long, env = "SNIPKIT_DB")]
    pub db: PathBuf,
}

#[derive(Debug, Args)]
pub struct PmArgs {
    /// Package manager executable.
    #[arg(long, env = "SNIPKIT_NPM", default_value = "npm")]
    pub npm: PathBuf,
    /// Directory of package folders or tarballs to install from by name.
    #[arg(long, env = "SNIPKIT_REGISTRY")]
    pub registry: Option<PathBuf>,
    /// Pass --offline to the package manager.
    #[arg(long, env = "SNIPKIT_OFFLINE")]
    pub offline: bool,
}

impl PmArgs {
    fn package_manager(&self) -> PackageManager {
        PackageManager { program: self.npm.clone(), registry: self.registry.clone(), offline: self.offline }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mode {
    Stars,
    Runnability,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Ingest a registry dump (directory of JSON files or JSON lines) into a database.
    Mine {
        dump: PathBuf,
        #[command(flatten)]
        db: DbArg,
    },
    /// Corpus statistics.
    Stats {
        #[command(flatten)]
        db: DbArg,
        #[arg(long)]
        json: bool,
    },
    /// Print the code snippets kept from a README.
    Extract {
        readme: PathBuf,
        /// Also list dropped fences and why.
        #[arg(long)]
        explain: bool,
    },
    /// Build and store the search index.
    Index {
        #[command(flatten)]
        db: DbArg,
        /// Runnability model (default: bundled).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Reference time for package age (RFC 3339; default: newest package in the corpus).
        #[arg(long)]
        now: Option<String>,
    },
    /// Search packages.
    Search {
        query: String,
        #[command(flatten)]
        db: DbArg,
        #[arg(long, value_enum, default_value_t = Mode::Runnability)]
        mode: Mode,
        #[arg(long, default_value_t = 20)]
        limit: usize,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Train a runnability model from install labels.
    Train {
        #[command(flatten)]
        db: DbArg,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        now: Option<String>,
        #[arg(long, default_value_t = Hyperparams::default().seed)]
        seed: u64,
    },
    /// Label every corpus package by trying to install it.
    Label {
        #[command(flatten)]
        db: DbArg,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        pm: PmArgs,
        /// Seconds allowed per install.
        #[arg(long, default_value_t = 120.0)]
        timeout: f64,
    },
    /// Run the correction pipeline on a file and print the report as JSON.
    Fix { file: PathBuf },
    /// Lint a file; one JSON finding per line.
    Lint {
        file: PathBuf,
        /// Parse as an ES module.
        #[arg(long)]
        module: bool,
    },
    /// Lint-error breakdown over every snippet in the database.
    ErrorReport {
        #[command(flatten)]
        db: DbArg,
        #[arg(long)]
        json: bool,
    },
    /// Interactive session.
    Repl(ReplArgs),
    /// Canned-response runner speaking the sandbox protocol on stdio.
    #[command(hide = true)]
    StubRunner { script: PathBuf },
}

#[derive(Debug, Args)]
pub struct ReplArgs {
    #[command(flatten)]
    pub db: DbArg,
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Where session projects are created.
    #[arg(long, env = "SNIPKIT_WORKSPACE")]
    pub workspace: Option<PathBuf>,
    /// Keep the session project on exit.
    #[arg(long)]
    pub keep_env: bool,
    /// Replay keys from a script and print a tagged log instead of drawing.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// JavaScript runtime.
    #[arg(long, env = "SNIPKIT_NODE", default_value = "node")]
    pub node: PathBuf,
    /// Sandbox runner script executed by the runtime.
    #[arg(long, env = "SNIPKIT_RUNNER")]
    pub runner: Option<PathBuf>,
    /// External editor command for .editor.
    #[arg(long, env = "SNIPKIT_EDITOR")]
    pub editor: Option<String>,
    #[command(flatten)]
    pub pm: PmArgs,
    /// Seconds per evaluation.
    #[arg(long, default_value_t = 10.0)]
    pub eval_timeout: f64,
    /// Seconds per install.
    #[arg(long, default_value_t = 300.0)]
    pub install_timeout: f64,
    #[arg(long, hide = true)]
    pub stub_sandbox: Option<PathBuf>,
}

fn parse_now(now: Option<&str>, db: &Database) -> Result<Timestamp> {
    match now {
        None => Ok(db.manifest().snapshot_time),
        Some(s) => {
            let t = chrono::DateTime::parse_from_rfc3339(s).with_context(|| format!("--now `{s}` is not RFC 3339"))?;
            Ok(Timestamp(t.timestamp()))
        }
    }
}

fn seconds(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| anyhow::anyhow!("invalid duration {s}"))
}

pub fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Cmd::Mine { dump, db } => {
            let summary = ingest_corpus(&dump, &db.db)?;
            let m = &summary.manifest;
            writeln!(out, "{}", render_stats(&m.stats))?;
            if !m.rejected.is_empty() {
                writeln!(out, "rejected {} documents:", m.rejected.len())?;
                for r in &m.rejected {
                    writeln!(out, "  {}: {}", r.id, r.reason)?;
                }
            }
        }
        Cmd::Stats { db, json } => {
            let db = Database::open(&db.db)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&db.stats())?)?;
            } else {
                write!(out, "{}", render_stats(&db.stats()))?;
            }
        }
        Cmd::Extract { readme, explain } => {
            let bytes = fs::read(&readme).with_context(|| format!("reading {}", readme.display()))?;
            let extraction = Extraction::from_markdown(&String::from_utf8_lossy(&bytes));
            let mut first = true;
            for block in &extraction.blocks {
                match block.drop_reason {
                    None => {
                        if !first {
                            writeln!(out, "{RECORD_DELIMITER}")?;
                        }
                        first = false;
                        if explain {
                            writeln!(out, "# fence {}: kept", block.ordinal)?;
                        }
                        writeln!(out, "{}", block.text.trim_end_matches('\n'))?;
                    }
                    Some(reason) if explain => {
                        eprintln!("# fence {}: dropped ({reason})", block.ordinal);
                    }
                    Some(_) => {}
                }
            }
        }
        Cmd::Index { db, model, now } => {
            let db = Database::open(&db.db)?;
            let model = load_model(model.as_deref())?;
            let now = parse_now(now.as_deref(), &db)?;
            let index = build_index(&db.records()?, &model, now)?;
            save_index(&index, &db.index_path())?;
            writeln!(out, "indexed {} packages into {}", db.manifest().packages.len(), db.index_path().display())?;
        }
        Cmd::Search { query, db, mode, limit, model } => {
            let db = Database::open(&db.db)?;
            let index = open_index(&db, model.as_deref(), None)?;
            let mode = match mode {
                Mode::Stars => RankingMode::Stars,
                Mode::Runnability => RankingMode::Runnability,
            };
            let ranked = query_packages(&query, &index, mode)?;
            if ranked.is_empty() {
                writeln!(out, "no packages found")?;
            }
            for (rank, e) in ranked.entries.iter().take(limit).enumerate() {
                let description = db.record(&e.name).map(|r| r.description).unwrap_or_default();
                writeln!(out, "{:>3}  {:<28} {:>7}  {:.3}  {}", rank + 1, e.name, e.stars, e.probability, description)?;
            }
        }
        Cmd::Train { db, labels, out: path, now, seed } => {
            let db = Database::open(&db.db)?;
            let now = parse_now(now.as_deref(), &db)?;
            let labels = read_labels(&labels)?;
            let examples = training_examples(&db.records()?, &labels, now);
            let hyperparams = Hyperparams { seed, ..Hyperparams::default() };
            let model = train_forest(&examples, hyperparams)?;
            fs::write(&path, model.to_bytes()).with_context(|| format!("writing {}", path.display()))?;
            let positive = examples.iter().filter(|e| e.label).count();
            writeln!(out, "trained on {} examples ({positive} installable) -> {}", examples.len(), path.display())?;
        }
        Cmd::Label { db, out: path, pm, timeout } => {
            let db = Database::open(&db.db)?;
            let pm = pm.package_manager();
            let timeout = seconds(timeout)?;
            let scratch = std::env::temp_dir().join(format!("snipkit-label-{}", std::process::id()));
            let mut labels = Vec::new();
            for name in db.package_names() {
                let record = label_oracle(&pm, name, &scratch, timeout)?;
                eprintln!("{name}: {}{}", record.label, if record.timeout { " (timeout)" } else { "" });
                labels.push(record);
            }
            let _ = fs::remove_dir_all(&scratch);
            write_labels(&path, &labels)?;
            writeln!(out, "wrote {} labels to {}", labels.len(), path.display())?;
        }
        Cmd::Fix { file } => {
            let text = read_lossy(&file)?;
            let report = correct_snippet(&text);
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
        }
        Cmd::Lint { file, module } => {
            let text = read_lossy(&file)?;
            let config = LintConfig {
                source_type: if module { snipkit_core::js::SourceType::Module } else { snipkit_core::js::SourceType::Script },
            };
            for finding in lint(&text, &config) {
                writeln!(out, "{}", serde_json::to_string(&finding)?)?;
            }
        }
        Cmd::ErrorReport { db, json } => {
            let db = Database::open(&db.db)?;
            let mut raw = Vec::new();
            for name in db.package_names() {
                raw.extend(db.snippets(name)?.into_iter().map(|s| s.raw_text));
            }
            let report = error_report(raw.iter().map(String::as_str).collect::<Vec<_>>());
            if json {
                writeln!(out, "{}", serde_json::to_string(&report)?)?;
            } else {
                write!(out, "{}", render_error_report(&report))?;
            }
        }
        Cmd::Repl(args) => {
            drop(out);
            repl(args)?;
        }
        Cmd::StubRunner { script } => {
            let script = StubScript::load(&script).map_err(anyhow::Error::msg)?;
            drop(out);
            StubEngine::new(script).serve(io::stdin().lock(), io::stdout().lock(), io::stderr().lock())?;
        }
    }
    Ok(())
}

fn read_lossy(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

/// The stored index, rescored when a model is named explicitly.
fn open_index(db: &Database, model: Option<&Path>, now: Option<&str>) -> Result<snipkit_core::search::InvertedIndex> {
    let loaded = load_model(model)?;
    let now = parse_now(now, db)?;
    let mut index = load_or_build_index(db, &loaded, now)?;
    if model.is_some() {
        rescore(&mut index, &db.records()?, &loaded, now)?;
    }
    Ok(index)
}

fn repl(args: ReplArgs) -> Result<()> {
    let db = Database::open(&args.db.db)?;
    let index = open_index(&db, args.model.as_deref(), None)?;
    let sandbox = match (&args.stub_sandbox, &args.runner) {
        (Some(stub), _) => SandboxConfig::Stub(StubScript::load(stub).map_err(anyhow::Error::msg)?),
        (None, Some(runner)) => SandboxConfig::Process {
            program: args.node.clone(),
            args: vec![runner.to_string_lossy().into_owned()],
        },
        (None, None) => SandboxConfig::Unconfigured,
    };
    let workspace = args.workspace.clone().unwrap_or_else(|| std::env::temp_dir().join("snipkit"));
    let opts = ReplOptions {
        workspace,
        keep_env: args.keep_env,
        sandbox,
        pm: args.pm.package_manager(),
        external_editor: args.editor.clone().filter(|e| !e.trim().is_empty()),
        install_timeout: seconds(args.install_timeout)?,
        eval_timeout: seconds(args.eval_timeout)?,
    };
    match &args.transcript {
        Some(path) => {
            let script = fs::read_to_string(path).with_context(|| format!("reading transcript {}", path.display()))?;
            let keys = parse_transcript(&script).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
            let mut ui = TranscriptUi::new(keys, Some(Box::new(io::stdout())));
            run_repl(&mut ui, &db, &index, opts)
        }
        None => {
            if !crossterm::tty::IsTty::is_tty(&io::stdin()) {
                bail!("the REPL needs a terminal; use --transcript for scripted runs");
            }
            let mut ui = TerminalUi::new()?;
            let result = run_repl(&mut ui as &mut dyn Ui, &db, &index, opts);
            drop(ui);
            result
        }
    }
}
