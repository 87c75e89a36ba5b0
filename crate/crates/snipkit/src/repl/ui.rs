//! Rendering and key input: a crossterm terminal and a scripted transcript.

use std::collections::VecDeque;
use std::io::{self, Write};
use std::sync::mpsc;
use std::time::Duration;

use crossterm::cursor::{MoveToColumn, MoveToNextLine, MoveUp};
use crossterm::event::{self, Event, KeyCode, KeyEventKind, KeyModifiers};
use crossterm::style::{Attribute, Color, Print, SetAttribute, SetForegroundColor};
use crossterm::terminal::{self, Clear, ClearType, EnterAlternateScreen, LeaveAlternateScreen};
use crossterm::{execute, queue};

use super::editor::EditorState;
use super::keys::Key;
use super::line::LineEditor;
use super::list::PackageListView;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Echo of accepted input.
    Input,
    /// Console output of evaluated code.
    Console,
    /// Value of an evaluation.
    Value,
    Error,
    Info,
    /// Package-manager output.
    Process,
}

impl Channel {
    pub fn tag(self) -> &'static str {
        match self {
            Channel::Input => "in",
            Channel::Console => "out",
            Channel::Value => "val",
            Channel::Error => "err",
            Channel::Info => "sys",
            Channel::Process => "pm",
        }
    }
}

pub trait Ui {
    /// Blocks for the next key; `None` ends the session.
    fn next_key(&mut self) -> Option<Key>;
    fn emit(&mut self, channel: Channel, text: &str);
    fn draw_prompt(&mut self, prompt: &str, line: &LineEditor);
    /// The prompt line was submitted.
    fn accept_prompt(&mut self, prompt: &str, text: &str);
    fn draw_list(&mut self, view: &PackageListView);
    fn close_list(&mut self);
    fn draw_editor(&mut self, editor: &EditorState);
    fn close_editor(&mut self);
    fn busy(&mut self, label: &str, tick: usize);
    fn clear_busy(&mut self);
    /// Rows available to the package list.
    fn list_height(&self) -> usize;
    /// Hands the terminal to a child process (external editor) and back.
    fn suspend(&mut self) {}
    fn resume(&mut self) {}
}

/// Runs `work` on a helper thread while the spinner turns. Lines the worker
/// sends are shown on the process channel as they arrive.
pub fn with_spinner<T: Send>(
    ui: &mut dyn Ui,
    label: &str,
    work: impl FnOnce(mpsc::Sender<String>) -> T + Send,
) -> T {
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|scope| {
        let handle = scope.spawn(move || work(tx));
        let mut tick = 0;
        loop {
            match rx.recv_timeout(Duration::from_millis(80)) {
                Ok(line) => {
                    ui.clear_busy();
                    ui.emit(Channel::Process, &line);
                }
                Err(mpsc::RecvTimeoutError::Timeout) => {
                    tick += 1;
                    ui.busy(label, tick);
                }
                Err(mpsc::RecvTimeoutError::Disconnected) => break,
            }
        }
        ui.clear_busy();
        handle.join().expect("worker thread panicked")
    })
}

/// Parses a transcript script into keys.
///
/// * `@key <name>` presses one key (`@key f3`, `@key ctrl-s`);
/// * `@text <s>` types `s` without pressing enter;
/// * `@#` starts a comment;
/// * `@@...` types the line minus its first `@`, then enter;
/// * any other line is typed, then enter.
pub fn parse_transcript(script: &str) -> Result<Vec<Key>, String> {
    let mut keys = Vec::new();
    for (no, line) in script.lines().enumerate() {
        let typed = |keys: &mut Vec<Key>, text: &str| keys.extend(text.chars().map(Key::Char));
        if let Some(rest) = line.strip_prefix("@@") {
            typed(&mut keys, &format!("@{rest}"));
            keys.push(Key::Enter);
        } else if line.starts_with("@#") {
        } else if let Some(name) = line.strip_prefix("@key ") {
            keys.push(Key::from_name(name).ok_or_else(|| format!("line {}: unknown key `{}`", no + 1, name.trim()))?);
        } else if let Some(text) = line.strip_prefix("@text ") {
            typed(&mut keys, text);
        } else if line.starts_with('@') {
            return Err(format!("line {}: unknown directive `{line}`", no + 1));
        } else {
            typed(&mut keys, line);
            keys.push(Key::Enter);
        }
    }
    Ok(keys)
}

/// Scripted input with a deterministic, tagged log (`tag| text`).
/// Package-manager output and spinners are left out of the log.
pub struct TranscriptUi {
    keys: VecDeque<Key>,
    log: Vec<String>,
    sink: Option<Box<dyn Write>>,
}

impl TranscriptUi {
    pub fn new(keys: Vec<Key>, sink: Option<Box<dyn Write>>) -> Self {
        Self { keys: keys.into(), log: Vec::new(), sink }
    }

    pub fn log(&self) -> &[String] {
        &self.log
    }

    fn push(&mut self, tag: &str, text: &str) {
        for line in text.split('\n') {
            let entry = format!("{tag}| {line}");
            if let Some(sink) = &mut self.sink {
                let _ = writeln!(sink, "{entry}");
            }
            self.log.push(entry);
        }
    }
}

impl Ui for TranscriptUi {
    fn next_key(&mut self) -> Option<Key> {
        self.keys.pop_front()
    }

    fn emit(&mut self, channel: Channel, text: &str) {
        if channel != Channel::Process {
            self.push(channel.tag(), text);
        }
    }

    fn draw_prompt(&mut self, _prompt: &str, _line: &LineEditor) {}

    fn accept_prompt(&mut self, prompt: &str, text: &str) {
        self.push(Channel::Input.tag(), &format!("{prompt}{text}"));
    }

    fn draw_list(&mut self, view: &PackageListView) {
        let rows: Vec<String> = view.viewport().map(|i| view.render_row(i, 200)).collect();
        self.push("list", &rows.join("\n"));
    }

    fn close_list(&mut self) {}

    fn draw_editor(&mut self, _editor: &EditorState) {}

    fn close_editor(&mut self) {}

    fn busy(&mut self, _label: &str, _tick: usize) {}

    fn clear_busy(&mut self) {}

    fn list_height(&self) -> usize {
        10
    }
}

const SPINNER: [char; 10] = ['⠋', '⠙', '⠹', '⠸', '⠼', '⠴', '⠦', '⠧', '⠇', '⠏'];
const CONTINUATION: &str = "... ";

/// Raw-mode terminal. Output scrolls normally; the prompt and the package
/// list are redrawn in place, the editor takes the alternate screen.
pub struct TerminalUi {
    out: io::Stdout,
    /// Rows above the cursor that belong to the live prompt/list drawing.
    rows_above: u16,
    busy: bool,
}

impl TerminalUi {
    pub fn new() -> io::Result<Self> {
        terminal::enable_raw_mode()?;
        Ok(Self { out: io::stdout(), rows_above: 0, busy: false })
    }

    fn width(&self) -> usize {
        terminal::size().map(|(w, _)| w as usize).unwrap_or(80)
    }

    fn rewind(&mut self) -> io::Result<()> {
        if self.rows_above > 0 {
            queue!(self.out, MoveUp(self.rows_above))?;
        }
        queue!(self.out, MoveToColumn(0), Clear(ClearType::FromCursorDown))?;
        self.rows_above = 0;
        Ok(())
    }

    fn color(channel: Channel) -> Option<Color> {
        match channel {
            Channel::Error => Some(Color::Red),
            Channel::Value => Some(Color::Green),
            Channel::Info => Some(Color::Cyan),
            Channel::Process => Some(Color::DarkGrey),
            Channel::Input | Channel::Console => None,
        }
    }

    fn write_lines(&mut self, channel: Channel, text: &str) -> io::Result<()> {
        for line in text.split('\n') {
            match Self::color(channel) {
                Some(c) => queue!(self.out, SetForegroundColor(c), Print(line), SetAttribute(Attribute::Reset))?,
                None => queue!(self.out, Print(line))?,
            }
            queue!(self.out, Print("\r\n"))?;
        }
        Ok(())
    }
}

impl Drop for TerminalUi {
    fn drop(&mut self) {
        let _ = self.rewind();
        let _ = self.out.flush();
        let _ = terminal::disable_raw_mode();
    }
}

fn translate(code: KeyCode, mods: KeyModifiers) -> Option<Key> {
    let ctrl = mods.contains(KeyModifiers::CONTROL);
    Some(match code {
        KeyCode::Char(c) if ctrl => match c.to_ascii_lowercase() {
            'c' => Key::CtrlC,
            'd' => Key::CtrlD,
            'n' => Key::CtrlN,
            'p' => Key::CtrlP,
            's' => Key::CtrlS,
            _ => return None,
        },
        KeyCode::Char(c) => Key::Char(c),
        KeyCode::Enter => Key::Enter,
        KeyCode::Backspace => Key::Backspace,
        KeyCode::Delete => Key::Delete,
        KeyCode::Left => Key::Left,
        KeyCode::Right => Key::Right,
        KeyCode::Up => Key::Up,
        KeyCode::Down => Key::Down,
        KeyCode::Home => Key::Home,
        KeyCode::End => Key::End,
        KeyCode::PageUp => Key::PageUp,
        KeyCode::PageDown => Key::PageDown,
        KeyCode::Tab => Key::Tab,
        KeyCode::Esc => Key::Esc,
        KeyCode::F(2) => Key::F2,
        KeyCode::F(3) => Key::F3,
        _ => return None,
    })
}

impl Ui for TerminalUi {
    fn next_key(&mut self) -> Option<Key> {
        loop {
            match event::read().ok()? {
                Event::Key(k) if k.kind != KeyEventKind::Release => {
                    if let Some(key) = translate(k.code, k.modifiers) {
                        return Some(key);
                    }
                }
                Event::Paste(text) => {
                    // Only the first character is returned; pasting is rare
                    // enough that dropping the rest beats buffering here.
                    if let Some(c) = text.chars().next() {
                        return Some(Key::Char(c));
                    }
                }
                _ => {}
            }
        }
    }

    fn emit(&mut self, channel: Channel, text: &str) {
        let _ = self.rewind();
        let _ = self.write_lines(channel, text);
        let _ = self.out.flush();
    }

    fn draw_prompt(&mut self, prompt: &str, line: &LineEditor) {
        let _ = self.rewind();
        let text = line.text();
        let before: String = text.chars().take(line.cursor()).collect();
        let cursor_row = before.matches('\n').count();
        let cursor_col = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0);
        let rows: Vec<&str> = text.split('\n').collect();
        for (i, row) in rows.iter().enumerate() {
            if i > 0 {
                let _ = queue!(self.out, Print("\r\n"));
            }
            let _ = queue!(self.out, Print(if i == 0 { prompt } else { CONTINUATION }), Print(row));
        }
        let up = rows.len() - 1 - cursor_row;
        if up > 0 {
            let _ = queue!(self.out, MoveUp(up as u16));
        }
        let prefix = if cursor_row == 0 { prompt } else { CONTINUATION };
        let _ = queue!(self.out, MoveToColumn((prefix.chars().count() + cursor_col) as u16));
        self.rows_above = cursor_row as u16;
        let _ = self.out.flush();
    }

    fn accept_prompt(&mut self, prompt: &str, text: &str) {
        let _ = self.rewind();
        let shown: Vec<String> = text
            .split('\n')
            .enumerate()
            .map(|(i, l)| format!("{}{l}", if i == 0 { prompt } else { CONTINUATION }))
            .collect();
        let _ = self.write_lines(Channel::Input, &shown.join("\n"));
        let _ = self.out.flush();
    }

    fn draw_list(&mut self, view: &PackageListView) {
        let _ = self.rewind();
        let width = self.width().saturating_sub(1);
        let range = view.viewport();
        let count = range.len();
        for i in range {
            let row = view.render_row(i, width);
            let _ = if i == view.cursor() {
                queue!(self.out, SetAttribute(Attribute::Reverse), Print(row), SetAttribute(Attribute::Reset))
            } else {
                queue!(self.out, Print(row))
            };
            let _ = queue!(self.out, MoveToNextLine(1));
        }
        let _ = queue!(
            self.out,
            SetForegroundColor(Color::DarkGrey),
            Print("↑/↓ move · enter select · esc back"),
            SetAttribute(Attribute::Reset)
        );
        self.rows_above = count as u16;
        let _ = self.out.flush();
    }

    fn close_list(&mut self) {
        let _ = self.rewind();
        let _ = self.out.flush();
    }

    fn draw_editor(&mut self, editor: &EditorState) {
        let (width, height) = terminal::size().map(|(w, h)| (w as usize, h as usize)).unwrap_or((80, 24));
        let body = height.saturating_sub(1).max(1);
        let (row, col) = editor.cursor();
        let first = row.saturating_sub(body - 1);
        let _ = execute!(self.out, EnterAlternateScreen);
        let _ = queue!(self.out, crossterm::cursor::MoveTo(0, 0), Clear(ClearType::All));
        for (i, line) in editor.lines().enumerate().skip(first).take(body) {
            let shown: String = format!("{:>4} {line}", i + 1).chars().take(width.saturating_sub(1)).collect();
            let _ = queue!(self.out, Print(shown), MoveToNextLine(1));
        }
        let _ = queue!(
            self.out,
            crossterm::cursor::MoveTo(0, body as u16),
            SetAttribute(Attribute::Reverse),
            Print(" ctrl-s save & rerun · esc cancel "),
            SetAttribute(Attribute::Reset),
            crossterm::cursor::MoveTo((col + 5) as u16, (row - first) as u16)
        );
        let _ = self.out.flush();
    }

    fn close_editor(&mut self) {
        let _ = execute!(self.out, LeaveAlternateScreen);
    }

    fn busy(&mut self, label: &str, tick: usize) {
        self.busy = true;
        let _ = queue!(
            self.out,
            MoveToColumn(0),
            Clear(ClearType::CurrentLine),
            Print(SPINNER[tick % SPINNER.len()]),
            Print(' '),
            Print(label)
        );
        let _ = self.out.flush();
    }

    fn clear_busy(&mut self) {
        if std::mem::take(&mut self.busy) {
            let _ = queue!(self.out, MoveToColumn(0), Clear(ClearType::CurrentLine));
            let _ = self.out.flush();
        }
    }

    fn list_height(&self) -> usize {
        terminal::size().map(|(_, h)| h as usize).unwrap_or(24).saturating_sub(4).max(3)
    }

    fn suspend(&mut self) {
        let _ = self.rewind();
        let _ = self.out.flush();
        let _ = terminal::disable_raw_mode();
    }

    fn resume(&mut self) {
        let _ = terminal::enable_raw_mode();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transcript_directives() {
        let keys = parse_transcript("ab\n@key f3\n@text c\n@# note\n@@x\n").unwrap();
        assert_eq!(
            keys,
            vec![
                Key::Char('a'),
                Key::Char('b'),
                Key::Enter,
                Key::F3,
                Key::Char('c'),
                Key::Char('@'),
                Key::Char('x'),
                Key::Enter
            ]
        );
        assert!(parse_transcript("@key nope").is_err());
        assert!(parse_transcript("@bogus").is_err());
    }

    #[test]
    fn transcript_log_tags_lines() {
        let mut ui = TranscriptUi::new(Vec::new(), None);
        ui.emit(Channel::Console, "a\nb");
        ui.emit(Channel::Process, "npm noise");
        ui.accept_prompt("> ", "1+1");
        assert_eq!(ui.log(), ["out| a", "out| b", "in| > 1+1"]);
    }

    #[test]
    fn spinner_forwards_worker_lines() {
        let mut ui = TranscriptUi::new(Vec::new(), None);
        let got = with_spinner(&mut ui, "working", |tx| {
            tx.send("line".into()).unwrap();
            42
        });
        assert_eq!(got, 42);
    }
}
