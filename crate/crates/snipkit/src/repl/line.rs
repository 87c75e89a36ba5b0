//! Single prompt line editing with history.

use super::keys::Key;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineAction {
    Pending,
    Submit(String),
    PreviousSnippet,
    NextSnippet,
    /// Ctrl-C: the line was cleared.
    Cancelled,
    /// Ctrl-D on an empty line.
    Eof,
}

#[derive(Debug, Clone, Default)]
pub struct LineEditor {
    buf: Vec<char>,
    cursor: usize,
    history: Vec<String>,
    /// Position while browsing history; `history.len()` means the live line.
    browse: usize,
}

impl LineEditor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(&self) -> String {
        self.buf.iter().collect()
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    /// Replaces the line (snippet autofill) and puts the cursor at the end.
    pub fn set_text(&mut self, text: &str) {
        self.buf = text.chars().collect();
        self.cursor = self.buf.len();
    }

    fn take(&mut self) -> String {
        let text = self.text();
        self.buf.clear();
        self.cursor = 0;
        if !text.trim().is_empty() && self.history.last() != Some(&text) {
            self.history.push(text.clone());
        }
        self.browse = self.history.len();
        text
    }

    fn recall(&mut self, index: usize) {
        self.browse = index;
        let text = self.history.get(index).cloned().unwrap_or_default();
        self.set_text(&text);
    }

    pub fn handle(&mut self, key: Key) -> LineAction {
        match key {
            Key::Char(c) => {
                self.buf.insert(self.cursor, c);
                self.cursor += 1;
            }
            Key::Tab => {
                for _ in 0..2 {
                    self.handle(Key::Char(' '));
                }
            }
            Key::Enter => return LineAction::Submit(self.take()),
            Key::Backspace if self.cursor > 0 => {
                self.cursor -= 1;
                self.buf.remove(self.cursor);
            }
            Key::Delete if self.cursor < self.buf.len() => {
                self.buf.remove(self.cursor);
            }
            Key::Left => self.cursor = self.cursor.saturating_sub(1),
            Key::Right => self.cursor = (self.cursor + 1).min(self.buf.len()),
            Key::Home => self.cursor = 0,
            Key::End => self.cursor = self.buf.len(),
            Key::Up if self.browse > 0 => self.recall(self.browse - 1),
            Key::Down if self.browse < self.history.len() => self.recall(self.browse + 1),
            k if k.is_previous() => return LineAction::PreviousSnippet,
            k if k.is_next() => return LineAction::NextSnippet,
            Key::CtrlC => {
                self.buf.clear();
                self.cursor = 0;
                return LineAction::Cancelled;
            }
            Key::CtrlD if self.buf.is_empty() => return LineAction::Eof,
            _ => {}
        }
        LineAction::Pending
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn typed(editor: &mut LineEditor, text: &str) {
        for c in text.chars() {
            editor.handle(Key::Char(c));
        }
    }

    #[test]
    fn editing_and_history() {
        let mut e = LineEditor::new();
        typed(&mut e, "1+2");
        e.handle(Key::Left);
        e.handle(Key::Backspace);
        typed(&mut e, "-");
        assert_eq!(e.handle(Key::Enter), LineAction::Submit("1-2".into()));
        typed(&mut e, "x");
        e.handle(Key::Up);
        assert_eq!(e.text(), "1-2");
        e.handle(Key::Down);
        assert_eq!(e.text(), "");
    }

    #[test]
    fn snippet_keys() {
        let mut e = LineEditor::new();
        assert_eq!(e.handle(Key::F2), LineAction::PreviousSnippet);
        assert_eq!(e.handle(Key::CtrlN), LineAction::NextSnippet);
        assert_eq!(e.handle(Key::CtrlD), LineAction::Eof);
    }
}
