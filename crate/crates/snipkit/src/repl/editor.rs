//! Minimal multi-line editor used by `.editor`.

use super::keys::Key;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditorAction {
    Continue,
    Save,
    Cancel,
}

#[derive(Debug, Clone)]
pub struct EditorState {
    lines: Vec<Vec<char>>,
    row: usize,
    col: usize,
}

impl EditorState {
    pub fn new(text: &str) -> Self {
        let mut lines: Vec<Vec<char>> = text.split('\n').map(|l| l.chars().collect()).collect();
        if lines.is_empty() {
            lines.push(Vec::new());
        }
        Self { lines, row: 0, col: 0 }
    }

    pub fn text(&self) -> String {
        self.lines.iter().map(|l| l.iter().collect::<String>()).collect::<Vec<_>>().join("\n")
    }

    pub fn lines(&self) -> impl Iterator<Item = String> + '_ {
        self.lines.iter().map(|l| l.iter().collect())
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn cursor(&self) -> (usize, usize) {
        (self.row, self.col)
    }

    fn clamp_col(&mut self) {
        self.col = self.col.min(self.lines[self.row].len());
    }

    pub fn handle(&mut self, key: Key) -> EditorAction {
        match key {
            Key::CtrlS => return EditorAction::Save,
            Key::Esc | Key::CtrlC => return EditorAction::Cancel,
            Key::Char(c) => {
                self.lines[self.row].insert(self.col, c);
                self.col += 1;
            }
            Key::Tab => {
                for _ in 0..2 {
                    self.handle(Key::Char(' '));
                }
            }
            Key::Enter => {
                let rest = self.lines[self.row].split_off(self.col);
                self.row += 1;
                self.lines.insert(self.row, rest);
                self.col = 0;
            }
            Key::Backspace => {
                if self.col > 0 {
                    self.col -= 1;
                    self.lines[self.row].remove(self.col);
                } else if self.row > 0 {
                    let line = self.lines.remove(self.row);
                    self.row -= 1;
                    self.col = self.lines[self.row].len();
                    self.lines[self.row].extend(line);
                }
            }
            Key::Delete => {
                if self.col < self.lines[self.row].len() {
                    self.lines[self.row].remove(self.col);
                } else if self.row + 1 < self.lines.len() {
                    let next = self.lines.remove(self.row + 1);
                    self.lines[self.row].extend(next);
                }
            }
            Key::Left => {
                if self.col > 0 {
                    self.col -= 1;
                } else if self.row > 0 {
                    self.row -= 1;
                    self.col = self.lines[self.row].len();
                }
            }
            Key::Right => {
                if self.col < self.lines[self.row].len() {
                    self.col += 1;
                } else if self.row + 1 < self.lines.len() {
                    self.row += 1;
                    self.col = 0;
                }
            }
            Key::Up if self.row > 0 => {
                self.row -= 1;
                self.clamp_col();
            }
            Key::Down if self.row + 1 < self.lines.len() => {
                self.row += 1;
                self.clamp_col();
            }
            Key::PageUp => {
                self.row = 0;
                self.clamp_col();
            }
            Key::PageDown => {
                self.row = self.lines.len() - 1;
                self.clamp_col();
            }
            Key::Home => self.col = 0,
            Key::End => self.col = self.lines[self.row].len(),
            _ => {}
        }
        EditorAction::Continue
    }
}
