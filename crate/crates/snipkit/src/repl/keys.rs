//! Key events, independent of the terminal backend.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Key {
    Char(char),
    Enter,
    Backspace,
    Delete,
    Left,
    Right,
    Up,
    Down,
    Home,
    End,
    PageUp,
    PageDown,
    Tab,
    Esc,
    F2,
    F3,
    CtrlC,
    CtrlD,
    CtrlN,
    CtrlP,
    CtrlS,
}

impl Key {
    /// Parses the names used in transcripts (`enter`, `ctrl-p`, `f3`, ...).
    pub fn from_name(name: &str) -> Option<Key> {
        let key = match name.trim().to_ascii_lowercase().as_str() {
            "enter" | "return" => Key::Enter,
            "backspace" => Key::Backspace,
            "delete" | "del" => Key::Delete,
            "left" => Key::Left,
            "right" => Key::Right,
            "up" => Key::Up,
            "down" => Key::Down,
            "home" => Key::Home,
            "end" => Key::End,
            "pageup" => Key::PageUp,
            "pagedown" => Key::PageDown,
            "tab" => Key::Tab,
            "esc" | "escape" => Key::Esc,
            "f2" => Key::F2,
            "f3" => Key::F3,
            "ctrl-c" => Key::CtrlC,
            "ctrl-d" => Key::CtrlD,
            "ctrl-n" => Key::CtrlN,
            "ctrl-p" => Key::CtrlP,
            "ctrl-s" => Key::CtrlS,
            "space" => Key::Char(' '),
            _ => return None,
        };
        Some(key)
    }

    /// Previous snippet: F2, or Ctrl-P where terminals swallow F-keys.
    pub fn is_previous(self) -> bool {
        matches!(self, Key::F2 | Key::CtrlP)
    }

    pub fn is_next(self) -> bool {
        matches!(self, Key::F3 | Key::CtrlN)
    }
}
