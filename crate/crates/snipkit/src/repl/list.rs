//! Scrollable package picker state.

#[derive(Debug, Clone, PartialEq)]
pub struct ListEntry {
    pub name: String,
    pub description: String,
    pub stars: u64,
    pub probability: f64,
}

/// Invariants: `cursor < entries.len()` when non-empty, and
/// `top <= cursor < top + height`.
#[derive(Debug, Clone)]
pub struct PackageListView {
    entries: Vec<ListEntry>,
    cursor: usize,
    top: usize,
    height: usize,
}

impl PackageListView {
    pub fn new(entries: Vec<ListEntry>, height: usize) -> Self {
        Self { entries, cursor: 0, top: 0, height: height.max(1) }
    }

    pub fn entries(&self) -> &[ListEntry] {
        &self.entries
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn selected(&self) -> Option<&ListEntry> {
        self.entries.get(self.cursor)
    }

    /// Index range currently on screen.
    pub fn viewport(&self) -> std::ops::Range<usize> {
        self.top..(self.top + self.height).min(self.entries.len())
    }

    pub fn move_by(&mut self, delta: isize) {
        if self.entries.is_empty() {
            return;
        }
        let last = self.entries.len() - 1;
        self.cursor = self.cursor.saturating_add_signed(delta).min(last);
        self.scroll_to_cursor();
    }

    pub fn page_down(&mut self) {
        self.move_by(self.height as isize);
    }

    pub fn page_up(&mut self) {
        self.move_by(-(self.height as isize));
    }

    pub fn home(&mut self) {
        self.cursor = 0;
        self.scroll_to_cursor();
    }

    pub fn end(&mut self) {
        self.cursor = self.entries.len().saturating_sub(1);
        self.scroll_to_cursor();
    }

    /// Terminal resize.
    pub fn set_height(&mut self, height: usize) {
        self.height = height.max(1);
        self.scroll_to_cursor();
    }

    fn scroll_to_cursor(&mut self) {
        if self.cursor < self.top {
            self.top = self.cursor;
        } else if self.cursor >= self.top + self.height {
            self.top = self.cursor + 1 - self.height;
        }
    }

    pub fn render_row(&self, index: usize, width: usize) -> String {
        let e = &self.entries[index];
        let marker = if index == self.cursor { '>' } else { ' ' };
        let row = format!(
            "{marker} {:>2}. {} ({:.2}, {} stars) {}",
            index + 1,
            e.name,
            e.probability,
            e.stars,
            e.description.lines().next().unwrap_or("")
        );
        row.chars().take(width.max(8)).collect()
    }
}
