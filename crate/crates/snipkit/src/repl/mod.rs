//! Interactive shell: environments, input handling, rendering and commands.

pub mod editor;
pub mod env;
pub mod keys;
pub mod line;
pub mod list;
pub mod session;
pub mod ui;

pub use env::ReplEnvironment;
pub use session::{run_repl, ReplOptions};
pub use ui::{parse_transcript, Channel, TerminalUi, TranscriptUi, Ui};
