//! Line-oriented INI.
//!
//! Dialect accepted here:
//!
//! * blank lines and leading spaces/tabs are ignored;
//! * `;` or `#` starts a comment line;
//! * `[name]` opens a section; the name is non-empty, has no brackets and no
//!   control bytes, and may be followed by blanks and a comment;
//! * `key = value` or `key: value`, where the key is built from ASCII
//!   alphanumerics and `_-./$@`, may contain inner blanks, and the value runs
//!   to the end of the line (any byte except control bytes other than tab
//!   and carriage return);
//! * key/value pairs before the first section are allowed.
//!
//! An input is `Incomplete` only while its last line is an unfinished section
//! header or a key still waiting for its `=`. The empty input is valid.

use crate::oracle::{FormatOracle, ParseFeedback, Scanner};

#[derive(Debug, Clone, Copy, Default)]
pub struct IniOracle;

impl FormatOracle for IniOracle {
    fn name(&self) -> &str {
        "ini"
    }

    fn scanner(&self) -> Box<dyn Scanner> {
        Box::new(IniScanner::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
enum State {
    #[default]
    LineStart,
    Comment,
    Section { empty: bool },
    AfterSection,
    Key,
    KeyGap,
    Value,
    Failed,
}

/// Push parser for [`IniOracle`].
#[derive(Debug, Clone, Default)]
pub struct IniScanner {
    state: State,
}

pub(crate) fn is_key_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.' | b'/' | b'$' | b'@')
}

fn is_blank(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\r')
}

fn is_control(b: u8) -> bool {
    (b < 0x20 && b != b'\t' && b != b'\r') || b == 0x7f
}

impl IniScanner {
    fn next(state: State, b: u8) -> State {
        use State::*;
        match state {
            LineStart => match b {
                b'\n' => LineStart,
                _ if is_blank(b) => LineStart,
                b';' | b'#' => Comment,
                b'[' => Section { empty: true },
                _ if is_key_byte(b) => Key,
                _ => Failed,
            },
            Comment => match b {
                b'\n' => LineStart,
                _ => Comment,
            },
            Section { empty } => match b {
                b']' if empty => Failed,
                b']' => AfterSection,
                b'[' | b'\n' => Failed,
                _ if is_control(b) => Failed,
                _ => Section { empty: false },
            },
            AfterSection => match b {
                b'\n' => LineStart,
                _ if is_blank(b) => AfterSection,
                b';' | b'#' => Comment,
                _ => Failed,
            },
            Key | KeyGap => match b {
                b'=' | b':' => Value,
                b' ' | b'\t' => KeyGap,
                _ if is_key_byte(b) => Key,
                _ => Failed,
            },
            Value => match b {
                b'\n' => LineStart,
                _ if is_control(b) => Failed,
                _ => Value,
            },
            Failed => Failed,
        }
    }
}

impl Scanner for IniScanner {
    fn push(&mut self, byte: u8) -> bool {
        self.state = Self::next(self.state, byte);
        self.state != State::Failed
    }

    fn verdict(&self) -> ParseFeedback {
        match self.state {
            State::Failed => ParseFeedback::Incorrect,
            State::Section { .. } | State::Key | State::KeyGap => ParseFeedback::Incomplete,
            _ => ParseFeedback::Complete,
        }
    }

    fn clone_box(&self) -> Box<dyn Scanner> {
        Box::new(self.clone())
    }
}
