//! S-expressions: a single expression (atom, quoted string or parenthesized
//! list) with optional surrounding whitespace.
//!
//! Atoms are runs of ASCII alphanumerics and `!$%&*+-./:<=>?@^_~`. Strings
//! are delimited by `"`, may span lines, and `\` escapes the following byte.

use crate::oracle::{FormatOracle, ParseFeedback, Scanner};

#[derive(Debug, Clone, Copy, Default)]
pub struct SexpOracle;

impl FormatOracle for SexpOracle {
    fn name(&self) -> &str {
        "sexp"
    }

    fn scanner(&self) -> Box<dyn Scanner> {
        Box::new(SexpScanner::default())
    }
}

pub(crate) fn is_atom_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b"!$%&*+-./:<=>?@^_~".contains(&b)
}

fn is_ws(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
enum Lexeme {
    #[default]
    Between,
    Atom,
    Str { escape: bool },
}

/// Push parser for [`SexpOracle`].
#[derive(Debug, Clone, Default)]
pub struct SexpScanner {
    depth: usize,
    lexeme: Lexeme,
    done: bool,
    failed: bool,
}

impl SexpScanner {
    fn finish_value(&mut self) {
        self.lexeme = Lexeme::Between;
        if self.depth == 0 {
            self.done = true;
        }
    }

    fn step(&mut self, b: u8) -> bool {
        match self.lexeme {
            Lexeme::Str { escape: true } => {
                self.lexeme = Lexeme::Str { escape: false };
                return true;
            }
            Lexeme::Str { escape: false } => {
                match b {
                    b'\\' => self.lexeme = Lexeme::Str { escape: true },
                    b'"' => self.finish_value(),
                    _ => {}
                }
                return true;
            }
            Lexeme::Atom if is_atom_byte(b) => return true,
            Lexeme::Atom => self.finish_value(),
            Lexeme::Between => {}
        }
        if is_ws(b) {
            return true;
        }
        if self.done {
            return false;
        }
        match b {
            b'(' => self.depth += 1,
            b')' => {
                if self.depth == 0 {
                    return false;
                }
                self.depth -= 1;
                if self.depth == 0 {
                    self.done = true;
                }
            }
            b'"' => self.lexeme = Lexeme::Str { escape: false },
            _ if is_atom_byte(b) => self.lexeme = Lexeme::Atom,
            _ => return false,
        }
        true
    }
}

impl Scanner for SexpScanner {
    fn push(&mut self, byte: u8) -> bool {
        if self.failed {
            return false;
        }
        if !self.step(byte) {
            self.failed = true;
        }
        !self.failed
    }

    fn verdict(&self) -> ParseFeedback {
        if self.failed {
            ParseFeedback::Incorrect
        } else if self.done || (self.depth == 0 && self.lexeme == Lexeme::Atom) {
            ParseFeedback::Complete
        } else {
            ParseFeedback::Incomplete
        }
    }

    fn clone_box(&self) -> Box<dyn Scanner> {
        Box::new(self.clone())
    }
}
