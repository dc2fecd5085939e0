//! Strict JSON: one value with optional surrounding whitespace, no comments,
//! no trailing commas. String contents are taken as raw bytes; only control
//! bytes below 0x20 are rejected.

use crate::oracle::{FormatOracle, ParseFeedback, Scanner};

#[derive(Debug, Clone, Copy, Default)]
pub struct JsonOracle;

impl FormatOracle for JsonOracle {
    fn name(&self) -> &str {
        "json"
    }

    fn scanner(&self) -> Box<dyn Scanner> {
        Box::new(JsonScanner::new())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Container {
    Object,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Escape {
    None,
    Backslash,
    Hex(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Number {
    Minus,
    Zero,
    Int,
    Dot,
    Frac,
    Exp,
    ExpSign,
    ExpDigits,
}

impl Number {
    fn can_end(self) -> bool {
        matches!(self, Number::Zero | Number::Int | Number::Frac | Number::ExpDigits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    /// Expecting a value. `array_open` allows `]` right after `[`.
    Value { array_open: bool },
    /// Expecting a key. `object_open` allows `}` right after `{`.
    Key { object_open: bool },
    Str { key: bool, escape: Escape },
    Num(Number),
    Literal { word: &'static [u8], pos: u8 },
    Colon,
    AfterValue,
}

/// Push parser for [`JsonOracle`].
#[derive(Debug, Clone)]
pub struct JsonScanner {
    stack: Vec<Container>,
    state: State,
    failed: bool,
}

impl Default for JsonScanner {
    fn default() -> Self {
        Self::new()
    }
}

fn is_ws(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r')
}

impl JsonScanner {
    pub fn new() -> Self {
        JsonScanner {
            stack: Vec::new(),
            state: State::Value { array_open: false },
            failed: false,
        }
    }

    fn start_value(&mut self, b: u8) -> bool {
        self.state = match b {
            b'{' => {
                self.stack.push(Container::Object);
                State::Key { object_open: true }
            }
            b'[' => {
                self.stack.push(Container::Array);
                State::Value { array_open: true }
            }
            b'"' => State::Str {
                key: false,
                escape: Escape::None,
            },
            b'-' => State::Num(Number::Minus),
            b'0' => State::Num(Number::Zero),
            b'1'..=b'9' => State::Num(Number::Int),
            b't' => State::Literal { word: b"true", pos: 1 },
            b'f' => State::Literal { word: b"false", pos: 1 },
            b'n' => State::Literal { word: b"null", pos: 1 },
            _ => return false,
        };
        true
    }

    fn close(&mut self, expected: Container) -> bool {
        if self.stack.pop() == Some(expected) {
            self.state = State::AfterValue;
            true
        } else {
            false
        }
    }

    fn step(&mut self, b: u8) -> bool {
        match self.state {
            State::Value { array_open } => {
                if is_ws(b) {
                    true
                } else if b == b']' && array_open {
                    self.close(Container::Array)
                } else {
                    self.start_value(b)
                }
            }
            State::Key { object_open } => match b {
                _ if is_ws(b) => true,
                b'"' => {
                    self.state = State::Str {
                        key: true,
                        escape: Escape::None,
                    };
                    true
                }
                b'}' if object_open => self.close(Container::Object),
                _ => false,
            },
            State::Str { key, escape } => {
                let next = match escape {
                    Escape::None => match b {
                        b'"' => {
                            self.state = if key { State::Colon } else { State::AfterValue };
                            return true;
                        }
                        b'\\' => Escape::Backslash,
                        0x00..=0x1f => return false,
                        _ => Escape::None,
                    },
                    Escape::Backslash => match b {
                        b'"' | b'\\' | b'/' | b'b' | b'f' | b'n' | b'r' | b't' => Escape::None,
                        b'u' => Escape::Hex(4),
                        _ => return false,
                    },
                    Escape::Hex(left) => {
                        if !b.is_ascii_hexdigit() {
                            return false;
                        }
                        if left == 1 {
                            Escape::None
                        } else {
                            Escape::Hex(left - 1)
                        }
                    }
                };
                self.state = State::Str { key, escape: next };
                true
            }
            State::Num(num) => {
                let next = match (num, b) {
                    (Number::Minus, b'0') => Some(Number::Zero),
                    (Number::Minus, b'1'..=b'9') => Some(Number::Int),
                    (Number::Int, b'0'..=b'9') => Some(Number::Int),
                    (Number::Zero | Number::Int, b'.') => Some(Number::Dot),
                    (Number::Dot | Number::Frac, b'0'..=b'9') => Some(Number::Frac),
                    (Number::Zero | Number::Int | Number::Frac, b'e' | b'E') => Some(Number::Exp),
                    (Number::Exp, b'+' | b'-') => Some(Number::ExpSign),
                    (Number::Exp | Number::ExpSign | Number::ExpDigits, b'0'..=b'9') => {
                        Some(Number::ExpDigits)
                    }
                    _ => None,
                };
                match next {
                    Some(n) => {
                        self.state = State::Num(n);
                        true
                    }
                    None if num.can_end() => {
                        self.state = State::AfterValue;
                        self.step(b)
                    }
                    None => false,
                }
            }
            State::Literal { word, pos } => {
                if word[pos as usize] != b {
                    return false;
                }
                let pos = pos + 1;
                self.state = if pos as usize == word.len() {
                    State::AfterValue
                } else {
                    State::Literal { word, pos }
                };
                true
            }
            State::Colon => match b {
                _ if is_ws(b) => true,
                b':' => {
                    self.state = State::Value { array_open: false };
                    true
                }
                _ => false,
            },
            State::AfterValue => match (self.stack.last(), b) {
                (_, _) if is_ws(b) => true,
                (Some(Container::Object), b',') => {
                    self.state = State::Key { object_open: false };
                    true
                }
                (Some(Container::Array), b',') => {
                    self.state = State::Value { array_open: false };
                    true
                }
                (Some(Container::Object), b'}') => self.close(Container::Object),
                (Some(Container::Array), b']') => self.close(Container::Array),
                _ => false,
            },
        }
    }
}

impl Scanner for JsonScanner {
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
            return ParseFeedback::Incorrect;
        }
        let done = match self.state {
            State::AfterValue => true,
            State::Num(n) => n.can_end(),
            _ => false,
        };
        if done && self.stack.is_empty() {
            ParseFeedback::Complete
        } else {
            ParseFeedback::Incomplete
        }
    }

    fn clone_box(&self) -> Box<dyn Scanner> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use crate::formats::classify_json as classify;
    use crate::oracle::ParseFeedback::*;

    #[test]
    fn traced_examples() {
        assert_eq!(classify(br#"{"ABCD":["#), Incomplete);
        assert_eq!(classify(br#"{"ABCD":[*"#), Incorrect);
        assert_eq!(classify(br#"{"ABCD":["1,2,3,4,5,6"]}"#), Complete);
        assert_eq!(classify(br#"{ "name": "Dave" ,"age": 42 }"#), Complete);
        assert_eq!(classify(br#"{ "name": "Dave" "#), Incomplete);
        assert_eq!(classify(br#"{ "name": "Dave" ""#), Incorrect);
    }

    #[test]
    fn scalars() {
        assert_eq!(classify(b"11"), Complete);
        assert_eq!(classify(b"1"), Complete);
        assert_eq!(classify(b"1*"), Incorrect);
        assert_eq!(classify(b"-"), Incomplete);
        assert_eq!(classify(b"-0.5e+10"), Complete);
        assert_eq!(classify(b"1."), Incomplete);
        assert_eq!(classify(b"1.e"), Incorrect);
        assert_eq!(classify(b"01"), Incorrect);
        assert_eq!(classify(b"tru"), Incomplete);
        assert_eq!(classify(b"true "), Complete);
        assert_eq!(classify(b"trUe"), Incorrect);
        assert_eq!(classify(b"null null"), Incorrect);
        assert_eq!(classify(b"  "), Incomplete);
    }

    #[test]
    fn strings_and_escapes() {
        assert_eq!(classify("\"aé\\n\"".as_bytes()), Complete);
        assert_eq!(classify(br#""\u00g""#), Incorrect);
        assert_eq!(classify(br#""\x""#), Incorrect);
        assert_eq!(classify(b"\"\x01\""), Incorrect);
        assert_eq!(classify(b"\"\xff\xfe\""), Complete);
        assert_eq!(classify(br#""abc"#), Incomplete);
    }

    #[test]
    fn containers() {
        assert_eq!(classify(b"[]"), Complete);
        assert_eq!(classify(b"{}"), Complete);
        assert_eq!(classify(b"[1,]"), Incorrect);
        assert_eq!(classify(br#"{"a":1,}"#), Incorrect);
        assert_eq!(classify(br#"{"a" 1}"#), Incorrect);
        assert_eq!(classify(b"[1 2]"), Incorrect);
        assert_eq!(classify(b"[[[1]]"), Incomplete);
        assert_eq!(classify(b"[1]]"), Incorrect);
        assert_eq!(classify(b"{1:2}"), Incorrect);
        assert_eq!(classify(b"[*]+"), Incorrect);
    }
}
