//! TinyC, the classic teaching subset of C.
//!
//! ```text
//! program    ::= statement
//! statement  ::= "if" paren_expr statement ["else" statement]
//!              | "while" paren_expr statement
//!              | "do" statement "while" paren_expr ";"
//!              | "{" { statement } "}"
//!              | expr ";"
//!              | ";"
//! paren_expr ::= "(" expr ")"
//! expr       ::= test | id "=" expr
//! test       ::= sum | sum "<" sum
//! sum        ::= term | sum "+" term | sum "-" term
//! term       ::= id | int | paren_expr
//! id         ::= "a" | "b" | ... | "z"
//! int        ::= digit { digit }
//! ```
//!
//! A program is exactly one statement; `;;` is rejected. Words are runs of
//! lowercase letters and must be a keyword or a single letter. As in the
//! original implementation, an assignment target must be a bare identifier,
//! so `(a)=1;` and `a+b=1;` are errors.

use crate::oracle::{FormatOracle, ParseFeedback, Scanner};

#[derive(Debug, Clone, Copy, Default)]
pub struct TinyCOracle;

impl FormatOracle for TinyCOracle {
    fn name(&self) -> &str {
        "tinyc"
    }

    fn scanner(&self) -> Box<dyn Scanner> {
        Box::new(TinyCScanner::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token {
    If,
    Else,
    While,
    Do,
    Id,
    Int,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Assign,
    Lt,
    Plus,
    Minus,
}

const KEYWORDS: [(&[u8], Token); 4] = [
    (b"if", Token::If),
    (b"else", Token::Else),
    (b"while", Token::While),
    (b"do", Token::Do),
];

fn symbol(b: u8) -> Option<Token> {
    Some(match b {
        b'{' => Token::LBrace,
        b'}' => Token::RBrace,
        b'(' => Token::LParen,
        b')' => Token::RParen,
        b';' => Token::Semi,
        b'=' => Token::Assign,
        b'<' => Token::Lt,
        b'+' => Token::Plus,
        b'-' => Token::Minus,
        _ => return None,
    })
}

fn word_token(word: &[u8]) -> Option<Token> {
    KEYWORDS
        .iter()
        .find(|(kw, _)| *kw == word)
        .map(|&(_, tok)| tok)
        .or((word.len() == 1).then_some(Token::Id))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Goal {
    Stmt,
    /// Statements of a block, up to and including the closing brace.
    StmtList,
    ElseOpt,
    Expect(Token),
    ParenExpr,
    Expr,
    /// An expression whose first token was an identifier: either `= expr`
    /// follows or the identifier was the first term of a test.
    AfterLeadingId,
    Term,
    SumTail,
    LtOpt,
}

impl Goal {
    fn nullable(self) -> bool {
        matches!(self, Goal::ElseOpt | Goal::AfterLeadingId | Goal::SumTail | Goal::LtOpt)
    }
}

/// Predictive LL(1) parser over tokens with an explicit goal stack.
#[derive(Debug, Clone)]
struct Parser {
    stack: Vec<Goal>,
}

impl Default for Parser {
    fn default() -> Self {
        Parser {
            stack: vec![Goal::Stmt],
        }
    }
}

impl Parser {
    fn feed(&mut self, tok: Token) -> bool {
        use Goal::*;
        use Token as T;
        loop {
            let Some(goal) = self.stack.pop() else {
                return false;
            };
            match goal {
                Stmt => {
                    match tok {
                        T::If => self.stack.extend([ElseOpt, Stmt, ParenExpr]),
                        T::While => self.stack.extend([Stmt, ParenExpr]),
                        T::Do => self
                            .stack
                            .extend([Expect(T::Semi), ParenExpr, Expect(T::While), Stmt]),
                        T::LBrace => self.stack.push(StmtList),
                        T::Semi => {}
                        T::Id | T::Int | T::LParen => {
                            self.stack.extend([Expect(T::Semi), Expr]);
                            continue;
                        }
                        _ => return false,
                    }
                    return true;
                }
                StmtList => {
                    if tok == T::RBrace {
                        return true;
                    }
                    self.stack.extend([StmtList, Stmt]);
                }
                ElseOpt => {
                    if tok == T::Else {
                        self.stack.push(Stmt);
                        return true;
                    }
                }
                Expect(expected) => return tok == expected,
                ParenExpr => {
                    if tok != T::LParen {
                        return false;
                    }
                    self.stack.extend([Expect(T::RParen), Expr]);
                    return true;
                }
                Expr => {
                    match tok {
                        T::Id => self.stack.push(AfterLeadingId),
                        T::Int => self.stack.extend([LtOpt, SumTail]),
                        T::LParen => self.stack.extend([LtOpt, SumTail, Expect(T::RParen), Expr]),
                        _ => return false,
                    }
                    return true;
                }
                AfterLeadingId => {
                    if tok == T::Assign {
                        self.stack.push(Expr);
                        return true;
                    }
                    self.stack.extend([LtOpt, SumTail]);
                }
                Term => {
                    match tok {
                        T::Id | T::Int => {}
                        T::LParen => self.stack.extend([Expect(T::RParen), Expr]),
                        _ => return false,
                    }
                    return true;
                }
                SumTail => {
                    if matches!(tok, T::Plus | T::Minus) {
                        self.stack.extend([SumTail, Term]);
                        return true;
                    }
                }
                LtOpt => {
                    if tok == T::Lt {
                        self.stack.extend([SumTail, Term]);
                        return true;
                    }
                }
            }
        }
    }

    fn accepts(&self, tok: Token) -> bool {
        self.clone().feed(tok)
    }

    fn at_end(&self) -> bool {
        self.stack.iter().all(|g| g.nullable())
    }
}

const MAX_WORD: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
enum Pending {
    #[default]
    None,
    Int,
    Word { buf: [u8; MAX_WORD], len: u8 },
}

/// Push parser for [`TinyCOracle`].
#[derive(Debug, Clone, Default)]
pub struct TinyCScanner {
    parser: Parser,
    pending: Pending,
    failed: bool,
}

impl TinyCScanner {
    /// Whether some token spelled by `word` or one of its extensions can
    /// follow the current parser state.
    fn word_viable(&self, word: &[u8]) -> bool {
        let id = (word.len() == 1).then_some(Token::Id);
        KEYWORDS
            .iter()
            .filter(|(kw, _)| kw.starts_with(word))
            .map(|&(_, tok)| tok)
            .chain(id)
            .any(|tok| self.parser.accepts(tok))
    }

    fn flush_pending(&mut self) -> bool {
        let tok = match self.pending {
            Pending::None => return true,
            Pending::Int => Some(Token::Int),
            Pending::Word { buf, len } => word_token(&buf[..len as usize]),
        };
        self.pending = Pending::None;
        tok.is_some_and(|t| self.parser.feed(t))
    }

    fn step(&mut self, b: u8) -> bool {
        match self.pending {
            Pending::Int if b.is_ascii_digit() => return true,
            Pending::Word { mut buf, len } if b.is_ascii_lowercase() => {
                let len = len as usize;
                if len == MAX_WORD {
                    return false;
                }
                buf[len] = b;
                if !self.word_viable(&buf[..=len]) {
                    return false;
                }
                self.pending = Pending::Word {
                    buf,
                    len: len as u8 + 1,
                };
                return true;
            }
            _ => {}
        }
        if !self.flush_pending() {
            return false;
        }
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => true,
            b'0'..=b'9' => {
                self.pending = Pending::Int;
                self.parser.accepts(Token::Int)
            }
            b'a'..=b'z' => {
                let mut buf = [0; MAX_WORD];
                buf[0] = b;
                self.pending = Pending::Word { buf, len: 1 };
                self.word_viable(&buf[..1])
            }
            _ => symbol(b).is_some_and(|tok| self.parser.feed(tok)),
        }
    }
}

impl Scanner for TinyCScanner {
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
        let mut done = self.clone();
        if done.flush_pending() && done.parser.at_end() {
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
    use crate::formats::classify_tinyc as classify;
    use crate::oracle::ParseFeedback::*;

    #[test]
    fn examples() {
        assert_eq!(classify(b"{i=1;}"), Complete);
        assert_eq!(classify(b"{i=1;"), Incomplete);
        assert_eq!(classify(b";;"), Incorrect);
    }

    #[test]
    fn statements() {
        assert_eq!(classify(b"if (a < 3) b = 1; else b = 2;"), Complete);
        assert_eq!(classify(b"if (a) b;"), Complete);
        assert_eq!(classify(b"if (a) b; els"), Incomplete);
        assert_eq!(classify(b"while (i < 10) i = i + 1;"), Complete);
        assert_eq!(classify(b"do i = i - 1; while (0 < i);"), Complete);
        assert_eq!(classify(b"do i = i - 1; while (0 < i)"), Incomplete);
        assert_eq!(classify(b"{ }"), Complete);
        assert_eq!(classify(b";"), Complete);
        assert_eq!(classify(b"a = b = c;"), Complete);
        assert_eq!(classify(b"(a);"), Complete);
    }

    #[test]
    fn lexical_rules() {
        assert_eq!(classify(b"whi"), Incomplete);
        assert_eq!(classify(b"wh "), Incorrect);
        assert_eq!(classify(b"ab"), Incorrect);
        assert_eq!(classify(b"i"), Incomplete);
        assert_eq!(classify(b"{ i("), Incorrect);
        assert_eq!(classify(b"{ if("), Incomplete);
        assert_eq!(classify(b"a1;"), Incorrect);
        assert_eq!(classify(b"12;"), Complete);
        assert_eq!(classify(b"A;"), Incorrect);
        assert_eq!(classify(b"x = 1 * 2;"), Incorrect);
    }

    #[test]
    fn assignment_targets() {
        assert_eq!(classify(b"(a)=1;"), Incorrect);
        assert_eq!(classify(b"a+b=1;"), Incorrect);
        assert_eq!(classify(b"1=2;"), Incorrect);
        assert_eq!(classify(b"a<b<c;"), Incorrect);
    }

    #[test]
    fn keyword_prefix_must_fit_the_grammar() {
        // `e` could only start `else`, which cannot open a statement; but it
        // is also a valid identifier.
        assert_eq!(classify(b"{e"), Incomplete);
        assert_eq!(classify(b"{el"), Incorrect);
        assert_eq!(classify(b"if (a) b; el"), Incomplete);
        assert_eq!(classify(b"if (a) b; d"), Incorrect);
    }
}
