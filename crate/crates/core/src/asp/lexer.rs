use std::fmt;

use bigdecimal::num_bigint::BigInt;

use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Variable(String),
    Anonymous,
    Integer(BigInt),
    Str(String),
    /// `#show`, `#count`, ...
    Directive(String),
    External(String),
    Not,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semicolon,
    Dot,
    DotDot,
    Colon,
    If,
    WeakIf,
    At,
    Pipe,
    Cmp(&'static str),
    Plus,
    Minus,
    Star,
    StarStar,
    Slash,
    Backslash,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Variable(s) => write!(f, "`{s}`"),
            Tok::Anonymous => f.write_str("`_`"),
            Tok::Integer(i) => write!(f, "`{i}`"),
            Tok::Str(_) => f.write_str("string"),
            Tok::Directive(d) => write!(f, "`#{d}`"),
            Tok::External(e) => write!(f, "`@{e}`"),
            Tok::Not => f.write_str("`not`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semicolon => f.write_str("`;`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::DotDot => f.write_str("`..`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::If => f.write_str("`:-`"),
            Tok::WeakIf => f.write_str("`:~`"),
            Tok::At => f.write_str("`@`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Cmp(op) => write!(f, "`{op}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::StarStar => f.write_str("`**`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Backslash => f.write_str("`\\`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    Lexer { chars: src.char_indices().peekable(), line: 1, column: 1 }.run()
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

impl Lexer<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, pos: Pos, message: impl Into<String>) -> ParseError {
        ParseError::Lexical { line: pos.line, column: pos.column, message: message.into() }
    }

    fn word(&mut self, first: char) -> String {
        let mut s = String::from(first);
        while let Some(c) = self.peek().filter(|&c| is_ident_char(c)) {
            s.push(c);
            self.bump();
        }
        s
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            let pos = Pos { line: self.line, column: self.column };
            let Some(c) = self.bump() else {
                out.push(Token { tok: Tok::Eof, pos });
                return Ok(out);
            };
            let tok = match c {
                c if c.is_whitespace() => continue,
                '%' => {
                    if self.eat('*') {
                        self.block_comment(pos)?;
                    } else {
                        while self.peek().is_some_and(|c| c != '\n') {
                            self.bump();
                        }
                    }
                    continue;
                }
                '0'..='9' => {
                    let mut digits = String::from(c);
                    while let Some(d) = self.peek().filter(char::is_ascii_digit) {
                        digits.push(d);
                        self.bump();
                    }
                    Tok::Integer(digits.parse().expect("ascii digits"))
                }
                '"' => Tok::Str(self.string(pos)?),
                '#' => {
                    let Some(first) = self.peek().filter(|c| c.is_ascii_alphabetic()) else {
                        return Err(self.error(pos, "expected a directive name after `#`"));
                    };
                    self.bump();
                    Tok::Directive(self.word(first))
                }
                '@' => match self.peek() {
                    Some(first) if first.is_ascii_lowercase() => {
                        self.bump();
                        Tok::External(self.word(first))
                    }
                    _ => Tok::At,
                },
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                ';' => Tok::Semicolon,
                '|' => Tok::Pipe,
                '.' => {
                    if self.eat('.') {
                        Tok::DotDot
                    } else {
                        Tok::Dot
                    }
                }
                ':' => {
                    if self.eat('-') {
                        Tok::If
                    } else if self.eat('~') {
                        Tok::WeakIf
                    } else {
                        Tok::Colon
                    }
                }
                '=' => {
                    self.eat('=');
                    Tok::Cmp("=")
                }
                '!' => {
                    if !self.eat('=') {
                        return Err(self.error(pos, "expected `!=`"));
                    }
                    Tok::Cmp("!=")
                }
                '<' => {
                    if self.eat('=') {
                        Tok::Cmp("<=")
                    } else if self.eat('>') {
                        Tok::Cmp("!=")
                    } else {
                        Tok::Cmp("<")
                    }
                }
                '>' => {
                    if self.eat('=') {
                        Tok::Cmp(">=")
                    } else {
                        Tok::Cmp(">")
                    }
                }
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => {
                    if self.eat('*') {
                        Tok::StarStar
                    } else {
                        Tok::Star
                    }
                }
                '/' => Tok::Slash,
                '\\' => Tok::Backslash,
                c if c == '_' || c == '\'' || c.is_ascii_alphabetic() => {
                    let word = self.word(c);
                    match word.trim_start_matches(['_', '\'']).chars().next() {
                        None => Tok::Anonymous,
                        Some(first) if first.is_ascii_uppercase() => Tok::Variable(word),
                        Some(first) if first.is_ascii_lowercase() => {
                            if word == "not" {
                                Tok::Not
                            } else {
                                Tok::Ident(word)
                            }
                        }
                        Some(_) => return Err(self.error(pos, format!("invalid identifier `{word}`"))),
                    }
                }
                other => return Err(self.error(pos, format!("unexpected character `{other}`"))),
            };
            out.push(Token { tok, pos });
        }
    }

    fn block_comment(&mut self, start: Pos) -> Result<(), ParseError> {
        loop {
            match self.bump() {
                None => return Err(self.error(start, "unterminated block comment")),
                Some('*') if self.eat('%') => return Ok(()),
                Some(_) => {}
            }
        }
    }

    /// Decodes `\"`, `\\` and `\n`; any other escape is kept verbatim.
    fn string(&mut self, start: Pos) -> Result<String, ParseError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(start, "unterminated string")),
                Some('"') => return Ok(s),
                Some('\\') => match self.bump() {
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    Some('n') => s.push('\n'),
                    Some(other) => {
                        s.push('\\');
                        s.push(other);
                    }
                    None => return Err(self.error(start, "unterminated string")),
                },
                Some(c) => s.push(c),
            }
        }
    }
}
