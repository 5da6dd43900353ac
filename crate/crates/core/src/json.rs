//! A permissive JSON dialect for framework configurations, and strict output.
//!
//! Beyond strict JSON the parser accepts unquoted keys, bare-word strings,
//! single-quoted strings, trailing commas, missing commas between elements,
//! and `//` and `/* */` comments.

use std::fmt::Write as _;

use indexmap::IndexMap;
use thiserror::Error;

/// Deepest nesting of arrays and objects accepted by the parser.
pub const MAX_DEPTH: usize = 512;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JsonValue {
    Null,
    Bool(bool),
    /// Canonical decimal text, kept without rounding.
    Number(String),
    String(String),
    Array(Vec<JsonValue>),
    Object(IndexMap<String, JsonValue>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JsonError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: duplicate key \"{key}\"")]
    DuplicateKey { line: usize, column: usize, key: String },
}

impl JsonError {
    pub fn line(&self) -> usize {
        match self {
            JsonError::Syntax { line, .. } | JsonError::DuplicateKey { line, .. } => *line,
        }
    }
}

impl JsonValue {
    pub fn get(&self, key: &str) -> Option<&JsonValue> {
        match self {
            JsonValue::Object(map) => map.get(key),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            JsonValue::String(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            JsonValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_array(&self) -> Option<&[JsonValue]> {
        match self {
            JsonValue::Array(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_object(&self) -> Option<&IndexMap<String, JsonValue>> {
        match self {
            JsonValue::Object(map) => Some(map),
            _ => None,
        }
    }

    /// The number text, or `None` for other kinds.
    pub fn as_number(&self) -> Option<&str> {
        match self {
            JsonValue::Number(n) => Some(n),
            _ => None,
        }
    }

    /// Short name of the value's kind, used in messages.
    pub fn kind(&self) -> &'static str {
        match self {
            JsonValue::Null => "null",
            JsonValue::Bool(_) => "boolean",
            JsonValue::Number(_) => "number",
            JsonValue::String(_) => "string",
            JsonValue::Array(_) => "array",
            JsonValue::Object(_) => "object",
        }
    }
}

/// Canonical text of a number token, or `None` when `token` is not a number.
/// `+1` becomes `1`, `.5` becomes `0.5`, `5.` becomes `5` and `007` becomes `7`.
pub fn canonical_number(token: &str) -> Option<String> {
    let bytes = token.as_bytes();
    let mut i = 0;
    let mut out = String::new();
    match bytes.first() {
        Some(b'-') => {
            out.push('-');
            i += 1;
        }
        Some(b'+') => i += 1,
        _ => {}
    }
    let int_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    let int_part = token[int_start..i].trim_start_matches('0');
    let had_int = i > int_start;
    let mut frac = "";
    let mut had_frac = false;
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        frac = &token[start..i];
        had_frac = !frac.is_empty();
    }
    if !had_int && !had_frac {
        return None;
    }
    out.push_str(if int_part.is_empty() { "0" } else { int_part });
    if had_frac {
        out.push('.');
        out.push_str(frac);
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        out.push(bytes[i] as char);
        i += 1;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            out.push(bytes[i] as char);
            i += 1;
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == start {
            return None;
        }
        out.push_str(&token[start..i]);
    }
    (i == bytes.len()).then_some(out)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

fn is_structural(c: char) -> bool {
    matches!(c, ',' | ':' | '[' | ']' | '{' | '}')
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser { chars: text.chars().collect(), pos: 0, line: 1, column: 1 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, JsonError> {
        Err(JsonError::Syntax { line: self.line, column: self.column, message: message.into() })
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(c) => format!("`{c}`"),
            None => "end of input".into(),
        }
    }

    fn skip_trivia(&mut self) -> Result<(), JsonError> {
        loop {
            match (self.peek(), self.peek_at(1)) {
                (Some(c), _) if c.is_whitespace() || c == '\u{feff}' => {
                    self.bump();
                }
                (Some('/'), Some('/')) => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                (Some('/'), Some('*')) => {
                    let (line, column) = (self.line, self.column);
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            Some('*') if self.peek() == Some('/') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                            None => {
                                return Err(JsonError::Syntax {
                                    line,
                                    column,
                                    message: "unterminated comment".into(),
                                })
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn value(&mut self, depth: usize) -> Result<JsonValue, JsonError> {
        self.skip_trivia()?;
        match self.peek() {
            Some('{') => self.object(depth + 1),
            Some('[') => self.array(depth + 1),
            Some(q @ ('"' | '\'')) => self.string(q).map(JsonValue::String),
            Some(c) if !is_structural(c) => {
                let word = self.bare_word();
                Ok(match word.as_str() {
                    "null" => JsonValue::Null,
                    "true" => JsonValue::Bool(true),
                    "false" => JsonValue::Bool(false),
                    _ => match canonical_number(&word) {
                        Some(n) => JsonValue::Number(n),
                        None => JsonValue::String(word),
                    },
                })
            }
            _ => self.error(format!("expected a value, found {}", self.found())),
        }
    }

    fn bare_word(&mut self) -> String {
        let mut word = String::new();
        while let Some(c) = self.peek() {
            let comment = c == '/' && matches!(self.peek_at(1), Some('/' | '*'));
            if c.is_whitespace() || is_structural(c) || comment {
                break;
            }
            word.push(c);
            self.bump();
        }
        word
    }

    fn enter(&self, depth: usize) -> Result<(), JsonError> {
        if depth > MAX_DEPTH {
            return self.error(format!("nesting deeper than {MAX_DEPTH} levels"));
        }
        Ok(())
    }

    fn array(&mut self, depth: usize) -> Result<JsonValue, JsonError> {
        self.enter(depth)?;
        self.bump();
        let mut items = Vec::new();
        loop {
            self.skip_trivia()?;
            match self.peek() {
                Some(']') => {
                    self.bump();
                    return Ok(JsonValue::Array(items));
                }
                Some(',') => return self.error("expected a value or `]`, found `,`"),
                None => return self.error("unterminated array"),
                _ => {}
            }
            items.push(self.value(depth)?);
            self.skip_trivia()?;
            if self.peek() == Some(',') {
                self.bump();
            }
        }
    }

    fn object(&mut self, depth: usize) -> Result<JsonValue, JsonError> {
        self.enter(depth)?;
        self.bump();
        let mut map = IndexMap::new();
        loop {
            self.skip_trivia()?;
            let (line, column) = (self.line, self.column);
            let key = match self.peek() {
                Some('}') => {
                    self.bump();
                    return Ok(JsonValue::Object(map));
                }
                Some(q @ ('"' | '\'')) => self.string(q)?,
                Some(c) if !is_structural(c) => self.bare_word(),
                None => return self.error("unterminated object"),
                _ => return self.error(format!("expected a key or `}}`, found {}", self.found())),
            };
            self.skip_trivia()?;
            if self.peek() != Some(':') {
                return self.error(format!("expected `:` after key \"{key}\", found {}", self.found()));
            }
            self.bump();
            let value = self.value(depth)?;
            if map.contains_key(&key) {
                return Err(JsonError::DuplicateKey { line, column, key });
            }
            map.insert(key, value);
            self.skip_trivia()?;
            if self.peek() == Some(',') {
                self.bump();
            }
        }
    }

    fn hex4(&mut self) -> Result<u32, JsonError> {
        let mut value = 0;
        for _ in 0..4 {
            match self.peek().and_then(|c| c.to_digit(16)) {
                Some(d) => {
                    value = value * 16 + d;
                    self.bump();
                }
                None => return self.error("expected four hex digits after `\\u`"),
            }
        }
        Ok(value)
    }

    fn string(&mut self, quote: char) -> Result<String, JsonError> {
        let (line, column) = (self.line, self.column);
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(JsonError::Syntax { line, column, message: "unterminated string".into() }),
                Some(c) if c == quote => return Ok(out),
                Some('\\') => {
                    let escape = match self.bump() {
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('r') => '\r',
                        Some('b') => '\u{8}',
                        Some('f') => '\u{c}',
                        Some(c @ ('"' | '\'' | '\\' | '/')) => c,
                        Some('u') => {
                            let high = self.hex4()?;
                            let code = if (0xD800..0xDC00).contains(&high) {
                                if self.peek() != Some('\\') || self.peek_at(1) != Some('u') {
                                    return self.error("unpaired surrogate in `\\u` escape");
                                }
                                self.bump();
                                self.bump();
                                let low = self.hex4()?;
                                if !(0xDC00..0xE000).contains(&low) {
                                    return self.error("unpaired surrogate in `\\u` escape");
                                }
                                0x10000 + ((high - 0xD800) << 10) + (low - 0xDC00)
                            } else {
                                high
                            };
                            match char::from_u32(code) {
                                Some(c) => c,
                                None => return self.error("unpaired surrogate in `\\u` escape"),
                            }
                        }
                        Some(other) => return self.error(format!("unknown escape `\\{other}`")),
                        None => return Err(JsonError::Syntax { line, column, message: "unterminated string".into() }),
                    };
                    out.push(escape);
                }
                Some(c) => out.push(c),
            }
        }
    }
}

/// Parses the permissive dialect.
pub fn parse_relaxed(text: &str) -> Result<JsonValue, JsonError> {
    let mut parser = Parser::new(text);
    let value = parser.value(0)?;
    parser.skip_trivia()?;
    if parser.peek().is_some() {
        return parser.error(format!("unexpected {} after the value", parser.found()));
    }
    Ok(value)
}

/// Compact strict JSON, escaping only what JSON requires.
pub fn to_strict(value: &JsonValue) -> String {
    let mut out = String::new();
    write_value(&mut out, value);
    out
}

fn write_value(out: &mut String, value: &JsonValue) {
    match value {
        JsonValue::Null => out.push_str("null"),
        JsonValue::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        JsonValue::Number(n) => out.push_str(n),
        JsonValue::String(s) => write_string(out, s),
        JsonValue::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        JsonValue::Object(map) => {
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_string(out, key);
                out.push(':');
                write_value(out, item);
            }
            out.push('}');
        }
    }
}

/// Writes `s` as a strict JSON string literal.
pub fn write_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}
