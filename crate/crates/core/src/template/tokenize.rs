use super::TemplateError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SegmentKind {
    Text(String),
    /// `{{ program }}`, or `{{= head : body }}` when `shortcut` is set.
    Query { program: String, shortcut: bool },
    /// `{{* program }}`, or `{{+ head : body }}` when `shortcut` is set.
    PersistQuery { program: String, shortcut: bool },
    /// `{{-}}`
    Reset,
}

/// A piece of a template with its byte range in the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub kind: SegmentKind,
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn is_expression(&self) -> bool {
        !matches!(self.kind, SegmentKind::Text(_))
    }
}

/// 1-based line and column of a byte offset.
pub fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn syntax_error(text: &str, offset: usize, message: impl Into<String>) -> TemplateError {
    let (line, column) = position(text, offset);
    TemplateError::Syntax { line, column, message: message.into() }
}

/// Length of the `{{"` or `{{f"` opener at `at`, if any.
pub(crate) fn string_region_opener(text: &str, at: usize) -> Option<usize> {
    let rest = &text[at..];
    if rest.starts_with("{{\"") {
        Some(3)
    } else if rest.starts_with("{{f\"") {
        Some(4)
    } else {
        None
    }
}

/// End (exclusive) of the string region opened at `at`: just past the first `"}}`.
pub(crate) fn string_region_end(text: &str, at: usize, opener: usize) -> Result<usize, TemplateError> {
    text[at + opener..]
        .find("\"}}")
        .map(|i| at + opener + i + 3)
        .ok_or_else(|| syntax_error(text, at, "unterminated string region, expected `\"}}`"))
}

/// End (exclusive) of the ASP string literal starting with the quote at `at`.
fn asp_string_end(text: &str, at: usize) -> Result<usize, TemplateError> {
    let bytes = text.as_bytes();
    let mut i = at + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'"' => return Ok(i + 1),
            _ => i += 1,
        }
    }
    Err(syntax_error(text, at, "unterminated string literal in query"))
}

/// End (exclusive) of the ASP comment starting with the `%` at `at`.
fn comment_end(text: &str, at: usize) -> Result<usize, TemplateError> {
    let rest = &text[at..];
    if let Some(body) = rest.strip_prefix("%*") {
        return body
            .find("*%")
            .map(|i| at + 2 + i + 2)
            .ok_or_else(|| syntax_error(text, at, "unterminated block comment in query"));
    }
    Ok(rest.find('\n').map_or(text.len(), |i| at + i))
}

/// Splits a template into text and Mustache expressions.
pub fn tokenize(template: &str) -> Result<Vec<Segment>, TemplateError> {
    let mut segments = Vec::new();
    let mut text_start = 0;
    let mut i = 0;
    let push_text = |segments: &mut Vec<Segment>, start: usize, end: usize| {
        if end > start {
            segments.push(Segment { kind: SegmentKind::Text(template[start..end].to_string()), start, end });
        }
    };
    while let Some(found) = template[i..].find("{{") {
        let at = i + found;
        if let Some(opener) = string_region_opener(template, at) {
            i = string_region_end(template, at, opener)?;
            continue;
        }
        push_text(&mut segments, text_start, at);
        if template[at..].starts_with("{{-}}") {
            segments.push(Segment { kind: SegmentKind::Reset, start: at, end: at + 5 });
            i = at + 5;
            text_start = i;
            continue;
        }
        let (marker, persistent, shortcut) = match template.as_bytes().get(at + 2) {
            Some(b'=') => (1, false, true),
            Some(b'+') => (1, true, true),
            Some(b'*') => (1, true, false),
            _ => (0, false, false),
        };
        let body_start = at + 2 + marker;
        let body_end = query_body_end(template, at, body_start)?;
        let program = template[body_start..body_end].to_string();
        let kind = if persistent {
            SegmentKind::PersistQuery { program, shortcut }
        } else {
            SegmentKind::Query { program, shortcut }
        };
        segments.push(Segment { kind, start: at, end: body_end + 2 });
        i = body_end + 2;
        text_start = i;
    }
    push_text(&mut segments, text_start, template.len());
    Ok(segments)
}

/// Offset of the closing `}}` of the query opened at `open`.
fn query_body_end(text: &str, open: usize, body_start: usize) -> Result<usize, TemplateError> {
    let bytes = text.as_bytes();
    let mut depth = 2usize;
    let mut i = body_start;
    while i < bytes.len() {
        match bytes[i] {
            b'{' => {
                if let Some(opener) = string_region_opener(text, i) {
                    i = string_region_end(text, i, opener)?;
                    continue;
                }
                depth += 1;
            }
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Ok(i - 1);
                }
            }
            b'"' => {
                i = asp_string_end(text, i)?;
                continue;
            }
            b'%' => {
                i = comment_end(text, i)?;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    Err(syntax_error(text, open, "unterminated Mustache query, expected `}}`"))
}
