use super::tokenize::{position, string_region_end, string_region_opener};
use super::TemplateError;
use crate::asp::quote_string;

fn lowering_error(text: &str, offset: usize, message: impl Into<String>) -> TemplateError {
    let (line, column) = position(text, offset);
    TemplateError::Syntax { line, column, message: message.into() }
}

/// Escapes newlines and double quotes only; other characters, including
/// backslashes, pass through unchanged.
fn multiline_literal(content: &str) -> String {
    let mut out = String::with_capacity(content.len() + 2);
    out.push('"');
    for c in content.chars() {
        match c {
            '\n' => out.push_str("\\n"),
            '"' => out.push_str("\\\""),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Splits `expr:%fmt` at the last top-level `:` followed by `%`.
fn split_format(interpolation: &str) -> (&str, &str) {
    let bytes = interpolation.as_bytes();
    let mut depth = 0i32;
    let mut in_string = false;
    let mut split = None;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' if in_string => i += 1,
            b'"' => in_string = !in_string,
            b'(' | b'{' if !in_string => depth += 1,
            b')' | b'}' if !in_string => depth -= 1,
            b':' if !in_string && depth == 0 && bytes.get(i + 1) == Some(&b'%') => split = Some(i),
            _ => {}
        }
        i += 1;
    }
    match split {
        Some(i) => (&interpolation[..i], &interpolation[i + 1..]),
        None => (interpolation, "%s"),
    }
}

/// Rewrites an f-string body as `@string_format(fmt, e1, ..., en)`.
/// `offset` locates `content` inside `source` for error positions.
fn lower_f_string(source: &str, offset: usize, content: &str) -> Result<String, TemplateError> {
    let mut fmt = String::new();
    let mut args = Vec::new();
    let mut i = 0;
    let bytes = content.as_bytes();
    while i < content.len() {
        let rest = &content[i..];
        if rest.starts_with("$$") {
            fmt.push('$');
            i += 2;
        } else if rest.starts_with("${") {
            let start = i + 2;
            let mut depth = 0i32;
            let mut in_string = false;
            let mut j = start;
            let end = loop {
                let Some(&b) = bytes.get(j) else {
                    return Err(lowering_error(source, offset + i, "unterminated interpolation `${`"));
                };
                match b {
                    b'\\' if in_string => j += 1,
                    b'"' => in_string = !in_string,
                    b'$' if !in_string && bytes.get(j + 1) == Some(&b'{') => {
                        return Err(lowering_error(source, offset + j, "nested `${` inside an interpolation"))
                    }
                    b'{' if !in_string => depth += 1,
                    b'}' if !in_string && depth == 0 => break j,
                    b'}' if !in_string => depth -= 1,
                    _ => {}
                }
                j += 1;
            };
            let (expr, format) = split_format(&content[start..end]);
            if expr.trim().is_empty() {
                return Err(lowering_error(source, offset + i, "empty interpolation `${}`"));
            }
            fmt.push_str(format);
            args.push(expr.trim().to_string());
            i = end + 1;
        } else {
            let c = rest.chars().next().expect("non-empty");
            if c == '%' {
                fmt.push_str("%%");
            } else {
                fmt.push(c);
            }
            i += c.len_utf8();
        }
    }
    let mut out = format!("@string_format({}", quote_string(&fmt));
    for arg in args {
        out.push_str(", ");
        out.push_str(&arg);
    }
    out.push(')');
    Ok(out)
}

/// Replaces multiline strings `{{"..."}}` and f-strings `{{f"..."}}` in a
/// query with plain ASP terms.
pub fn lower_strings(query: &str) -> Result<String, TemplateError> {
    let mut out = String::with_capacity(query.len());
    let mut i = 0;
    let bytes = query.as_bytes();
    while i < query.len() {
        if let Some(opener) = string_region_opener(query, i) {
            let end = string_region_end(query, i, opener)?;
            let content = &query[i + opener..end - 3];
            if opener == 3 {
                out.push_str(&multiline_literal(content));
            } else {
                out.push_str(&lower_f_string(query, i + opener, content)?);
            }
            i = end;
            continue;
        }
        if bytes[i] == b'"' {
            let start = i;
            i += 1;
            while i < query.len() && bytes[i] != b'"' {
                i += if bytes[i] == b'\\' { 2 } else { 1 };
            }
            i = (i + 1).min(query.len());
            out.push_str(&query[start..i]);
            continue;
        }
        let c = query[i..].chars().next().expect("non-empty");
        out.push(c);
        i += c.len_utf8();
    }
    Ok(out)
}
