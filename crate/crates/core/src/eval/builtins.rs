//! Interpreted string functions available as `@name(...)` terms.

use bigdecimal::{BigDecimal, RoundingMode};

use super::EvalError;
use crate::asp::Symbol;

fn builtin_error(name: &str, message: impl Into<String>) -> EvalError {
    EvalError::Builtin { name: name.to_string(), message: message.into() }
}

/// Evaluates `@name(args)` on ground arguments.
pub fn call_builtin(name: &str, args: &[Symbol]) -> Result<Symbol, EvalError> {
    match name {
        "string_join" => {
            let (sep, items) = args
                .split_first()
                .ok_or_else(|| builtin_error(name, "expects a separator argument"))?;
            Ok(Symbol::Str(join(&sep.render(true), items)))
        }
        "string_concat" => Ok(Symbol::Str(join("", args))),
        "string_format" => {
            let (fmt, values) =
                args.split_first().ok_or_else(|| builtin_error(name, "expects a format string"))?;
            let Symbol::Str(fmt) = fmt else {
                return Err(builtin_error(name, format!("format must be a string, found {fmt}")));
            };
            string_format(fmt, values).map(Symbol::Str)
        }
        other => Err(EvalError::UnknownBuiltin(other.to_string())),
    }
}

fn join(sep: &str, items: &[Symbol]) -> String {
    items.iter().map(|s| s.render(true)).collect::<Vec<_>>().join(sep)
}

fn as_decimal(value: &Symbol) -> Option<BigDecimal> {
    match value {
        Symbol::Integer(i) => Some(BigDecimal::from(i.clone())),
        Symbol::Real(r) => Some(r.clone()),
        _ => None,
    }
}

/// Fixed-point rendering; ties round away from zero.
pub fn format_fixed(value: &BigDecimal, digits: i64) -> String {
    value.with_scale_round(digits, RoundingMode::HalfUp).to_plain_string()
}

/// printf-style formatting with `%s`, `%d`, `%f`, `%.Nf` and `%%`.
pub fn string_format(fmt: &str, values: &[Symbol]) -> Result<String, EvalError> {
    const NAME: &str = "string_format";
    let mut out = String::new();
    let mut values = values.iter();
    let mut used = 0;
    let mut chars = fmt.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '%' {
            out.push(c);
            continue;
        }
        let mut precision: Option<i64> = None;
        if chars.peek() == Some(&'.') {
            chars.next();
            let mut digits = String::new();
            while let Some(d) = chars.peek().copied().filter(char::is_ascii_digit) {
                digits.push(d);
                chars.next();
            }
            precision = Some(
                digits.parse().map_err(|_| builtin_error(NAME, format!("bad precision in `{fmt}`")))?,
            );
        }
        let directive = chars.next().ok_or_else(|| builtin_error(NAME, format!("dangling `%` in `{fmt}`")))?;
        if directive == '%' && precision.is_none() {
            out.push('%');
            continue;
        }
        if precision.is_some() && directive != 'f' {
            return Err(builtin_error(NAME, format!("precision only applies to `%f` in `{fmt}`")));
        }
        let value = values.next().ok_or_else(|| {
            builtin_error(NAME, format!("`{fmt}` needs more than {used} argument(s)"))
        })?;
        used += 1;
        match directive {
            's' => out.push_str(&value.render(true)),
            'd' => match value {
                Symbol::Integer(i) => out.push_str(&i.to_string()),
                other => return Err(builtin_error(NAME, format!("`%d` expects an integer, found {other}"))),
            },
            'f' => {
                let number = as_decimal(value)
                    .ok_or_else(|| builtin_error(NAME, format!("`%f` expects a number, found {value}")))?;
                out.push_str(&format_fixed(&number, precision.unwrap_or(6)));
            }
            other => return Err(builtin_error(NAME, format!("unsupported directive `%{other}`"))),
        }
    }
    let extra = values.count();
    if extra > 0 {
        return Err(builtin_error(NAME, format!("`{fmt}` takes {used} argument(s), {} given", used + extra)));
    }
    Ok(out)
}
