//! Ground terms and their total order.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use bigdecimal::num_bigint::BigInt;
use bigdecimal::BigDecimal;

/// A ground term.
///
/// Tuples are kept apart from compounds for rendering purposes, but they order
/// as compounds with an empty name.
#[derive(Clone, Debug)]
pub enum Symbol {
    Integer(BigInt),
    /// Always stored normalized, so `real("1.50")` and `real("1.5")` coincide.
    Real(BigDecimal),
    Constant(String),
    Str(String),
    /// Invariant: `args` is non-empty. A nullary compound is a [`Symbol::Constant`].
    Compound {
        name: String,
        args: Vec<Symbol>,
    },
    Tuple(Vec<Symbol>),
}

impl Symbol {
    pub fn int(value: impl Into<BigInt>) -> Self {
        Symbol::Integer(value.into())
    }

    pub fn real(value: BigDecimal) -> Self {
        Symbol::Real(value.normalized())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Symbol::Constant(name.into())
    }

    pub fn string(text: impl Into<String>) -> Self {
        Symbol::Str(text.into())
    }

    /// Builds `name(args)`, collapsing to a constant when `args` is empty.
    pub fn compound(name: impl Into<String>, args: Vec<Symbol>) -> Self {
        let name = name.into();
        if args.is_empty() {
            Symbol::Constant(name)
        } else {
            Symbol::Compound { name, args }
        }
    }

    pub fn tuple(args: Vec<Symbol>) -> Self {
        Symbol::Tuple(args)
    }

    pub fn is_number(&self) -> bool {
        matches!(self, Symbol::Integer(_) | Symbol::Real(_))
    }

    /// Name and arguments when this symbol has function shape (constants, compounds, tuples).
    pub fn as_function(&self) -> Option<(&str, &[Symbol])> {
        match self {
            Symbol::Constant(name) => Some((name, &[])),
            Symbol::Compound { name, args } => Some((name, args)),
            Symbol::Tuple(args) => Some(("", args)),
            _ => None,
        }
    }

    fn numeric(&self) -> Option<BigDecimal> {
        match self {
            Symbol::Integer(i) => Some(BigDecimal::from(i.clone())),
            Symbol::Real(r) => Some(r.clone()),
            _ => None,
        }
    }

    fn class(&self) -> u8 {
        match self {
            Symbol::Integer(_) | Symbol::Real(_) => 0,
            Symbol::Constant(_) => 1,
            Symbol::Str(_) => 2,
            Symbol::Compound { .. } | Symbol::Tuple(_) => 3,
        }
    }

    /// Text produced when the symbol is rendered by a template.
    ///
    /// Top-level strings lose their quotes and reals print as bare decimals;
    /// everything nested keeps its canonical syntax.
    pub fn render(&self, top_level: bool) -> String {
        if top_level {
            match self {
                Symbol::Str(s) => return s.clone(),
                Symbol::Real(r) => return format_decimal(r),
                _ => {}
            }
        }
        self.to_string()
    }
}

/// Total order on ground terms (see [`Symbol`] for the class order).
pub fn compare_terms(a: &Symbol, b: &Symbol) -> Ordering {
    a.cmp(b)
}

/// Top-level or nested textual rendering of a ground term.
pub fn render_term(t: &Symbol, top_level: bool) -> String {
    t.render(top_level)
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        let by_class = self.class().cmp(&other.class());
        if by_class != Ordering::Equal {
            return by_class;
        }
        match (self, other) {
            (Symbol::Integer(a), Symbol::Integer(b)) => a.cmp(b),
            (Symbol::Real(a), Symbol::Real(b)) => a.cmp(b),
            (Symbol::Integer(_), Symbol::Real(_)) | (Symbol::Real(_), Symbol::Integer(_)) => {
                let (x, y) = (self.numeric().unwrap(), other.numeric().unwrap());
                // equal values: integer first
                x.cmp(&y)
                    .then_with(|| matches!(self, Symbol::Real(_)).cmp(&matches!(other, Symbol::Real(_))))
            }
            (Symbol::Constant(a), Symbol::Constant(b)) => a.cmp(b),
            (Symbol::Str(a), Symbol::Str(b)) => a.cmp(b),
            _ => {
                let (na, aa) = self.as_function().unwrap();
                let (nb, ab) = other.as_function().unwrap();
                na.cmp(nb)
                    .then_with(|| aa.len().cmp(&ab.len()))
                    .then_with(|| aa.cmp(ab))
            }
        }
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Symbol::Integer(i) => i.hash(state),
            Symbol::Real(r) => r.hash(state),
            Symbol::Constant(s) | Symbol::Str(s) => s.hash(state),
            Symbol::Compound { name, args } => {
                name.hash(state);
                args.hash(state);
            }
            Symbol::Tuple(args) => args.hash(state),
        }
    }
}

/// Plain (exponent-free) decimal text of a normalized real.
pub fn format_decimal(value: &BigDecimal) -> String {
    value.normalized().to_plain_string()
}

/// Parses the payload of `real("...")`: optional sign, digits, optional
/// fraction, optional exponent.
pub fn parse_decimal(text: &str) -> Option<BigDecimal> {
    let bytes = text.as_bytes();
    let mut i = 0;
    if matches!(bytes.first(), Some(b'+' | b'-')) {
        i += 1;
    }
    let int_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return None;
    }
    if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
        i += 1;
        if matches!(bytes.get(i), Some(b'+' | b'-')) {
            i += 1;
        }
        let exp_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return None;
        }
    }
    if i != bytes.len() {
        return None;
    }
    BigDecimal::from_str(text.strip_prefix('+').unwrap_or(text)).ok()
}

/// Escapes a string for use between double quotes in ASP source.
pub fn quote_string(content: &str) -> String {
    let mut out = String::with_capacity(content.len() + 2);
    out.push('"');
    for ch in content.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(ch),
        }
    }
    out.push('"');
    out
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Symbol]) -> fmt::Result {
    for (i, arg) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{arg}")?;
    }
    Ok(())
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Integer(i) => write!(f, "{i}"),
            Symbol::Real(r) => write!(f, "real({})", quote_string(&format_decimal(r))),
            Symbol::Constant(name) => f.write_str(name),
            Symbol::Str(s) => f.write_str(&quote_string(s)),
            Symbol::Compound { name, args } => {
                write!(f, "{name}(")?;
                write_args(f, args)?;
                f.write_str(")")
            }
            Symbol::Tuple(args) => {
                f.write_str("(")?;
                write_args(f, args)?;
                if args.len() == 1 {
                    f.write_str(",")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(s: &str) -> Symbol {
        Symbol::real(parse_decimal(s).unwrap())
    }

    #[test]
    fn numbers_before_constants() {
        assert_eq!(compare_terms(&Symbol::int(2), &Symbol::constant("a")), Ordering::Less);
    }

    #[test]
    fn reals_merge_with_integers() {
        assert_eq!(compare_terms(&real("1.5"), &Symbol::int(2)), Ordering::Less);
        assert_eq!(compare_terms(&real("2.5"), &Symbol::int(2)), Ordering::Greater);
        assert_eq!(compare_terms(&Symbol::int(2), &real("2.0")), Ordering::Less);
        assert_eq!(real("1.50"), real("1.5"));
    }

    #[test]
    fn compounds_compare_argwise() {
        let f = |x: &str| Symbol::compound("f", vec![Symbol::int(1), Symbol::constant(x)]);
        assert_eq!(compare_terms(&f("b"), &f("a")), Ordering::Greater);
        let t = Symbol::tuple(vec![Symbol::int(9)]);
        // empty name sorts before "f"
        assert_eq!(compare_terms(&t, &f("a")), Ordering::Less);
    }

    #[test]
    fn class_order() {
        let ordered = [
            Symbol::int(-3),
            real("0.5"),
            Symbol::constant("z"),
            Symbol::string("a"),
            Symbol::tuple(vec![]),
            Symbol::compound("a", vec![Symbol::int(1)]),
        ];
        for w in ordered.windows(2) {
            assert!(w[0] < w[1], "{} !< {}", w[0], w[1]);
        }
    }

    #[test]
    fn rendering() {
        assert_eq!(render_term(&Symbol::string("( "), true), "( ");
        assert_eq!(render_term(&Symbol::string("( "), false), "\"( \"");
        assert_eq!(render_term(&Symbol::constant("a"), true), "a");
        assert_eq!(render_term(&real("1.50"), true), "1.5");
        assert_eq!(render_term(&real("1e3"), false), "real(\"1000\")");
        assert_eq!(render_term(&Symbol::int(-4), true), "-4");
        let show = Symbol::compound("show", vec![Symbol::int(1), Symbol::constant("a")]);
        assert_eq!(render_term(&show, false), "show(1,a)");
        let nested = Symbol::compound("p", vec![Symbol::string("say \"hi\"\n")]);
        assert_eq!(nested.render(true), "p(\"say \\\"hi\\\"\\n\")");
        assert_eq!(Symbol::tuple(vec![Symbol::int(1)]).to_string(), "(1,)");
    }

    #[test]
    fn decimal_syntax() {
        for ok in ["1", "-1.5", "+2.", "0.25e-3", ".5", "1E10"] {
            assert!(parse_decimal(ok).is_some(), "{ok}");
        }
        for bad in ["", "abc", "1.2.3", "1e", "--1", " 1", "."] {
            assert!(parse_decimal(bad).is_none(), "{bad}");
        }
    }
}
