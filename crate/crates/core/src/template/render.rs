use std::cmp::Ordering;

use crate::asp::Symbol;
use crate::eval::Directive;

/// A `sort(i)` instance. Keys coming from the persistent array are skipped
/// for objects that have fewer than `|i|` terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SortKey {
    pub index: i64,
    pub persistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderDirectives {
    pub separator: String,
    pub term_separator: String,
    pub prefix: String,
    pub suffix: String,
    pub sort_keys: Vec<SortKey>,
}

impl Default for RenderDirectives {
    fn default() -> Self {
        RenderDirectives {
            separator: "\n".into(),
            term_separator: ", ".into(),
            prefix: String::new(),
            suffix: String::new(),
            sort_keys: Vec::new(),
        }
    }
}

impl RenderDirectives {
    /// Collects directives in order; `persistent` flags those taken from the
    /// persistent array. Two different values for the same setting are an error.
    pub fn from_directives<'a>(
        directives: impl IntoIterator<Item = (&'a Directive, bool)>,
    ) -> Result<Self, String> {
        let mut out = RenderDirectives::default();
        let mut seen: [Option<String>; 4] = Default::default();
        for (directive, persistent) in directives {
            let slot = match directive.name.as_str() {
                "sort" => {
                    let index = match &directive.value {
                        Symbol::Integer(i) => i64::try_from(i.clone()).ok().filter(|i| *i != 0),
                        _ => None,
                    }
                    .ok_or_else(|| format!("sort({}) needs a non-zero integer index", directive.value))?;
                    out.sort_keys.push(SortKey { index, persistent });
                    continue;
                }
                "separator" => 0,
                "term_separator" => 1,
                "prefix" => 2,
                "suffix" => 3,
                other => return Err(format!("unknown directive {other}/1")),
            };
            let value = directive.value.render(true);
            match &seen[slot] {
                Some(previous) if previous != &value => {
                    return Err(format!(
                        "contradictory {}/1 values {:?} and {:?}",
                        directive.name, previous, value
                    ))
                }
                _ => seen[slot] = Some(value),
            }
        }
        let [separator, term_separator, prefix, suffix] = seen;
        if let Some(v) = separator {
            out.separator = v;
        }
        if let Some(v) = term_separator {
            out.term_separator = v;
        }
        if let Some(v) = prefix {
            out.prefix = v;
        }
        if let Some(v) = suffix {
            out.suffix = v;
        }
        Ok(out)
    }
}

/// The terms of an object that sort keys index into.
fn object_terms(object: &Symbol) -> &[Symbol] {
    match object {
        Symbol::Tuple(args) | Symbol::Compound { args, .. } => args,
        _ => &[],
    }
}

/// The terms an object prints: the first argument of `show/*` (spread when
/// it is a tuple), the elements of a tuple, or the object itself.
fn render_terms(object: &Symbol) -> Vec<&Symbol> {
    match object {
        Symbol::Compound { name, args } if name == "show" => match &args[0] {
            Symbol::Tuple(inner) => inner.iter().collect(),
            first => vec![first],
        },
        Symbol::Tuple(args) => args.iter().collect(),
        other => vec![other],
    }
}

/// Sorts and prints the objects of one query.
pub fn render_projection(objects: &[Symbol], directives: &RenderDirectives) -> Result<String, String> {
    for key in directives.sort_keys.iter().filter(|k| !k.persistent) {
        let index = key.index.unsigned_abs() as usize;
        if let Some(object) = objects.iter().find(|o| object_terms(o).len() < index) {
            return Err(format!("sort({}) is out of range for {object}", key.index));
        }
    }
    let mut ordered: Vec<&Symbol> = objects.iter().collect();
    ordered.sort_by(|a, b| {
        for key in &directives.sort_keys {
            let index = key.index.unsigned_abs() as usize - 1;
            let ordering = object_terms(a).get(index).cmp(&object_terms(b).get(index));
            let ordering = if key.index < 0 { ordering.reverse() } else { ordering };
            if ordering != Ordering::Equal {
                return ordering;
            }
        }
        a.cmp(b)
    });
    let lines: Vec<String> = ordered
        .iter()
        .map(|object| {
            let terms: Vec<String> = render_terms(object).iter().map(|t| t.render(true)).collect();
            format!("{}{}{}", directives.prefix, terms.join(&directives.term_separator), directives.suffix)
        })
        .collect();
    Ok(lines.join(&directives.separator))
}
