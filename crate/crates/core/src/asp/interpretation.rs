use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use super::ast::{Head, RuleKind};
use super::parser::{parse_located, term_to_symbol, SHOW_PREDICATE};
use super::symbol::Symbol;
use super::ParseError;

/// Predicate carrying Base64 payloads through a recipe.
pub const BASE64_PREDICATE: &str = "__base64__";

/// A ground atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<Symbol>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<Symbol>) -> Self {
        GroundAtom { predicate: predicate.into(), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// The atom seen as a term: a constant or a compound.
    pub fn to_symbol(&self) -> Symbol {
        Symbol::compound(self.predicate.clone(), self.args.clone())
    }

    /// Turns a shown object into the atom that stores it. Tuples and bare
    /// numbers or strings go under [`SHOW_PREDICATE`].
    pub fn from_shown(symbol: &Symbol) -> Self {
        match symbol {
            Symbol::Constant(name) => GroundAtom::new(name.clone(), Vec::new()),
            Symbol::Compound { name, args } => GroundAtom::new(name.clone(), args.clone()),
            Symbol::Tuple(args) => GroundAtom::new(SHOW_PREDICATE, args.clone()),
            other => GroundAtom::new(SHOW_PREDICATE, vec![other.clone()]),
        }
    }
}

impl Ord for GroundAtom {
    fn cmp(&self, other: &Self) -> Ordering {
        // same order as the atoms viewed as terms: constants before compounds
        (!self.args.is_empty(), &self.predicate, self.args.len(), &self.args).cmp(&(
            !other.args.is_empty(),
            &other.predicate,
            other.args.len(),
            &other.args,
        ))
    }
}

impl PartialOrd for GroundAtom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_symbol())
    }
}

/// A set of ground atoms, iterated in the total order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Interpretation {
    atoms: BTreeSet<GroundAtom>,
}

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, atom: GroundAtom) -> bool {
        self.atoms.insert(atom)
    }

    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroundAtom> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atoms of the given predicate, in order.
    pub fn with_predicate<'a>(&'a self, predicate: &'a str) -> impl Iterator<Item = &'a GroundAtom> + 'a {
        self.atoms.iter().filter(move |a| a.predicate == predicate)
    }

    /// The atoms as a program of facts (`p(1).` one per line).
    pub fn to_facts(&self) -> String {
        let mut out = String::new();
        for atom in &self.atoms {
            out.push_str(&atom.to_string());
            out.push_str(".\n");
        }
        out
    }
}

impl FromIterator<GroundAtom> for Interpretation {
    fn from_iter<I: IntoIterator<Item = GroundAtom>>(iter: I) -> Self {
        Interpretation { atoms: iter.into_iter().collect() }
    }
}

impl Extend<GroundAtom> for Interpretation {
    fn extend<I: IntoIterator<Item = GroundAtom>>(&mut self, iter: I) {
        self.atoms.extend(iter);
    }
}

impl<'a> IntoIterator for &'a Interpretation {
    type Item = &'a GroundAtom;
    type IntoIter = std::collections::btree_set::Iter<'a, GroundAtom>;

    fn into_iter(self) -> Self::IntoIter {
        self.atoms.iter()
    }
}

impl IntoIterator for Interpretation {
    type Item = GroundAtom;
    type IntoIter = std::collections::btree_set::IntoIter<GroundAtom>;

    fn into_iter(self) -> Self::IntoIter {
        self.atoms.into_iter()
    }
}

/// Parses a fact file (comments allowed) into an interpretation. Anything
/// other than a ground fact is rejected.
pub fn parse_facts(text: &str) -> Result<Interpretation, ParseError> {
    let mut interpretation = Interpretation::new();
    for (rule, line) in parse_located(text)? {
        let not_a_fact = || ParseError::NotAFact { line, rule: rule.to_string() };
        if rule.kind() != RuleKind::Fact {
            return Err(not_a_fact());
        }
        let Head::Atom(atom) = &rule.head else { unreachable!("facts have atom heads") };
        let args = atom.args.iter().map(term_to_symbol).collect::<Option<Vec<_>>>().ok_or_else(not_a_fact)?;
        interpretation.insert(GroundAtom::new(atom.predicate.clone(), args));
    }
    Ok(interpretation)
}
