//! Abstract syntax of the supported ASP fragment.
//!
//! `Display` implementations print the canonical form, which re-parses to an
//! equal AST.

use std::collections::BTreeSet;
use std::fmt;

use bigdecimal::num_bigint::BigInt;
use bigdecimal::BigDecimal;

use super::symbol::{format_decimal, quote_string, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
}

impl BinaryOp {
    pub fn as_str(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Mod => "\\",
            BinaryOp::Pow => "**",
        }
    }
}

/// A possibly non-ground term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Integer(BigInt),
    Real(BigDecimal),
    Constant(String),
    Str(String),
    Compound { name: String, args: Vec<Term> },
    Tuple(Vec<Term>),
    Variable(String),
    /// `_`; every occurrence is a distinct, unnamed variable.
    Anonymous,
    Binary { op: BinaryOp, lhs: Box<Term>, rhs: Box<Term> },
    Negate(Box<Term>),
    /// `@name(args)`, an interpreted string function.
    External { name: String, args: Vec<Term> },
}

impl Term {
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Variable(_) | Term::Anonymous => false,
            Term::Compound { args, .. } | Term::Tuple(args) | Term::External { args, .. } => {
                args.iter().all(Term::is_ground)
            }
            Term::Binary { lhs, rhs, .. } => lhs.is_ground() && rhs.is_ground(),
            Term::Negate(t) => t.is_ground(),
            _ => true,
        }
    }

    /// Named variables occurring anywhere in the term.
    pub fn variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Variable(v) => {
                out.insert(v.clone());
            }
            Term::Compound { args, .. } | Term::Tuple(args) | Term::External { args, .. } => {
                args.iter().for_each(|a| a.variables(out))
            }
            Term::Binary { lhs, rhs, .. } => {
                lhs.variables(out);
                rhs.variables(out);
            }
            Term::Negate(t) => t.variables(out),
            _ => {}
        }
    }

    /// Variables a positive occurrence of this term can bind by matching:
    /// those not buried under arithmetic or an external call.
    pub fn binding_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Variable(v) => {
                out.insert(v.clone());
            }
            Term::Compound { args, .. } | Term::Tuple(args) => {
                args.iter().for_each(|a| a.binding_variables(out))
            }
            _ => {}
        }
    }

    pub fn has_anonymous(&self) -> bool {
        match self {
            Term::Anonymous => true,
            Term::Compound { args, .. } | Term::Tuple(args) | Term::External { args, .. } => {
                args.iter().any(Term::has_anonymous)
            }
            Term::Binary { lhs, rhs, .. } => lhs.has_anonymous() || rhs.has_anonymous(),
            Term::Negate(t) => t.has_anonymous(),
            _ => false,
        }
    }
}

impl From<&Symbol> for Term {
    fn from(symbol: &Symbol) -> Self {
        match symbol {
            Symbol::Integer(i) => Term::Integer(i.clone()),
            Symbol::Real(r) => Term::Real(r.clone()),
            Symbol::Constant(c) => Term::Constant(c.clone()),
            Symbol::Str(s) => Term::Str(s.clone()),
            Symbol::Compound { name, args } => Term::Compound {
                name: name.clone(),
                args: args.iter().map(Term::from).collect(),
            },
            Symbol::Tuple(args) => Term::Tuple(args.iter().map(Term::from).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { predicate: predicate.into(), args }
    }

    pub fn signature(&self) -> (String, usize) {
        (self.predicate.clone(), self.args.len())
    }

    pub fn variables(&self, out: &mut BTreeSet<String>) {
        self.args.iter().for_each(|a| a.variables(out));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, ordering: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Eq => ordering == Equal,
            CmpOp::Ne => ordering != Equal,
            CmpOp::Lt => ordering == Less,
            CmpOp::Le => ordering != Greater,
            CmpOp::Gt => ordering == Greater,
            CmpOp::Ge => ordering != Less,
        }
    }

    /// The operator seen from the other side: `a < b` iff `b > a`.
    pub fn flip(self) -> Self {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
            other => other,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AggregateFunction {
    Count,
    Sum,
    Min,
    Max,
}

impl AggregateFunction {
    pub fn as_str(self) -> &'static str {
        match self {
            AggregateFunction::Count => "#count",
            AggregateFunction::Sum => "#sum",
            AggregateFunction::Min => "#min",
            AggregateFunction::Max => "#max",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AggregateElement {
    /// The first term is the collected value, the rest distinguish elements.
    pub terms: Vec<Term>,
    pub condition: Vec<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Aggregate {
    pub function: AggregateFunction,
    pub elements: Vec<AggregateElement>,
    /// `T op #agg{...}`
    pub left_guard: Option<(Term, CmpOp)>,
    /// `#agg{...} op T`
    pub right_guard: Option<(CmpOp, Term)>,
}

impl Aggregate {
    /// Variables used by the elements (terms and conditions).
    pub fn element_variables(&self, out: &mut BTreeSet<String>) {
        for element in &self.elements {
            element.terms.iter().for_each(|t| t.variables(out));
            element.condition.iter().for_each(|l| l.variables(out));
        }
    }

    pub fn guard_terms(&self) -> impl Iterator<Item = &Term> {
        self.left_guard.iter().map(|(t, _)| t).chain(self.right_guard.iter().map(|(_, t)| t))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LiteralKind {
    Atom(Atom),
    Comparison { lhs: Term, op: CmpOp, rhs: Term },
    Aggregate(Aggregate),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub negated: bool,
    pub kind: LiteralKind,
}

impl Literal {
    pub fn positive(atom: Atom) -> Self {
        Literal { negated: false, kind: LiteralKind::Atom(atom) }
    }

    pub fn negative(atom: Atom) -> Self {
        Literal { negated: true, kind: LiteralKind::Atom(atom) }
    }

    pub fn comparison(lhs: Term, op: CmpOp, rhs: Term) -> Self {
        Literal { negated: false, kind: LiteralKind::Comparison { lhs, op, rhs } }
    }

    pub fn variables(&self, out: &mut BTreeSet<String>) {
        match &self.kind {
            LiteralKind::Atom(a) => a.variables(out),
            LiteralKind::Comparison { lhs, rhs, .. } => {
                lhs.variables(out);
                rhs.variables(out);
            }
            LiteralKind::Aggregate(agg) => {
                agg.element_variables(out);
                agg.guard_terms().for_each(|t| t.variables(out));
            }
        }
    }

    pub fn as_positive_atom(&self) -> Option<&Atom> {
        match (&self.kind, self.negated) {
            (LiteralKind::Atom(a), false) => Some(a),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChoiceElement {
    pub atom: Atom,
    pub condition: Vec<Literal>,
}

/// `lower { elements } upper`; only ever evaluated by an external solver.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Choice {
    pub lower: Option<(Term, CmpOp)>,
    pub elements: Vec<ChoiceElement>,
    pub upper: Option<(CmpOp, Term)>,
}

/// `[weight@level, terms]` of a weak constraint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeakTuple {
    pub weight: Term,
    pub level: Option<Term>,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Head {
    /// Facts and normal rules.
    Atom(Atom),
    Constraint,
    /// `#show term : body.`; a bare number or string is stored as a 1-tuple.
    Show(Term),
    Choice(Choice),
    Weak(WeakTuple),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    Fact,
    Normal,
    Constraint,
    Show,
    Choice,
    WeakConstraint,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn kind(&self) -> RuleKind {
        match &self.head {
            Head::Atom(_) if self.body.is_empty() => RuleKind::Fact,
            Head::Atom(_) => RuleKind::Normal,
            Head::Constraint => RuleKind::Constraint,
            Head::Show(_) => RuleKind::Show,
            Head::Choice(_) => RuleKind::Choice,
            Head::Weak(_) => RuleKind::WeakConstraint,
        }
    }

    /// True for constructs that need answer-set search rather than a fixpoint.
    pub fn needs_search(&self) -> bool {
        matches!(self.kind(), RuleKind::Choice | RuleKind::WeakConstraint)
    }

    pub fn is_fact(&self) -> bool {
        self.kind() == RuleKind::Fact
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn show_rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(|r| matches!(r.head, Head::Show(_)))
    }

    pub fn has_show(&self) -> bool {
        self.show_rules().next().is_some()
    }

    pub fn needs_search(&self) -> bool {
        self.rules.iter().any(Rule::needs_search)
    }

    pub fn has_weak_constraints(&self) -> bool {
        self.rules.iter().any(|r| r.kind() == RuleKind::WeakConstraint)
    }
}

// --- canonical printing ---

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

fn write_operand(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    if matches!(t, Term::Binary { .. }) {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Integer(i) => write!(f, "{i}"),
            Term::Real(r) => write!(f, "real({})", quote_string(&format_decimal(r))),
            Term::Constant(c) => f.write_str(c),
            Term::Str(s) => f.write_str(&quote_string(s)),
            Term::Compound { name, args } => {
                write!(f, "{name}(")?;
                write_list(f, args, ", ")?;
                f.write_str(")")
            }
            Term::Tuple(args) => {
                f.write_str("(")?;
                write_list(f, args, ", ")?;
                if args.len() == 1 {
                    f.write_str(",")?;
                }
                f.write_str(")")
            }
            Term::Variable(v) => f.write_str(v),
            Term::Anonymous => f.write_str("_"),
            Term::Binary { op, lhs, rhs } => {
                write_operand(f, lhs)?;
                write!(f, " {} ", op.as_str())?;
                write_operand(f, rhs)
            }
            Term::Negate(t) => match t.as_ref() {
                Term::Variable(_) | Term::Constant(_) | Term::Compound { .. } | Term::Tuple(_) => {
                    write!(f, "-{t}")
                }
                _ => write!(f, "-({t})"),
            },
            Term::External { name, args } => {
                write!(f, "@{name}(")?;
                write_list(f, args, ", ")?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            write_list(f, &self.args, ", ")?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for AggregateElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.terms, ", ")?;
        if !self.condition.is_empty() {
            f.write_str(" : ")?;
            write_list(f, &self.condition, ", ")?;
        }
        Ok(())
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((t, op)) = &self.left_guard {
            write!(f, "{t} {} ", op.as_str())?;
        }
        write!(f, "{}{{ ", self.function.as_str())?;
        write_list(f, &self.elements, "; ")?;
        f.write_str(" }")?;
        if let Some((op, t)) = &self.right_guard {
            write!(f, " {} {t}", op.as_str())?;
        }
        Ok(())
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        match &self.kind {
            LiteralKind::Atom(a) => write!(f, "{a}"),
            LiteralKind::Comparison { lhs, op, rhs } => write!(f, "{lhs} {} {rhs}", op.as_str()),
            LiteralKind::Aggregate(agg) => write!(f, "{agg}"),
        }
    }
}

impl fmt::Display for ChoiceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.atom)?;
        if !self.condition.is_empty() {
            f.write_str(" : ")?;
            write_list(f, &self.condition, ", ")?;
        }
        Ok(())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let write_body = |f: &mut fmt::Formatter<'_>, sep: &str| -> fmt::Result {
            if !self.body.is_empty() {
                f.write_str(sep)?;
                write_list(f, &self.body, ", ")?;
            }
            Ok(())
        };
        match &self.head {
            Head::Atom(a) => {
                write!(f, "{a}")?;
                write_body(f, " :- ")?;
            }
            Head::Constraint => {
                f.write_str(":-")?;
                write_body(f, " ")?;
            }
            Head::Show(t) => {
                write!(f, "#show {t}")?;
                write_body(f, " : ")?;
            }
            Head::Choice(choice) => {
                if let Some((t, op)) = &choice.lower {
                    write!(f, "{t} {} ", op.as_str())?;
                }
                f.write_str("{ ")?;
                write_list(f, &choice.elements, "; ")?;
                f.write_str(" }")?;
                if let Some((op, t)) = &choice.upper {
                    write!(f, " {} {t}", op.as_str())?;
                }
                write_body(f, " :- ")?;
            }
            Head::Weak(weak) => {
                f.write_str(":~")?;
                write_body(f, " ")?;
                write!(f, ". [{}", weak.weight)?;
                if let Some(level) = &weak.level {
                    write!(f, "@{level}")?;
                }
                for t in &weak.terms {
                    write!(f, ", {t}")?;
                }
                return f.write_str("]");
            }
        }
        f.write_str(".")
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}
