//! In-process evaluation of stratified programs and `#show` projection.

mod aggregate;
mod builtins;
mod engine;
mod stratify;

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

pub use aggregate::evaluate_aggregate;
pub use builtins::{call_builtin, format_fixed, string_format};
pub use engine::apply_binary;
pub use stratify::{stratify, Predicate, Stratification};

use crate::asp::{
    GroundAtom, Head, Interpretation, ParseError, Program, Rule, Symbol, BASE64_PREDICATE,
};
use engine::{eval_term, eval_terms, Bindings, Body, Database, Delta, Solver};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("program is not stratified: {}", .cycle.join(" -> "))]
    NotStratified { cycle: Vec<String> },
    #[error("`{rule}` needs an answer set solver")]
    NeedsSearch { rule: String },
    #[error("constraint `{constraint}` is violated{}", if .bindings.is_empty() { String::new() } else { format!(" with {}", .bindings) })]
    Inconsistent { constraint: String, bindings: String },
    #[error("arithmetic error in {0}")]
    Arithmetic(String),
    #[error("@{name}: {message}")]
    Builtin { name: String, message: String },
    #[error("unknown function @{0}")]
    UnknownBuiltin(String),
    #[error("internal evaluation error: {0}")]
    Internal(String),
}

/// Fixpoint strategy. Both compute the same model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    SemiNaive,
    Naive,
}

/// Predicates whose shown instances configure rendering.
pub const DIRECTIVE_PREDICATES: [&str; 5] = ["sort", "separator", "term_separator", "prefix", "suffix"];

/// A shown `sort(..)`, `separator(..)`, ... object.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Directive {
    pub name: String,
    pub value: Symbol,
}

/// The objects produced by the show directives, deduplicated and in the
/// order they were first produced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProjectedAnswer {
    pub renderables: Vec<Symbol>,
    pub directives: Vec<Directive>,
}

impl ProjectedAnswer {
    pub fn is_empty(&self) -> bool {
        self.renderables.is_empty() && self.directives.is_empty()
    }
}

/// The unique answer set of a stratified program extended with `facts`.
pub fn evaluate(program: &Program, facts: &Interpretation) -> Result<Interpretation, EvalError> {
    evaluate_with(program, facts, Strategy::SemiNaive)
}

pub fn evaluate_with(
    program: &Program,
    facts: &Interpretation,
    strategy: Strategy,
) -> Result<Interpretation, EvalError> {
    if let Some(rule) = program.rules.iter().find(|r| r.needs_search()) {
        return Err(EvalError::NeedsSearch { rule: rule.to_string() });
    }
    let stratification = stratify(program)?;
    let mut db = Database::from_interpretation(facts);
    for layer in &stratification.strata {
        let rules: Vec<&Rule> = program
            .rules
            .iter()
            .filter(|r| matches!(&r.head, Head::Atom(a) if layer.contains(&a.signature())))
            .collect();
        match strategy {
            Strategy::SemiNaive => semi_naive(&rules, layer, &mut db)?,
            Strategy::Naive => naive(&rules, &mut db)?,
        }
    }
    for rule in program.rules.iter().filter(|r| r.head == Head::Constraint) {
        let body = Body::of_rule(rule);
        let mut violation = None;
        Solver { db: &db }.solve(&body, None, &Bindings::new(), &mut |b| {
            if violation.is_none() {
                violation = Some(b.clone());
            }
            Ok(())
        })?;
        if let Some(bindings) = violation {
            let bindings = bindings.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ");
            return Err(EvalError::Inconsistent { constraint: rule.to_string(), bindings });
        }
    }
    Ok(db.to_interpretation())
}

type Derived = Vec<(Predicate, Vec<Symbol>)>;

fn fire(rule: &Rule, body: &Body, delta: Option<&Delta>, db: &Database, out: &mut Derived) -> Result<(), EvalError> {
    let Head::Atom(head) = &rule.head else { return Ok(()) };
    let signature = head.signature();
    Solver { db }.solve(body, delta, &Bindings::new(), &mut |b| {
        let tuple = eval_terms(&head.args, b)?;
        if !db.contains(&signature, &tuple) {
            out.push((signature.clone(), tuple));
        }
        Ok(())
    })
}

fn naive(rules: &[&Rule], db: &mut Database) -> Result<(), EvalError> {
    let bodies: Vec<Body> = rules.iter().map(|r| Body::of_rule(r)).collect();
    loop {
        let mut derived = Derived::new();
        for (rule, body) in rules.iter().zip(&bodies) {
            fire(rule, body, None, db, &mut derived)?;
        }
        let mut changed = false;
        for (p, t) in derived {
            changed |= db.insert(p, t);
        }
        if !changed {
            return Ok(());
        }
    }
}

fn semi_naive(rules: &[&Rule], layer: &BTreeSet<Predicate>, db: &mut Database) -> Result<(), EvalError> {
    let bodies: Vec<Body> = rules.iter().map(|r| Body::of_rule(r)).collect();
    let mut derived = Derived::new();
    for (rule, body) in rules.iter().zip(&bodies) {
        fire(rule, body, None, db, &mut derived)?;
    }
    loop {
        let mut delta = Database::default();
        for (p, t) in derived.drain(..) {
            if db.insert(p.clone(), t.clone()) {
                delta.insert(p, t);
            }
        }
        if delta.is_empty() {
            return Ok(());
        }
        for (rule, body) in rules.iter().zip(&bodies) {
            for (index, literal) in body.literals().iter().enumerate() {
                let Some(atom) = literal.as_positive_atom() else { continue };
                let signature = atom.signature();
                if !layer.contains(&signature) {
                    continue;
                }
                if let Some(relation) = delta.relation(&signature) {
                    fire(rule, body, Some(&Delta { index, relation }), db, &mut derived)?;
                }
            }
        }
        debug_assert!(delta.predicates().all(|(p, _)| layer.contains(p)));
    }
}

/// Evaluates the show directives against an answer set.
pub fn project<'a>(
    answer: &Interpretation,
    show_directives: impl IntoIterator<Item = &'a Rule>,
) -> Result<ProjectedAnswer, EvalError> {
    let mut projected = ProjectedAnswer::default();
    for object in shown_objects(answer, show_directives)? {
        match &object {
            Symbol::Compound { name, args } if args.len() == 1 && DIRECTIVE_PREDICATES.contains(&name.as_str()) => {
                projected.directives.push(Directive { name: name.clone(), value: args[0].clone() })
            }
            Symbol::Compound { name, args } if args.len() == 1 && name == BASE64_PREDICATE => {}
            _ => projected.renderables.push(object),
        }
    }
    Ok(projected)
}

/// All objects produced by the show directives, deduplicated and in
/// production order. Bare numbers and strings become 1-tuples.
pub fn shown_objects<'a>(
    answer: &Interpretation,
    show_directives: impl IntoIterator<Item = &'a Rule>,
) -> Result<Vec<Symbol>, EvalError> {
    let db = Database::from_interpretation(answer);
    let mut seen = HashSet::new();
    let mut objects = Vec::new();
    for rule in show_directives {
        let Head::Show(term) = &rule.head else { continue };
        let body = Body::of_rule(rule);
        Solver { db: &db }.solve(&body, None, &Bindings::new(), &mut |b| {
            let object = match eval_term(term, b)? {
                value @ (Symbol::Integer(_) | Symbol::Real(_) | Symbol::Str(_)) => Symbol::Tuple(vec![value]),
                other => other,
            };
            if seen.insert(object.clone()) {
                objects.push(object);
            }
            Ok(())
        })?;
    }
    Ok(objects)
}

/// Evaluates a query program on `facts` and projects its show directives.
pub fn answer_query(program: &Program, facts: &Interpretation) -> Result<ProjectedAnswer, EvalError> {
    let answer = evaluate(program, facts)?;
    project(&answer, program.show_rules())
}

/// Stores a projected answer as atoms, tuples going under the show predicate.
pub fn shown_atoms(projected: &ProjectedAnswer) -> Interpretation {
    projected
        .renderables
        .iter()
        .map(GroundAtom::from_shown)
        .chain(projected.directives.iter().map(|d| GroundAtom::new(d.name.clone(), vec![d.value.clone()])))
        .collect()
}
