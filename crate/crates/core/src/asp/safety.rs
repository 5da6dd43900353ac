//! Rule safety: every variable must be bound by a positive body atom or by
//! an assignment whose right-hand side is already bound.

use std::collections::BTreeSet;

use super::ast::*;

type Vars = BTreeSet<String>;

fn vars_of(term: &Term) -> Vars {
    let mut out = Vars::new();
    term.variables(&mut out);
    out
}

/// Variables bound by a conjunction, starting from `bound`.
pub(crate) fn bound_by(literals: &[Literal], mut bound: Vars) -> Vars {
    for literal in literals {
        if let Some(atom) = literal.as_positive_atom() {
            atom.args.iter().for_each(|a| a.binding_variables(&mut bound));
        }
    }
    loop {
        let before = bound.len();
        for literal in literals {
            if literal.negated {
                continue;
            }
            match &literal.kind {
                LiteralKind::Comparison { lhs, op: CmpOp::Eq, rhs } => {
                    for (target, source) in [(lhs, rhs), (rhs, lhs)] {
                        if let Term::Variable(v) = target {
                            if vars_of(source).is_subset(&bound) {
                                bound.insert(v.clone());
                            }
                        }
                    }
                }
                LiteralKind::Aggregate(agg) => {
                    if let Some(v) = assignment_variable(agg) {
                        if aggregate_unbound(agg, &bound).is_none() {
                            bound.insert(v.to_string());
                        }
                    }
                }
                _ => {}
            }
        }
        if bound.len() == before {
            return bound;
        }
    }
}

/// `V = #agg{...}` or `#agg{...} = V`.
pub(crate) fn assignment_variable(agg: &Aggregate) -> Option<&str> {
    match (&agg.left_guard, &agg.right_guard) {
        (Some((Term::Variable(v), CmpOp::Eq)), _) | (_, Some((CmpOp::Eq, Term::Variable(v)))) => Some(v),
        _ => None,
    }
}

/// First element variable left unbound once each element condition is applied.
fn aggregate_unbound(agg: &Aggregate, bound: &Vars) -> Option<String> {
    for element in &agg.elements {
        let local = bound_by(&element.condition, bound.clone());
        let mut needed = Vars::new();
        element.terms.iter().for_each(|t| t.variables(&mut needed));
        element.condition.iter().for_each(|l| l.variables(&mut needed));
        if let Some(v) = needed.difference(&local).next() {
            return Some(v.clone());
        }
        if let Some(v) = literals_unbound(&element.condition, &local) {
            return Some(v);
        }
    }
    None
}

fn literals_unbound(literals: &[Literal], bound: &Vars) -> Option<String> {
    for literal in literals {
        let mut used = Vars::new();
        match &literal.kind {
            LiteralKind::Aggregate(agg) => {
                if let Some(v) = aggregate_unbound(agg, bound) {
                    return Some(v);
                }
                agg.guard_terms().for_each(|t| t.variables(&mut used));
            }
            _ => literal.variables(&mut used),
        }
        if let Some(v) = used.difference(bound).next() {
            return Some(v.clone());
        }
    }
    None
}

/// Returns the name of the first unsafe variable, if any.
pub fn check_rule(rule: &Rule) -> Result<(), String> {
    let bound = bound_by(&rule.body, Vars::new());
    if let Some(v) = literals_unbound(&rule.body, &bound) {
        return Err(v);
    }
    let mut head_vars = Vars::new();
    match &rule.head {
        Head::Atom(atom) => {
            if atom.args.iter().any(Term::has_anonymous) {
                return Err("_".into());
            }
            atom.variables(&mut head_vars);
        }
        Head::Show(term) => {
            if term.has_anonymous() {
                return Err("_".into());
            }
            term.variables(&mut head_vars);
        }
        Head::Constraint => {}
        Head::Choice(choice) => {
            for element in &choice.elements {
                let local = bound_by(&element.condition, bound.clone());
                let mut needed = Vars::new();
                element.atom.variables(&mut needed);
                element.condition.iter().for_each(|l| l.variables(&mut needed));
                if let Some(v) = needed.difference(&local).next() {
                    return Err(v.clone());
                }
            }
            if let Some((t, _)) = &choice.lower {
                t.variables(&mut head_vars);
            }
            if let Some((_, t)) = &choice.upper {
                t.variables(&mut head_vars);
            }
        }
        Head::Weak(weak) => {
            weak.weight.variables(&mut head_vars);
            weak.level.iter().for_each(|l| l.variables(&mut head_vars));
            weak.terms.iter().for_each(|t| t.variables(&mut head_vars));
        }
    }
    match head_vars.difference(&bound).next() {
        Some(v) => Err(v.clone()),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use crate::asp::{parse_program, ParseError};

    fn unsafe_var(text: &str) -> Option<String> {
        match parse_program(text) {
            Ok(_) => None,
            Err(ParseError::Unsafe { variable, .. }) => Some(variable),
            Err(other) => panic!("{other}"),
        }
    }

    #[test]
    fn assignments_bind() {
        assert_eq!(unsafe_var("p(Y) :- q(X), Y = X + 1."), None);
        assert_eq!(unsafe_var("p(Y) :- Y = X + 1, q(X)."), None);
        assert_eq!(unsafe_var("p(S) :- S = #sum{C, N : c(N, C)}."), None);
        assert_eq!(unsafe_var("#show (I + 1, N) : in(N), I = #count{M : in(M), N > M}."), None);
    }

    #[test]
    fn unbound_variables_are_reported() {
        assert_eq!(unsafe_var("p(X) :- not q(X)."), Some("X".into()));
        assert_eq!(unsafe_var("p :- X < 3."), Some("X".into()));
        assert_eq!(unsafe_var("p :- #count{X : q(Y)} > 1."), Some("X".into()));
        assert_eq!(unsafe_var("p(Y) :- q(X), Y > X."), Some("Y".into()));
        assert_eq!(unsafe_var("p(_) :- q(X)."), Some("_".into()));
        assert_eq!(unsafe_var("p(X+1) :- q(X)."), None);
        // arithmetic arguments do not bind
        assert_eq!(unsafe_var("p :- q(X+1)."), Some("X".into()));
    }

    #[test]
    fn anonymous_in_negation_is_fine() {
        assert_eq!(unsafe_var("p(X) :- q(X), not r(X, _)."), None);
    }
}
