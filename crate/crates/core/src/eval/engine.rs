//! Bottom-up evaluation of stratified rule bodies.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use bigdecimal::num_bigint::BigInt;
use bigdecimal::{BigDecimal, One, Zero};

use super::aggregate::evaluate_aggregate;
use super::builtins::call_builtin;
use super::stratify::Predicate;
use super::EvalError;
use crate::asp::{
    assignment_variable, Aggregate, Atom, BinaryOp, CmpOp, GroundAtom, Head, Interpretation,
    Literal, LiteralKind, Rule, Symbol, Term,
};

pub(crate) type Bindings = BTreeMap<String, Symbol>;
pub(crate) type Relation = BTreeSet<Vec<Symbol>>;

/// Ground atoms indexed by predicate.
#[derive(Clone, Debug, Default)]
pub(crate) struct Database {
    relations: HashMap<Predicate, Relation>,
}

impl Database {
    pub(crate) fn from_interpretation(interpretation: &Interpretation) -> Self {
        let mut db = Database::default();
        for atom in interpretation {
            db.insert((atom.predicate.clone(), atom.arity()), atom.args.clone());
        }
        db
    }

    pub(crate) fn insert(&mut self, predicate: Predicate, tuple: Vec<Symbol>) -> bool {
        self.relations.entry(predicate).or_default().insert(tuple)
    }

    pub(crate) fn contains(&self, predicate: &Predicate, tuple: &[Symbol]) -> bool {
        self.relations.get(predicate).is_some_and(|r| r.contains(tuple))
    }

    pub(crate) fn relation(&self, predicate: &Predicate) -> Option<&Relation> {
        self.relations.get(predicate)
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.relations.values().all(BTreeSet::is_empty)
    }

    pub(crate) fn predicates(&self) -> impl Iterator<Item = (&Predicate, &Relation)> {
        self.relations.iter()
    }

    pub(crate) fn to_interpretation(&self) -> Interpretation {
        self.relations
            .iter()
            .flat_map(|((name, _), tuples)| tuples.iter().map(|t| GroundAtom::new(name.clone(), t.clone())))
            .collect()
    }
}

fn arithmetic_error(op: BinaryOp, a: &Symbol, b: &Symbol, why: &str) -> EvalError {
    EvalError::Arithmetic(format!("`{a} {} {b}`: {why}", op.as_str()))
}

fn decimal(value: &Symbol) -> BigDecimal {
    match value {
        Symbol::Integer(i) => BigDecimal::from(i.clone()),
        Symbol::Real(r) => r.clone(),
        _ => unreachable!("only called on numbers"),
    }
}

fn exponent(op: BinaryOp, a: &Symbol, b: &Symbol, e: &BigInt) -> Result<u32, EvalError> {
    let magnitude = if e < &BigInt::zero() { -e } else { e.clone() };
    u32::try_from(magnitude).map_err(|_| arithmetic_error(op, a, b, "exponent too large"))
}

fn integer_pow(op: BinaryOp, a: &Symbol, b: &Symbol, base: &BigInt, e: &BigInt) -> Result<BigInt, EvalError> {
    if e >= &BigInt::zero() {
        return Ok(num_pow(base, exponent(op, a, b, e)?));
    }
    if base.is_zero() {
        return Err(arithmetic_error(op, a, b, "division by zero"));
    }
    if base.is_one() {
        return Ok(BigInt::one());
    }
    if base == &-BigInt::one() {
        let odd = (e % 2u8) != BigInt::zero();
        return Ok(if odd { -BigInt::one() } else { BigInt::one() });
    }
    Ok(BigInt::zero())
}

fn num_pow(base: &BigInt, e: u32) -> BigInt {
    base.pow(e)
}

/// Applies a binary operator to ground operands. Integer division truncates
/// and the remainder takes the sign of the dividend.
pub fn apply_binary(op: BinaryOp, a: &Symbol, b: &Symbol) -> Result<Symbol, EvalError> {
    if !a.is_number() || !b.is_number() {
        return Err(arithmetic_error(op, a, b, "operands must be numbers"));
    }
    if let (Symbol::Integer(x), Symbol::Integer(y)) = (a, b) {
        return Ok(Symbol::Integer(match op {
            BinaryOp::Add => x + y,
            BinaryOp::Sub => x - y,
            BinaryOp::Mul => x * y,
            BinaryOp::Div | BinaryOp::Mod if y.is_zero() => {
                return Err(arithmetic_error(op, a, b, "division by zero"))
            }
            BinaryOp::Div => x / y,
            BinaryOp::Mod => x % y,
            BinaryOp::Pow => integer_pow(op, a, b, x, y)?,
        }));
    }
    let (x, y) = (decimal(a), decimal(b));
    let value = match op {
        BinaryOp::Add => x + y,
        BinaryOp::Sub => x - y,
        BinaryOp::Mul => x * y,
        BinaryOp::Div if y.is_zero() => return Err(arithmetic_error(op, a, b, "division by zero")),
        BinaryOp::Div => x / y,
        BinaryOp::Mod => return Err(arithmetic_error(op, a, b, "remainder needs integers")),
        BinaryOp::Pow => {
            let Symbol::Integer(e) = b else {
                return Err(arithmetic_error(op, a, b, "exponent must be an integer"));
            };
            let n = exponent(op, a, b, e)?;
            let mut power = BigDecimal::one();
            for _ in 0..n {
                power = (power * &x).normalized();
            }
            if e < &BigInt::zero() {
                if power.is_zero() {
                    return Err(arithmetic_error(op, a, b, "division by zero"));
                }
                BigDecimal::one() / power
            } else {
                power
            }
        }
    };
    Ok(Symbol::real(value))
}

/// Evaluates a term whose variables are all bound.
pub(crate) fn eval_term(term: &Term, bindings: &Bindings) -> Result<Symbol, EvalError> {
    Ok(match term {
        Term::Integer(i) => Symbol::Integer(i.clone()),
        Term::Real(r) => Symbol::real(r.clone()),
        Term::Constant(c) => Symbol::Constant(c.clone()),
        Term::Str(s) => Symbol::Str(s.clone()),
        Term::Compound { name, args } => Symbol::compound(name.clone(), eval_terms(args, bindings)?),
        Term::Tuple(args) => Symbol::Tuple(eval_terms(args, bindings)?),
        Term::Variable(v) => bindings
            .get(v)
            .cloned()
            .ok_or_else(|| EvalError::Internal(format!("variable `{v}` used before it is bound")))?,
        Term::Anonymous => return Err(EvalError::Internal("`_` cannot be evaluated".into())),
        Term::Binary { op, lhs, rhs } => apply_binary(*op, &eval_term(lhs, bindings)?, &eval_term(rhs, bindings)?)?,
        Term::Negate(inner) => match eval_term(inner, bindings)? {
            Symbol::Integer(i) => Symbol::Integer(-i),
            Symbol::Real(r) => Symbol::real(-r),
            other => return Err(EvalError::Arithmetic(format!("`-{other}`: operand must be a number"))),
        },
        Term::External { name, args } => call_builtin(name, &eval_terms(args, bindings)?)?,
    })
}

pub(crate) fn eval_terms(terms: &[Term], bindings: &Bindings) -> Result<Vec<Symbol>, EvalError> {
    terms.iter().map(|t| eval_term(t, bindings)).collect()
}

fn is_bound(term: &Term, bindings: &Bindings) -> bool {
    !term.has_anonymous() && vars(term).iter().all(|v| bindings.contains_key(v))
}

fn vars(term: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    term.variables(&mut out);
    out
}

/// Unifies a pattern with a ground value, extending `bindings`.
fn match_term(pattern: &Term, value: &Symbol, bindings: &mut Bindings) -> Result<bool, EvalError> {
    match pattern {
        Term::Anonymous => Ok(true),
        Term::Variable(v) => match bindings.get(v) {
            Some(bound) => Ok(bound == value),
            None => {
                bindings.insert(v.clone(), value.clone());
                Ok(true)
            }
        },
        Term::Compound { name, args } => match value {
            Symbol::Compound { name: n, args: a } if n == name && a.len() == args.len() => {
                match_all(args, a, bindings)
            }
            _ => Ok(false),
        },
        Term::Tuple(args) => match value {
            Symbol::Tuple(a) if a.len() == args.len() => match_all(args, a, bindings),
            _ => Ok(false),
        },
        other => Ok(&eval_term(other, bindings)? == value),
    }
}

fn match_all(patterns: &[Term], values: &[Symbol], bindings: &mut Bindings) -> Result<bool, EvalError> {
    for (p, v) in patterns.iter().zip(values) {
        if !match_term(p, v, bindings)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A conjunction together with, for each aggregate literal, the element
/// variables shared with the rest of the rule.
pub(crate) struct Body<'a> {
    literals: &'a [Literal],
    globals: Vec<BTreeSet<String>>,
}

impl<'a> Body<'a> {
    pub(crate) fn of_rule(rule: &'a Rule) -> Self {
        let mut head_vars = BTreeSet::new();
        match &rule.head {
            Head::Atom(atom) => atom.variables(&mut head_vars),
            Head::Show(term) => term.variables(&mut head_vars),
            _ => {}
        }
        Self::with_outer(&rule.body, head_vars)
    }

    fn with_outer(literals: &'a [Literal], outer: BTreeSet<String>) -> Self {
        let globals = literals
            .iter()
            .enumerate()
            .map(|(i, literal)| {
                let LiteralKind::Aggregate(agg) = &literal.kind else { return BTreeSet::new() };
                let mut elsewhere = outer.clone();
                for (j, other) in literals.iter().enumerate() {
                    if i != j {
                        other.variables(&mut elsewhere);
                    }
                }
                agg.guard_terms().for_each(|t| t.variables(&mut elsewhere));
                let mut inner = BTreeSet::new();
                agg.element_variables(&mut inner);
                inner.intersection(&elsewhere).cloned().collect()
            })
            .collect();
        Body { literals, globals }
    }

    pub(crate) fn literals(&self) -> &'a [Literal] {
        self.literals
    }
}

/// Restricts the literal at `index` to the tuples of `relation`.
pub(crate) struct Delta<'a> {
    pub index: usize,
    pub relation: &'a Relation,
}

pub(crate) struct Solver<'a> {
    pub db: &'a Database,
}

type Sink<'s> = dyn FnMut(&Bindings) -> Result<(), EvalError> + 's;

impl Solver<'_> {
    /// Calls `sink` once per solution of the body.
    pub(crate) fn solve(
        &self,
        body: &Body,
        delta: Option<&Delta>,
        bindings: &Bindings,
        sink: &mut Sink,
    ) -> Result<(), EvalError> {
        let mut done = vec![false; body.literals.len()];
        self.step(body, delta, &mut done, bindings, sink)
    }

    fn step(
        &self,
        body: &Body,
        delta: Option<&Delta>,
        done: &mut [bool],
        bindings: &Bindings,
        sink: &mut Sink,
    ) -> Result<(), EvalError> {
        let Some(index) = self.pick(body, delta, done, bindings)? else {
            return sink(bindings);
        };
        done[index] = true;
        let result = self.apply(body, index, delta, bindings, &mut |next| self.step(body, delta, done, next, sink));
        done[index] = false;
        result
    }

    fn apply(
        &self,
        body: &Body,
        index: usize,
        delta: Option<&Delta>,
        bindings: &Bindings,
        next: &mut dyn FnMut(&Bindings) -> Result<(), EvalError>,
    ) -> Result<(), EvalError> {
        let literal = &body.literals[index];
        match (&literal.kind, literal.negated) {
            (LiteralKind::Atom(atom), false) => {
                let relation = match delta {
                    Some(d) if d.index == index => Some(d.relation),
                    _ => self.db.relation(&atom.signature()),
                };
                match relation {
                    Some(relation) => match_atom(atom, relation, bindings, &mut |b| next(&b).map(|_| true)),
                    None => Ok(()),
                }
            }
            (LiteralKind::Atom(atom), true) => {
                let mut found = false;
                if let Some(relation) = self.db.relation(&atom.signature()) {
                    match_atom(atom, relation, bindings, &mut |_| {
                        found = true;
                        Ok(false)
                    })?;
                }
                if found {
                    Ok(())
                } else {
                    next(bindings)
                }
            }
            (LiteralKind::Comparison { lhs, op, rhs }, negated) => {
                if !negated && *op == CmpOp::Eq {
                    for (target, source) in [(lhs, rhs), (rhs, lhs)] {
                        if let Term::Variable(v) = target {
                            if !bindings.contains_key(v) {
                                let mut extended = bindings.clone();
                                extended.insert(v.clone(), eval_term(source, bindings)?);
                                return next(&extended);
                            }
                        }
                    }
                }
                let holds = op.holds(eval_term(lhs, bindings)?.cmp(&eval_term(rhs, bindings)?));
                if holds != negated {
                    next(bindings)
                } else {
                    Ok(())
                }
            }
            (LiteralKind::Aggregate(agg), negated) => {
                let start: Bindings = bindings
                    .iter()
                    .filter(|(k, _)| body.globals[index].contains(*k))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                let value = self.aggregate_value(agg, &start)?;
                let mut extended = bindings.clone();
                let mut holds = true;
                let guards = agg
                    .left_guard
                    .iter()
                    .map(|(t, op)| (t, *op, false))
                    .chain(agg.right_guard.iter().map(|(op, t)| (t, *op, true)));
                for (term, op, value_first) in guards {
                    if let (Term::Variable(v), CmpOp::Eq, false) = (term, op, negated) {
                        if !extended.contains_key(v) {
                            match &value {
                                Some(value) => {
                                    extended.insert(v.clone(), value.clone());
                                }
                                None => holds = false,
                            }
                            continue;
                        }
                    }
                    let guard = eval_term(term, &extended)?;
                    holds &= match &value {
                        Some(value) if value_first => op.holds(value.cmp(&guard)),
                        Some(value) => op.holds(guard.cmp(value)),
                        None => false,
                    };
                }
                if holds != negated {
                    next(&extended)
                } else {
                    Ok(())
                }
            }
        }
    }

    fn aggregate_value(&self, agg: &Aggregate, start: &Bindings) -> Result<Option<Symbol>, EvalError> {
        let mut tuples = BTreeSet::new();
        for element in &agg.elements {
            let mut outer = BTreeSet::new();
            element.terms.iter().for_each(|t| t.variables(&mut outer));
            let body = Body::with_outer(&element.condition, outer);
            self.solve(&body, None, start, &mut |b| {
                tuples.insert(eval_terms(&element.terms, b)?);
                Ok(())
            })?;
        }
        evaluate_aggregate(agg.function, &tuples)
    }

    /// Next literal to process: ready filters and assignments first, then
    /// the delta atom, then the first positive atom that can be matched.
    fn pick(
        &self,
        body: &Body,
        delta: Option<&Delta>,
        done: &[bool],
        bindings: &Bindings,
    ) -> Result<Option<usize>, EvalError> {
        let pending: Vec<usize> = (0..body.literals.len()).filter(|&i| !done[i]).collect();
        if pending.is_empty() {
            return Ok(None);
        }
        let bound = |t: &Term| is_bound(t, bindings);
        for &i in &pending {
            let literal = &body.literals[i];
            let ready = match &literal.kind {
                LiteralKind::Atom(atom) if literal.negated => {
                    atom.args.iter().all(|a| vars(a).iter().all(|v| bindings.contains_key(v)))
                }
                LiteralKind::Atom(_) => false,
                LiteralKind::Comparison { lhs, op, rhs } => {
                    (bound(lhs) && bound(rhs))
                        || (!literal.negated
                            && *op == CmpOp::Eq
                            && ((matches!(lhs, Term::Variable(_)) && bound(rhs))
                                || (matches!(rhs, Term::Variable(_)) && bound(lhs))))
                }
                LiteralKind::Aggregate(agg) => {
                    let assigned = if literal.negated { None } else { assignment_variable(agg) };
                    body.globals[i].iter().all(|v| bindings.contains_key(v))
                        && agg.guard_terms().all(|t| {
                            bound(t) || matches!((t, assigned), (Term::Variable(v), Some(a)) if v == a)
                        })
                }
            };
            if ready {
                return Ok(Some(i));
            }
        }
        if let Some(d) = delta {
            if !done[d.index] {
                return Ok(Some(d.index));
            }
        }
        for &i in &pending {
            if let Some(atom) = body.literals[i].as_positive_atom() {
                let matchable = atom.args.iter().all(|a| {
                    let mut binding = BTreeSet::new();
                    a.binding_variables(&mut binding);
                    vars(a).iter().all(|v| binding.contains(v) || bindings.contains_key(v))
                });
                if matchable {
                    return Ok(Some(i));
                }
            }
        }
        let rest: Vec<String> = pending.iter().map(|&i| body.literals[i].to_string()).collect();
        Err(EvalError::Internal(format!("cannot order body literals: {}", rest.join(", "))))
    }
}

/// Matches `atom` against `relation`; `f` returns `false` to stop early.
fn match_atom(
    atom: &Atom,
    relation: &Relation,
    bindings: &Bindings,
    f: &mut dyn FnMut(Bindings) -> Result<bool, EvalError>,
) -> Result<(), EvalError> {
    let mut prefix = Vec::new();
    for arg in &atom.args {
        if !is_bound(arg, bindings) {
            break;
        }
        prefix.push(eval_term(arg, bindings)?);
    }
    let full = prefix.len() == atom.args.len();
    for tuple in relation.range(prefix.clone()..) {
        if !tuple.starts_with(&prefix) {
            break;
        }
        if tuple.len() != atom.args.len() {
            continue;
        }
        let mut extended = bindings.clone();
        if match_all(&atom.args[prefix.len()..], &tuple[prefix.len()..], &mut extended)? && !f(extended)? {
            break;
        }
        if full {
            break;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Symbol {
        Symbol::int(n)
    }

    #[test]
    fn integer_arithmetic_truncates() {
        let op = |op, a: i64, b: i64| apply_binary(op, &int(a), &int(b)).unwrap();
        assert_eq!(op(BinaryOp::Div, -7, 2), int(-3));
        assert_eq!(op(BinaryOp::Mod, -7, 2), int(-1));
        assert_eq!(op(BinaryOp::Mod, 7, -2), int(1));
        assert_eq!(op(BinaryOp::Pow, 2, 3), int(8));
        assert_eq!(op(BinaryOp::Pow, 2, -1), int(0));
        assert_eq!(op(BinaryOp::Pow, -1, -3), int(-1));
        assert!(apply_binary(BinaryOp::Div, &int(1), &int(0)).is_err());
        assert!(apply_binary(BinaryOp::Add, &int(1), &Symbol::constant("a")).is_err());
    }

    #[test]
    fn reals_promote() {
        let half = Symbol::real("0.5".parse().unwrap());
        assert_eq!(apply_binary(BinaryOp::Add, &int(1), &half).unwrap(), Symbol::real("1.5".parse().unwrap()));
        assert_eq!(apply_binary(BinaryOp::Pow, &half, &int(-2)).unwrap(), Symbol::real("4".parse().unwrap()));
    }
}
