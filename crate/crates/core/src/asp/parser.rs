//! Recursive-descent parser for the supported ASP fragment.

use super::ast::*;
use super::lexer::{tokenize, Pos, Tok, Token};
use super::symbol::{parse_decimal, Symbol};
use super::{safety, ParseError};

/// Predicate used to store shown tuples as atoms, e.g. `(1,a)` as `__show__(1,a)`.
pub const SHOW_PREDICATE: &str = "__show__";

/// Parses a program and checks every rule for safety.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let rules = parse_located(text)?.into_iter().map(|(rule, _)| rule).collect();
    Ok(Program { rules })
}

/// Rules paired with the line they start on.
pub(crate) fn parse_located(text: &str) -> Result<Vec<(Rule, usize)>, ParseError> {
    let mut parser = Parser::new(text)?;
    let mut rules = Vec::new();
    while parser.peek() != &Tok::Eof {
        let line = parser.pos().line;
        let rule = parser.statement()?;
        if let Err(variable) = safety::check_rule(&rule) {
            return Err(ParseError::Unsafe { variable, rule: rule.to_string(), line });
        }
        rules.push((rule, line));
    }
    Ok(rules)
}

/// Parses a single ground term such as `f(1,"x")` or `(1,a)`.
pub fn parse_symbol(text: &str) -> Result<Symbol, ParseError> {
    let mut parser = Parser::new(text)?;
    let pos = parser.pos();
    let term = parser.term()?;
    parser.expect(Tok::Eof)?;
    term_to_symbol(&term).ok_or_else(|| ParseError::Syntax {
        line: pos.line,
        column: pos.column,
        expected: vec!["ground term".into()],
        found: term.to_string(),
    })
}

/// Converts a ground term without arithmetic or externals into a symbol.
pub fn term_to_symbol(term: &Term) -> Option<Symbol> {
    Some(match term {
        Term::Integer(i) => Symbol::Integer(i.clone()),
        Term::Real(r) => Symbol::real(r.clone()),
        Term::Constant(c) => Symbol::Constant(c.clone()),
        Term::Str(s) => Symbol::Str(s.clone()),
        Term::Compound { name, args } => {
            Symbol::compound(name.clone(), args.iter().map(term_to_symbol).collect::<Option<_>>()?)
        }
        Term::Tuple(args) => Symbol::Tuple(args.iter().map(term_to_symbol).collect::<Option<_>>()?),
        _ => return None,
    })
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

fn aggregate_function(name: &str) -> Option<AggregateFunction> {
    Some(match name {
        "count" => AggregateFunction::Count,
        "sum" => AggregateFunction::Sum,
        "min" => AggregateFunction::Min,
        "max" => AggregateFunction::Max,
        _ => return None,
    })
}

fn cmp_op(op: &str) -> CmpOp {
    match op {
        "=" => CmpOp::Eq,
        "!=" => CmpOp::Ne,
        "<" => CmpOp::Lt,
        "<=" => CmpOp::Le,
        ">" => CmpOp::Gt,
        _ => CmpOp::Ge,
    }
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser { tokens: tokenize(text)?, at: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.at + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    fn next(&mut self) -> Tok {
        let tok = self.tokens[self.at].tok.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn unexpected<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let pos = self.pos();
        Err(ParseError::Syntax {
            line: pos.line,
            column: pos.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn unsupported<T>(&self, construct: &str) -> Result<T, ParseError> {
        let pos = self.pos();
        Err(ParseError::Unsupported { line: pos.line, column: pos.column, construct: construct.into() })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.unexpected(&[&tok.to_string()])
        }
    }

    fn statement(&mut self) -> Result<Rule, ParseError> {
        match self.peek().clone() {
            Tok::Directive(d) if d == "show" => {
                self.next();
                self.show_directive()
            }
            Tok::Directive(d) if aggregate_function(&d).is_none() => {
                self.unsupported(&format!("#{d} directive"))
            }
            Tok::If => {
                self.next();
                let body = self.body()?;
                self.expect(Tok::Dot)?;
                Ok(Rule { head: Head::Constraint, body })
            }
            Tok::WeakIf => {
                self.next();
                let body = self.body()?;
                self.expect(Tok::Dot)?;
                let weak = self.weak_tuple()?;
                Ok(Rule { head: Head::Weak(weak), body })
            }
            Tok::LBrace => {
                let choice = self.choice(None)?;
                self.rule_tail(Head::Choice(choice))
            }
            _ => {
                let start = self.pos();
                let term = self.term()?;
                if let Tok::Cmp(op) = *self.peek() {
                    if self.peek_at(1) == &Tok::LBrace {
                        self.next();
                        let choice = self.choice(Some((term, cmp_op(op))))?;
                        return self.rule_tail(Head::Choice(choice));
                    }
                }
                let atom = self.head_atom(term, start)?;
                if matches!(self.peek(), Tok::Pipe | Tok::Semicolon) {
                    return self.unsupported("disjunctive head");
                }
                self.rule_tail(Head::Atom(atom))
            }
        }
    }

    fn rule_tail(&mut self, head: Head) -> Result<Rule, ParseError> {
        let body = if self.eat(&Tok::If) { self.body()? } else { Vec::new() };
        self.expect(Tok::Dot)?;
        Ok(Rule { head, body })
    }

    fn head_atom(&self, term: Term, start: Pos) -> Result<Atom, ParseError> {
        match term {
            Term::Tuple(args) if !args.is_empty() => Ok(Atom::new(SHOW_PREDICATE, args)),
            other => self.term_to_atom(other, start),
        }
    }

    fn term_to_atom(&self, term: Term, start: Pos) -> Result<Atom, ParseError> {
        match term {
            Term::Constant(name) => Ok(Atom::new(name, Vec::new())),
            Term::Compound { name, args } => Ok(Atom::new(name, args)),
            Term::Negate(inner) if matches!(*inner, Term::Constant(_) | Term::Compound { .. }) => {
                Err(ParseError::Unsupported {
                    line: start.line,
                    column: start.column,
                    construct: "classical negation".into(),
                })
            }
            other => Err(ParseError::Syntax {
                line: start.line,
                column: start.column,
                expected: vec!["atom".into()],
                found: format!("`{other}`"),
            }),
        }
    }

    fn show_directive(&mut self) -> Result<Rule, ParseError> {
        if self.peek() == &Tok::Dot {
            return self.unsupported("`#show.`");
        }
        if let (Tok::Ident(name), Tok::Slash) = (self.peek(), self.peek_at(1)) {
            let name = name.clone();
            self.next();
            self.next();
            let Tok::Integer(arity) = self.peek() else { return self.unexpected(&["arity"]) };
            let arity = usize::try_from(arity.clone()).or_else(|_| self.unsupported("this arity"))?;
            self.next();
            self.expect(Tok::Dot)?;
            let args: Vec<Term> = (1..=arity).map(|i| Term::Variable(format!("X{i}"))).collect();
            let atom = Atom::new(name.clone(), args.clone());
            let term = if arity == 0 { Term::Constant(name) } else { Term::Compound { name, args } };
            return Ok(Rule { head: Head::Show(term), body: vec![Literal::positive(atom)] });
        }
        let term = match self.term()? {
            t @ (Term::Integer(_) | Term::Real(_) | Term::Str(_)) => Term::Tuple(vec![t]),
            t => t,
        };
        let body = if self.eat(&Tok::Colon) { self.body()? } else { Vec::new() };
        self.expect(Tok::Dot)?;
        Ok(Rule { head: Head::Show(term), body })
    }

    fn weak_tuple(&mut self) -> Result<WeakTuple, ParseError> {
        self.expect(Tok::LBracket)?;
        let weight = self.term()?;
        let level = if self.eat(&Tok::At) { Some(self.term()?) } else { None };
        let mut terms = Vec::new();
        while self.eat(&Tok::Comma) {
            terms.push(self.term()?);
        }
        self.expect(Tok::RBracket)?;
        Ok(WeakTuple { weight, level, terms })
    }

    fn choice(&mut self, lower: Option<(Term, CmpOp)>) -> Result<Choice, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut elements = Vec::new();
        if self.peek() != &Tok::RBrace {
            loop {
                let start = self.pos();
                let term = self.term()?;
                let atom = self.term_to_atom(term, start)?;
                let condition = if self.eat(&Tok::Colon) { self.literals()? } else { Vec::new() };
                elements.push(ChoiceElement { atom, condition });
                if !self.eat(&Tok::Semicolon) {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace)?;
        let upper = match *self.peek() {
            Tok::Cmp(op) => {
                self.next();
                Some((cmp_op(op), self.term()?))
            }
            _ => None,
        };
        Ok(Choice { lower, elements, upper })
    }

    fn body(&mut self) -> Result<Vec<Literal>, ParseError> {
        let body = self.literals()?;
        if self.peek() == &Tok::Semicolon {
            return self.unsupported("`;` in rule bodies");
        }
        Ok(body)
    }

    fn literals(&mut self) -> Result<Vec<Literal>, ParseError> {
        let mut out = vec![self.literal()?];
        while self.eat(&Tok::Comma) {
            out.push(self.literal()?);
        }
        Ok(out)
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let negated = self.eat(&Tok::Not);
        if negated && self.peek() == &Tok::Not {
            return self.unsupported("double negation");
        }
        if let Tok::Directive(d) = self.peek().clone() {
            let Some(function) = aggregate_function(&d) else {
                return self.unexpected(&["literal"]);
            };
            self.next();
            let aggregate = self.aggregate(function, None)?;
            return Ok(Literal { negated, kind: LiteralKind::Aggregate(aggregate) });
        }
        let start = self.pos();
        let lhs = self.term()?;
        if let Tok::Cmp(op) = *self.peek() {
            self.next();
            let op = cmp_op(op);
            if let Tok::Directive(d) = self.peek().clone() {
                if let Some(function) = aggregate_function(&d) {
                    self.next();
                    let aggregate = self.aggregate(function, Some((lhs, op)))?;
                    return Ok(Literal { negated, kind: LiteralKind::Aggregate(aggregate) });
                }
            }
            if negated {
                return Err(ParseError::Unsupported {
                    line: start.line,
                    column: start.column,
                    construct: "negated comparison".into(),
                });
            }
            let rhs = self.term()?;
            return Ok(Literal::comparison(lhs, op, rhs));
        }
        let atom = self.term_to_atom(lhs, start)?;
        Ok(Literal { negated, kind: LiteralKind::Atom(atom) })
    }

    fn aggregate(
        &mut self,
        function: AggregateFunction,
        left_guard: Option<(Term, CmpOp)>,
    ) -> Result<Aggregate, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut elements = Vec::new();
        if self.peek() != &Tok::RBrace {
            loop {
                let mut terms = vec![self.term()?];
                while self.eat(&Tok::Comma) {
                    terms.push(self.term()?);
                }
                let condition = if self.eat(&Tok::Colon) { self.literals()? } else { Vec::new() };
                elements.push(AggregateElement { terms, condition });
                if !self.eat(&Tok::Semicolon) {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace)?;
        let right_guard = match *self.peek() {
            Tok::Cmp(op) => {
                self.next();
                Some((cmp_op(op), self.term()?))
            }
            _ => None,
        };
        Ok(Aggregate { function, elements, left_guard, right_guard })
    }

    pub(crate) fn term(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.product()?;
            lhs = Term::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
    }

    fn product(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.power()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                Tok::Backslash => BinaryOp::Mod,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.power()?;
            lhs = Term::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
    }

    fn power(&mut self) -> Result<Term, ParseError> {
        let base = self.unary()?;
        if self.eat(&Tok::StarStar) {
            let exponent = self.power()?;
            return Ok(Term::Binary { op: BinaryOp::Pow, lhs: Box::new(base), rhs: Box::new(exponent) });
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        if self.eat(&Tok::Minus) {
            return Ok(match self.unary()? {
                Term::Integer(i) => Term::Integer(-i),
                Term::Real(r) => Term::Real(-r),
                other => Term::Negate(Box::new(other)),
            });
        }
        let term = self.primary()?;
        if self.peek() == &Tok::DotDot {
            return self.unsupported("interval term");
        }
        Ok(term)
    }

    fn arguments(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            match self.peek() {
                Tok::Comma => {
                    self.next();
                }
                Tok::RParen => {
                    self.next();
                    return Ok(args);
                }
                Tok::Semicolon => return self.unsupported("pooling"),
                _ => return self.unexpected(&["`,`", "`)`"]),
            }
        }
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.next() {
            Tok::Integer(i) => Ok(Term::Integer(i)),
            Tok::Str(s) => Ok(Term::Str(s)),
            Tok::Variable(v) => Ok(Term::Variable(v)),
            Tok::Anonymous => Ok(Term::Anonymous),
            Tok::Ident(name) => {
                if !self.eat(&Tok::LParen) {
                    return Ok(Term::Constant(name));
                }
                let args = self.arguments()?;
                if name == "real" {
                    if let [Term::Str(text)] = args.as_slice() {
                        return match parse_decimal(text) {
                            Some(value) => Ok(Term::Real(value.normalized())),
                            None => Err(ParseError::InvalidReal {
                                line: pos.line,
                                column: pos.column,
                                text: text.clone(),
                            }),
                        };
                    }
                }
                if args.is_empty() {
                    return Ok(Term::Constant(name));
                }
                Ok(Term::Compound { name, args })
            }
            Tok::External(name) => {
                self.expect(Tok::LParen)?;
                let args = self.arguments()?;
                Ok(Term::External { name, args })
            }
            Tok::LParen => self.parenthesized(),
            Tok::Pipe => {
                self.at -= 1;
                self.unsupported("absolute value")
            }
            _ => {
                self.at -= 1;
                self.unexpected(&["term"])
            }
        }
    }

    fn parenthesized(&mut self) -> Result<Term, ParseError> {
        if self.eat(&Tok::RParen) {
            return Ok(Term::Tuple(Vec::new()));
        }
        let first = self.term()?;
        if self.eat(&Tok::RParen) {
            return Ok(first);
        }
        let mut items = vec![first];
        loop {
            match self.peek() {
                Tok::Comma => {
                    self.next();
                    if self.eat(&Tok::RParen) {
                        return Ok(Term::Tuple(items));
                    }
                    items.push(self.term()?);
                }
                Tok::RParen => {
                    self.next();
                    return Ok(Term::Tuple(items));
                }
                Tok::Semicolon => return self.unsupported("pooling"),
                _ => return self.unexpected(&["`,`", "`)`"]),
            }
        }
    }
}
