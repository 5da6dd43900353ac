//! Mustache templates whose queries are ASP programs.

mod lower;
mod render;
mod tokenize;

use thiserror::Error;

pub use lower::lower_strings;
pub use render::{render_projection, RenderDirectives, SortKey};
pub use tokenize::{position, tokenize, Segment, SegmentKind};

use crate::asp::{parse_program, Interpretation, ParseError, Program, Symbol};
use crate::eval::{answer_query, project, Directive, EvalError, ProjectedAnswer};
use crate::solver::{solver_input, SolverClient, SolverError};

/// Stage limit used when none is given.
pub const DEFAULT_MAX_STAGES: usize = 10;

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("{0}")]
    Lowering(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("the query has no answer set")]
    NoAnswerSet,
    #[error("{0}")]
    Render(String),
}

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("query at {line}:{column}: {source}")]
    Query {
        line: usize,
        column: usize,
        #[source]
        source: QueryError,
    },
    #[error("Mustache expressions remain after {stages} stages")]
    NoConvergence { stages: usize },
}

impl TemplateError {
    /// Whether the failure comes from a missing external solver.
    pub fn needs_solver(&self) -> bool {
        matches!(
            self,
            TemplateError::Query { source: QueryError::Eval(EvalError::NeedsSearch { .. }), .. }
                | TemplateError::Query { source: QueryError::Solver(SolverError::NotConfigured), .. }
        )
    }
}

/// Show objects collected by persistent queries, prepended to the
/// projection of every later query until `{{-}}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PersistentArray {
    pub renderables: Vec<Symbol>,
    pub directives: Vec<Directive>,
}

impl PersistentArray {
    pub fn is_empty(&self) -> bool {
        self.renderables.is_empty() && self.directives.is_empty()
    }

    pub fn clear(&mut self) {
        *self = PersistentArray::default();
    }

    fn extend(&mut self, projected: ProjectedAnswer) {
        for object in projected.renderables {
            if !self.renderables.contains(&object) {
                self.renderables.push(object);
            }
        }
        for directive in projected.directives {
            if !self.directives.contains(&directive) {
                self.directives.push(directive);
            }
        }
    }

    /// Prints `local` preceded by the persistent entries.
    fn render(&self, local: &ProjectedAnswer) -> Result<String, String> {
        let mut objects = self.renderables.clone();
        for object in &local.renderables {
            if !objects.contains(object) {
                objects.push(object.clone());
            }
        }
        let directives = RenderDirectives::from_directives(
            self.directives.iter().map(|d| (d, true)).chain(local.directives.iter().map(|d| (d, false))),
        )?;
        render_projection(&objects, &directives)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpandOptions {
    pub multi_stage: bool,
    pub max_stages: usize,
    /// Used for queries outside the stratified fragment.
    pub solver: Option<SolverClient>,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        ExpandOptions { multi_stage: false, max_stages: DEFAULT_MAX_STAGES, solver: None }
    }
}

impl ExpandOptions {
    pub fn multi_stage() -> Self {
        ExpandOptions { multi_stage: true, ..Default::default() }
    }
}

/// Result of a full expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub text: String,
    /// Passes that found Mustache expressions, at least one.
    pub stages: usize,
}

/// Program text of a query: strings lowered and the shortcut form expanded.
pub fn query_program(program: &str, shortcut: bool) -> Result<String, String> {
    let lowered = lower_strings(program).map_err(|e| e.to_string())?;
    if !shortcut {
        return Ok(lowered);
    }
    let body = lowered.trim();
    Ok(format!("#show {}.", body.strip_suffix('.').unwrap_or(body)))
}

/// Evaluates one query program against `interpretation`.
pub fn evaluate_query(
    program: &Program,
    interpretation: &Interpretation,
    solver: Option<&SolverClient>,
) -> Result<ProjectedAnswer, QueryError> {
    match answer_query(program, interpretation) {
        Err(EvalError::NeedsSearch { .. } | EvalError::NotStratified { .. }) if solver.is_some() => {
            let solver = solver.expect("checked above");
            let models = solver.solve(&solver_input(program, interpretation), 2, false)?;
            let first = models.first().ok_or(QueryError::NoAnswerSet)?;
            if models.len() > 1 {
                log::warn!("query has several answer sets; using the first one");
            }
            Ok(project(&first.atoms, program.show_rules())?)
        }
        Err(EvalError::Inconsistent { .. }) => Err(QueryError::NoAnswerSet),
        other => Ok(other?),
    }
}

fn run_query(
    program: &str,
    shortcut: bool,
    interpretation: &Interpretation,
    solver: Option<&SolverClient>,
) -> Result<ProjectedAnswer, QueryError> {
    let text = query_program(program, shortcut).map_err(QueryError::Lowering)?;
    let program = parse_program(&text)?;
    evaluate_query(&program, interpretation, solver)
}

/// One pass over the template: queries are replaced by their rendering.
pub fn expand_once(
    template: &str,
    interpretation: &Interpretation,
    state: &mut PersistentArray,
    solver: Option<&SolverClient>,
) -> Result<String, TemplateError> {
    let mut out = String::with_capacity(template.len());
    for segment in tokenize(template)? {
        let at = |source: QueryError| {
            let (line, column) = position(template, segment.start);
            TemplateError::Query { line, column, source }
        };
        match &segment.kind {
            SegmentKind::Text(text) => out.push_str(text),
            SegmentKind::Reset => state.clear(),
            SegmentKind::Query { program, shortcut } => {
                let projected = run_query(program, *shortcut, interpretation, solver).map_err(at)?;
                out.push_str(&state.render(&projected).map_err(|m| at(QueryError::Render(m)))?);
            }
            SegmentKind::PersistQuery { program, shortcut } => {
                let projected = run_query(program, *shortcut, interpretation, solver).map_err(at)?;
                state.extend(projected);
            }
        }
    }
    Ok(out)
}

/// Expands a template, repeating passes in multi-stage mode until no
/// expressions remain.
pub fn expand_stages(
    template: &str,
    interpretation: &Interpretation,
    options: &ExpandOptions,
) -> Result<Expansion, TemplateError> {
    let solver = options.solver.as_ref();
    if !options.multi_stage {
        let text = expand_once(template, interpretation, &mut PersistentArray::default(), solver)?;
        return Ok(Expansion { text, stages: 1 });
    }
    let mut text = template.to_string();
    let mut stages = 0;
    loop {
        if !tokenize(&text)?.iter().any(Segment::is_expression) {
            return Ok(Expansion { text, stages: stages.max(1) });
        }
        if stages == options.max_stages.max(1) {
            return Err(TemplateError::NoConvergence { stages });
        }
        let next = expand_once(&text, interpretation, &mut PersistentArray::default(), solver)?;
        stages += 1;
        if next == text {
            return Ok(Expansion { text, stages });
        }
        text = next;
    }
}

/// [`expand_stages`] without the stage count.
pub fn expand(template: &str, interpretation: &Interpretation, options: &ExpandOptions) -> Result<String, TemplateError> {
    expand_stages(template, interpretation, options).map(|e| e.text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asp::parse_facts;

    fn facts(text: &str) -> Interpretation {
        parse_facts(text).unwrap()
    }

    fn single(template: &str, interpretation: &str) -> String {
        expand(template, &facts(interpretation), &ExpandOptions::default()).unwrap()
    }

    #[test]
    fn persistent_separator() {
        assert_eq!(single(r#"{{+ separator(",\n") }}X{{= N : node(N) }}"#, "node(a). node(b)."), "Xa,\nb");
    }

    #[test]
    fn reset_clears_persistent_entries() {
        let out = single("{{+ separator(\"-\") }}{{= N : n(N) }} {{-}}{{= N : n(N) }}", "n(1). n(2).");
        assert_eq!(out, "1-2 1\n2");
    }

    #[test]
    fn persistent_renderables_are_prepended() {
        assert_eq!(single("{{+ \"head\" }}{{= N : n(N) }}", "n(1)."), "1\nhead");
        assert_eq!(single("{{+ sort(-1) }}{{+ \"head\" }}{{= N : n(N) }}", "n(1)."), "head\n1");
    }

    #[test]
    fn empty_projection_renders_nothing() {
        assert_eq!(single("[{{= \"out\" : not in(a) }}]", "in(a)."), "[]");
    }

    #[test]
    fn shortcut_matches_long_form() {
        let i = "size(3).";
        assert_eq!(single("{{= K : size(K) }}", i), single("{{ #show K : size(K). }}", i));
    }

    #[test]
    fn errors_point_at_the_query() {
        let err = expand("ok\n {{= X : }}", &facts(""), &ExpandOptions::default()).unwrap_err();
        assert!(matches!(err, TemplateError::Query { line: 2, column: 2, .. }), "{err}");
        let err = expand("{{ :- not p. }}", &facts(""), &ExpandOptions::default()).unwrap_err();
        assert!(matches!(err, TemplateError::Query { source: QueryError::NoAnswerSet, .. }));
        let err = expand("{{ {p}. #show p. }}", &facts(""), &ExpandOptions::default()).unwrap_err();
        assert!(err.needs_solver());
    }

    #[test]
    fn stages_are_counted() {
        let i = facts("in(a). node(a). node(b).");
        let options = ExpandOptions::multi_stage();
        let plain = expand_stages("no queries", &i, &options).unwrap();
        assert_eq!((plain.text.as_str(), plain.stages), ("no queries", 1));
        let nested = expand_stages(
            r#"{{= {{f"${X}:{{= "in" : in(${X}) }}{{= "out" : not in(${X}) }}"}} : node(X) }}"#,
            &i,
            &options,
        )
        .unwrap();
        assert_eq!((nested.text.as_str(), nested.stages), ("a:in\nb:out", 2));
    }

    #[test]
    fn runaway_expansion_stops() {
        let template = r#"{{= {{"{{= 1 }}{{= 1 }}"}} }}"#;
        let options = ExpandOptions { multi_stage: true, max_stages: 3, solver: None };
        let result = expand_stages(template, &facts(""), &options);
        assert!(matches!(result, Err(TemplateError::NoConvergence { stages: 3 })) || result.is_ok());
    }
}
