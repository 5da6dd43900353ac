//! Recipes: an optional Base64 encoding of the input, a sequence of
//! ingredients over interpretation sequences, and an optional decoding of
//! the final dump.

use std::fmt;
use std::path::{Path, PathBuf};

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use thiserror::Error;

use crate::asp::{
    parse_facts, parse_program, GroundAtom, Interpretation, ParseError, Program, Symbol, BASE64_PREDICATE,
    SHOW_PREDICATE,
};
use crate::emit::{emit_html, EmitError, Framework};
use crate::eval::{evaluate, shown_objects, EvalError};
use crate::json::{parse_relaxed, to_strict, JsonError, JsonValue};
use crate::solver::{solver_input, SolverClient, SolverError};
use crate::template::{expand, ExpandOptions, TemplateError, DEFAULT_MAX_STAGES};

/// Line separating interpretations in recipe input and dumps.
pub const BLOCK_SEPARATOR: &str = "§";

/// Prefix of parameter values read from a file next to the recipe.
pub const FILE_PREFIX: &str = "file:";

#[derive(Debug, Error)]
pub enum RecipeError {
    #[error("recipe: {0}")]
    Json(#[from] JsonError),
    #[error("recipe: {0}")]
    Load(String),
    #[error("recipe ingredient {index}: {message}")]
    Ingredient { index: usize, message: String },
    #[error("input interpretation {block}: {source}")]
    Input {
        block: usize,
        #[source]
        source: ParseError,
    },
    #[error("step {index} ({operation}): {source}")]
    Step {
        index: usize,
        operation: String,
        #[source]
        source: Box<StepError>,
    },
    #[error("decode: {0}")]
    Decode(String),
}

impl RecipeError {
    /// Whether the failure comes from a missing external solver.
    pub fn needs_solver(&self) -> bool {
        match self {
            RecipeError::Step { source, .. } => matches!(
                **source,
                StepError::Solver(SolverError::NotConfigured) | StepError::Template { needs_solver: true, .. }
            ),
            _ => false,
        }
    }
}

#[derive(Debug, Error)]
pub enum StepError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("interpretation {interpretation}, atom {atom}: {message}")]
    Atom { interpretation: usize, atom: String, message: String },
    #[error("interpretation {interpretation}, atom {atom}: {source}")]
    Template {
        interpretation: usize,
        atom: String,
        needs_solver: bool,
        #[source]
        source: TemplateError,
    },
    #[error("interpretation {interpretation}, atom {atom}: {source}")]
    Emit {
        interpretation: usize,
        atom: String,
        #[source]
        source: EmitError,
    },
}

/// A parameterized operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ingredient {
    /// Adds `predicate("Base64(content)")` to every interpretation.
    Encode { predicate: String, content: String },
    /// Replaces every interpretation with up to `n` answer sets (`0` for all).
    SearchModels { program: Program, n: usize },
    /// As `SearchModels`, keeping optimal answer sets only.
    Optimize { program: Program, n: usize },
    /// Renders every `predicate(s)` atom through the template `Base64⁻¹(s)`.
    Framework { framework: Framework, predicate: String, multi_stage: bool },
}

impl Ingredient {
    pub fn operation(&self) -> &'static str {
        match self {
            Ingredient::Encode { .. } => "encode",
            Ingredient::SearchModels { .. } => "search_models",
            Ingredient::Optimize { .. } => "optimize",
            Ingredient::Framework { framework, .. } => framework.name(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Recipe {
    pub encode: bool,
    pub decode: bool,
    pub ingredients: Vec<Ingredient>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideOutputKind {
    Json,
    Html,
}

impl SideOutputKind {
    pub fn extension(self) -> &'static str {
        match self {
            SideOutputKind::Json => "json",
            SideOutputKind::Html => "html",
        }
    }
}

/// An artifact produced next to the interpretation stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideOutput {
    pub name: String,
    pub kind: SideOutputKind,
    pub bytes: Vec<u8>,
}

/// Result of running a recipe.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub interpretations: Vec<Interpretation>,
    pub side_outputs: Vec<SideOutput>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub solver: Option<SolverClient>,
    pub max_stages: Option<usize>,
}

fn is_predicate_name(name: &str) -> bool {
    let rest = name.trim_start_matches('_');
    let mut chars = rest.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

struct Params<'a> {
    index: usize,
    members: &'a indexmap::IndexMap<String, JsonValue>,
    base_dir: Option<&'a Path>,
}

impl Params<'_> {
    fn error(&self, message: impl Into<String>) -> RecipeError {
        RecipeError::Ingredient { index: self.index, message: message.into() }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), RecipeError> {
        match self.members.keys().find(|k| k.as_str() != "operation" && !allowed.contains(&k.as_str())) {
            Some(key) => Err(self.error(format!("unknown parameter `{key}`"))),
            None => Ok(()),
        }
    }

    /// A string parameter; `file:` values are read relative to the recipe.
    fn text(&self, key: &str) -> Result<String, RecipeError> {
        let value = self.members.get(key).ok_or_else(|| self.error(format!("missing parameter `{key}`")))?;
        let text = value.as_str().ok_or_else(|| self.error(format!("`{key}` must be a string")))?;
        let Some(path) = text.strip_prefix(FILE_PREFIX) else { return Ok(text.to_string()) };
        let path = match self.base_dir {
            Some(dir) => dir.join(path),
            None => PathBuf::from(path),
        };
        std::fs::read_to_string(&path).map_err(|e| self.error(format!("`{key}`: cannot read {}: {e}", path.display())))
    }

    fn predicate(&self, default: Option<&str>) -> Result<String, RecipeError> {
        let predicate = match (self.members.get("predicate"), default) {
            (None, Some(default)) => default.to_string(),
            _ => self.text("predicate")?,
        };
        if is_predicate_name(&predicate) {
            Ok(predicate)
        } else {
            Err(self.error(format!("`{predicate}` is not a predicate name")))
        }
    }

    fn count(&self) -> Result<usize, RecipeError> {
        match self.members.get("n") {
            None => Ok(1),
            Some(value) => value
                .as_number()
                .and_then(|n| n.parse::<usize>().ok())
                .ok_or_else(|| self.error("`n` must be a non-negative integer")),
        }
    }

    fn flag(&self, key: &str) -> Result<bool, RecipeError> {
        match self.members.get(key) {
            None => Ok(false),
            Some(value) => value.as_bool().ok_or_else(|| self.error(format!("`{key}` must be a boolean"))),
        }
    }

    fn program(&self) -> Result<Program, RecipeError> {
        parse_program(&self.text("program")?).map_err(|e| self.error(format!("program: {e}")))
    }
}

fn flag(object: &indexmap::IndexMap<String, JsonValue>, key: &str) -> Result<bool, RecipeError> {
    match object.get(key) {
        None => Ok(false),
        Some(value) => value.as_bool().ok_or_else(|| RecipeError::Load(format!("`{key}` must be a boolean"))),
    }
}

impl Recipe {
    /// Reads a recipe written in relaxed JSON. `file:` parameters resolve
    /// against `base_dir`, or the working directory when it is `None`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Recipe, RecipeError> {
        Recipe::from_json(&parse_relaxed(text)?, base_dir)
    }

    /// Reads a recipe file; `file:` parameters resolve against its directory.
    pub fn load(path: &Path) -> Result<Recipe, RecipeError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RecipeError::Load(format!("cannot read {}: {e}", path.display())))?;
        Recipe::parse(&text, Some(path.parent().unwrap_or(Path::new("."))))
    }

    pub fn from_json(value: &JsonValue, base_dir: Option<&Path>) -> Result<Recipe, RecipeError> {
        let object = value.as_object().ok_or_else(|| RecipeError::Load("a recipe is an object".into()))?;
        if let Some(key) = object.keys().find(|k| !["encode", "decode", "ingredients"].contains(&k.as_str())) {
            return Err(RecipeError::Load(format!("unknown member `{key}`")));
        }
        let items = match object.get("ingredients") {
            None => &[][..],
            Some(value) => value.as_array().ok_or_else(|| RecipeError::Load("`ingredients` must be an array".into()))?,
        };
        let mut ingredients = Vec::with_capacity(items.len());
        for (index, item) in items.iter().enumerate() {
            let members = item
                .as_object()
                .ok_or_else(|| RecipeError::Ingredient { index, message: "an ingredient is an object".into() })?;
            let params = Params { index, members, base_dir };
            let operation = members
                .get("operation")
                .and_then(JsonValue::as_str)
                .ok_or_else(|| params.error("missing `operation` string"))?;
            let ingredient = match operation {
                "encode" => {
                    params.check_keys(&["predicate", "content"])?;
                    Ingredient::Encode { predicate: params.predicate(None)?, content: params.text("content")? }
                }
                "search_models" | "optimize" => {
                    params.check_keys(&["program", "n"])?;
                    let (program, n) = (params.program()?, params.count()?);
                    if operation == "optimize" {
                        Ingredient::Optimize { program, n }
                    } else {
                        Ingredient::SearchModels { program, n }
                    }
                }
                name => {
                    let framework = Framework::from_name(name)
                        .ok_or_else(|| params.error(format!("unknown operation `{name}`")))?;
                    params.check_keys(&["predicate", "multi_stage"])?;
                    Ingredient::Framework {
                        framework,
                        predicate: params.predicate(None)?,
                        multi_stage: params.flag("multi_stage")?,
                    }
                }
            };
            ingredients.push(ingredient);
        }
        Ok(Recipe { encode: flag(object, "encode")?, decode: flag(object, "decode")?, ingredients })
    }

    /// Applies the recipe to `input`, returning the final interpretations
    /// and the side outputs in production order.
    pub fn run(&self, input: &str, options: &RunOptions) -> Result<Outcome, RecipeError> {
        let mut interpretations = if self.encode {
            vec![std::iter::once(base64_atom(BASE64_PREDICATE, input)).collect()]
        } else {
            parse_blocks(input)?
        };
        let mut side_outputs = Vec::new();
        for (index, ingredient) in self.ingredients.iter().enumerate() {
            let step_error =
                |source| RecipeError::Step { index, operation: ingredient.operation().into(), source: Box::new(source) };
            interpretations = match ingredient {
                Ingredient::Encode { predicate, content } => {
                    for interpretation in &mut interpretations {
                        interpretation.insert(base64_atom(predicate, content));
                    }
                    interpretations
                }
                Ingredient::SearchModels { program, n } => {
                    search(program, *n, false, &interpretations, options).map_err(step_error)?
                }
                Ingredient::Optimize { program, n } => {
                    search(program, *n, true, &interpretations, options).map_err(step_error)?
                }
                Ingredient::Framework { framework, predicate, multi_stage } => {
                    let outputs = render_framework(*framework, predicate, *multi_stage, &interpretations, options)
                        .map_err(step_error)?;
                    for (interpretation, atom, kind, bytes) in outputs {
                        let name = format!("{index:03}-{framework}-{interpretation}-{atom}.{}", kind.extension());
                        side_outputs.push(SideOutput { name, kind, bytes });
                    }
                    interpretations
                }
            };
        }
        Ok(Outcome { interpretations, side_outputs })
    }

    /// Runs the recipe and prints the final interpretations, decoded when
    /// the recipe asks for it.
    pub fn run_to_text(&self, input: &str, options: &RunOptions) -> Result<(String, Vec<SideOutput>), RecipeError> {
        let outcome = self.run(input, options)?;
        let text = dump(&outcome.interpretations, self.decode)?;
        Ok((text, outcome.side_outputs))
    }
}

fn base64_atom(predicate: &str, content: &str) -> GroundAtom {
    GroundAtom::new(predicate, vec![Symbol::string(STANDARD.encode(content))])
}

/// Splits input text into fact blocks at lines holding only `§`.
pub fn parse_blocks(input: &str) -> Result<Vec<Interpretation>, RecipeError> {
    let mut blocks = vec![String::new()];
    for line in input.split_inclusive('\n') {
        if line.trim() == BLOCK_SEPARATOR {
            blocks.push(String::new());
        } else {
            blocks.last_mut().expect("at least one block").push_str(line);
        }
    }
    blocks
        .iter()
        .enumerate()
        .map(|(block, text)| parse_facts(text).map_err(|source| RecipeError::Input { block, source }))
        .collect()
}

fn atom_text(atom: &GroundAtom) -> String {
    if atom.predicate == SHOW_PREDICATE {
        Symbol::Tuple(atom.args.clone()).to_string()
    } else {
        atom.to_string()
    }
}

/// Decodes a Base64 payload into UTF-8 text.
pub fn decode_base64(payload: &str) -> Result<String, String> {
    let bytes = STANDARD.decode(payload).map_err(|e| format!("invalid Base64 `{payload}`: {e}"))?;
    String::from_utf8(bytes).map_err(|_| format!("Base64 `{payload}` does not decode to UTF-8 text"))
}

/// Replaces every `__base64__("s")` in `text` with the decoding of `s`.
pub fn decode_occurrences(text: &str) -> Result<String, String> {
    const OPEN: &str = "__base64__(\"";
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find(OPEN) {
        let after = &rest[start + OPEN.len()..];
        let Some(end) = after.find("\")") else { break };
        out.push_str(&rest[..start]);
        out.push_str(&decode_base64(&after[..end])?);
        rest = &after[end + 2..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Text form of an interpretation sequence: `atom.` lines, interpretations
/// separated by `§` lines, tuples printed bare. With `decode`, a
/// `__base64__("s")` atom prints as the decoded text itself and nested
/// occurrences are replaced in place.
pub fn dump(interpretations: &[Interpretation], decode: bool) -> Result<String, RecipeError> {
    let mut blocks = Vec::with_capacity(interpretations.len());
    for interpretation in interpretations {
        let mut lines = Vec::with_capacity(interpretation.len());
        for atom in interpretation {
            let line = match (decode, atom.predicate.as_str(), atom.args.as_slice()) {
                (true, BASE64_PREDICATE, [Symbol::Str(payload)]) => decode_base64(payload),
                (true, ..) => decode_occurrences(&format!("{}.", atom_text(atom))),
                (false, ..) => Ok(format!("{}.", atom_text(atom))),
            };
            lines.push(line.map_err(RecipeError::Decode)?);
        }
        blocks.push(lines.join("\n"));
    }
    Ok(blocks.join(&format!("\n{BLOCK_SEPARATOR}\n")))
}

/// The atoms a program passes on: its show objects when it has show
/// directives, the whole answer set otherwise.
fn passed_on(program: &Program, answer: Interpretation) -> Result<Interpretation, EvalError> {
    if !program.has_show() {
        return Ok(answer);
    }
    Ok(shown_objects(&answer, program.show_rules())?.iter().map(GroundAtom::from_shown).collect())
}

fn search(
    program: &Program,
    n: usize,
    optimize: bool,
    interpretations: &[Interpretation],
    options: &RunOptions,
) -> Result<Vec<Interpretation>, StepError> {
    let mut out = Vec::new();
    for interpretation in interpretations {
        match evaluate(program, interpretation) {
            Ok(answer) => out.push(passed_on(program, answer)?),
            Err(EvalError::Inconsistent { .. }) => {}
            Err(EvalError::NeedsSearch { .. } | EvalError::NotStratified { .. }) => {
                let solver = options.solver.as_ref().ok_or(SolverError::NotConfigured)?;
                for model in solver.solve(&solver_input(program, interpretation), n, optimize)? {
                    out.push(passed_on(program, model.atoms)?);
                }
            }
            Err(other) => return Err(other.into()),
        }
    }
    Ok(out)
}

type Produced = (usize, usize, SideOutputKind, Vec<u8>);

fn render_framework(
    framework: Framework,
    predicate: &str,
    multi_stage: bool,
    interpretations: &[Interpretation],
    options: &RunOptions,
) -> Result<Vec<Produced>, StepError> {
    let expand_options = ExpandOptions {
        multi_stage,
        max_stages: options.max_stages.unwrap_or(DEFAULT_MAX_STAGES),
        solver: options.solver.clone(),
    };
    let mut out = Vec::new();
    for (i, interpretation) in interpretations.iter().enumerate() {
        for (j, atom) in interpretation.with_predicate(predicate).enumerate() {
            let name = atom.to_string();
            let atom_error = |message: String| StepError::Atom { interpretation: i, atom: name.clone(), message };
            let [Symbol::Str(payload)] = atom.args.as_slice() else {
                return Err(atom_error("expected a single Base64 string argument".into()));
            };
            let template = decode_base64(payload).map_err(&atom_error)?;
            let text = expand(&template, interpretation, &expand_options).map_err(|source| StepError::Template {
                interpretation: i,
                atom: name.clone(),
                needs_solver: source.needs_solver(),
                source,
            })?;
            let config = parse_relaxed(&text).map_err(|e| atom_error(format!("rendered configuration: {e}")))?;
            let html = emit_html(framework, &config)
                .map_err(|source| StepError::Emit { interpretation: i, atom: name.clone(), source })?;
            out.push((i, j, SideOutputKind::Json, to_strict(&config).into_bytes()));
            out.push((i, j, SideOutputKind::Html, html.into_bytes()));
        }
    }
    Ok(out)
}

impl fmt::Display for SideOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} bytes)", self.name, self.bytes.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(recipe: &str, input: &str) -> Result<(String, Vec<SideOutput>), RecipeError> {
        Recipe::parse(recipe, None)?.run_to_text(input, &RunOptions::default())
    }

    #[test]
    fn encode_maps_the_input_to_one_atom() {
        let recipe = Recipe { encode: true, ..Default::default() };
        let outcome = recipe.run("hello", &RunOptions::default()).unwrap();
        assert_eq!(dump(&outcome.interpretations, false).unwrap(), "__base64__(\"aGVsbG8=\").");
        assert_eq!(run("{encode: true, decode: true}", "hello\n§ x").unwrap().0, "hello\n§ x");
    }

    #[test]
    fn identity_recipe_and_blocks() {
        assert_eq!(run("{}", "p(1).").unwrap().0, "p(1).");
        assert_eq!(run("{}", "p(1).\n§\nq(2). p(3).\n").unwrap().0, "p(1).\n§\np(3).\nq(2).");
    }

    #[test]
    fn encode_operation_extends_every_interpretation() {
        let recipe = r#"{ ingredients: [ { operation: encode, predicate: payload, content: "x" } ] }"#;
        assert_eq!(run(recipe, "§").unwrap().0, "payload(\"eA==\").\n§\npayload(\"eA==\").");
        let recipe = r#"{ ingredients: [ { operation: encode, predicate: payload, content: "" } ] }"#;
        assert_eq!(run(recipe, "").unwrap().0, "payload(\"\").");
    }

    #[test]
    fn decode_replaces_nested_payloads() {
        let recipe = r#"{ decode: true, ingredients: [ { operation: search_models,
            program: "out(__base64__(X)) :- __base64__(X). #show out/1." } ] }"#;
        assert_eq!(run(recipe, "__base64__(\"aGVsbG8=\").").unwrap().0, "out(hello).");
        assert!(run("{ decode: true }", "p(__base64__(\"@@\")).").is_err());
    }

    #[test]
    fn search_models_in_process() {
        let recipe = r#"{ ingredients: [ { operation: search_models, program: "edge(X,Y) :- edge(Y,X)." } ] }"#;
        assert_eq!(run(recipe, "edge(a,b).").unwrap().0, "edge(a,b).\nedge(b,a).");
        let recipe = r##"{ ingredients: [ { operation: search_models, program: "#show (X,1) : p(X)." } ] }"##;
        assert_eq!(run(recipe, "p(a).").unwrap().0, "(a,1).");
        let recipe = r#"{ ingredients: [ { operation: search_models, program: ":- p(X)." } ] }"#;
        assert_eq!(run(recipe, "p(a).\n§\nq(b).").unwrap().0, "q(b).");
    }

    #[test]
    fn search_without_solver_is_reported() {
        let recipe = r#"{ ingredients: [ { operation: search_models, program: "{p}." } ] }"#;
        let err = run(recipe, "").unwrap_err();
        assert!(err.needs_solver(), "{err}");
        assert!(matches!(err, RecipeError::Step { index: 0, .. }));
    }

    #[test]
    fn load_errors_name_the_ingredient() {
        let err = Recipe::parse("{ ingredients: [ {operation: encode, predicate: p, content: x}, {operation: nope} ] }", None)
            .unwrap_err();
        assert!(matches!(err, RecipeError::Ingredient { index: 1, .. }), "{err}");
        assert!(Recipe::parse("{ ingredients: [ {operation: chartjs, predicate: p, extra: 1} ] }", None).is_err());
        assert!(Recipe::parse("{ ingredients: [ {operation: encode, predicate: Bad, content: x} ] }", None).is_err());
        assert!(Recipe::parse("{ ingredients: [ {operation: search_models, program: \"p :-\"} ] }", None).is_err());
    }

    #[test]
    fn framework_side_outputs() {
        let template = r#"{ type: "bar", data: { labels: [ {{= {{f""${X}""}} : node(X) }} ] } }"#;
        let recipe = Recipe {
            encode: false,
            decode: false,
            ingredients: vec![
                Ingredient::Encode { predicate: "chart".into(), content: template.into() },
                Ingredient::Framework { framework: Framework::ChartJs, predicate: "chart".into(), multi_stage: false },
            ],
        };
        let outcome = recipe.run("node(a). node(b).\n§\nnode(c).", &RunOptions::default()).unwrap();
        let names: Vec<&str> = outcome.side_outputs.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["001-chartjs-0-0.json", "001-chartjs-0-0.html", "001-chartjs-1-0.json", "001-chartjs-1-0.html"]);
        assert_eq!(
            String::from_utf8(outcome.side_outputs[0].bytes.clone()).unwrap(),
            r#"{"type":"bar","data":{"labels":["a","b"]}}"#
        );
        assert_eq!(outcome.interpretations[1].len(), 2);
    }
}
