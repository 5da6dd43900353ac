use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use asp_mustache::asp::{parse_facts, parse_program};
use asp_mustache::json::{parse_relaxed, to_strict};
use asp_mustache::recipe::{dump, Ingredient, Recipe, RecipeError, RunOptions};
use asp_mustache::solver::{SolverClient, SOLVER_ENV};
use asp_mustache::template::{expand, ExpandOptions, DEFAULT_MAX_STAGES};
use clap::{Args, Parser, Subcommand};

const EXIT_CODES: &str = "Exit codes:
  0   success
  1   evaluation, template or recipe error
  2   usage or I/O error
  3   an answer set solver is needed but none is configured
  10  the program has no answer set";

/// Expand Mustache templates over ASP interpretations and run recipes.
#[derive(Parser)]
#[command(name = "asp-mustache", version, after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolverArgs {
    /// Answer set solver executable speaking clingo's JSON output.
    #[arg(long, value_name = "PATH", env = SOLVER_ENV)]
    solver: Option<PathBuf>,
}

impl SolverArgs {
    fn client(&self) -> Option<SolverClient> {
        self.solver.as_ref().map(SolverClient::new)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Expand a template against the interpretation given by a fact file.
    Render {
        /// Fact file defining the interpretation (`-` for standard input).
        facts: PathBuf,
        /// Template file.
        template: PathBuf,
        /// Repeat expansion until no Mustache expressions remain.
        #[arg(long)]
        multi_stage: bool,
        /// Stage limit for multi-stage expansion.
        #[arg(long, value_name = "N", default_value_t = DEFAULT_MAX_STAGES as u64, value_parser = clap::value_parser!(u64).range(1..))]
        max_stages: u64,
        /// Write the expansion to this file instead of standard output.
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run a recipe; interpretations in INPUT are separated by `§` lines.
    Run {
        /// Recipe file in relaxed JSON.
        recipe: PathBuf,
        /// Recipe input (standard input when absent or `-`).
        input: Option<PathBuf>,
        /// Directory receiving side outputs; created if absent.
        #[arg(long, value_name = "DIR", default_value = ".")]
        out_dir: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Convert relaxed JSON to strict JSON.
    Json {
        /// Relaxed JSON file (`-` for standard input).
        file: PathBuf,
    },
    /// Print answer sets of a program, separated by `§` lines.
    Solve {
        /// ASP program file.
        program: PathBuf,
        /// Number of answer sets, 0 for all.
        #[arg(short, long, default_value_t = 1)]
        n: usize,
        /// Fact file added to the program.
        #[arg(long, value_name = "FILE")]
        facts: Option<PathBuf>,
        /// Keep optimal answer sets only.
        #[arg(long)]
        optimize: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    error: Option<anyhow::Error>,
}

impl Failure {
    fn io(error: anyhow::Error) -> Self {
        Failure { code: 2, error: Some(error) }
    }

    fn eval(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 1, error: Some(error.into()) }
    }

    fn missing_solver(error: impl Into<anyhow::Error>) -> Self {
        let error = error.into().context(format!("an answer set solver is required: pass --solver or set {SOLVER_ENV}"));
        Failure { code: 3, error: Some(error) }
    }

    fn recipe(error: RecipeError) -> Self {
        if error.needs_solver() {
            Failure::missing_solver(error)
        } else {
            Failure::eval(error)
        }
    }
}

type Outcome = Result<(), Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).context("cannot read standard input").map_err(Failure::io)?;
        return Ok(text);
    }
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(Failure::io)
}

fn write_stdout(text: &str) -> Outcome {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).context("cannot write output").map_err(Failure::io)
}

/// Prints `text` followed by a newline unless it already ends with one.
fn print_block(text: &str) -> Outcome {
    if text.is_empty() || text.ends_with('\n') {
        write_stdout(text)
    } else {
        write_stdout(&format!("{text}\n"))
    }
}

fn render(facts: &Path, template: &Path, options: ExpandOptions, output: Option<&Path>) -> Outcome {
    let facts_text = read_input(facts)?;
    let template_text = read_input(template)?;
    let interpretation =
        parse_facts(&facts_text).with_context(|| format!("{}", facts.display())).map_err(Failure::eval)?;
    let text = expand(&template_text, &interpretation, &options).map_err(|e| {
        let needs_solver = e.needs_solver();
        let error = anyhow::Error::new(e).context(template.display().to_string());
        if needs_solver {
            Failure::missing_solver(error)
        } else {
            Failure::eval(error)
        }
    })?;
    match output {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::io),
        None => write_stdout(&text),
    }
}

fn run(recipe_path: &Path, input: Option<&Path>, out_dir: &Path, solver: Option<SolverClient>) -> Outcome {
    let recipe_text = read_input(recipe_path)?;
    let base_dir = recipe_path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let recipe = Recipe::parse(&recipe_text, Some(base_dir)).map_err(Failure::recipe)?;
    let input_text = read_input(input.unwrap_or(Path::new("-")))?;
    let options = RunOptions { solver, max_stages: None };
    let (text, side_outputs) = recipe.run_to_text(&input_text, &options).map_err(Failure::recipe)?;
    if !side_outputs.is_empty() {
        fs::create_dir_all(out_dir)
            .with_context(|| format!("cannot create {}", out_dir.display()))
            .map_err(Failure::io)?;
    }
    for output in &side_outputs {
        let path = out_dir.join(&output.name);
        fs::write(&path, &output.bytes).with_context(|| format!("cannot write {}", path.display())).map_err(Failure::io)?;
        log::info!("wrote {}", path.display());
    }
    if recipe.decode {
        write_stdout(&text)
    } else {
        print_block(&text)
    }
}

fn json(file: &Path) -> Outcome {
    let text = read_input(file)?;
    let value = parse_relaxed(&text).with_context(|| file.display().to_string()).map_err(Failure::eval)?;
    write_stdout(&format!("{}\n", to_strict(&value)))
}

fn solve(path: &Path, n: usize, facts: Option<&Path>, optimize: bool, solver: Option<SolverClient>) -> Outcome {
    let program_text = read_input(path)?;
    let program = parse_program(&program_text).with_context(|| path.display().to_string()).map_err(Failure::eval)?;
    let facts_text = match facts {
        Some(path) => read_input(path)?,
        None => String::new(),
    };
    let interpretation = parse_facts(&facts_text).map_err(Failure::eval)?;
    let ingredient =
        if optimize { Ingredient::Optimize { program, n } } else { Ingredient::SearchModels { program, n } };
    let recipe = Recipe { ingredients: vec![ingredient], ..Default::default() };
    let options = RunOptions { solver, max_stages: None };
    let outcome = recipe.run(&interpretation.to_facts(), &options).map_err(Failure::recipe)?;
    if outcome.interpretations.is_empty() {
        return Err(Failure { code: 10, error: None });
    }
    print_block(&dump(&outcome.interpretations, false).map_err(Failure::eval)?)
}

fn dispatch(cli: Cli) -> Outcome {
    match cli.command {
        Command::Render { facts, template, multi_stage, max_stages, output, solver } => {
            let max_stages = usize::try_from(max_stages).map_err(|_| Failure::io(anyhow!("--max-stages is too large")))?;
            let options = ExpandOptions { multi_stage, max_stages, solver: solver.client() };
            render(&facts, &template, options, output.as_deref())
        }
        Command::Run { recipe, input, out_dir, solver } => run(&recipe, input.as_deref(), &out_dir, solver.client()),
        Command::Json { file } => json(&file),
        Command::Solve { program, n, facts, optimize, solver } => {
            solve(&program, n, facts.as_deref(), optimize, solver.client())
        }
    }
}

/// The error chain joined by `: `, skipping causes already quoted by the
/// message before them.
fn describe(error: &anyhow::Error) -> String {
    let mut parts: Vec<String> = Vec::new();
    for cause in error.chain() {
        let text = cause.to_string();
        if !parts.last().is_some_and(|previous| previous.contains(&text)) {
            parts.push(text);
        }
    }
    parts.join(": ")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            if let Some(error) = error {
                eprintln!("error: {}", describe(&error));
            }
            ExitCode::from(code)
        }
    }
}
