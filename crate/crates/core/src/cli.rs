//! The `ifg` command-line driver.
//!
//! ```text
//! ifg --grammar g.ifg --input "john read here" --emit solutions
//! ifg --grammar g.ifg --fsa lattice.fsa --emit if --stats -o g.if.ifg
//! ifg --grammar g.if.ifg --emit solutions
//! ```
//!
//! Exit codes: 0 success, 1 no parse or no solutions, 2 usage or input
//! error, 3 cyclic specialization.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::chart::{
    build_backbone_chart, check_chart_acyclic, specialize_chart, string_to_fsa, SpecializeError, InputFsa,
};
use crate::enumerate::{enumerate_solutions, oracle_enumerate, EnumError, FeatureStructure};
use crate::format::{
    chart_to_json, chart_to_text, grammar_to_json, grammar_to_text, parse_fsa_file, parse_grammar_file,
    structures_to_json,
};
use crate::grammar::{derivation_count, Grammar, GrammarKind};
use crate::standardize::is_interaction_free;
use crate::transform::{sweep_unreachable, to_interaction_free, TransformError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_EMPTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CYCLIC: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    Chart,
    Spec,
    If,
    Solutions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "ifg", version, about = "Chart parsing and interaction-free enumeration for unification grammars")]
pub struct Args {
    /// Grammar file. Its `%kind` decides where the pipeline starts.
    #[arg(long, short = 'g')]
    pub grammar: PathBuf,
    /// Whitespace-separated input tokens.
    #[arg(long, short = 'i', conflicts_with = "fsa")]
    pub input: Option<String>,
    /// Input lattice file.
    #[arg(long)]
    pub fsa: Option<PathBuf>,
    #[arg(long, short = 'e', value_enum, default_value = "solutions")]
    pub emit: Stage,
    #[arg(long, short = 'f', value_enum, default_value = "text")]
    pub format: OutputFormat,
    /// Per-stage counts on stderr.
    #[arg(long)]
    pub stats: bool,
    /// Write the artifact here instead of stdout.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    /// Keep rules unreachable from the start symbol in the IF grammar.
    #[arg(long)]
    pub no_sweep: bool,
    /// Enumerate with the backtracking oracle instead.
    #[arg(long)]
    pub oracle: bool,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure::new(EXIT_USAGE, message)
    }
}

struct Driver<'a> {
    args: &'a Args,
    stats: Vec<String>,
}

/// Parses `argv` (including the program name) and runs the pipeline.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", text);
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", text);
                    EXIT_USAGE
                }
            };
        }
    };
    run_args(&args, stdout, stderr)
}

pub fn run_args(args: &Args, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let mut driver = Driver {
        args,
        stats: Vec::new(),
    };
    let result = driver.pipeline();
    if args.stats {
        for line in &driver.stats {
            let _ = writeln!(stderr, "{}", line);
        }
    }
    let (artifact, code) = match result {
        Ok(pair) => pair,
        Err(f) => {
            let _ = writeln!(stderr, "ifg: {}", f.message);
            return f.code;
        }
    };
    if let Some(artifact) = artifact {
        let written = match &args.output {
            Some(path) => fs::write(path, artifact.as_bytes()).map_err(|e| format!("{}: {}", path.display(), e)),
            None => stdout.write_all(artifact.as_bytes()).map_err(|e| e.to_string()),
        };
        if let Err(e) = written {
            let _ = writeln!(stderr, "ifg: {}", e);
            return EXIT_USAGE;
        }
    }
    code
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {}", path.display(), e)))
}

impl Driver<'_> {
    fn pipeline(&mut self) -> Result<(Option<String>, i32), Failure> {
        let args = self.args;
        let text = read(&args.grammar)?;
        let g = parse_grammar_file(&text).map_err(|e| Failure::usage(format!("{}: {}", args.grammar.display(), e)))?;
        let fsa = self.input()?;
        let g_kind = g.kind;

        let spec = match (g.kind, fsa) {
            (GrammarKind::Reference, None) => {
                return Err(Failure::usage("a reference grammar needs --input or --fsa"));
            }
            (GrammarKind::Reference, Some(fsa)) => {
                if !fsa.is_acyclic() {
                    self.stats.push("input: cyclic automaton".to_string());
                }
                let chart = build_backbone_chart(&g, &fsa);
                self.stats.push(format!(
                    "chart: edges={} derivations={} accepting={} trees={}",
                    chart.edges().len(),
                    chart.derivation_records(),
                    chart.accepting_edges().len(),
                    count(chart.tree_count()),
                ));
                if args.emit == Stage::Chart {
                    let out = match args.format {
                        OutputFormat::Text => chart_to_text(&chart),
                        OutputFormat::Json => json(&chart_to_json(&chart)),
                    };
                    let code = if chart.recognizes() { EXIT_OK } else { EXIT_EMPTY };
                    if let Err(c) = check_chart_acyclic(&chart) {
                        self.stats.push(format!("chart: cyclic at {}", c));
                    }
                    return Ok((Some(out), code));
                }
                match specialize_chart(&g, &chart) {
                    Ok(spec) => {
                        self.grammar_stats("spec", &spec);
                        spec
                    }
                    Err(SpecializeError::NoParse) => return Err(Failure::new(EXIT_EMPTY, "no parse")),
                    Err(SpecializeError::Cyclic { grammar, cycle }) => {
                        self.grammar_stats("spec", &grammar);
                        if args.emit == Stage::Spec {
                            self.stats.push(format!("spec: cyclic at {}", cycle));
                            return Ok((Some(self.grammar_out(&grammar)), EXIT_CYCLIC));
                        }
                        return Err(Failure::new(
                            EXIT_CYCLIC,
                            format!("cyclic specialization refused: {}", cycle),
                        ));
                    }
                    Err(e) => return Err(Failure::usage(e.to_string())),
                }
            }
            (kind, Some(_)) => {
                return Err(Failure::usage(format!(
                    "the grammar is already of kind `{}`; drop --input/--fsa",
                    kind.name()
                )));
            }
            (_, None) => g,
        };

        match args.emit {
            Stage::Chart => {
                return Err(Failure::usage(format!("cannot emit `chart` from a grammar of kind `{}`", g_kind.name())));
            }
            Stage::Spec if g_kind == GrammarKind::InteractionFree => {
                return Err(Failure::usage("cannot emit `spec` from a grammar of kind `if`"));
            }
            Stage::Spec => return Ok((Some(self.grammar_out(&spec)), EXIT_OK)),
            _ => {}
        }

        let ifg = if spec.kind == GrammarKind::InteractionFree && spec.rules.iter().all(|r| is_interaction_free(r) == Ok(true)) {
            spec
        } else {
            let (ifg, st) = to_interaction_free(&spec).map_err(|e| match e {
                TransformError::Cyclic(c) => Failure::new(EXIT_CYCLIC, format!("cyclic grammar refused: {}", c)),
                other => Failure::usage(other.to_string()),
            })?;
            let before = ifg.rules.len();
            let ifg = if args.no_sweep { ifg } else { sweep_unreachable(&ifg) };
            self.stats.push(format!(
                "if: rules={} expansions={} created={} eliminated={} input_top={} unproductive={} pruned={} swept={}",
                ifg.rules.len(),
                st.expansions,
                st.created,
                st.eliminated,
                st.input_top,
                st.unproductive,
                st.pruned,
                before - ifg.rules.len(),
            ));
            ifg
        };

        if args.emit == Stage::If {
            let code = if ifg.rules_for(&ifg.start).next().is_some() {
                EXIT_OK
            } else {
                EXIT_EMPTY
            };
            return Ok((Some(self.grammar_out(&ifg)), code));
        }

        let solutions = if args.oracle {
            oracle_enumerate(&ifg).map_err(enum_failure)?
        } else {
            let mut it = enumerate_solutions(&ifg).map_err(enum_failure)?;
            let mut all = Vec::new();
            for s in it.by_ref() {
                all.push(s.map_err(enum_failure)?);
            }
            self.stats.push(format!("solutions: count={} failures={}", all.len(), it.failures()));
            all
        };
        if args.oracle {
            self.stats.push(format!("solutions: count={} (oracle)", solutions.len()));
        }
        let code = if solutions.is_empty() { EXIT_EMPTY } else { EXIT_OK };
        Ok((Some(self.structures_out(&solutions)), code))
    }

    fn input(&self) -> Result<Option<InputFsa>, Failure> {
        if let Some(s) = &self.args.input {
            let tokens: Vec<&str> = s.split_whitespace().collect();
            return Ok(Some(string_to_fsa(&tokens)));
        }
        if let Some(path) = &self.args.fsa {
            let text = read(path)?;
            return parse_fsa_file(&text)
                .map(Some)
                .map_err(|e| Failure::usage(format!("{}: {}", path.display(), e)));
        }
        Ok(None)
    }

    fn grammar_stats(&mut self, stage: &str, g: &Grammar) {
        let non_if = g.rules.iter().filter(|r| is_interaction_free(r) != Ok(true)).count();
        let top = g.rules.iter().filter(|r| r.constraints.is_top()).count();
        self.stats.push(format!(
            "{}: rules={} non_if={} top={} derivations={}",
            stage,
            g.rules.len(),
            non_if,
            top,
            count(derivation_count(g)),
        ));
    }

    fn grammar_out(&self, g: &Grammar) -> String {
        match self.args.format {
            OutputFormat::Text => grammar_to_text(g),
            OutputFormat::Json => json(&grammar_to_json(g)),
        }
    }

    fn structures_out(&self, list: &[FeatureStructure]) -> String {
        match self.args.format {
            OutputFormat::Text => list.iter().map(|s| s.render() + "\n").collect(),
            OutputFormat::Json => json(&structures_to_json(list)),
        }
    }
}

fn enum_failure(e: EnumError) -> Failure {
    match e {
        EnumError::Cyclic(c) => Failure::new(EXIT_CYCLIC, format!("cyclic grammar refused: {}", c)),
        other => Failure::usage(other.to_string()),
    }
}

fn count(n: Option<u128>) -> String {
    n.map(|n| n.to_string()).unwrap_or_else(|| "overflow".to_string())
}

fn json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}
