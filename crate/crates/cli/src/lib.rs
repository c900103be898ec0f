//! Command-line front end for the `superpoints` library.
//!
//! [`run`] parses the arguments, executes one subcommand and returns the exit
//! status together with everything written to stdout and stderr, so the
//! binary and the tests share one code path.

use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use superpoints::expr::{self, parse_superfunction};
use superpoints::points::{
    self, basis_samples, check_naturality, lift_multilinear, reconstruct_multilinear, superrep_check,
    ExprFamily, FullPoints, LiftedFamily, NilPoints, PointFamily, DEFAULT_MAX_N,
};
use superpoints::skeleton::{cs_structure, cs_table_text, skeleton_compose, skeleton_eval};
use superpoints::{
    random, Error, GrassmannMorphism, LambdaPoint, MultilinearMap, Skeleton,
    SuperMatrix, SuperSpace,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_PARSE: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Parse(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parse_error() {
            Failure::Parse(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Parse(format!("invalid JSON: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

#[derive(Parser, Debug)]
#[command(name = "superpoints", version, about = "Exact Grassmann and superalgebra computations")]
struct Cli {
    /// Print JSON instead of canonical text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and print an element of Λ_n, or a superfunction when -p/-q is given.
    Eval {
        #[arg(short)]
        n: Option<usize>,
        #[arg(short)]
        p: Option<usize>,
        #[arg(short)]
        q: Option<usize>,
        /// Read the expression from a file (`-` for stdin).
        #[arg(long)]
        file: Option<String>,
        #[arg(allow_hyphen_values = true)]
        expr: Option<String>,
    },
    /// Inverse of an element of Λ_n.
    Inv {
        #[arg(short)]
        n: Option<usize>,
        #[arg(long)]
        file: Option<String>,
        #[arg(allow_hyphen_values = true)]
        expr: Option<String>,
    },
    /// Supertrace of a supermatrix.
    Strace {
        #[arg(long)]
        file: Option<String>,
        matrix: Option<String>,
    },
    /// Inverse of a supermatrix with invertible body.
    Minv {
        #[arg(long)]
        file: Option<String>,
        matrix: Option<String>,
    },
    /// Evaluate the lift of a multilinear map at a list of Λ-points.
    Lift { map: String, points: String },
    /// Recover the multilinear map behind a point family.
    Reconstruct {
        #[arg(long)]
        file: Option<String>,
        family: Option<String>,
    },
    /// Check naturality of a point family under a Grassmann morphism.
    CheckNat {
        family: String,
        morphism: String,
        /// JSON list of argument tuples; defaults to basis and random points.
        #[arg(long)]
        samples: Option<String>,
    },
    /// Evaluate a skeleton at a Λ-point.
    SkelEval { skeleton: String, point: String },
    /// Skeleton of g ∘ f.
    SkelCompose { g: String, f: String },
    /// Superrepresentability test for the points or nilpotent points of K^{p|q}.
    SuperrepCheck {
        #[arg(long, value_enum, default_value = "full")]
        kind: Kind,
        #[arg(short, default_value_t = 1)]
        p: usize,
        #[arg(short, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Derive the multiplication table of C^s.
    CsTable,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Full,
    Nil,
}

/// Runs the command line `args` (including the program name).
pub fn run<I, S>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: EXIT_PARSE, stdout: String::new(), stderr: text },
            };
        }
    };
    match execute(&cli, stdin) {
        Ok(mut out) => {
            if !out.ends_with('\n') {
                out.push('\n');
            }
            Outcome { code: EXIT_OK, stdout: out, stderr: String::new() }
        }
        Err(Failure::Parse(m)) => Outcome { code: EXIT_PARSE, stdout: String::new(), stderr: m + "\n" },
        Err(Failure::Domain(m)) => Outcome { code: EXIT_DOMAIN, stdout: String::new(), stderr: m + "\n" },
    }
}

fn read_source(path: &str, stdin: &mut dyn Read) -> CliResult<String> {
    if path == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(|e| Failure::Domain(format!("cannot read stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Domain(format!("cannot read {path}: {e}")))
    }
}

/// Expression text: `--file` wins over the inline argument.
fn expression(inline: &Option<String>, file: &Option<String>, stdin: &mut dyn Read) -> CliResult<String> {
    match (file, inline) {
        (Some(path), _) => Ok(read_source(path, stdin)?.trim().to_string()),
        (None, Some(text)) => Ok(text.clone()),
        (None, None) => Err(Failure::Parse("missing expression".into())),
    }
}

/// JSON input: inline when it starts with `{` or `[`, otherwise a path (`-` for stdin).
fn json_text(arg: &str, stdin: &mut dyn Read) -> CliResult<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(arg.to_string())
    } else {
        read_source(arg, stdin)
    }
}

fn load<T: DeserializeOwned>(arg: &str, stdin: &mut dyn Read) -> CliResult<T> {
    Ok(serde_json::from_str(&json_text(arg, stdin)?)?)
}

fn load_either<T: DeserializeOwned>(
    inline: &Option<String>,
    file: &Option<String>,
    stdin: &mut dyn Read,
) -> CliResult<T> {
    match (file, inline) {
        (Some(path), _) => Ok(serde_json::from_str(&read_source(path, stdin)?)?),
        (None, Some(arg)) => load(arg, stdin),
        (None, None) => Err(Failure::Parse("missing input".into())),
    }
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

fn render<T: Serialize + ?Sized>(json: bool, value: &T, text: impl FnOnce() -> String) -> String {
    if json {
        to_json(value)
    } else {
        text()
    }
}

enum Family {
    Lifted(LiftedFamily),
    Expr(ExprFamily),
}

impl Family {
    fn as_dyn(&self) -> &dyn PointFamily {
        match self {
            Family::Lifted(f) => f,
            Family::Expr(f) => f,
        }
    }
}

/// A family file holds either a multilinear map (its lift) or an expression family.
fn load_family(text: &str) -> CliResult<Family> {
    let value: Value = serde_json::from_str(text)?;
    if value.get("components").is_some() {
        Ok(Family::Expr(serde_json::from_value(value)?))
    } else {
        Ok(Family::Lifted(LiftedFamily::new(serde_json::from_value(value)?)))
    }
}

fn map_text(f: &MultilinearMap) -> String {
    let mut lines = vec![format!(
        "{} -> {}",
        f.domains().iter().map(ToString::to_string).collect::<Vec<_>>().join(" x "),
        f.codomain()
    )];
    for (inputs, out, c) in f.entries() {
        let args: Vec<String> = inputs.iter().map(|i| format!("e{}", i + 1)).collect();
        lines.push(format!("  ({}) -> e{}: {}", args.join(", "), out + 1, superpoints::rational::format(c)));
    }
    lines.join("\n")
}

fn default_samples(family: &dyn PointFamily, n: usize) -> Vec<Vec<LambdaPoint>> {
    let per_arg: Vec<Vec<LambdaPoint>> =
        family.domains().iter().map(|d| basis_samples(*d, n)).collect();
    let mut tuples: Vec<Vec<LambdaPoint>> = vec![Vec::new()];
    for options in &per_arg {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                options.iter().map(move |x| {
                    let mut t = t.clone();
                    t.push(x.clone());
                    t
                })
            })
            .collect();
        if tuples.len() > 256 {
            tuples.truncate(256);
        }
    }
    let mut rng = random::rng(0);
    for _ in 0..16 {
        tuples.push(family.domains().iter().map(|d| random::point(&mut rng, *d, n)).collect());
    }
    tuples
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> CliResult<String> {
    let json = cli.json;
    match &cli.command {
        Command::Eval { n, p, q, file, expr: inline } => {
            let text = expression(inline, file, stdin)?;
            let parsed = expr::parse(&text)?;
            if p.is_some() || q.is_some() {
                let p = p.unwrap_or_else(|| parsed.max_variable());
                let q = q.unwrap_or_else(|| parsed.max_generator());
                let f = parse_superfunction(&text, p, q)?;
                Ok(render(json, &f, || f.to_string()))
            } else {
                let n = n.unwrap_or_else(|| parsed.max_generator());
                let a = expr::parse_element(&text, n)?;
                Ok(render(json, &a, || a.to_string()))
            }
        }
        Command::Inv { n, file, expr: inline } => {
            let text = expression(inline, file, stdin)?;
            let n = match n {
                Some(n) => *n,
                None => expr::parse(&text)?.max_generator(),
            };
            let a = expr::parse_element(&text, n)?.inv()?;
            Ok(render(json, &a, || a.to_string()))
        }
        Command::Strace { file, matrix } => {
            let a: SuperMatrix = load_either(matrix, file, stdin)?;
            let st = a.supertrace();
            Ok(render(json, &st, || st.to_string()))
        }
        Command::Minv { file, matrix } => {
            let a: SuperMatrix = load_either(matrix, file, stdin)?;
            let inv = a.inverse()?;
            Ok(render(json, &inv, || inv.to_string()))
        }
        Command::Lift { map, points } => {
            let f: MultilinearMap = load(map, stdin)?;
            let args: Vec<LambdaPoint> = load(points, stdin)?;
            let y = lift_multilinear(&f, &args)?;
            Ok(render(json, &y, || y.to_string()))
        }
        Command::Reconstruct { file, family } => {
            let text = match (file, family) {
                (Some(path), _) => read_source(path, stdin)?,
                (None, Some(arg)) => json_text(arg, stdin)?,
                (None, None) => return Err(Failure::Parse("missing family".into())),
            };
            let family = load_family(&text)?;
            let g = reconstruct_multilinear(family.as_dyn())?;
            Ok(render(json, &g, || map_text(&g)))
        }
        Command::CheckNat { family, morphism, samples } => {
            let family = load_family(&json_text(family, stdin)?)?;
            let family = family.as_dyn();
            let phi: GrassmannMorphism = load(morphism, stdin)?;
            let samples: Vec<Vec<LambdaPoint>> = match samples {
                Some(s) => {
                    let value: Value = serde_json::from_str(&json_text(s, stdin)?)?;
                    match value.as_array().and_then(|a| a.first()) {
                        Some(Value::Object(_)) => {
                            let pts: Vec<LambdaPoint> = serde_json::from_value(value)?;
                            pts.into_iter().map(|x| vec![x]).collect()
                        }
                        _ => serde_json::from_value(value)?,
                    }
                }
                None => default_samples(family, phi.src()),
            };
            let report = check_naturality(family, &phi, &samples);
            if !report.errors.is_empty() && json {
                return Err(Failure::Domain(report.errors.join("\n")));
            }
            Ok(render(json, &report.violations, || {
                let mut lines = vec![format!(
                    "checked {} samples under {phi}: {} violations",
                    report.checked,
                    report.violations.len()
                )];
                for v in &report.violations {
                    let sample: Vec<String> = v.sample.iter().map(ToString::to_string).collect();
                    lines.push(format!("  at {}", sample.join(", ")));
                    lines.push(format!("    F(phi x) = {}", v.lhs));
                    lines.push(format!("    phi F(x) = {}", v.rhs));
                }
                lines.extend(report.errors.iter().map(|e| format!("  error: {e}")));
                lines.join("\n")
            }))
        }
        Command::SkelEval { skeleton, point } => {
            let f: Skeleton = load(skeleton, stdin)?;
            let x: LambdaPoint = load(point, stdin)?;
            let y = skeleton_eval(&f, &x)?;
            Ok(render(json, &y, || y.to_string()))
        }
        Command::SkelCompose { g, f } => {
            let g: Skeleton = load(g, stdin)?;
            let f: Skeleton = load(f, stdin)?;
            let h = skeleton_compose(&g, &f)?;
            Ok(render(json, &h, || h.to_string()))
        }
        Command::SuperrepCheck { kind, p, q, max_n } => {
            let space = SuperSpace::new(*p, *q);
            let max_n = (*max_n).min(DEFAULT_MAX_N);
            let verdict = match kind {
                Kind::Full => superrep_check(&FullPoints { space, max_n }),
                Kind::Nil => superrep_check(&NilPoints { space, max_n }),
            };
            let name = match kind {
                Kind::Full => points::ModuleFamily::name(&FullPoints { space, max_n }),
                Kind::Nil => points::ModuleFamily::name(&NilPoints { space, max_n }),
            };
            Ok(render(json, &verdict, || match verdict.format {
                Some(format) if verdict.representable => {
                    format!("{name}: superrepresentable by {format}")
                }
                _ => {
                    let mut lines = vec![format!("{name}: not superrepresentable")];
                    lines.extend(verdict.reasons.iter().map(|r| format!("  {r}")));
                    lines.join("\n")
                }
            }))
        }
        Command::CsTable => {
            let mu = cs_structure()?;
            Ok(render(json, &mu, || cs_table_text(&mu)))
        }
    }
}
