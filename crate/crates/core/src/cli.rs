//! The `pcsp-lab` command line.
//!
//! Every subcommand returns an exit code and a report. Reports are plain
//! text, or JSON with `--json`.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | yes, satisfiable, success |
//! | 1 | no, unsatisfiable, nontrivial |
//! | 2 | indeterminate or promise violation |
//! | 3 | usage or parse error |
//! | 4 | search budget exhausted |

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::builtin::{builtin_from_spec, lin, one_in_three_vs_nae, two_sat, Builtin};
use crate::condition::{find_satisfying_interpretation, Condition, Interpretation, ProjectionChoice};
use crate::error::Error;
use crate::function::FunctionTable;
use crate::instance::PPInstance;
use crate::polymorphism::{enumerate_polymorphisms, is_polymorphism};
use crate::reduction::{certificate_to_assignment, condition_to_instance, instance_to_condition, SymbolMap};
use crate::search::DEFAULT_NODE_BUDGET;
use crate::selftest::{run_all, run_criterion, SelftestConfig};
use crate::solver::brute::{brute_force_decide_threads, brute_force_pcsp_threads};
use crate::solver::{lin_instance_to_system, solve_1in3_nae, solve_2sat, solve_mod_p, PcspVerdict};
use crate::structure::{PcspTemplate, RelationalStructure};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_PROMISE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

/// Environment variable holding the default node budget.
pub const BUDGET_ENV: &str = "PCSP_LAB_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "pcsp-lab", version, about = "Polymorphisms, minor conditions and solvers for (promise) CSPs")]
pub struct Cli {
    #[command(flatten)]
    pub options: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Options {
    /// Search node budget.
    #[arg(long, global = true, env = BUDGET_ENV, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: u64,
    /// Largest symbol arity `satisfy` will accept.
    #[arg(long, global = true, default_value_t = 3)]
    pub max_arity: usize,
    /// Seed for randomized harnesses.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for searches that can be split.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Print a JSON report.
    #[arg(long, global = true)]
    pub json: bool,
}

/// A built-in name such as `k-coloring:3`, or a path to a structure or
/// template file.
type Source = String;

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide an instance of CSP(S) with the best applicable solver.
    Solve {
        #[arg(long, alias = "structure")]
        template: Source,
        #[arg(long)]
        instance: PathBuf,
        /// Use brute force whatever the structure.
        #[arg(long)]
        oracle: bool,
    },
    /// Classify an instance of PCSP(A, B) as yes, no, or indeterminate.
    Pcsp {
        #[arg(long)]
        template: Source,
        #[arg(long)]
        instance: PathBuf,
        /// Use brute force instead of the rational algorithm.
        #[arg(long)]
        oracle: bool,
    },
    /// List the polymorphisms of a given arity.
    Polys {
        #[arg(long)]
        template: Source,
        #[arg(long)]
        arity: usize,
        /// Stop after this many.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Test whether a function table is a polymorphism.
    CheckPoly {
        #[arg(long)]
        template: Source,
        #[arg(long)]
        function: PathBuf,
    },
    /// Decide whether a condition is trivial and print the projections.
    Trivial {
        #[arg(long)]
        condition: PathBuf,
    },
    /// Search Pol(A, B) for an interpretation of a minor condition.
    Satisfy {
        #[arg(long)]
        condition: PathBuf,
        #[arg(long)]
        template: Source,
        /// Write the interpretation here instead of the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn an instance into a minor condition and a variable map.
    Reduce {
        #[arg(long)]
        template: Source,
        #[arg(long)]
        instance: PathBuf,
        /// Write the condition here instead of the report.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the variable map here instead of the report.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Read an assignment off an interpretation of a reduced condition.
    Decode {
        #[arg(long)]
        template: Source,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        interpretation: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Turn a minor condition into an instance over a structure.
    Unreduce {
        #[arg(long)]
        condition: PathBuf,
        #[arg(long, alias = "structure")]
        template: Source,
        /// Write the instance here instead of the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance harness.
    Selftest {
        /// Run only this criterion (1 to 8).
        #[arg(long)]
        criterion: Option<u8>,
    },
}

/// Exit code and report of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

#[derive(Debug)]
enum Failure {
    Lab(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lab(e)
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit { .. } => EXIT_RESOURCE,
        Error::PromiseViolation(_) => EXIT_PROMISE,
        Error::VerificationFailed(_) => EXIT_NO,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            return Outcome {
                code,
                report: e.render().to_string(),
            };
        }
    };
    execute(&cli)
}

/// Runs an already parsed command line.
pub fn execute(cli: &Cli) -> Outcome {
    let opts = &cli.options;
    match dispatch(&cli.command, opts) {
        Ok((code, text, value)) => Outcome {
            code,
            report: if opts.json { render_json(value) } else { text },
        },
        Err(f) => {
            let (code, message, kind) = match &f {
                Failure::Lab(e) => (exit_code(e), e.to_string(), "error"),
                Failure::Io(p, e) => (EXIT_USAGE, format!("{}: {e}", p.display()), "io"),
            };
            let report = if opts.json {
                render_json(json!({ "error": kind, "message": message, "exit_code": code }))
            } else {
                format!("error: {message}\n")
            };
            Outcome { code, report }
        }
    }
}

fn render_json(value: Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("JSON values serialize");
    s.push('\n');
    s
}

type Reply = Result<(i32, String, Value), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

/// A built-in spec, or a file holding a `structure` block or a
/// `yes-structure`/`no-structure` pair.
fn load(source: &str) -> Result<Builtin, Failure> {
    let path = Path::new(source);
    if !path.is_file() {
        return Ok(builtin_from_spec(source)?);
    }
    let text = read(path)?;
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    if first.starts_with("yes-structure") {
        Ok(Builtin::Template(PcspTemplate::parse(&text)?))
    } else {
        Ok(Builtin::Structure(RelationalStructure::parse(&text)?))
    }
}

fn load_template(source: &str) -> Result<PcspTemplate, Failure> {
    Ok(load(source)?.into_template())
}

fn load_structure(source: &str) -> Result<RelationalStructure, Failure> {
    Ok(load(source)?.into_structure()?)
}

fn load_instance(path: &Path) -> Result<PPInstance, Failure> {
    Ok(PPInstance::parse(&read(path)?)?)
}

fn load_condition(path: &Path) -> Result<Condition, Failure> {
    Ok(Condition::parse(&read(path)?)?)
}

fn assignment_text(inst: &PPInstance, values: &[usize]) -> String {
    inst.variables
        .iter()
        .zip(values)
        .map(|(v, x)| format!("{v} = {x}\n"))
        .collect()
}

fn assignment_json(inst: &PPInstance, values: &[usize]) -> Value {
    json!({ "variables": inst.variables, "values": values })
}

fn dispatch(command: &Command, opts: &Options) -> Reply {
    match command {
        Command::Solve { template, instance, oracle } => solve(template, instance, *oracle, opts),
        Command::Pcsp { template, instance, oracle } => pcsp(template, instance, *oracle, opts),
        Command::Polys { template, arity, limit } => polys(template, *arity, *limit, opts),
        Command::CheckPoly { template, function } => check_poly(template, function, opts),
        Command::Trivial { condition } => trivial(condition, opts),
        Command::Satisfy { condition, template, out } => satisfy(condition, template, out.as_deref(), opts),
        Command::Reduce { template, instance, out, map } => reduce(template, instance, out.as_deref(), map.as_deref()),
        Command::Decode {
            template,
            instance,
            interpretation,
            map,
        } => decode(template, instance, interpretation, map),
        Command::Unreduce { condition, template, out } => unreduce(condition, template, out.as_deref(), opts),
        Command::Selftest { criterion } => selftest(*criterion, opts),
    }
}

/// The `Z_p` of a structure equal to the built-in `3LIN_p`, if any.
fn lin_modulus(s: &RelationalStructure) -> Option<usize> {
    let p = s.domain_size;
    if p < 2 || s.relations.len() != p.pow(4) {
        return None;
    }
    lin(p).ok().filter(|l| l.relations == s.relations).map(|_| p)
}

fn solve(template: &str, instance: &Path, oracle: bool, opts: &Options) -> Reply {
    let s = load_structure(template)?;
    let inst = load_instance(instance)?;
    inst.check_signature(&s.signature())?;
    let is_2sat = s.domain_size == 2 && s.relations == two_sat().relations;
    let (solver, answer) = match (oracle, is_2sat, lin_modulus(&s)) {
        (false, true, _) => ("2sat", solve_2sat(&inst)?),
        (false, false, Some(p)) => {
            let (normal, map) = inst.normalize_with_map();
            let sys = lin_instance_to_system(&normal, p)?;
            let x = solve_mod_p(&sys)?;
            ("gaussian-elimination", x.map(|x| map.iter().map(|&m| x[m]).collect()))
        }
        _ => ("brute-force", brute_force_decide_threads(&inst, &s, opts.budget, opts.threads)?),
    };
    Ok(match answer {
        Some(a) => {
            if !inst.is_satisfied_by(&a, &s) {
                return Err(Error::VerificationFailed("solver returned a non-solution".into()).into());
            }
            (
                EXIT_YES,
                format!("sat\nsolver {solver}\n{}", assignment_text(&inst, &a)),
                json!({ "verdict": "sat", "solver": solver, "assignment": assignment_json(&inst, &a) }),
            )
        }
        None => (
            EXIT_NO,
            format!("unsat\nsolver {solver}\n"),
            json!({ "verdict": "unsat", "solver": solver }),
        ),
    })
}

fn pcsp(template: &str, instance: &Path, oracle: bool, opts: &Options) -> Reply {
    let t = load_template(template)?;
    let inst = load_instance(instance)?;
    inst.check_signature(&t.yes.signature())?;
    if !oracle && t == one_in_three_vs_nae() {
        return Ok(match solve_1in3_nae(&inst) {
            Ok(out) => {
                let rational: Vec<String> = out.rational.iter().map(ToString::to_string).collect();
                let mut text = format!("yes\nsolver rational-elimination\n{}", assignment_text(&inst, &out.coloring));
                for (v, r) in inst.variables.iter().zip(&rational) {
                    let _ = writeln!(text, "rational {v} = {r}");
                }
                (
                    EXIT_YES,
                    text,
                    json!({
                        "verdict": "yes",
                        "solver": "rational-elimination",
                        "assignment": assignment_json(&inst, &out.coloring),
                        "rational": rational,
                    }),
                )
            }
            Err(Error::PromiseViolation(why)) => (
                EXIT_PROMISE,
                format!("promise-violation\nsolver rational-elimination\nreason {why}\n"),
                json!({ "verdict": "promise-violation", "solver": "rational-elimination", "reason": why }),
            ),
            Err(e) => return Err(e.into()),
        });
    }
    Ok(match brute_force_pcsp_threads(&inst, &t, opts.budget, opts.threads)? {
        PcspVerdict::Yes(a) => (
            EXIT_YES,
            format!("yes\nsolver brute-force\n{}", assignment_text(&inst, &a)),
            json!({ "verdict": "yes", "solver": "brute-force", "assignment": assignment_json(&inst, &a) }),
        ),
        PcspVerdict::No => (
            EXIT_NO,
            "no\nsolver brute-force\n".into(),
            json!({ "verdict": "no", "solver": "brute-force" }),
        ),
        PcspVerdict::Indeterminate(b) => (
            EXIT_PROMISE,
            format!("indeterminate\nsolver brute-force\n{}", assignment_text(&inst, &b)),
            json!({ "verdict": "indeterminate", "solver": "brute-force", "assignment": assignment_json(&inst, &b) }),
        ),
    })
}

fn polys(template: &str, arity: usize, limit: Option<usize>, opts: &Options) -> Reply {
    let t = load_template(template)?;
    let mut found = Vec::new();
    for f in enumerate_polymorphisms(&t, arity, opts.budget)?.take(limit.unwrap_or(usize::MAX)) {
        found.push(f?);
    }
    let mut text = format!("count {}\n", found.len());
    for f in &found {
        text.push_str(&f.to_text());
    }
    Ok((
        EXIT_YES,
        text,
        json!({ "arity": arity, "count": found.len(), "polymorphisms": found }),
    ))
}

fn check_poly(template: &str, function: &Path, opts: &Options) -> Reply {
    let t = load_template(template)?;
    let f = FunctionTable::parse(&read(function)?)?;
    let ok = is_polymorphism(&f, &t, opts.budget)?;
    let verdict = if ok { "polymorphism" } else { "not a polymorphism" };
    Ok((
        if ok { EXIT_YES } else { EXIT_NO },
        format!("{verdict}\n"),
        json!({ "polymorphism": ok }),
    ))
}

fn trivial(condition: &Path, opts: &Options) -> Reply {
    let c = load_condition(condition)?;
    let choice = match &c {
        Condition::Minor(m) => m.projection_choice(),
        Condition::Strong(s) => s.triviality_witness(opts.budget)?.map(|w| {
            ProjectionChoice(
                s.symbols
                    .iter()
                    .zip(w)
                    .map(|((name, a), i)| (name.clone(), *a, i + 1))
                    .collect(),
            )
        }),
    };
    Ok(match choice {
        Some(p) => (
            EXIT_YES,
            format!("trivial\n{}", p.to_text()),
            json!({ "trivial": true, "witness": p }),
        ),
        None => (EXIT_NO, "nontrivial\n".into(), json!({ "trivial": false })),
    })
}

fn satisfy(condition: &Path, template: &str, out: Option<&Path>, opts: &Options) -> Reply {
    let c = load_condition(condition)?;
    let Some(m) = c.as_minor() else {
        return Err(Error::InvalidParameter("satisfy needs a minor condition (no nested terms or bare variables)".into()).into());
    };
    let t = load_template(template)?;
    Ok(match find_satisfying_interpretation(m, &t, opts.max_arity, opts.budget, opts.threads)? {
        Some(i) => {
            let mut text = String::from("satisfied\n");
            match out {
                Some(p) => {
                    write(p, &i.to_text())?;
                    let _ = writeln!(text, "interpretation written to {}", p.display());
                }
                None => text.push_str(&i.to_text()),
            }
            (EXIT_YES, text, json!({ "satisfied": true, "interpretation": i }))
        }
        None => (EXIT_NO, "not satisfied\n".into(), json!({ "satisfied": false })),
    })
}

fn reduce(template: &str, instance: &Path, out: Option<&Path>, map: Option<&Path>) -> Reply {
    let t = load_template(template)?;
    let inst = load_instance(instance)?.normalize();
    let art = instance_to_condition(&inst, &t)?;
    let condition = art.condition.to_text();
    let sidecar = art.variable_symbols.to_text();
    let mut text = String::new();
    match out {
        Some(p) => {
            write(p, &condition)?;
            let _ = writeln!(text, "condition written to {}", p.display());
        }
        None => text.push_str(&condition),
    }
    match map {
        Some(p) => {
            write(p, &sidecar)?;
            let _ = writeln!(text, "map written to {}", p.display());
        }
        None => text.push_str(&sidecar),
    }
    Ok((
        EXIT_YES,
        text,
        json!({ "condition": art.condition, "map": art.variable_symbols, "tuple_order": art.tuple_order }),
    ))
}

fn decode(template: &str, instance: &Path, interpretation: &Path, map: &Path) -> Reply {
    let t = load_template(template)?;
    let inst = load_instance(instance)?;
    let interp = Interpretation::parse(&read(interpretation)?)?;
    let symbols = SymbolMap::parse(&read(map)?)?;
    let (normal, back) = inst.normalize_with_map();
    let values = certificate_to_assignment(&interp, &symbols, &normal, &t)?;
    let full: Vec<usize> = back.iter().map(|&m| values[m]).collect();
    Ok((
        EXIT_YES,
        format!("verified\n{}", assignment_text(&inst, &full)),
        json!({ "verified": true, "assignment": assignment_json(&inst, &full) }),
    ))
}

fn unreduce(condition: &Path, template: &str, out: Option<&Path>, opts: &Options) -> Reply {
    let c = load_condition(condition)?;
    let Some(m) = c.as_minor() else {
        return Err(Error::InvalidParameter("unreduce needs a minor condition".into()).into());
    };
    let s = load_structure(template)?;
    let cells = condition_to_instance(m, &s, opts.budget)?;
    let inst = cells.instance.to_text();
    let text = match out {
        Some(p) => {
            write(p, &inst)?;
            format!("instance written to {}\n", p.display())
        }
        None => inst,
    };
    Ok((EXIT_YES, text, json!({ "instance": cells.instance })))
}

fn selftest(criterion: Option<u8>, opts: &Options) -> Reply {
    let config = SelftestConfig {
        seed: opts.seed,
        budget: opts.budget,
        threads: opts.threads,
    };
    let reports = match criterion {
        Some(id) => vec![run_criterion(id, &config)],
        None => run_all(&config),
    };
    let passed = reports.iter().all(|r| r.passed);
    let text = reports.iter().map(|r| r.line() + "\n").collect();
    Ok((
        if passed { EXIT_YES } else { EXIT_NO },
        text,
        json!({ "passed": passed, "criteria": reports }),
    ))
}
