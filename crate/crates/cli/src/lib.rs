//! The `confenv` command line: algebra files in, deterministic text out.

pub mod expr;
pub mod file;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use confenv_core::conformal::{check_axioms, check_module_jacobi, make_neveu_schwarz, make_virasoro, Kind};
use confenv_core::envelope::{
    build_envelope, check_table, graded_products, pk10_formulas, pk10_hatted_formulas, pk10_hatted_table,
    pk10_table, pv2_bounds, pv2_formulas, pv2_table_in, pv3_bounds, pv3_formulas, pv3_table_in,
    verify_graded_poisson, Envelope, Formula, EntryKind, GradedLabel, PoissonTable,
};
use confenv_core::error::Error;
use confenv_core::ops::{alg_composition_check, AlgebraRelations, Bounds, Mono, OpPoly};
use confenv_core::poly::Rational;

use file::AlgebraFile;
use report::{Counts, RunReport};

pub use expr::{parse_expr, Expr};
pub use file::{parse_algebra, render, ParseError};

#[derive(Parser, Debug)]
#[command(name = "confenv", version, about = "Conformal algebras, their envelopes and graded Poisson tables")]
pub struct Cli {
    /// Print a JSON run report instead of the text output
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Copy, Default)]
pub struct BoundArgs {
    /// X-degree bound (overrides the file)
    #[arg(long)]
    pub deg: Option<u32>,
    /// d-power bound (overrides the file)
    #[arg(long)]
    pub dpow: Option<u32>,
    /// Operator index bound (overrides the file)
    #[arg(long)]
    pub idx: Option<u32>,
}

impl BoundArgs {
    fn apply(&self, mut b: Bounds) -> Bounds {
        b.deg = self.deg.unwrap_or(b.deg);
        b.dpow = self.dpow.unwrap_or(b.dpow);
        b.idx = self.idx.unwrap_or(b.idx);
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Pv2,
    Pv3,
    Pk10,
    Generic,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the conformal axioms (and, for Lie algebras, the operator-algebra compositions)
    Verify {
        file: PathBuf,
        /// Largest d-power of the test elements
        #[arg(long, default_value_t = 2)]
        max_dpow: u32,
        /// Comma-separated generators spanning a Lie subalgebra; checks the module Jacobi identity
        #[arg(long, value_delimiter = ',')]
        module: Vec<String>,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Complete the envelope presentation and print its rules
    Complete {
        file: PathBuf,
        /// Only the rules not implied by shorter ones
        #[arg(long)]
        essential: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Reduce an envelope expression such as `prod(2, v, prod(2, v, v))`
    NormalForm {
        file: PathBuf,
        expr: String,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// List the reduced words up to an X-degree and a d-power
    Basis {
        file: PathBuf,
        #[arg(value_name = "DEGREE")]
        max_degree: u32,
        #[arg(value_name = "DPOW")]
        max_dpow: u32,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Dump a graded Poisson table
    Table {
        file: PathBuf,
        #[arg(value_enum)]
        target: Target,
        #[arg(long, default_value_t = 4)]
        cap: u32,
        /// Use the hatted basis (pk10 only)
        #[arg(long)]
        hatted: bool,
        /// Compare entries with the closed forms
        #[arg(long)]
        check: bool,
        /// Check the Poisson axioms on the table
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
}

/// Exit codes of the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Code {
    Ok = 0,
    Failed = 1,
    Usage = 2,
    Bound = 3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: Code,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: Code,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: Code::Usage,
        message: message.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BoundExceeded(_) => Code::Bound,
            _ => Code::Failed,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// What a command produced before the report is assembled.
#[derive(Default)]
struct Done {
    text: String,
    counts: Counts,
    failures: Vec<String>,
}

fn load(path: &PathBuf) -> Result<(String, AlgebraFile), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let f = parse_algebra(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok((text, f))
}

fn envelope(f: &AlgebraFile, bounds: &Bounds) -> Result<Envelope, Failure> {
    if f.desc.kind != Kind::Lie {
        return Err(usage(format!("envelopes need a lie algebra, `{}` is {}", f.desc.name, f.desc.kind.keyword())));
    }
    Ok(build_envelope(&f.desc, &f.desc.locality, f.order, bounds)?)
}

fn verify(f: &AlgebraFile, max_dpow: u32, module: &[String], bounds: &Bounds) -> Result<Done, Failure> {
    let mut done = Done::default();
    let rep = check_axioms(&f.desc, max_dpow);
    done.text += &format!("axioms: {} checked, {} skipped\n", rep.checked, rep.skipped);
    done.counts.entries_verified += rep.checked;
    done.failures.extend(rep.failures);
    if f.desc.kind == Kind::Lie {
        let rels = AlgebraRelations::with_lie(&f.desc, f.order);
        let comp = alg_composition_check(&rels, bounds);
        done.text += &format!("compositions: {} checked, {} nontrivial\n", comp.checked, comp.residues.len());
        done.counts.compositions_checked += comp.checked;
        done.failures
            .extend(comp.residues.into_iter().map(|(w, r)| format!("composition at {w}: {r}")));
    }
    if !module.is_empty() {
        let gens = module
            .iter()
            .map(|g| f.desc.gens.index(g).ok_or_else(|| usage(format!("unknown generator `{g}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let rep = check_module_jacobi(&f.desc, &gens, max_dpow)?;
        done.text += &format!("module jacobi: {} checked, {} skipped\n", rep.checked, rep.skipped);
        done.counts.entries_verified += rep.checked;
        done.failures.extend(rep.failures);
    }
    for fl in &done.failures {
        done.text += &format!("FAIL {fl}\n");
    }
    Ok(done)
}

fn render_word(env: &Envelope, m: &Mono) -> String {
    env.monomial_order().render_word(m, env.gens())
}

fn require_algebra(f: &AlgebraFile, model: &confenv_core::conformal::ConformalAlgebraDesc, target: &str) -> Result<(), Failure> {
    if f.desc.kind != Kind::Lie || f.desc.gens != model.gens || f.desc.bracket != model.bracket {
        return Err(usage(format!("the {target} table needs the {} algebra", model.name)));
    }
    Ok(())
}

fn require_locality(f: &AlgebraFile, n: u32, target: &str) -> Result<(), Failure> {
    if f.desc.locality.get(0, 0) != n {
        return Err(usage(format!("the {target} table needs locality N(v, v) = {n}")));
    }
    Ok(())
}

fn generic_table(env: &Envelope, cap: u32) -> Result<Done, Failure> {
    let words = env.completion.enumerate_reduced(cap, 0);
    let one = |m: &Mono| OpPoly::from([(m.clone(), Rational::from_integer(1.into()))]);
    let mut lines = Vec::new();
    for u in &words {
        for w in &words {
            let (n, m) = (env.degree(u), env.degree(w));
            if n + m > env.bounds().deg {
                continue;
            }
            let gp = graded_products(env, &one(u), n, &one(w), m)?;
            let (su, sw) = (render_word(env, u), render_word(env, w));
            lines.push((EntryKind::Bracket, su.clone(), sw.clone(), env.render_lambda(&gp.bracket)));
            lines.push((EntryKind::Comm, su, sw, env.render_lambda(&gp.comm)));
        }
    }
    lines.sort();
    let mut done = Done::default();
    done.counts.entries_verified = lines.len();
    for (k, a, b, v) in lines {
        done.text += &format!("{} [{a}] [{b}] = {v}\n", k.keyword());
    }
    Ok(done)
}

type Formulas = fn(EntryKind, GradedLabel, GradedLabel) -> Vec<Formula>;

fn table(f: &AlgebraFile, target: Target, cap: u32, hatted: bool, check: bool, verify: bool, bounds: &Bounds) -> Result<Done, Failure> {
    if cap == 0 {
        return Err(usage("--cap must be positive"));
    }
    if hatted && target != Target::Pk10 {
        return Err(usage("--hatted applies to pk10 only"));
    }
    let (t, formulas): (PoissonTable, Formulas) = match target {
        Target::Pv2 | Target::Pv3 => {
            let (name, n) = if target == Target::Pv2 { ("pv2", 2) } else { ("pv3", 3) };
            require_algebra(f, &make_virasoro(), name)?;
            require_locality(f, n, name)?;
            if target == Target::Pv2 {
                let env = build_envelope(&f.desc, &f.desc.locality, f.order, &pv2_bounds(cap))?;
                (pv2_table_in(&env, cap)?, pv2_formulas)
            } else {
                let env = build_envelope(&f.desc, &f.desc.locality, f.order, &pv3_bounds(cap))?;
                (pv3_table_in(&env, cap)?, pv3_formulas)
            }
        }
        Target::Pk10 => {
            require_algebra(f, &make_neveu_schwarz(), "pk10")?;
            if hatted {
                (pk10_hatted_table(cap)?, pk10_hatted_formulas)
            } else {
                (pk10_table(cap)?, pk10_formulas)
            }
        }
        Target::Generic => {
            if check || verify {
                return Err(usage("--check and --verify need a labelled table"));
            }
            return generic_table(&envelope(f, bounds)?, cap);
        }
    };
    let mut done = Done {
        text: t.dump(),
        ..Done::default()
    };
    done.counts.entries_verified = t.entries.len();
    if check {
        let rep = check_table(&t, formulas, |_, _, _| true);
        done.failures.extend(rep.mismatches);
    }
    if verify {
        let rep = verify_graded_poisson(&t, cap)?;
        done.failures.extend(rep.failures);
    }
    for fl in &done.failures {
        done.text += &format!("FAIL {fl}\n");
    }
    Ok(done)
}

fn dispatch(cmd: &Command, digest: &mut report::Digest) -> Result<Done, Failure> {
    match cmd {
        Command::Verify {
            file,
            max_dpow,
            module,
            bounds,
        } => {
            let (text, f) = load(file)?;
            digest.add(&text);
            digest.add(&format!("{max_dpow} {module:?} {bounds:?}"));
            verify(&f, *max_dpow, module, &bounds.apply(f.bounds))
        }
        Command::Complete { file, essential, bounds } => {
            let (text, f) = load(file)?;
            digest.add(&text);
            digest.add(&format!("{essential} {bounds:?}"));
            let env = envelope(&f, &bounds.apply(f.bounds))?;
            let sys = env.system();
            let rules = if *essential { sys.essential_rules() } else { sys.rules() };
            let mut done = Done::default();
            for (l, r) in &rules {
                done.text += &sys.render_rule(l, r);
                done.text.push('\n');
            }
            done.counts.rules_discovered = sys.rule_count();
            done.counts.compositions_checked = env.completion.certificate.len();
            Ok(done)
        }
        Command::NormalForm { file, expr, bounds } => {
            let (text, f) = load(file)?;
            digest.add(&text);
            digest.add(&format!("{expr} {bounds:?}"));
            let e = parse_expr(expr).map_err(|e| usage(format!("expression: {e}")))?;
            if let Some(g) = e.gens().into_iter().find(|g| f.desc.gens.index(g).is_none()) {
                return Err(usage(format!("expression: unknown generator `{g}`")));
            }
            let env = envelope(&f, &bounds.apply(f.bounds))?;
            let nf = env.normal_form(&e.eval(&env)?)?;
            Ok(Done {
                text: format!("{}\n", env.render(&nf)),
                ..Done::default()
            })
        }
        Command::Basis {
            file,
            max_degree: degree,
            max_dpow: dpow,
            bounds,
        } => {
            let (text, f) = load(file)?;
            digest.add(&text);
            digest.add(&format!("{degree} {dpow} {bounds:?}"));
            let b = bounds.apply(f.bounds);
            if *degree > b.deg || *dpow > b.dpow {
                return Err(Error::BoundExceeded(format!(
                    "basis caps (deg {degree}, dpow {dpow}) exceed the completion bounds (deg {}, dpow {})",
                    b.deg, b.dpow
                ))
                .into());
            }
            let env = envelope(&f, &b)?;
            let words = env.completion.enumerate_reduced(*degree, *dpow);
            let mut done = Done::default();
            for w in &words {
                done.text += &render_word(&env, w);
                done.text.push('\n');
            }
            done.counts.entries_verified = words.len();
            Ok(done)
        }
        Command::Table {
            file,
            target,
            cap,
            hatted,
            check,
            verify,
            bounds,
        } => {
            let (text, f) = load(file)?;
            digest.add(&text);
            digest.add(&format!("{target:?} {cap} {hatted} {check} {verify} {bounds:?}"));
            table(&f, *target, *cap, *hatted, *check, *verify, &bounds.apply(f.bounds))
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Verify { .. } => "verify",
        Command::Complete { .. } => "complete",
        Command::NormalForm { .. } => "normal-form",
        Command::Basis { .. } => "basis",
        Command::Table { .. } => "table",
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let name = command_name(&cli.command);
    let mut digest = report::Digest::new(name);
    let (code, done, error) = match dispatch(&cli.command, &mut digest) {
        Ok(done) => {
            let code = if done.failures.is_empty() { Code::Ok } else { Code::Failed };
            (code, done, None)
        }
        Err(fl) => (fl.code, Done::default(), Some(fl.message)),
    };
    let mut failures = done.failures.clone();
    failures.extend(error.clone());
    if cli.json {
        let rep = RunReport::new(name, digest.finish(), done.counts, failures);
        return Outcome {
            code,
            stdout: rep.to_json() + "\n",
            stderr: String::new(),
        };
    }
    Outcome {
        code,
        stdout: done.text,
        stderr: error.map(|e| format!("error: {e}\n")).unwrap_or_default(),
    }
}

/// Parses arguments and runs; argument errors come back as usage failures.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome {
                    code: Code::Usage,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: Code::Ok,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
    }
}
