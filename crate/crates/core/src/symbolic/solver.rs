//! Running an SMT-LIB 2 solver as a subprocess and reading its answer.

use std::collections::BTreeMap;
use std::io::{ErrorKind, Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use num_traits::Zero;
use thiserror::Error;

use crate::ir::rational::parse_rational;
use crate::ir::Rational;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("solver `{0}` not found")]
    NotFound(String),
    #[error("solver did not answer within {0:?}")]
    Timeout(Duration),
    #[error("unexpected solver output: {0}")]
    Protocol(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Unsat,
    /// Values for the constants the solver reported, keyed by name.
    Sat(BTreeMap<String, Rational>),
    Unknown(String),
}

/// A solver command line reading a script on stdin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverCommand {
    pub program: String,
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl SolverCommand {
    /// Splits `cmdline` on whitespace.
    pub fn parse(cmdline: &str, timeout: Duration) -> Option<Self> {
        let mut words = cmdline.split_whitespace().map(str::to_string);
        let program = words.next()?;
        Some(SolverCommand { program, args: words.collect(), timeout })
    }

    pub fn z3() -> Self {
        SolverCommand { program: "z3".into(), args: vec!["-in".into()], timeout: DEFAULT_TIMEOUT }
    }

    /// `$ODELUMP_SOLVER` when set, `z3 -in` otherwise.
    pub fn from_env() -> Self {
        std::env::var("ODELUMP_SOLVER")
            .ok()
            .and_then(|c| SolverCommand::parse(&c, DEFAULT_TIMEOUT))
            .unwrap_or_else(SolverCommand::z3)
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    /// Whether the solver answers a trivial query.
    pub fn is_available(&self) -> bool {
        let probe = "(set-logic QF_NRA)\n(assert false)\n(check-sat)\n";
        let quick = self.clone().with_timeout(self.timeout.min(Duration::from_secs(10)));
        matches!(run_raw(&quick, probe), Ok(out) if out.trim_start().starts_with("unsat"))
    }
}

pub fn solver_invoke(script: &str, solver: &SolverCommand) -> Result<Verdict, SolverError> {
    let out = run_raw(solver, script)?;
    parse_response(&out)
}

fn run_raw(solver: &SolverCommand, script: &str) -> Result<String, SolverError> {
    let mut child = Command::new(&solver.program)
        .args(&solver.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| match e.kind() {
            ErrorKind::NotFound | ErrorKind::PermissionDenied => SolverError::NotFound(solver.program.clone()),
            _ => SolverError::Protocol(e.to_string()),
        })?;

    let mut stdin = child.stdin.take().expect("piped stdin");
    let input = script.to_string();
    let writer = thread::spawn(move || {
        // a solver that exits early closes the pipe; its output tells the story
        let _ = stdin.write_all(input.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = thread::spawn(move || {
        let mut buf = String::new();
        let _ = stdout.read_to_string(&mut buf);
        buf
    });

    let deadline = Instant::now() + solver.timeout;
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(SolverError::Timeout(solver.timeout));
            }
            Ok(None) => thread::sleep(Duration::from_millis(2)),
            Err(e) => return Err(SolverError::Protocol(e.to_string())),
        }
    }
    let _ = writer.join();
    reader.join().map_err(|_| SolverError::Protocol("reader thread panicked".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(text: &str) -> Result<Vec<String>, SolverError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' | ')' => {
                out.push(c.to_string());
                chars.next();
            }
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '|' | '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some(d) if d == c => break,
                        Some(d) => s.push(d),
                        None => return Err(SolverError::Protocol("unterminated quoted token".into())),
                    }
                }
                out.push(s);
            }
            _ => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || d == '(' || d == ')' {
                        break;
                    }
                    s.push(d);
                    chars.next();
                }
                out.push(s);
            }
        }
    }
    Ok(out)
}

fn parse_sexps(text: &str) -> Result<Vec<Sexp>, SolverError> {
    let tokens = tokenize(text)?;
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    for t in tokens {
        match t.as_str() {
            "(" => stack.push(Vec::new()),
            ")" => {
                let done = stack.pop().filter(|_| !stack.is_empty());
                let done = done.ok_or_else(|| SolverError::Protocol("unbalanced `)`".into()))?;
                stack.last_mut().expect("outer level").push(Sexp::List(done));
            }
            _ => stack.last_mut().expect("outer level").push(Sexp::Atom(t)),
        }
    }
    if stack.len() != 1 {
        return Err(SolverError::Protocol("unbalanced `(`".into()));
    }
    Ok(stack.pop().unwrap_or_default())
}

fn parse_response(out: &str) -> Result<Verdict, SolverError> {
    let items = parse_sexps(out)?;
    let mut iter = items.iter();
    match iter.next() {
        Some(Sexp::Atom(a)) if a == "unsat" => Ok(Verdict::Unsat),
        Some(Sexp::Atom(a)) if a == "unknown" => Ok(Verdict::Unknown("solver returned unknown".into())),
        Some(Sexp::Atom(a)) if a == "sat" => match iter.next() {
            Some(Sexp::List(defs)) => parse_model(defs),
            _ => Err(SolverError::Protocol(format!("sat without a model: {}", out.trim()))),
        },
        _ => Err(SolverError::Protocol(out.trim().to_string())),
    }
}

fn parse_model(defs: &[Sexp]) -> Result<Verdict, SolverError> {
    let mut model = BTreeMap::new();
    for def in defs {
        let Sexp::List(parts) = def else {
            // older z3 prefixes the list with `model`
            continue;
        };
        match parts.as_slice() {
            [Sexp::Atom(kw), Sexp::Atom(name), Sexp::List(args), _sort, value] if kw == "define-fun" => {
                if !args.is_empty() {
                    continue;
                }
                match model_value(value)? {
                    Some(v) => {
                        model.insert(name.clone(), v);
                    }
                    None => return Ok(Verdict::Unknown("irrational-model".into())),
                }
            }
            _ => return Err(SolverError::Protocol(format!("unrecognised model entry {def:?}"))),
        }
    }
    Ok(Verdict::Sat(model))
}

/// `Ok(None)` for values outside the rationals (algebraic numbers).
fn model_value(v: &Sexp) -> Result<Option<Rational>, SolverError> {
    let bad = || SolverError::Protocol(format!("unrecognised model value {v:?}"));
    match v {
        Sexp::Atom(a) => parse_rational(a).map(Some).ok_or_else(bad),
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(op), x] if op == "-" => Ok(model_value(x)?.map(|x| -x)),
            [Sexp::Atom(op), a, b] if op == "/" => match (model_value(a)?, model_value(b)?) {
                (Some(_), Some(b)) if b.is_zero() => Err(bad()),
                (Some(a), Some(b)) => Ok(Some(a / b)),
                _ => Ok(None),
            },
            [Sexp::Atom(op), ..] if op == "root-obj" => Ok(None),
            _ => Err(bad()),
        },
    }
}

/// Total assignment over `names`; constants the solver left out are zero.
pub fn model_assignment<S: AsRef<str>>(model: &BTreeMap<String, Rational>, names: &[S]) -> Vec<Rational> {
    names.iter().map(|n| model.get(n.as_ref()).cloned().unwrap_or_else(Rational::zero)).collect()
}
