//! Fixed-step RK4 integration and trajectory comparison.

use std::io::{self, Write};

use thiserror::Error;

use crate::ir::rational::to_f64;
use crate::ir::{DriftExpr, Drifts, EvalError, OdeSystem, Partition, Polynomial};
use crate::lump::Mode;

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// One row per sample time.
    pub states: Vec<Vec<f64>>,
    pub names: Vec<String>,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("t_end and dt must be positive and finite (t_end={t_end}, dt={dt})")]
    BadStep { t_end: f64, dt: f64 },
    #[error("sample interval must be at least 1")]
    BadSample,
    #[error("state became non-finite at t={0}")]
    NonFiniteState(f64),
    #[error("division by zero at t={0}")]
    DivisionByZero(f64),
    #[error("trajectories are sampled on different time grids")]
    GridMismatch,
    #[error("trajectory has {found} columns, partition needs {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// `(coefficient, [(variable, exponent)])`.
type FloatTerm = (f64, Vec<(usize, i32)>);

/// Drifts lowered to floating point.
enum Compiled {
    Poly(Vec<Vec<FloatTerm>>),
    Expr(Vec<DriftExpr>),
}

impl Compiled {
    fn new(system: &OdeSystem) -> Self {
        match system.drifts() {
            Drifts::Polynomial(ps) => Compiled::Poly(ps.iter().map(compile_poly).collect()),
            Drifts::Expr(es) => Compiled::Expr(es.clone()),
        }
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        match self {
            Compiled::Poly(ps) => {
                for (o, p) in out.iter_mut().zip(ps) {
                    *o = p.iter().map(|(c, vars)| vars.iter().fold(*c, |acc, &(v, e)| acc * x[v].powi(e))).sum();
                }
            }
            Compiled::Expr(es) => {
                for (o, e) in out.iter_mut().zip(es) {
                    *o = e.eval_f64(x)?;
                }
            }
        }
        Ok(())
    }
}

fn compile_poly(p: &Polynomial) -> Vec<(f64, Vec<(usize, i32)>)> {
    p.terms()
        .iter()
        .map(|t| (to_f64(&t.coefficient), t.exponents.iter().map(|(v, e)| (v, e as i32)).collect()))
        .collect()
}

/// Classical fourth-order Runge-Kutta with fixed step `dt` from the system's
/// initial state. A row is recorded at t=0, every `sample_every` steps, and at
/// `t_end`. When `t_end` is not a multiple of `dt` the last step is shortened.
pub fn integrate(system: &OdeSystem, t_end: f64, dt: f64, sample_every: usize) -> Result<Trajectory, SimError> {
    if !(t_end > 0.0 && dt > 0.0 && t_end.is_finite() && dt.is_finite()) {
        return Err(SimError::BadStep { t_end, dt });
    }
    if sample_every == 0 {
        return Err(SimError::BadSample);
    }
    let f = Compiled::new(system);
    let n = system.len();
    let mut x: Vec<f64> = system.init().iter().map(to_f64).collect();
    let ratio = t_end / dt;
    let steps = if (ratio - ratio.round()).abs() <= 1e-9 * ratio.max(1.0) {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    };
    let mut traj = Trajectory { times: vec![0.0], states: vec![x.clone()], names: system.names().to_vec() };

    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    for step in 1..=steps {
        let t0 = (step - 1) as f64 * dt;
        let t1 = if step == steps { t_end } else { step as f64 * dt };
        let h = t1 - t0;
        let div0 = |_| SimError::DivisionByZero(t0);
        f.eval(&x, &mut k1).map_err(div0)?;
        axpy(&x, 0.5 * h, &k1, &mut tmp);
        f.eval(&tmp, &mut k2).map_err(div0)?;
        axpy(&x, 0.5 * h, &k2, &mut tmp);
        f.eval(&tmp, &mut k3).map_err(div0)?;
        axpy(&x, h, &k3, &mut tmp);
        f.eval(&tmp, &mut k4).map_err(div0)?;
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFiniteState(t1));
        }
        if step % sample_every == 0 || step == steps {
            traj.times.push(t1);
            traj.states.push(x.clone());
        }
    }
    Ok(traj)
}

fn axpy(x: &[f64], a: f64, k: &[f64], out: &mut [f64]) {
    for ((o, xi), ki) in out.iter_mut().zip(x).zip(k) {
        *o = xi + a * ki;
    }
}

/// Largest deviation between a reduced trajectory and the original one.
///
/// Forward: `|y_B(t) - sum_{i in B} x_i(t)|`. Backward: `|x_rep(t) - x_i(t)|`
/// for every member `i`, with `x_rep` read from the reduced trajectory.
pub fn compare_reduction(
    orig: &Trajectory,
    red: &Trajectory,
    partition: &Partition,
    mode: Mode,
) -> Result<f64, SimError> {
    if orig.times.len() != red.times.len()
        || orig.times.iter().zip(&red.times).any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
    {
        return Err(SimError::GridMismatch);
    }
    let width = |t: &Trajectory| t.states.first().map_or(t.names.len(), Vec::len);
    if width(orig) != partition.len() {
        return Err(SimError::ShapeMismatch { expected: partition.len(), found: width(orig) });
    }
    if width(red) != partition.num_blocks() {
        return Err(SimError::ShapeMismatch { expected: partition.num_blocks(), found: width(red) });
    }
    let mut worst: f64 = 0.0;
    for (x, y) in orig.states.iter().zip(&red.states) {
        for (b, block) in partition.blocks().iter().enumerate() {
            match mode {
                Mode::Forward => {
                    let sum: f64 = block.iter().map(|&i| x[i]).sum();
                    worst = worst.max((y[b] - sum).abs());
                }
                Mode::Backward => {
                    for &i in block {
                        worst = worst.max((y[b] - x[i]).abs());
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// CSV with header `time,<names>` and values printed to 9 significant digits.
pub fn write_csv<W: Write>(traj: &Trajectory, mut sink: W) -> Result<(), SimError> {
    let mut header = String::from("time");
    for name in &traj.names {
        header.push(',');
        header.push_str(name);
    }
    writeln!(sink, "{header}")?;
    for (t, row) in traj.times.iter().zip(&traj.states) {
        let mut line = format_sig9(*t);
        for v in row {
            line.push(',');
            line.push_str(&format_sig9(*v));
        }
        writeln!(sink, "{line}")?;
    }
    sink.flush()?;
    Ok(())
}

/// `%.9g`-style formatting: plain decimal for moderate magnitudes, scientific
/// otherwise, trailing zeros removed.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
