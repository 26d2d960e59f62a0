//! Young conjugate `φ*_ω(x) = sup_{t ≥ 0} (x t − ω(e^t))` and the log-domain
//! weight factors `−λ φ*(n/λ)` that enter every seminorm.

use serde::{Deserialize, Serialize};

use crate::error::{GsError, Result};
use crate::numeric::golden_max;
use crate::weights::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjugateMethod {
    ClosedFormGevrey,
    NumericSup { tolerance: f64, t_max: f64 },
}

impl ConjugateMethod {
    pub const DEFAULT_NUMERIC: ConjugateMethod = ConjugateMethod::NumericSup { tolerance: 1e-12, t_max: 100.0 };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YoungConjugate {
    pub weight: Weight,
    pub method: ConjugateMethod,
}

/// Bracket doublings allowed before reporting a boundary hit.
const MAX_EXPANSIONS: u32 = 40;

impl YoungConjugate {
    pub fn new(weight: Weight, method: ConjugateMethod) -> Result<Self> {
        weight.validate()?;
        if method == ConjugateMethod::ClosedFormGevrey && weight.gevrey_exponent().is_none() {
            return Err(GsError::Domain(format!("no closed-form conjugate for {weight}")));
        }
        if let ConjugateMethod::NumericSup { tolerance, t_max } = method {
            if !(tolerance > 0.0) || !(t_max > 0.0) {
                return Err(GsError::Domain("numeric conjugate needs tolerance > 0 and t_max > 0".into()));
            }
        }
        Ok(YoungConjugate { weight, method })
    }

    /// Closed form when the weight reduces to a Gevrey weight, numeric otherwise.
    pub fn auto(weight: &Weight) -> Self {
        let method = if weight.gevrey_exponent().is_some() {
            ConjugateMethod::ClosedFormGevrey
        } else {
            ConjugateMethod::DEFAULT_NUMERIC
        };
        YoungConjugate { weight: weight.clone(), method }
    }

    pub fn numeric(weight: &Weight) -> Self {
        YoungConjugate { weight: weight.clone(), method: ConjugateMethod::DEFAULT_NUMERIC }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(GsError::Domain(format!("conjugate evaluated at negative x = {x}")));
        }
        match self.method {
            ConjugateMethod::ClosedFormGevrey => {
                let d = self
                    .weight
                    .gevrey_exponent()
                    .ok_or_else(|| GsError::Domain(format!("no closed-form conjugate for {}", self.weight)))?;
                Ok(gevrey_conjugate(d, x))
            }
            ConjugateMethod::NumericSup { tolerance, t_max } => numeric_conjugate(&self.weight, x, tolerance, t_max),
        }
    }
}

/// Exact conjugate of `e^{t/d}` on `t ≥ 0`: `x d ln(x d / e)` past the knee
/// `x = 1/d`, and `−1` (supremum at `t = 0`) below it.
pub fn gevrey_conjugate(d: f64, x: f64) -> f64 {
    let xd = x * d;
    if xd >= 1.0 {
        xd * (xd.ln() - 1.0)
    } else {
        -1.0
    }
}

fn numeric_conjugate(w: &Weight, x: f64, tol: f64, t_max0: f64) -> Result<f64> {
    let g = |t: f64| x * t - w.phi(t);
    let mut t_max = t_max0;
    let mut expansions = 0;
    // Concave objective: if it still increases at t_max the maximizer lies beyond.
    while g(t_max) > g(t_max * (1.0 - 1e-9)) {
        if expansions == MAX_EXPANSIONS {
            return Err(GsError::BoundaryHit { x, t_max });
        }
        t_max *= 2.0;
        expansions += 1;
    }
    let (_, v) = golden_max(g, 0.0, t_max, tol);
    Ok(v)
}

/// `φ_ω(t) = ω(e^t)`.
pub fn phi(w: &Weight, t: f64) -> f64 {
    w.phi(t)
}

pub fn young_conjugate(yc: &YoungConjugate, x: f64) -> Result<f64> {
    yc.eval(x)
}

/// `ln` of the seminorm weight `exp(−λ φ*(n/λ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFactor {
    pub log_value: f64,
    pub lambda: f64,
    pub n: usize,
}

pub fn log_weight_factor(w: &Weight, lambda: f64, n: usize) -> Result<LogFactor> {
    log_weight_factor_with(&YoungConjugate::auto(w), lambda, n)
}

pub fn log_weight_factor_with(yc: &YoungConjugate, lambda: f64, n: usize) -> Result<LogFactor> {
    if !(lambda > 0.0) {
        return Err(GsError::Domain(format!("lambda = {lambda} must be > 0")));
    }
    let v = yc.eval(n as f64 / lambda)?;
    Ok(LogFactor { log_value: -lambda * v, lambda, n })
}

/// Table of `−λ φ*(n/λ)` for `n = 0..=n_max`.
pub fn log_weight_table(yc: &YoungConjugate, lambda: f64, n_max: usize) -> Result<Vec<f64>> {
    (0..=n_max).map(|n| log_weight_factor_with(yc, lambda, n).map(|f| f.log_value)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftConstants {
    pub mu: f64,
    pub a: f64,
    pub d: f64,
    /// Largest `n` on which the inequality was verified.
    pub n_check: usize,
}

pub const SHIFT_CHECK_RANGE: usize = 200;

/// Constants `(μ, A, D)` with
/// `exp(−λφ*(n/λ)) ≤ D A^{−n} exp(−μφ*(n/μ))` for `n = 0..=200`.
///
/// Gevrey weights use `μ = 2λ`, `A = 2^d`; other weights use `μ = 2λ`,
/// `A = 2`. `D` absorbs the knee region and the whole choice is re-verified.
pub fn lambda_shift_constants(w: &Weight, lambda: f64) -> Result<ShiftConstants> {
    if !(lambda > 0.0) {
        return Err(GsError::Domain(format!("lambda = {lambda} must be > 0")));
    }
    let yc = YoungConjugate::auto(w);
    let mu = 2.0 * lambda;
    let a = match w.gevrey_exponent() {
        Some(d) => 2f64.powf(d),
        None => 2.0,
    };
    let lhs = log_weight_table(&yc, lambda, SHIFT_CHECK_RANGE)?;
    let rhs = log_weight_table(&yc, mu, SHIFT_CHECK_RANGE)?;
    let excess: Vec<f64> = (0..=SHIFT_CHECK_RANGE)
        .map(|n| lhs[n] + n as f64 * a.ln() - rhs[n])
        .collect();
    let c0 = excess.iter().copied().fold(0.0, f64::max);
    // The excess must be non-increasing at the end of the range, otherwise D
    // would only be a range artefact.
    let tail = &excess[SHIFT_CHECK_RANGE - 10..];
    if tail.windows(2).any(|p| p[1] > p[0] + 1e-9) {
        return Err(GsError::Inconsistent(format!(
            "shift constants for {w} (lambda = {lambda}) not eventually decreasing"
        )));
    }
    let d = c0.exp() * (1.0 + 1e-12);
    for n in 0..=SHIFT_CHECK_RANGE {
        if lhs[n] > d.ln() - n as f64 * a.ln() + rhs[n] + 1e-9 {
            return Err(GsError::Inconsistent(format!("shift inequality fails at n = {n}")));
        }
    }
    Ok(ShiftConstants { mu, a, d, n_check: SHIFT_CHECK_RANGE })
}
