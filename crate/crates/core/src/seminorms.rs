//! Gelfand-Shilov seminorms on a truncated index set, with attainment
//! reporting.
//!
//! Every quantity is handled as a natural log. Cells are `(j, q)` pairs with
//! `j + q ≤ M` (`q = 0` for the exponential family).

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conjugate::{lambda_shift_constants, log_weight_table, YoungConjugate};
use crate::error::{GsError, Result};
use crate::jets::{jet_of, FunctionModel, Jet};
use crate::logsigned::ln_factorial;
use crate::numeric::{golden_max, log_space};
use crate::weights::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeminormFamily {
    /// `(1+|x|)^q |f^{(j)}(x)| e^{−λφ*((j+q)/λ)}`.
    GlobalP { lambda: f64 },
    /// `|x|^q |f^{(j)}(x)| e^{−λφ*((j+q)/λ)}`.
    PlainP { lambda: f64 },
    /// `|f^{(n)}(x)| e^{−λφ*(n/λ)} e^{μω(|x|)}`.
    ExpQ { lambda: f64, mu: f64 },
    /// `|x|^q |f^{(j)}(x)| μ^{j+q} / (j!^s q!^s)`.
    GevreySeq { mu: f64, s: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormSpec {
    pub family: SeminormFamily,
    pub weight: Weight,
}

impl SeminormSpec {
    pub fn new(family: SeminormFamily, weight: Weight) -> Result<Self> {
        let spec = SeminormSpec { family, weight };
        spec.validate()?;
        Ok(spec)
    }

    pub fn plain_p(weight: Weight, lambda: f64) -> Result<Self> {
        Self::new(SeminormFamily::PlainP { lambda }, weight)
    }

    pub fn global_p(weight: Weight, lambda: f64) -> Result<Self> {
        Self::new(SeminormFamily::GlobalP { lambda }, weight)
    }

    pub fn exp_q(weight: Weight, lambda: f64, mu: f64) -> Result<Self> {
        Self::new(SeminormFamily::ExpQ { lambda, mu }, weight)
    }

    pub fn validate(&self) -> Result<()> {
        self.weight.validate()?;
        let pos = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(GsError::Domain(format!("{name} = {v} must be > 0")))
            }
        };
        match self.family {
            SeminormFamily::GlobalP { lambda } | SeminormFamily::PlainP { lambda } => pos(lambda, "lambda"),
            SeminormFamily::ExpQ { lambda, mu } => pos(lambda, "lambda").and(pos(mu, "mu")),
            SeminormFamily::GevreySeq { mu, s } => {
                pos(mu, "mu")?;
                if s > 1.0 {
                    Ok(())
                } else {
                    Err(GsError::Domain(format!("gevrey index s = {s} must be > 1")))
                }
            }
        }
    }

    fn has_q(&self) -> bool {
        !matches!(self.family, SeminormFamily::ExpQ { .. })
    }

    /// The same family with its λ replaced (μ for the sequence family).
    pub fn with_lambda(&self, lambda: f64) -> SeminormSpec {
        let family = match self.family {
            SeminormFamily::GlobalP { .. } => SeminormFamily::GlobalP { lambda },
            SeminormFamily::PlainP { .. } => SeminormFamily::PlainP { lambda },
            SeminormFamily::ExpQ { mu, .. } => SeminormFamily::ExpQ { lambda, mu },
            SeminormFamily::GevreySeq { s, .. } => SeminormFamily::GevreySeq { mu: lambda, s },
        };
        SeminormSpec { family, weight: self.weight.clone() }
    }
}

/// Anything whose jets can be sampled at arbitrary real points.
pub trait JetSource: Sync {
    fn jet(&self, x: f64, order: usize) -> Result<Jet>;
    /// `(center, width)` used to place the grid; `None` for formal jets.
    fn frame(&self) -> Option<(f64, f64)>;
    fn check(&self) -> Result<()> {
        Ok(())
    }
}

impl JetSource for FunctionModel {
    fn jet(&self, x: f64, order: usize) -> Result<Jet> {
        jet_of(self, x, order)
    }

    fn frame(&self) -> Option<(f64, f64)> {
        FunctionModel::frame(self)
    }

    fn check(&self) -> Result<()> {
        self.validate()
    }
}

/// How the spatial and index search is set up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpec {
    /// Grid points on each side of the model's center.
    pub half_points: usize,
    /// Fixed truncation order; `None` grows `M` until the outer shells vanish.
    pub order: Option<usize>,
    pub start_order: usize,
    pub max_order: usize,
    /// Relative size below which excluded cells are ignored.
    pub epsilon: f64,
    /// Evaluate at a single point instead of searching.
    pub at: Option<f64>,
    /// Also derive the tail-lemma bound on the truncation.
    pub certify: bool,
}

impl Default for SearchSpec {
    fn default() -> Self {
        SearchSpec {
            half_points: 1024,
            order: None,
            start_order: 20,
            max_order: 200,
            epsilon: 1e-12,
            at: None,
            certify: false,
        }
    }
}

impl SearchSpec {
    pub fn fixed(order: usize) -> Self {
        SearchSpec { order: Some(order), ..Self::default() }
    }

    pub fn at_point(x: f64, order: usize) -> Self {
        SearchSpec { order: Some(order), at: Some(x), ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Attainment {
    pub j: usize,
    pub q: usize,
    pub x: f64,
    #[serde(with = "crate::logsigned::serde_log")]
    pub log_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCertificate {
    pub mu: f64,
    pub a: f64,
    pub d: f64,
    /// `ln` of the shifted-parameter seminorm used as the bound.
    #[serde(with = "crate::logsigned::serde_log")]
    pub log_bound: f64,
    /// Order beyond which the lemma guarantees the excluded cells are
    /// below `epsilon` times the reported value.
    pub m_lemma: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationInfo {
    pub m: usize,
    /// Largest `|x − center|` on the grid.
    pub radius: f64,
    /// Largest log value on the outer shells `M − 4 ≤ j + q ≤ M`.
    #[serde(with = "crate::logsigned::serde_log")]
    pub shell_log_max: f64,
    pub epsilon: f64,
    pub shells_negligible: bool,
    pub lemma: Option<LemmaCertificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttainmentReport {
    #[serde(with = "crate::logsigned::serde_log")]
    pub log_value: f64,
    pub arg: Attainment,
    pub truncation: TruncationInfo,
    pub runner_up: Option<Attainment>,
    #[serde(with = "crate::logsigned::serde_log::opt")]
    pub gap: Option<f64>,
}

impl AttainmentReport {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// Smallest `M ≥ 0` with `D · A^{−M} · bound ≤ ε`.
pub fn truncation_order_with(d: f64, a: f64, bound: f64, eps: f64) -> Result<usize> {
    if !(bound.is_finite() && bound >= 0.0) || !(d.is_finite() && d > 0.0) {
        return Err(GsError::Domain("truncation bound must be finite".into()));
    }
    if !(eps > 0.0) || !(a > 1.0) {
        return Err(GsError::Domain("truncation needs eps > 0 and A > 1".into()));
    }
    if bound == 0.0 {
        return Ok(0);
    }
    let m = (d.ln() + bound.ln() - eps.ln()) / a.ln();
    Ok((m - 1e-12).ceil().max(0.0) as usize)
}

/// [`truncation_order_with`] using the shift constants of `(w, λ)`.
pub fn truncation_order(w: &Weight, lambda: f64, bound_p_mu: f64, eps: f64) -> Result<usize> {
    if !bound_p_mu.is_finite() {
        return Err(GsError::Domain("truncation bound must be finite".into()));
    }
    let sc = lambda_shift_constants(w, lambda)?;
    truncation_order_with(sc.d, sc.a, bound_p_mu, eps)
}

/// Per-order additive terms of the log expression.
struct Terms {
    spec: SeminormSpec,
    /// Indexed by `j + q` (or `n`).
    index_term: Vec<f64>,
    /// Indexed by `q` (sequence family only).
    q_term: Vec<f64>,
    j_term: Vec<f64>,
}

impl Terms {
    fn new(spec: &SeminormSpec, m: usize) -> Result<Self> {
        let (index_term, j_term, q_term) = match spec.family {
            SeminormFamily::GlobalP { lambda } | SeminormFamily::PlainP { lambda } | SeminormFamily::ExpQ { lambda, .. } => {
                let yc = YoungConjugate::auto(&spec.weight);
                (log_weight_table(&yc, lambda, m)?, vec![0.0; m + 1], vec![0.0; m + 1])
            }
            SeminormFamily::GevreySeq { mu, s } => {
                let idx = (0..=m).map(|k| k as f64 * mu.ln()).collect();
                let f: Vec<f64> = (0..=m).map(|k| -s * ln_factorial(k)).collect();
                (idx, f.clone(), f)
            }
        };
        Ok(Terms { spec: spec.clone(), index_term, q_term, j_term })
    }

    /// Log of the spatial factor for power `q` at `x`.
    fn spatial(&self, x: f64, q: usize) -> f64 {
        match self.spec.family {
            SeminormFamily::GlobalP { .. } => q as f64 * x.abs().ln_1p(),
            SeminormFamily::PlainP { .. } | SeminormFamily::GevreySeq { .. } => {
                if q == 0 {
                    0.0
                } else {
                    q as f64 * x.abs().ln()
                }
            }
            SeminormFamily::ExpQ { mu, .. } => mu * self.spec.weight.eval_unchecked(x.abs()),
        }
    }

    fn cell(&self, log_deriv: f64, x: f64, j: usize, q: usize) -> f64 {
        log_deriv + self.spatial(x, q) + self.index_term[j + q] + self.j_term[j] + self.q_term[q]
    }
}

fn cells(m: usize, has_q: bool) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for j in 0..=m {
        if has_q {
            for q in 0..=m - j {
                v.push((j, q));
            }
        } else {
            v.push((j, 0));
        }
    }
    v
}

/// Sorted search grid and the radius it covers.
fn spatial_grid(model: &dyn JetSource, search: &SearchSpec, m: usize) -> Result<(Vec<f64>, f64)> {
    if let Some(x) = search.at {
        return Ok((vec![x], 0.0));
    }
    let (c, w) = model.frame().ok_or_else(|| {
        GsError::Domain("a formal jet has no spatial extent; evaluate it at its center".into())
    })?;
    let r = (m as f64 * std::f64::consts::LN_10).sqrt() + 5.0;
    let side = log_space(1e-4, r, search.half_points.max(8));
    let mut g: Vec<f64> = side.iter().rev().map(|u| c - w * u).collect();
    g.push(c);
    g.extend(side.iter().map(|u| c + w * u));
    Ok((g, r * w))
}

/// Best `(log value, grid index)` per cell.
fn scan(model: &dyn JetSource, terms: &Terms, grid: &[f64], cl: &[(usize, usize)], m: usize) -> Result<Vec<(f64, usize)>> {
    let chunks: Vec<Result<Vec<(f64, usize)>>> = grid
        .par_chunks(64)
        .enumerate()
        .map(|(ci, chunk)| {
            let mut best = vec![(f64::NEG_INFINITY, usize::MAX); cl.len()];
            for (k, &x) in chunk.iter().enumerate() {
                let idx = ci * 64 + k;
                let jet = model.jet(x, m)?;
                for (c, &(j, q)) in cl.iter().enumerate() {
                    let e = jet.entry(j);
                    if e.is_zero() {
                        continue;
                    }
                    let v = terms.cell(e.log_mag, x, j, q);
                    if v > best[c].0 || (v == best[c].0 && best[c].1 != usize::MAX && x > grid[best[c].1]) {
                        best[c] = (v, idx);
                    }
                }
            }
            Ok(best)
        })
        .collect();
    let mut out = vec![(f64::NEG_INFINITY, usize::MAX); cl.len()];
    for ch in chunks {
        for (c, (v, idx)) in ch?.into_iter().enumerate() {
            if v > out[c].0 || (v == out[c].0 && idx != usize::MAX && out[c].1 != usize::MAX && grid[idx] > grid[out[c].1]) {
                out[c] = (v, idx);
            }
        }
    }
    Ok(out)
}

fn refine_cell(model: &dyn JetSource, terms: &Terms, grid: &[f64], j: usize, q: usize, idx: usize, v0: f64) -> (f64, f64) {
    let x0 = grid[idx];
    if grid.len() < 3 {
        return (x0, v0);
    }
    let lo = grid[idx.saturating_sub(1)];
    let hi = grid[(idx + 1).min(grid.len() - 1)];
    let f = |x: f64| match model.jet(x, j) {
        Ok(jet) => {
            let e = jet.entry(j);
            if e.is_zero() {
                f64::NEG_INFINITY
            } else {
                terms.cell(e.log_mag, x, j, q)
            }
        }
        Err(_) => f64::NEG_INFINITY,
    };
    let (x, v) = golden_max(f, lo, hi, 1e-13);
    if v > v0 {
        (x, v)
    } else {
        (x0, v0)
    }
}

/// `true` when `a` beats `b` under the attainment order: larger value, then
/// smaller `j + q`, then smaller `j`.
fn better(a: &Attainment, b: &Attainment) -> bool {
    if a.log_value != b.log_value {
        return a.log_value > b.log_value;
    }
    (a.j + a.q, a.j) < (b.j + b.q, b.j)
}

struct Evaluated {
    cells: Vec<Attainment>,
    m: usize,
    radius: f64,
}

fn evaluate(model: &dyn JetSource, spec: &SeminormSpec, search: &SearchSpec, m: usize, refine_all: bool) -> Result<Evaluated> {
    spec.validate()?;
    model.check()?;
    let terms = Terms::new(spec, m)?;
    let (grid, radius) = spatial_grid(model, search, m)?;
    let cl = cells(m, spec.has_q());
    let raw = scan(model, &terms, &grid, &cl, m)?;
    let top = raw.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let refine_margin = 1e-2;
    let cells: Vec<Attainment> = cl
        .par_iter()
        .zip(raw.par_iter())
        .map(|(&(j, q), &(v, idx))| {
            if idx == usize::MAX {
                return Attainment { j, q, x: f64::NAN, log_value: f64::NEG_INFINITY };
            }
            let (x, v) = if refine_all || v >= top - refine_margin {
                refine_cell(model, &terms, &grid, j, q, idx, v)
            } else {
                (grid[idx], v)
            };
            Attainment { j, q, x, log_value: v }
        })
        .collect();
    Ok(Evaluated { cells, m, radius })
}

fn summarize(ev: &Evaluated, eps: f64) -> Result<AttainmentReport> {
    let mut order: Vec<&Attainment> = ev.cells.iter().collect();
    order.sort_by(|a, b| {
        if better(a, b) {
            std::cmp::Ordering::Less
        } else if better(b, a) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    let best = **order.first().ok_or_else(|| GsError::Inconsistent("empty index set".into()))?;
    if best.log_value == f64::NEG_INFINITY {
        return Err(GsError::Domain("function vanishes identically on the search set".into()));
    }
    let runner_up = order.get(1).map(|a| **a).filter(|a| a.log_value > f64::NEG_INFINITY);
    let shell_lo = ev.m.saturating_sub(4);
    let shell_log_max = ev
        .cells
        .iter()
        .filter(|c| c.j + c.q >= shell_lo && ev.m > 0)
        .map(|c| c.log_value)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(AttainmentReport {
        log_value: best.log_value,
        arg: best,
        truncation: TruncationInfo {
            m: ev.m,
            radius: ev.radius,
            shell_log_max,
            epsilon: eps,
            shells_negligible: shell_log_max <= best.log_value + eps.ln(),
            lemma: None,
        },
        gap: runner_up.map(|r| best.log_value - r.log_value),
        runner_up,
    })
}

fn evaluate_auto(model: &dyn JetSource, spec: &SeminormSpec, search: &SearchSpec, refine_all: bool) -> Result<(Evaluated, AttainmentReport)> {
    if let Some(m) = search.order {
        let ev = evaluate(model, spec, search, m, refine_all)?;
        let rep = summarize(&ev, search.epsilon)?;
        return Ok((ev, rep));
    }
    let mut m = search.start_order;
    loop {
        let ev = evaluate(model, spec, search, m, refine_all)?;
        let rep = summarize(&ev, search.epsilon)?;
        if rep.truncation.shells_negligible {
            return Ok((ev, rep));
        }
        m += 10;
        if m > search.max_order {
            return Err(GsError::Resource(format!(
                "outer shells still above epsilon at truncation order {}",
                search.max_order
            )));
        }
    }
}

/// Lemma-based bound for the excluded cells of the `p` families.
fn lemma_certificate(model: &dyn JetSource, spec: &SeminormSpec, search: &SearchSpec, rep: &AttainmentReport) -> Result<Option<LemmaCertificate>> {
    let lambda = match spec.family {
        SeminormFamily::GlobalP { lambda } | SeminormFamily::PlainP { lambda } => lambda,
        _ => return Ok(None),
    };
    let sc = lambda_shift_constants(&spec.weight, lambda)?;
    let shifted = SeminormSpec::global_p(spec.weight.clone(), sc.mu)?;
    let inner = SearchSpec { certify: false, ..search.clone() };
    let bound = eval_seminorm_source(model, &shifted, &inner)?;
    let rel_eps = search.epsilon * rep.log_value.exp();
    let m_lemma = if bound.log_value.is_finite() && rel_eps > 0.0 && rel_eps.is_finite() {
        truncation_order_with(sc.d, sc.a, bound.log_value.exp(), rel_eps)?
    } else {
        let m = (sc.d.ln() + bound.log_value - search.epsilon.ln() - rep.log_value) / sc.a.ln();
        (m - 1e-12).ceil().max(0.0) as usize
    };
    Ok(Some(LemmaCertificate {
        mu: sc.mu,
        a: sc.a,
        d: sc.d,
        log_bound: bound.log_value,
        m_lemma,
        holds: rep.truncation.m >= m_lemma,
    }))
}

/// Maximize the seminorm expression over the truncated index set and the
/// spatial grid.
pub fn eval_seminorm(model: &FunctionModel, spec: &SeminormSpec, search: &SearchSpec) -> Result<AttainmentReport> {
    eval_seminorm_source(model, spec, search)
}

pub fn eval_seminorm_source(model: &dyn JetSource, spec: &SeminormSpec, search: &SearchSpec) -> Result<AttainmentReport> {
    let (_, mut rep) = evaluate_auto(model, spec, search, false)?;
    if search.certify {
        rep.truncation.lemma = lemma_certificate(model, spec, search, &rep)?;
    }
    Ok(rep)
}

/// Table of cell maxima `a_{j,q}`, ordered by `j` then `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttainmentMatrix {
    pub m: usize,
    pub has_q: bool,
    pub cells: Vec<Attainment>,
    pub report: AttainmentReport,
}

impl AttainmentMatrix {
    pub fn get(&self, j: usize, q: usize) -> Option<&Attainment> {
        if j + q > self.m || (!self.has_q && q > 0) {
            return None;
        }
        let idx = if self.has_q {
            // rows j' < j hold (m − j' + 1) cells each
            j * (self.m + 1) - j * (j.saturating_sub(1)) / 2 + q
        } else {
            j
        };
        self.cells.get(idx)
    }

    pub fn log_a(&self, j: usize, q: usize) -> f64 {
        self.get(j, q).map_or(f64::NEG_INFINITY, |c| c.log_value)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,q,log_a\n");
        for c in &self.cells {
            let _ = writeln!(s, "{},{},{}", c.j, c.q, c.log_value);
        }
        s
    }
}

/// Every cell of the truncated table, each refined around its grid maximum.
pub fn attainment_matrix(model: &dyn JetSource, spec: &SeminormSpec, m: usize, search: &SearchSpec) -> Result<AttainmentMatrix> {
    let s = SearchSpec { order: Some(m), ..search.clone() };
    let (ev, report) = evaluate_auto(model, spec, &s, true)?;
    Ok(AttainmentMatrix { m: ev.m, has_q: spec.has_q(), cells: ev.cells, report })
}
