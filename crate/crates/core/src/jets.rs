//! Truncated derivative sequences, multiplicity partitions and Faà di Bruno
//! composition.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GsError, Result};
use crate::logsigned::{ln_factorial, LogSigned};
use crate::polynomials::{parse_rational, rational_from_f64, to_f64, Polynomial, Rational};

pub const MAX_JET_ORDER: usize = 512;
pub const MAX_PARTITION_J: usize = 60;

/// Derivatives `f^{(n)}(center)` for `n = 0..=order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub center: f64,
    pub entries: Vec<LogSigned>,
    pub exact: Option<Vec<Rational>>,
}

impl Jet {
    pub fn from_log(center: f64, entries: Vec<LogSigned>) -> Self {
        Jet { center, entries, exact: None }
    }

    pub fn from_f64(center: f64, values: &[f64]) -> Self {
        Jet { center, entries: values.iter().map(|&v| LogSigned::from_f64(v)).collect(), exact: None }
    }

    pub fn from_exact(center: f64, values: Vec<Rational>) -> Self {
        let entries = values.iter().map(LogSigned::from_rational).collect();
        Jet { center, entries, exact: Some(values) }
    }

    pub fn order(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn entry(&self, n: usize) -> LogSigned {
        self.entries.get(n).copied().unwrap_or(LogSigned::ZERO)
    }

    pub fn exact_entry(&self, n: usize) -> Option<&Rational> {
        self.exact.as_ref().and_then(|e| e.get(n))
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let n = order + 1;
        Jet {
            center: self.center,
            entries: self.entries[..n.min(self.entries.len())].to_vec(),
            exact: self.exact.as_ref().map(|e| e[..n.min(e.len())].to_vec()),
        }
    }

    /// Multiply every entry by `c > 0`.
    pub fn scale(&self, c: &Rational) -> Result<Jet> {
        if !c.is_positive() {
            return Err(GsError::Domain("jet scale must be positive".into()));
        }
        let lc = LogSigned::from_rational(c);
        Ok(Jet {
            center: self.center,
            entries: self.entries.iter().map(|&e| e * lc).collect(),
            exact: self.exact.as_ref().map(|e| e.iter().map(|v| v * c).collect()),
        })
    }
}

/// `(k₁, …, k_j)` with `Σ ℓ k_ℓ = j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiplicityPartition {
    pub j: usize,
    pub k: Vec<u8>,
    pub total: usize,
}

/// Visit every element of `I_j` in descending lexicographic order.
pub fn for_each_partition<F: FnMut(&[u8], usize)>(j: usize, mut visit: F) -> Result<()> {
    if j == 0 {
        return Err(GsError::Domain("partitions need j >= 1".into()));
    }
    if j > MAX_PARTITION_J {
        return Err(GsError::Resource(format!("partition enumeration capped at j = {MAX_PARTITION_J}")));
    }
    fn rec<F: FnMut(&[u8], usize)>(pos: usize, rem: usize, total: usize, k: &mut [u8], visit: &mut F) {
        if pos == k.len() {
            if rem == 0 {
                visit(k, total);
            }
            return;
        }
        let l = pos + 1;
        for c in (0..=rem / l).rev() {
            k[pos] = c as u8;
            rec(pos + 1, rem - c * l, total + c, k, visit);
        }
        k[pos] = 0;
    }
    let mut k = vec![0u8; j];
    rec(0, j, 0, &mut k, &mut visit);
    Ok(())
}

pub fn multiplicity_partitions(j: usize) -> Result<Vec<MultiplicityPartition>> {
    let mut out = Vec::new();
    for_each_partition(j, |k, total| out.push(MultiplicityPartition { j, k: k.to_vec(), total }))?;
    Ok(out)
}

fn factorials(n: usize) -> Vec<BigUint> {
    let mut f = vec![BigUint::one()];
    for i in 1..=n {
        let next = &f[i - 1] * BigUint::from(i);
        f.push(next);
    }
    f
}

/// `Σ_{I_j} k!/(k₁!…k_j!)`, exactly.
pub fn faa_di_bruno_identity_sum(j: usize) -> Result<BigUint> {
    let fact = factorials(j);
    let mut sum = BigUint::zero();
    for_each_partition(j, |k, total| {
        let den = k.iter().fold(BigUint::one(), |acc, &c| acc * &fact[c as usize]);
        sum += &fact[total] / den;
    })?;
    Ok(sum)
}

fn check_compose_inputs(f: &Jet, psi: &Jet, n: usize) -> Result<()> {
    if f.order() < n || psi.order() < n {
        return Err(GsError::Domain(format!(
            "composition to order {n} needs input orders >= {n} (got {} and {})",
            f.order(),
            psi.order()
        )));
    }
    let y0 = psi.entry(0).to_f64();
    if (f.center - y0).abs() > 1e-9 * (1.0 + y0.abs()) {
        return Err(GsError::Domain(format!("outer jet centered at {} but inner value is {y0}", f.center)));
    }
    Ok(())
}

fn lcm_denominators(v: &[Rational]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

fn mul_trunc_int(a: &[BigInt], b: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n + 1];
    for (i, x) in a.iter().enumerate().take(n + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn mul_trunc_log(a: &[LogSigned], b: &[LogSigned], n: usize) -> Vec<LogSigned> {
    let mut out = vec![LogSigned::ZERO; n + 1];
    for (i, &x) in a.iter().enumerate().take(n + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

fn big_factorial(f: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(f.clone()))
}

/// Exact composition by substituting Taylor series, on integers after
/// clearing denominators.
fn compose_exact_series(f: &[Rational], psi: &[Rational], n: usize) -> Vec<Rational> {
    let fact = factorials(n);
    let a: Vec<Rational> = (0..=n).map(|k| &f[k] / big_factorial(&fact[k])).collect();
    let mut b: Vec<Rational> = (0..=n).map(|k| &psi[k] / big_factorial(&fact[k])).collect();
    b[0] = Rational::zero();
    let da = lcm_denominators(&a);
    let db = lcm_denominators(&b);
    let at: Vec<BigInt> = a.iter().map(|r| (r * Rational::from_integer(da.clone())).to_integer()).collect();
    let bt: Vec<BigInt> = b.iter().map(|r| (r * Rational::from_integer(db.clone())).to_integer()).collect();
    let mut pow_db = vec![BigInt::one()];
    for i in 1..=n {
        let next = &pow_db[i - 1] * &db;
        pow_db.push(next);
    }
    // acc = Σ_i ã_i h̃^i B^{n−i}
    let mut acc = vec![BigInt::zero(); n + 1];
    acc[0] = at[n].clone();
    for k in (0..n).rev() {
        acc = mul_trunc_int(&acc, &bt, n);
        acc[0] += &at[k] * &pow_db[n - k];
    }
    let den = Rational::from_integer(da * &pow_db[n]);
    (0..=n).map(|j| Rational::from_integer(acc[j].clone()) / &den * big_factorial(&fact[j])).collect()
}

fn compose_log_series(f: &Jet, psi: &Jet, n: usize) -> Vec<LogSigned> {
    let a: Vec<LogSigned> = (0..=n).map(|k| f.entry(k).scale_ln(-ln_factorial(k))).collect();
    let mut b: Vec<LogSigned> = (0..=n).map(|k| psi.entry(k).scale_ln(-ln_factorial(k))).collect();
    b[0] = LogSigned::ZERO;
    let mut acc = vec![LogSigned::ZERO; n + 1];
    acc[0] = a[n];
    for k in (0..n).rev() {
        acc = mul_trunc_log(&acc, &b, n);
        acc[0] = acc[0] + a[k];
    }
    acc.iter().enumerate().map(|(j, c)| c.scale_ln(ln_factorial(j))).collect()
}

/// Jet of `f ∘ ψ` at the center of ψ, to order `n`; `f` must be centered at ψ(x₀).
pub fn compose_jet(f: &Jet, psi: &Jet, n: usize) -> Result<Jet> {
    check_compose_inputs(f, psi, n)?;
    match (&f.exact, &psi.exact) {
        (Some(fe), Some(pe)) => Ok(Jet::from_exact(psi.center, compose_exact_series(fe, pe, n))),
        _ => Ok(Jet::from_log(psi.center, compose_log_series(f, psi, n))),
    }
}

/// Floating-point series substitution: derivatives of `f ∘ ψ` from the
/// derivatives of `f` at ψ(x₀) and of ψ at x₀.
pub fn compose_values_f64(f: &[f64], psi: &[f64], n: usize) -> Vec<f64> {
    let mut fact = vec![1.0f64; n + 1];
    for k in 1..=n {
        fact[k] = fact[k - 1] * k as f64;
    }
    let a: Vec<f64> = (0..=n).map(|k| f.get(k).copied().unwrap_or(0.0) / fact[k]).collect();
    let mut b: Vec<f64> = (0..=n).map(|k| psi.get(k).copied().unwrap_or(0.0) / fact[k]).collect();
    b[0] = 0.0;
    let mut acc = vec![0.0f64; n + 1];
    acc[0] = a[n];
    for k in (0..n).rev() {
        let mut next = vec![0.0f64; n + 1];
        for (i, &x) in acc.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate().take(n + 1 - i).skip(1) {
                next[i + j] += x * y;
            }
        }
        next[0] += a[k];
        acc = next;
    }
    acc.iter().zip(&fact).map(|(c, f)| c * f).collect()
}

/// Same result as [`compose_jet`], summed term by term over `I_j`.
pub fn compose_jet_partition(f: &Jet, psi: &Jet, n: usize) -> Result<Jet> {
    check_compose_inputs(f, psi, n)?;
    if n > MAX_PARTITION_J {
        return Err(GsError::Resource(format!("partition path capped at order {MAX_PARTITION_J}")));
    }
    let fact = factorials(n);
    if let (Some(fe), Some(pe)) = (&f.exact, &psi.exact) {
        let fq = |k: usize| big_factorial(&fact[k]);
        let b: Vec<Rational> = (0..=n).map(|l| &pe[l] / fq(l)).collect();
        let mut out = vec![fe[0].clone()];
        for j in 1..=n {
            let mut s = Rational::zero();
            for_each_partition(j, |k, total| {
                let mut term = fq(j) * &fe[total];
                for (l, &c) in k.iter().enumerate() {
                    if c > 0 {
                        term = term / fq(c as usize) * num_traits::pow(b[l + 1].clone(), c as usize);
                    }
                }
                s += term;
            })?;
            out.push(s);
        }
        return Ok(Jet::from_exact(psi.center, out));
    }
    let b: Vec<LogSigned> = (0..=n).map(|l| psi.entry(l).scale_ln(-ln_factorial(l))).collect();
    let mut out = vec![f.entry(0)];
    for j in 1..=n {
        let mut s = LogSigned::ZERO;
        for_each_partition(j, |k, total| {
            let mut term = f.entry(total).scale_ln(ln_factorial(j));
            for (l, &c) in k.iter().enumerate() {
                if c > 0 {
                    term = (term * b[l + 1].powi(c as u32)).scale_ln(-ln_factorial(c as usize));
                }
            }
            s = s + term;
        })?;
        out.push(s);
    }
    Ok(Jet::from_log(psi.center, out))
}

/// Exact jet of a polynomial at a rational point.
pub fn polynomial_jet(psi: &Polynomial, x0: &Rational, order: usize) -> Jet {
    Jet::from_exact(to_f64(x0), psi.jet_at(x0, order))
}

/// Exact jet of `ψ_m` at `x₀`, by chaining jets along the orbit instead of
/// expanding the iterate (whose degree grows like `deg^m`).
pub fn iterate_jet(psi: &Polynomial, x0: &Rational, m: usize, order: usize) -> Result<Jet> {
    Ok(iterate_jets(psi, x0, m, order)?.pop().expect("m >= 1"))
}

/// Exact jets of `ψ_1, …, ψ_{m_max}` at `x₀`, all to the same order.
///
/// Each step composes the sparse jet of ψ on the outside, which keeps the
/// cost at `O(deg · order²)` per iterate.
pub fn iterate_jets(psi: &Polynomial, x0: &Rational, m_max: usize, order: usize) -> Result<Vec<Jet>> {
    if m_max == 0 {
        return Err(GsError::Domain("iteration count must be >= 1".into()));
    }
    let mut out = vec![polynomial_jet(psi, x0, order)];
    let mut y = psi.eval(x0);
    for _ in 1..m_max {
        let outer = polynomial_jet(psi, &y, order);
        let next = compose_jet(&outer, out.last().expect("non-empty"), order)?;
        out.push(next);
        y = psi.eval(&y);
    }
    Ok(out)
}

/// Concrete or formal test functions.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionModel {
    /// `e^{−(scale·x)²}`.
    Gaussian { scale: f64 },
    /// `base(ρx)`.
    Scaled { base: Box<FunctionModel>, rho: f64 },
    /// `base(x + c)`.
    Shifted { base: Box<FunctionModel>, c: f64 },
    /// Formal jet at one point; unlisted orders are zero.
    PrescribedJet { center: f64, entries: Vec<(usize, Rational)> },
}

impl FunctionModel {
    pub fn gaussian(scale: f64) -> Self {
        FunctionModel::Gaussian { scale }
    }

    pub fn scaled(base: FunctionModel, rho: f64) -> Self {
        FunctionModel::Scaled { base: Box::new(base), rho }
    }

    pub fn shifted(base: FunctionModel, c: f64) -> Self {
        FunctionModel::Shifted { base: Box::new(base), c }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionModel::Gaussian { scale } if !(scale.is_finite() && *scale > 0.0) => {
                Err(GsError::Domain(format!("gaussian scale must be > 0, got {scale}")))
            }
            FunctionModel::Gaussian { .. } => Ok(()),
            FunctionModel::Scaled { base, rho } => {
                if !rho.is_finite() || *rho == 0.0 {
                    return Err(GsError::Domain(format!("scaling factor must be finite and nonzero, got {rho}")));
                }
                base.validate()
            }
            FunctionModel::Shifted { base, c } => {
                if !c.is_finite() {
                    return Err(GsError::Domain("shift must be finite".into()));
                }
                base.validate()
            }
            FunctionModel::PrescribedJet { center, entries } => {
                if !center.is_finite() {
                    return Err(GsError::Domain("jet center must be finite".into()));
                }
                if entries.iter().any(|(n, _)| *n > MAX_JET_ORDER) {
                    return Err(GsError::Domain(format!("prescribed order above {MAX_JET_ORDER}")));
                }
                Ok(())
            }
        }
    }

    pub fn is_formal(&self) -> bool {
        match self {
            FunctionModel::Gaussian { .. } => false,
            FunctionModel::Scaled { base, .. } | FunctionModel::Shifted { base, .. } => base.is_formal(),
            FunctionModel::PrescribedJet { .. } => true,
        }
    }

    /// `(center, width)` of the bulk of a concrete model, used to place the
    /// spatial search grid.
    pub fn frame(&self) -> Option<(f64, f64)> {
        match self {
            FunctionModel::Gaussian { scale } => Some((0.0, 1.0 / scale)),
            FunctionModel::Scaled { base, rho } => base.frame().map(|(c, w)| (c / rho, w / rho.abs())),
            FunctionModel::Shifted { base, c } => base.frame().map(|(b, w)| (b - c, w)),
            FunctionModel::PrescribedJet { .. } => None,
        }
    }

    /// The single point at which a formal model may be evaluated.
    pub fn formal_center(&self) -> Option<f64> {
        match self {
            FunctionModel::Gaussian { .. } => None,
            FunctionModel::Scaled { base, rho } => base.formal_center().map(|c| c / rho),
            FunctionModel::Shifted { base, c } => base.formal_center().map(|b| b - c),
            FunctionModel::PrescribedJet { center, .. } => Some(*center),
        }
    }
}

impl fmt::Display for FunctionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionModel::Gaussian { scale } => write!(f, "gauss:{scale}"),
            FunctionModel::Scaled { base, rho } => write!(f, "scaled:{rho}:{base}"),
            FunctionModel::Shifted { base, c } => write!(f, "shift:{c}:{base}"),
            FunctionModel::PrescribedJet { center, entries } => {
                let body: Vec<String> = entries.iter().map(|(n, v)| format!("{n}={v}")).collect();
                write!(f, "jet:{center}:{}", body.join(","))
            }
        }
    }
}

impl FromStr for FunctionModel {
    type Err = GsError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| GsError::Config(format!("malformed function model `{s}`: {why}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("expected a number"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("missing `:`"))?;
        let model = match kind {
            "gauss" => FunctionModel::gaussian(num(rest)?),
            "scaled" | "shift" => {
                let (p, inner) = rest.split_once(':').ok_or_else(|| bad("missing inner model"))?;
                let base: FunctionModel = inner.parse()?;
                if kind == "scaled" {
                    FunctionModel::scaled(base, num(p)?)
                } else {
                    FunctionModel::shifted(base, num(p)?)
                }
            }
            "jet" => {
                let (c, body) = rest.split_once(':').unwrap_or((rest, ""));
                let mut entries = Vec::new();
                for item in body.split(',').filter(|t| !t.trim().is_empty()) {
                    let (n, v) = item.split_once('=').ok_or_else(|| bad("jet entries look like n=value"))?;
                    let n: usize = n.trim().parse().map_err(|_| bad("jet order must be an integer"))?;
                    entries.push((n, parse_rational(v)?));
                }
                entries.sort_by_key(|(n, _)| *n);
                entries.dedup_by_key(|(n, _)| *n);
                FunctionModel::PrescribedJet { center: num(c)?, entries }
            }
            other => return Err(bad(&format!("unknown kind `{other}`"))),
        };
        model.validate()?;
        Ok(model)
    }
}

impl Serialize for FunctionModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FunctionModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `(−1)^n H_n(u)`, the derivatives of `e^{−u²}` divided by `e^{−u²}`, with
/// a running log scale so that high orders do not overflow.
fn gaussian_unit_jet(u: f64, order: usize) -> Vec<LogSigned> {
    if (u * u).is_infinite() {
        // e^{−u²} is zero beyond any representable scale
        return vec![LogSigned::ZERO; order + 1];
    }
    let mut out = Vec::with_capacity(order + 1);
    let mut scale = 0.0f64;
    let (mut h_prev, mut h) = (0.0f64, 1.0f64);
    for n in 0..=order {
        let sgn = if n % 2 == 1 { -1.0 } else { 1.0 };
        out.push(LogSigned::from_f64(sgn * h).scale_ln(scale));
        let next = 2.0 * u * h - 2.0 * n as f64 * h_prev;
        h_prev = h;
        h = next;
        if h.abs().max(h_prev.abs()) > 1e100 {
            h /= 1e100;
            h_prev /= 1e100;
            scale += 100.0 * std::f64::consts::LN_10;
        }
    }
    out
}

/// Jet of a model at `x`.
pub fn jet_of(model: &FunctionModel, x: f64, order: usize) -> Result<Jet> {
    if order > MAX_JET_ORDER {
        return Err(GsError::Resource(format!("jet order {order} above the cap {MAX_JET_ORDER}")));
    }
    if !x.is_finite() {
        return Err(GsError::Domain("jet point must be finite".into()));
    }
    match model {
        FunctionModel::Gaussian { scale } => {
            let u = scale * x;
            let ls = scale.ln();
            let entries = gaussian_unit_jet(u, order)
                .into_iter()
                .enumerate()
                .map(|(n, e)| e.scale_ln(n as f64 * ls - u * u))
                .collect();
            Ok(Jet::from_log(x, entries))
        }
        FunctionModel::Scaled { base, rho } => {
            let inner = jet_of(base, rho * x, order)?;
            let lr = rho.abs().ln();
            let neg = *rho < 0.0;
            let entries = inner
                .entries
                .iter()
                .enumerate()
                .map(|(n, &e)| {
                    let e = e.scale_ln(n as f64 * lr);
                    if neg && n % 2 == 1 {
                        -e
                    } else {
                        e
                    }
                })
                .collect();
            let exact = match &inner.exact {
                Some(ex) => {
                    let r = rational_from_f64(*rho)?;
                    let mut p = Rational::one();
                    let mut v = Vec::with_capacity(ex.len());
                    for e in ex {
                        v.push(e * &p);
                        p *= &r;
                    }
                    Some(v)
                }
                None => None,
            };
            Ok(Jet { center: x, entries, exact })
        }
        FunctionModel::Shifted { base, c } => {
            let inner = jet_of(base, x + c, order)?;
            Ok(Jet { center: x, ..inner })
        }
        FunctionModel::PrescribedJet { center, entries } => {
            if (x - center).abs() > 1e-12 * (1.0 + center.abs()) {
                return Err(GsError::Domain(format!(
                    "prescribed jet is only defined at its center {center}, queried at {x}"
                )));
            }
            let mut vals = vec![Rational::zero(); order + 1];
            for (n, v) in entries {
                if *n <= order {
                    vals[*n] = v.clone();
                }
            }
            Ok(Jet::from_exact(*center, vals))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::int;

    #[test]
    fn partitions_of_three() {
        let ps = multiplicity_partitions(3).unwrap();
        let ks: Vec<Vec<u8>> = ps.iter().map(|p| p.k.clone()).collect();
        assert_eq!(ks, vec![vec![3, 0, 0], vec![1, 1, 0], vec![0, 0, 1]]);
        assert_eq!(ps.iter().map(|p| p.total).collect::<Vec<_>>(), vec![3, 2, 1]);
        assert_eq!(multiplicity_partitions(4).unwrap().len(), 5);
        assert_eq!(multiplicity_partitions(10).unwrap().len(), 42);
        assert!(matches!(multiplicity_partitions(61), Err(GsError::Resource(_))));
    }

    #[test]
    fn identity_sum_small() {
        assert_eq!(faa_di_bruno_identity_sum(1).unwrap(), BigUint::from(1u32));
        assert_eq!(faa_di_bruno_identity_sum(4).unwrap(), BigUint::from(8u32));
        assert_eq!(faa_di_bruno_identity_sum(25).unwrap(), BigUint::from(16_777_216u32));
    }

    #[test]
    fn chain_rule_second_order() {
        let f = Jet::from_exact(2.0, vec![int(5), int(3), int(7)]);
        let g = Jet::from_exact(0.0, vec![int(2), int(11), int(13)]);
        let h = compose_jet(&f, &g, 2).unwrap();
        // f''·g'^2 + f'·g''
        assert_eq!(h.exact_entry(2).unwrap(), &int(7 * 121 + 3 * 13));
        assert_eq!(h, compose_jet_partition(&f, &g, 2).unwrap());
    }

    #[test]
    fn prescribed_through_x8() {
        let f = FunctionModel::PrescribedJet { center: 1.0, entries: vec![(1, int(1))] };
        let fj = jet_of(&f, 1.0, 3).unwrap();
        let psi = polynomial_jet(&Polynomial::monomial(int(1), 8), &int(1), 3);
        let h = compose_jet(&fj, &psi, 3).unwrap();
        assert_eq!(h.exact_entry(3).unwrap(), &int(336));
        let via_iter = iterate_jet(&Polynomial::monomial(int(1), 2), &int(1), 3, 3).unwrap();
        assert_eq!(compose_jet(&fj, &via_iter, 3).unwrap().exact_entry(3).unwrap(), &int(336));
    }

    #[test]
    fn gaussian_low_orders() {
        let j = jet_of(&FunctionModel::gaussian(1.0), 0.0, 4).unwrap();
        let v: Vec<f64> = j.entries.iter().map(|e| e.to_f64()).collect();
        assert_eq!(v[1], 0.0);
        assert_eq!(v[3], 0.0);
        assert!((v[2] + 2.0).abs() < 1e-14);
        assert!((v[4] - 12.0).abs() < 1e-13);
        let s = jet_of(&FunctionModel::scaled(FunctionModel::gaussian(1.0), 2.0), 0.0, 2).unwrap();
        assert!((s.entry(2).to_f64() + 8.0).abs() < 1e-13);
        assert_eq!(jet_of(&FunctionModel::gaussian(3.0), 0.7, 0).unwrap().order(), 0);
    }

    #[test]
    fn prescribed_off_center_is_domain_error() {
        let f: FunctionModel = "jet:1:1=1".parse().unwrap();
        assert!(matches!(jet_of(&f, 0.5, 3), Err(GsError::Domain(_))));
    }

    #[test]
    fn order_mismatch() {
        let f = Jet::from_exact(0.0, vec![int(1), int(1)]);
        let g = Jet::from_exact(0.0, vec![int(0), int(1), int(0)]);
        assert!(matches!(compose_jet(&f, &g, 2), Err(GsError::Domain(_))));
    }

    #[test]
    fn model_literals_round_trip() {
        for s in ["gauss:1", "scaled:2:gauss:0.5", "shift:-3:gauss:1", "jet:1:1=1,3=-2/3"] {
            let m: FunctionModel = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert!("gauss:-1".parse::<FunctionModel>().is_err());
        assert!("bump:1".parse::<FunctionModel>().is_err());
    }
}
