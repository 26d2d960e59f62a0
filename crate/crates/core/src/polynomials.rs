//! Exact univariate polynomials over the rationals: iteration, real fixed
//! points, affine normal forms and the asymptotic minorant needed by the
//! degree-two witnesses.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GsError, Result};
use crate::numeric::log_space;

pub type Rational = BigRational;

pub const DEFAULT_DEGREE_CAP: usize = 4096;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `3`, `-7/4` or a finite decimal such as `0.25` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || GsError::Config(format!("malformed rational `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.trim_start().starts_with('-');
        let ip_abs = ip.trim().trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if ip_abs.is_empty() { "0" } else { ip_abs }, fp);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let r = BigRational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Exact conversion of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    BigRational::from_float(x).ok_or_else(|| GsError::Domain(format!("non-finite value {x}")))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator or denominator too wide for a direct conversion
        let ls = crate::logsigned::LogSigned::from_rational(r);
        ls.to_f64()
    })
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::x()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let lead = divisor.leading();
        if self.coeffs.len() < divisor.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); self.coeffs.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (i, b) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] -= &c * b;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let l = self.leading();
        self.scale(&(Rational::one() / l))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Square-free part `p / gcd(p, p')`.
    pub fn squarefree(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.monic();
        }
        self.div_rem(&g).0.monic()
    }

    /// Derivatives `p^{(n)}(x)` for `n = 0..=order`.
    pub fn jet_at(&self, x: &Rational, order: usize) -> Vec<Rational> {
        let mut out = Vec::with_capacity(order + 1);
        let mut p = self.clone();
        for _ in 0..=order {
            out.push(p.eval(x));
            p = p.derivative();
        }
        out
    }

    /// Derivatives at a floating point, via repeated synthetic division.
    pub fn jet_at_f64(&self, x: f64, order: usize) -> Vec<f64> {
        let mut c = self.coeffs_f64();
        let n = c.len();
        let mut out = vec![0.0; order + 1];
        let mut fact = 1.0;
        for k in 0..=order.min(n.saturating_sub(1)) {
            // Horner pass leaves the k-th Taylor coefficient at position k.
            for i in (k..n - 1).rev() {
                c[i] += x * c[i + 1];
            }
            if k > 0 {
                fact *= k as f64;
            }
            out[k] = c[k] * fact;
        }
        out
    }

}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = k == 0 || !a.is_one();
            if show_coeff {
                write!(f, "{a}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Polynomial {
    type Err = GsError;

    /// Accepts either an ascending coefficient list (`0,0,1`) or a sum of
    /// terms in `x` (`x^2 + 1/4`, `-3x^3`, `2*x - 10`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if !s.contains('x') {
            let cs = s.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
            return Ok(Self::new(cs));
        }
        let bad = || GsError::Config(format!("malformed polynomial `{s}`"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !compact[..i].ends_with('^') && !compact[..i].ends_with('/') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut poly = Self::zero();
        for t in terms.iter().filter(|t| !t.is_empty()) {
            let (coef_part, power) = match t.split_once('x') {
                None => (t.as_str(), 0usize),
                Some((c, rest)) => {
                    let p = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^').ok_or_else(bad)?.parse().map_err(|_| bad())?
                    };
                    (c, p)
                }
            };
            let coef_part = coef_part.trim_end_matches('*');
            let coef = match coef_part {
                "" | "+" => Rational::one(),
                "-" => -Rational::one(),
                c => parse_rational(c.trim_start_matches('+'))?,
            };
            poly = poly.add(&Self::monomial(coef, power));
        }
        Ok(poly)
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `ψ_m = ψ ∘ … ∘ ψ` (m times), with the default degree cap.
pub fn iterate(psi: &Polynomial, m: usize) -> Result<Polynomial> {
    iterate_capped(psi, m, DEFAULT_DEGREE_CAP)
}

pub fn iterate_capped(psi: &Polynomial, m: usize, cap: usize) -> Result<Polynomial> {
    if m == 0 {
        return Err(GsError::Domain("iteration count must be >= 1".into()));
    }
    let mut deg: usize = 1;
    for _ in 0..m {
        deg = deg.saturating_mul(psi.degree().max(1));
        if deg > cap {
            return Err(GsError::Resource(format!(
                "iterate degree {}^{m} exceeds the degree cap {cap}",
                psi.degree()
            )));
        }
    }
    let mut acc = psi.clone();
    for _ in 1..m {
        acc = psi.compose(&acc);
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointKind {
    Attracting,
    Neutral,
    Repelling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Exact(String),
    Interval { lo: String, hi: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    /// Exact root, when one was found.
    pub exact: Option<Rational>,
    /// Isolating interval (degenerate for exact roots).
    pub lo: Rational,
    pub hi: Rational,
    /// `|ψ'(x₀)|`.
    pub multiplier: f64,
    pub kind: FixedPointKind,
    pub multiplicity: usize,
}

impl FixedPoint {
    pub fn approx(&self) -> f64 {
        match &self.exact {
            Some(r) => to_f64(r),
            None => 0.5 * (to_f64(&self.lo) + to_f64(&self.hi)),
        }
    }

    pub fn location(&self) -> Location {
        match &self.exact {
            Some(r) => Location::Exact(r.to_string()),
            None => Location::Interval { lo: self.lo.to_string(), hi: self.hi.to_string() },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FixedPointSet {
    /// `ψ(x) = x`.
    AllPointsFixed,
    Points(Vec<FixedPoint>),
}

impl FixedPointSet {
    pub fn points(&self) -> &[FixedPoint] {
        match self {
            FixedPointSet::AllPointsFixed => &[],
            FixedPointSet::Points(p) => p,
        }
    }
}

struct Sturm {
    seq: Vec<Polynomial>,
}

impl Sturm {
    fn new(p: &Polynomial) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&int(-1)));
        }
        Sturm { seq }
    }

    fn variations(&self, x: &Rational) -> usize {
        let signs: Vec<Ordering> = self
            .seq
            .iter()
            .map(|p| p.eval(x).cmp(&Rational::zero()))
            .filter(|o| *o != Ordering::Equal)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct roots in `(a, b]`, assuming `p(a) ≠ 0`.
    fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// `1 + max |a_i / a_n|`.
fn cauchy_bound(p: &Polynomial) -> Rational {
    let lead = p.leading().abs();
    let m = p.coeffs[..p.degree()]
        .iter()
        .map(|c| c.abs() / &lead)
        .max()
        .unwrap_or_else(Rational::zero);
    m + Rational::one()
}

/// Simplest rational (smallest denominator) in the closed interval `[lo, hi]`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    if lo.is_positive() {
        simplest_nonneg(lo, hi)
    } else if hi.is_negative() {
        -simplest_nonneg(&-hi, &-lo)
    } else {
        Rational::zero()
    }
}

fn simplest_nonneg(lo: &Rational, hi: &Rational) -> Rational {
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    let next = &fl + Rational::one();
    if next <= *hi {
        return next;
    }
    let inner = simplest_nonneg(&(Rational::one() / (hi - &fl)), &(Rational::one() / (lo - &fl)));
    fl + Rational::one() / inner
}

fn isolate(p: &Polynomial, sturm: &Sturm, lo: Rational, hi: Rational, out: &mut Vec<(Rational, Rational)>) {
    let n = sturm.count(&lo, &hi);
    if n == 0 {
        return;
    }
    if n == 1 {
        out.push((lo, hi));
        return;
    }
    // Split at a point that is not itself a root.
    let width = &hi - &lo;
    let mut split = None;
    for (num, den) in [(1, 2), (3, 7), (4, 7), (5, 11), (6, 11)] {
        let c = &lo + &width * rat(num, den);
        if !p.eval(&c).is_zero() {
            split = Some(c);
            break;
        }
    }
    let mid = split.expect("a degree-n polynomial has at most n roots among five split points");
    isolate(p, sturm, lo, mid.clone(), out);
    isolate(p, sturm, mid, hi, out);
}

fn classify(multiplier: &Rational) -> FixedPointKind {
    match multiplier.cmp(&Rational::one()) {
        Ordering::Greater => FixedPointKind::Repelling,
        Ordering::Equal => FixedPointKind::Neutral,
        Ordering::Less => FixedPointKind::Attracting,
    }
}

/// All real fixed points of ψ, isolated exactly and classified by `|ψ'|`.
pub fn fixed_points(psi: &Polynomial) -> Result<FixedPointSet> {
    if psi.degree() == 0 {
        return Err(GsError::Domain("fixed points need deg(psi) >= 1".into()));
    }
    let p = psi.sub(&Polynomial::x());
    if p.is_zero() {
        return Ok(FixedPointSet::AllPointsFixed);
    }
    let dpsi = psi.derivative();
    let q = p.squarefree();
    // Nested gcds: a root has multiplicity k iff it is a root of g_{k-1} but not g_k.
    let mut gcd_chain = Vec::new();
    let mut g = p.gcd(&p.derivative());
    while g.degree() > 0 {
        gcd_chain.push(g.squarefree());
        g = g.gcd(&g.derivative());
    }
    let b = cauchy_bound(&q);
    let sturm = Sturm::new(&q);
    let mut intervals = Vec::new();
    isolate(&q, &sturm, -b.clone(), b, &mut intervals);

    let eps = rational_from_f64(1e-12)?;
    let mut points = Vec::new();
    for (mut lo, mut hi) in intervals {
        let mut exact = None;
        if q.eval(&hi).is_zero() {
            exact = Some(hi.clone());
        }
        while exact.is_none() && &hi - &lo >= eps {
            let cand = simplest_between(&lo, &hi);
            if q.eval(&cand).is_zero() {
                exact = Some(cand);
                break;
            }
            let mid = (&lo + &hi) / int(2);
            let v = q.eval(&mid);
            if v.is_zero() {
                exact = Some(mid);
                break;
            }
            if sturm.count(&lo, &mid) == 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if exact.is_none() {
            let cand = simplest_between(&lo, &hi);
            if q.eval(&cand).is_zero() {
                exact = Some(cand);
            }
        }
        let (kind, multiplier) = match &exact {
            Some(r) => {
                let m = dpsi.eval(r).abs();
                (classify(&m), to_f64(&m))
            }
            None => {
                let ml = dpsi.eval(&lo).abs();
                let mh = dpsi.eval(&hi).abs();
                let (kl, kh) = (classify(&ml), classify(&mh));
                let mid = (&lo + &hi) / int(2);
                let mm = to_f64(&dpsi.eval(&mid).abs());
                let kind = if kl == kh {
                    kl
                } else if (mm - 1.0).abs() < 1e-9 {
                    FixedPointKind::Neutral
                } else {
                    classify(&rational_from_f64(mm)?)
                };
                (kind, mm)
            }
        };
        let multiplicity = 1 + gcd_chain
            .iter()
            .take_while(|g| match &exact {
                Some(r) => g.eval(r).is_zero(),
                None => {
                    let s = Sturm::new(g);
                    !g.eval(&lo).is_zero() && s.count(&lo, &hi) > 0
                }
            })
            .count();
        let (lo, hi) = match &exact {
            Some(r) => (r.clone(), r.clone()),
            None => (lo, hi),
        };
        points.push(FixedPoint { exact, lo, hi, multiplier, kind, multiplicity });
    }
    points.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(FixedPointSet::Points(points))
}

/// Invertible affine map `ℓ(x) = αx + β`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub alpha: Rational,
    pub beta: Rational,
}

impl AffineMap {
    pub fn new(alpha: Rational, beta: Rational) -> Result<Self> {
        if alpha.is_zero() {
            return Err(GsError::Domain("affine map needs alpha != 0".into()));
        }
        Ok(AffineMap { alpha, beta })
    }

    pub fn identity() -> Self {
        AffineMap { alpha: Rational::one(), beta: Rational::zero() }
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.alpha * x + &self.beta
    }

    pub fn inverse(&self) -> Self {
        let a = Rational::one() / &self.alpha;
        AffineMap { beta: -(&self.beta * &a), alpha: a }
    }

    pub fn as_polynomial(&self) -> Polynomial {
        Polynomial::new(vec![self.beta.clone(), self.alpha.clone()])
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_polynomial())
    }
}

/// `ℓ ∘ ψ ∘ ℓ⁻¹`.
pub fn conjugate_by(psi: &Polynomial, l: &AffineMap) -> Polynomial {
    l.as_polynomial().compose(&psi.compose(&l.inverse().as_polynomial()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum NormalForm {
    Identity,
    /// `φ(x) = −x`.
    Reflection,
    /// `φ(x) = a x`, `a ≠ ±1`.
    Dilation(Rational),
    /// `φ(x) = x + 1`.
    Translation,
}

impl NormalForm {
    pub fn polynomial(&self) -> Polynomial {
        match self {
            NormalForm::Identity => Polynomial::x(),
            NormalForm::Reflection => Polynomial::from_ints(&[0, -1]),
            NormalForm::Dilation(a) => Polynomial::monomial(a.clone(), 1),
            NormalForm::Translation => Polynomial::from_ints(&[1, 1]),
        }
    }
}

/// Normal form φ of `ψ(x) = ax + b` with a conjugator satisfying
/// `ℓ ∘ φ ∘ ℓ⁻¹ = ψ` exactly.
pub fn normal_form_degree1(psi: &Polynomial) -> Result<(NormalForm, AffineMap)> {
    if psi.degree() != 1 {
        return Err(GsError::Domain(format!("normal form needs degree 1, got {}", psi.degree())));
    }
    let a = psi.coeff(1);
    let b = psi.coeff(0);
    let one = Rational::one();
    let (form, l) = if a == one {
        if b.is_zero() {
            (NormalForm::Identity, AffineMap::identity())
        } else {
            (NormalForm::Translation, AffineMap::new(b, Rational::zero())?)
        }
    } else {
        // conjugate by the translation moving 0 to the fixed point b / (1 − a)
        let fixed = &b / (&one - &a);
        let l = AffineMap::new(one.clone(), fixed)?;
        if a == -one.clone() {
            (NormalForm::Reflection, l)
        } else {
            (NormalForm::Dilation(a), l)
        }
    };
    let back = conjugate_by(&form.polynomial(), &l);
    if back != *psi {
        return Err(GsError::Inconsistent(format!("normal form round trip gave {back}, expected {psi}")));
    }
    Ok((form, l))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minorant {
    pub alpha: f64,
    pub b: f64,
    pub grid_max: f64,
    pub tail: String,
}

/// `α ∈ (1, 2)` and a grid-certified `b` with `|ψ(x)| ≥ |x|^α` for
/// `b ≤ |x| ≤ 10⁶`.
pub fn asymptotic_minorant(psi: &Polynomial) -> Result<Minorant> {
    if psi.degree() < 2 {
        return Err(GsError::Domain("asymptotic minorant needs deg(psi) >= 2".into()));
    }
    let grid_max = 1e6;
    let grid = log_space(1.05, grid_max, 4000);
    let mut alpha = 1.5;
    loop {
        let fails = |x: f64| psi.eval_f64(x).abs() < x.powf(alpha) || psi.eval_f64(-x).abs() < x.powf(alpha);
        match grid.iter().rposition(|&x| fails(x)) {
            None => {
                return Ok(tail_note(psi, alpha, grid[0], grid_max));
            }
            Some(i) if i + 1 < grid.len() => {
                return Ok(tail_note(psi, alpha, grid[i + 1], grid_max));
            }
            Some(_) => {
                alpha = 0.5 * (1.0 + alpha);
                if alpha - 1.0 < 1e-6 {
                    return Err(GsError::Inconsistent("no minorant exponent found on the grid".into()));
                }
            }
        }
    }
}

fn tail_note(psi: &Polynomial, alpha: f64, b: f64, grid_max: f64) -> Minorant {
    let tail = format!(
        "beyond |x| = {grid_max:e} the leading term {}x^{} dominates |x|^{alpha} since {} > {alpha}",
        psi.leading(),
        psi.degree(),
        psi.degree()
    );
    Minorant { alpha, b, grid_max, tail }
}
