//! Brute-force seminorm reference: separately written Hermite derivatives
//! and Gevrey factors, evaluated on a dense uniform grid.

use gsdyn_core::seminorms::{SeminormFamily, SeminormSpec};
use gsdyn_core::{FunctionModel, Weight};

pub fn gevrey_factor(d: f64, lambda: f64, n: usize) -> f64 {
    let xd = n as f64 / lambda * d;
    let conj = if xd >= 1.0 { xd * (xd.ln() - 1.0) } else { -1.0 };
    -lambda * conj
}

/// `f(x) = e^{−(k(x + c))²}` with derivatives from a separately written
/// Hermite recurrence; returns `(ln |f^{(n)}|)`.
pub fn gauss_log_derivs(k: f64, c: f64, x: f64, order: usize) -> Vec<f64> {
    let u = k * (x + c);
    let mut out = Vec::with_capacity(order + 1);
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut shift = 0.0;
    for n in 0..=order {
        let v = b.abs();
        out.push(if v == 0.0 { f64::NEG_INFINITY } else { v.ln() + shift + n as f64 * k.abs().ln() - u * u });
        let next = 2.0 * u * b - 2.0 * n as f64 * a;
        a = b;
        b = next;
        let m = a.abs().max(b.abs());
        if m > 1e150 {
            a /= m;
            b /= m;
            shift += m.ln();
        }
    }
    out
}

pub struct Pair {
    pub model: FunctionModel,
    pub k: f64,
    pub c: f64,
    pub spec: SeminormSpec,
    pub d: f64,
}

pub fn pairs() -> Vec<Pair> {
    let g = FunctionModel::gaussian;
    vec![
        Pair { model: g(1.0), k: 1.0, c: 0.0, spec: SeminormSpec::plain_p(Weight::gevrey(2.0), 1.0).unwrap(), d: 2.0 },
        Pair { model: g(1.0), k: 1.0, c: 0.0, spec: SeminormSpec::global_p(Weight::gevrey(2.0), 2.0).unwrap(), d: 2.0 },
        Pair {
            model: FunctionModel::scaled(g(1.0), 2.0),
            k: 2.0,
            c: 0.0,
            spec: SeminormSpec::plain_p(Weight::gevrey(3.0), 1.0).unwrap(),
            d: 3.0,
        },
        Pair { model: g(1.0), k: 1.0, c: 0.0, spec: SeminormSpec::exp_q(Weight::gevrey(2.0), 1.0, 1.0).unwrap(), d: 2.0 },
        Pair {
            model: FunctionModel::shifted(g(1.5), 0.5),
            k: 1.5,
            c: 0.5,
            spec: SeminormSpec::global_p(Weight::gevrey(1.5), 1.0).unwrap(),
            d: 1.5,
        },
    ]
}

pub fn cell_log(p: &Pair, derivs: &[f64], x: f64, j: usize, q: usize) -> f64 {
    let d = p.d;
    match p.spec.family {
        SeminormFamily::PlainP { lambda } => {
            let xq = if q == 0 { 0.0 } else { q as f64 * x.abs().ln() };
            xq + derivs[j] + gevrey_factor(d, lambda, j + q)
        }
        SeminormFamily::GlobalP { lambda } => q as f64 * x.abs().ln_1p() + derivs[j] + gevrey_factor(d, lambda, j + q),
        SeminormFamily::ExpQ { lambda, mu } => derivs[j] + gevrey_factor(d, lambda, j) + mu * x.abs().powf(1.0 / d),
        SeminormFamily::GevreySeq { .. } => unreachable!(),
    }
}

pub fn brute_point(p: &Pair, x: f64, m: usize) -> f64 {
    let derivs = gauss_log_derivs(p.k, p.c, x, m);
    let qmax = if matches!(p.spec.family, SeminormFamily::ExpQ { .. }) { 0 } else { m };
    let mut best = f64::NEG_INFINITY;
    for j in 0..=m {
        for q in 0..=qmax.min(m - j) {
            best = best.max(cell_log(p, &derivs, x, j, q));
        }
    }
    best
}

/// Uniform grid ten times denser than the library's, then a second uniform
/// pass around the best sample.
pub fn brute_force(p: &Pair, m: usize, radius: f64) -> f64 {
    let center = -p.c;
    let n = 20 * 1024;
    let h = 2.0 * radius / n as f64;
    let mut samples: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let x = center - radius + h * i as f64;
            (brute_point(p, x, m), x)
        })
        .collect();
    samples.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = samples[0].0;
    for &(_, x0) in samples.iter().take(8) {
        for i in 0..=400 {
            let x = x0 - h + 2.0 * h * i as f64 / 400.0;
            best = best.max(brute_point(p, x, m));
        }
    }
    best
}

