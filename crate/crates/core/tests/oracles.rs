//! Library results against independently coded references.

use gsdyn_core::jets::{faa_di_bruno_identity_sum, jet_of, multiplicity_partitions};
use gsdyn_core::polynomials::{int, iterate, Polynomial, Rational};
use gsdyn_core::seminorms::{eval_seminorm, SearchSpec};
use gsdyn_core::{FunctionModel, Weight, YoungConjugate};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

#[path = "support/seminorm_oracle.rs"]
mod seminorm_oracle;

use seminorm_oracle::{brute_force, pairs};

/// Partition numbers by Euler's pentagonal recurrence.
fn euler_partitions(n: usize) -> Vec<u64> {
    let mut p = vec![0i64; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let mut k = 1i64;
        let mut acc = 0i64;
        loop {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > m {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc += sign * p[m - g1];
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= m {
                acc += sign * p[m - g2];
            }
            k += 1;
        }
        p[m] = acc;
    }
    p.into_iter().map(|v| v as u64).collect()
}

#[test]
fn partition_counts_match_euler() {
    let p = euler_partitions(40);
    for j in 1..=40 {
        assert_eq!(multiplicity_partitions(j).unwrap().len() as u64, p[j], "j = {j}");
    }
}

#[test]
fn identity_sums_are_powers_of_two() {
    for j in 1..=30 {
        assert_eq!(faa_di_bruno_identity_sum(j).unwrap(), BigUint::one() << (j - 1));
    }
}

#[test]
fn numeric_conjugate_against_dense_scan() {
    for d in [1.5, 2.0, 3.0] {
        let yc = YoungConjugate::numeric(&Weight::gevrey(d));
        for x in [0.05, 0.4, 1.0, 2.5, 7.0] {
            let scan = (0..=400_000)
                .map(|i| {
                    let t = i as f64 * 1e-4;
                    x * t - (t / d).exp()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let v = yc.eval(x).unwrap();
            assert!(v >= scan - 1e-12 && v - scan < 1e-6, "d = {d}, x = {x}: {v} vs {scan}");
        }
    }
}

/// `H_n(u)` from the explicit sum, exactly.
fn hermite_exact(n: usize, u: &Rational) -> Rational {
    let mut fact = vec![BigInt::one()];
    for i in 1..=n {
        let prev = fact[i - 1].clone();
        fact.push(prev * BigInt::from(i));
    }
    let two_u = u * Rational::from_integer(BigInt::from(2));
    let mut s = Rational::zero();
    for k in 0..=n / 2 {
        let term = num_traits::pow(two_u.clone(), n - 2 * k)
            * Rational::new(fact[n].clone(), fact[k].clone() * fact[n - 2 * k].clone());
        if k % 2 == 0 {
            s += term;
        } else {
            s -= term;
        }
    }
    s
}

#[test]
fn gaussian_jets_against_exact_hermite() {
    for (num, den) in [(0, 1), (1, 3), (-5, 4), (7, 2), (-9, 1)] {
        let u = Rational::new(BigInt::from(num), BigInt::from(den));
        let x = num as f64 / den as f64;
        let jet = jet_of(&FunctionModel::gaussian(1.0), x, 60).unwrap();
        for n in 0..=60 {
            let h = hermite_exact(n, &u);
            let expect = if n % 2 == 1 { -h } else { h };
            let e = jet.entry(n);
            if expect.is_zero() {
                assert!(e.is_zero() || e.log_mag < -600.0);
                continue;
            }
            let num_ln = gsdyn_core::logsigned::ln_abs_bigint(expect.numer()) - gsdyn_core::logsigned::ln_abs_bigint(expect.denom());
            let want = num_ln - x * x;
            let sign = if expect > Rational::zero() { 1 } else { -1 };
            assert_eq!(e.sign, sign, "x = {x}, n = {n}");
            assert!((e.log_mag - want).abs() < 1e-9 * want.abs().max(1.0), "x = {x}, n = {n}");
        }
    }
}

#[test]
fn seminorm_matches_brute_force() {
    for p in pairs() {
        let r = eval_seminorm(&p.model, &p.spec, &SearchSpec::default()).unwrap();
        let width = 1.0 / p.k.abs();
        let brute = brute_force(&p, r.truncation.m, r.truncation.radius.max(12.0 * width));
        let rel = (r.log_value - brute).exp() - 1.0;
        assert!(rel.abs() < 1e-6, "{} {:?}: {} vs {}", p.model, p.spec.family, r.log_value, brute);
    }
}

#[test]
fn truncation_is_stable() {
    for p in pairs() {
        let r = eval_seminorm(&p.model, &p.spec, &SearchSpec::default()).unwrap();
        let m = r.truncation.m;
        let a = eval_seminorm(&p.model, &p.spec, &SearchSpec::fixed(m)).unwrap();
        let b = eval_seminorm(&p.model, &p.spec, &SearchSpec::fixed(m + 10)).unwrap();
        assert!(((b.log_value - a.log_value).exp() - 1.0).abs() < 1e-9, "{}", p.model);
    }
}

#[test]
fn square_derivatives_by_repeated_differentiation() {
    // f(y) = y − 1 has f'(1) = 1 and no other derivatives at 1.
    let sq = Polynomial::from_ints(&[0, 0, 1]);
    for m in 1..=8 {
        let mut p = iterate(&sq, m).unwrap().sub(&Polynomial::constant(int(1)));
        let n = 1u64 << m;
        let mut ff = 1u64;
        for j in 0..=m {
            if j > 0 {
                p = p.derivative();
                ff *= n - (j as u64 - 1);
                assert_eq!(p.eval(&int(1)).to_integer().to_u64().unwrap(), ff, "m = {m}, j = {j}");
            }
        }
    }
}
