//! Signed numbers carried as `(sign, ln|x|)`.
//!
//! Witness quantities routinely exceed `f64::MAX` (e.g. `2^{m^2/2}` at
//! `m = 40`) or underflow it, so all jet and seminorm arithmetic goes through
//! this representation.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogSigned {
    /// -1, 0 or +1.
    pub sign: i8,
    /// ln|x|; `-inf` iff `sign == 0`.
    pub log_mag: f64,
}

impl LogSigned {
    pub const ZERO: LogSigned = LogSigned { sign: 0, log_mag: f64::NEG_INFINITY };
    pub const ONE: LogSigned = LogSigned { sign: 1, log_mag: 0.0 };

    pub fn new(sign: i8, log_mag: f64) -> Self {
        if sign == 0 || log_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogSigned { sign: sign.signum(), log_mag }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogSigned { sign: if x > 0.0 { 1 } else { -1 }, log_mag: x.abs().ln() }
        }
    }

    /// Positive number with the given natural log.
    pub fn from_ln(log_mag: f64) -> Self {
        Self::new(1, log_mag)
    }

    pub fn from_bigint(x: &BigInt) -> Self {
        match x.sign() {
            Sign::NoSign => Self::ZERO,
            s => LogSigned {
                sign: if s == Sign::Minus { -1 } else { 1 },
                log_mag: ln_abs_bigint(x),
            },
        }
    }

    pub fn from_rational(x: &BigRational) -> Self {
        let n = Self::from_bigint(x.numer());
        if n.sign == 0 {
            return n;
        }
        let d = Self::from_bigint(x.denom());
        LogSigned { sign: n.sign * d.sign, log_mag: n.log_mag - d.log_mag }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        if self.sign == 0 {
            self
        } else {
            LogSigned { sign: 1, log_mag: self.log_mag }
        }
    }

    /// Value as `f64` (may overflow to `±inf` or underflow to 0).
    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_mag.exp()
        }
    }

    pub fn scale_ln(self, ln_factor: f64) -> Self {
        if self.sign == 0 {
            self
        } else {
            LogSigned { sign: self.sign, log_mag: self.log_mag + ln_factor }
        }
    }

    pub fn powi(self, n: u32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        if self.sign == 0 {
            return Self::ZERO;
        }
        let sign = if self.sign < 0 && n % 2 == 1 { -1 } else { 1 };
        LogSigned { sign, log_mag: self.log_mag * f64::from(n) }
    }

    /// Relative distance `|a - b| / max(|a|, |b|)`, computed in log space.
    pub fn rel_diff(self, other: Self) -> f64 {
        if self.sign == 0 && other.sign == 0 {
            return 0.0;
        }
        if self.sign != other.sign {
            return if self.sign == 0 || other.sign == 0 { 1.0 } else { 2.0 };
        }
        let d = (self.log_mag - other.log_mag).abs();
        -(-d).exp_m1()
    }
}

/// ln|x| for a big integer, accurate to ~1e-15 relative regardless of size.
pub fn ln_abs_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        let f: f64 = num_traits::ToPrimitive::to_f64(&x.magnitude().clone()).unwrap_or(f64::INFINITY);
        return f.ln();
    }
    let shift = bits - 64;
    let top: BigInt = x.magnitude().clone().into();
    let top: BigInt = top >> shift;
    let f = num_traits::ToPrimitive::to_f64(&top).unwrap_or(f64::INFINITY);
    f.ln() + (shift as f64) * std::f64::consts::LN_2
}

impl Neg for LogSigned {
    type Output = Self;
    fn neg(self) -> Self {
        LogSigned { sign: -self.sign, log_mag: self.log_mag }
    }
}

impl Mul for LogSigned {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            Self::ZERO
        } else {
            LogSigned { sign: self.sign * rhs.sign, log_mag: self.log_mag + rhs.log_mag }
        }
    }
}

impl Add for LogSigned {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_mag >= rhs.log_mag { (self, rhs) } else { (rhs, self) };
        let d = small.log_mag - big.log_mag;
        if big.sign == small.sign {
            LogSigned { sign: big.sign, log_mag: big.log_mag + d.exp().ln_1p() }
        } else {
            if d == 0.0 {
                return Self::ZERO;
            }
            // |big| - |small| = |big| (1 - e^d)
            LogSigned { sign: big.sign, log_mag: big.log_mag + (-(d.exp_m1())).ln() }
        }
    }
}

impl Sub for LogSigned {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl PartialOrd for LogSigned {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.log_mag.partial_cmp(&other.log_mag),
                _ => other.log_mag.partial_cmp(&self.log_mag),
            },
            o => Some(o),
        }
    }
}

/// `ln(n!)` by direct summation (exact enough for the index ranges used here).
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Serde adapter for log-domain numbers: non-finite values travel as the
/// strings `"-inf"`, `"inf"` and `"nan"` instead of JSON `null`.
pub mod serde_log {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "-inf" => Ok(f64::NEG_INFINITY),
                "inf" => Ok(f64::INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(serde::de::Error::custom(format!("bad log value `{s}`"))),
            },
        }
    }

    pub mod opt {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => super::serialize(x, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            #[derive(Deserialize)]
            struct W(#[serde(with = "super")] f64);
            Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_and_cancel() {
        let a = LogSigned::from_f64(3.0);
        let b = LogSigned::from_f64(-5.0);
        assert!(((a + b).to_f64() + 2.0).abs() < 1e-14);
        assert!((a - a).is_zero());
        assert!(((a * b).to_f64() + 15.0).abs() < 1e-12);
    }

    #[test]
    fn huge_bigint_log() {
        let x = BigInt::from(2u8).pow(5000);
        let l = ln_abs_bigint(&x);
        assert!((l - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn ordering_respects_sign() {
        let neg = LogSigned::from_f64(-1e300);
        let pos = LogSigned::from_ln(-5000.0);
        assert!(neg < LogSigned::ZERO);
        assert!(LogSigned::ZERO < pos);
    }
}
