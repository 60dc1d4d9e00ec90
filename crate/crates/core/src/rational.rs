//! Exact rational scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// `(-1)^k` as a rational.
pub fn sign(k: usize) -> Q {
    if k % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

pub fn factorial(n: usize) -> Q {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Q::from_integer(acc)
}

pub fn binomial(n: usize, k: usize) -> Q {
    if k > n {
        return Q::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Numerator and denominator as i64 when they fit.
pub fn to_i64_pair(x: &Q) -> Option<(i64, i64)> {
    Some((x.numer().to_i64()?, x.denom().to_i64()?))
}

pub fn to_string_pair(x: &Q) -> (String, String) {
    (x.numer().to_string(), x.denom().to_string())
}

/// JSON value `[num, den]`, with integers that overflow i64 written as strings.
pub fn to_json(x: &Q) -> serde_json::Value {
    match to_i64_pair(x) {
        Some((n, d)) => serde_json::json!([n, d]),
        None => {
            let (n, d) = to_string_pair(x);
            serde_json::json!([n, d])
        }
    }
}

/// Inverse of [`to_json`].
pub fn from_json(v: &serde_json::Value) -> Option<Q> {
    let a = v.as_array()?;
    if a.len() != 2 {
        return None;
    }
    let part = |x: &serde_json::Value| -> Option<BigInt> {
        match x {
            serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
            serde_json::Value::String(s) => s.parse().ok(),
            _ => None,
        }
    };
    let (n, d) = (part(&a[0])?, part(&a[1])?);
    if d.is_zero() {
        return None;
    }
    Some(Q::new(n, d))
}

/// `serialize_with` adapters writing rationals as `[num, den]`.
pub mod exact {
    use super::{to_json, Q};
    use serde::ser::{SerializeSeq, Serializer};
    use serde::Serialize;

    pub fn q<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        to_json(x).serialize(s)
    }

    pub fn vec<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&to_json(x))?;
        }
        seq.end()
    }

    pub fn terms<S: Serializer>(xs: &[(String, Q)], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for (k, x) in xs {
            seq.serialize_element(&(k, to_json(x)))?;
        }
        seq.end()
    }

    pub fn terms_vec<S: Serializer>(xs: &[Vec<(String, Q)>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for t in xs {
            let v: Vec<_> = t.iter().map(|(k, x)| (k.clone(), to_json(x))).collect();
            seq.serialize_element(&v)?;
        }
        seq.end()
    }
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// Parse "3", "-1/2" or "5/7".
pub fn parse(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            if b.is_zero() {
                return None;
            }
            Some(Q::new(a, b))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        assert_eq!(q(2, 4), q(1, 2));
        assert_eq!(sign(3), qi(-1));
        assert_eq!(factorial(5), qi(120));
        assert_eq!(binomial(5, 2), qi(10));
        assert_eq!(parse("-3/6"), Some(q(-1, 2)));
        assert_eq!(parse("7"), Some(qi(7)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(to_i64_pair(&q(-3, 4)), Some((-3, 4)));
    }
}
