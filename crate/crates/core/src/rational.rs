//! Exact rational helpers and their JSON encoding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

pub type Rational = BigRational;

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    BigRational::new(num.into(), den.into())
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    BigRational::from_integer(n.into())
}

/// `2^e` for any signed exponent.
pub fn pow2(e: i64) -> Rational {
    let mag = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    // Very large numerators/denominators: scale both down by the same power of two.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = (nb.max(db) - 900).max(0) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
    if d == 0.0 {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else {
        n / d
    }
}

/// `{"num": "...", "den": "...", "float": ...}` encoding of an exact rational.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactValue(pub Rational);

impl From<Rational> for ExactValue {
    fn from(r: Rational) -> Self {
        ExactValue(r)
    }
}

impl Serialize for ExactValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Rational", 3)?;
        st.serialize_field("num", &self.0.numer().to_string())?;
        st.serialize_field("den", &self.0.denom().to_string())?;
        st.serialize_field("float", &to_f64(&self.0))?;
        st.end()
    }
}

/// Serialize helper for `Option<Rational>` fields.
pub fn serialize_opt<S: Serializer>(
    v: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => ExactValue(r.clone()).serialize(s),
        None => s.serialize_none(),
    }
}

pub fn serialize_exact<S: Serializer>(v: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    ExactValue(v.clone()).serialize(s)
}

/// Integers are written as decimal strings so they survive JSON parsers.
pub fn serialize_bigint<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

/// Formats as `p/q` (or `p` for integers).
pub fn display(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Double factorial `(m-1)!!` for even `m`, zero for odd `m`; the m-th moment of N(0,1).
pub fn gaussian_moment(m: u32) -> u64 {
    if m % 2 == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut k = m.saturating_sub(1);
    while k > 1 {
        acc *= k as u64;
        k -= 2;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow2_signs() {
        assert_eq!(pow2(3), int(8));
        assert_eq!(pow2(-2), ratio(1, 4));
        assert_eq!(pow2(0), int(1));
    }

    #[test]
    fn gaussian_moments() {
        assert_eq!(gaussian_moment(0), 1);
        assert_eq!(gaussian_moment(2), 1);
        assert_eq!(gaussian_moment(4), 3);
        assert_eq!(gaussian_moment(6), 15);
        assert_eq!(gaussian_moment(3), 0);
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(ExactValue(ratio(21, 256))).unwrap();
        assert_eq!(v["num"], "21");
        assert_eq!(v["den"], "256");
        assert!((v["float"].as_f64().unwrap() - 0.08203125).abs() < 1e-15);
    }

    #[test]
    fn huge_to_f64() {
        let big = ratio(BigInt::one() << 2000usize, BigInt::from(3) << 2000usize);
        assert!((to_f64(&big) - 1.0 / 3.0).abs() < 1e-12);
    }
}
