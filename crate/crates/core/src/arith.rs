//! Small integer and rational helpers used throughout the crate.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn vp_rat(r: &BigRational, p: u64) -> Option<i64> {
    let vn = vp_int(r.numer(), p)?;
    let vd = vp_int(r.denom(), p).unwrap_or(0);
    Some(vn - vd)
}

/// Strip all factors of p: returns (v, r / p^v).
pub fn split_p(r: &BigRational, p: u64) -> Option<(i64, BigRational)> {
    let v = vp_rat(r, p)?;
    let pp = BigRational::from_integer(BigInt::from(p).pow(v.unsigned_abs() as u32));
    let u = if v >= 0 { r / pp } else { r * pp };
    Some((v, u))
}

pub fn pow_p(p: u64, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}

/// Nonnegative residue of `a` modulo `m`.
pub fn modp(a: &BigInt, m: &BigInt) -> BigInt {
    let r = a.mod_floor(m);
    debug_assert!(r.sign() != Sign::Minus);
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inv(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Image of a p-integral rational in Z/m (m a power of p).
pub fn rat_mod(r: &BigRational, m: &BigInt) -> Option<BigInt> {
    let inv = mod_inv(r.denom(), m)?;
    Some(modp(&(r.numer() * inv), m))
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn lcm_usize(a: usize, b: usize) -> usize {
    a.lcm(&b)
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

const TRIAL_LIMIT: u64 = 10_000_000;

/// Distinct prime factors of |n| (n ≠ 0), by trial division.
pub fn prime_factors(n: &BigUint) -> Result<Vec<u64>> {
    let mut m = n.clone();
    let mut out = Vec::new();
    if m.is_zero() {
        return Err(Error::Domain("prime factors of zero".into()));
    }
    let mut d = 2u64;
    while d <= TRIAL_LIMIT {
        let db = BigUint::from(d);
        if &db * &db > m {
            break;
        }
        if (&m % &db).is_zero() {
            out.push(d);
            while (&m % &db).is_zero() {
                m /= &db;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > BigUint::one() {
        let limit = BigUint::from(TRIAL_LIMIT);
        if m > &limit * &limit {
            return Err(Error::Unsupported(format!(
                "cannot certify primality of cofactor {m}"
            )));
        }
        out.push(
            m.to_u64()
                .ok_or_else(|| Error::Unsupported(format!("prime factor {m} exceeds u64")))?,
        );
    }
    out.sort_unstable();
    Ok(out)
}

/// Parse "a", "-a" or "a/b".
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Legendre-style sign: returns 1, -1 or 0.
pub fn sign_of(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub(crate) mod bigint_serde {
    //! BigInt as JSON number when it fits in i64, decimal string otherwise.
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub(crate) enum Repr {
        Small(i64),
        Text(String),
    }

    pub(crate) fn to_repr(n: &BigInt) -> Repr {
        match n.to_i64() {
            Some(v) => Repr::Small(v),
            None => Repr::Text(n.to_string()),
        }
    }

    pub(crate) fn from_repr<E: serde::de::Error>(r: Repr) -> Result<BigInt, E> {
        match r {
            Repr::Small(v) => Ok(BigInt::from(v)),
            Repr::Text(s) => s.parse().map_err(E::custom),
        }
    }

    pub fn serialize_vec<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(to_repr).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize_vec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Repr>::deserialize(d)?
            .into_iter()
            .map(from_repr)
            .collect()
    }
}

pub mod rational_serde {
    //! BigRational as "num/den" string (integers may also be plain JSON numbers).
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub(crate) enum Repr {
        Int(i64),
        Text(String),
    }

    pub(crate) fn parse<E: serde::de::Error>(r: Repr) -> Result<BigRational, E> {
        match r {
            Repr::Int(v) => Ok(super::rat_int(v)),
            Repr::Text(s) => super::parse_rational(&s).map_err(E::custom),
        }
    }

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        super::format_rational(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        parse(Repr::deserialize(d)?)
    }

    pub fn serialize_matrix<S: Serializer>(m: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|row| row.iter().map(super::format_rational).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize_matrix<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Vec<Vec<BigRational>>, D::Error> {
        Vec::<Vec<Repr>>::deserialize(d)?
            .into_iter()
            .map(|row| row.into_iter().map(parse).collect())
            .collect()
    }

    pub fn serialize_vec<S: Serializer>(m: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(super::format_rational)
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize_vec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<Repr>::deserialize(d)?.into_iter().map(parse).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(vp_rat(&rat(50, 3), 5), Some(2));
        assert_eq!(vp_rat(&rat(3, 25), 5), Some(-2));
        assert_eq!(vp_rat(&rat(0, 1), 5), None);
        let (v, u) = split_p(&rat(-12, 7), 2).unwrap();
        assert_eq!(v, 2);
        assert_eq!(u, rat(-3, 7));
    }

    #[test]
    fn factoring() {
        assert_eq!(prime_factors(&BigUint::from(360u32)).unwrap(), vec![2, 3, 5]);
        assert_eq!(prime_factors(&BigUint::from(1u32)).unwrap(), Vec::<u64>::new());
        assert_eq!(prime_factors(&BigUint::from(97u32 * 101)).unwrap(), vec![97, 101]);
    }

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat_int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(rat_mod(&rat(1, 2), &big(9)), Some(big(5)));
    }
}
